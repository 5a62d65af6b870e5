//! Simulation and estimation engine for two self-interacting processes: the
//! planar walk that never steps into the interior of its past convex hull,
//! and the extremal investor log-price process.
//!
//! - [`rng`]: seedable ChaCha streams with per-walk substreams.
//! - [`geom`]: points, orientation and the incrementally grown hull.
//! - [`rancher`]: the hull-avoiding walk.
//! - [`investor`]: the extremal investor.
//! - [`stats`]: width-exponent regressions, speed summaries, direction series.
//! - [`lyapunov`]: empirical drift checks for the potential behind the speed bound.
//! - [`oracle`]: slow reference implementations.
//! - [`par`]: ensemble execution, parallel with the `parallel` feature.

// `!(x > 0.0)` guards are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod geom;
pub mod investor;
pub mod lyapunov;
pub mod oracle;
pub mod par;
pub mod rancher;
pub mod rng;
pub mod stats;

pub use geom::{ConvexPolygon, GeomError, HullDiagnostics, Orientation, Point2};
pub use investor::{Investor, InvestorRecord};
pub use rancher::{Rancher, RancherRecord};
pub use rng::{RandomStream, RNG_NAME};
pub use stats::{Aggregator, Model, RegressionFit, SampleRecord};
