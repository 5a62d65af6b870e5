//! The planar walk that never steps into the interior of its own past convex
//! hull.
//!
//! At a vertex `x` of a convex polygon the whole polygon lies in the cone
//! spanned by the two edges leaving `x`. A unit step whose direction is
//! outside that cone stays out of the interior, and a direction strictly
//! inside the cone enters the interior immediately. The legal directions are
//! therefore the arc from the clockwise edge direction, turning
//! counterclockwise, to the counterclockwise edge direction, of measure
//! `2π − interior angle`. Steps are drawn uniformly from that arc.

use std::f64::consts::TAU;

use serde::Serialize;
use thiserror::Error;

use crate::geom::{wrap_angle, ConvexPolygon, GeomError, HullDiagnostics, Point2};
use crate::rng::RandomStream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("checkpoints must be strictly increasing and at most the step count ({steps})")]
    BadCheckpoints { steps: u64 },
    #[error("geometry invariant broken at step {n}: {source}")]
    Geometry {
        n: u64,
        #[source]
        source: GeomError,
    },
}

pub(crate) fn check_checkpoints(steps: u64, checkpoints: &[u64]) -> Result<(), RunError> {
    let ascending = checkpoints.windows(2).all(|w| w[0] < w[1]);
    let bounded = checkpoints.last().is_none_or(|&c| c <= steps);
    if ascending && bounded {
        Ok(())
    } else {
        Err(RunError::BadCheckpoints { steps })
    }
}

/// Legal step directions: angles `start + t` for `t` in `[0, measure]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllowedArc {
    pub start: f64,
    pub measure: f64,
}

impl AllowedArc {
    pub const FULL: AllowedArc = AllowedArc {
        start: 0.0,
        measure: TAU,
    };

    /// Whether direction `theta` lies on the closed arc.
    pub fn contains(&self, theta: f64) -> bool {
        (theta - self.start).rem_euclid(TAU) <= self.measure
    }
}

/// Record of one executed step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub from: Point2,
    pub to: Point2,
    pub theta: f64,
    /// Step angle measured from the outward direction, positive
    /// counterclockwise; `None` when leaving the origin.
    pub beta: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Rancher {
    hull: ConvexPolygon,
    n: u64,
    max_norm: f64,
    last_beta: Option<f64>,
    path: Option<Vec<Point2>>,
}

impl Default for Rancher {
    fn default() -> Self {
        Self::new()
    }
}

impl Rancher {
    pub fn new() -> Self {
        Self {
            hull: ConvexPolygon::singleton(Point2::ORIGIN),
            n: 0,
            max_norm: 0.0,
            last_beta: None,
            path: None,
        }
    }

    /// Walker that also keeps every visited point.
    pub fn with_path() -> Self {
        Self {
            path: Some(vec![Point2::ORIGIN]),
            ..Self::new()
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn position(&self) -> Point2 {
        self.hull.cursor()
    }

    pub fn hull(&self) -> &ConvexPolygon {
        &self.hull
    }

    pub fn path(&self) -> Option<&[Point2]> {
        self.path.as_deref()
    }

    pub fn last_beta(&self) -> Option<f64> {
        self.last_beta
    }

    /// Radius of the smallest origin-centred disk holding the ranch.
    pub fn enclosing_radius(&self) -> f64 {
        self.max_norm
    }

    pub fn allowed_arc(&self) -> AllowedArc {
        match self.hull.interior_angle_at_cursor() {
            Err(_) => AllowedArc::FULL,
            Ok(angle) => {
                let x = self.hull.cursor();
                AllowedArc {
                    start: (self.hull.cw_neighbor() - x).arg(),
                    measure: TAU - angle,
                }
            }
        }
    }

    /// Diagnostics against the origin using the cached enclosing radius.
    pub fn diagnostics(&self) -> Result<HullDiagnostics, GeomError> {
        self.hull
            .diagnostics_with_radius(Point2::ORIGIN, self.max_norm)
    }

    pub fn step(&mut self, stream: &mut RandomStream) -> Result<StepInfo, RunError> {
        let arc = self.allowed_arc();
        let theta = arc.start + stream.unit() * arc.measure;
        self.step_towards(theta)
    }

    /// Moves one unit in direction `theta` without checking the arc.
    pub(crate) fn step_towards(&mut self, theta: f64) -> Result<StepInfo, RunError> {
        let from = self.hull.cursor();
        let to = from + Point2::from_angle(theta);
        self.hull
            .insert_adjacent(to)
            .map_err(|source| RunError::Geometry { n: self.n, source })?;
        let beta = (from != Point2::ORIGIN).then(|| wrap_angle(theta - from.arg()));
        self.n += 1;
        self.max_norm = self.max_norm.max(to.norm());
        self.last_beta = beta;
        if let Some(path) = self.path.as_mut() {
            path.push(to);
        }
        Ok(StepInfo {
            from,
            to,
            theta,
            beta,
        })
    }

    pub fn record(&self) -> RancherRecord {
        let x = self.position();
        let norm = x.norm();
        let diag = self.diagnostics().ok();
        RancherRecord {
            n: self.n,
            position: x,
            norm,
            width: self.hull.farthest_from_line(Point2::ORIGIN, x).ok(),
            direction: (norm > 0.0).then(|| x.arg()),
            alpha: diag.map(|d| d.alpha),
            alpha_prime: diag.map(|d| d.alpha_prime),
            d: diag.map(|d| d.d),
            hull_size: self.hull.len(),
            beta: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RancherRecord {
    pub n: u64,
    pub position: Point2,
    pub norm: f64,
    pub width: Option<f64>,
    pub direction: Option<f64>,
    pub alpha: Option<f64>,
    pub alpha_prime: Option<f64>,
    pub d: Option<f64>,
    pub hull_size: usize,
    pub beta: Option<f64>,
}

/// Runs a walk of `steps` steps and records the state at each checkpoint.
pub fn run(
    steps: u64,
    stream: &mut RandomStream,
    checkpoints: &[u64],
    record_beta: bool,
) -> Result<Vec<RancherRecord>, RunError> {
    run_walker(Rancher::new(), steps, stream, checkpoints, record_beta).map(|(r, _)| r)
}

/// As [`run`], starting from the given walker (for example one that keeps its
/// path) and handing it back afterwards.
pub fn run_walker(
    mut walker: Rancher,
    steps: u64,
    stream: &mut RandomStream,
    checkpoints: &[u64],
    record_beta: bool,
) -> Result<(Vec<RancherRecord>, Rancher), RunError> {
    check_checkpoints(steps, checkpoints)?;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    while next.next_if(|&&c| c < walker.n()).is_some() {}
    loop {
        if next.next_if(|&&c| c == walker.n()).is_some() {
            let mut rec = walker.record();
            if record_beta {
                rec.beta = walker.last_beta();
            }
            out.push(rec);
        }
        if walker.n() >= steps || next.peek().is_none() {
            break;
        }
        walker.step(stream)?;
    }
    // finish the walk even when no checkpoints remain
    while walker.n() < steps {
        walker.step(stream)?;
    }
    Ok((out, walker))
}
