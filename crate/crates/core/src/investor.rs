//! The extremal investor: a Gaussian log-price walk pushed by `α` times the
//! average of the best and worst past rates of return ending now.
//!
//! The graph points `(m, x_m)` arrive with increasing abscissa, so their
//! convex hull is kept as a lower and an upper monotone chain. Both the
//! extremal rates and the width are extreme values of functions whose extrema
//! over the past are attained at hull vertices, so each query scans only the
//! chains.

use serde::Serialize;
use thiserror::Error;

use crate::geom::{ConvexPolygon, Point2};
use crate::rancher::{check_checkpoints, RunError};
use crate::rng::RandomStream;

/// Runs stop once `|x|` exceeds this.
pub const BLOWUP_LIMIT: f64 = 1e300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InvestorError {
    #[error("no past graph points at n = 0")]
    NoPast,
    #[error("negative or non-finite influence parameter {0}")]
    BadAlpha(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    Running,
    BlownUp,
}

#[derive(Debug, Clone)]
pub struct Investor {
    alpha: f64,
    n: u64,
    x: f64,
    lower: Vec<Point2>,
    upper: Vec<Point2>,
    path: Option<Vec<f64>>,
}

impl Investor {
    pub fn new(alpha: f64) -> Result<Self, InvestorError> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(InvestorError::BadAlpha(alpha));
        }
        Ok(Self {
            alpha,
            n: 0,
            x: 0.0,
            lower: vec![Point2::ORIGIN],
            upper: vec![Point2::ORIGIN],
            path: None,
        })
    }

    pub fn with_path(alpha: f64) -> Result<Self, InvestorError> {
        let mut s = Self::new(alpha)?;
        s.path = Some(vec![0.0]);
        Ok(s)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn path(&self) -> Option<&[f64]> {
        self.path.as_deref()
    }

    pub fn lower_chain(&self) -> &[Point2] {
        &self.lower
    }

    pub fn upper_chain(&self) -> &[Point2] {
        &self.upper
    }

    /// Hull of the graph as a polygon with the present point as cursor.
    pub fn graph_hull(&self) -> ConvexPolygon {
        let mut verts: Vec<Point2> = self.lower.clone();
        verts.extend(
            self.upper
                .iter()
                .rev()
                .skip(1)
                .take(self.upper.len().saturating_sub(2)),
        );
        let cursor = self.lower.len() - 1;
        ConvexPolygon::from_ccw_unchecked(&verts, cursor)
    }

    fn past_vertices(&self) -> impl Iterator<Item = Point2> + '_ {
        let nl = self.lower.len() - 1;
        let nu = self.upper.len() - 1;
        self.lower[..nl].iter().chain(&self.upper[..nu]).copied()
    }

    /// `(rmax, rmin)`: the extreme slopes from past graph points to the present one.
    pub fn extremal_rates(&self) -> Result<(f64, f64), InvestorError> {
        if self.n == 0 {
            return Err(InvestorError::NoPast);
        }
        let n = self.n as f64;
        let (mut rmax, mut rmin) = (f64::NEG_INFINITY, f64::INFINITY);
        for v in self.past_vertices() {
            let r = (self.x - v.y) / (n - v.x);
            rmax = rmax.max(r);
            rmin = rmin.min(r);
        }
        Ok((rmax, rmin))
    }

    /// Largest deviation of the graph from the chord `(0, 0) → (n, x_n)`.
    pub fn width(&self) -> Result<f64, InvestorError> {
        if self.n == 0 {
            return Err(InvestorError::NoPast);
        }
        let slope = self.x / self.n as f64;
        Ok(self
            .past_vertices()
            .map(|v| (v.y - v.x * slope).abs())
            .fold(0.0, f64::max))
    }

    pub fn step(&mut self, stream: &mut RandomStream) -> StepStatus {
        let drift = match self.extremal_rates() {
            Ok((rmax, rmin)) => self.alpha * 0.5 * (rmax + rmin),
            Err(_) => 0.0,
        };
        self.advance(drift + stream.gaussian())
    }

    pub(crate) fn advance(&mut self, increment: f64) -> StepStatus {
        self.x += increment;
        self.n += 1;
        let p = Point2::new(self.n as f64, self.x);
        push_chain(&mut self.lower, p, |a, b| a >= b);
        push_chain(&mut self.upper, p, |a, b| a <= b);
        if let Some(path) = self.path.as_mut() {
            path.push(self.x);
        }
        if self.x.abs() <= BLOWUP_LIMIT {
            StepStatus::Running
        } else {
            StepStatus::BlownUp
        }
    }

    pub fn record(&self) -> InvestorRecord {
        let rates = self.extremal_rates().ok();
        InvestorRecord {
            n: self.n,
            x: self.x,
            rmax: rates.map(|r| r.0),
            rmin: rates.map(|r| r.1),
            width: self.width().ok(),
            ratio: (self.n > 0).then(|| self.x / self.n as f64),
            blown_up: false,
        }
    }
}

/// Monotone chain push; `drop(s_prev, s_new)` decides whether the middle
/// point is not strictly extreme. Slopes are compared instead of cross
/// products so huge log-prices cannot overflow.
fn push_chain(chain: &mut Vec<Point2>, p: Point2, drop: impl Fn(f64, f64) -> bool) {
    while chain.len() >= 2 {
        let a = chain[chain.len() - 2];
        let b = chain[chain.len() - 1];
        let s_prev = (b.y - a.y) / (b.x - a.x);
        let s_new = (p.y - b.y) / (p.x - b.x);
        if drop(s_prev, s_new) {
            chain.pop();
        } else {
            break;
        }
    }
    chain.push(p);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvestorRecord {
    pub n: u64,
    pub x: f64,
    pub rmax: Option<f64>,
    pub rmin: Option<f64>,
    pub width: Option<f64>,
    pub ratio: Option<f64>,
    /// Final record of a run stopped by the blow-up guard.
    pub blown_up: bool,
}

/// Runs `steps` steps, recording at each checkpoint. A run that trips the
/// blow-up guard ends with a record marked `blown_up`.
pub fn run(
    alpha: f64,
    steps: u64,
    stream: &mut RandomStream,
    checkpoints: &[u64],
) -> Result<Vec<InvestorRecord>, InvestorRunError> {
    run_walker(Investor::new(alpha)?, steps, stream, checkpoints).map(|(r, _)| r)
}

pub fn run_walker(
    mut walker: Investor,
    steps: u64,
    stream: &mut RandomStream,
    checkpoints: &[u64],
) -> Result<(Vec<InvestorRecord>, Investor), InvestorRunError> {
    check_checkpoints(steps, checkpoints)?;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    while next.next_if(|&&c| c < walker.n()).is_some() {}
    loop {
        if next.next_if(|&&c| c == walker.n()).is_some() {
            out.push(walker.record());
        }
        if walker.n() >= steps {
            break;
        }
        if walker.step(stream) == StepStatus::BlownUp {
            let mut marker = walker.record();
            marker.blown_up = true;
            out.push(marker);
            break;
        }
    }
    Ok((out, walker))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InvestorRunError {
    #[error(transparent)]
    Investor(#[from] InvestorError),
    #[error(transparent)]
    Run(#[from] RunError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn from_values(xs: &[f64]) -> Investor {
        let mut inv = Investor::with_path(0.0).unwrap();
        for w in xs.windows(2) {
            inv.advance(w[1] - w[0]);
        }
        inv
    }

    #[test]
    fn rates_examples() {
        assert_eq!(from_values(&[0., 1.]).extremal_rates().unwrap(), (1., 1.));
        assert_eq!(
            from_values(&[0., 1., 3.]).extremal_rates().unwrap(),
            (2., 1.5)
        );
        assert_eq!(
            from_values(&[0., -1., 0.5]).extremal_rates().unwrap(),
            (1.5, 0.25)
        );
        assert_eq!(
            Investor::new(1.0).unwrap().extremal_rates(),
            Err(InvestorError::NoPast)
        );
    }

    #[test]
    fn width_examples() {
        assert_eq!(from_values(&[0., 1., 2.]).width().unwrap(), 0.0);
        assert_eq!(from_values(&[0., 1., 0.]).width().unwrap(), 1.0);
        assert_eq!(
            Investor::new(0.0).unwrap().width(),
            Err(InvestorError::NoPast)
        );
    }

    #[test]
    fn convex_sequence_rates() {
        let xs: Vec<f64> = (0..40).map(|m| (m * m) as f64).collect();
        for n in 2..xs.len() {
            let inv = from_values(&xs[..=n]);
            let (rmax, rmin) = inv.extremal_rates().unwrap();
            assert!((rmax - (xs[n] - xs[n - 1])).abs() < 1e-9);
            assert!((rmin - xs[n] / n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn first_increment_is_pure_gaussian() {
        let mut inv = Investor::new(5.0).unwrap();
        let mut s = RandomStream::new(8);
        let mut t = RandomStream::new(8);
        inv.step(&mut s);
        assert_eq!(inv.x(), t.gaussian());
    }

    #[test]
    fn bad_alpha_is_rejected() {
        assert!(Investor::new(-0.1).is_err());
        assert!(Investor::new(f64::NAN).is_err());
    }

    #[test]
    fn fast_queries_match_naive_scans() {
        for seed in 0..20 {
            let mut s = RandomStream::new(seed);
            let mut inv = Investor::with_path(1.0).unwrap();
            for _ in 0..300 {
                inv.step(&mut s);
                let xs = inv.path().unwrap();
                let (a, b) = inv.extremal_rates().unwrap();
                let (c, d) = oracle::naive_rates(xs).unwrap();
                assert!((a - c).abs() <= 1e-9 && (b - d).abs() <= 1e-9);
                let w = oracle::naive_investor_width(xs).unwrap();
                assert!((inv.width().unwrap() - w).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn graph_hull_contains_past_points() {
        let mut s = RandomStream::new(4);
        let mut inv = Investor::with_path(1.0).unwrap();
        for _ in 0..200 {
            inv.step(&mut s);
        }
        let hull = inv.graph_hull();
        assert_eq!(hull.cursor(), Point2::new(200.0, inv.x()));
        for (m, &x) in inv.path().unwrap().iter().enumerate() {
            assert!(hull.contains(Point2::new(m as f64, x)));
        }
    }

    #[test]
    fn blowup_terminates_with_marker() {
        let mut inv = Investor::new(0.0).unwrap();
        assert_eq!(inv.advance(2e300), StepStatus::BlownUp);
        let recs = run(1.0, 0, &mut RandomStream::new(1), &[0]).unwrap();
        assert!(!recs[0].blown_up);
    }
}
