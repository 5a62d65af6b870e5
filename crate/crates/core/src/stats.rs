//! Ensembles and estimators: log-log width regressions, terminal speed
//! summaries and the direction series.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::investor::{self, InvestorRecord, InvestorRunError};
use crate::par;
use crate::rancher::{self, RancherRecord, RunError};
use crate::rng::RandomStream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("non-positive or non-finite datum w = {w} at n = {n}")]
    InvalidDatum { n: u64, w: f64 },
    #[error("regression needs at least two distinct abscissas")]
    RankDeficient,
    #[error("invalid parameter: {0}")]
    BadParameter(&'static str),
    #[error(transparent)]
    Rancher(#[from] RunError),
    #[error(transparent)]
    Investor(#[from] InvestorRunError),
}

/// Per-checkpoint observables shared by both processes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRecord {
    pub n: u64,
    pub norm: f64,
    pub width: Option<f64>,
    pub direction: Option<f64>,
    pub extras: BTreeMap<&'static str, f64>,
}

impl From<&RancherRecord> for SampleRecord {
    fn from(r: &RancherRecord) -> Self {
        let mut extras = BTreeMap::new();
        extras.insert("x", r.position.x);
        extras.insert("y", r.position.y);
        extras.insert("hull_size", r.hull_size as f64);
        for (k, v) in [
            ("alpha", r.alpha),
            ("alpha_prime", r.alpha_prime),
            ("d", r.d),
        ] {
            if let Some(v) = v {
                extras.insert(k, v);
            }
        }
        SampleRecord {
            n: r.n,
            norm: r.norm,
            width: r.width,
            direction: r.direction,
            extras,
        }
    }
}

impl From<&InvestorRecord> for SampleRecord {
    fn from(r: &InvestorRecord) -> Self {
        let mut extras = BTreeMap::new();
        extras.insert("x", r.x);
        for (k, v) in [("rmax", r.rmax), ("rmin", r.rmin), ("ratio", r.ratio)] {
            if let Some(v) = v {
                extras.insert(k, v);
            }
        }
        SampleRecord {
            n: r.n,
            norm: r.x.abs(),
            width: r.width,
            direction: None,
            extras,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr_slope: f64,
    pub npoints: usize,
}

/// Ordinary least squares of `log10 w` on `log10 n`.
pub fn loglog_fit(points: &[(u64, f64)]) -> Result<RegressionFit, StatsError> {
    for &(n, w) in points {
        if !(w > 0.0 && w.is_finite()) || n == 0 {
            return Err(StatsError::InvalidDatum { n, w });
        }
    }
    let k = points.len();
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).log10()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, w)| w.log10()).collect();
    if k < 2 || xs.iter().all(|&x| x == xs[0]) {
        return Err(StatsError::RankDeficient);
    }
    let kf = k as f64;
    let mx = xs.iter().sum::<f64>() / kf;
    let my = ys.iter().sum::<f64>() / kf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr_slope = if k > 2 {
        let ssr: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (ssr / (kf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(RegressionFit {
        slope,
        intercept,
        stderr_slope,
        npoints: k,
    })
}

/// Checkpoints `0`, the integers nearest `10^(k/per_decade)` up to `steps`,
/// and `steps` itself.
pub fn geometric_checkpoints(steps: u64, per_decade: u32) -> Vec<u64> {
    let mut out = vec![0];
    if steps == 0 {
        return out;
    }
    let per = per_decade.max(1) as f64;
    for k in 0.. {
        let c = 10f64.powf(k as f64 / per).round() as u64;
        if c > steps {
            break;
        }
        if *out.last().unwrap() < c {
            out.push(c);
        }
    }
    if *out.last().unwrap() < steps {
        out.push(steps);
    }
    out
}

/// A process that can be run for a number of steps and observed at
/// checkpoints.
pub trait WalkModel: Sync {
    fn label(&self) -> String;

    fn sample(
        &self,
        steps: u64,
        checkpoints: &[u64],
        stream: &mut RandomStream,
    ) -> Result<Vec<SampleRecord>, StatsError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Model {
    Rancher,
    Investor { alpha: f64 },
}

impl WalkModel for Model {
    fn label(&self) -> String {
        match self {
            Model::Rancher => "rancher".into(),
            Model::Investor { alpha } => format!("investor(alpha={alpha})"),
        }
    }

    fn sample(
        &self,
        steps: u64,
        checkpoints: &[u64],
        stream: &mut RandomStream,
    ) -> Result<Vec<SampleRecord>, StatsError> {
        Ok(match *self {
            Model::Rancher => rancher::run(steps, stream, checkpoints, false)?
                .iter()
                .map(SampleRecord::from)
                .collect(),
            Model::Investor { alpha } => investor::run(alpha, steps, stream, checkpoints)?
                .iter()
                .filter(|r| !r.blown_up)
                .map(SampleRecord::from)
                .collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregator {
    /// One long walk per replicate, observed at every length.
    PerWalkPoints,
    Median,
    Mean,
}

impl FromStr for Aggregator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per-walk-points" => Ok(Aggregator::PerWalkPoints),
            "median" => Ok(Aggregator::Median),
            "mean" => Ok(Aggregator::Mean),
            other => Err(format!("unknown aggregator '{other}'")),
        }
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregator::PerWalkPoints => "per-walk-points",
            Aggregator::Median => "median",
            Aggregator::Mean => "mean",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentResult {
    pub fit: RegressionFit,
    /// Points entering the regression.
    pub points: Vec<(u64, f64)>,
    /// Every per-walk observation that survived dropping.
    pub raw: Vec<(u64, f64)>,
    /// Observations with zero or missing width.
    pub dropped: usize,
    pub aggregator: Aggregator,
    /// How the per-length observations were produced.
    pub protocol: &'static str,
}

/// Width scaling experiment.
///
/// `Median` and `Mean` run `reps` independent walks per length and reduce
/// their final widths. `PerWalkPoints` runs `reps` walks of the longest
/// length, observed at every length, and regresses on all observations.
pub fn exponent_experiment<M: WalkModel + ?Sized>(
    model: &M,
    lengths: &[u64],
    reps: u64,
    seed: u64,
    aggregator: Aggregator,
) -> Result<ExponentResult, StatsError> {
    if lengths.is_empty() || !lengths.windows(2).all(|w| w[0] < w[1]) {
        return Err(StatsError::BadParameter(
            "lengths must be non-empty and ascending",
        ));
    }
    if reps == 0 {
        return Err(StatsError::BadParameter("reps must be at least 1"));
    }
    let mut dropped = 0;
    let mut raw = Vec::new();
    let mut points = Vec::new();
    match aggregator {
        Aggregator::PerWalkPoints => {
            let longest = *lengths.last().unwrap();
            let runs = par::map_indexed(reps as usize, |rep| {
                let mut stream = RandomStream::derive(seed, rep as u64);
                model.sample(longest, lengths, &mut stream)
            });
            for run in runs {
                let recs = run?;
                for &len in lengths {
                    match recs.iter().find(|r| r.n == len).and_then(|r| r.width) {
                        Some(w) if w > 0.0 => raw.push((len, w)),
                        _ => dropped += 1,
                    }
                }
            }
            points = raw.clone();
        }
        Aggregator::Median | Aggregator::Mean => {
            let grid: Vec<(usize, u64)> = (0..lengths.len())
                .flat_map(|li| (0..reps).map(move |rep| (li, rep)))
                .collect();
            let widths = par::map_indexed(grid.len(), |k| {
                let (li, rep) = grid[k];
                let len = lengths[li];
                let mut stream = RandomStream::derive(seed, ((li as u64) << 32) | rep);
                model
                    .sample(len, &[len], &mut stream)
                    .map(|recs| recs.last().filter(|r| r.n == len).and_then(|r| r.width))
            });
            let mut per_len: Vec<Vec<f64>> = vec![Vec::new(); lengths.len()];
            for (k, w) in widths.into_iter().enumerate() {
                let li = grid[k].0;
                match w? {
                    Some(w) if w > 0.0 => {
                        per_len[li].push(w);
                        raw.push((lengths[li], w));
                    }
                    _ => dropped += 1,
                }
            }
            for (li, mut ws) in per_len.into_iter().enumerate() {
                if ws.is_empty() {
                    continue;
                }
                let v = if aggregator == Aggregator::Median {
                    median(&mut ws)
                } else {
                    ws.iter().sum::<f64>() / ws.len() as f64
                };
                points.push((lengths[li], v));
            }
        }
    }
    let fit = loglog_fit(&points)?;
    Ok(ExponentResult {
        fit,
        points,
        raw,
        dropped,
        aggregator,
        protocol: match aggregator {
            Aggregator::PerWalkPoints => "one walk per replicate sampled at every length",
            _ => "independent walk per (length, replicate), final-time width",
        },
    })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedSummary {
    pub reps: u64,
    pub steps: u64,
    pub mean: f64,
    pub sd: f64,
    /// `(q, value)` for q in 0.05, 0.25, 0.5, 0.75, 0.95.
    pub quantiles: Vec<(f64, f64)>,
    pub speeds: Vec<f64>,
}

/// Distribution of `‖x_steps‖ / steps` over `reps` independent walks.
pub fn speed_experiment<M: WalkModel + ?Sized>(
    model: &M,
    reps: u64,
    steps: u64,
    seed: u64,
) -> Result<SpeedSummary, StatsError> {
    if reps == 0 || steps == 0 {
        return Err(StatsError::BadParameter(
            "reps and steps must be at least 1",
        ));
    }
    let runs = par::map_indexed(reps as usize, |rep| {
        let mut stream = RandomStream::derive(seed, rep as u64);
        model.sample(steps, &[steps], &mut stream)
    });
    let mut speeds = Vec::with_capacity(reps as usize);
    for run in runs {
        let recs = run?;
        let norm = recs.last().map_or(f64::NAN, |r| r.norm);
        speeds.push(norm / steps as f64);
    }
    let k = speeds.len() as f64;
    let mean = speeds.iter().sum::<f64>() / k;
    let sd = if speeds.len() > 1 {
        (speeds.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = speeds.clone();
    sorted.sort_by(f64::total_cmp);
    let quantiles = [0.05, 0.25, 0.5, 0.75, 0.95]
        .iter()
        .map(|&q| (q, quantile(&sorted, q)))
        .collect();
    Ok(SpeedSummary {
        reps,
        steps,
        mean,
        sd,
        quantiles,
        speeds,
    })
}

/// Unwrapped polar angle of the walker at each record with a defined direction.
pub fn direction_series(records: &[SampleRecord]) -> Vec<(u64, f64)> {
    unwrap_angles(
        records
            .iter()
            .filter(|r| r.norm > 0.0)
            .filter_map(|r| r.direction.map(|d| (r.n, d))),
    )
}

/// Removes ±2π jumps between consecutive angles.
pub fn unwrap_angles(raw: impl IntoIterator<Item = (u64, f64)>) -> Vec<(u64, f64)> {
    let mut out: Vec<(u64, f64)> = Vec::new();
    for (n, a) in raw {
        let v = match out.last() {
            None => a,
            Some(&(_, prev)) => {
                let delta = (a - prev).rem_euclid(TAU);
                let delta = if delta > TAU / 2.0 {
                    delta - TAU
                } else {
                    delta
                };
                prev + delta
            }
        };
        out.push((n, v));
    }
    out
}

/// Test doubles with known answers.
pub mod doubles {
    use super::*;

    /// Walks straight along the positive x axis.
    pub struct StraightLine;

    impl WalkModel for StraightLine {
        fn label(&self) -> String {
            "straight-line".into()
        }

        fn sample(
            &self,
            _steps: u64,
            checkpoints: &[u64],
            _stream: &mut RandomStream,
        ) -> Result<Vec<SampleRecord>, StatsError> {
            Ok(checkpoints
                .iter()
                .map(|&n| SampleRecord {
                    n,
                    norm: n as f64,
                    width: Some(0.0),
                    direction: (n > 0).then_some(0.0),
                    extras: BTreeMap::new(),
                })
                .collect())
        }
    }

    /// Reports width `n^exponent` exactly.
    pub struct PowerLawWidth {
        pub exponent: f64,
    }

    impl WalkModel for PowerLawWidth {
        fn label(&self) -> String {
            format!("power-law(exponent={})", self.exponent)
        }

        fn sample(
            &self,
            _steps: u64,
            checkpoints: &[u64],
            _stream: &mut RandomStream,
        ) -> Result<Vec<SampleRecord>, StatsError> {
            Ok(checkpoints
                .iter()
                .map(|&n| SampleRecord {
                    n,
                    norm: n as f64,
                    width: Some((n as f64).powf(self.exponent)),
                    direction: None,
                    extras: BTreeMap::new(),
                })
                .collect())
        }
    }
}
