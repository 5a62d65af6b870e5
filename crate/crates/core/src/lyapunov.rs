//! Empirical checks of the drift argument behind the positive speed of the
//! walk.
//!
//! The potential is `f(d, α, α') = d^{3/2} − (c·d^{1/2} ∧ α·d) − (c·d^{1/2} ∧ α'·d)`
//! where `d` is the gap between the walker and the smallest origin-centred
//! circle around the hull and `α, α'` are the hull angles at the walker. Off
//! the set `A = {d < d_star}` its expected one-step change should be negative,
//! and on `A` it should increase by a bounded amount. Conditional expectations
//! are estimated by binning samples on the observable state
//! (`in_A` × decade of `d` × angle band); standard errors treat samples as
//! independent, which they are not within a walk.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::geom::HullDiagnostics;
use crate::par;
use crate::rancher::{Rancher, RunError};
use crate::rng::RandomStream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LyapunovError {
    #[error("f is defined for d >= 0, got {0}")]
    Domain(f64),
    #[error("invalid drift configuration: {0}")]
    BadConfig(&'static str),
    #[error(transparent)]
    Run(#[from] RunError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftConfig {
    pub c: f64,
    pub d_star: f64,
    /// Angle cutoff used only to label bins.
    pub epsilon: f64,
    /// Lag for the `A`-conditioned displacement check.
    pub m: u64,
    /// Samples before this step are counted but not binned.
    pub burn_in: u64,
    /// Bins with fewer samples are reported but not judged.
    pub min_bin_count: u64,
}

impl Default for DriftConfig {
    fn default() -> Self {
        Self {
            c: 1.0 / 6.0,
            d_star: 30.0,
            epsilon: 0.25,
            m: 64,
            burn_in: 1000,
            min_bin_count: 10_000,
        }
    }
}

impl DriftConfig {
    pub fn validate(&self) -> Result<(), LyapunovError> {
        if !(self.c > 0.0) {
            return Err(LyapunovError::BadConfig("c must be positive"));
        }
        if !(self.d_star > 0.0) {
            return Err(LyapunovError::BadConfig("d_star must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < PI / 2.0) {
            return Err(LyapunovError::BadConfig("epsilon must lie in (0, pi/2)"));
        }
        if self.m == 0 {
            return Err(LyapunovError::BadConfig("m must be at least 1"));
        }
        Ok(())
    }

    /// Analytic lower bound of `f`: minimum of `d^{3/2} − 2c·d^{1/2}`,
    /// attained at `d = 2c/3`.
    pub fn f_lower_bound(&self) -> f64 {
        let d = 2.0 * self.c / 3.0;
        -(4.0 * self.c / 3.0) * d.sqrt()
    }

    /// Cap on the one-step increase of `f` inside `A`.
    pub fn increase_cap(&self) -> f64 {
        f_value(self.d_star + 1.0, 0.0, 0.0, self).unwrap_or(f64::INFINITY) + 10.0
    }
}

pub fn f_value(
    d: f64,
    alpha: f64,
    alpha_prime: f64,
    cfg: &DriftConfig,
) -> Result<f64, LyapunovError> {
    if !(d >= 0.0) {
        return Err(LyapunovError::Domain(d));
    }
    Ok(potential(d, alpha, alpha_prime, cfg.c))
}

fn potential(d: f64, alpha: f64, alpha_prime: f64, c: f64) -> f64 {
    let sqrt_d = d.sqrt();
    let f2 = |a: f64| -(c * sqrt_d).min(a * d);
    d * sqrt_d + f2(alpha) + f2(alpha_prime)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftSample {
    pub n: u64,
    pub d: f64,
    pub alpha: f64,
    pub alpha_prime: f64,
    pub f: f64,
    pub delta_f: f64,
    pub in_a: bool,
}

impl DriftSample {
    /// Whether `f` agrees with a fresh evaluation from the stored fields.
    pub fn recomputes(&self, cfg: &DriftConfig) -> bool {
        f_value(self.d, self.alpha, self.alpha_prime, cfg)
            .is_ok_and(|f| (f - self.f).abs() <= 1e-12 * f.abs().max(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleBand {
    /// One of the angles is below ε.
    Small,
    Mid,
    /// Both angles exceed π − ε.
    Large,
}

impl AngleBand {
    pub fn of(alpha: f64, alpha_prime: f64, epsilon: f64) -> Self {
        if alpha.min(alpha_prime) < epsilon {
            AngleBand::Small
        } else if alpha.min(alpha_prime) > PI - epsilon {
            AngleBand::Large
        } else {
            AngleBand::Mid
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BinKey {
    pub in_a: bool,
    /// `floor(log10 d)`, `None` for `d = 0`.
    pub d_decade: Option<i32>,
    pub band: AngleBand,
}

impl BinKey {
    fn of(diag: &HullDiagnostics, cfg: &DriftConfig) -> Self {
        BinKey {
            in_a: diag.d < cfg.d_star,
            d_decade: (diag.d > 0.0).then(|| diag.d.log10().floor() as i32),
            band: AngleBand::of(diag.alpha, diag.alpha_prime, cfg.epsilon),
        }
    }
}

/// Count, sum and sum of squares plus extremes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
    pub min: f64,
    pub max: f64,
}

impl Default for Moments {
    fn default() -> Self {
        Self {
            count: 0,
            sum: 0.0,
            sum_sq: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
}

impl Moments {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        self.sum += v;
        self.sum_sq += v * v;
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }

    pub fn merge(&mut self, o: &Moments) {
        self.count += o.count;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self.min = self.min.min(o.min);
        self.max = self.max.max(o.max);
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Standard error of the mean under an independence assumption.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        let k = self.count as f64;
        let var = ((self.sum_sq - self.sum * self.sum / k) / (k - 1.0)).max(0.0);
        (var / k).sqrt()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct BinAcc {
    delta_f: Moments,
    delta_x: Moments,
}

/// Merged raw accumulators of a survey.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SurveyData {
    bins: BTreeMap<BinKey, BinAcc>,
    /// Steps where either endpoint had no diagnostics (degenerate hull).
    pub degenerate: u64,
    /// Non-degenerate samples before the burn-in.
    pub burn_in_excluded: u64,
    pub samples: u64,
    pub recompute_failures: u64,
    pub f: Moments,
    pub delta_f_in_a: Moments,
    pub delta_x: Moments,
    pub abs_delta_x_max: f64,
    pub delta_x_violations: u64,
    pub lagged_delta_x_in_a: Moments,
}

impl SurveyData {
    fn merge(&mut self, o: &SurveyData) {
        for (k, b) in &o.bins {
            let e = self.bins.entry(*k).or_default();
            e.delta_f.merge(&b.delta_f);
            e.delta_x.merge(&b.delta_x);
        }
        self.degenerate += o.degenerate;
        self.burn_in_excluded += o.burn_in_excluded;
        self.samples += o.samples;
        self.recompute_failures += o.recompute_failures;
        self.f.merge(&o.f);
        self.delta_f_in_a.merge(&o.delta_f_in_a);
        self.delta_x.merge(&o.delta_x);
        self.abs_delta_x_max = self.abs_delta_x_max.max(o.abs_delta_x_max);
        self.delta_x_violations += o.delta_x_violations;
        self.lagged_delta_x_in_a.merge(&o.lagged_delta_x_in_a);
    }
}

/// Slack on `|ΔX| ≤ 1` for rounding in the two norms.
pub const UNIT_STEP_SLACK: f64 = 1e-9;

fn survey_walk(
    steps: u64,
    stream: &mut RandomStream,
    cfg: &DriftConfig,
) -> Result<SurveyData, RunError> {
    let mut acc = SurveyData::default();
    let mut walker = Rancher::new();
    let mut pending: VecDeque<(u64, f64)> = VecDeque::new();
    let mut norm = 0.0;
    let mut diag = walker.diagnostics().ok();
    while walker.n() < steps {
        let n = walker.n();
        walker.step(stream)?;
        let next_norm = walker.position().norm();
        let next_diag = walker.diagnostics().ok();

        let dx = next_norm - norm;
        acc.delta_x.push(dx);
        acc.abs_delta_x_max = acc.abs_delta_x_max.max(dx.abs());
        if dx.abs() > 1.0 + UNIT_STEP_SLACK {
            acc.delta_x_violations += 1;
        }

        match (diag, next_diag) {
            (Some(a), Some(b)) => {
                let f0 = potential(a.d, a.alpha, a.alpha_prime, cfg.c);
                let f1 = potential(b.d, b.alpha, b.alpha_prime, cfg.c);
                let sample = DriftSample {
                    n,
                    d: a.d,
                    alpha: a.alpha,
                    alpha_prime: a.alpha_prime,
                    f: f0,
                    delta_f: f1 - f0,
                    in_a: a.d < cfg.d_star,
                };
                if !sample.recomputes(cfg) {
                    acc.recompute_failures += 1;
                }
                acc.samples += 1;
                acc.f.push(f0);
                if sample.in_a {
                    acc.delta_f_in_a.push(sample.delta_f);
                }
                if n >= cfg.burn_in {
                    let bin = acc.bins.entry(BinKey::of(&a, cfg)).or_default();
                    bin.delta_f.push(sample.delta_f);
                    bin.delta_x.push(dx);
                    if sample.in_a && n + cfg.m <= steps {
                        pending.push_back((n, norm));
                    }
                } else {
                    acc.burn_in_excluded += 1;
                }
            }
            _ => acc.degenerate += 1,
        }
        while pending.front().is_some_and(|&(t, _)| t + cfg.m == n + 1) {
            let (_, x0) = pending.pop_front().unwrap();
            acc.lagged_delta_x_in_a.push(next_norm - x0);
        }
        norm = next_norm;
        diag = next_diag;
    }
    Ok(acc)
}

/// Runs `reps` walks of `steps` steps and accumulates every drift statistic.
pub fn survey(
    steps: u64,
    reps: u64,
    seed: u64,
    cfg: &DriftConfig,
) -> Result<SurveyData, LyapunovError> {
    cfg.validate()?;
    let walks = par::map_indexed(reps as usize, |rep| {
        survey_walk(steps, &mut RandomStream::derive(seed, rep as u64), cfg)
    });
    let mut total = SurveyData::default();
    for w in walks {
        total.merge(&w?);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinSummary {
    #[serde(flatten)]
    pub key: BinKey,
    pub count: u64,
    pub mean_delta_f: f64,
    pub stderr_delta_f: f64,
    pub max_delta_f: f64,
    pub mean_delta_x: f64,
    pub stderr_delta_x: f64,
    /// Count reaches `min_bin_count`.
    pub judged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftReport {
    pub config: DriftConfig,
    pub steps: u64,
    pub reps: u64,
    pub bins: Vec<BinSummary>,
    pub samples: u64,
    pub degenerate: u64,
    pub burn_in_excluded: u64,
    pub recompute_failures: u64,
    pub min_f: f64,
    pub f_lower_bound: f64,
    pub max_delta_f_in_a: f64,
    pub increase_cap: f64,
    /// Judged bins outside `A`.
    pub judged_outside_a: usize,
    /// Judged bins outside `A` whose mean Δf is below zero by 3 standard errors.
    pub negative_outside_a: usize,
    pub outside_a_negative: bool,
    pub bounded_increase_in_a: bool,
    pub bounded_below: bool,
}

impl SurveyData {
    pub fn drift_report(&self, steps: u64, reps: u64, cfg: &DriftConfig) -> DriftReport {
        let bins: Vec<BinSummary> = self
            .bins
            .iter()
            .map(|(k, b)| BinSummary {
                key: *k,
                count: b.delta_f.count,
                mean_delta_f: b.delta_f.mean(),
                stderr_delta_f: b.delta_f.stderr(),
                max_delta_f: b.delta_f.max,
                mean_delta_x: b.delta_x.mean(),
                stderr_delta_x: b.delta_x.stderr(),
                judged: b.delta_f.count >= cfg.min_bin_count,
            })
            .collect();
        let judged: Vec<&BinSummary> = bins.iter().filter(|b| b.judged && !b.key.in_a).collect();
        let negative = judged
            .iter()
            .filter(|b| b.mean_delta_f + 3.0 * b.stderr_delta_f < 0.0)
            .count();
        let cap = cfg.increase_cap();
        let max_in_a = if self.delta_f_in_a.count > 0 {
            self.delta_f_in_a.max
        } else {
            f64::NEG_INFINITY
        };
        DriftReport {
            config: *cfg,
            steps,
            reps,
            samples: self.samples,
            degenerate: self.degenerate,
            burn_in_excluded: self.burn_in_excluded,
            recompute_failures: self.recompute_failures,
            min_f: self.f.min,
            f_lower_bound: cfg.f_lower_bound(),
            max_delta_f_in_a: max_in_a,
            increase_cap: cap,
            judged_outside_a: judged.len(),
            negative_outside_a: negative,
            outside_a_negative: negative == judged.len(),
            bounded_increase_in_a: max_in_a <= cap,
            bounded_below: self.f.count == 0 || self.f.min >= -1.0,
            bins,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: &'static str,
    pub statement: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub steps: u64,
    pub reps: u64,
    pub m: u64,
    pub d_star: f64,
    pub conditions: Vec<Condition>,
    pub pooled_mean_delta_x: f64,
    pub all_passed: bool,
}

impl SurveyData {
    /// Checks the hypotheses of the recurrence lemma with `X_n = ‖x_n‖`,
    /// `f_n` the potential and `A_n = {d_n < d_star}`.
    pub fn lemma_report(&self, steps: u64, reps: u64, cfg: &DriftConfig) -> LemmaReport {
        let drift = self.drift_report(steps, reps, cfg);
        let mut conditions = Vec::new();

        conditions.push(Condition {
            name: "unit_increments",
            statement: "|ΔX_n| <= 1 for every step",
            passed: self.delta_x_violations == 0,
            detail: format!(
                "{} violations over {} steps (slack {UNIT_STEP_SLACK}); max |ΔX| = {}",
                self.delta_x_violations, self.delta_x.count, self.abs_delta_x_max
            ),
        });

        let pooled = self.delta_x.mean();
        let neg_bins: Vec<&BinSummary> = drift
            .bins
            .iter()
            .filter(|b| b.judged && b.mean_delta_x + 3.0 * b.stderr_delta_x < 0.0)
            .collect();
        conditions.push(Condition {
            name: "nonnegative_drift",
            statement: "E[ΔX_n | F_n] >= 0 (binned surrogate; pooled mean >= -1e-3)",
            passed: pooled >= -1e-3 && neg_bins.is_empty(),
            detail: format!(
                "pooled mean {pooled} over {} steps; {} judged bins significantly negative",
                self.delta_x.count,
                neg_bins.len()
            ),
        });

        let lag = &self.lagged_delta_x_in_a;
        conditions.push(Condition {
            name: "progress_on_a",
            statement: "E[Δ_m X_n | F_n, A_n] > c1 > 0",
            passed: lag.count >= 2 && lag.mean() - 3.0 * lag.stderr() > 0.0,
            detail: format!(
                "m = {}: mean {} (naive se {}) over {} samples",
                cfg.m,
                lag.mean(),
                lag.stderr(),
                lag.count
            ),
        });

        conditions.push(Condition {
            name: "bounded_below",
            statement: "f_n > -c2",
            passed: drift.bounded_below,
            detail: format!(
                "min f = {} (analytic bound {})",
                drift.min_f, drift.f_lower_bound
            ),
        });

        conditions.push(Condition {
            name: "bounded_increase_on_a",
            statement: "Δf_n 1(A_n) < c3",
            passed: drift.bounded_increase_in_a,
            detail: format!(
                "max Δf on A = {} against cap {}",
                drift.max_delta_f_in_a, drift.increase_cap
            ),
        });

        conditions.push(Condition {
            name: "negative_drift_off_a",
            statement: "E[Δf_n | F_n, A_n^c] < -c4 (binned surrogate)",
            passed: drift.outside_a_negative,
            detail: format!(
                "{} of {} judged bins outside A negative at 3 se",
                drift.negative_outside_a, drift.judged_outside_a
            ),
        });

        let all_passed = conditions.iter().all(|c| c.passed);
        LemmaReport {
            steps,
            reps,
            m: cfg.m,
            d_star: cfg.d_star,
            conditions,
            pooled_mean_delta_x: pooled,
            all_passed,
        }
    }
}

/// Binned drift survey over `reps` walks.
pub fn drift_survey(
    steps: u64,
    reps: u64,
    seed: u64,
    cfg: &DriftConfig,
) -> Result<DriftReport, LyapunovError> {
    Ok(survey(steps, reps, seed, cfg)?.drift_report(steps, reps, cfg))
}

/// Empirical check of the recurrence lemma's hypotheses with lag `m`.
pub fn lemma_hypothesis_check(
    steps: u64,
    reps: u64,
    seed: u64,
    cfg: &DriftConfig,
    m: u64,
) -> Result<LemmaReport, LyapunovError> {
    let cfg = DriftConfig { m, ..*cfg };
    Ok(survey(steps, reps, seed, &cfg)?.lemma_report(steps, reps, &cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn cfg() -> DriftConfig {
        DriftConfig::default()
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_value(0.0, 1.0, 2.0, &cfg()).unwrap(), 0.0);
        assert_abs_diff_eq!(
            f_value(4.0, PI / 2.0, PI / 2.0, &cfg()).unwrap(),
            22.0 / 3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            f_value(4.0, 0.01, PI / 2.0, &cfg()).unwrap(),
            8.0 - 0.04 - 1.0 / 3.0,
            epsilon = 1e-12
        );
        assert_eq!(
            f_value(-1.0, 0.0, 0.0, &cfg()),
            Err(LyapunovError::Domain(-1.0))
        );
    }

    #[test]
    fn lower_bound_is_the_minimum() {
        let c = cfg();
        let bound = c.f_lower_bound();
        // grid search of d^{3/2} - 2c d^{1/2}
        let grid_min = (0..200_000)
            .map(|i| i as f64 * 1e-5)
            .map(|d| d.powf(1.5) - 2.0 * c.c * d.sqrt())
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(bound, grid_min, epsilon = 1e-9);
        assert!(bound > -1.0);
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        assert!(DriftConfig { c: 0.0, ..cfg() }.validate().is_err());
        assert!(DriftConfig {
            d_star: -1.0,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(DriftConfig {
            epsilon: 2.0,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(DriftConfig { m: 0, ..cfg() }.validate().is_err());
    }

    #[test]
    fn moments_merge_like_concatenation() {
        let mut a = Moments::default();
        let mut b = Moments::default();
        let mut all = Moments::default();
        for i in 0..10 {
            let v = i as f64 * 0.3 - 1.0;
            if i % 3 == 0 {
                a.push(v)
            } else {
                b.push(v)
            }
            all.push(v);
        }
        a.merge(&b);
        assert_eq!(a.count, all.count);
        assert_abs_diff_eq!(a.mean(), all.mean(), epsilon = 1e-12);
        assert_abs_diff_eq!(a.stderr(), all.stderr(), epsilon = 1e-12);
        assert_eq!(a.max, all.max);
    }

    #[test]
    fn small_survey_is_consistent() {
        let c = DriftConfig {
            burn_in: 100,
            min_bin_count: 100,
            ..cfg()
        };
        let data = survey(3000, 4, 5, &c).unwrap();
        assert_eq!(data.delta_x.count, 12_000);
        assert_eq!(data.delta_x_violations, 0);
        assert_eq!(data.recompute_failures, 0);
        assert!(data.degenerate >= 4);
        let report = data.drift_report(3000, 4, &c);
        assert!(report.bounded_below);
        assert!(report.bounded_increase_in_a);
        let binned: u64 = report.bins.iter().map(|b| b.count).sum();
        assert_eq!(binned + data.burn_in_excluded, data.samples);
    }

    #[test]
    fn survey_is_deterministic() {
        let c = DriftConfig {
            burn_in: 10,
            ..cfg()
        };
        assert_eq!(
            survey(500, 3, 1, &c).unwrap(),
            survey(500, 3, 1, &c).unwrap()
        );
    }

    proptest! {
        #[test]
        fn f_is_symmetric(d in 0.0f64..1e4, a in 0.0f64..PI, b in 0.0f64..PI) {
            let c = cfg();
            prop_assert_eq!(f_value(d, a, b, &c).unwrap(), f_value(d, b, a, &c).unwrap());
        }

        #[test]
        fn f_with_zero_angles_is_increasing(d in 0.0f64..1e4, step in 0.0f64..10.0) {
            let c = cfg();
            let lo = f_value(d, 0.0, 0.0, &c).unwrap();
            let hi = f_value(d + step, 0.0, 0.0, &c).unwrap();
            prop_assert!(hi >= lo);
            prop_assert!((lo - d.powf(1.5)).abs() <= 1e-9 * lo.max(1.0));
        }

        #[test]
        fn f_is_continuous(d in 0.0f64..1e3, a in 0.0f64..PI, b in 0.0f64..PI) {
            let c = cfg();
            let h = 1e-9;
            let f0 = f_value(d, a, b, &c).unwrap();
            let f1 = f_value(d + h, a + h, b + h, &c).unwrap();
            prop_assert!((f1 - f0).abs() < 1e-5);
        }

        #[test]
        fn f_respects_lower_bound(d in 0.0f64..50.0, a in 0.0f64..PI, b in 0.0f64..PI) {
            let c = cfg();
            prop_assert!(f_value(d, a, b, &c).unwrap() >= c.f_lower_bound() - 1e-12);
        }
    }
}
