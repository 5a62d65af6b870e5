use std::fmt;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ranch_core::geom::Point2;
use ranch_core::investor::{self, Investor, StepStatus};
use ranch_core::lyapunov::{self, DriftConfig, LyapunovError};
use ranch_core::oracle;
use ranch_core::par;
use ranch_core::rancher::{self, Rancher, RancherRecord};
use ranch_core::rng::RandomStream;
use ranch_core::stats::{self, doubles::PowerLawWidth, Model, StatsError, WalkModel};
use ranch_core::RNG_NAME;
use serde::Serialize;
use serde_json::Value;

use crate::manifest::RunManifest;
use crate::svg::{Figure, Frame};
use crate::table::{self, Table};
use crate::{
    CliError, Command, DriftArgs, ExponentArgs, ModelArg, PlotArgs, SimulateInvestorArgs,
    SimulateRancherArgs, SpeedArgs,
};

/// Largest number of vertices drawn for one path.
const MAX_PLOT_POINTS: usize = 20_000;
/// Above this many steps `--validate` compares hulls only at checkpoints.
const FULL_HULL_CHECK_STEPS: u64 = 5_000;
/// Above this many steps `--validate` compares investor queries only at checkpoints.
const FULL_RATE_CHECK_STEPS: u64 = 20_000;
const ORACLE_TOL: f64 = 1e-9;

type Out<'a> = &'a mut (dyn Write + Send);

pub fn dispatch(cli: crate::Cli, argv: &[String], out: Out, err: Out) -> Result<(), CliError> {
    let seed = cli.seed;
    par::with_threads(cli.threads, move || match &cli.command {
        Command::SimulateRancher(a) => simulate_rancher(a, seed, argv, out, err),
        Command::SimulateInvestor(a) => simulate_investor(a, seed, argv, out, err),
        Command::EstimateExponent(a) => estimate_exponent(a, seed, argv, out, err),
        Command::Speed(a) => speed(a, seed, argv, out),
        Command::DriftCheck(a) => drift_check(a, seed, argv, out, err),
        Command::Plot(a) => plot(a, seed, argv),
    })
}

/// Opens the destination before any work so a bad path fails fast.
fn open(path: Option<&Path>) -> Result<Option<(PathBuf, File)>, CliError> {
    path.map(|p| {
        File::create(p)
            .map(|f| (p.to_owned(), f))
            .map_err(|e| CliError::io(p, e))
    })
    .transpose()
}

fn emit(dest: Option<(PathBuf, File)>, out: Out, bytes: &[u8]) -> Result<(), CliError> {
    match dest {
        Some((p, mut f)) => f.write_all(bytes).map_err(|e| CliError::io(p, e)),
        None => out
            .write_all(bytes)
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    s.into()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(v).expect("output types serialize");
    b.push(b'\n');
    b
}

fn params<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("argument types serialize")
}

fn csv_failure(e: csv::Error) -> CliError {
    CliError::io("<csv buffer>", std::io::Error::other(e))
}

fn check_alpha(alpha: f64) -> Result<f64, CliError> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(alpha)
    } else {
        Err(CliError::Usage(format!(
            "--alpha must be finite and non-negative, got {alpha}"
        )))
    }
}

fn stats_failure(e: StatsError) -> CliError {
    match e {
        StatsError::BadParameter(m) => CliError::Usage(m.to_owned()),
        other => CliError::sim(other),
    }
}

/// Every `k`-th point plus the last, at most about `max` in total.
fn thin<T: Copy>(pts: &[T], max: usize) -> Vec<T> {
    if pts.len() <= max {
        return pts.to_vec();
    }
    let stride = pts.len().div_ceil(max);
    let mut v: Vec<T> = pts.iter().step_by(stride).copied().collect();
    if !(pts.len() - 1).is_multiple_of(stride) {
        v.push(pts[pts.len() - 1]);
    }
    v
}

#[derive(Debug, Default)]
struct Tally {
    name: &'static str,
    checked: u64,
    failed: u64,
}

#[derive(Debug, Default)]
struct Validation {
    tallies: Vec<Tally>,
    max_error: f64,
}

impl Validation {
    fn tally(&mut self, name: &'static str, ok: bool) {
        let t = match self.tallies.iter_mut().position(|t| t.name == name) {
            Some(i) => &mut self.tallies[i],
            None => {
                self.tallies.push(Tally {
                    name,
                    ..Tally::default()
                });
                self.tallies.last_mut().unwrap()
            }
        };
        t.checked += 1;
        t.failed += u64::from(!ok);
    }

    fn error(&mut self, name: &'static str, e: f64) {
        self.max_error = self.max_error.max(e);
        self.tally(name, e <= ORACLE_TOL);
    }

    fn passed(&self) -> bool {
        self.tallies.iter().all(|t| t.failed == 0)
    }
}

impl fmt::Display for Validation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .tallies
            .iter()
            .map(|t| format!("{} {}/{} ok", t.name, t.checked - t.failed, t.checked))
            .collect();
        write!(
            f,
            "{}; max oracle difference {:e}",
            parts.join(", "),
            self.max_error
        )
    }
}

fn validate_rancher(
    steps: u64,
    seed: u64,
    cps: &[u64],
    beta: bool,
    expected: &[RancherRecord],
) -> Result<Validation, CliError> {
    let mut v = Validation::default();
    let mut s = RandomStream::new(seed);
    let mut w = Rancher::with_path();
    let mut recs = Vec::with_capacity(cps.len());
    let mut next = cps.iter().peekable();
    let full = steps <= FULL_HULL_CHECK_STEPS;
    loop {
        let at_checkpoint = next.next_if(|&&c| c == w.n()).is_some();
        if at_checkpoint {
            let mut r = w.record();
            if beta {
                r.beta = w.last_beta();
            }
            recs.push(r);
            let x = w.position();
            if x.norm() > 0.0 {
                let fast = w
                    .hull()
                    .farthest_from_line(Point2::ORIGIN, x)
                    .map_err(CliError::sim)?;
                let slow = oracle::naive_width_path(w.path().unwrap(), Point2::ORIGIN, x)
                    .map_err(CliError::sim)?;
                v.error("width", (fast - slow).abs());
            }
        }
        if full || at_checkpoint {
            let scratch = oracle::hull_of(w.path().unwrap()).map_err(CliError::sim)?;
            v.tally(
                "hull",
                oracle::same_vertex_set(w.hull(), &scratch, ORACLE_TOL),
            );
        }
        if w.n() >= steps {
            break;
        }
        let before = w.hull().clone();
        let info = w.step(&mut s).map_err(CliError::sim)?;
        v.tally(
            "legality",
            !oracle::segment_hits_interior(&before, info.from, info.to),
        );
        v.tally("unit-step", (info.from.dist(info.to) - 1.0).abs() <= 1e-12);
    }
    v.tally("records", recs == expected);
    Ok(v)
}

fn simulate_rancher(
    a: &SimulateRancherArgs,
    seed: u64,
    argv: &[String],
    out: Out,
    err: Out,
) -> Result<(), CliError> {
    let start = Instant::now();
    let cps = a.checkpoints.resolve(a.steps)?;
    let dest = open(a.out.as_deref())?;
    let walker = if a.plot.is_some() {
        Rancher::with_path()
    } else {
        Rancher::new()
    };
    let (recs, walker) = rancher::run_walker(
        walker,
        a.steps,
        &mut RandomStream::new(seed),
        &cps,
        a.record_beta,
    )
    .map_err(CliError::sim)?;
    let validation = a
        .validate
        .then(|| validate_rancher(a.steps, seed, &cps, a.record_beta, &recs))
        .transpose()?;

    let mut buf = Vec::new();
    table::write_rancher(&mut buf, &recs, a.record_beta).map_err(csv_failure)?;
    let manifest = RunManifest::new("simulate-rancher", argv, params(a), seed, start.elapsed());
    if let Some(p) = &a.out {
        write_file(&sidecar(p), &json_bytes(&manifest))?;
    }
    emit(dest, out, &buf)?;
    if let Some(p) = &a.plot {
        let path: Vec<(f64, f64)> = walker.path().unwrap().iter().map(|q| (q.x, q.y)).collect();
        let hull: Vec<(f64, f64)> = walker.hull().vertices().map(|q| (q.x, q.y)).collect();
        write_file(
            p,
            rancher_figure(&path, &hull, &manifest_text(&manifest), a.steps).as_bytes(),
        )?;
    }
    finish_validation(validation, err)
}

fn finish_validation(v: Option<Validation>, err: Out) -> Result<(), CliError> {
    match v {
        None => Ok(()),
        Some(v) => {
            let _ = writeln!(err, "validate: {v}");
            if v.passed() {
                Ok(())
            } else {
                Err(CliError::Validation(v.to_string()))
            }
        }
    }
}

fn validate_investor(
    alpha: f64,
    steps: u64,
    seed: u64,
    cps: &[u64],
) -> Result<Validation, CliError> {
    let mut v = Validation::default();
    let mut s = RandomStream::new(seed);
    let mut inv = Investor::with_path(alpha).map_err(CliError::sim)?;
    let full = steps <= FULL_RATE_CHECK_STEPS;
    let mut next = cps.iter().peekable();
    while inv.n() < steps {
        if inv.step(&mut s) == StepStatus::BlownUp {
            break;
        }
        while next.next_if(|&&c| c < inv.n()).is_some() {}
        let at_checkpoint = next.next_if(|&&c| c == inv.n()).is_some();
        if !(full || at_checkpoint) {
            continue;
        }
        let xs = inv.path().unwrap();
        let (rmax, rmin) = inv.extremal_rates().map_err(CliError::sim)?;
        let (nmax, nmin) = oracle::naive_rates(xs).map_err(CliError::sim)?;
        let scale = 1.0_f64.max(rmax.abs()).max(rmin.abs());
        v.error(
            "rates",
            (rmax - nmax).abs().max((rmin - nmin).abs()) / scale,
        );
        v.tally("rate-order", rmin <= rmax);
        let w = inv.width().map_err(CliError::sim)?;
        let nw = oracle::naive_investor_width(xs).map_err(CliError::sim)?;
        v.error("width", (w - nw).abs() / 1.0_f64.max(nw));
    }
    Ok(v)
}

fn simulate_investor(
    a: &SimulateInvestorArgs,
    seed: u64,
    argv: &[String],
    out: Out,
    err: Out,
) -> Result<(), CliError> {
    let start = Instant::now();
    let alpha = check_alpha(a.alpha)?;
    let cps = a.checkpoints.resolve(a.steps)?;
    let dest = open(a.out.as_deref())?;
    let walker = if a.plot.is_some() {
        Investor::with_path(alpha)
    } else {
        Investor::new(alpha)
    }
    .map_err(CliError::sim)?;
    let (recs, walker) = investor::run_walker(walker, a.steps, &mut RandomStream::new(seed), &cps)
        .map_err(CliError::sim)?;
    if recs.last().is_some_and(|r| r.blown_up) {
        let _ = writeln!(
            err,
            "note: |x| exceeded {:e} at n = {}; run stopped",
            investor::BLOWUP_LIMIT,
            walker.n()
        );
    }
    let validation = a
        .validate
        .then(|| validate_investor(alpha, a.steps, seed, &cps))
        .transpose()?;

    let mut buf = Vec::new();
    table::write_investor(&mut buf, &recs).map_err(csv_failure)?;
    let manifest = RunManifest::new("simulate-investor", argv, params(a), seed, start.elapsed());
    if let Some(p) = &a.out {
        write_file(&sidecar(p), &json_bytes(&manifest))?;
    }
    emit(dest, out, &buf)?;
    if let Some(p) = &a.plot {
        let path: Vec<(f64, f64)> = walker
            .path()
            .unwrap()
            .iter()
            .enumerate()
            .map(|(m, &x)| (m as f64, x))
            .collect();
        let pts = |c: &[Point2]| c.iter().map(|q| (q.x, q.y)).collect::<Vec<_>>();
        let fig = investor_figure(
            &path,
            &pts(walker.upper_chain()),
            &pts(walker.lower_chain()),
            &manifest_text(&manifest),
            alpha,
        );
        write_file(p, fig.as_bytes())?;
    }
    finish_validation(validation, err)
}

fn walk_model(
    model: ModelArg,
    alpha: Option<f64>,
    exponent: Option<f64>,
) -> Result<Box<dyn WalkModel>, CliError> {
    Ok(match model {
        ModelArg::Rancher => Box::new(Model::Rancher),
        ModelArg::Investor => {
            let alpha = alpha.ok_or_else(|| {
                CliError::Usage("--alpha is required for the investor model".into())
            })?;
            Box::new(Model::Investor {
                alpha: check_alpha(alpha)?,
            })
        }
        ModelArg::PowerLaw => {
            let exponent = exponent.ok_or_else(|| {
                CliError::Usage("--exponent is required for the power-law model".into())
            })?;
            Box::new(PowerLawWidth { exponent })
        }
    })
}

#[derive(Debug, Serialize)]
struct WidthPoint {
    n: u64,
    w: f64,
}

#[derive(Debug, Serialize)]
struct ExponentOutput {
    model: String,
    aggregator: String,
    protocol: &'static str,
    slope: f64,
    stderr: f64,
    intercept: f64,
    npoints: usize,
    points: Vec<WidthPoint>,
    raw: Vec<WidthPoint>,
    dropped: usize,
    rng: &'static str,
    manifest: RunManifest,
}

fn width_points(v: &[(u64, f64)]) -> Vec<WidthPoint> {
    v.iter().map(|&(n, w)| WidthPoint { n, w }).collect()
}

fn estimate_exponent(
    a: &ExponentArgs,
    seed: u64,
    argv: &[String],
    out: Out,
    err: Out,
) -> Result<(), CliError> {
    let start = Instant::now();
    let model = walk_model(a.model, a.alpha, a.exponent)?;
    let mut lengths = a.lengths.clone();
    lengths.sort_unstable();
    lengths.dedup();
    let dest = open(a.out.as_deref())?;
    let r = stats::exponent_experiment(model.as_ref(), &lengths, a.reps, seed, a.aggregator.into())
        .map_err(stats_failure)?;
    if r.dropped > 0 {
        let _ = writeln!(
            err,
            "warning: dropped {} observations with zero or missing width",
            r.dropped
        );
    }
    let output = ExponentOutput {
        model: model.label(),
        aggregator: r.aggregator.to_string(),
        protocol: r.protocol,
        slope: r.fit.slope,
        stderr: r.fit.stderr_slope,
        intercept: r.fit.intercept,
        npoints: r.fit.npoints,
        points: width_points(&r.points),
        raw: width_points(&r.raw),
        dropped: r.dropped,
        rng: RNG_NAME,
        manifest: RunManifest::new("estimate-exponent", argv, params(a), seed, start.elapsed()),
    };
    emit(dest, out, &json_bytes(&output))
}

#[derive(Debug, Serialize)]
struct Quantile {
    q: f64,
    value: f64,
}

#[derive(Debug, Serialize)]
struct SpeedOutput {
    model: String,
    steps: u64,
    reps: u64,
    mean: f64,
    sd: f64,
    quantiles: Vec<Quantile>,
    speeds: Vec<f64>,
    rng: &'static str,
    manifest: RunManifest,
}

fn speed(a: &SpeedArgs, seed: u64, argv: &[String], out: Out) -> Result<(), CliError> {
    let start = Instant::now();
    if a.model == ModelArg::PowerLaw {
        return Err(CliError::Usage(
            "speed supports the rancher and investor models".into(),
        ));
    }
    let model = walk_model(a.model, a.alpha, None)?;
    let dest = open(a.out.as_deref())?;
    let s =
        stats::speed_experiment(model.as_ref(), a.reps, a.steps, seed).map_err(stats_failure)?;
    let output = SpeedOutput {
        model: model.label(),
        steps: s.steps,
        reps: s.reps,
        mean: s.mean,
        sd: s.sd,
        quantiles: s
            .quantiles
            .iter()
            .map(|&(q, value)| Quantile { q, value })
            .collect(),
        speeds: s.speeds,
        rng: RNG_NAME,
        manifest: RunManifest::new("speed", argv, params(a), seed, start.elapsed()),
    };
    emit(dest, out, &json_bytes(&output))
}

#[derive(Debug, Serialize)]
struct DriftOutput {
    config: DriftConfig,
    drift: lyapunov::DriftReport,
    lemma: lyapunov::LemmaReport,
    rng: &'static str,
    manifest: RunManifest,
}

fn drift_check(
    a: &DriftArgs,
    seed: u64,
    argv: &[String],
    out: Out,
    err: Out,
) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = DriftConfig {
        c: a.c,
        d_star: a.dstar,
        epsilon: a.epsilon,
        m: a.m,
        burn_in: a.burn_in,
        min_bin_count: a.min_bin_count,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let dest = open(a.out.as_deref())?;
    let data = lyapunov::survey(a.steps, a.reps, seed, &cfg).map_err(|e| match e {
        LyapunovError::BadConfig(m) => CliError::Usage(m.to_owned()),
        other => CliError::sim(other),
    })?;
    let drift = data.drift_report(a.steps, a.reps, &cfg);
    let lemma = data.lemma_report(a.steps, a.reps, &cfg);
    let passed = lemma.conditions.iter().filter(|c| c.passed).count();
    let _ = writeln!(
        err,
        "drift-check: {passed}/{} conditions hold; {} of {} judged bins outside A negative",
        lemma.conditions.len(),
        drift.negative_outside_a,
        drift.judged_outside_a
    );
    let output = DriftOutput {
        config: cfg,
        drift,
        lemma,
        rng: RNG_NAME,
        manifest: RunManifest::new("drift-check", argv, params(a), seed, start.elapsed()),
    };
    emit(dest, out, &json_bytes(&output))
}

fn manifest_text(m: &RunManifest) -> String {
    serde_json::to_string(m).expect("manifest serializes")
}

fn rancher_figure(path: &[(f64, f64)], hull: &[(f64, f64)], metadata: &str, steps: u64) -> String {
    let frame = Frame::around(path.iter().chain(hull).copied(), true);
    let mut fig = Figure::new(frame, false);
    let closed_hull: Vec<(f64, f64)> = hull.to_vec();
    if closed_hull.len() >= 2 {
        fig.polygon("hull", &closed_hull, "#d62728", "#d62728");
    }
    fig.polyline("path", &thin(path, MAX_PLOT_POINTS), "#1f77b4", 1.0);
    fig.dots("origin", &[(0.0, 0.0)], 3.0, "black");
    if let Some(&last) = path.last() {
        fig.dots("position", &[last], 3.5, "#2ca02c");
    }
    fig.legend(&[
        ("path", "#1f77b4"),
        ("convex hull", "#d62728"),
        ("current position", "#2ca02c"),
    ]);
    fig.render(
        &format!("walk avoiding its past hull, {steps} steps"),
        "x",
        "y",
        metadata,
    )
}

fn investor_figure(
    path: &[(f64, f64)],
    upper: &[(f64, f64)],
    lower: &[(f64, f64)],
    metadata: &str,
    alpha: f64,
) -> String {
    let frame = Frame::around(path.iter().chain(upper).chain(lower).copied(), false);
    let mut fig = Figure::new(frame, false);
    fig.polyline("upper-chain", upper, "#d62728", 2.5);
    fig.polyline("lower-chain", lower, "#2ca02c", 2.5);
    fig.polyline("path", &thin(path, MAX_PLOT_POINTS), "#1f77b4", 1.0);
    fig.legend(&[
        ("log price", "#1f77b4"),
        ("upper hull chain", "#d62728"),
        ("lower hull chain", "#2ca02c"),
    ]);
    let title = if alpha.is_nan() {
        "extremal investor".to_owned()
    } else {
        format!("extremal investor, alpha = {alpha}")
    };
    fig.render(&title, "n", "x_n", metadata)
}

fn exponent_figure(
    points: &[(f64, f64)],
    raw: &[(f64, f64)],
    slope: f64,
    intercept: f64,
    metadata: &str,
) -> String {
    let frame = Frame::around(points.iter().chain(raw).copied(), false);
    let mut fig = Figure::new(frame, true);
    fig.dots("raw", raw, 1.5, "#aaaaaa");
    fig.dots("points", points, 4.0, "#1f77b4");
    let xs = points.iter().chain(raw).map(|p| p.0);
    let lo = xs.clone().fold(f64::INFINITY, f64::min);
    let hi = xs.fold(f64::NEG_INFINITY, f64::max);
    if lo < hi {
        fig.line(
            "fit",
            (lo, intercept + slope * lo),
            (hi, intercept + slope * hi),
            "#d62728",
            &format!(r#"data-slope="{slope:?}" data-intercept="{intercept:?}""#),
        );
    }
    fig.legend(&[
        ("aggregated width", "#1f77b4"),
        ("single walks", "#aaaaaa"),
        ("least-squares fit", "#d62728"),
    ]);
    fig.render(
        &format!("width scaling, slope {slope:.4}"),
        "n (log scale)",
        "width (log scale)",
        metadata,
    )
}

type Chain = Vec<(f64, f64)>;

/// Upper and lower chains, left to right, of the hull of `pts`.
fn chains(pts: &[(f64, f64)]) -> (Chain, Chain) {
    let points: Vec<Point2> = pts.iter().map(|&(x, y)| Point2::new(x, y)).collect();
    let Ok(hull) = oracle::hull_of(&points) else {
        return (Vec::new(), Vec::new());
    };
    let v: Vec<(f64, f64)> = hull.vertices().map(|q| (q.x, q.y)).collect();
    if v.len() <= 2 {
        let mut s = v.clone();
        s.sort_by(|a, b| a.0.total_cmp(&b.0));
        return (s.clone(), s);
    }
    let key = |p: &(f64, f64)| (p.0, p.1);
    let left = (0..v.len())
        .min_by(|&i, &j| key(&v[i]).partial_cmp(&key(&v[j])).unwrap())
        .unwrap();
    let right = (0..v.len())
        .max_by(|&i, &j| key(&v[i]).partial_cmp(&key(&v[j])).unwrap())
        .unwrap();
    let walk = |from: usize, to: usize| {
        let mut c = vec![v[from]];
        let mut i = from;
        while i != to {
            i = (i + 1) % v.len();
            c.push(v[i]);
        }
        c
    };
    let lower = walk(left, right);
    let mut upper = walk(right, left);
    upper.reverse();
    (upper, lower)
}

fn plot(a: &PlotArgs, seed: u64, argv: &[String]) -> Result<(), CliError> {
    let start = Instant::now();
    let text = fs::read_to_string(&a.input).map_err(|e| CliError::io(&a.input, e))?;
    let manifest = |start: Instant| {
        manifest_text(&RunManifest::new(
            "plot",
            argv,
            params(a),
            seed,
            start.elapsed(),
        ))
    };
    let svg = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Malformed {
            path: a.input.clone(),
            row: e.line() as u64,
            message: e.to_string(),
        })?;
        let (Some(slope), Some(intercept), Some(pts)) = (
            v["slope"].as_f64(),
            v["intercept"].as_f64(),
            v["points"].as_array(),
        ) else {
            return Err(CliError::Usage(format!(
                "{}: JSON input must be an estimate-exponent result",
                a.input.display()
            )));
        };
        let logs = |arr: Option<&Vec<Value>>| -> Vec<(f64, f64)> {
            arr.into_iter()
                .flatten()
                .filter_map(|p| Some((p["n"].as_f64()?, p["w"].as_f64()?)))
                .filter(|&(n, w)| n > 0.0 && w > 0.0)
                .map(|(n, w)| (n.log10(), w.log10()))
                .collect()
        };
        exponent_figure(
            &logs(Some(pts)),
            &logs(v["raw"].as_array()),
            slope,
            intercept,
            &manifest(start),
        )
    } else {
        let t = Table::read(text.as_bytes(), &a.input)?;
        let col = |name: &str| t.column(name);
        match (col("x"), col("y"), col("n")) {
            (Some(x), Some(y), _) => {
                let path = t.pairs(x, y);
                let points: Vec<Point2> = path.iter().map(|&(x, y)| Point2::new(x, y)).collect();
                let hull: Vec<(f64, f64)> = oracle::hull_of(&points)
                    .map(|h| h.vertices().map(|q| (q.x, q.y)).collect())
                    .unwrap_or_default();
                let steps = t
                    .column("n")
                    .and_then(|c| t.rows.last().and_then(|r| r[c]))
                    .unwrap_or(0.0);
                rancher_figure(&path, &hull, &manifest(start), steps as u64)
            }
            (Some(x), None, Some(n)) => {
                let path = t.pairs(n, x);
                let (upper, lower) = chains(&path);
                investor_figure(&path, &upper, &lower, &manifest(start), f64::NAN)
            }
            _ => {
                return Err(CliError::Malformed {
                    path: a.input.clone(),
                    row: 1,
                    message: format!("unrecognized columns: {}", t.header.join(",")),
                })
            }
        }
    };
    write_file(&a.out, svg.as_bytes())
}
