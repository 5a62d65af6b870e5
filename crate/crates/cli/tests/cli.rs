use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn ranch(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ranch").chain(args.iter().copied());
    let code = ranch_cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Value of attribute `name` in the first element carrying `marker`.
fn attr(svg: &str, marker: &str, name: &str) -> f64 {
    let elem = &svg[svg.find(marker).unwrap()..];
    let elem = &elem[..elem.find('>').unwrap()];
    let key = format!(" {name}=\"");
    let start = elem.find(&key).unwrap() + key.len();
    let rest = &elem[start..];
    rest[..rest.find('"').unwrap()].parse().unwrap()
}

#[test]
fn zero_steps_gives_a_single_origin_row() {
    let (code, out, _) = ranch(&["simulate-rancher", "--steps", "0"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "n,x,y,norm,width,direction,alpha,alpha_prime,d,hull_size"
    );
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0,"));
}

#[test]
fn rancher_csv_is_byte_identical_across_runs_and_fields_round_trip() {
    let args = [
        "simulate-rancher",
        "--steps",
        "2000",
        "--seed",
        "9",
        "--checkpoints",
        "all",
    ];
    let (_, a, _) = ranch(&args);
    let (_, b, _) = ranch(&args);
    assert_eq!(a, b);
    let (_, other, _) = ranch(&[
        "simulate-rancher",
        "--steps",
        "2000",
        "--seed",
        "10",
        "--checkpoints",
        "all",
    ]);
    assert_ne!(a, other);
    assert_eq!(a.lines().count(), 2002);
    for line in a.lines().skip(1) {
        for field in line.split(',').filter(|f| !f.is_empty()) {
            let v: f64 = field.parse().unwrap();
            if field.contains('.') || field.contains('e') {
                assert_eq!(format!("{v:?}"), field);
            }
        }
    }
}

#[test]
fn beta_column_is_optional() {
    let (_, out, _) = ranch(&[
        "simulate-rancher",
        "--steps",
        "5",
        "--checkpoints",
        "all",
        "--record-beta",
    ]);
    assert!(out.starts_with("n,x,y,norm,width,direction,alpha,alpha_prime,d,hull_size,beta\n"));
    let rows: Vec<&str> = out.lines().collect();
    // no outward direction at the origin
    assert!(rows[2].ends_with(','));
    assert!(!rows[3].ends_with(','));
}

#[test]
fn out_file_gets_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("walk.csv");
    let (code, out, _) = ranch(&[
        "simulate-rancher",
        "--steps",
        "100",
        "--seed",
        "4",
        "--out",
        path_str(&csv),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let manifest: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("walk.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "simulate-rancher");
    assert_eq!(manifest["seed"], 4);
    assert_eq!(manifest["params"]["steps"], 100);
    assert!(manifest["rng"].as_str().unwrap().contains("ChaCha8"));

    // rerunning the recorded arguments reproduces the data
    let args: Vec<String> = manifest["args"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_str().unwrap().to_owned())
        .collect();
    let first = fs::read(&csv).unwrap();
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    assert_eq!(ranch(&argv).0, 0);
    assert_eq!(fs::read(&csv).unwrap(), first);
}

#[test]
fn validate_passes_on_short_runs() {
    let (code, _, err) = ranch(&["simulate-rancher", "--steps", "1000", "--validate"]);
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("legality 1000/1000 ok"), "{err}");
    let (code, _, err) = ranch(&[
        "simulate-investor",
        "--steps",
        "1000",
        "--alpha",
        "1",
        "--validate",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("rates 1000/1000 ok"), "{err}");
}

#[test]
fn investor_csv_shape_and_reproducibility() {
    let args = [
        "simulate-investor",
        "--steps",
        "100",
        "--alpha",
        "0",
        "--seed",
        "2",
        "--checkpoints",
        "all",
    ];
    let (code, a, _) = ranch(&args);
    assert_eq!(code, 0);
    assert_eq!(a, ranch(&args).1);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "n,x,rmax,rmin,width,ratio,status");
    assert_eq!(lines.len(), 102);
    assert_eq!(lines[1], "0,0.0,,,,,ok");
    assert!(lines[101].starts_with("100,"));
}

#[test]
fn investor_blowup_writes_a_marker_row() {
    let (code, out, err) = ranch(&["simulate-investor", "--steps", "5000", "--alpha", "3"]);
    assert_eq!(code, 0);
    assert!(
        out.trim_end().ends_with(",blowup"),
        "{}",
        out.lines().last().unwrap()
    );
    assert!(err.contains("exceeded"));
}

#[test]
fn supercritical_investor_grows_without_overflow() {
    let (code, out, _) = ranch(&[
        "simulate-investor",
        "--steps",
        "2000",
        "--alpha",
        "1.5",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    let last = out.lines().last().unwrap();
    let x: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!(x.abs() > 1e6 && x.is_finite(), "{last}");
}

#[test]
fn usage_and_io_errors_have_distinct_codes() {
    assert_eq!(ranch(&["simulate-rancher"]).0, 1);
    assert_eq!(ranch(&["simulate-rancher", "--steps", "ten"]).0, 1);
    assert_eq!(ranch(&["estimate-exponent", "--model", "lizard"]).0, 1);
    assert_eq!(
        ranch(&["estimate-exponent", "--model", "investor", "--reps", "2"]).0,
        1
    );
    assert_eq!(
        ranch(&["simulate-investor", "--steps", "10", "--alpha", "-1"]).0,
        1
    );
    assert_eq!(
        ranch(&["simulate-rancher", "--steps", "10", "--checkpoints", "5,20"]).0,
        1
    );
    assert_eq!(
        ranch(&["drift-check", "--steps", "10", "--reps", "1", "--c", "0"]).0,
        1
    );
    assert_eq!(ranch(&["frobnicate"]).0, 1);
    let (code, _, err) = ranch(&[
        "simulate-rancher",
        "--steps",
        "10",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(code, 2, "{err}");
    assert_eq!(
        ranch(&[
            "plot",
            "--in",
            "/nonexistent-dir/x.csv",
            "--out",
            "/tmp/x.svg"
        ])
        .0,
        2
    );
    let (code, out, _) = ranch(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("simulate-rancher"));
}

#[test]
fn power_law_stub_slope_is_exact() {
    let (code, out, _) = ranch(&[
        "estimate-exponent",
        "--model",
        "power-law",
        "--exponent",
        "0.6",
        "--lengths",
        "1e2,1e3,1e4",
        "--reps",
        "3",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["slope"].as_f64().unwrap() - 0.6).abs() < 1e-9);
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
    assert_eq!(v["dropped"], 0);
    assert!(v["manifest"]["rng"].is_string());
}

fn without_manifest(json: &str) -> Value {
    let mut v: Value = serde_json::from_str(json).unwrap();
    v.as_object_mut().unwrap().remove("manifest");
    v
}

#[test]
fn ensemble_output_does_not_depend_on_threads() {
    let base = [
        "estimate-exponent",
        "--model",
        "rancher",
        "--lengths",
        "100,1000",
        "--reps",
        "12",
        "--seed",
        "5",
    ];
    let one: Vec<&str> = base.iter().copied().chain(["--threads", "1"]).collect();
    let three: Vec<&str> = base.iter().copied().chain(["--threads", "3"]).collect();
    let (_, a, _) = ranch(&one);
    let (_, b, _) = ranch(&three);
    assert_eq!(without_manifest(&a), without_manifest(&b));
}

#[test]
fn thread_count_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_ranch"))
        .args(["speed", "--steps", "100", "--reps", "4"])
        .env("RANCHER_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["manifest"]["params"]["steps"], 100);
    assert_eq!(v["speeds"].as_array().unwrap().len(), 4);
    // the sequential build always reports one thread
    let expected = if cfg!(feature = "parallel") { 2 } else { 1 };
    assert_eq!(v["manifest"]["threads"], expected);
}

#[test]
fn binary_exit_codes() {
    let status = Command::new(env!("CARGO_BIN_EXE_ranch"))
        .arg("simulate-rancher")
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(1));
    let status = Command::new(env!("CARGO_BIN_EXE_ranch"))
        .args([
            "simulate-rancher",
            "--steps",
            "3",
            "--out",
            "/nonexistent-dir/a.csv",
        ])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn drift_check_reports_conditions_and_echoes_parameters() {
    let (code, out, err) = ranch(&[
        "drift-check",
        "--steps",
        "3000",
        "--reps",
        "2",
        "--c",
        "0.1667",
        "--burn-in",
        "100",
        "--min-bin-count",
        "100",
    ]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["manifest"]["params"]["c"], 0.1667);
    assert_eq!(v["config"]["c"], 0.1667);
    let conditions = v["lemma"]["conditions"].as_array().unwrap();
    assert_eq!(conditions.len(), 6);
    let unit = conditions
        .iter()
        .find(|c| c["name"] == "unit_increments")
        .unwrap();
    assert_eq!(unit["passed"], true);
    assert!(!v["drift"]["bins"].as_array().unwrap().is_empty());
}

#[test]
fn plot_of_a_header_only_csv_has_axes_only() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("empty.csv");
    fs::write(
        &csv,
        "n,x,y,norm,width,direction,alpha,alpha_prime,d,hull_size\n",
    )
    .unwrap();
    let svg = dir.path().join("empty.svg");
    assert_eq!(
        ranch(&["plot", "--in", path_str(&csv), "--out", path_str(&svg)]).0,
        0
    );
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.trim_end().ends_with("</svg>"));
    assert!(text.contains(r#"class="axes""#));
    assert!(text.contains(r#"class="tick""#));
    assert!(!text.contains(r#"class="path""#));
    assert!(!text.contains(r#"class="hull""#));
}

#[test]
fn plots_of_simulations_show_path_and_hull() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("walk.csv");
    let direct = dir.path().join("direct.svg");
    let code = ranch(&[
        "simulate-rancher",
        "--steps",
        "300",
        "--checkpoints",
        "all",
        "--out",
        path_str(&csv),
        "--plot",
        path_str(&direct),
    ])
    .0;
    assert_eq!(code, 0);
    let from_csv = dir.path().join("from_csv.svg");
    assert_eq!(
        ranch(&["plot", "--in", path_str(&csv), "--out", path_str(&from_csv)]).0,
        0
    );
    for svg in [&direct, &from_csv] {
        let text = fs::read_to_string(svg).unwrap();
        assert!(text.contains(r#"<polyline class="path""#));
        assert!(text.contains(r#"<polygon class="hull""#));
        assert!(text.contains("<metadata>"));
    }

    let inv = dir.path().join("inv.csv");
    let inv_svg = dir.path().join("inv.svg");
    let code = ranch(&[
        "simulate-investor",
        "--steps",
        "500",
        "--alpha",
        "1",
        "--out",
        path_str(&inv),
        "--plot",
        path_str(&inv_svg),
    ])
    .0;
    assert_eq!(code, 0);
    let replot = dir.path().join("inv2.svg");
    assert_eq!(
        ranch(&["plot", "--in", path_str(&inv), "--out", path_str(&replot)]).0,
        0
    );
    for svg in [&inv_svg, &replot] {
        let text = fs::read_to_string(svg).unwrap();
        assert!(text.contains(r#"class="upper-chain""#));
        assert!(text.contains(r#"class="lower-chain""#));
    }
}

#[test]
fn exponent_plot_draws_the_fitted_slope() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("fit.json");
    let code = ranch(&[
        "estimate-exponent",
        "--model",
        "rancher",
        "--lengths",
        "100,1000,10000",
        "--reps",
        "10",
        "--out",
        path_str(&json),
    ])
    .0;
    assert_eq!(code, 0);
    let fit: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let slope = fit["slope"].as_f64().unwrap();
    let svg = dir.path().join("fit.svg");
    assert_eq!(
        ranch(&["plot", "--in", path_str(&json), "--out", path_str(&svg)]).0,
        0
    );
    let text = fs::read_to_string(&svg).unwrap();
    let frame = ranch_cli::svg::Frame {
        xmin: attr(&text, "id=\"frame\"", "data-xmin"),
        xmax: attr(&text, "id=\"frame\"", "data-xmax"),
        ymin: attr(&text, "id=\"frame\"", "data-ymin"),
        ymax: attr(&text, "id=\"frame\"", "data-ymax"),
    };
    let (x1, y1) = frame.data(
        attr(&text, "class=\"fit\"", "x1"),
        attr(&text, "class=\"fit\"", "y1"),
    );
    let (x2, y2) = frame.data(
        attr(&text, "class=\"fit\"", "x2"),
        attr(&text, "class=\"fit\"", "y2"),
    );
    let drawn = (y2 - y1) / (x2 - x1);
    assert!(
        (drawn - slope).abs() < 1e-3,
        "drawn {drawn} vs fitted {slope}"
    );
}

#[test]
fn malformed_csv_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    fs::write(&csv, "n,x,y\n0,0,0\n1,0.5,0.5\n2,oops,1\n").unwrap();
    let (code, _, err) = ranch(&[
        "plot",
        "--in",
        path_str(&csv),
        "--out",
        path_str(&dir.path().join("b.svg")),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("row 4"), "{err}");
    fs::write(&csv, "a,b\n1,2\n").unwrap();
    let (code, _, err) = ranch(&[
        "plot",
        "--in",
        path_str(&csv),
        "--out",
        path_str(&dir.path().join("b.svg")),
    ]);
    assert_eq!(code, 1, "{err}");
}
