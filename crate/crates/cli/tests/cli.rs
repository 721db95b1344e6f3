use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const MARKET: [&str; 6] = ["--r", "0.03", "--sigma", "0.30", "--strike", "100"];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corridor-hedge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn with_market<'a>(cmd: &'a str, rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend(MARKET);
    v.extend(rest);
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn price_reports_exercise_boundary() {
    let o = run(&with_market("price", &["--spot", "100"]));
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!((field(&s, "a_hat") - 40.0).abs() < 1e-12);
    assert!((field(&s, "q1") - 4.0 / 3.0).abs() < 1e-12);
    assert!((field(&s, "q2") + 1.0).abs() < 1e-12);
    let s = stdout(&run(&with_market("price", &["--spot", "40"])));
    assert!((field(&s, "P") - 60.0).abs() < 1e-12);
}

#[test]
fn missing_strike_is_a_usage_error() {
    let o = run(&["price", "--r", "0.03", "--sigma", "0.3", "--spot", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("strike"));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn boundaries_over_a_grid_are_monotone() {
    let o = run(&with_market("boundaries", &["--b", "150", "--h-points", "200"]));
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 200);
    let mut prev = (0.0, 0.0);
    for r in &rows {
        assert!(r[6].is_empty(), "{r:?}");
        let (x1, x2): (f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap());
        assert!(x1 >= prev.0 && x2 >= prev.1);
        prev = (x1, x2);
    }
    assert!(String::from_utf8_lossy(&o.stderr).contains("monotone=true"));
}

#[test]
fn boundaries_at_the_top_holding_and_outside() {
    let delta_b = field(&stdout(&run(&with_market("price", &["--spot", "150"]))), "P'");
    let h = delta_b.to_string();
    let o = run(&with_market("boundaries", &["--b", "150", "--h", &h]));
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][1], "A1");
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), 150.0);
    let o = run(&with_market("boundaries", &["--b", "150", "--h", "0.1"]));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn optimize_grid_stays_in_holding_range() {
    let o = run(&with_market("optimize", &["--b", "150", "--x-points", "12"]));
    assert_eq!(o.status.code(), Some(0));
    for r in csv_rows(&stdout(&o)) {
        let h: f64 = r[1].parse().unwrap();
        let residual: f64 = r[5].parse().unwrap();
        assert!(h > -1.0 && h < -0.1104, "{r:?}");
        assert!(residual <= 1e-8);
    }
    assert_eq!(run(&with_market("optimize", &["--b", "150", "--spot", "40"])).status.code(), Some(2));
}

#[test]
fn halfline_modes() {
    let s = stdout(&run(&with_market("halfline", &["--h", "-1"])));
    assert!(field(&s, "x_star") >= field(&s, "x_g"));
    let o = run(&with_market("halfline", &["--h", "0"]));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate"));
    let o = run(&with_market(
        "halfline",
        &["--mode", "superhedge", "--spot", "100", "--n", "200", "--dt", "1e-2"],
    ));
    assert_eq!(o.status.code(), Some(0));
    assert!(field(&stdout(&o), "m0") > 0.0);
}

#[test]
fn simulate_echoes_defaults_and_orders_rows() {
    let o = run(&["simulate", "--sweep", "b", "--n", "200", "--dt", "1e-3"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("r=3%, σ=30%, K=100, S₀=100, a=90, b=110"), "{err}");
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 50);
    let bs: Vec<f64> = rows.iter().step_by(5).map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(bs, (0..10).map(|i| 105.0 + 5.0 * i as f64).collect::<Vec<_>>());
    assert_eq!(run(&["simulate", "--sweep", "kappa"]).status.code(), Some(2));
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn saved_config_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    let o = run(&[
        "simulate",
        "--sweep",
        "spot",
        "--grid",
        "95,105",
        "--n",
        "300",
        "--dt",
        "1e-3",
        "--seed",
        "7",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let cfg = first.join("config.json");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read(&first, "simulate_spot.csv"), read(&second, "simulate_spot.csv"));
    // every value parses back to the same bits
    for r in csv_rows(&read(&first, "simulate_spot.csv")) {
        for v in &r[4..7] {
            let x: f64 = v.parse().unwrap();
            assert_eq!(format!("{x:.16e}"), *v);
        }
    }
}

#[test]
fn plot_data_covers_every_figure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    let mut args = with_market("price", &["--spot", "100", "--b", "150", "--emit-plot-data"]);
    args.extend(["--out", out.to_str().unwrap()]);
    assert_eq!(run(&args).status.code(), Some(0));
    let manifest = read(out, "manifest.csv");
    for fig in ["p1.0", "p2.0", "p3.0", "p4.0", "p5.0", "p6.0"] {
        assert!(manifest.contains(fig), "{fig} missing");
    }
    for line in manifest.lines().skip(1) {
        let file = line.split(',').next().unwrap();
        let text = read(out, file);
        assert!(text.lines().count() > 1, "{file} empty");
    }
}
