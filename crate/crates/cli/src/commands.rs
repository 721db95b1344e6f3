use std::fmt::Write as _;

use corridor_hedge::*;
use corridor_sim::{compare, csv_string, simulate_superhedge, with_threads, SimConfig, Sweep, QUANTILE_LEVELS};

use crate::config::{write_file, RunConfig};
use crate::error::CliError;

type Res<T> = std::result::Result<T, CliError>;

pub fn market(cfg: &RunConfig) -> Res<Market64> {
    let r = RunConfig::require(cfg.r, "r")?;
    let sigma = RunConfig::require(cfg.sigma, "sigma")?;
    let strike = RunConfig::require(cfg.strike, "strike")?;
    Ok(Market64::new(r, sigma, strike)?)
}

pub fn corridor(cfg: &RunConfig, p: &Market64) -> Res<Corridor64> {
    let b = RunConfig::require(cfg.b, "b")?;
    Ok(Corridor64::new(cfg.a.unwrap_or(p.a_hat()), b, p)?)
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// CSV text to `<out>/<name>` or stdout.
pub fn emit(cfg: &RunConfig, name: &str, text: &str) -> Res<()> {
    match &cfg.out {
        Some(dir) => {
            let path = dir.join(name);
            write_file(&path, text)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn csv_field(msg: &str) -> String {
    format!("\"{}\"", msg.replace('"', "'"))
}

fn pct(v: f64) -> f64 {
    (v * 100.0 * 1e8).round() / 1e8
}

pub fn price(cfg: &RunConfig) -> Res<()> {
    let p = market(cfg)?;
    let x = RunConfig::require(cfg.spot, "spot")?;
    let price = put_price(x, &p)?;
    let delta = put_delta(x, &p)?;
    println!("a_hat={}", p.a_hat());
    println!("d={}", p.d());
    println!("q1={}", p.q1());
    println!("q2={}", p.q2());
    println!("P={price}");
    println!("P'={delta}");
    Ok(())
}

fn holding_grid(cfg: &RunConfig, p: &Market64, c: &Corridor64, default_points: Option<usize>) -> Res<Vec<f64>> {
    let (lo, hi) = (p.delta(c.a()), p.delta(c.b()));
    let hs = match (cfg.h, cfg.h_points.or(default_points)) {
        (Some(h), _) => vec![h],
        (None, Some(n)) => linspace(cfg.h_min.unwrap_or(lo), cfg.h_max.unwrap_or(hi), n),
        (None, None) => return Err(CliError::Usage("provide --h or --h-points".into())),
    };
    let slack = 1e-12 * (hi - lo);
    if let Some(&h) = hs.iter().find(|&&h| !(h >= lo - slack && h <= hi + slack)) {
        return Err(CliError::Usage(format!(
            "holding {h} outside [P'(a), P'(b)] = [{lo}, {hi}]"
        )));
    }
    Ok(hs.into_iter().map(|h| h.clamp(lo, hi)).collect())
}

fn curve_summary(curves: &BoundaryCurves<f64>) -> String {
    let failed = curves.rows.iter().filter(|r| r.result.is_err()).count();
    let opt = |v: Option<f64>| v.map_or("none".to_string(), |h| format!("{h}"));
    format!(
        "rows={} failed={failed} monotone={} max_jump_x1={} max_jump_x2={} h_alpha={} h_beta={}",
        curves.rows.len(),
        curves.monotone,
        curves.max_jump.0,
        curves.max_jump.1,
        opt(curves.h_alpha),
        opt(curves.h_beta)
    )
}

pub fn boundaries(cfg: &RunConfig) -> Res<()> {
    let p = market(cfg)?;
    let c = corridor(cfg, &p)?;
    let pay = Payoff64::new(&c, &p)?;
    let hs = holding_grid(cfg, &p, &c, None)?;
    let mut out = String::from("h,case,x1,x2,c1,c2,error\n");
    let mut ok = 0;
    for &h in &hs {
        match solve_with(h, &pay) {
            Ok(s) => {
                ok += 1;
                writeln!(out, "{h},{},{},{},{},{},", s.case(), s.x1, s.x2, s.c1, s.c2).unwrap();
            }
            Err(e) => writeln!(out, "{h},,,,,,{}", csv_field(&e.to_string())).unwrap(),
        }
    }
    emit(cfg, "boundaries.csv", &out)?;
    eprintln!("{}", curve_summary(&boundary_curves(&hs, &c, &p)?));
    if ok == 0 {
        return Err(CliError::Numerical("every holding failed to solve".into()));
    }
    Ok(())
}

pub fn curves(cfg: &RunConfig) -> Res<()> {
    let p = market(cfg)?;
    let c = corridor(cfg, &p)?;
    let hs = holding_grid(cfg, &p, &c, Some(200))?;
    let curves = boundary_curves(&hs, &c, &p)?;
    let mut out = String::from("h,case,x1,x2,error\n");
    for row in &curves.rows {
        match &row.result {
            Ok((case, x1, x2)) => writeln!(out, "{},{case},{x1},{x2},", row.h).unwrap(),
            Err(e) => writeln!(out, "{},,,,{}", row.h, csv_field(&e.to_string())).unwrap(),
        }
    }
    emit(cfg, "curves.csv", &out)?;
    eprintln!("{}", curve_summary(&curves));
    if curves.rows.iter().all(|r| r.result.is_err()) {
        return Err(CliError::Numerical("every holding failed to solve".into()));
    }
    Ok(())
}

pub fn optimize(cfg: &RunConfig) -> Res<()> {
    let p = market(cfg)?;
    let c = corridor(cfg, &p)?;
    let opt = HoldingOptimizer::new(&c, &p)?;
    let pay = opt.payoff();
    let Some(n) = cfg.x_points else {
        let x = RunConfig::require(cfg.spot, "spot")?;
        if !(x > c.a() && x < c.b()) {
            return Err(CliError::Usage(format!(
                "spot {x} must lie strictly inside ({}, {})",
                c.a(),
                c.b()
            )));
        }
        let plan = opt.optimal_initial_holding(x)?;
        let s = &plan.solution;
        println!("x={x}");
        println!("h_star={}", plan.h_star);
        println!("value={}", plan.value);
        println!("residual={:e}", plan.residual);
        println!("case={}", s.case());
        println!("x1={}", s.x1);
        println!("x2={}", s.x2);
        println!("gamma={}", pay.post_trade(x));
        println!("delta={}", p.delta(x));
        println!("fixed_points={:?}", plan.fixed_points);
        return Ok(());
    };
    let w = c.b() - c.a();
    let lo = cfg.x_min.unwrap_or(c.a() + 1e-3 * w);
    let hi = cfg.x_max.unwrap_or(c.b() - 1e-3 * w);
    if !(lo > c.a() && hi < c.b() && lo <= hi) {
        return Err(CliError::Usage(format!(
            "x-grid [{lo}, {hi}] must lie strictly inside ({}, {})",
            c.a(),
            c.b()
        )));
    }
    let mut out = String::from("x,h_star,gamma,delta,value,residual,error\n");
    let mut ok = 0;
    for x in linspace(lo, hi, n) {
        let (g, d) = (pay.post_trade(x), p.delta(x));
        match opt.optimal_initial_holding(x) {
            Ok(plan) => {
                ok += 1;
                writeln!(out, "{x},{},{g},{d},{},{},", plan.h_star, plan.value, plan.residual).unwrap();
            }
            Err(e) => writeln!(out, "{x},,{g},{d},,,{}", csv_field(&e.to_string())).unwrap(),
        }
    }
    emit(cfg, "optimize.csv", &out)?;
    if ok == 0 {
        return Err(CliError::Numerical("no spot on the grid could be optimised".into()));
    }
    Ok(())
}

/// Reference experiment settings with every given override applied.
pub fn sim_config(cfg: &RunConfig) -> Res<SimConfig> {
    let mut s = SimConfig::par1();
    let p = Market64::new(
        cfg.r.unwrap_or(s.market.r()),
        cfg.sigma.unwrap_or(s.market.sigma()),
        cfg.strike.unwrap_or(s.market.strike()),
    )?;
    s.market = p;
    s.corridor = Corridor64::new(cfg.a.unwrap_or(s.corridor.a()), cfg.b.unwrap_or(s.corridor.b()), &p)?;
    s.x = cfg.spot.unwrap_or(s.x);
    s.n_paths = cfg.n_paths.unwrap_or(s.n_paths);
    s.dt = cfg.dt.unwrap_or(s.dt);
    s.seed = cfg.seed.unwrap_or(s.seed);
    s.bridge = cfg.bridge.unwrap_or(s.bridge);
    s.t_max = SimConfig::horizon_for(p.r(), corridor_sim::TRUNCATION);
    s.validate()?;
    Ok(s)
}

pub fn simulate(cfg: &RunConfig) -> Res<()> {
    let s = sim_config(cfg)?;
    let sweep: Sweep = cfg.sweep.as_deref().unwrap_or("spot").parse()?;
    let grid = cfg.grid.clone().unwrap_or_else(|| sweep.default_grid());
    eprintln!(
        "r={}%, σ={}%, K={}, S₀={}, a={}, b={}",
        pct(s.market.r()),
        pct(s.market.sigma()),
        s.market.strike(),
        s.x,
        s.corridor.a(),
        s.corridor.b()
    );
    eprintln!("sweep={sweep} n={} dt={} seed={} bridge={}", s.n_paths, s.dt, s.seed, s.bridge);
    let rows = with_threads(cfg.threads, || compare(sweep, &s, &grid))?;
    for row in &rows {
        if let Err(e) = &row.result {
            eprintln!("warning: {sweep}={} failed: {e}", row.param);
        }
    }
    emit(cfg, &format!("simulate_{sweep}.csv"), &csv_string(&rows))?;
    if rows.iter().all(|r| r.result.is_err()) {
        return Err(CliError::Numerical("every sweep row failed".into()));
    }
    Ok(())
}

pub fn halfline(cfg: &RunConfig) -> Res<()> {
    let p = market(cfg)?;
    let a = cfg.a.unwrap_or(p.a_hat());
    match cfg.mode.as_deref().unwrap_or("zero-mean") {
        "zero-mean" => {
            let h = RunConfig::require(cfg.h, "h")?;
            let sol = solve_boundary_infinite(h, a, &p)?;
            println!("a={}", sol.payoff().a());
            println!("h={h}");
            println!("x_g={}", sol.x_g);
            println!("x_star={}", sol.x_star);
            println!("c1={}", sol.c1);
            println!("c2={}", sol.c2);
            if let Some(x) = cfg.spot {
                if !(x > a) {
                    return Err(CliError::Usage(format!("spot {x} must exceed a = {a}")));
                }
                println!("x={x}");
                println!("value={}", sol.value(x));
                println!("payoff={}", sol.payoff().eval(x));
                println!("stop={}", x >= sol.x_star);
            }
            Ok(())
        }
        "superhedge" => {
            let x = RunConfig::require(cfg.spot, "spot")?;
            let plan = superhedge_plan(x, a, &p)?;
            println!("x={x}");
            println!("a={}", plan.a);
            println!("h={}", plan.h);
            println!("m0={}", plan.m0);
            println!("s_hat={}", plan.s_hat);
            println!("h1={}", plan.h1);
            let mut s = SimConfig::par1();
            s.market = p;
            s.corridor = Corridor64::new(a, f64::INFINITY, &p)?;
            s.x = x;
            s.n_paths = cfg.n_paths.unwrap_or(10_000);
            s.dt = cfg.dt.unwrap_or(1e-3);
            s.seed = cfg.seed.unwrap_or(s.seed);
            s.t_max = SimConfig::horizon_for(p.r(), corridor_sim::TRUNCATION);
            let rep = with_threads(cfg.threads, || simulate_superhedge(&s, a))??;
            println!("paths={} dt={} horizon={}", rep.n, s.dt, s.t_max);
            println!("tau_star_frequency={}", rep.tau_star_frequency());
            println!("tau_a_hits={}", rep.tau_a_hits);
            println!("error_mean={}", rep.moments.mean);
            println!("error_variance={}", rep.moments.variance);
            println!("error_min={}", rep.min);
            println!("error_max={}", rep.max);
            for (lvl, q) in QUANTILE_LEVELS.iter().zip(rep.quantiles) {
                println!("error_q{:02}={q}", (lvl * 100.0).round());
            }
            println!("negative_errors={} (after rebalance {})", rep.negative, rep.negative_after_rebalance);
            Ok(())
        }
        m => Err(CliError::Usage(format!("unknown mode {m:?} (expected zero-mean or superhedge)"))),
    }
}
