//! (x, y) series behind every figure, one CSV per series plus a manifest.

use std::fmt::Write as _;
use std::path::Path;

use corridor_hedge::payoff::log_grid;
use corridor_hedge::*;
use corridor_sim::path::Stepper;
use corridor_sim::{Plans, SimConfig};

use crate::commands::linspace;
use crate::config::{write_file, RunConfig};
use crate::error::CliError;

const GRID: usize = 400;
const SURFACE: usize = 60;

struct Writer<'a> {
    dir: &'a Path,
    manifest: String,
}

impl Writer<'_> {
    fn series(&mut self, file: &str, what: &str, cols: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> std::result::Result<(), CliError> {
        let mut text = format!("{cols}\n");
        for r in rows {
            let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            writeln!(text, "{}", cells.join(",")).unwrap();
        }
        write_file(&self.dir.join(file), &text)?;
        writeln!(self.manifest, "{file},\"{what}\"").unwrap();
        Ok(())
    }
}

/// One holding from each case: below Γ(a+), between the limits, above Γ(b-).
fn case_holdings(pay: &Payoff64) -> [(Case, f64); 3] {
    let p = pay.market();
    let c = pay.corridor();
    let (lo, hi) = (p.delta(c.a()), p.delta(c.b()));
    let (ga, gb) = (pay.post_trade_lower_limit(), pay.post_trade_upper_limit());
    [
        (Case::A3, 0.5 * (lo + ga)),
        (Case::A2, 0.5 * (ga + gb)),
        (Case::A1, 0.5 * (gb + hi)),
    ]
}

pub fn emit_all(cfg: &RunConfig) -> std::result::Result<(), CliError> {
    let dir = cfg.out.clone().unwrap_or_else(|| "plot-data".into());
    let p = Market64::new(cfg.r.unwrap_or(0.03), cfg.sigma.unwrap_or(0.30), cfg.strike.unwrap_or(100.0))?;
    let c = Corridor64::new(cfg.a.unwrap_or(p.a_hat()), cfg.b.unwrap_or(150.0), &p)?;
    let opt = HoldingOptimizer::new(&c, &p)?;
    let pay = opt.payoff().clone();
    let mut w = Writer {
        dir: &dir,
        manifest: String::from("file,series\n"),
    };
    let xs = log_grid(c.a(), c.b(), GRID);
    let inner = &xs[1..xs.len() - 1];

    w.series("p1.0_gamma.csv", "post-trade holding Γ(x)", "x,y", inner.iter().map(|&x| vec![x, pay.post_trade(x)]))?;
    w.series("p1.0_delta.csv", "put delta P'(x)", "x,y", xs.iter().map(|&x| vec![x, p.delta(x)]))?;

    let holdings = case_holdings(&pay);
    for (case, h) in holdings {
        w.series(
            &format!("p2.0_G_{case}.csv"),
            &format!("sign function G(x, h) at h = {h}"),
            "x,y",
            xs.iter().map(|&x| vec![x, pay.sign(x, h)]),
        )?;
    }
    w.series("p3.0_M.csv", "stopping payoff M(x)", "x,y", xs.iter().map(|&x| vec![x, pay.payoff(x)]))?;
    for (case, h) in holdings {
        let sol = solve_with(h, &pay)?;
        w.series(
            &format!("p3.0_V_{case}.csv"),
            &format!("value V(x, h) at h = {h}, stopping set outside ({}, {})", sol.x1, sol.x2),
            "x,y",
            xs.iter().map(|&x| vec![x, sol.value(x, &pay)]),
        )?;
    }

    let hs = linspace(p.delta(c.a()), p.delta(c.b()), 200);
    let curves = boundary_curves(&hs, &c, &p)?;
    let ok: Vec<_> = curves
        .rows
        .iter()
        .filter_map(|r| r.result.as_ref().ok().map(|&(_, x1, x2)| (r.h, x1, x2)))
        .collect();
    w.series("p4.0_x1.csv", "lower boundary x1*(h)", "x,y", ok.iter().map(|&(h, x1, _)| vec![h, x1]))?;
    w.series("p4.0_x2.csv", "upper boundary x2*(h)", "x,y", ok.iter().map(|&(h, _, x2)| vec![h, x2]))?;

    let sx = log_grid(c.a(), c.b(), SURFACE + 2);
    let sx = &sx[1..=SURFACE];
    let sh = linspace(p.delta(c.a()), p.delta(c.b()), SURFACE);
    let mut surface = Vec::with_capacity(SURFACE * SURFACE);
    for &h in &sh {
        let sol = solve_with(h, &pay)?;
        surface.extend(sx.iter().map(|&x| vec![x, h, sol.value(x, &pay)]));
    }
    w.series("p6.0_value_surface.csv", "value V(x, h) on a grid", "x,h,v", surface)?;
    let mut h_star = Vec::new();
    for &x in sx {
        if let Ok(plan) = opt.optimal_initial_holding(x) {
            h_star.push(vec![x, plan.h_star]);
        }
    }
    w.series("p6.0_h_star.csv", "optimal initial holding h*(x)", "x,y", h_star)?;
    w.series("p6.0_gamma.csv", "post-trade holding Γ(x)", "x,y", sx.iter().map(|&x| vec![x, pay.post_trade(x)]))?;
    w.series("p6.0_delta.csv", "put delta P'(x)", "x,y", sx.iter().map(|&x| vec![x, p.delta(x)]))?;

    sample_path(&mut w, &p, cfg.seed.unwrap_or(42))?;
    write_file(&dir.join("manifest.csv"), &w.manifest)?;
    eprintln!("wrote plot data to {}", dir.display());
    Ok(())
}

/// One path of strategy 1 on (90, 130) from 100, monitored on a 1e-3 grid.
fn sample_path(w: &mut Writer, p: &Market64, seed: u64) -> std::result::Result<(), CliError> {
    let mut cfg = SimConfig::par1();
    cfg.market = *p;
    cfg.corridor = Corridor64::new(90.0, 130.0, p)?;
    cfg.dt = 1e-3;
    cfg.seed = seed;
    let plans = Plans::new(&cfg)?;
    let (l1, u1) = plans.triggers[0];
    let (g_lo, g_hi) = plans.post_trade[0];
    let (a, b) = (cfg.corridor.a(), cfg.corridor.b());
    let mut st = Stepper::new(&cfg, 0, cfg.x);
    let mut holding = plans.initial[0];
    let mut path = vec![vec![0.0, cfg.x]];
    let mut held = vec![vec![0.0, holding]];
    let mut events = vec![vec![0.0, cfg.x, holding]];
    let mut rebalanced = false;
    while st.t < 200.0 {
        st.step();
        let s = st.y.exp();
        path.push(vec![st.t, s]);
        if s <= a || s >= b {
            events.push(vec![st.t, s.clamp(a, b), holding]);
            break;
        }
        if !rebalanced && (s <= l1 || s >= u1) {
            rebalanced = true;
            holding = if s <= l1 { g_lo } else { g_hi };
            held.push(vec![st.t, holding]);
            events.push(vec![st.t, s.clamp(l1, u1), holding]);
        }
    }
    held.push(vec![st.t, holding]);
    w.series("p5.0_path.csv", "sample stock path", "t,s", path)?;
    w.series("p5.0_holding.csv", "strategy 1 stock holding (step function)", "t,h", held)?;
    w.series("p5.0_events.csv", "start, rebalance and corridor exit", "t,s,h", events)?;
    w.series(
        "p5.0_levels.csv",
        "a, x1*, x2*, b",
        "level,value",
        [vec![0.0, a], vec![1.0, l1], vec![2.0, u1], vec![3.0, b]],
    )?;
    Ok(())
}
