//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run everything with `cargo test --test acceptance`, or pick criteria by
//! number: `cargo test --test acceptance -- 1 2 7`.

use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::Instant;

use corridor_hedge::*;
use corridor_sim::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed of the random instances in criteria 5 and 6.
const INSTANCE_SEED: u64 = 20_240_601;
/// Relative band around the reference table entries.
const TABLE_BAND: f64 = 0.35;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn wide() -> (Market64, Corridor64) {
    let p = Market64::new(0.03, 0.30, 100.0).unwrap();
    let c = Corridor64::new(40.0, 150.0, &p).unwrap();
    (p, c)
}

fn interior(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64).collect()
}

fn holding_grid(p: &Market64, c: &Corridor64, n: usize) -> Vec<f64> {
    let (lo, hi) = (p.delta(c.a()), p.delta(c.b()));
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

// 1 ------------------------------------------------------------------------

fn closed_form_anchors() -> Outcome {
    let (p, _) = wide();
    let (q1, q2) = characteristic_roots(&p);
    let res = [q1, q2]
        .map(|q| (0.5 * 0.09 * q * (q - 1.0) + 0.03 * q - 0.06).abs())
        .into_iter()
        .fold(0.0, f64::max);
    let t = Market64::new(0.03, 0.3111, 100.0).unwrap();
    let tc = Corridor64::new(90.0, 110.0, &t).unwrap();
    let delta = t.delta(100.0);
    let gam = gamma_post_trade(100.0, &tc, &t).unwrap().value;
    let pass = (p.a_hat() - 40.0).abs() <= 1e-12
        && (q1 - 4.0 / 3.0).abs() <= 1e-12
        && (q2 + 1.0).abs() <= 1e-12
        && res <= 1e-12
        && (delta + 0.2110).abs() <= 5e-4
        && (gam + 0.2115).abs() <= 1e-3;
    Outcome::new(
        pass,
        format!(
            "a_hat={:.12} q1={:.12} q2={:.12} residual={res:.1e} P'(100)={delta:.5} Gamma(100)={gam:.5}",
            p.a_hat(),
            q1,
            q2
        ),
    )
}

// 2 ------------------------------------------------------------------------

fn consistency_suite() -> Outcome {
    let (p, c) = wide();
    let pay = Payoff64::new(&c, &p).unwrap();
    let pair = FundamentalPair::new(&c, &p).unwrap();
    let s2 = p.sigma() * p.sigma();
    let g: [Box<dyn Fn(f64) -> f64>; 3] = [
        Box::new(move |x| s2 * x * x),
        Box::new(move |x| s2 * x * x * p.delta(x)),
        Box::new(move |x| s2 * x * x * p.delta(x).powi(2)),
    ];
    let kinks = [p.a_hat()];
    let xs = interior(c.a(), c.b(), 100);
    let scale: Vec<f64> = (0..3)
        .map(|k| xs.iter().map(|&x| pay.gammas(x)[k].abs()).fold(0.0, f64::max))
        .collect();
    let (mut quad_err, mut pde_err, mut g_err) = (0.0f64, 0.0f64, 0.0f64);
    for &x in &xs {
        let closed = pay.gammas(x);
        for k in 0..3 {
            let src = Source::Function {
                g: &g[k],
                kinks: &kinks,
            };
            let q = resolvent(x, &src, &pair, &p).unwrap();
            quad_err = quad_err.max((q - closed[k]).abs() / closed[k].abs().max(1e-6 * scale[k]));
            let lv = p.killed_generator(
                x,
                closed[k],
                pay.gamma_derivative(k, 1, x),
                pay.gamma_derivative(k, 2, x),
            );
            pde_err = pde_err.max((lv + g[k](x)).abs() / g[k](x).abs().max(1.0));
        }
    }
    for h in holding_grid(&p, &c, 9) {
        for x in interior(45.0, 145.0, 40) {
            let e = 1e-3 * x;
            let m = |y: f64| pay.payoff(y);
            let d1 = (m(x + e) - m(x - e)) / (2.0 * e);
            let d2 = (m(x + e) - 2.0 * m(x) + m(x - e)) / (e * e);
            let fd = p.killed_generator(x, m(x), d1, d2) + pay.running_cost(x, h);
            let gv = pay.sign(x, h);
            let den = gv.abs().max(pay.running_cost(x, h)).max(1e-3);
            g_err = g_err.max((fd - gv).abs() / den);
        }
    }
    let edges = pay.payoff(c.a()).abs().max(pay.payoff(c.b()).abs());
    let pass = quad_err <= 1e-9 && pde_err <= 1e-8 && g_err <= 1e-5 && edges == 0.0;
    Outcome::new(
        pass,
        format!(
            "gamma vs quadrature {quad_err:.1e} (<=1e-9), ODE residual {pde_err:.1e} (<=1e-8), G vs FD {g_err:.1e} (<=1e-5), |M(a)|,|M(b)| = {edges}"
        ),
    )
}

// 3 ------------------------------------------------------------------------

fn free_boundary_suite() -> Outcome {
    let (p, c) = wide();
    let pay = Payoff64::new(&c, &p).unwrap();
    let (a, b) = (c.a(), c.b());
    let mscale = interior(a, b, 200).iter().map(|&x| pay.payoff(x)).fold(0.0, f64::max);
    let mut worst = [0.0f64; 5];
    let mut cases = HashMap::new();
    let mut failures = Vec::new();
    for h in holding_grid(&p, &c, 25) {
        let sol = match solve_boundaries(h, &c, &p) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("h={h:.4}: {e}"));
                continue;
            }
        };
        *cases.entry(sol.case().to_string()).or_insert(0) += 1;
        let v = sol.candidate();
        for x0 in [sol.x1, sol.x2] {
            worst[0] = worst[0].max((v.eval(x0) - pay.payoff(x0)).abs() / mscale);
            if x0 > a && x0 < b {
                let m1 = pay.payoff_jet(x0).d1;
                let den = m1.abs().max(mscale / (b - a));
                worst[1] = worst[1].max((v.derivative(1, x0) - m1).abs() / den);
                let v2 = v.derivative(2, x0);
                let c2 = boundary_curvature(x0, h, &pay);
                worst[4] = worst[4].max((c2 - v2).abs() / v2.abs().max(1e-6));
            }
        }
        for i in 1..512 {
            let x = sol.x1 + (sol.x2 - sol.x1) * i as f64 / 512.0;
            worst[2] = worst[2].max((v.eval(x) - pay.payoff(x)) / mscale);
        }
        for x in interior(a, b, 512) {
            if !sol.continues(x) {
                let s = pay.sign(x, h) / pay.running_cost(x, 0.0).max(1.0);
                worst[3] = worst[3].max(-s);
            }
        }
    }
    let pass = failures.is_empty()
        && cases.len() == 3
        && worst[0] <= 1e-8
        && worst[1] <= 1e-7
        && worst[2] <= 1e-8
        && worst[3] <= 1e-8
        && worst[4] <= 1e-3;
    let mut cases: Vec<_> = cases.into_iter().collect();
    cases.sort();
    Outcome::new(
        pass,
        format!(
            "cases {cases:?}; matching {:.1e}, pasting {:.1e}, max(V-M)/scale {:.1e}, min G outside {:.1e}, C2 jump {:.1e}{}",
            worst[0],
            worst[1],
            worst[2],
            -worst[3],
            worst[4],
            if failures.is_empty() { String::new() } else { format!("; failures {failures:?}") }
        ),
    )
}

// 4 ------------------------------------------------------------------------

fn boundary_curve_properties() -> Outcome {
    let (p, c) = wide();
    let pay = Payoff64::new(&c, &p).unwrap();
    let hs = holding_grid(&p, &c, 200);
    let step = hs[1] - hs[0];
    let coarse = boundary_curves(&hs, &c, &p).unwrap();
    let fine = boundary_curves(&holding_grid(&p, &c, 399), &c, &p).unwrap();
    let all_ok = coarse.rows.iter().chain(&fine.rows).all(|r| r.result.is_ok());
    let ratios = [
        fine.max_jump.0 / coarse.max_jump.0,
        fine.max_jump.1 / coarse.max_jump.1,
    ];
    let halves = ratios.iter().all(|r| (0.4..=0.6).contains(r));
    let case_at = |pred: &dyn Fn(Case) -> bool| {
        coarse
            .rows
            .iter()
            .find(|r| r.result.as_ref().map_or(false, |s| pred(s.0)))
            .map(|r| r.h)
    };
    let first_a2 = case_at(&|k| k != Case::A3);
    let first_a1 = case_at(&|k| k == Case::A1);
    let (lo_lim, hi_lim) = (pay.post_trade_lower_limit(), pay.post_trade_upper_limit());
    let transitions = matches!((first_a2, first_a1), (Some(x), Some(y))
        if (x - lo_lim).abs() <= step && (y - hi_lim).abs() <= step);
    let pass = all_ok && coarse.monotone && fine.monotone && halves && transitions;
    Outcome::new(
        pass,
        format!(
            "monotone {}/{}, jump ratio x1 {:.3} x2 {:.3}, A3->A2 at {:.5} (Gamma(a+) {lo_lim:.5}), A2->A1 at {:.5} (Gamma(b-) {hi_lim:.5}), step {step:.5}",
            coarse.monotone,
            fine.monotone,
            ratios[0],
            ratios[1],
            first_a2.unwrap_or(f64::NAN),
            first_a1.unwrap_or(f64::NAN)
        ),
    )
}

// 5 ------------------------------------------------------------------------

fn oracle_equivalence() -> Outcome {
    let cfg = SimConfig::par1();
    let opt = HoldingOptimizer::new(&cfg.corridor, &cfg.market).unwrap();
    let (lo, hi) = opt.holding_range();
    let mut rng = ChaCha8Rng::seed_from_u64(INSTANCE_SEED);
    let mut pass = true;
    let mut lines = Vec::new();
    // one holding per fifth of the range so every case gets drawn
    for i in 0..5 {
        let u = (i as f64 + rng.random_range(0.05..0.95)) / 5.0;
        let h = lo + u * (hi - lo);
        let sol = opt.solve(h).unwrap();
        let u: f64 = rng.random_range(0.1..0.9);
        let x = sol.x1 + u * (sol.x2 - sol.x1);
        let v = opt.value(x, h).unwrap();
        let rule = StoppingRule::Thresholds {
            lower: sol.x1,
            upper: sol.x2,
        };
        let mc = mc_stopping_cost(x, h, rule, &cfg).unwrap();
        let z = (mc.mean - v) / mc.se;
        let grid = mc_threshold_grid(x, h, 80, &cfg).unwrap();
        let (i, j, best) = grid.argmin();
        let beaten = grid
            .cost
            .iter()
            .flatten()
            .filter(|e| v > e.mean + 3.0 * e.se)
            .count();
        let ok = z.abs() <= 3.0 && beaten == 0;
        pass &= ok;
        lines.push(format!(
            "      x={x:.3} h={h:.5} case {} V={v:.6e} mc={:.6e}±{:.1e} z={z:+.2} | grid min {:.6e}±{:.1e} at ({:.3},{:.3}) vs ({:.3},{:.3}), pairs beating V by 3SE: {beaten} {}",
            sol.case(),
            mc.mean,
            mc.se,
            best.mean,
            best.se,
            grid.lower[i],
            grid.upper[j],
            sol.x1,
            sol.x2,
            if ok { "ok" } else { "FAIL" }
        ));
    }
    Outcome::new(pass, format!("5 instances on (90, 110), N=1e5, 80x80 grid\n{}", lines.join("\n")))
}

// 6 ------------------------------------------------------------------------

fn fixed_point() -> Outcome {
    let (p, c) = wide();
    let opt = HoldingOptimizer::new(&c, &p).unwrap();
    let (lo, hi) = opt.holding_range();
    let mut rng = ChaCha8Rng::seed_from_u64(INSTANCE_SEED + 1);
    let n = 200;
    let step = (hi - lo) / n as f64;
    let mut pass = true;
    let mut worst = (0.0f64, 0.0f64);
    let mut misses = Vec::new();
    for _ in 0..10 {
        let x = rng.random_range(42.0..148.0);
        let plan = opt.optimal_initial_holding(x).unwrap();
        let g1 = opt.payoff().gammas(x)[0];
        let dv = opt.dv_dh(x, plan.h_star).unwrap() / (g1 * (hi - lo));
        worst = (worst.0.max(plan.residual), worst.1.max(dv.abs()));
        let (mut arg, mut best) = (lo, f64::INFINITY);
        for i in 0..=n {
            let h = lo + step * i as f64;
            let v = opt.value(x, h).unwrap();
            if v < best {
                arg = h;
                best = v;
            }
        }
        let ok = plan.residual <= 1e-8
            && dv.abs() <= 1e-6
            && (arg - plan.h_star).abs() <= step
            && plan.h_star > lo
            && plan.h_star < hi;
        if !ok {
            misses.push(format!("x={x:.3} h*={:.6} grid argmin {arg:.6}", plan.h_star));
        }
        pass &= ok;
    }
    Outcome::new(
        pass,
        format!(
            "10 spots on (40, 150): max residual {:.1e}, max |dV/dh|/scale {:.1e}, grid step {step:.2e}{}",
            worst.0,
            worst.1,
            if misses.is_empty() { String::new() } else { format!("; misses {misses:?}") }
        ),
    )
}

// 7, 8 ---------------------------------------------------------------------

const TABLE1: [[f64; 5]; 10] = [
    [0.29, 1.23, 1.20, 0.58, 2.04],
    [0.98, 2.55, 2.49, 1.61, 3.44],
    [1.38, 3.37, 3.22, 2.13, 3.53],
    [1.69, 3.35, 3.26, 2.26, 2.63],
    [1.91, 3.39, 3.42, 2.27, 2.29],
    [1.72, 2.93, 2.98, 2.17, 2.21],
    [1.42, 2.77, 2.79, 2.00, 2.64],
    [1.28, 2.50, 2.62, 1.88, 2.85],
    [0.91, 2.38, 2.55, 1.42, 3.04],
    [0.41, 0.99, 1.01, 0.68, 1.60],
];
const TABLE2: [[f64; 5]; 10] = [
    [6.48, 11.10, 11.03, 8.03, 8.03],
    [4.68, 8.21, 8.14, 5.74, 5.78],
    [3.55, 5.98, 6.17, 4.49, 4.50],
    [3.05, 4.78, 4.82, 3.58, 3.57],
    [2.77, 4.00, 4.20, 3.38, 3.38],
    [1.71, 3.07, 3.05, 1.98, 1.98],
    [1.30, 2.09, 2.09, 1.58, 1.58],
    [1.26, 2.08, 2.14, 1.49, 1.50],
    [0.94, 1.55, 1.58, 1.20, 1.20],
    [0.76, 1.28, 1.29, 0.93, 0.94],
];
const TABLE3: [[f64; 5]; 10] = [
    [0.51, 1.12, 1.14, 0.66, 0.88],
    [1.84, 3.10, 3.21, 2.20, 2.20],
    [4.12, 7.40, 7.24, 5.29, 5.65],
    [5.85, 13.26, 13.06, 8.11, 10.03],
    [9.45, 22.75, 21.14, 14.04, 20.21],
    [13.23, 35.68, 32.63, 20.69, 33.07],
    [18.91, 45.82, 40.91, 29.04, 51.60],
    [21.58, 68.40, 61.91, 38.00, 72.40],
    [29.38, 94.32, 76.60, 48.59, 98.58],
    [37.14, 111.93, 106.53, 68.92, 127.93],
];

struct Tables {
    sweeps: Vec<(Sweep, Vec<CompareRow>)>,
    at_100: [StrategyStats; 5],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let cfg = SimConfig::par1();
        let sweeps = Sweep::ALL
            .iter()
            .map(|&s| (s, compare(s, &cfg, &s.default_grid())))
            .collect();
        let at_100 = estimate_all(&cfg, &Plans::new(&cfg).unwrap()).unwrap();
        Tables { sweeps, at_100 }
    })
}

fn reference(s: Sweep) -> &'static [[f64; 5]; 10] {
    match s {
        Sweep::Spot => &TABLE1,
        Sweep::Sigma => &TABLE2,
        Sweep::B => &TABLE3,
    }
}

fn table_reproduction() -> Outcome {
    let t = tables();
    let mut lines = Vec::new();
    let mut outside = Vec::new();
    let mut failed_rows = 0;
    let mut s1_minimal = true;
    let mut monotone = true;
    for (sweep, rows) in &t.sweeps {
        let refs = reference(*sweep);
        lines.push(format!(
            "      {sweep} sweep: 100 x sample variance (reference) [relative deviation]"
        ));
        let mut prev: Option<[f64; 5]> = None;
        for (row, r) in rows.iter().zip(refs) {
            let Ok(stats) = &row.result else {
                failed_rows += 1;
                lines.push(format!("      {:>8.4}  FAILED {:?}", row.param, row.result));
                continue;
            };
            let v: [f64; 5] = std::array::from_fn(|k| 100.0 * stats[k].variance);
            let cells: Vec<String> = (0..5)
                .map(|k| {
                    let dev = v[k] / r[k] - 1.0;
                    let mark = if dev.abs() <= TABLE_BAND { ' ' } else { '!' };
                    if dev.abs() > TABLE_BAND {
                        outside.push(format!("{sweep}={} S{}: {:.3} vs {} ({:+.0}%)", row.param, k + 1, v[k], r[k], 100.0 * dev));
                    }
                    format!("{:7.3} ({:6.2}) [{:+5.0}%]{mark}", v[k], r[k], 100.0 * dev)
                })
                .collect();
            lines.push(format!("      {:>8.4}  {}", row.param, cells.join(" ")));
            if (1..5).any(|k| v[0] >= v[k]) {
                s1_minimal = false;
            }
            if let Some(pv) = prev {
                let ok = match sweep {
                    Sweep::Sigma => (0..5).all(|k| v[k] < pv[k]),
                    Sweep::B => (0..5).all(|k| v[k] > pv[k]),
                    Sweep::Spot => true,
                };
                monotone &= ok;
            }
            prev = Some(v);
        }
    }
    let s4 = t.at_100[3].variance;
    let s5 = t.at_100[4].variance;
    let s45 = (s4 - s5).abs() / s5;
    let pass = failed_rows == 0 && outside.is_empty() && s1_minimal && monotone && s45 < 0.05;
    lines.push(format!(
        "      strategy 1 row-wise minimal: {s1_minimal}; sigma/b monotone: {monotone}; S0=100 strategies 4/5: {:.4}/{:.4} ({:.2}% apart)",
        100.0 * s4,
        100.0 * s5,
        100.0 * s45
    ));
    Outcome::new(
        pass,
        format!(
            "30 rows, N=1e5, dt=1e-4, bridge on; {} of 150 cells outside ±{:.0}%{}\n{}",
            outside.len(),
            100.0 * TABLE_BAND,
            if outside.is_empty() { String::new() } else { format!(": {}", outside.join("; ")) },
            lines.join("\n")
        ),
    )
}

fn zero_mean() -> Outcome {
    let t = tables();
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    let mut count = 0;
    for (sweep, rows) in &t.sweeps {
        for row in rows {
            let Ok(stats) = &row.result else { continue };
            for s in stats {
                count += 1;
                let z = s.mean / s.mean_se;
                worst = worst.max(z.abs());
                if z.abs() > 3.0 {
                    bad.push(format!("{sweep}={} S{} z={z:+.2}", row.param, s.strategy));
                }
            }
        }
    }
    Outcome::new(
        bad.is_empty() && count == 150,
        format!("{count} strategy-rows, max |mean|/SE = {worst:.2}{}", if bad.is_empty() { String::new() } else { format!("; {bad:?}") }),
    )
}

// 9 ------------------------------------------------------------------------

fn half_line_suite() -> Outcome {
    let (p, _) = wide();
    let mut lines = Vec::new();
    let mut xg_err: f64 = 0.0;
    let mut pass = true;
    for h in [-0.9, -0.6, -0.3, -0.1] {
        let sol = solve_boundary_infinite(h, 40.0, &p).unwrap();
        let xg = x_p(h / 2.0, &p).unwrap();
        xg_err = xg_err.max((sol.x_g - xg).abs() / xg);
        xg_err = xg_err.max(sign_function_infinite(xg, h, &p).abs() / (p.sigma() * xg).powi(2));
        pass &= sol.x_star >= sol.x_g;
    }
    pass &= xg_err <= 1e-12;

    let mc_cfg = SimConfig {
        n_paths: 10_000,
        dt: 1e-2,
        ..SimConfig::par1()
    }
    .with_spot(60.0);
    let m_mc = mc_half_line_payoff(&mc_cfg, 40.0).unwrap();
    let m_exact = payoff_infinite(60.0, 40.0, &p).unwrap();
    let z = (m_mc.mean - m_exact) / m_mc.se;
    pass &= z.abs() <= 3.0;
    lines.push(format!(
        "      M_inf(60), a=40: closed form {m_exact:.4}, MC {:.4}±{:.4} (z={z:+.2}, N=1e4, dt=1e-2, T={:.0}y, {} censored)",
        m_mc.mean, m_mc.se, mc_cfg.t_max, m_mc.censored
    ));

    let plan = superhedge_plan(100.0, 40.0, &p).unwrap();
    let symbolic = plan.m0 > 0.0 && plan.s_hat < plan.x && plan.s_hat > plan.a;
    pass &= symbolic && (plan.m0 - 132.58).abs() <= 0.01;
    let sh_cfg = SimConfig {
        n_paths: 10_000,
        dt: 1e-3,
        ..SimConfig::par1()
    };
    let rep = simulate_superhedge(&sh_cfg, 40.0).unwrap();
    let path_ok = rep.forced == 0 && rep.nonzero_at_exit == 0 && rep.negative_after_rebalance == 0;
    pass &= path_ok;
    lines.push(format!(
        "      superhedge x=100 a=40: m0={:.4} s_hat={:.4} h={} h1={}; inequalities {symbolic}",
        plan.m0, plan.s_hat, plan.h, plan.h1
    ));
    lines.push(format!(
        "      {} paths, dt=1e-3, T={:.0}y: tau* <= T on {} ({:.4}), tau_a <= T on {}, tau_a before tau* on {}, nonzero error at tau_a on {}",
        rep.n,
        sh_cfg.t_max,
        rep.tau_star_hits,
        rep.tau_star_frequency(),
        rep.tau_a_hits,
        rep.forced,
        rep.nonzero_at_exit
    ));
    lines.push(format!(
        "      error: mean {:.4e} var {:.4e} min {:.3e} max {:.3e}; below -{:.0e}: {} (after rebalance {})",
        rep.moments.mean, rep.moments.variance, rep.min, rep.max, rep.tolerance, rep.negative, rep.negative_after_rebalance
    ));
    lines.push(format!(
        "      quantiles 1/5/25/50/75/95/99%: {}",
        rep.quantiles.map(|q| format!("{q:.3e}")).join(" ")
    ));
    Outcome::new(pass, format!("x_G exactness {xg_err:.1e}\n{}", lines.join("\n")))
}

// 10 -----------------------------------------------------------------------

fn determinism() -> Outcome {
    let cfg = SimConfig {
        n_paths: 2_000,
        ..SimConfig::par1()
    };
    let grid = Sweep::Spot.default_grid();
    let run = |t| with_threads(Some(t), || csv_string(&compare(Sweep::Spot, &cfg, &grid))).unwrap();
    let (a, b, c) = (run(1), run(2), run(8));
    let again = run(1);
    let same = a == b && a == c && a == again;
    Outcome::new(
        same,
        format!("spot sweep CSV (N=2000, {} lines) identical across 1/2/8 workers and a repeat: {same}", a.lines().count()),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let all: [Criterion; 10] = [
        (1, "closed-form anchors", closed_form_anchors),
        (2, "consistency suite", consistency_suite),
        (3, "free-boundary suite", free_boundary_suite),
        (4, "boundary-curve properties", boundary_curve_properties),
        (5, "oracle equivalence", oracle_equivalence),
        (6, "fixed point", fixed_point),
        (7, "table reproduction", table_reproduction),
        (8, "zero mean", zero_mean),
        (9, "half-line suite", half_line_suite),
        (10, "determinism", determinism),
    ];
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, name, f) in all {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let out = f();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {name}: {verdict} ({:.1}s) {}",
            t.elapsed().as_secs_f64(),
            out.detail
        );
        if !out.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
