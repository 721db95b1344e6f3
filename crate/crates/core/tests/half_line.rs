use corridor_hedge::*;

fn market() -> Market64 {
    Market64::new(0.03, 0.30, 100.0).unwrap()
}

#[test]
fn sign_root_and_signs() {
    let p = market();
    for h in [-0.9, -0.5, -0.1] {
        let xg = x_p(h / 2.0, &p).unwrap();
        assert!(sign_function_infinite(xg, h, &p).abs() <= 1e-10 * xg * xg);
        for i in 1..50 {
            let x = 40.0 + 10.0 * i as f64;
            let g = sign_function_infinite(x, h, &p);
            if x < xg * (1.0 - 1e-9) {
                assert!(g < 0.0);
            } else if x > xg * (1.0 + 1e-9) {
                assert!(g > 0.0);
            }
        }
    }
    assert_eq!(sign_function_infinite(120.0, 0.0, &p), 0.0);
}

#[test]
fn half_line_payoff_shape() {
    let p = market();
    let m = HalfLinePayoff::new(40.0, &p).unwrap();
    assert_eq!(m.eval(40.0), 0.0);
    let mut peak: f64 = 0.0;
    for i in 1..200 {
        let x = 40.0 * 1.05f64.powi(i);
        let v = m.eval(x);
        assert!(v > 0.0);
        peak = peak.max(v);
    }
    // the x^{q₂} term dominates far out, so M∞ decays again
    assert!(m.eval(1e8) < 1e-3 * peak);
}

#[test]
fn half_line_payoff_is_limit_of_growing_corridors() {
    let p = market();
    let m = HalfLinePayoff::new(50.0, &p).unwrap();
    for x in [60.0, 100.0, 200.0] {
        let mut prev = 0.0;
        let mut gaps = Vec::new();
        for b in [1e3, 1e4, 1e5] {
            let c = Corridor64::new(50.0, b, &p).unwrap();
            let g3 = gamma_functions(x, &c, &p).unwrap()[2];
            assert!(g3 >= prev);
            assert!(g3 <= m.eval(x) * (1.0 + 1e-12));
            gaps.push(m.eval(x) - g3);
            prev = g3;
        }
        assert!(gaps[2] < gaps[1] && gaps[1] < gaps[0]);
        assert!(gaps[2] <= 1e-3 * m.eval(x));
    }
}

#[test]
fn half_line_payoff_solves_the_ode() {
    let p = market();
    let m = HalfLinePayoff::new(45.0, &p).unwrap();
    for i in 1..40 {
        let x = 45.0 + 7.0 * i as f64;
        let f = running_cost(x, 0.0, &p).unwrap();
        let lm = p.killed_generator(x, m.eval(x), m.derivative(1, x), m.derivative(2, x));
        assert!((lm + f).abs() <= 1e-10 * f);
        // finite-difference generator against the sign function
        let e = 1e-3 * x;
        let d1 = (m.eval(x + e) - m.eval(x - e)) / (2.0 * e);
        let d2 = (m.eval(x + e) - 2.0 * m.eval(x) + m.eval(x - e)) / (e * e);
        for h in [-0.6, -0.2] {
            let fd = p.killed_generator(x, m.eval(x), d1, d2) + running_cost(x, h, &p).unwrap();
            let g = sign_function_infinite(x, h, &p);
            assert!((fd - g).abs() <= 1e-5 * g.abs().max(f), "x = {x}: {fd} vs {g}");
        }
    }
}

#[test]
fn divergent_resolvent_is_reported() {
    let p = market();
    // x² against the speed density grows too fast on (a, ∞)
    let terms = [numerics::PowerTerm::new(1.0, 2.0)];
    let err = half_line::half_line_resolvent(100.0, &terms, 40.0, &p).unwrap_err();
    assert!(matches!(err, Error::DivergentIntegral { .. }));
}

#[test]
fn zero_mean_boundary() {
    let p = market();
    for h in [-1.0, -0.7, -0.4, -0.1] {
        let sol = solve_boundary_infinite(h, 40.0, &p).unwrap();
        assert_eq!(sol.post_trade_holding(), 0.0);
        assert!((sol.x_g - x_p(h / 2.0, &p).unwrap()).abs() < 1e-10);
        assert!(sol.x_star >= sol.x_g);
        let m = sol.payoff();
        assert!(sol.value(40.0).abs() < 1e-9);
        let v = |x: f64| candidate_value(x, h, sol.c1, sol.c2, &p);
        assert!((v(sol.x_star) - m.eval(sol.x_star)).abs() <= 1e-8 * m.eval(sol.x_star));
        for i in 1..200 {
            let x = 40.0 + (sol.x_star - 40.0) * i as f64 / 200.0;
            assert!(sol.value(x) <= m.eval(x) + 1e-8 * m.eval(sol.x_star));
        }
    }
    assert!(matches!(
        solve_boundary_infinite(0.0, 40.0, &p),
        Err(Error::Degenerate(_))
    ));
    assert!(solve_boundary_infinite(-1.5, 40.0, &p).is_err());
}

#[test]
fn superhedge_plan_inequalities() {
    let p = market();
    let plan = superhedge_plan(100.0, 40.0, &p).unwrap();
    assert!((plan.m0 - 132.58).abs() < 0.01);
    assert_eq!(plan.h, -1.0);
    assert!(plan.m0 > 0.0 && plan.s_hat < 100.0 && plan.s_hat > 40.0);
    // rebalancing at ŝ funds h₁ shares exactly
    assert!((plan.m0 + plan.h * plan.s_hat - plan.h1 * plan.s_hat).abs() < 1e-10);
    for x in [40.5, 60.0, 250.0] {
        for a in [40.0, 45.0, 80.0] {
            if x > a {
                let s = superhedge_plan(x, a, &p).unwrap();
                assert!(s.m0 > 0.0 && s.s_hat > a && s.s_hat < x);
            }
        }
    }
    assert!(superhedge_plan(30.0, 40.0, &p).is_err());
    assert!(superhedge_plan(100.0, 30.0, &p).is_err());
}
