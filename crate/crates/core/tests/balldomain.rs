use lane_emden_core::balldomain::*;
use lane_emden_core::entire::{solve_entire, sobolev_quotient, EntireOptions};
use lane_emden_core::{make_params, Error, Regime};
use proptest::prelude::*;

fn ball(n: u32, p: f64, eps: f64) -> BallSolution {
    solve_ball(&make_params(n, p, eps).unwrap(), &BallOptions::default()).unwrap()
}

fn ball_with(n: u32, p: f64, eps: f64, points_per_decade: f64) -> BallSolution {
    let opts = BallOptions { points_per_decade, ..BallOptions::default() };
    solve_ball(&make_params(n, p, eps).unwrap(), &opts).unwrap()
}

/// First zero of the radial solution of `-Δw = w³` in R³ with `w(0) = 1`,
/// by classical RK4 on `(w, r²w')`.
fn cubic_first_zero() -> f64 {
    let f = |r: f64, y: [f64; 2]| [y[1] / (r * r), -r * r * y[0] * y[0] * y[0]];
    let h = 1e-4;
    let r0 = 1e-3;
    let mut r = r0;
    let mut y = [1.0 - r0 * r0 / 6.0, -r0 * r0 * r0 / 3.0];
    loop {
        let k1 = f(r, y);
        let k2 = f(r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f(r + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        let next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if next[0] <= 0.0 {
            // Newton step from the last positive sample
            return r + y[0] * r * r / -y[1];
        }
        y = next;
        r += h;
    }
}

#[test]
fn symmetric_case_reduces_to_single_equation() {
    // n = 3, p = 3: the hyperbola point q_ε = 3 sits at ε = 1/6
    let prm = make_params(3, 3.0, 1.0 / 6.0).unwrap();
    assert!((prm.q_eps - 3.0).abs() < 1e-12);
    let sol = solve_ball(&prm, &BallOptions::default()).unwrap();
    assert!((sol.shoot_param - 1.0).abs() < 1e-10, "{}", sol.shoot_param);
    for i in 0..sol.profile.len() {
        assert!((sol.profile.u_vals[i] - sol.profile.v_vals[i]).abs() <= 1e-9 * sol.m_eps);
    }
    // u(x) = R^{α} w(R x) with α = 2/(q-1) = 1, so M = R
    let r = cubic_first_zero();
    assert!((sol.m_eps - r).abs() < 1e-6 * r, "{} vs {r}", sol.m_eps);
}

#[test]
fn boundary_and_scaling_invariants() {
    for (n, p, eps) in [(5u32, 2.0, 0.01), (5, 1.0, 0.01), (5, 5.0 / 3.0, 0.01), (6, 0.8, 0.02), (7, 1.2, 0.01)] {
        let sol = ball(n, p, eps);
        assert!(sol.lambda_relation_error().abs() < 1e-10, "({n},{p},{eps})");
        let pr = &sol.profile;
        assert_eq!(*pr.grid.last().unwrap(), 1.0);
        assert_eq!(sol.m_eps, pr.u_vals[0]);
        let last = pr.len() - 1;
        for i in 0..last {
            assert!(pr.u_vals[i] > 0.0 && pr.v_vals[i] > 0.0, "({n},{p},{eps}) at {}", pr.grid[i]);
        }
        assert!(pr.u_vals[last].abs() <= 1e-8 * sol.m_eps && pr.v_vals[last].abs() <= 1e-8 * pr.v_vals[0]);
        assert!(sol.boundary_residual.abs() <= 1e-8 * sol.m_eps);
    }
}

#[test]
fn energy_identity() {
    for (n, p, eps) in [(5u32, 2.0, 0.01), (5, 1.0, 0.01), (6, 0.8, 0.02)] {
        let e = energy(&ball(n, p, eps)).unwrap();
        assert!(e.identity_error < ENERGY_TOL, "({n},{p},{eps}) {e:?}");
        assert!((e.int_grad - e.int_u_q1).abs() < ENERGY_TOL * e.int_u_q1);
    }
}

#[test]
fn eval_matches_grid_and_rejects_outside() {
    let sol = ball(5, 2.0, 0.01);
    let k = sol.profile.len() / 2;
    let x = sol.profile.grid[k];
    let [u, du, v, dv] = sol.eval(x).unwrap();
    let pr = &sol.profile;
    assert!((u - pr.u_vals[k]).abs() < 1e-12 * sol.m_eps);
    assert!((v - pr.v_vals[k]).abs() < 1e-12 * pr.v_vals[0]);
    assert!((du - pr.du_vals[k]).abs() < 1e-9 * pr.du_vals[k].abs());
    assert!((dv - pr.dv_vals[k]).abs() < 1e-9 * pr.dv_vals[k].abs());
    assert!(matches!(sol.eval(1.5), Err(Error::Domain(_))));
}

#[test]
fn pohozaev_off_centre() {
    let sol = ball(5, 2.0, 0.01);
    let c = [0.3, 0.0, 0.0, 0.0, 0.0];
    let rec = pohozaev_check(&sol, &c, 0.2, 0, 1e-10).unwrap();
    assert!(rec.residual < 1e-4, "{rec:?}");
    assert!(rec.gradient_term.abs() > 1.0);
    // transverse direction and centred sphere vanish by parity
    assert_eq!(pohozaev_check(&sol, &c, 0.2, 1, 1e-10).unwrap().residual, 0.0);
    let centred = pohozaev_check(&sol, &[0.0; 5], 0.5, 0, 1e-10).unwrap();
    assert_eq!((centred.lhs, centred.rhs), (0.0, 0.0));
    assert!(matches!(pohozaev_check(&sol, &c, 0.8, 0, 1e-10), Err(Error::Domain(_))));
}

#[test]
fn pohozaev_residual_decreases_under_refinement() {
    let c = [0.3, 0.0, 0.0, 0.0, 0.0];
    let coarse = pohozaev_check(&ball_with(5, 2.0, 0.01, 20.0), &c, 0.2, 0, 1e-10).unwrap();
    let fine = pohozaev_check(&ball_with(5, 2.0, 0.01, 40.0), &c, 0.2, 0, 1e-10).unwrap();
    assert!(fine.residual < coarse.residual, "{} vs {}", fine.residual, coarse.residual);
}

#[test]
fn decay_constants_are_uniform_in_eps() {
    let fits: Vec<DecayFit> = [0.01, 0.005, 0.002].iter().map(|&e| check_decay(&ball(5, 2.0, e)).unwrap()).collect();
    for w in fits.windows(2) {
        let r = w[1].c_v / w[0].c_v;
        assert!(r < 2.0 && r > 0.5, "{fits:?}");
        let r = w[1].c_u / w[0].c_u;
        assert!(r < 2.0 && r > 0.5, "{fits:?}");
    }
    for (p, eps) in [(1.0, 0.01), (1.0, 0.002), (5.0 / 3.0, 0.01)] {
        let fit = check_decay(&ball(5, p, eps)).unwrap();
        assert!(fit.c_u > 0.0 && fit.c_v > 0.0 && fit.c_u.is_finite(), "p={p} {fit:?}");
    }
}

#[test]
fn scan_table_and_local_slopes() {
    // (5,2) is HIGH, κ = n/((n-2)p-2) + 1 = 9/4
    let eps = [0.02, 0.01, 0.005, 0.002];
    let scan = blowup_scan(5, 2.0, &eps, &BallOptions::default()).unwrap();
    assert_eq!(scan.regime, Regime::High);
    assert!((scan.predicted_slope - 4.0 / 9.0).abs() < 1e-15);
    assert_eq!(scan.rows.len(), 4);
    let m: Vec<f64> = scan.rows.iter().map(|r| r.m_eps.unwrap()).collect();
    assert!(m.windows(2).all(|w| w[1] > w[0]));
    // Cauchy differences of the compensated product shrink along the list
    let c: Vec<f64> = scan.rows.iter().map(|r| r.compensated.unwrap()).collect();
    let d: Vec<f64> = c.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{c:?}");
    // the local slopes increase towards 4/9
    let s: Vec<f64> = scan.rows.iter().filter_map(|r| r.slope_estimate).collect();
    assert!(s.windows(2).all(|w| w[1] > w[0]) && s.iter().all(|&x| x < 4.0 / 9.0), "{s:?}");
    assert!(scan.slope.unwrap() > 0.3);
}

#[test]
fn local_slopes_at_small_eps() {
    for (p, eps, target) in [(2.0, [1e-4, 5e-5], 4.0 / 9.0), (1.0, [1e-3, 5e-4], 0.5)] {
        let scan = blowup_scan(5, p, &eps, &BallOptions::default()).unwrap();
        let s = scan.rows[1].slope_estimate.unwrap();
        assert!((s - target).abs() < 0.1 * target, "p={p}: {s}");
    }
}

#[test]
fn scan_records_failed_rows() {
    let scan = blowup_scan_with(5, 2.0, &[0.01, 0.005], |prm| {
        if prm.eps < 0.008 {
            Err(Error::Shooting("synthetic".into()))
        } else {
            solve_ball(prm, &BallOptions::default())
        }
    })
    .unwrap();
    assert!(scan.rows[0].m_eps.is_some());
    assert!(scan.rows[1].error.as_deref().unwrap().contains("synthetic"));
    assert!(scan.slope.is_none());
    assert!(matches!(blowup_scan(5, 2.0, &[0.01, 0.02], &BallOptions::default()), Err(Error::Domain(_))));
}

#[test]
fn compensated_product_approaches_pohozaev_limit() {
    let ent = solve_entire(&make_params(5, 2.0, 0.0).unwrap(), &EntireOptions::default()).unwrap();
    let sq = sobolev_quotient(&ent).unwrap();
    let limit = pohozaev_limit(&ent, &sq).unwrap();
    assert!((limit - 243.4).abs() < 0.5, "{limit}");
    let gaps: Vec<f64> = [1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&e| ((compensated(5, 2.0, e, ball(5, 2.0, e).m_eps) - limit) / limit).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]) && gaps[2] < 0.05, "{gaps:?}");
    let low = solve_entire(&make_params(5, 1.0, 0.0).unwrap(), &EntireOptions::default()).unwrap();
    assert!(matches!(pohozaev_limit(&low, &sobolev_quotient(&low).unwrap()), Err(Error::Regime(_))));
}

#[test]
fn energy_quotient_approaches_sobolev_constant() {
    let ent = solve_entire(&make_params(5, 2.0, 0.0).unwrap(), &EntireOptions::default()).unwrap();
    let s = sobolev_quotient(&ent).unwrap().s;
    let ratios: Vec<f64> = [0.01, 0.002, 1e-4].iter().map(|&e| ball(5, 2.0, e).energy_quotient / s).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]) && ratios.iter().all(|&r| r > 1.0), "{ratios:?}");
    assert!(ratios[1] < 1.05 && ratios[2] < 1.01, "{ratios:?}");
}

#[test]
fn green_approximation_of_v() {
    let ent = solve_entire(&make_params(5, 2.0, 0.0).unwrap(), &EntireOptions::default()).unwrap();
    let a_u0 = ent.a_u0.value().unwrap();
    let shells = [0.3, 0.5, 0.7];
    let devs: Vec<f64> = [0.02, 0.01, 0.005, 0.002]
        .iter()
        .map(|&e| v_green_trend(&ball(5, 2.0, e), a_u0, &shells).unwrap().max_deviation)
        .collect();
    assert!(devs.windows(2).all(|w| w[1] < w[0]) && devs[3] < 0.1, "{devs:?}");

    let coarse = ball(5, 2.0, 0.002);
    assert!(matches!(v_green_approx(&coarse, a_u0, &shells), Err(Error::InsufficientBlowup(_))));
    let fine = ball(5, 2.0, 1e-4);
    assert!(fine.lambda_eps >= MIN_LAMBDA);
    let v = v_green_approx(&fine, a_u0, &shells).unwrap();
    assert!(v.max_deviation < 0.02, "{v:?}");
    // the u side converges more slowly but along the same monotone trend
    let a_v0 = ent.a_v0.value().unwrap();
    let udev: Vec<f64> = [1e-4, 3e-5, 1e-5]
        .iter()
        .map(|&e| u_green_approx(&ball(5, 2.0, e), a_v0, &shells).unwrap().max_deviation)
        .collect();
    assert!(udev.windows(2).all(|w| w[1] < w[0]) && udev[1] < 0.1, "{udev:?}");
    assert!(matches!(v_green_trend(&fine, a_u0, &[1.0]), Err(Error::Domain(_))));
}

#[test]
fn low_regime_green_approximation() {
    let ent = solve_entire(&make_params(5, 1.0, 0.0).unwrap(), &EntireOptions::default()).unwrap();
    let sol = ball(5, 1.0, 0.002);
    assert!(sol.lambda_eps >= MIN_LAMBDA);
    let g = v_green_approx(&sol, ent.a_u0.value().unwrap(), &[0.3, 0.5, 0.7]).unwrap();
    assert!(g.max_deviation < 0.1, "{g:?}");
    assert!(matches!(u_green_approx(&sol, 1.0, &[0.5]), Err(Error::Regime(_))));
}

#[test]
fn rejects_critical_eps() {
    let prm = make_params(5, 2.0, 0.0).unwrap();
    assert!(solve_ball(&prm, &BallOptions::default()).is_err());
}

#[test]
fn solution_serializes() {
    let sol = ball(5, 2.0, 0.01);
    let json = serde_json::to_string(&sol).unwrap();
    let back: BallSolution = serde_json::from_str(&json).unwrap();
    assert_eq!(back.m_eps, sol.m_eps);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ball_invariants(t in 0.05f64..0.95, eps in 0.003f64..0.03) {
        // n = 5, p across LOW_B .. HIGH
        let p = 2.0 / 3.0 + t * (7.0 / 3.0 - 2.0 / 3.0);
        let Ok(prm) = make_params(5, p, eps) else { return Ok(()); };
        let sol = solve_ball(&prm, &BallOptions::default()).unwrap();
        prop_assert!(sol.lambda_relation_error().abs() < 1e-10);
        prop_assert!(sol.energy.identity_error < ENERGY_TOL, "{:?}", sol.energy);
        prop_assert!(sol.boundary_residual.abs() <= 1e-8 * sol.m_eps);
        prop_assert!(sol.m_eps > 1.0);
    }
}
