use lane_emden_core::halfspace::*;
use lane_emden_core::{Error, Regime};
use proptest::prelude::*;

fn grid(regime: Regime) -> Vec<(u32, f64)> {
    (5..=12u32).flat_map(|n| regime_grid(n, regime, 5).unwrap().into_iter().map(move |p| (n, p))).collect()
}

#[test]
fn k1_examples() {
    let k = kernel_k1(5, 1.0, 1.0, 1.0).unwrap();
    assert!((k - 5f64.powf(-1.5)).abs() < 1e-15);
    assert!((k - 0.089_442_7).abs() < 1e-7);
    let k = kernel_k1(5, 1.0, 2.0, 0.0).unwrap();
    assert!((k - 5f64.powf(-1.5)).abs() < 1e-15);
    assert!(matches!(kernel_k1(5, 1.0, 0.0, 1.0), Err(Error::Singularity(_))));
}

#[test]
fn k2_examples() {
    let p = 4.0 / 3.0;
    let fused = kernel_k2(5, p, 1.0, 1.0).unwrap();
    let parts = kernel_k2_parts(5, p, 1.0, 1.0).unwrap();
    assert!((fused - parts.iter().sum::<f64>()).abs() < 1e-14);
    // at t = 0 both distances coincide and K₁ reduces to ρ^{-(n-2)p}
    let k1 = kernel_k1(5, p, 2.0, 0.0).unwrap();
    assert!((k1 - 5f64.powi(-2)).abs() < 1e-15);
}

#[test]
fn rhs_as0_closed_form() {
    let (closed, quad) = rhs_as0(5, 1.0).unwrap();
    assert!((closed + 1.0 / 24.0).abs() < 1e-14);
    assert!((quad.value + 1.0 / 24.0).abs() < 1e-10, "{quad:?}");
    assert!(rhs_as0(5, 1.3).unwrap().0 < 0.0);
}

#[test]
fn rhs_closed_forms_match_quadrature_on_grid() {
    for (n, p) in grid(Regime::LowB) {
        let (c, q) = rhs_as0(n, p).unwrap();
        assert!((c - q.value).abs() < 1e-8 * c.abs().max(1e-300) + q.abs_error, "({n},{p}) {c} {q:?}");
    }
    for (n, p) in grid(Regime::LowA) {
        let (c, q) = rhs_as1(n, p).unwrap();
        assert!((c - q.value).abs() < 1e-8 * c.abs() + q.abs_error, "({n},{p}) {c} {q:?}");
    }
}

#[test]
fn as0_examples() {
    let r = verify_as0(5, 1.0, 1e-8).unwrap();
    assert_eq!(r.verdict, Verdict::Certified);
    assert!(r.margin >= 1.0 / 32.0 - 1e-6, "{}", r.margin);
    assert!(r.term("V_L").is_some() && r.term("V_R_quadrature").is_some());
    for (n, p) in [(6, 0.9), (5, 1.3)] {
        assert_eq!(verify_as0(n, p, 1e-8).unwrap().verdict, Verdict::Certified, "({n},{p})");
    }
}

#[test]
fn as0_certified_on_grid() {
    for (n, p) in grid(Regime::LowB) {
        let r = verify_as0(n, p, TOL_LOW_B).unwrap();
        assert_eq!(r.verdict, Verdict::Certified, "{r:?}");
        assert!(r.margin > r.error_budget);
    }
}

#[test]
fn as1_examples() {
    for (n, p, tol) in [(5, 4.0 / 3.0, 1e-7), (7, 1.2, 1e-7), (100, 99.0 / 98.0, 1e-6)] {
        let r = verify_as1(n, p, tol).unwrap();
        assert_eq!(r.verdict, Verdict::Certified, "{r:?}");
    }
    assert!(verify_b50(100, 99.0 / 98.0).unwrap());
}

#[test]
fn as1_and_master_on_grid() {
    for (n, p) in grid(Regime::LowA) {
        let a = verify_as1(n, p, TOL_LOW_A).unwrap();
        assert_eq!(a.verdict, Verdict::Certified, "{a:?}");
        let m = verify_master(n, p, TOL_LOW_A).unwrap();
        if m.verdict == Verdict::Certified {
            assert_eq!(a.verdict, Verdict::Certified);
        }
    }
    for (n, p) in [(5, 4.0 / 3.0), (12, 1.15)] {
        assert_eq!(verify_master(n, p, 1e-7).unwrap().verdict, Verdict::Certified, "({n},{p})");
    }
}

#[test]
fn bound_lemmas_on_grid() {
    for (n, p) in grid(Regime::LowA) {
        let x1 = compute_x1(n, p, TOL_LOW_A).unwrap();
        assert!(x1.value + x1.abs_error < x1_bound(n, p).unwrap(), "X1 ({n},{p})");
        let x2 = compute_x2(n, p, TOL_LOW_A).unwrap();
        assert!(-x2.total.value + x2.total.abs_error < neg_x2_bound(n, p).unwrap(), "X2 ({n},{p})");
        let x3 = compute_x3(n, p, TOL_LOW_A).unwrap();
        assert!(x3.value + x3.abs_error < x3_bound(n, p).unwrap(), "X3 ({n},{p})");
        let pieces = x2.range_01.value + x2.range_12.value + x2.range_2inf.value;
        assert!((pieces - x2.total.value).abs() <= x2.total.abs_error + 1e-15);
    }
}

#[test]
fn x1_folded_and_unfolded_agree() {
    for (n, p) in [(5, 4.0 / 3.0), (8, 1.2), (12, 1.15)] {
        let (a, b) = x1_fold_diagnostic(n, p, TOL_LOW_A).unwrap();
        assert!((a.value - b.value).abs() <= a.abs_error + b.abs_error, "({n},{p}) {a:?} {b:?}");
    }
}

#[test]
fn y_values() {
    // B(3, 3/2) = Γ(3)Γ(3/2)/Γ(9/2) = 16/105
    let y = compute_y(5, 4.0 / 3.0).unwrap();
    assert!((y.value - 16.0 / 105.0).abs() < 1e-15);
    assert_eq!(y.abs_error, 0.0);
    let p = 99.0 / 98.0;
    assert!(ln_y(100, p).unwrap() >= y_lower_bound(100).ln());
}

#[test]
fn b50_cases() {
    assert!(verify_b50(100, 100.0 / 98.0 - 1e-9).unwrap());
    assert!(matches!(verify_b50(99, 98.0 / 97.0), Err(Error::Domain(_))));
}

#[test]
fn precondition_errors() {
    assert!(matches!(verify_as1(4, 1.6, 1e-7), Err(Error::Domain(_))));
    assert!(matches!(verify_as0(5, 4.0 / 3.0, 1e-8), Err(Error::Regime(_))));
    assert!(matches!(verify_as1(5, 1.0, 1e-7), Err(Error::Regime(_))));
    assert!(matches!(lhs_as0(5, 1.0, 0.0), Err(Error::Domain(_))));
}

#[test]
fn inflated_budget_is_inconclusive() {
    let r = verify_as0(5, 1.0, 1e-8).unwrap();
    let big = r.with_inflated_budget(2.0 * r.margin / r.error_budget);
    assert_eq!(big.verdict, Verdict::Inconclusive);
    assert_eq!(Verdict::from_margin(-1.0, 0.5), Verdict::Failed);
}

#[test]
fn report_serializes() {
    let r = verify_as0(5, 1.0, 1e-8).unwrap();
    let s = serde_json::to_string(&r).unwrap();
    assert!(s.contains("\"verdict\":\"CERTIFIED\"") && s.contains("\"which\":\"as0\""), "{s}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn fold_consistency(n in 5u32..=12, t in 0.02f64..0.98) {
        let d = n as f64 - 2.0;
        let p = 2.0 / d + t * (1.0 / d);
        let (a, b) = fold_diagnostic(n, p, TOL_LOW_B).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.abs_error + b.abs_error, "({n},{p}) {a:?} {b:?}");
    }

    #[test]
    fn tighter_tolerance_never_flips(n in 5u32..=9, t in 0.02f64..0.98) {
        let d = n as f64 - 2.0;
        let p = 2.0 / d + t * (1.0 / d);
        let coarse = verify_as0(n, p, 1e-7).unwrap();
        let fine = verify_as0(n, p, 1e-8).unwrap();
        if coarse.verdict == Verdict::Certified {
            prop_assert_ne!(fine.verdict, Verdict::Failed);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn k1_linear_case(n in 3u32..=12, r in 0.0f64..10.0, t in 0.0f64..10.0) {
        prop_assume!(r > 1e-3 || (t - 1.0).abs() > 1e-3);
        let k = kernel_k1(n, 1.0, r, t).unwrap();
        let exact = (r * r + (t + 1.0) * (t + 1.0)).powf(-0.5 * (n as f64 - 2.0));
        prop_assert!((k - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn k1_nonnegative(n in 5u32..=12, s in 0.0f64..1.0, r in 0.0f64..10.0, t in 0.0f64..10.0) {
        prop_assume!(r > 1e-3 || (t - 1.0).abs() > 1e-3);
        let d = n as f64 - 2.0;
        let p = 2.0 / d + s * 2.0 / d;
        prop_assert!(kernel_k1(n, p, r, t).unwrap() >= 0.0);
    }

    #[test]
    fn k2_parts_match_fused(n in 5u32..=12, s in 0.01f64..0.99, r in 0.05f64..5.0, t in 0.0f64..5.0) {
        let d = n as f64 - 2.0;
        let p = (n as f64 - 1.0) / d + s / d;
        let fused = kernel_k2(n, p, r, t).unwrap();
        let parts = kernel_k2_parts(n, p, r, t).unwrap();
        let scale: f64 = parts.iter().map(|x| x.abs()).sum();
        prop_assert!((fused - parts.iter().sum::<f64>()).abs() <= 1e-11 * scale);
    }
}
