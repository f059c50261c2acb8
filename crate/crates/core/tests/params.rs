use core::f64::consts::PI;
use lane_emden_core::params::{c_n, gamma_constants, q_of, REGIME_TIE};
use lane_emden_core::{make_params, Error, Regime};
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn n5_p1_critical() {
    let s = make_params(5, 1.0, 0.0).unwrap();
    assert!(close(s.q0, 9.0, 1e-13));
    assert!(close(s.alpha0, 0.5, 1e-13));
    assert!(close(s.beta0, 2.5, 1e-13));
    assert_eq!(s.q_eps, s.q0);
    assert_eq!(s.regime, Regime::LowB);
}

#[test]
fn n6_p2_is_diagonal() {
    let s = make_params(6, 2.0, 0.0).unwrap();
    assert!(close(s.q0, 2.0, 1e-13));
    assert_eq!(s.regime, Regime::High);
    assert!(s.gamma1.is_none());
}

#[test]
fn subcritical_q() {
    let s = make_params(5, 1.0, 0.01).unwrap();
    assert!(close(s.q_eps, 1.0 / 0.11 - 1.0, 1e-12));
    assert!(s.q_eps < s.q0);
}

#[test]
fn c_n_values() {
    assert!(close(c_n(3).unwrap(), 1.0 / (4.0 * PI), 1e-15));
    assert!(close(c_n(5).unwrap(), 1.0 / (8.0 * PI * PI), 1e-15));
    assert!(c_n(2).is_err());
}

#[test]
fn gamma_examples() {
    let (g1, _) = gamma_constants(5, 1.0).unwrap();
    assert!(close(g1, 1.0 / (16.0 * PI * PI), 1e-14));
    assert!((g1 - 0.006_332_6).abs() < 1e-7);
    let (_, g2) = gamma_constants(5, 4.0 / 3.0).unwrap();
    assert!(g2 < 0.0);
    assert!(matches!(gamma_constants(5, 5.0 / 3.0), Err(Error::Pole(_))));
    assert!(matches!(gamma_constants(5, 2.0 / 3.0), Err(Error::Pole(_))));
    // simple pole at p = n/(n-2): residue c_n^p / ((n-2)p - 2)
    let p = 5.0 / 3.0 - 1e-9;
    let (g1, _) = gamma_constants(5, p).unwrap();
    let c = c_n(5).unwrap();
    assert!(close(g1 * (5.0 - 3.0 * p), c.powf(p) / (3.0 * p - 2.0), 1e-6));
}

#[test]
fn regime_boundaries() {
    for n in 5..=12u32 {
        let d = n as f64 - 2.0;
        assert_eq!(Regime::classify(n, n as f64 / d), Regime::Log);
        assert_eq!(Regime::classify(n, (n as f64 - 1.0) / d), Regime::LowA);
        assert_eq!(Regime::classify(n, (n as f64 - 1.0) / d - 1e-6), Regime::LowB);
        assert_eq!(Regime::classify(n, n as f64 / d + 1e-6), Regime::High);
        // a tie within the snapping tolerance resolves to LOG
        assert_eq!(Regime::classify(n, n as f64 / d * (1.0 + 0.5 * REGIME_TIE)), Regime::Log);
    }
}

#[test]
fn rejects_bad_inputs() {
    assert!(matches!(make_params(2, 1.0, 0.0), Err(Error::Domain(_))));
    assert!(matches!(make_params(5, 0.5, 0.0), Err(Error::Domain(_))));
    assert!(matches!(make_params(5, 2.5, 0.0), Err(Error::Domain(_))));
    assert!(matches!(make_params(5, 1.0, -0.1), Err(Error::Domain(_))));
    // ε large enough to push q_ε below p
    assert!(matches!(make_params(5, 2.0, 0.2), Err(Error::SupercriticalOrder { .. })));
}

#[test]
fn json_field_names() {
    let v = serde_json::to_string(&make_params(5, 1.0, 0.01).unwrap()).unwrap();
    for key in ["\"q_eps\"", "\"alpha_eps\"", "\"c_n\"", "\"gamma1\"", "\"regime\":\"LOW_B\""] {
        assert!(v.contains(key), "{v}");
    }
}

fn admissible() -> impl Strategy<Value = (u32, f64, f64)> {
    (3u32..=14, 0.001f64..0.999, 0.0f64..0.05).prop_filter_map("q_eps > p", |(n, t, e)| {
        let d = n as f64 - 2.0;
        let (lo, hi) = (2.0 / d, (n as f64 + 2.0) / d);
        let p = lo + t * (hi - lo);
        make_params(n, p, e).ok().map(|_| (n, p, e))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hyperbola_resubstitution((n, p, e) in admissible()) {
        let s = make_params(n, p, e).unwrap();
        let lhs = 1.0 / (p + 1.0) + 1.0 / (s.q_eps + 1.0);
        let rhs = (n as f64 - 2.0) / n as f64 + e;
        prop_assert!((lhs - rhs).abs() < 1e-12);
        prop_assert!(close(s.q_eps, q_of(n, p, e).unwrap(), 1e-15));
    }

    #[test]
    fn scaling_identities((n, p, e) in admissible()) {
        let s = make_params(n, p, e).unwrap();
        let nf = n as f64;
        prop_assert!(close(s.alpha0 * (s.q0 + 1.0), nf, 1e-12));
        prop_assert!(close(s.beta0 * (p + 1.0), nf, 1e-12));
        let pq = p * s.q_eps - 1.0;
        prop_assert!(pq > 0.0);
        let a = s.alpha_eps * (s.q_eps + 1.0) * pq;
        prop_assert!(close(a, 2.0 * (p + 1.0) * (s.q_eps + 1.0), 1e-12));
        let b = s.beta_eps * (p + 1.0) * pq;
        prop_assert!(close(b, 2.0 * (s.q_eps + 1.0) * (p + 1.0), 1e-12));
    }

    #[test]
    fn gamma_signs((n, p, _e) in admissible()) {
        let s = make_params(n, p, 0.0).unwrap();
        if let (Some(g1), Some(g2)) = (s.gamma1, s.gamma2) {
            prop_assert!(g1 > 0.0);
            if s.regime == Regime::LowA {
                prop_assert!(g2 < 0.0);
            }
        }
    }
}
