use core::f64::consts::PI;
use lane_emden_core::specfun::{
    beta_fn, check_power_bound, check_power_expansion, digamma, gamma_fn, hyp2f1, ln_beta, ln_gamma,
    sphere_measure, PowerClause,
};
use lane_emden_core::Error;
use proptest::prelude::*;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Direct hypergeometric series, summed until the terms stop mattering.
fn series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 0..200_000 {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    while (a - b).abs() > 1e-16 * a {
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    a
}

#[test]
fn gamma_known_values() {
    assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-14);
    assert!(rel(gamma_fn(5.0).unwrap(), 24.0) < 1e-14);
    assert!(rel(gamma_fn(2.5).unwrap(), 0.75 * PI.sqrt()) < 1e-14);
    // ln Γ(100) = ln(99!)
    let ln_fact: f64 = (1..100).map(|k| (k as f64).ln()).sum();
    assert!(rel(ln_gamma(100.0).unwrap(), ln_fact) < 1e-14);
    assert!(gamma_fn(200.0).unwrap().is_infinite());
    assert!(matches!(gamma_fn(0.0), Err(Error::Domain(_))));
    assert!(matches!(gamma_fn(-1.5), Err(Error::Domain(_))));
}

#[test]
fn beta_examples() {
    assert!(rel(beta_fn(1.0, 1.0).unwrap(), 1.0) < 1e-14);
    assert!(rel(beta_fn(3.0, 1.0).unwrap(), 1.0 / 3.0) < 1e-14);
    assert!(rel(beta_fn(0.5, 0.5).unwrap(), PI) < 1e-14);
    assert!(rel(beta_fn(3.0, 0.5).unwrap(), 16.0 / 15.0) < 1e-14);
    // Half-integer arguments near 200 stay finite through the log route.
    let big = beta_fn(199.5, 200.5).unwrap();
    assert!(big > 0.0 && big.is_finite());
    assert!(rel(big.ln(), ln_beta(199.5, 200.5).unwrap()) < 1e-12);
}

#[test]
fn sphere_measures() {
    assert!(rel(sphere_measure(2).unwrap(), 2.0 * PI) < 1e-15);
    assert!(rel(sphere_measure(3).unwrap(), 4.0 * PI) < 1e-15);
    assert!(rel(sphere_measure(5).unwrap(), 8.0 * PI * PI / 3.0) < 1e-14);
    assert!((sphere_measure(5).unwrap() - 26.3189).abs() < 1e-4);
    assert!(matches!(sphere_measure(1), Err(Error::Domain(_))));
}

#[test]
fn digamma_values() {
    assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-14);
    assert!((digamma(0.5).unwrap() + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-14);
    // ψ(n) = H_{n-1} - γ
    let h: f64 = (1..10).map(|k| 1.0 / k as f64).sum();
    assert!((digamma(10.0).unwrap() - (h - EULER_GAMMA)).abs() < 1e-14);
}

#[test]
fn hyp2f1_elementary_cases() {
    for z in [0.1f64, 0.5, 0.7, 0.95, 0.999] {
        // -ln(1-z)/z: the logarithmic connection with c - a - b = 0
        let log_form = -(-z).ln_1p() / z;
        assert!(rel(hyp2f1(1.0, 1.0, 2.0, z).unwrap(), log_form) < 1e-13, "z={z}");
        // (1-z)^{-a}: c - a - b = -a
        assert!(rel(hyp2f1(0.7, 1.3, 1.3, z).unwrap(), (1.0 - z).powf(-0.7)) < 1e-12, "z={z}");
        // 1/(1-z): c - a - b = -1
        assert!(rel(hyp2f1(1.0, 1.5, 1.5, z).unwrap(), 1.0 / (1.0 - z)) < 1e-12, "z={z}");
    }
}

#[test]
fn hyp2f1_elliptic_k() {
    // K(k) = π/(2 AGM(1, k')) = (π/2) ₂F₁(1/2, 1/2; 1; k²)
    for k in [0.3f64, 0.8, 0.99, 0.999_999] {
        let kp = (1.0 - k * k).sqrt();
        let oracle = PI / (2.0 * agm(1.0, kp));
        let f = PI / 2.0 * hyp2f1(0.5, 0.5, 1.0, k * k).unwrap();
        assert!(rel(f, oracle) < 1e-12, "k={k}: {f} vs {oracle}");
    }
}

#[test]
fn hyp2f1_rejects_outside_unit_interval() {
    assert!(hyp2f1(1.0, 1.0, 2.0, 1.0).is_err());
    assert!(hyp2f1(1.0, 1.0, 2.0, -0.5).is_err());
}

#[test]
fn power_bound_examples() {
    let b = check_power_bound(1.0, 2.0, 1.0).unwrap();
    assert_eq!(b.clause, PowerClause::Sublinear);
    assert!((b.lhs - 1.0).abs() < 1e-15 && (b.upper - 1.0).abs() < 1e-15 && b.ok);

    let b = check_power_bound(2.0, 3.0, 1.0).unwrap();
    assert_eq!(b.clause, PowerClause::Superquadratic);
    assert!((b.lhs + 1.0).abs() < 1e-14 && (b.lower + 1.0).abs() < 1e-14 && b.ok);

    let b = check_power_bound(0.5, 4.0, 3.0).unwrap();
    assert!((b.lhs - 1.0).abs() < 1e-14 && (b.upper - 3f64.sqrt()).abs() < 1e-14 && b.ok);

    assert!(matches!(check_power_bound(1.5, 1.0, 2.0), Err(Error::Domain(_))));
    assert!(matches!(check_power_bound(1.5, -1.0, 0.0), Err(Error::Domain(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn beta_is_symmetric(x in 0.05f64..150.0, y in 0.05f64..150.0) {
        let (a, b) = (beta_fn(x, y).unwrap(), beta_fn(y, x).unwrap());
        prop_assert!(a == b || rel(a, b) < 1e-14);
    }

    #[test]
    fn gamma_recurrence(x in 0.1f64..100.0) {
        let lhs = gamma_fn(x + 1.0).unwrap();
        let rhs = x * gamma_fn(x).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-12, "x={x}: {lhs} vs {rhs}");
    }

    #[test]
    fn digamma_recurrence(x in 0.05f64..50.0) {
        let d = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
        prop_assert!((d - 1.0 / x).abs() < 1e-12 * (1.0 / x).max(1.0));
    }

    #[test]
    fn hyp2f1_matches_series(a in 0.1f64..3.0, b in 0.1f64..3.0, c in 0.2f64..4.0, z in 0.0f64..0.9) {
        let f = hyp2f1(a, b, c, z).unwrap();
        let s = series(a, b, c, z);
        prop_assert!(rel(f, s) < 1e-9, "({a}, {b}, {c}, {z}): {f} vs {s}");
    }

    #[test]
    fn power_bound_holds(p in 0.01f64..6.0, a in 1e-3f64..1e3, t in 0.0f64..=1.0) {
        let r = check_power_bound(p, a, t * a).unwrap();
        prop_assert!(r.ok, "{r:?}");
        prop_assert!(r.lower <= r.upper);
    }

    #[test]
    fn power_expansion_holds(p in 0.1f64..5.0, a in 1e-2f64..1e2, t in -0.99f64..0.99, eta in 0.05f64..0.95) {
        let r = check_power_expansion(p, a, t * eta * a, eta).unwrap();
        prop_assert!(r.ok, "{r:?}");
    }
}
