use lane_emden_core::specfun::sphere_measure;
use lane_emden_core::sphere::{axisymmetric, gauss_legendre, sphere_integral};
use proptest::prelude::*;

#[test]
fn gauss_legendre_exact_for_polynomials() {
    let (x, w) = gauss_legendre(8);
    let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
    assert!((q - 2.0 / 15.0).abs() < 1e-14);
    assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
}

#[test]
fn moments_of_coordinates() {
    for n in 3..=6u32 {
        let s = sphere_measure(n).unwrap();
        let nf = n as f64;
        let x2 = sphere_integral(n, |x| x[0] * x[0], 1e-12).unwrap();
        assert!((x2.value / (s / nf) - 1.0).abs() < 1e-11, "n={n}");
        let x4 = sphere_integral(n, |x| x[1].powi(4), 1e-12).unwrap();
        assert!((x4.value / (3.0 * s / (nf * (nf + 2.0))) - 1.0).abs() < 1e-11, "n={n}");
        let mixed = sphere_integral(n, |x| (x[0] * x[n as usize - 1]).powi(2), 1e-12).unwrap();
        assert!((mixed.value / (s / (nf * (nf + 2.0))) - 1.0).abs() < 1e-11, "n={n}");
        let c4 = axisymmetric(n, |c, _| c.powi(4), 1e-12).unwrap();
        assert!((c4.value / (3.0 * s / (nf * (nf + 2.0))) - 1.0).abs() < 1e-11, "n={n}");
    }
}

#[test]
fn constant_gives_measure() {
    for n in 2..=6u32 {
        let r = sphere_integral(n, |_| 1.0, 1e-12).unwrap();
        assert!((r.value / sphere_measure(n).unwrap() - 1.0).abs() < 1e-13);
    }
}

#[test]
fn error_claim_is_honest_when_budget_runs_out() {
    for n in 7..=9u32 {
        let r = sphere_integral(n, |x| x[0] * x[0], 1e-12).unwrap();
        let exact = sphere_measure(n).unwrap() / n as f64;
        assert!(r.converged || (r.value - exact).abs() <= r.abs_error, "n={n}: {r:?}");
    }
    // the axisymmetric rule has no such limit
    let c = axisymmetric(9, |c, _| c * c, 1e-12).unwrap();
    assert!(c.converged && (c.value * 9.0 / sphere_measure(9).unwrap() - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quadratic_forms(n in 3u32..7, a in prop::collection::vec(-1.0f64..1.0, 7)) {
        let a = &a[..n as usize];
        let lin = sphere_integral(n, |x| x.iter().zip(a).map(|(x, a)| x * a).sum::<f64>(), 1e-12).unwrap();
        let norm2: f64 = a.iter().map(|a| a * a).sum();
        let quad = sphere_integral(n, |x| x.iter().zip(a).map(|(x, a)| x * a).sum::<f64>().powi(2), 1e-12).unwrap();
        let s = sphere_measure(n).unwrap();
        prop_assert!(lin.value.abs() < 1e-12 * s);
        prop_assert!((quad.value - norm2 * s / n as f64).abs() < 1e-11 * s);
    }
}
