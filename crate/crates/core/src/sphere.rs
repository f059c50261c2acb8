//! Quadrature on the unit sphere `S^{n-1}` with order doubling.

use crate::error::{domain, Result};
use crate::quadrature::{neumaier_sum, QuadResult};
use crate::specfun::sphere_measure;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; k];
    let mut w = vec![0.0; k];
    let m = (k + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pk = if k == 0 { 1.0 } else if k == 1 { z } else { p1 };
            let pkm1 = if k == 1 { 1.0 } else { p0 };
            dp = k as f64 * (z * pk - pkm1) / (z * z - 1.0);
            let dz = pk / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[k - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[k - 1 - i] = w[i];
    }
    (x, w)
}

/// `∫_{S^{n-1}} g` for an integrand depending only on the angle `φ` to a
/// fixed axis; `g` receives `(cos φ, sin φ)`.
pub fn axisymmetric<G: FnMut(f64, f64) -> f64>(n: u32, mut g: G, tol: f64) -> Result<QuadResult> {
    if n < 3 {
        return Err(domain!("axisymmetric sphere rule needs n >= 3, got {n}"));
    }
    let ring = sphere_measure(n - 1)?;
    let e = (n - 2) as i32;
    let mut evals = 0u64;
    let mut rule = |k: usize| {
        let (x, w) = gauss_legendre(k);
        let mut vals = Vec::with_capacity(k);
        let mut abs = Vec::with_capacity(k);
        for (xi, wi) in x.iter().zip(&w) {
            let phi = 0.5 * PI * (xi + 1.0);
            let (s, c) = phi.sin_cos();
            let v = wi * g(c, s) * s.powi(e);
            vals.push(v);
            abs.push(v.abs());
        }
        (0.5 * PI * ring * neumaier_sum(vals), 0.5 * PI * ring * neumaier_sum(abs))
    };
    let mut k = 16;
    let (mut prev, _) = rule(k);
    evals += k as u64;
    loop {
        k *= 2;
        let (cur, scale) = rule(k);
        evals += k as u64;
        let diff = (cur - prev).abs();
        if diff <= tol * cur.abs().max(scale) || k >= 4096 {
            return Ok(QuadResult { value: cur, abs_error: diff, n_evals: evals, converged: diff <= tol * cur.abs().max(scale) });
        }
        prev = cur;
    }
}

/// `∫_{S^{n-1}} f` by a product rule in hyperspherical angles: Gauss-Legendre
/// in the polar angles and the trapezoid rule in the azimuth. The order grows
/// geometrically until two successive values agree to `tol` (relative to the
/// larger of the value and `∫|f|`), or until the next rule would exceed
/// 8·10⁶ evaluations, in which case `converged` is false.
pub fn sphere_integral<F: FnMut(&[f64]) -> f64>(n: u32, mut f: F, tol: f64) -> Result<QuadResult> {
    if n < 2 {
        return Err(domain!("sphere_integral needs n >= 2, got {n}"));
    }
    let dim = n as usize;
    let mut evals = 0u64;
    let mut point = vec![0.0; dim];
    let mut rule = |k: usize, evals: &mut u64| {
        let (x, w) = gauss_legendre(k);
        let polar = dim - 2;
        let naz = 2 * k;
        let mut idx = vec![0usize; polar];
        let mut vals = Vec::new();
        let mut abs = Vec::new();
        loop {
            let mut weight = 1.0;
            let mut sprod = 1.0;
            for (a, &i) in idx.iter().enumerate() {
                let phi = 0.5 * PI * (x[i] + 1.0);
                let (s, c) = phi.sin_cos();
                point[a] = sprod * c;
                weight *= 0.5 * PI * w[i] * s.powi((dim - 2 - a) as i32);
                sprod *= s;
            }
            for j in 0..naz {
                let th = 2.0 * PI * j as f64 / naz as f64;
                let (s, c) = th.sin_cos();
                point[dim - 2] = sprod * c;
                point[dim - 1] = sprod * s;
                let v = weight * (2.0 * PI / naz as f64) * f(&point);
                vals.push(v);
                abs.push(v.abs());
            }
            *evals += naz as u64;
            // odometer over the polar indices
            let mut a = 0;
            while a < polar {
                idx[a] += 1;
                if idx[a] < k {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if a == polar {
                break;
            }
        }
        (neumaier_sum(vals), neumaier_sum(abs))
    };
    let budget = 8_000_000usize;
    let cost = |k: usize| k.pow(dim as u32 - 2) * 2 * k;
    let mut k = 8;
    let (mut prev, _) = rule(k, &mut evals);
    let mut diff = f64::INFINITY;
    loop {
        // growth by 3/2 keeps a few refinements affordable in higher dimensions
        let next = k + k / 2;
        if cost(next) > budget {
            return Ok(QuadResult { value: prev, abs_error: diff, n_evals: evals, converged: false });
        }
        k = next;
        let (cur, scale) = rule(k, &mut evals);
        diff = (cur - prev).abs();
        if diff <= tol * cur.abs().max(scale) {
            return Ok(QuadResult { value: cur, abs_error: diff, n_evals: evals, converged: true });
        }
        prev = cur;
    }
}
