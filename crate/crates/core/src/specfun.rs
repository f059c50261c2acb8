//! Gamma and Beta functions, sphere measures and the elementary
//! power-difference bounds.

use crate::error::{domain, Result};
use core::f64::consts::PI;
use num_traits::Float;
use serde::{Deserialize, Serialize};

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

/// Lanczos sum for `Γ(z + 1)`, `z >= -0.5`.
fn lanczos_sum(z: f64) -> f64 {
    let mut s = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (z + k as f64);
    }
    s
}

/// `Γ(x)` for `x > 0`. Returns `+inf` once the value exceeds the `f64` range
/// (`x > 171.62`); use [`ln_gamma`] there.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain!("gamma_fn needs a finite positive argument, got {x}"));
    }
    Ok(gamma_pos(x))
}

fn gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        return gamma_pos(x + 1.0) / x;
    }
    if x == x.floor() && x <= 23.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // t^(z+1/2) e^-t, split in two halves so the power cannot overflow early.
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * ((-t).exp() * half) * lanczos_sum(z)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain!("ln_gamma needs a finite positive argument, got {x}"));
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    if x < 20.0 {
        return gamma_pos(x).ln();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// `B(x, y) = Γ(x)Γ(y)/Γ(x+y)`, evaluated through log-Gamma when the
/// direct product would leave the `f64` range.
pub fn beta_fn(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(domain!("beta_fn needs positive arguments, got ({x}, {y})"));
    }
    let (a, b) = if x <= y { (x, y) } else { (y, x) };
    if a + b < 150.0 {
        return Ok(gamma_pos(a) * (gamma_pos(b) / gamma_pos(a + b)));
    }
    Ok(ln_beta_pos(a, b).exp())
}

/// `ln B(x, y)`.
pub fn ln_beta(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(domain!("ln_beta needs positive arguments, got ({x}, {y})"));
    }
    Ok(ln_beta_pos(x, y))
}

fn ln_beta_pos(x: f64, y: f64) -> f64 {
    ln_gamma_pos(x) + ln_gamma_pos(y) - ln_gamma_pos(x + y)
}

/// Surface measure `|S^{n-1}| = 2π^{n/2}/Γ(n/2)` of the unit sphere in `R^n`.
pub fn sphere_measure(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(domain!("sphere_measure needs n >= 2, got {n}"));
    }
    let h = 0.5 * n as f64;
    Ok(2.0 * PI.powf(h) / gamma_pos(h))
}

/// Digamma `ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain!("digamma needs a finite positive argument, got {x}"));
    }
    Ok(digamma_pos(x))
}

fn digamma_pos(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    // Bernoulli tail: B_{2k}/(2k) for k = 1..6.
    let tail = r * (1.0 / 12.0 - r * (1.0 / 120.0 - r * (1.0 / 252.0 - r * (1.0 / 240.0 - r * (1.0 / 132.0 - r * 691.0 / 32760.0)))));
    acc + x.ln() - 0.5 / x - tail
}

/// `1/Γ(x)` on the whole real line (zero at the poles).
fn rgamma(x: f64) -> f64 {
    if x > 0.0 {
        return 1.0 / gamma_pos(x);
    }
    if x == x.floor() {
        return 0.0;
    }
    // reflection: 1/Γ(x) = sin(πx) Γ(1-x) / π
    (PI * x).sin() * gamma_pos(1.0 - x) / PI
}

/// Gauss hypergeometric function `₂F₁(a, b; c; z)` for `z ∈ [0, 1)` and
/// `a, b, c > 0`.
///
/// Near `z = 1` the connection formulas in `1 - z` are used, including the
/// logarithmic cases where `c - a - b` is an integer.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) || !(0.0..1.0).contains(&z) {
        return Err(domain!("hyp2f1 needs a, b, c > 0 and z in [0, 1), got ({a}, {b}, {c}, {z})"));
    }
    Ok(hyp2f1_w(a, b, c, z, 1.0 - z))
}

/// As [`hyp2f1`] with `w = 1 - z` supplied separately, so that callers
/// who know `1 - z` to full relative accuracy can pass it in.
pub(crate) fn hyp2f1_w(a: f64, b: f64, c: f64, z: f64, w: f64) -> f64 {
    if z <= 0.5 {
        return series_2f1(a, b, c, z);
    }
    let s = c - a - b;
    let m = s.round();
    if (s - m).abs() > 1e-9 {
        let t1 = gamma_pos(c) * gamma_signed(s) * rgamma(c - a) * rgamma(c - b) * series_2f1(a, b, 1.0 - s, w);
        let t2 = w.powf(s) * gamma_pos(c) * gamma_signed(-s) * rgamma(a) * rgamma(b) * series_2f1(c - a, c - b, 1.0 + s, w);
        return t1 + t2;
    }
    if m >= 0.0 {
        log_case_plus(a, b, m as usize, w)
    } else {
        log_case_minus(a, b, (-m) as usize, w)
    }
}

fn gamma_signed(x: f64) -> f64 {
    1.0 / rgamma(x)
}

fn series_2f1(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    while k < 2000.0 {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        k += 1.0;
    }
    sum
}

/// `₂F₁(a, b; a+b+m; 1-w)`, `m >= 0`.
fn log_case_plus(a: f64, b: f64, m: usize, w: f64) -> f64 {
    let c = a + b + m as f64;
    let mut finite = 0.0;
    if m > 0 {
        let mut t = 1.0;
        for j in 0..m {
            let jf = j as f64;
            finite += t;
            t *= (a + jf) * (b + jf) / ((jf + 1.0) * (jf + 1.0 - m as f64)) * w;
        }
        finite *= gamma_pos(m as f64) * gamma_pos(c) * rgamma(a + m as f64) * rgamma(b + m as f64);
    }
    let lw = w.ln();
    let (am, bm) = (a + m as f64, b + m as f64);
    let mut psi_1 = digamma_pos(1.0);
    let mut psi_m1 = digamma_pos(m as f64 + 1.0);
    let mut psi_a = digamma_pos(am);
    let mut psi_b = digamma_pos(bm);
    // (a+m)_j (b+m)_j / (j! (j+m)!) w^j
    let mut t = 1.0 / gamma_pos(m as f64 + 1.0);
    let mut sum = 0.0;
    for j in 0..2000 {
        let jf = j as f64;
        let v = t * (lw - psi_1 - psi_m1 + psi_a + psi_b);
        sum += v;
        if j > 2 && v.abs() <= 1e-17 * sum.abs() {
            break;
        }
        t *= (am + jf) * (bm + jf) / ((jf + 1.0) * (jf + 1.0 + m as f64)) * w;
        psi_1 += 1.0 / (jf + 1.0);
        psi_m1 += 1.0 / (jf + 1.0 + m as f64);
        psi_a += 1.0 / (am + jf);
        psi_b += 1.0 / (bm + jf);
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    finite - gamma_pos(c) * rgamma(a) * rgamma(b) * sign * w.powi(m as i32) * sum
}

/// `₂F₁(a, b; a+b-m; 1-w)`, `m >= 1`.
fn log_case_minus(a: f64, b: f64, m: usize, w: f64) -> f64 {
    let mf = m as f64;
    let c = a + b - mf;
    let mut finite = 0.0;
    let mut t = 1.0;
    for j in 0..m {
        let jf = j as f64;
        finite += t;
        t *= (a - mf + jf) * (b - mf + jf) / ((jf + 1.0) * (jf + 1.0 - mf)) * w;
    }
    finite *= gamma_pos(mf) * gamma_pos(c) * rgamma(a) * rgamma(b) / w.powi(m as i32);
    let lw = w.ln();
    let mut psi_1 = digamma_pos(1.0);
    let mut psi_m1 = digamma_pos(mf + 1.0);
    let mut psi_a = digamma_pos(a);
    let mut psi_b = digamma_pos(b);
    let mut t = 1.0 / gamma_pos(mf + 1.0);
    let mut sum = 0.0;
    for j in 0..2000 {
        let jf = j as f64;
        let v = t * (lw - psi_1 - psi_m1 + psi_a + psi_b);
        sum += v;
        if j > 2 && v.abs() <= 1e-17 * sum.abs() {
            break;
        }
        t *= (a + jf) * (b + jf) / ((jf + 1.0) * (jf + 1.0 + mf)) * w;
        psi_1 += 1.0 / (jf + 1.0);
        psi_m1 += 1.0 / (jf + 1.0 + mf);
        psi_a += 1.0 / (a + jf);
        psi_b += 1.0 / (b + jf);
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    finite - sign * gamma_pos(c) * rgamma(a - mf) * rgamma(b - mf) * sum
}

/// `(a^p - (a-b)^p) / a^p`, accurate when `b << a`.
fn rel_power_drop(p: f64, a: f64, b: f64) -> f64 {
    -(p * (-b / a).ln_1p()).exp_m1()
}

/// Which clause of the power-difference lemma was applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerClause {
    /// `p ∈ (0, 1]`: `0 <= a^p - (a-b)^p <= b^p`.
    Sublinear,
    /// `p ∈ (1, 2)`: `-min((p-1) a^{p-2} b^2, b^p) <= a^p - (a-b)^p - p a^{p-1} b <= 0`.
    Intermediate,
    /// `p >= 2`: `-p(p-1)/2 a^{p-2} b^2 <= a^p - (a-b)^p - p a^{p-1} b <= 0`.
    Superquadratic,
    /// `|b| < ηa`: second-order remainder of `(a-b)^p = a^p - p a^{p-1} b + R`.
    Expansion,
}

/// Outcome of a power-difference sandwich check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBound {
    pub clause: PowerClause,
    pub lhs: f64,
    pub upper: f64,
    pub lower: f64,
    pub ok: bool,
}

/// Checks the clause of the power-difference lemma selected by `p`.
///
/// * `p ∈ (0,1]`: `lhs = a^p - (a-b)^p`, `[0, b^p]`.
/// * `p ∈ (1,2)`: `lhs = a^p - (a-b)^p - p a^{p-1} b`,
///   `[-min((p-1) a^{p-2} b^2, b^p), 0]`.
/// * `p >= 2`: `lhs` as above, `[-p(p-1)/2 a^{p-2} b^2, 0]`.
///
/// Requires `0 <= b <= a`.
pub fn check_power_bound(p: f64, a: f64, b: f64) -> Result<PowerBound> {
    if !(p > 0.0) || !(a >= 0.0) || !(b >= 0.0) || !p.is_finite() || !a.is_finite() {
        return Err(domain!("check_power_bound needs p > 0 and a, b >= 0, got p={p}, a={a}, b={b}"));
    }
    if b > a {
        return Err(domain!("check_power_bound needs b <= a, got a={a}, b={b}"));
    }
    let slack = 8.0 * f64::EPSILON;
    if a == 0.0 {
        let clause = clause_for(p);
        return Ok(PowerBound { clause, lhs: 0.0, upper: 0.0, lower: 0.0, ok: true });
    }
    let ap = a.powf(p);
    let drop = ap * rel_power_drop(p, a, b);
    let out = if p <= 1.0 {
        let upper = b.powf(p);
        PowerBound {
            clause: PowerClause::Sublinear,
            lhs: drop,
            upper,
            lower: 0.0,
            ok: drop >= -slack * ap && drop <= upper + slack * ap,
        }
    } else {
        let lhs = drop - p * a.powf(p - 1.0) * b;
        let quad = a.powf(p - 2.0) * b * b;
        let lower = if p < 2.0 {
            -((p - 1.0) * quad).min(b.powf(p))
        } else {
            -0.5 * p * (p - 1.0) * quad
        };
        let tol = slack * (ap + p * a.powf(p - 1.0) * b);
        PowerBound {
            clause: clause_for(p),
            lhs,
            upper: 0.0,
            lower,
            ok: lhs <= tol && lhs >= lower - tol,
        }
    };
    Ok(out)
}

fn clause_for(p: f64) -> PowerClause {
    if p <= 1.0 {
        PowerClause::Sublinear
    } else if p < 2.0 {
        PowerClause::Intermediate
    } else {
        PowerClause::Superquadratic
    }
}

/// Remainder check for `(a-b)^p = a^p - p a^{p-1} b + R` with `|b| < ηa`,
/// `η ∈ (0,1)`. `lhs = R` and the band is the Lagrange bound
/// `|R| <= p|p-1|/2 max((1-η)^{p-2}, (1+η)^{p-2}) a^{p-2} b^2`.
pub fn check_power_expansion(p: f64, a: f64, b: f64, eta: f64) -> Result<PowerBound> {
    if !(p > 0.0) || !(a > 0.0) || !(eta > 0.0 && eta < 1.0) {
        return Err(domain!("check_power_expansion needs p, a > 0 and η ∈ (0,1), got p={p}, a={a}, η={eta}"));
    }
    if !(b.abs() < eta * a) {
        return Err(domain!("check_power_expansion needs |b| < ηa, got a={a}, b={b}, η={eta}"));
    }
    let ap = a.powf(p);
    let r = ap * ((p * (-b / a).ln_1p()).exp_m1() + p * b / a);
    let k = (1.0 - eta).powf(p - 2.0).max((1.0 + eta).powf(p - 2.0));
    let bound = 0.5 * p * (p - 1.0).abs() * k * a.powf(p - 2.0) * b * b;
    let tol = 8.0 * f64::EPSILON * (ap + p * ap * (b / a).abs());
    Ok(PowerBound {
        clause: PowerClause::Expansion,
        lhs: r,
        upper: bound,
        lower: -bound,
        ok: r.abs() <= bound + tol,
    })
}
