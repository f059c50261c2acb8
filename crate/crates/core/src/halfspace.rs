//! Half-space integral inequalities behind the boundary estimate for `∇H̃`.
//!
//! All integrals are written in the coordinates `(r, t)`, where `t = x_n` and
//! `r = |x̄|`, after integrating out the `S^{n-2}` directions. Distances are
//! `ρ₋ = |(r, t) - (0, 1)|` and `ρ₊ = |(r, t) + (0, 1)|`, and the kernels
//! blow up at `(r, t) = (0, 1)`. Every integrand comes with a scaled local
//! form `ρ^{2-m} f` written in polar coordinates about that point, with the
//! singular powers cancelled analytically, so the quadrature engine never
//! evaluates a difference of large numbers there.

use crate::error::{domain, Error, Result};
use crate::params::{gamma_constants, make_params, Regime};
use crate::quadrature::{Quad1d, Quad2d, QuadOptions, QuadResult, Singularity};
use crate::specfun::{beta_fn, ln_beta, sphere_measure};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use num_traits::Float;
use serde::{Deserialize, Serialize};

const INF: f64 = f64::INFINITY;

/// Default absolute tolerance for the `as0` integrals.
pub const TOL_LOW_B: f64 = 1e-8;
/// Default absolute tolerance for the `as1` integrals.
pub const TOL_LOW_A: f64 = 1e-7;

/// Cell budget for a single 2D integral.
const MAX_CELLS: usize = 400_000;

/// Three-valued certification outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Certified,
    Failed,
    Inconclusive,
}

impl Verdict {
    pub fn from_margin(margin: f64, budget: f64) -> Verdict {
        if margin > budget {
            Verdict::Certified
        } else if margin < -budget {
            Verdict::Failed
        } else {
            Verdict::Inconclusive
        }
    }
}

/// Which inequality a report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `V_L > V_R`.
    As0,
    /// `W_L > W_R`.
    As1,
    /// The sufficient condition `lhs < rhs` in terms of `X1, X2, X3, Y`.
    Master,
}

/// Direction of the inequality being certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Greater,
    Less,
}

/// A named intermediate quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub value: QuadResult,
}

fn term(name: &str, value: QuadResult) -> Term {
    Term { name: name.to_string(), value }
}

/// Certification record for one inequality at one `(n, p)`.
///
/// `margin` is signed so that a positive value means the inequality holds:
/// `lhs - rhs` for [`Sense::Greater`], `rhs - lhs` for [`Sense::Less`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub which: Inequality,
    pub sense: Sense,
    pub n: u32,
    pub p: f64,
    pub lhs: QuadResult,
    pub rhs: QuadResult,
    pub margin: f64,
    pub error_budget: f64,
    pub verdict: Verdict,
    pub terms: Vec<Term>,
}

impl InequalityReport {
    fn new(which: Inequality, sense: Sense, n: u32, p: f64, lhs: QuadResult, rhs: QuadResult, terms: Vec<Term>) -> Self {
        let margin = match sense {
            Sense::Greater => lhs.value - rhs.value,
            Sense::Less => rhs.value - lhs.value,
        };
        let error_budget = lhs.abs_error + rhs.abs_error;
        InequalityReport {
            which,
            sense,
            n,
            p,
            lhs,
            rhs,
            margin,
            error_budget,
            verdict: Verdict::from_margin(margin, error_budget),
            terms,
        }
    }

    /// Same report with the budget inflated by `factor`.
    pub fn with_inflated_budget(&self, factor: f64) -> Self {
        let mut r = self.clone();
        r.error_budget *= factor;
        r.verdict = Verdict::from_margin(r.margin, r.error_budget);
        r
    }

    pub fn term(&self, name: &str) -> Option<&QuadResult> {
        self.terms.iter().find(|t| t.name == name).map(|t| &t.value)
    }
}

/// Exponents shared by all kernels at one `(n, p)`.
#[derive(Debug, Clone, Copy)]
struct Kern {
    n: f64,
    d: f64,
    p: f64,
    /// `(n-2)(p-1)`, the strength of the kernels' singularity.
    kappa: f64,
    /// `2(n-2)p / (2(n-1) - (n-2)p)`.
    c2: f64,
}

impl Kern {
    fn new(n: u32, p: f64) -> Self {
        let nf = n as f64;
        let d = nf - 2.0;
        Kern { n: nf, d, p, kappa: d * (p - 1.0), c2: 2.0 * d * p / (2.0 * (nf - 1.0) - d * p) }
    }

    /// `ψ(x) = 1 - (1-x)^p` given `x` and `1 - x`.
    fn psi(&self, x: f64, omx: f64) -> f64 {
        if x < 0.5 {
            -(self.p * (-x).ln_1p()).exp_m1()
        } else {
            1.0 - omx.powf(self.p)
        }
    }

    /// `ψ(x)/x`.
    fn psi1(&self, x: f64) -> f64 {
        if x == 0.0 {
            self.p
        } else {
            self.psi(x, 1.0 - x) / x
        }
    }

    /// `(ψ(x) - p x)/x²`.
    fn phi2(&self, x: f64, omx: f64) -> f64 {
        let p = self.p;
        if x < 0.25 {
            // -Σ_{k>=2} C(p,k) (-x)^{k-2}
            let mut c = 0.5 * p * (p - 1.0);
            let mut pw = 1.0;
            let mut s = 0.0;
            for k in 2..200 {
                let t = c * pw;
                s += t;
                if t.abs() <= 1e-18 * s.abs() {
                    break;
                }
                c *= (p - k as f64) / (k as f64 + 1.0);
                pw *= -x;
            }
            -s
        } else {
            (self.psi(x, omx) - p * x) / (x * x)
        }
    }

    /// `x = (ρ₋/ρ₊)^{n-2}` and `1 - x`, both to full relative accuracy.
    fn ratio(&self, rm2: f64, rp2: f64, t: f64) -> (f64, f64) {
        let x = (rm2 / rp2).powf(0.5 * self.d);
        let w = 4.0 * t / rp2;
        let omx = if w < 0.5 { -(0.5 * self.d * (-w).ln_1p()).exp_m1() } else { 1.0 - x };
        (x, omx)
    }

    fn k1(&self, r: f64, t: f64) -> f64 {
        let rm2 = r * r + (t - 1.0) * (t - 1.0);
        let rp2 = r * r + (t + 1.0) * (t + 1.0);
        let (x, omx) = self.ratio(rm2, rp2, t);
        rm2.powf(-0.5 * self.d * self.p) * self.psi(x, omx)
    }

    fn k2_parts(&self, r: f64, t: f64) -> [f64; 3] {
        let rm2 = r * r + (t - 1.0) * (t - 1.0);
        let rp2 = r * r + (t + 1.0) * (t + 1.0);
        let a = self.k1(r, t);
        let b = -self.p * rm2.powf(-0.5 * self.kappa) * rp2.powf(-0.5 * self.d);
        let c = self.c2 * rm2.powf(-0.5 * self.kappa) * (r * r + t * t - 1.0) * rp2.powf(-0.5 * self.n);
        [a, b, c]
    }

    fn k2(&self, r: f64, t: f64) -> f64 {
        let rm2 = r * r + (t - 1.0) * (t - 1.0);
        let rp2 = r * r + (t + 1.0) * (t + 1.0);
        let (x, omx) = self.ratio(rm2, rp2, t);
        let first = (rm2 / rp2).powf(self.d) * rm2.powf(-0.5 * self.d * self.p) * self.phi2(x, omx);
        let second = self.c2 * rm2.powf(-0.5 * self.kappa) * (r * r + t * t - 1.0) * rp2.powf(-0.5 * self.n);
        first + second
    }

    /// `r^{n-2} [(1-t)/ρ₋^n - (1+t)/ρ₊^n]`, arranged so that no factor
    /// overflows for large `n` or far-out points.
    fn weighted_dipole(&self, r: f64, t: f64) -> f64 {
        let rm2 = r * r + (t - 1.0) * (t - 1.0);
        let rp2 = r * r + (t + 1.0) * (t + 1.0);
        (1.0 - t) * (r * r / rm2).powf(0.5 * self.d) / rm2 - (1.0 + t) * (r * r / rp2).powf(0.5 * self.d) / rp2
    }
}

/// Point on the polar ray about `(0, 1)`: `(r, t, ρ₊)`.
#[inline]
fn polar(rho: f64, dx: f64, dy: f64) -> (f64, f64, f64) {
    let r = rho * dx;
    let t = 1.0 + rho * dy;
    let rp = (rho * rho + 4.0 + 4.0 * rho * dy).sqrt();
    (r, t, rp)
}

/// `(1 - t^e)/ρ` at `t = 1 + ρ dy`.
#[inline]
fn fold_factor(e: f64, rho: f64, dy: f64) -> f64 {
    if rho == 0.0 {
        -e * dy
    } else {
        -(e * (rho * dy).ln_1p()).exp_m1() / rho
    }
}

fn opts(tol: f64) -> QuadOptions {
    QuadOptions::abs(tol).with_max_cells(MAX_CELLS)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(domain!("tolerance must be positive, got {tol}"));
    }
    Ok(())
}

/// Absolute tolerance for the reduced integrals at `(n, p)`.
///
/// `tol` is taken relative to `Y/(n-(n-2)p)`, the reduced size of the right
/// hand sides, so that the same `tol` means the same thing for every `n`
/// (the integrals scale roughly like `2^{-n}`).
fn abs_tol(n: u32, p: f64, tol: f64) -> Result<f64> {
    let d = n as f64 - 2.0;
    Ok(tol * y_exact(n, p)? / (n as f64 - d * p))
}

fn require(n: u32, p: f64, want: Regime) -> Result<()> {
    if n < 5 {
        return Err(domain!("the half-space inequalities are stated for n >= 5, got n = {n}"));
    }
    let params = make_params(n, p, 0.0)?;
    if params.regime != want {
        return Err(Error::Regime(alloc::format!(
            "(n, p) = ({n}, {p}) lies in {:?}, this operation needs {:?}",
            params.regime, want
        )));
    }
    Ok(())
}

/// `c_n^p |S^{n-2}|`.
fn prefactor(n: u32, p: f64) -> Result<f64> {
    Ok(crate::params::c_n(n)?.powf(p) * sphere_measure(n - 1)?)
}

/// `K₁(r, t)`.
pub fn kernel_k1(n: u32, p: f64, r: f64, t: f64) -> Result<f64> {
    check_point(n, r, t)?;
    Ok(Kern::new(n, p).k1(r, t))
}

/// `K₂(r, t)`.
pub fn kernel_k2(n: u32, p: f64, r: f64, t: f64) -> Result<f64> {
    check_point(n, r, t)?;
    Ok(Kern::new(n, p).k2(r, t))
}

/// The three summands of `K₂` evaluated separately (`K₁`, the `p`-term and
/// the dipole correction), without the cancellation-free rewriting.
pub fn kernel_k2_parts(n: u32, p: f64, r: f64, t: f64) -> Result<[f64; 3]> {
    check_point(n, r, t)?;
    Ok(Kern::new(n, p).k2_parts(r, t))
}

fn check_point(n: u32, r: f64, t: f64) -> Result<()> {
    if n < 3 {
        return Err(domain!("kernel needs n >= 3, got {n}"));
    }
    if !(r >= 0.0 && t >= 0.0) || !r.is_finite() || !t.is_finite() {
        return Err(domain!("kernel needs r, t >= 0, got ({r}, {t})"));
    }
    if r == 0.0 && t == 1.0 {
        return Err(Error::Singularity("kernel evaluated at (r, t) = (0, 1)".into()));
    }
    Ok(())
}

/// `∫∫ r^{n-2} [(1-t)/ρ₋^n - (1+t)/ρ₊^n] K₁` over the quadrant.
fn vl_integral(k: &Kern, tol: f64) -> Result<QuadResult> {
    let local = |rho: f64, dx: f64, dy: f64| {
        let (_, t, rp) = polar(rho, dx, dy);
        let x = (rho / rp).powf(k.d);
        dx.powf(k.d) * rp.powf(-k.d) * k.psi1(x) * (-dy - (1.0 + t) * rho.powf(k.d + 1.0) * rp.powf(-k.n))
    };
    Quad2d::new((0.0, INF), (0.0, INF))
        .options(opts(tol))
        .singular(Singularity::new((0.0, 1.0), 1.0 - k.kappa).with_local(&local))
        .integrate(|r, t| k.weighted_dipole(r, t) * k.k1(r, t))
}

/// `∫∫ r^{n-2} [(1-t)/ρ₋^n - (1+t)/ρ₊^n] K₂` over the quadrant.
fn wl_integral(k: &Kern, tol: f64) -> Result<QuadResult> {
    let local = |rho: f64, dx: f64, dy: f64| {
        let (_, t, rp) = polar(rho, dx, dy);
        let x = (rho / rp).powf(k.d);
        let omx = 1.0 - x;
        let a = -dy - (1.0 + t) * rho.powf(k.d + 1.0) * rp.powf(-k.n);
        let b = rho.powf(k.d - 1.0) * rp.powf(-2.0 * k.d) * k.phi2(x, omx) + k.c2 * (rho + 2.0 * dy) * rp.powf(-k.n);
        dx.powf(k.d) * a * b
    };
    Quad2d::new((0.0, INF), (0.0, INF))
        .options(opts(tol))
        .singular(Singularity::new((0.0, 1.0), 2.0 - k.kappa).with_local(&local))
        .integrate(|r, t| k.weighted_dipole(r, t) * k.k2(r, t))
}

/// `V_L`, the left side of the `as0` inequality.
pub fn lhs_as0(n: u32, p: f64, tol: f64) -> Result<QuadResult> {
    require(n, p, Regime::LowB)?;
    check_tol(tol)?;
    let pre = prefactor(n, p)?;
    Ok(vl_integral(&Kern::new(n, p), abs_tol(n, p, tol)?)?.scale(pre))
}

/// The radial integral `∫_0^∞ r^{n-2}[(r²+1)^{-(n-2)(p+1)/2} - n(r²+1)^{-((n-2)p+n)/2}] dr`.
fn boundary_integral(n: u32, p: f64, tol: f64) -> Result<QuadResult> {
    let k = Kern::new(n, p);
    let a = 0.5 * k.d * (p + 1.0);
    let b = 0.5 * (k.d * p + k.n);
    Quad1d::new(0.0, INF)
        .breaks(&[1.0])
        .options(QuadOptions::rel(tol).with_max_cells(5000))
        .integrate(|r| {
            let s = r * r + 1.0;
            (r * r / s).powf(0.5 * k.d) * (s.powf(0.5 * k.d - a) - k.n * s.powf(0.5 * k.d - b))
        })
}

/// `Y = B((n+1)/2, ((n-2)p-1)/2)`.
fn y_exact(n: u32, p: f64) -> Result<f64> {
    let d = n as f64 - 2.0;
    if !(d * p > 1.0) {
        return Err(Error::Pole(alloc::format!("B(., ((n-2)p-1)/2) needs (n-2)p > 1, got {}", d * p)));
    }
    beta_fn(0.5 * (n as f64 + 1.0), 0.5 * (d * p - 1.0))
}

/// `V_R`: the Beta closed form and an independent 1D quadrature of the
/// boundary integral.
pub fn rhs_as0(n: u32, p: f64) -> Result<(f64, QuadResult)> {
    let (g1, _) = gamma_constants(n, p)?;
    let d = n as f64 - 2.0;
    let closed = -prefactor(n, p)? / (n as f64 - d * p) * y_exact(n, p)?;
    let quad = boundary_integral(n, p, 1e-12)?.scale(2.0 * g1 * sphere_measure(n - 1)?);
    Ok((closed, quad))
}

/// Certifies `V_L > V_R` (regime `LOW_B`).
pub fn verify_as0(n: u32, p: f64, tol: f64) -> Result<InequalityReport> {
    let lhs = lhs_as0(n, p, tol)?;
    let (closed, quad) = rhs_as0(n, p)?;
    let rhs = QuadResult::exact(closed);
    let terms = alloc::vec![term("V_L", lhs), term("V_R", rhs), term("V_R_quadrature", quad)];
    Ok(InequalityReport::new(Inequality::As0, Sense::Greater, n, p, lhs, rhs, terms))
}

/// Unfolded and folded forms of `∫∫ r^{n-2} (1-t)/ρ₋^n K₁`: over the whole
/// quadrant, and over `t ∈ (0,1)` with the weight `1 - t^{(n-2)p-2}` from
/// the inversion `t ↦ 1/t`, `r ↦ r/t`.
pub fn fold_diagnostic(n: u32, p: f64, tol: f64) -> Result<(QuadResult, QuadResult)> {
    require(n, p, Regime::LowB)?;
    check_tol(tol)?;
    let tol = abs_tol(n, p, tol)?;
    let k = Kern::new(n, p);
    let e = k.d * p - 2.0;
    let f = |r: f64, t: f64| {
        let rm2 = r * r + (t - 1.0) * (t - 1.0);
        (1.0 - t) * (r * r / rm2).powf(0.5 * k.d) / rm2 * k.k1(r, t)
    };
    let local_u = |rho: f64, dx: f64, dy: f64| {
        let (_, _, rp) = polar(rho, dx, dy);
        let x = (rho / rp).powf(k.d);
        dx.powf(k.d) * rp.powf(-k.d) * k.psi1(x) * (-dy)
    };
    let unfolded = Quad2d::new((0.0, INF), (0.0, INF))
        .options(opts(tol))
        .singular(Singularity::new((0.0, 1.0), 1.0 - k.kappa).with_local(&local_u))
        .integrate(f)?;
    let local_f = |rho: f64, dx: f64, dy: f64| {
        let (_, _, rp) = polar(rho, dx, dy);
        let x = (rho / rp).powf(k.d);
        dx.powf(k.d) * (-dy) * fold_factor(e, rho, dy) * rp.powf(-k.d) * k.psi1(x)
    };
    let folded = Quad2d::new((0.0, INF), (0.0, 1.0))
        .options(opts(tol))
        .singular(Singularity::new((0.0, 1.0), 2.0 - k.kappa).with_local(&local_f))
        .integrate(|r, t| f(r, t) * (1.0 - t.powf(e)))?;
    Ok((unfolded, folded))
}

/// `W_L`, the left side of the `as1` inequality.
pub fn lhs_as1(n: u32, p: f64, tol: f64) -> Result<QuadResult> {
    require(n, p, Regime::LowA)?;
    check_tol(tol)?;
    let pre = prefactor(n, p)?;
    Ok(wl_integral(&Kern::new(n, p), abs_tol(n, p, tol)?)?.scale(pre))
}

/// `W_R`: closed form and quadrature, as for [`rhs_as0`].
pub fn rhs_as1(n: u32, p: f64) -> Result<(f64, QuadResult)> {
    let (g1, g2) = gamma_constants(n, p)?;
    let c = crate::params::c_n(n)?;
    let d = n as f64 - 2.0;
    let factor = 1.0 + (d * p - 2.0) * p / (2.0 * (n as f64 - 1.0) - d * p);
    let closed = -prefactor(n, p)? / (n as f64 - d * p) * factor * y_exact(n, p)?;
    let quad = boundary_integral(n, p, 1e-12)?.scale(2.0 * (g1 - c * g2) * sphere_measure(n - 1)?);
    Ok((closed, quad))
}

/// Certifies `W_L > W_R` (regime `LOW_A`).
pub fn verify_as1(n: u32, p: f64, tol: f64) -> Result<InequalityReport> {
    let lhs = lhs_as1(n, p, tol)?;
    let (closed, quad) = rhs_as1(n, p)?;
    let rhs = QuadResult::exact(closed);
    let terms = alloc::vec![term("W_L", lhs), term("W_R", rhs), term("W_R_quadrature", quad)];
    Ok(InequalityReport::new(Inequality::As1, Sense::Greater, n, p, lhs, rhs, terms))
}

/// `X₁` (unfolded form).
pub fn compute_x1(n: u32, p: f64, tol: f64) -> Result<QuadResult> {
    require(n, p, Regime::LowA)?;
    check_tol(tol)?;
    x1_forms(&Kern::new(n, p), abs_tol(n, p, tol)?).map(|(u, _)| u)
}

fn x1_forms(k: &Kern, tol: f64) -> Result<(QuadResult, QuadResult)> {
    let pm1 = k.p - 1.0;
    let e = k.d * k.p - 2.0;
    let f = |r: f64, t: f64| {
        let rm2 = r * r + (t - 1.0) * (t - 1.0);
        let rp2 = r * r + (t + 1.0) * (t + 1.0);
        pm1 * (r * r / rp2).powf(0.5 * k.d) * (1.0 - t) * rm2.powf(-0.5 * (k.kappa + 2.0)) * rp2.powf(-0.5 * k.d)
    };
    let local_u = |rho: f64, dx: f64, dy: f64| {
        let (_, _, rp) = polar(rho, dx, dy);
        pm1 * dx.powf(k.d) * (-dy) * rp.powf(-2.0 * k.d)
    };
    let unfolded = Quad2d::new((0.0, INF), (0.0, INF))
        .options(opts(tol))
        .singular(Singularity::new((0.0, 1.0), k.d + 1.0 - k.kappa).with_local(&local_u))
        .integrate(f)?;
    let local_f = |rho: f64, dx: f64, dy: f64| {
        let (_, _, rp) = polar(rho, dx, dy);
        pm1 * dx.powf(k.d) * (-dy) * fold_factor(e, rho, dy) * rp.powf(-2.0 * k.d)
    };
    let folded = Quad2d::new((0.0, INF), (0.0, 1.0))
        .options(opts(tol))
        .singular(Singularity::new((0.0, 1.0), k.d + 2.0 - k.kappa).with_local(&local_f))
        .integrate(|r, t| f(r, t) * (1.0 - t.powf(e)))?;
    Ok((unfolded, folded))
}

/// Folded and unfolded `X₁` (they must agree).
pub fn x1_fold_diagnostic(n: u32, p: f64, tol: f64) -> Result<(QuadResult, QuadResult)> {
    require(n, p, Regime::LowA)?;
    check_tol(tol)?;
    x1_forms(&Kern::new(n, p), abs_tol(n, p, tol)?)
}

/// `X₂` with its range pieces and sub-terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct X2Breakdown {
    pub total: QuadResult,
    /// `t ∈ [0,1)`, `[1,2)`, `[2,∞)`.
    pub range_01: QuadResult,
    pub range_12: QuadResult,
    pub range_2inf: QuadResult,
    /// `J₁` in the `R = t(r²+1) - 2` coordinates.
    pub j1: QuadResult,
    pub j2: QuadResult,
    pub j3: QuadResult,
    pub j41: QuadResult,
    pub j42: QuadResult,
}

impl X2Breakdown {
    pub fn terms(&self) -> Vec<Term> {
        alloc::vec![
            term("X2", self.total),
            term("X2[0,1)", self.range_01),
            term("X2[1,2)", self.range_12),
            term("X2[2,inf)", self.range_2inf),
            term("J1", self.j1),
            term("J2", self.j2),
            term("J3", self.j3),
            term("J41", self.j41),
            term("J42", self.j42),
        ]
    }
}

/// `X₂`, split into the three `t` ranges and the `J` sub-integrals.
pub fn compute_x2(n: u32, p: f64, tol: f64) -> Result<X2Breakdown> {
    require(n, p, Regime::LowA)?;
    check_tol(tol)?;
    let tol = abs_tol(n, p, tol)?;
    let k = Kern::new(n, p);
    let (kap, d, nf) = (k.kappa, k.d, k.n);
    let f = |r: f64, t: f64| {
        let rm2 = r * r + (t - 1.0) * (t - 1.0);
        let rp2 = r * r + (t + 1.0) * (t + 1.0);
        (r * r / rm2).powf(0.5 * d) * (1.0 - t) * rm2.powf(-0.5 * (kap + 2.0)) * (r * r + t * t - 1.0) * rp2.powf(-0.5 * nf)
    };
    let local = |rho: f64, dx: f64, dy: f64| {
        let (_, _, rp) = polar(rho, dx, dy);
        dx.powf(d) * (-dy) * (rho + 2.0 * dy) * rp.powf(-nf)
    };
    let m = 2.0 - kap;
    let piece = |t0: f64, t1: f64| {
        Quad2d::new((0.0, INF), (t0, t1))
            .options(opts(tol))
            .singular(Singularity::new((0.0, 1.0), m).with_local(&local))
            .integrate(f)
    };
    let range_01 = piece(0.0, 1.0)?;
    let range_12 = piece(1.0, 2.0)?;
    let range_2inf = Quad2d::new((0.0, INF), (2.0, INF)).options(opts(tol)).integrate(f)?;

    // J1 in (t, v) with R = t - 2 + 8v; the integrand is O(|(t,v)|^{-κ}) at the origin.
    let j1_at = |t: f64, v: f64, scale: f64, a: f64, b: f64| {
        // `scale` carries (t + 8v)^{-(κ+3)/2} t^{(3-κ)/2}, `a`, `b` the ratios.
        let r_ = t - 2.0 + 8.0 * v;
        let bb = 1.0 + t * (r_ - 2.0) / 4.0;
        let ratio = 8.0 * b / (a + 8.0 * b);
        8.0 * 0.5f64.powf(nf + 1.0) * scale * r_ * (ratio / bb).powf(0.5 * (nf - 3.0)) * bb.powf(-1.5)
    };
    let j1_f = |t: f64, v: f64| {
        let s = t.powf(0.5 * (3.0 - kap)) * (t + 8.0 * v).powf(-0.5 * (kap + 3.0));
        j1_at(t, v, s, t, v)
    };
    let j1_local = |rho: f64, da: f64, db: f64| {
        let s = da.powf(0.5 * (3.0 - kap)) * (da + 8.0 * db).powf(-0.5 * (kap + 3.0));
        j1_at(rho * da, rho * db, s, da, db)
    };
    let j1 = Quad2d::new((0.0, 1.0), (0.0, 1.0))
        .options(opts(tol))
        .singular(Singularity::new((0.0, 0.0), 2.0 - kap).with_local(&j1_local))
        .integrate(j1_f)?;

    // J2: r = (2√2/√t)/w, w ∈ (0,1].
    let j2 = Quad2d::new((0.0, 1.0), (0.0, 1.0)).options(opts(tol)).integrate(|t, w| {
        if w == 0.0 || t == 0.0 {
            return 0.0;
        }
        let r0 = 8f64.sqrt() / t.sqrt();
        let r = r0 / w;
        let jac = r0 / (w * w);
        let s = r * r + 1.0;
        let num = r * r * t * t + t * t - 2.0 * t;
        let den = r * r * t * t + (t - 2.0) * (t - 2.0);
        jac * (r * r / s).powf(0.5 * d) * t.powf(-kap) * s.powf(-0.5 * (kap + 2.0)) * num * den.powf(-0.5 * nf)
    })?;

    // r^{n-2} (r²+1)^{-(κ+n)/2}
    let radial = |r: f64, kap: f64| {
        let s = r * r + 1.0;
        (r * r / s).powf(0.5 * d) * s.powf(-0.5 * (kap + 2.0))
    };
    // J3, J42 carry t^{1-κ}; t = u^{1/m} absorbs it: t^{1-κ} dt = du/m.
    let tu = |u: f64| u.powf(1.0 / m);
    let j3 = Quad2d::new((0.0, 1.0), (0.0, 1.0)).options(opts(tol)).integrate(|r, u| {
        let t = tu(u);
        let h = -radial(r, kap) * (r * r * t + t + 2.0)
            * (r * r * t * t + (t + 2.0) * (t + 2.0)).powf(-0.5 * nf);
        h / m
    })?;
    let j41 = Quad2d::new((1.0, INF), (0.0, 1.0)).options(opts(tol)).integrate(|r, t| {
        -radial(r, kap) * (r * r + 1.0) * t.powf(2.0 - kap)
            * (r * r * t * t + (t + 2.0) * (t + 2.0)).powf(-0.5 * nf)
    })?;
    let j42 = Quad2d::new((1.0, INF), (0.0, 1.0)).options(opts(tol)).integrate(|r, u| {
        let t = tu(u);
        let h = -2.0 * radial(r, kap) * (r * r * t * t + (t + 2.0) * (t + 2.0)).powf(-0.5 * nf);
        h / m
    })?;
    Ok(X2Breakdown { total: range_01 + range_12 + range_2inf, range_01, range_12, range_2inf, j1, j2, j3, j41, j42 })
}

/// `X₃`.
pub fn compute_x3(n: u32, p: f64, tol: f64) -> Result<QuadResult> {
    require(n, p, Regime::LowA)?;
    check_tol(tol)?;
    let tol = abs_tol(n, p, tol)?;
    let k = Kern::new(n, p);
    let local = |rho: f64, dx: f64, dy: f64| {
        let (_, t, rp) = polar(rho, dx, dy);
        dx.powf(k.d) * (1.0 + t) * (rho + 2.0 * dy) * rp.powf(-2.0 * k.n)
    };
    Quad2d::new((0.0, INF), (0.0, INF))
        .options(opts(tol))
        .singular(Singularity::new((0.0, 1.0), k.d + 3.0 - k.kappa).with_local(&local))
        .integrate(|r, t| {
            let rm2 = r * r + (t - 1.0) * (t - 1.0);
            let rp2 = r * r + (t + 1.0) * (t + 1.0);
            (r * r / rp2).powf(0.5 * k.d) * (1.0 + t) * rm2.powf(-0.5 * k.kappa) * (r * r + t * t - 1.0) * rp2.powf(-0.5 * (k.n + 2.0))
        })
}

/// `Y = B((n+1)/2, ((n-2)p-1)/2)`, exact.
pub fn compute_y(n: u32, p: f64) -> Result<QuadResult> {
    Ok(QuadResult::exact(y_exact(n, p)?))
}

/// Certifies the sufficient condition
/// `((2(n-1)-(n-2)p)/(2(n-2)p)) X₁ - X₂ + X₃ < (1/(2(n-2)p)) [(2(n-1)-np+(n-2)p²)/(n-(n-2)p)] Y`.
pub fn verify_master(n: u32, p: f64, tol: f64) -> Result<InequalityReport> {
    let x1 = compute_x1(n, p, tol)?;
    let x2 = compute_x2(n, p, tol)?;
    let x3 = compute_x3(n, p, tol)?;
    let y = compute_y(n, p)?;
    let nf = n as f64;
    let d = nf - 2.0;
    let a = (2.0 * (nf - 1.0) - d * p) / (2.0 * d * p);
    let lhs = x1.scale(a) - x2.total + x3;
    let rhs = y.scale((2.0 * (nf - 1.0) - nf * p + d * p * p) / (nf - d * p) / (2.0 * d * p));
    let mut terms = alloc::vec![term("X1", x1)];
    terms.extend(x2.terms());
    terms.push(term("X3", x3));
    terms.push(term("Y", y));
    Ok(InequalityReport::new(Inequality::Master, Sense::Less, n, p, lhs, rhs, terms))
}

/// Right side of the `X₁` bound: `(p-1)/(2[(n-2)p-2]) B((2n-3-(n-2)p)/2, ((n-2)p-1)/2)`.
pub fn x1_bound(n: u32, p: f64) -> Result<f64> {
    let nf = n as f64;
    let d = nf - 2.0;
    Ok((p - 1.0) / (2.0 * (d * p - 2.0)) * beta_fn(0.5 * (2.0 * nf - 3.0 - d * p), 0.5 * (d * p - 1.0))?)
}

/// Right side of the `X₃` bound: `1/(4(n-2)) B((2n-3-(n-2)p)/2, ((n-2)p-1)/2)`.
pub fn x3_bound(n: u32, p: f64) -> Result<f64> {
    let nf = n as f64;
    let d = nf - 2.0;
    Ok(beta_fn(0.5 * (2.0 * nf - 3.0 - d * p), 0.5 * (d * p - 1.0))? / (4.0 * d))
}

/// Right side of the bound on `-X₂`.
pub fn neg_x2_bound(n: u32, p: f64) -> Result<f64> {
    let nf = n as f64;
    if n < 5 {
        return Err(domain!("the -X2 bound is stated for n >= 5, got {n}"));
    }
    let gap = nf - (nf - 2.0) * p;
    let h = 0.5 * nf;
    let hm = 0.5 * (nf - 1.0);
    let a = 4.0 / (nf - 2.0) + 4.0 / ((nf - 1.0) * (nf - 1.0)) + 9391.0 / (360.0 * (nf - 1.0)) + 1.0 / (2.0 * nf)
        + 981.0 / 200.0 * (8.0f64 / 9.0).powf(h)
        - (64.0 / 9.0 * (23.0f64 / 24.0).powf(hm) + 589.0 / 40.0 * (19.0f64 / 20.0).powf(hm)) / (nf - 1.0)
        - 9.0 / (nf - 2.0) * (2.0f64 / 3.0).powf(nf)
        + 18.0 / (nf - 3.0) * (2.0f64 / 3.0).powf(nf);
    let b = (3.0 + 64.0 / (3.0 * 3f64.sqrt())) / (nf - 1.0) + 223.0 / 200.0 * (8.0f64 / 9.0).powf(h)
        - 128.0 / (3.0 * 11f64.sqrt() * (nf - 1.0)) * (11.0f64 / 12.0).powf(h)
        - 2.0 * 2f64.sqrt() / (nf - 1.0) * 0.5f64.powf(h);
    Ok(0.5f64.powf(nf) * (a + b / gap))
}

/// Lower bound `(5/√n) 2^{-n}` for `Y`.
pub fn y_lower_bound(n: u32) -> f64 {
    5.0 / (n as f64).sqrt() * 0.5f64.powf(n as f64)
}

/// `ln Y`, usable for large `n`.
pub fn ln_y(n: u32, p: f64) -> Result<f64> {
    let d = n as f64 - 2.0;
    ln_beta(0.5 * (n as f64 + 1.0), 0.5 * (d * p - 1.0))
}

/// The large-`n` sufficient condition
/// `125/4 + 17/(16n) + 16/(n-(n-2)p) <= 99(n-2)/(20√n) · 1/(n-(n-2)p)`.
pub fn verify_b50(n: u32, p: f64) -> Result<bool> {
    if n < 100 {
        return Err(domain!("the large-n condition needs n >= 100, got {n}"));
    }
    if Regime::classify(n, p) != Regime::LowA {
        return Err(Error::Regime(alloc::format!("p = {p} is not in [(n-1)/(n-2), n/(n-2)) for n = {n}")));
    }
    let nf = n as f64;
    let gap = nf - (nf - 2.0) * p;
    let lhs = 125.0 / 4.0 + 17.0 / (16.0 * nf) + 16.0 / gap;
    let rhs = 99.0 * (nf - 2.0) / (20.0 * nf.sqrt()) / gap;
    Ok(lhs <= rhs)
}

/// `k` evenly spaced exponents inside the regime, kept `1e-3` away from both
/// ends.
pub fn regime_grid(n: u32, regime: Regime, k: usize) -> Result<Vec<f64>> {
    let nf = n as f64;
    let d = nf - 2.0;
    let (lo, hi) = match regime {
        Regime::LowB => (2.0 / d, (nf - 1.0) / d),
        Regime::LowA => ((nf - 1.0) / d, nf / d),
        Regime::High => (nf / d, (nf + 2.0) / d),
        Regime::Log => return Ok(alloc::vec![nf / d]),
    };
    let margin = 1e-3;
    if k == 1 {
        return Ok(alloc::vec![0.5 * (lo + hi)]);
    }
    Ok((0..k)
        .map(|i| lo + margin + i as f64 * (hi - lo - 2.0 * margin) / (k - 1) as f64)
        .collect())
}
