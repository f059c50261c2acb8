//! Green's function of the unit ball `B ⊂ R^n` and the objects built on it:
//! the regular part `H`, the Robin function `τ`, the iterated function `G̃`
//! with `-Δ_x G̃(·,y) = G(·,y)^p`, its regular part `H̃`, and the two
//! Pohozaev surface functionals.
//!
//! `G` and `H` are closed form. `G̃` and `H̃` are integrals over the ball.
//! When the pole `y` is the centre everything is radial and reduces to 1D
//! quadrature. Otherwise the integrands are symmetric about the axis
//! through `y`, so the `n`-dimensional integral is written in meridian
//! coordinates `(z₁, s)` with the remaining `(n-2)`-sphere done in closed
//! form through `₂F₁` ring averages; what is left is a 2D integral over the
//! half disc.
//!
//! `H̃` is not evaluated as the difference of its singular profile and
//! `G̃`, which cancels catastrophically near the diagonal. It solves its own
//! Dirichlet problem with a mildly singular right-hand side, and is
//! evaluated from that Green representation, gradient included, right up to
//! `x = y`.

use crate::error::{domain, Error, Result};
use crate::params::{c_n, gamma_constants, Regime};
use crate::quadrature::{QuadOptions, QuadResult, Quad1d, Quad2d, Singularity};
use crate::specfun::{hyp2f1_w, sphere_measure};
use crate::sphere::axisymmetric;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;
use serde::{Deserialize, Serialize};

/// Distance below which a point counts as the centre of the ball.
const CENTRE: f64 = 1e-14;

/// Immutable evaluation context for the unit ball in `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallGreenContext {
    pub n: u32,
    /// Exponent used by `G̃` and `H̃`.
    pub p: f64,
    pub c_n: f64,
    pub regime: Regime,
    /// `|S^{n-1}|`.
    pub sphere: f64,
    /// `|S^{n-2}|`, the measure of the rings in meridian coordinates.
    ring: f64,
    gammas: Option<(f64, f64)>,
}

/// Boundary behaviour of `H` at a point `x` near `∂B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HBoundaryEstimate {
    /// `d(x) = 1 - |x|`.
    pub d: f64,
    /// `|H(x,y) - c_n|y-x*|^{2-n}| / (d(x)|y-x*|^{2-n})`.
    pub image_ratio: f64,
    /// `ν·∇_x H(x,y)|_{y=x}` by central differences, `h = d/100`.
    pub normal_fd: f64,
    /// The same derivative in closed form.
    pub normal_exact: f64,
    /// `normal_fd · d^{n-1}`.
    pub ratio_fd: f64,
    /// `normal_exact · d^{n-1}`.
    pub ratio_exact: f64,
}

/// One row of [`BallGreenContext::check_htilde_boundary`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HTildeBoundaryPoint {
    pub d: f64,
    /// `ν·∇_x H̃(x,y)|_{y=x}`.
    pub normal_derivative: f64,
    /// `normal_derivative · d^{(n-2)p-1}`.
    pub ratio: f64,
}

/// Normal derivative of `H̃` on the diagonal along a ray towards `∂B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HTildeBoundaryEstimate {
    pub n: u32,
    pub p: f64,
    pub points: Vec<HTildeBoundaryPoint>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl HTildeBoundaryEstimate {
    pub fn all_positive(&self) -> bool {
        self.min_ratio > 0.0
    }

    /// `max/min` ratio over the grid.
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `1 - (1-g)^p`.
fn gap1(p: f64, g: f64) -> f64 {
    -(p * (-g.min(1.0)).ln_1p()).exp_m1()
}

/// `1 - (1-g)^p - p g`, with a series for small `g`.
fn gap2(p: f64, g: f64) -> f64 {
    if g.abs() < 0.25 {
        let mut term = 0.5 * p * (p - 1.0) * g * g;
        let mut sum = 0.0;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs() && k < 200.0 {
            sum += term;
            term *= -(p - k) / (k + 1.0) * g;
            k += 1.0;
        }
        -sum
    } else {
        gap1(p, g) - p * g
    }
}

/// A point of the ball in meridian coordinates about the axis `e₁`:
/// `x = x1 e₁ + x2 e⊥` with `x2 >= 0`.
#[derive(Debug, Clone, Copy)]
struct Mer {
    x1: f64,
    x2: f64,
}

impl Mer {
    fn r(&self) -> f64 {
        self.x1.hypot(self.x2)
    }

    fn phi(&self) -> f64 {
        self.x2.atan2(self.x1)
    }

    fn on_axis(&self) -> bool {
        self.x2 == 0.0
    }
}

/// An integration point `z = (z1, s)` of the meridian half disc with its
/// offsets from the two distinguished points `x` and `y`.
#[derive(Debug, Clone, Copy)]
struct Z {
    z1: f64,
    s: f64,
    dx: [f64; 2],
    dy: [f64; 2],
}

/// Splits `x` into its component along the unit vector `axis` and the
/// orthogonal remainder; returns the meridian point and the unit vector
/// `e⊥` (zero when `x` lies on the axis).
fn to_meridian(x: &[f64], axis: &[f64]) -> (Mer, Vec<f64>) {
    let x1 = dot(x, axis);
    let mut perp: Vec<f64> = x.iter().zip(axis).map(|(a, e)| a - x1 * e).collect();
    let x2 = perp.iter().map(|v| v * v).sum::<f64>().sqrt();
    if x2 <= 1e-15 * (1.0 + x1.abs()) {
        perp.iter_mut().for_each(|v| *v = 0.0);
        return (Mer { x1, x2: 0.0 }, perp);
    }
    perp.iter_mut().for_each(|v| *v /= x2);
    (Mer { x1, x2 }, perp)
}

impl BallGreenContext {
    pub fn new(n: u32, p: f64) -> Result<Self> {
        if n < 3 {
            return Err(domain!("the ball Green function needs n >= 3, got {n}"));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(domain!("exponent must be positive and finite, got {p}"));
        }
        Ok(BallGreenContext {
            n,
            p,
            c_n: c_n(n)?,
            regime: Regime::classify(n, p),
            sphere: sphere_measure(n)?,
            ring: sphere_measure(n - 1)?,
            gammas: gamma_constants(n, p).ok(),
        })
    }

    fn d(&self) -> f64 {
        self.n as f64 - 2.0
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `(n-2)p`.
    fn dp(&self) -> f64 {
        self.d() * self.p
    }

    fn point(&self, x: &[f64], open: bool) -> Result<f64> {
        if x.len() != self.n as usize {
            return Err(domain!("point has {} coordinates, expected {}", x.len(), self.n));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(domain!("point has non-finite coordinates"));
        }
        let r2 = dot(x, x);
        if r2 > 1.0 || (open && r2 >= 1.0) {
            let kind = if open { "open" } else { "closed" };
            return Err(domain!("|x| = {} lies outside the {kind} unit ball", r2.sqrt()));
        }
        Ok(r2)
    }

    /// `D(x,y) = 1 - 2x·y + |x|²|y|²`, so that `H = c_n D^{(2-n)/2}`.
    fn big_d(x: &[f64], y: &[f64]) -> f64 {
        1.0 - 2.0 * dot(x, y) + dot(x, x) * dot(y, y)
    }

    // ------------------------------------------------------------ G, H, τ

    /// `G(x,y) = c_n(|x-y|^{2-n} - D(x,y)^{(2-n)/2})`.
    pub fn green(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.point(x, false)?;
        self.point(y, false)?;
        let r2 = dist2(x, y);
        if r2 == 0.0 {
            return Err(Error::Singularity(format!("G(x,y) at x = y")));
        }
        let h = -0.5 * self.d();
        Ok(self.c_n * (r2.powf(h) - Self::big_d(x, y).powf(h)))
    }

    /// `H(x,y) = c_n|x-y|^{2-n} - G(x,y)`. Defined on the diagonal.
    pub fn regular_part(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.point(x, false)?;
        self.point(y, false)?;
        let dd = Self::big_d(x, y);
        if !(dd > 0.0) {
            return Err(Error::Singularity(format!("H(x,y) at a boundary point with x = y")));
        }
        Ok(self.c_n * dd.powf(-0.5 * self.d()))
    }

    /// Robin function `τ(x) = H(x,x) = c_n(1-|x|²)^{2-n}`.
    pub fn robin(&self, x: &[f64]) -> Result<f64> {
        let r2 = self.point(x, true)?;
        Ok(self.c_n * (1.0 - r2).powf(-self.d()))
    }

    /// `∇_x H(x,y) = c_n(n-2) D^{-n/2}(y - |y|²x)`.
    pub fn grad_regular(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.point(x, false)?;
        let y2 = self.point(y, false)?;
        let dd = Self::big_d(x, y);
        if !(dd > 0.0) {
            return Err(Error::Singularity(format!("∇H(x,y) at a boundary point with x = y")));
        }
        let k = self.c_n * self.d() * dd.powf(-0.5 * self.nf());
        Ok(x.iter().zip(y).map(|(a, b)| k * (b - y2 * a)).collect())
    }

    /// `∇_x G(x,y)`.
    pub fn grad_green(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let gh = self.grad_regular(x, y)?;
        let r2 = dist2(x, y);
        if r2 == 0.0 {
            return Err(Error::Singularity(format!("∇G(x,y) at x = y")));
        }
        let k = -self.c_n * self.d() * r2.powf(-0.5 * self.nf());
        Ok(x.iter().zip(y).zip(&gh).map(|((a, b), h)| k * (a - b) - h).collect())
    }

    /// `ν_x·∇_x H(x,y)|_{y=x} = c_n(n-2)|x|(1-|x|²)^{1-n}`.
    pub fn robin_normal_derivative(&self, x: &[f64]) -> Result<f64> {
        let r2 = self.point(x, true)?;
        Ok(self.c_n * self.d() * r2.sqrt() * (1.0 - r2).powf(1.0 - self.nf()))
    }

    /// Boundary estimates for `H` at `x` with `d(x) < 1/4`: the image-point
    /// comparison at `y` and the normal derivative on the diagonal.
    pub fn check_h_boundary(&self, x: &[f64], y: &[f64]) -> Result<HBoundaryEstimate> {
        let r2 = self.point(x, true)?;
        self.point(y, true)?;
        let r = r2.sqrt();
        let d = 1.0 - r;
        if !(d < 0.25) {
            return Err(domain!("check_h_boundary needs d(x) < 1/4, got {d}"));
        }
        let nu: Vec<f64> = x.iter().map(|v| v / r).collect();
        let star: Vec<f64> = x.iter().zip(&nu).map(|(a, v)| a + 2.0 * d * v).collect();
        let ys = dist2(y, &star).powf(-0.5 * self.d());
        let image_ratio = (self.regular_part(x, y)? - self.c_n * ys).abs() / (d * ys);

        let h = d / 100.0;
        let shift = |s: f64| -> Vec<f64> { x.iter().zip(&nu).map(|(a, v)| a + s * v).collect() };
        let normal_fd = (self.regular_part(&shift(h), x)? - self.regular_part(&shift(-h), x)?) / (2.0 * h);
        let normal_exact = self.robin_normal_derivative(x)?;
        let scale = d.powf(self.nf() - 1.0);
        Ok(HBoundaryEstimate {
            d,
            image_ratio,
            normal_fd,
            normal_exact,
            ratio_fd: normal_fd * scale,
            ratio_exact: normal_exact * scale,
        })
    }

    // ------------------------------------------------------------ rings

    /// Average of `(A - B cos θ)^{-α}` over the `(n-2)`-sphere of a ring,
    /// i.e. `∫₀^π (A - B cos θ)^{-α} sin^{n-3}θ dθ / ∫₀^π sin^{n-3}θ dθ`.
    /// `amb = A - B` is passed separately for accuracy near the ring.
    fn ring0(&self, alpha: f64, a: f64, b: f64, amb: f64) -> f64 {
        if b == 0.0 {
            return a.powf(-alpha);
        }
        let k = b / a;
        let w = amb * (a + b) / (a * a);
        let c = 0.5 * (self.nf() - 1.0);
        a.powf(-alpha) * hyp2f1_w(0.5 * alpha, 0.5 * (alpha + 1.0), c, k * k, w)
    }

    /// Ring average of `(A - B cos θ)^{-α} cos θ`.
    fn ring1(&self, alpha: f64, a: f64, b: f64, amb: f64) -> f64 {
        if b == 0.0 {
            return 0.0;
        }
        let k = b / a;
        let w = amb * (a + b) / (a * a);
        let c = 0.5 * (self.nf() + 1.0);
        a.powf(-alpha) * alpha * k / (self.nf() - 1.0) * hyp2f1_w(0.5 * (alpha + 1.0), 0.5 * (alpha + 2.0), c, k * k, w)
    }

    /// Ring invariants for the pair `x` (meridian point) and the ring through
    /// `z`: `|x-z|² = A - B cos θ` and `D(x,z) = A' - B cos θ`.
    fn ring_terms(x: Mer, z: &Z) -> [f64; 5] {
        let t2 = z.z1 * z.z1 + z.s * z.s;
        let xr2 = x.x1 * x.x1 + x.x2 * x.x2;
        let b = 2.0 * x.x2 * z.s;
        let amb = z.dx[0] * z.dx[0] + z.dx[1] * z.dx[1];
        let a = amb + b;
        let ap = 1.0 - 2.0 * x.x1 * z.z1 + xr2 * t2;
        [a, b, amb, ap, ap - b]
    }

    /// Ring average of `G(x, ·)`.
    fn ring_green(&self, x: Mer, z: &Z) -> f64 {
        let [a, b, amb, ap, apmb] = Self::ring_terms(x, z);
        let al = 0.5 * self.d();
        self.c_n * (self.ring0(al, a, b, amb) - self.ring0(al, ap, b, apmb))
    }

    /// Ring average of `∇_x G(x, ·)` in the frame `(e₁, e⊥)`.
    fn ring_grad_green(&self, x: Mer, z: &Z) -> [f64; 2] {
        let [a, b, amb, ap, apmb] = Self::ring_terms(x, z);
        let al = 0.5 * self.nf();
        let t2 = z.z1 * z.z1 + z.s * z.s;
        let k = -self.c_n * self.d();
        let j0 = self.ring0(al, a, b, amb);
        let j0p = self.ring0(al, ap, b, apmb);
        let g1 = k * (-z.dx[0] * j0 + (z.z1 - t2 * x.x1) * j0p);
        if x.on_axis() {
            return [g1, 0.0];
        }
        let j1 = self.ring1(al, a, b, amb);
        let j1p = self.ring1(al, ap, b, apmb);
        let g2 = k * (-z.dx[1] * j0 + z.s * (j0 - j1) + z.s * j1p - t2 * x.x2 * j0p);
        [g1, g2]
    }

    /// `∫_B K(x,z) S(z) dz` for `S` symmetric about the axis through `y`,
    /// as a 2D integral in polar coordinates `(t, φ)` of the meridian half
    /// disc. Point singularities sit at `x` and `y` with the given orders
    /// (`None`: integrand bounded there); near them the integrand sees the
    /// offsets `z - x`, `z - y` to full relative accuracy.
    fn meridian_volume<F: Fn(&Z) -> f64>(
        &self,
        x: Mer,
        y: Mer,
        orders: [Option<f64>; 2],
        tol: f64,
        floor: f64,
        f: F,
    ) -> Result<QuadResult> {
        let e = self.n as i32 - 2;
        let nm1 = self.n as i32 - 1;
        let ring = self.ring;
        let weight = |t: f64, phi: f64| ring * t.powi(nm1) * phi.sin().powi(e);
        let g = |t: f64, phi: f64| {
            let (sn, cs) = phi.sin_cos();
            let (z1, s) = (t * cs, t * sn);
            let z = Z { z1, s, dx: [z1 - x.x1, s - x.x2], dy: [z1 - y.x1, s - y.x2] };
            weight(t, phi) * f(&z)
        };
        let same = x.x1 == y.x1 && x.x2 == y.x2;
        let verts = [x, y];
        let local = |k: usize, m: f64, rho: f64, ddt: f64, ddp: f64| {
            let v = verts[k];
            let (t0, phi0) = (v.r(), v.phi());
            let (dt, dp) = (rho * ddt, rho * ddp);
            let (t, phi) = (t0 + dt, phi0 + dp);
            let (sn, cs) = phi.sin_cos();
            let (z1, s) = (t * cs, t * sn);
            let h = (0.5 * dp).sin();
            let (sm, cm) = (phi0 + 0.5 * dp).sin_cos();
            let off = [dt * cs - 2.0 * t0 * h * sm, dt * sn + 2.0 * t0 * h * cm];
            let other = verts[1 - k];
            let far = [z1 - other.x1, s - other.x2];
            let (dx, dy) = match (k, same) {
                (_, true) => (off, off),
                (0, _) => (off, far),
                _ => (far, off),
            };
            rho.powf(2.0 - m) * weight(t, phi) * f(&Z { z1, s, dx, dy })
        };
        let lx = |rho: f64, a: f64, b: f64| local(0, orders[0].unwrap_or(2.0), rho, a, b);
        let ly = |rho: f64, a: f64, b: f64| local(1, orders[1].unwrap_or(2.0), rho, a, b);
        let mut q = Quad2d::new((0.0, 1.0), (0.0, PI))
            .options(QuadOptions { abs_tol: floor, rel_tol: tol, max_cells: 60_000 });
        let interior = |v: Mer| v.r() > CENTRE && v.r() < 1.0;
        if let Some(m) = orders[0] {
            if interior(x) {
                q = q.singular(Singularity::new((x.r(), x.phi()), m).with_local(&lx));
            }
        }
        if let Some(m) = orders[1] {
            if interior(y) && !same {
                q = q.singular(Singularity::new((y.r(), y.phi()), m).with_local(&ly));
            }
        }
        q.integrate(g)
    }

    // ------------------------------------------------------------ G̃

    fn require_tilde(&self) -> Result<()> {
        let d = self.d();
        let (lo, hi) = (2.0 / d, self.nf() / d);
        if !(self.p > lo && self.p < hi) {
            return Err(Error::Regime(format!(
                "G̃ needs p in ({lo}, {hi}) for n = {}, got {}",
                self.n, self.p
            )));
        }
        Ok(())
    }

    fn require_htilde(&self) -> Result<(f64, f64)> {
        self.require_tilde()?;
        self.gammas.ok_or_else(|| Error::Pole(format!("γ constants at n = {}, p = {}", self.n, self.p)))
    }

    /// Natural size of `G^p` at unit distance, used as an absolute floor.
    fn floor(&self, tol: f64) -> f64 {
        1e-3 * tol * self.c_n.powf(self.p)
    }

    fn settle(r: QuadResult, what: &str) -> Result<f64> {
        if !r.converged {
            return Err(Error::Consistency(format!(
                "{what}: quadrature stopped at error {:.3e} for value {:.6e}",
                r.abs_error, r.value
            )));
        }
        Ok(r.value)
    }

    /// `g(t) = G(t e, 0) = c_n(t^{2-n} - 1)`.
    fn g_radial(&self, t: f64) -> f64 {
        self.c_n * (-self.d() * t.ln()).exp_m1()
    }

    /// `G̃(x,y)`: the radial formula when `y = 0`, the Green representation
    /// otherwise.
    pub fn gtilde(&self, x: &[f64], y: &[f64], tol: f64) -> Result<f64> {
        let y2 = self.point(y, true)?;
        if y2.sqrt() < CENTRE {
            self.gtilde_radial(x, tol)
        } else {
            self.gtilde_representation(x, y, tol)
        }
    }

    /// `G̃(x,0) = w(|x|)`, the solution of the radial two-point problem
    /// `-w'' - (n-1)w'/r = g(r)^p`, `w(1) = 0`, written through its Green
    /// function `(max(r,t)^{2-n} - 1)/(n-2)` and integrated by quadrature.
    pub fn gtilde_radial(&self, x: &[f64], tol: f64) -> Result<f64> {
        self.require_tilde()?;
        let r = self.point(x, false)?.sqrt();
        if r < CENTRE {
            return Err(Error::Singularity(format!("G̃(x,0) at x = 0")));
        }
        let (p, d) = (self.p, self.d());
        let nm1 = self.n as i32 - 1;
        let src = |t: f64| t.powi(nm1) * self.g_radial(t).max(0.0).powf(p);
        let opts = QuadOptions { abs_tol: self.floor(tol), rel_tol: tol, max_cells: 20_000 };
        let inner = Quad1d::new(0.0, r).lower_singularity(self.nf() - self.dp()).options(opts).integrate(src)?;
        let outer = if r < 1.0 {
            Quad1d::new(r, 1.0).options(opts).integrate(|t| (-d * t.ln()).exp_m1() * src(t))?
        } else {
            QuadResult::ZERO
        };
        let w = (-d * r.ln()).exp_m1() * inner + outer;
        Self::settle(w.scale(1.0 / d), "G̃ radial")
    }

    /// `G̃(x,y) = ∫_B G(x,z) G(z,y)^p dz` by quadrature of the image formula.
    pub fn gtilde_representation(&self, x: &[f64], y: &[f64], tol: f64) -> Result<f64> {
        self.require_tilde()?;
        self.point(x, false)?;
        let y2 = self.point(y, true)?;
        if dist2(x, y) == 0.0 {
            return Err(Error::Singularity(format!("G̃(x,y) at x = y")));
        }
        let (p, d) = (self.p, self.d());
        let c = self.c_n;
        let nm1 = self.n as i32 - 1;
        let e = self.n as i32 - 2;
        let opts = QuadOptions { abs_tol: self.floor(tol), rel_tol: tol, max_cells: 20_000 };
        if y2.sqrt() < CENTRE {
            // Nested 1D: radius outside, polar angle to x inside.
            let r = dot(x, x).sqrt();
            let ring = self.ring;
            let inner = |t: f64| -> Result<f64> {
                let k = |phi: f64| {
                    let (sn, cs) = phi.sin_cos();
                    let a = (r - t) * (r - t) + 2.0 * r * t * (1.0 - cs);
                    let dd = 1.0 - 2.0 * r * t * cs + r * r * t * t;
                    c * (a.powf(-0.5 * d) - dd.powf(-0.5 * d)) * sn.powi(e)
                };
                let q = Quad1d::new(0.0, PI).options(QuadOptions { abs_tol: 0.0, rel_tol: 0.1 * tol, max_cells: 20_000 });
                Ok(ring * q.integrate(k)?.value)
            };
            let err = core::cell::Cell::new(None);
            let f = |t: f64| match inner(t) {
                Ok(v) => t.powi(nm1) * self.g_radial(t).max(0.0).powf(p) * v,
                Err(er) => {
                    err.set(Some(er));
                    0.0
                }
            };
            let res = Quad1d::new(0.0, 1.0)
                .breaks(&[r])
                .lower_singularity(self.nf() - self.dp())
                .options(opts)
                .integrate(f)?;
            if let Some(er) = err.take() {
                return Err(er);
            }
            return Self::settle(res, "G̃ representation");
        }
        let axis: Vec<f64> = y.iter().map(|v| v / y2.sqrt()).collect();
        let (xm, _) = to_meridian(x, &axis);
        let y1 = y2.sqrt();
        let ym = Mer { x1: y1, x2: 0.0 };
        let xo = if xm.on_axis() { 2.0 } else { 1.5 };
        let f = |z: &Z| {
            let rho2 = z.dy[0] * z.dy[0] + z.dy[1] * z.dy[1];
            let dy = 1.0 - 2.0 * z.z1 * y1 + (z.z1 * z.z1 + z.s * z.s) * y1 * y1;
            let g = (rho2 / dy).powf(0.5 * d);
            let gp = c.powf(p) * rho2.powf(-0.5 * d * p) * (1.0 - g).max(0.0).powf(p);
            gp * self.ring_green(xm, z)
        };
        let orders = [Some(xo), Some(self.nf() - self.dp())];
        let res = self.meridian_volume(xm, ym, orders, tol, self.floor(tol), f)?;
        Self::settle(res, "G̃ representation")
    }

    // ------------------------------------------------------------ H̃

    /// Exponent `σ` with `-Δ_x H̃(x,y) = O(|x-y|^{-σ})` near `y`.
    fn residual_order(&self) -> f64 {
        let (d, dp, n) = (self.d(), self.dp(), self.nf());
        match self.regime {
            Regime::LowA => (dp - n + 1.0).max(d * (self.p - 2.0)),
            _ => d * (self.p - 1.0),
        }
    }

    /// Constant value `κ|ζ-y|^{2-(n-2)p}` takes on `∂B`: `κ = γ₁` or `γ₁ - γ₂c_n`.
    fn boundary_coefficient(&self) -> Result<f64> {
        let (g1, g2) = self.require_htilde()?;
        Ok(match self.regime {
            Regime::LowA => g1 - g2 * self.c_n,
            _ => g1,
        })
    }

    /// `-Δ_x H̃(x,y)` at `z` in meridian coordinates about the axis through
    /// `y = y1 e₁`, from the closed-form residual.
    fn residual_mer(&self, y1: f64, z: &Z) -> f64 {
        let (p, d, c) = (self.p, self.d(), self.c_n);
        let (z1, s) = (z.z1, z.s);
        let rho2 = z.dy[0] * z.dy[0] + z.dy[1] * z.dy[1];
        let dy = 1.0 - 2.0 * z1 * y1 + (z1 * z1 + s * s) * y1 * y1;
        let g = (rho2 / dy).powf(0.5 * d);
        let lead = c.powf(p) * rho2.powf(-0.5 * d * p);
        match self.regime {
            Regime::LowA => {
                // ∇_x H(z,y)·(z-y)
                let gh = c * d * dy.powf(-0.5 * self.nf()) * (y1 * (1.0 - y1 * z1) * z.dy[0] - y1 * y1 * s * s);
                let k = 2.0 * p * c.powf(p - 1.0) / (d * p - 2.0 * (self.nf() - 1.0));
                lead * gap2(p, g) + k * gh * rho2.powf(-0.5 * d * (p - 1.0))
            }
            _ => lead * gap1(p, g),
        }
    }

    /// Radial residual for `y = 0`, where `H(·,0) = c_n` and `∇H(·,0) = 0`.
    fn residual_radial(&self, t: f64) -> f64 {
        let (p, d) = (self.p, self.d());
        let g = t.powf(d);
        let lead = self.c_n.powf(p) * t.powf(-d * p);
        match self.regime {
            Regime::LowA => lead * gap2(p, g),
            _ => lead * gap1(p, g),
        }
    }

    /// Singular profile `F` with `H̃ = F - G̃`: `γ₁ρ^{2-(n-2)p}`, minus
    /// `γ₂ H(x,y) ρ^{n-(n-2)p}` in `LOW_A`, where `ρ = |x-y|`.
    pub fn singular_profile(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let (g1, g2) = self.require_htilde()?;
        let r2 = dist2(x, y);
        if r2 == 0.0 {
            return Err(Error::Singularity(format!("singular profile at x = y")));
        }
        let mut f = g1 * r2.powf(1.0 - 0.5 * self.dp());
        if self.regime == Regime::LowA {
            f -= g2 * self.regular_part(x, y)? * r2.powf(0.5 * (self.nf() - self.dp()));
        }
        Ok(f)
    }

    /// `∇_x F(x,y)`.
    pub fn grad_singular_profile(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let (g1, g2) = self.require_htilde()?;
        let r2 = dist2(x, y);
        if r2 == 0.0 {
            return Err(Error::Singularity(format!("singular profile at x = y")));
        }
        let dp = self.dp();
        let k = -g1 * (dp - 2.0) * r2.powf(-0.5 * dp);
        let mut out: Vec<f64> = x.iter().zip(y).map(|(a, b)| k * (a - b)).collect();
        if self.regime == Regime::LowA {
            let n = self.nf();
            let h = self.regular_part(x, y)?;
            let gh = self.grad_regular(x, y)?;
            let pw = r2.powf(0.5 * (n - dp));
            let k2 = h * (n - dp) * r2.powf(0.5 * (n - dp) - 1.0);
            for ((o, (a, b)), gi) in out.iter_mut().zip(x.iter().zip(y)).zip(&gh) {
                *o -= g2 * (gi * pw + k2 * (a - b));
            }
        }
        Ok(out)
    }

    /// `H̃(x,y)`, including the diagonal `x = y` where it equals `τ̃(x)`.
    pub fn htilde(&self, x: &[f64], y: &[f64], tol: f64) -> Result<f64> {
        Ok(self.htilde_parts(x, y, tol, false)?[0])
    }

    /// `∇_x H̃(x,y)`, including the diagonal.
    pub fn grad_htilde(&self, x: &[f64], y: &[f64], tol: f64) -> Result<Vec<f64>> {
        let (xm, e1, e2) = self.frame(x, y)?;
        let [g1, g2] = self.htilde_mer(xm, dot(y, y).sqrt(), tol, true)?;
        Ok(e1.iter().zip(&e2).map(|(a, b)| g1 * a + g2 * b).collect())
    }

    /// `∇_x G̃(x,y) = ∇_x F(x,y) - ∇_x H̃(x,y)` for `x ≠ y`.
    pub fn grad_gtilde(&self, x: &[f64], y: &[f64], tol: f64) -> Result<Vec<f64>> {
        let gf = self.grad_singular_profile(x, y)?;
        let gh = self.grad_htilde(x, y, tol)?;
        Ok(gf.iter().zip(&gh).map(|(a, b)| a - b).collect())
    }

    fn htilde_parts(&self, x: &[f64], y: &[f64], tol: f64, grad: bool) -> Result<[f64; 2]> {
        let (xm, _, _) = self.frame(x, y)?;
        self.htilde_mer(xm, dot(y, y).sqrt(), tol, grad)
    }

    /// Meridian frame about the axis through `y` (through `x` when `y = 0`,
    /// `e₁` when both vanish): `(x in meridian coordinates, e₁, e⊥)`.
    fn frame(&self, x: &[f64], y: &[f64]) -> Result<(Mer, Vec<f64>, Vec<f64>)> {
        self.require_htilde()?;
        self.point(x, true)?;
        let y2 = self.point(y, true)?;
        let n = self.n as usize;
        let mut e1 = vec![0.0; n];
        let src = if y2.sqrt() >= CENTRE { y } else { x };
        let r = dot(src, src).sqrt();
        if r >= CENTRE {
            e1.iter_mut().zip(src).for_each(|(a, b)| *a = b / r);
        } else {
            e1[0] = 1.0;
        }
        let (mut xm, e2) = to_meridian(x, &e1);
        if dist2(x, y) == 0.0 {
            // exact diagonal, free of rounding in the projection
            xm = Mer { x1: y2.sqrt(), x2: 0.0 };
        }
        Ok((xm, e1, e2))
    }

    /// `H̃` (`grad = false`, returned in slot 0) or `∇_x H̃` in the frame
    /// `(e₁, e⊥)` (`grad = true`) at the meridian point `x` for the pole
    /// `y1 e₁`.
    fn htilde_mer(&self, x: Mer, y1: f64, tol: f64, grad: bool) -> Result<[f64; 2]> {
        if y1 < CENTRE {
            return self.htilde_radial(x.r(), tol, grad);
        }
        let ym = Mer { x1: y1, x2: 0.0 };
        let sigma = self.residual_order();
        let n = self.nf();
        let diag = x.on_axis() && x.x1 == y1;
        let floor = self.floor(tol);
        let bc = self.boundary_coefficient()?;
        let bdata = |phi: f64| {
            let (sn, cs) = phi.sin_cos();
            let r2 = (cs - y1) * (cs - y1) + sn * sn;
            bc * r2.powf(1.0 - 0.5 * self.dp())
        };
        let x_order = |value: bool| match (value, diag) {
            (true, true) => 2.0 - sigma,
            (false, true) => 1.0 - sigma,
            (true, false) if x.on_axis() => 2.0,
            (true, false) => 1.5,
            (false, false) => 1.0,
        };
        if !grad {
            let orders = [Some(x_order(true)), Some(n - sigma)];
            let vol = self.meridian_volume(x, ym, orders, tol, floor, |z| self.residual_mer(y1, z) * self.ring_green(x, z))?;
            let bnd = self.poisson(x, tol, &bdata, 0)?;
            return Ok([Self::settle(vol + bnd, "H̃")?, 0.0]);
        }
        let orders = [Some(x_order(false)), Some(n - sigma)];
        let mut out = [0.0; 2];
        let comps = if x.on_axis() { 1 } else { 2 };
        for (k, slot) in out.iter_mut().enumerate().take(comps) {
            let vol = self.meridian_volume(x, ym, orders, tol, floor, |z| {
                self.residual_mer(y1, z) * self.ring_grad_green(x, z)[k]
            })?;
            let bnd = self.poisson(x, tol, &bdata, k + 1)?;
            *slot = Self::settle(vol + bnd, "∇H̃")?;
        }
        Ok(out)
    }

    /// Poisson extension of axisymmetric boundary data `b(φ)`
    /// (`which = 0`), or the `e₁` / `e⊥` component of its gradient
    /// (`which = 1, 2`), at the meridian point `x`.
    fn poisson<B: Fn(f64) -> f64>(&self, x: Mer, tol: f64, data: &B, which: usize) -> Result<QuadResult> {
        let n = self.nf();
        let xr2 = x.x1 * x.x1 + x.x2 * x.x2;
        let e = self.n as i32 - 2;
        let k = self.ring / self.sphere;
        let f = |phi: f64| {
            let (sn, cs) = phi.sin_cos();
            let b = 2.0 * x.x2 * sn;
            let amb = (x.x1 - cs) * (x.x1 - cs) + (x.x2 - sn) * (x.x2 - sn);
            let a = amb + b;
            let j = self.ring0(0.5 * n, a, b, amb);
            let v = match which {
                0 => (1.0 - xr2) * j,
                1 => -2.0 * x.x1 * j - n * (1.0 - xr2) * (x.x1 - cs) * self.ring0(0.5 * n + 1.0, a, b, amb),
                _ => {
                    -2.0 * x.x2 * j
                        - n * (1.0 - xr2)
                            * (x.x2 * self.ring0(0.5 * n + 1.0, a, b, amb) - sn * self.ring1(0.5 * n + 1.0, a, b, amb))
                }
            };
            k * data(phi) * sn.powi(e) * v
        };
        let phi_x = x.phi();
        let mut q = Quad1d::new(0.0, PI).options(QuadOptions { abs_tol: self.floor(tol), rel_tol: tol, max_cells: 20_000 });
        if phi_x > 0.0 && phi_x < PI {
            q = q.breaks(&[phi_x]);
        }
        q.integrate(f)
    }

    /// `H̃(·,0)` and its radial derivative from the radial representation.
    fn htilde_radial(&self, r: f64, tol: f64, grad: bool) -> Result<[f64; 2]> {
        let d = self.d();
        let nm1 = self.n as i32 - 1;
        let src = |t: f64| self.residual_radial(t) * t.powi(nm1);
        let opts = QuadOptions { abs_tol: self.floor(tol), rel_tol: tol, max_cells: 20_000 };
        let inner = if r > 0.0 { Quad1d::new(0.0, r).options(opts).integrate(src)? } else { QuadResult::ZERO };
        if grad {
            if r < CENTRE {
                return Ok([0.0, 0.0]);
            }
            let v = Self::settle(inner, "∇H̃ radial")?;
            return Ok([-v * r.powi(1 - self.n as i32), 0.0]);
        }
        let outer = Quad1d::new(r, 1.0).options(opts).integrate(|t| (-d * t.ln()).exp_m1() * src(t))?;
        let head = if r > 0.0 { inner.scale((-d * r.ln()).exp_m1()) } else { QuadResult::ZERO };
        let v = Self::settle((head + outer).scale(1.0 / d), "H̃ radial")?;
        Ok([v + self.boundary_coefficient()?, 0.0])
    }

    /// `τ̃(x) = H̃(x,x)` by Richardson extrapolation of `H̃(x + hν, x)` with
    /// offsets `h` and `h/2` along `ν = x/|x|` (`e₁` at the centre).
    pub fn tau_tilde_with(&self, x: &[f64], h: f64, tol: f64) -> Result<f64> {
        let r2 = self.point(x, true)?;
        let r = r2.sqrt();
        if !(h > 0.0) || r + h >= 1.0 {
            return Err(domain!("offset {h} leaves the ball from |x| = {r}"));
        }
        let mut nu = vec![0.0; self.n as usize];
        if r >= CENTRE {
            nu.iter_mut().zip(x).for_each(|(a, b)| *a = b / r);
        } else {
            nu[0] = 1.0;
        }
        let at = |s: f64| -> Result<f64> {
            let xs: Vec<f64> = x.iter().zip(&nu).map(|(a, v)| a + s * v).collect();
            self.htilde(&xs, x, tol)
        };
        Ok(2.0 * at(0.5 * h)? - at(h)?)
    }

    /// [`Self::tau_tilde_with`] at `h = d(x)/100`.
    pub fn tau_tilde(&self, x: &[f64], tol: f64) -> Result<f64> {
        let r = self.point(x, true)?.sqrt();
        self.tau_tilde_with(x, (1.0 - r) / 100.0, tol)
    }

    /// `ν·∇_x H̃(x,y)|_{y=x}` at `x = (1-d)ν` for a unit vector `ν`.
    pub fn htilde_normal_derivative(&self, nu: &[f64], d: f64, tol: f64) -> Result<f64> {
        let len = dot(nu, nu).sqrt();
        if nu.len() != self.n as usize || (len - 1.0).abs() > 1e-12 {
            return Err(domain!("ν must be a unit vector in R^{}", self.n));
        }
        if !(d > 0.0 && d < 1.0) {
            return Err(domain!("distance to the boundary must lie in (0, 1), got {d}"));
        }
        let x: Vec<f64> = nu.iter().map(|v| (1.0 - d) * v).collect();
        let g = self.grad_htilde(&x, &x, tol)?;
        Ok(dot(&g, nu))
    }

    /// Normal derivative of `H̃` on the diagonal against `d^{1-(n-2)p}` along
    /// the ray `ν`, for each `d` in `ds` (all in `(0, 1/4)`); `n >= 5`.
    pub fn check_htilde_boundary(&self, nu: &[f64], ds: &[f64], tol: f64) -> Result<HTildeBoundaryEstimate> {
        if self.n < 5 {
            return Err(domain!("the boundary estimate for H̃ needs n >= 5, got {}", self.n));
        }
        if !self.regime.is_low() {
            return Err(Error::Regime(format!("H̃ needs LOW_A or LOW_B, got {:?}", self.regime)));
        }
        if ds.is_empty() {
            return Err(domain!("empty distance grid"));
        }
        let mut points = Vec::with_capacity(ds.len());
        for &d in ds {
            if !(d > 0.0 && d < 0.25) {
                return Err(domain!("check_htilde_boundary needs d in (0, 1/4), got {d}"));
            }
            let nd = self.htilde_normal_derivative(nu, d, tol)?;
            points.push(HTildeBoundaryPoint { d, normal_derivative: nd, ratio: nd * d.powf(self.dp() - 1.0) });
        }
        let min_ratio = points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
        let max_ratio = points.iter().map(|p| p.ratio).fold(f64::NEG_INFINITY, f64::max);
        Ok(HTildeBoundaryEstimate { n: self.n, p: self.p, points, min_ratio, max_ratio })
    }

    /// `-Δ_x H̃(x,y)` from the closed-form residual, `x ≠ y`.
    pub fn htilde_residual(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.require_htilde()?;
        self.point(x, true)?;
        let y2 = self.point(y, true)?;
        if dist2(x, y) == 0.0 {
            return Err(Error::Singularity(format!("residual at x = y")));
        }
        if y2.sqrt() < CENTRE {
            return Ok(self.residual_radial(dot(x, x).sqrt()));
        }
        let (xm, _, _) = self.frame(x, y)?;
        let y1 = y2.sqrt();
        Ok(self.residual_mer(y1, &Z { z1: xm.x1, s: xm.x2, dx: [0.0; 2], dy: [xm.x1 - y1, xm.x2] }))
    }

    // ------------------------------------------------------------ Pohozaev

    /// Reduces a sphere `∂B(x0, r)` to the frame with `x0 = |x0| e₁`.
    /// Returns `(a, projection of e₁ onto e_j)`.
    fn sphere_frame(&self, x0: &[f64], r: f64, j: usize) -> Result<(f64, f64)> {
        let r2 = self.point(x0, true)?;
        if j >= self.n as usize {
            return Err(domain!("direction index {j} out of range for n = {}", self.n));
        }
        let a = r2.sqrt();
        if !(r > 0.0) || a + r >= 1.0 {
            return Err(domain!("sphere of radius {r} about |x0| = {a} is not inside the ball"));
        }
        let proj = if a >= CENTRE { x0[j] / a } else { 1.0 };
        Ok((a, proj))
    }

    fn planar(&self, x1: f64, x2: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.n as usize];
        v[0] = x1;
        v[1] = x2;
        v
    }

    /// `I₁(r) = ∫_{∂B(x0,r)} (2 ∂_νG ∂_jG - |∇G|² ν_j) dS` with `G = G(·,x0)`.
    ///
    /// The leading singular part integrates to zero exactly and is dropped
    /// from the integrand. `j` is zero-based.
    pub fn pohozaev_i1(&self, x0: &[f64], r: f64, j: usize, tol: f64) -> Result<f64> {
        let (a, proj) = self.sphere_frame(x0, r, j)?;
        if proj == 0.0 {
            return Ok(0.0);
        }
        let c0 = self.planar(a, 0.0);
        let g0 = -self.c_n * self.d() * r.powf(1.0 - self.nf());
        let err = core::cell::Cell::new(None);
        let res = axisymmetric(
            self.n,
            |cs, sn| {
                let x = self.planar(a + r * cs, r * sn);
                let h = match self.grad_regular(&x, &c0) {
                    Ok(v) => v,
                    Err(e) => {
                        err.set(Some(e));
                        return 0.0;
                    }
                };
                let (h1, h2) = (-h[0], -h[1]);
                let hw = h1 * cs + h2 * sn;
                let pair = 2.0 * (g0 * h1 + hw * g0 * cs + hw * h1) - (2.0 * g0 * hw + h1 * h1 + h2 * h2) * cs;
                pair * r.powf(self.nf() - 1.0)
            },
            tol,
        )?;
        if let Some(e) = err.take() {
            return Err(e);
        }
        Ok(proj * res.value)
    }

    /// `lim_{r→0} I₁(r) = 2c_n(n-2)|S^{n-1}| ∂_j H(x,x0)|_{x=x0}`.
    pub fn pohozaev_i1_limit(&self, x0: &[f64], j: usize) -> Result<f64> {
        let r2 = self.point(x0, true)?;
        if j >= self.n as usize {
            return Err(domain!("direction index {j} out of range for n = {}", self.n));
        }
        let dh = self.c_n * self.d() * (1.0 - r2).powf(1.0 - self.nf()) * x0[j];
        Ok(2.0 * self.c_n * self.d() * self.sphere * dh)
    }

    /// `I₂(r)` with `G = G(·,x0)` and `G̃ = G̃(·,x0)`:
    /// `-∫(∂_νG̃ ∂_jG + ∂_νG ∂_jG̃) + ∫(∇G·∇G̃)ν_j - (p+1)^{-1}∫G^{p+1}ν_j`
    /// over `∂B(x0, r)`. The parts that vanish by symmetry are dropped.
    pub fn pohozaev_i2(&self, x0: &[f64], r: f64, j: usize, tol: f64) -> Result<f64> {
        let (g1, g2) = self.require_htilde()?;
        let (a, proj) = self.sphere_frame(x0, r, j)?;
        // odd in x_j about the centre, and no flux transverse to x0
        if a < CENTRE || proj == 0.0 {
            return Ok(0.0);
        }
        let (n, d, dp, p, c) = (self.nf(), self.d(), self.dp(), self.p, self.c_n);
        let c0 = self.planar(a, 0.0);
        let g0 = -c * d * r.powf(1.0 - n);
        let f0 = -g1 * (dp - 2.0) * r.powf(1.0 - dp);
        let lead = (c * r.powf(-d)).powf(p + 1.0);
        let err = core::cell::Cell::new(None);
        let bil = |a: [f64; 2], b: [f64; 2], w: [f64; 2]| {
            let aw = a[0] * w[0] + a[1] * w[1];
            let bw = b[0] * w[0] + b[1] * w[1];
            -(aw * b[0] + bw * a[0]) + (a[0] * b[0] + a[1] * b[1]) * w[0]
        };
        let res = axisymmetric(
            self.n,
            |cs, sn| {
                let x = self.planar(a + r * cs, r * sn);
                let w = [cs, sn];
                let run = || -> Result<f64> {
                    let gh = self.grad_regular(&x, &c0)?;
                    let hh = self.regular_part(&x, &c0)?;
                    let h = [-gh[0], -gh[1]];
                    let xm = Mer { x1: a + r * cs, x2: r * sn };
                    let ght = self.htilde_mer(xm, a, tol, true)?;
                    let mut k = [-ght[0], -ght[1]];
                    if self.regime == Regime::LowA {
                        let pw = r.powf(n - dp);
                        let k2 = hh * (n - dp) * r.powf(n - dp - 1.0);
                        k[0] -= g2 * (gh[0] * pw + k2 * cs);
                        k[1] -= g2 * (gh[1] * pw + k2 * sn);
                    }
                    let f0v = [f0 * cs, f0 * sn];
                    let g0v = [g0 * cs, g0 * sn];
                    let grads = bil(f0v, h, w) + bil(k, g0v, w) + bil(k, h, w);
                    let gg = hh * r.powf(d) / c;
                    let pot = lead * ((p + 1.0) * (-gg).ln_1p()).exp_m1();
                    Ok((grads - pot * cs / (p + 1.0)) * r.powf(n - 1.0))
                };
                match run() {
                    Ok(v) => v,
                    Err(e) => {
                        err.set(Some(e));
                        0.0
                    }
                }
            },
            tol,
        )?;
        if let Some(e) = err.take() {
            return Err(e);
        }
        Ok(proj * res.value)
    }

    /// `lim_{r→0} I₂(r) = -(n-2)c_n|S^{n-1}| ∂_j H̃(x,x0)|_{x=x0}`.
    pub fn pohozaev_i2_limit(&self, x0: &[f64], j: usize, tol: f64) -> Result<f64> {
        self.point(x0, true)?;
        if j >= self.n as usize {
            return Err(domain!("direction index {j} out of range for n = {}", self.n));
        }
        let g = self.grad_htilde(x0, x0, tol)?;
        Ok(-self.d() * self.c_n * self.sphere * g[j])
    }
}
