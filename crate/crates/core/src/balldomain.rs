//! Radial solutions of the subcritical system on the unit ball and their
//! blow-up as `eps → 0`.
//!
//! Shooting from the centre with `U(0) = 1`, `V(0) = s` gives first zeros
//! `R_U(s)`, `R_V(s)`. Where they coincide both components vanish on the same
//! sphere, and `u(x) = R^α U(Rx)`, `v(x) = R^β V(Rx)` solves the Dirichlet
//! problem on the unit ball with `λ = R`.

use crate::entire::{EntireSolution, RadialProfile, SobolevQuotient};
use crate::error::{domain, Error, Result};
use crate::greenfun::BallGreenContext;
use crate::ode::{Dopri5, OdeOptions};
use crate::params::{make_params, Regime, SystemParams};
use crate::specfun::sphere_measure;
use crate::sphere::axisymmetric;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;
use serde::{Deserialize, Serialize};

/// Minimal blow-up rate for the Green comparison.
pub const MIN_LAMBDA: f64 = 100.0;
/// Relative tolerance of the energy identities.
pub const ENERGY_TOL: f64 = 1e-4;

const NB: usize = 7;

/// Shooting controls for the ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallOptions {
    /// Tolerance on the shooting mismatch `w / (R |w'(R)|)` of the component
    /// `w` that survives the first zero `R`.
    pub tol: f64,
    /// Radius by which both components must have vanished.
    pub r_max: f64,
    /// Profile samples per decade of radius.
    pub points_per_decade: f64,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions { tol: 1e-12, r_max: 1e12, points_per_decade: 40.0 }
    }
}

/// Radial solution on the unit ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSolution {
    pub params: SystemParams,
    /// Profile of `(u, v, u', v')` in `|x| ∈ [0, 1]`.
    pub profile: RadialProfile,
    /// `M_ε = u(0)`.
    pub m_eps: f64,
    /// `λ_ε` with `λ_ε^{α_ε} = M_ε`.
    pub lambda_eps: f64,
    /// `s = V(0)` of the unscaled shot.
    pub shoot_param: f64,
    /// `S_ε = ∫|Δu|^{(p+1)/p} / ‖u‖_{q+1}^{(p+1)/p}`.
    pub energy_quotient: f64,
    /// The component that does not vanish exactly at `|x| = 1`, evaluated
    /// there (`u(1)` or `v(1)`).
    pub boundary_residual: f64,
    pub energy: BallEnergy,
}

/// `∫u^{q+1}`, `∫∇u·∇v` and `∫v^{p+1}` over the ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallEnergy {
    pub int_u_q1: f64,
    pub int_grad: f64,
    pub int_v_p1: f64,
    /// Largest pairwise relative difference.
    pub identity_error: f64,
}

/// Terms of the local Pohozaev identity on a sphere, `j`-th component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PohozaevRecord {
    /// `-∫(∂_νu ∂_jv + ∂_νv ∂_ju)`.
    pub normal_terms: f64,
    /// `∫(∇u·∇v) ν_j`.
    pub gradient_term: f64,
    /// `(p+1)^{-1} ∫v^{p+1} ν_j`.
    pub v_term: f64,
    /// `(q+1)^{-1} ∫u^{q+1} ν_j`.
    pub u_term: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / max |term|`, zero when every term vanishes.
    pub residual: f64,
}

/// One row of a blow-up scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub eps: f64,
    pub q_eps: f64,
    pub m_eps: Option<f64>,
    pub lambda_eps: Option<f64>,
    /// `ε M^κ` (HIGH), `ε M^{n/(n-2)+1} / log M` (LOG) or `ε M^{p+1}` (LOW).
    pub compensated: Option<f64>,
    /// Slope of `log M` against `log(1/ε)` from the previous row.
    pub slope_estimate: Option<f64>,
    pub energy_quotient: Option<f64>,
    pub error: Option<String>,
}

/// A blow-up scan over a decreasing list of `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupScan {
    pub n: u32,
    pub p: f64,
    pub regime: Regime,
    pub rows: Vec<ScanRow>,
    /// Least-squares slope of `log M` against `log(1/ε)` over the solved rows.
    pub slope: Option<f64>,
    /// The regime's exponent `1/κ`.
    pub predicted_slope: f64,
}

/// Deviation of `v` (or `u`) from its Green's-function approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenComparison {
    pub shells: Vec<f64>,
    /// `λ^{α0} v(ρ) / (A_{U0} G(ρe₁, 0))` per shell.
    pub ratios: Vec<f64>,
    pub max_deviation: f64,
}

/// Fitted majorant constants of the rescaled solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub eps: f64,
    /// `max V_ε (1 + |x|^{n-2})`.
    pub c_v: f64,
    /// `max U_ε / majorant` with the regime's majorant.
    pub c_u: f64,
}

/// The unscaled radial system. Powers are extended oddly so trial steps
/// that overshoot a zero stay finite.
struct Shooter {
    n: f64,
    p: f64,
    q: f64,
}

fn spow(x: f64, e: f64) -> f64 {
    x.signum() * x.abs().powf(e)
}

/// First zero `r` of either component, and the other component there as
/// `(value, derivative)`.
struct Shot {
    r: f64,
    u_first: bool,
    other: (f64, f64),
}

impl Shooter {
    fn rhs(&self, r: f64, y: &[f64; NB], dy: &mut [f64; NB]) {
        let (n, p, q) = (self.n, self.p, self.q);
        let k = (n - 1.0) / r;
        let w = r.powf(n - 1.0);
        dy[0] = y[1];
        dy[1] = -spow(y[2], p) - k * y[1];
        dy[2] = y[3];
        dy[3] = -spow(y[0], q) - k * y[3];
        dy[4] = w * y[0].abs().powf(q + 1.0);
        dy[5] = w * y[2].abs().powf(p + 1.0);
        dy[6] = w * y[1] * y[3];
    }

    fn start(&self, s: f64) -> (f64, [f64; NB]) {
        let (n, p) = (self.n, self.p);
        let sp = s.powf(p);
        let r0 = 1e-4 * sp.max(1.0).powf(-0.5);
        let r2 = r0 * r0;
        let vol = r0.powf(n) / n;
        let y = [
            1.0 - sp * r2 / (2.0 * n),
            -sp * r0 / n,
            s - r2 / (2.0 * n),
            -r0 / n,
            vol,
            vol * sp * s,
            0.0,
        ];
        (r0, y)
    }

    fn ode(&self, s: f64) -> Dopri5<NB, impl FnMut(f64, &[f64; NB], &mut [f64; NB]) + '_> {
        let (r0, y0) = self.start(s);
        Dopri5::new(move |r, y: &[f64; NB], dy: &mut [f64; NB]| self.rhs(r, y, dy), r0, y0, 0.1 * r0, OdeOptions::new(1e-13, 1e-300).controlled(4))
    }

    fn shoot(&self, s: f64, r_max: f64) -> Result<Shot> {
        let mut ode = self.ode(s);
        loop {
            if ode.t() >= r_max {
                return Err(Error::NotSubcritical(r_max));
            }
            ode.step(r_max)?;
            let y = ode.y();
            if y[0] <= 0.0 || y[2] <= 0.0 {
                let ru = if y[0] <= 0.0 { ode.locate(0, 0.0) } else { f64::INFINITY };
                let rv = if y[2] <= 0.0 { ode.locate(2, 0.0) } else { f64::INFINITY };
                let (r, u_first) = if ru <= rv { (ru, true) } else { (rv, false) };
                let st = ode.dense(r);
                let other = if u_first { (st[2], st[3]) } else { (st[0], st[1]) };
                return Ok(Shot { r, u_first, other });
            }
        }
    }

    /// Scale-free height `w / (r |w'|)` of the surviving component `w` at the
    /// first zero, negative when `U` vanishes first (`s` too large). Zero
    /// exactly when `R_U = R_V`.
    fn mismatch(&self, s: f64, r_max: f64) -> Result<f64> {
        let shot = self.shoot(s, r_max)?;
        let (w, dw) = shot.other;
        let h = w / (shot.r * dw.abs());
        Ok(if shot.u_first { -h } else { h })
    }
}

/// Radial solution on the unit ball at `(n, p, q_ε)`.
pub fn solve_ball(params: &SystemParams, opts: &BallOptions) -> Result<BallSolution> {
    if !(params.eps > 0.0) {
        return Err(domain!("the ball problem needs eps > 0, got {}", params.eps));
    }
    if !(params.p * params.q_eps > 1.0) {
        return Err(domain!("need p q_eps > 1"));
    }
    if !(opts.tol > 0.0 && opts.points_per_decade >= 4.0 && opts.r_max > 1.0) {
        return Err(domain!("invalid ball options {opts:?}"));
    }
    let sh = Shooter { n: params.dim(), p: params.p, q: params.q_eps };
    let f = |s: f64| sh.mismatch(s, opts.r_max);

    // Bracket: large s drives U to zero first (negative mismatch).
    let mut a = 1.0;
    let mut fa = f(a)?;
    let (mut b, mut fb) = (a, fa);
    let mut found = fa == 0.0;
    for _ in 0..60 {
        if found {
            break;
        }
        b = if fa > 0.0 { a * 2.0 } else { a * 0.5 };
        fb = f(b)?;
        if fb == 0.0 || fb.signum() != fa.signum() {
            found = true;
            break;
        }
        a = b;
        fa = fb;
    }
    if !found {
        return Err(Error::Shooting(format!("no sign change of R_U - R_V near s = {a}")));
    }
    let s = if fa == 0.0 {
        a
    } else if fb == 0.0 {
        b
    } else {
        illinois(&f, a, fa, b, fb, opts.tol)?
    };
    build(&sh, params, s, opts)
}

/// Bracketed secant with the Illinois modification.
fn illinois(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64, tol: f64) -> Result<f64> {
    let mut side = 0;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
        let fc = f(c)?;
        if fc.abs() < tol || (b - a).abs() <= 4.0 * f64::EPSILON * c.abs() {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::Shooting(format!("root finder stalled in [{a}, {b}]")))
}

/// Re-runs the converged shot, samples it and rescales to the unit ball.
fn build(sh: &Shooter, params: &SystemParams, s: f64, opts: &BallOptions) -> Result<BallSolution> {
    let (n, p, q) = (sh.n, sh.p, sh.q);
    let (alpha, beta) = (params.alpha_eps, params.beta_eps);
    let shot = sh.shoot(s, opts.r_max)?;
    let r_end = shot.r;
    let mut ode = sh.ode(s);
    let ratio = 10f64.powf(1.0 / opts.points_per_decade);
    let mut grid = vec![0.0];
    let mut states = vec![[1.0, 0.0, s, 0.0, 0.0, 0.0, 0.0]];
    let mut next = ode.t();
    grid.push(next);
    states.push(*ode.y());
    next *= ratio;
    while ode.t() < r_end {
        ode.step(r_end)?;
        while next < ode.t() && next < r_end * (1.0 - 1e-9) {
            grid.push(next);
            states.push(ode.dense(next));
            next *= ratio;
        }
    }
    let mut last = ode.dense(r_end);
    // Pin the vanishing component; the other one is the root finder's
    // residual.
    let residual = if shot.u_first { last[2] } else { last[0] };
    if shot.u_first {
        last[0] = 0.0;
    } else {
        last[2] = 0.0;
    }
    grid.push(r_end);
    states.push(last);

    let (ra, rb) = (r_end.powf(alpha), r_end.powf(beta));
    let profile = RadialProfile {
        grid: grid.iter().map(|r| r / r_end).collect(),
        u_vals: states.iter().map(|y| ra * y[0]).collect(),
        v_vals: states.iter().map(|y| rb * y[2]).collect(),
        du_vals: states.iter().map(|y| ra * r_end * y[1]).collect(),
        dv_vals: states.iter().map(|y| rb * r_end * y[3]).collect(),
    };
    let sph = sphere_measure(params.n)?;
    // Each moment scales by R^{α(q+1)-n} = R^{β(p+1)-n} = R^{α+β+2-n}.
    let scale = sph * r_end.powf(alpha * (q + 1.0) - n);
    let (iu, iv, ig) = (scale * last[4], scale * last[5], scale * last[6]);
    let rel = |a: f64, b: f64| ((a - b) / a.abs().max(b.abs())).abs();
    let identity_error = rel(iu, ig).max(rel(ig, iv)).max(rel(iu, iv));
    let energy = BallEnergy { int_u_q1: iu, int_grad: ig, int_v_p1: iv, identity_error };
    let energy_quotient = (iv.ln() - (p + 1.0) / (p * (q + 1.0)) * iu.ln()).exp();
    let m_eps = ra;
    Ok(BallSolution {
        params: *params,
        profile,
        m_eps,
        lambda_eps: r_end,
        shoot_param: s,
        energy_quotient,
        boundary_residual: if shot.u_first { rb * residual } else { ra * residual },
        energy,
    })
}

impl BallSolution {
    /// `(u, u', v, v')` at `|x| = rho` by cubic Hermite interpolation, with
    /// second derivatives taken from the equations.
    pub fn eval(&self, rho: f64) -> Result<[f64; 4]> {
        let g = &self.profile.grid;
        if !(rho >= 0.0 && rho <= 1.0) {
            return Err(domain!("radius {rho} outside [0, 1]"));
        }
        let k = match g.partition_point(|&x| x <= rho) {
            0 => 0,
            i if i >= g.len() => g.len() - 2,
            i => i - 1,
        };
        let (x0, x1) = (g[k], g[k + 1]);
        let h = x1 - x0;
        let t = (rho - x0) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t),
            t * (1.0 - t) * (1.0 - t),
            t * t * (3.0 - 2.0 * t),
            t * t * (t - 1.0),
        );
        let herm = |f0: f64, d0: f64, f1: f64, d1: f64| h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
        let pr = &self.profile;
        let (uu, vv) = (self.second(k), self.second(k + 1));
        Ok([
            herm(pr.u_vals[k], pr.du_vals[k], pr.u_vals[k + 1], pr.du_vals[k + 1]),
            herm(pr.du_vals[k], uu[0], pr.du_vals[k + 1], vv[0]),
            herm(pr.v_vals[k], pr.dv_vals[k], pr.v_vals[k + 1], pr.dv_vals[k + 1]),
            herm(pr.dv_vals[k], uu[1], pr.dv_vals[k + 1], vv[1]),
        ])
    }

    /// `(u'', v'')` at grid point `k`.
    fn second(&self, k: usize) -> [f64; 2] {
        let pr = &self.profile;
        let (n, p, q) = (self.params.dim(), self.params.p, self.params.q_eps);
        let x = pr.grid[k];
        let (vp, uq) = (spow(pr.v_vals[k], p), spow(pr.u_vals[k], q));
        if x == 0.0 {
            return [-vp / n, -uq / n];
        }
        [-vp - (n - 1.0) * pr.du_vals[k] / x, -uq - (n - 1.0) * pr.dv_vals[k] / x]
    }

    /// `λ_ε^{α_ε} / M_ε - 1`.
    pub fn lambda_relation_error(&self) -> f64 {
        self.lambda_eps.powf(self.params.alpha_eps) / self.m_eps - 1.0
    }
}

/// Local Pohozaev identity on `∂B(center, r)` in direction `j` (zero-based).
pub fn pohozaev_check(sol: &BallSolution, center: &[f64], r: f64, j: usize, tol: f64) -> Result<PohozaevRecord> {
    let n = sol.params.n;
    if center.len() != n as usize || j >= n as usize {
        return Err(domain!("centre must lie in R^{n} and j < {n}"));
    }
    let a = center.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(r > 0.0) || a + r >= 1.0 {
        return Err(domain!("sphere of radius {r} about |c| = {a} leaves the ball"));
    }
    let zero = PohozaevRecord {
        normal_terms: 0.0,
        gradient_term: 0.0,
        v_term: 0.0,
        u_term: 0.0,
        lhs: 0.0,
        rhs: 0.0,
        residual: 0.0,
    };
    // Every integrand is odd in the coordinates orthogonal to the centre.
    if a == 0.0 || center[j] == 0.0 {
        return Ok(zero);
    }
    let proj = center[j] / a;
    let (p, q) = (sol.params.p, sol.params.q_eps);
    let area = r.powi(n as i32 - 1);
    let err = core::cell::Cell::new(None);
    let term = |which: usize| -> Result<f64> {
        let res = axisymmetric(
            n,
            |cs, sn| {
                let (x1, x2) = (a + r * cs, r * sn);
                let rho = x1.hypot(x2);
                let [u, du, v, dv] = match sol.eval(rho) {
                    Ok(v) => v,
                    Err(e) => {
                        err.set(Some(e));
                        return 0.0;
                    }
                };
                let (h1, hn) = (x1 / rho, (x1 * cs + x2 * sn) / rho);
                let val = match which {
                    0 => -2.0 * du * dv * hn * h1,
                    1 => du * dv * cs,
                    2 => v.abs().powf(p + 1.0) * cs / (p + 1.0),
                    _ => u.abs().powf(q + 1.0) * cs / (q + 1.0),
                };
                val * area
            },
            tol,
        )?;
        if let Some(e) = err.take() {
            return Err(e);
        }
        Ok(proj * res.value)
    };
    let (t0, t1, t2, t3) = (term(0)?, term(1)?, term(2)?, term(3)?);
    let (lhs, rhs) = (t0 + t1, t2 + t3);
    let scale = t0.abs().max(t1.abs()).max(t2.abs()).max(t3.abs());
    let residual = if scale > 0.0 { (lhs - rhs).abs() / scale } else { 0.0 };
    Ok(PohozaevRecord { normal_terms: t0, gradient_term: t1, v_term: t2, u_term: t3, lhs, rhs, residual })
}

/// Exponent `κ` with `ε M^κ` (up to the LOG factor) bounded.
pub fn blowup_exponent(n: u32, p: f64) -> f64 {
    let d = n as f64 - 2.0;
    match Regime::classify(n, p) {
        Regime::High => n as f64 / (d * p - 2.0) + 1.0,
        Regime::Log => n as f64 / d + 1.0,
        Regime::LowA | Regime::LowB => p + 1.0,
    }
}

/// Compensated blow-up product `ε M_ε^κ` for the regime of `(n, p)`.
pub fn compensated(n: u32, p: f64, eps: f64, m: f64) -> f64 {
    let c = eps * m.powf(blowup_exponent(n, p));
    if Regime::classify(n, p) == Regime::Log {
        c / m.ln()
    } else {
        c
    }
}

/// Solves the ball problem along `eps_list` (strictly decreasing). Failed
/// rows carry their error and the scan goes on.
pub fn blowup_scan(n: u32, p: f64, eps_list: &[f64], opts: &BallOptions) -> Result<BlowupScan> {
    blowup_scan_with(n, p, eps_list, |prm| solve_ball(prm, opts))
}

/// [`blowup_scan`] with a caller-supplied solver (e.g. a parallel map
/// precomputed by the caller).
pub fn blowup_scan_with<F>(n: u32, p: f64, eps_list: &[f64], mut solve: F) -> Result<BlowupScan>
where
    F: FnMut(&SystemParams) -> Result<BallSolution>,
{
    if eps_list.is_empty() {
        return Err(domain!("empty eps list"));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(domain!("eps list must be strictly decreasing"));
    }
    let regime = make_params(n, p, eps_list[0])?.regime;
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let mut row = ScanRow {
            eps,
            q_eps: f64::NAN,
            m_eps: None,
            lambda_eps: None,
            compensated: None,
            slope_estimate: None,
            energy_quotient: None,
            error: None,
        };
        match make_params(n, p, eps).and_then(|prm| {
            row.q_eps = prm.q_eps;
            solve(&prm)
        }) {
            Ok(sol) => {
                row.m_eps = Some(sol.m_eps);
                row.lambda_eps = Some(sol.lambda_eps);
                row.compensated = Some(compensated(n, p, eps, sol.m_eps));
                row.energy_quotient = Some(sol.energy_quotient);
            }
            Err(e) => row.error = Some(format!("{e}")),
        }
        rows.push(row);
    }
    let mut prev: Option<(f64, f64)> = None;
    for row in rows.iter_mut() {
        if let Some(m) = row.m_eps {
            let pt = ((1.0 / row.eps).ln(), m.ln());
            if let Some(pv) = prev {
                row.slope_estimate = Some((pt.1 - pv.1) / (pt.0 - pv.0));
            }
            prev = Some(pt);
        }
    }
    let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.m_eps.map(|m| ((1.0 / r.eps).ln(), m.ln()))).collect();
    let slope = least_squares_slope(&pts);
    Ok(BlowupScan { n, p, regime, rows, slope, predicted_slope: 1.0 / blowup_exponent(n, p) })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// Limit of the compensated product predicted in closed form from the
/// entire ground state at the same `(n, p)`. The LOW branch evaluates
/// `τ̃(0)` to tolerance `tol`.
pub fn predicted_limit(ent: &EntireSolution, sobolev: f64, tol: f64) -> Result<f64> {
    let prm = &ent.params;
    let (n, p, q) = (prm.n, prm.p, prm.q0);
    let s_pow = sobolev.powf((1.0 - p * q) / (p * (q + 1.0)));
    let au = ent.a_u0.value().ok_or_else(|| Error::Divergence("A_U0".into()))?;
    match prm.regime {
        Regime::High => {
            let av = ent.a_v0.value().ok_or_else(|| Error::Divergence("A_V0".into()))?;
            Ok(s_pow * au * av * prm.c_n)
        }
        Regime::Log => {
            let nf = n as f64;
            Ok((p + 1.0) / (nf - 2.0) * ent.l.powf(nf / (nf - 2.0)) * s_pow * au * prm.c_n)
        }
        Regime::LowA | Regime::LowB => {
            let ctx = BallGreenContext::new(n, p)?;
            let tau = ctx.tau_tilde(&vec![0.0; n as usize], tol)?;
            Ok(s_pow * au.powf(p + 1.0) * tau.abs())
        }
    }
}

/// HIGH-regime limit of `ε M_ε^κ` obtained from the global Pohozaev identity
/// `nε∫v^{p+1} = ∫_{∂B} ∂_ν u ∂_ν v` together with the Green asymptotics of
/// both components: `A_{U0} A_{V0} / (n |S^{n-1}| ∫V_0^{p+1})`.
pub fn pohozaev_limit(ent: &EntireSolution, sobolev: &SobolevQuotient) -> Result<f64> {
    let prm = &ent.params;
    if prm.regime != Regime::High {
        return Err(Error::Regime(format!("the Pohozaev limit needs HIGH, got {:?}", prm.regime)));
    }
    let au = ent.a_u0.value().ok_or_else(|| Error::Divergence("A_U0".into()))?;
    let av = ent.a_v0.value().ok_or_else(|| Error::Divergence("A_V0".into()))?;
    let nf = prm.dim();
    Ok(au * av / (nf * sphere_measure(prm.n)? * sobolev.int_v_p1))
}

/// Compares `λ^{α0} v(ρ)` with `A_{U0} G(ρe₁, 0)` on the given shells.
/// Requires `λ_ε ≥` [`MIN_LAMBDA`].
pub fn v_green_approx(sol: &BallSolution, a_u0: f64, shells: &[f64]) -> Result<GreenComparison> {
    if sol.lambda_eps < MIN_LAMBDA {
        return Err(Error::InsufficientBlowup(sol.lambda_eps));
    }
    green_compare(sol, a_u0, shells, false)
}

/// [`v_green_approx`] without the blow-up gate, for following the deviation
/// along an ε-sequence that starts at moderate `λ_ε`.
pub fn v_green_trend(sol: &BallSolution, a_u0: f64, shells: &[f64]) -> Result<GreenComparison> {
    green_compare(sol, a_u0, shells, false)
}

/// HIGH-regime counterpart: `λ^{β0} u(ρ)` against `A_{V0} G(ρe₁, 0)`.
pub fn u_green_approx(sol: &BallSolution, a_v0: f64, shells: &[f64]) -> Result<GreenComparison> {
    if sol.params.regime != Regime::High {
        return Err(Error::Regime(format!("the u comparison needs HIGH, got {:?}", sol.params.regime)));
    }
    if sol.lambda_eps < MIN_LAMBDA {
        return Err(Error::InsufficientBlowup(sol.lambda_eps));
    }
    green_compare(sol, a_v0, shells, true)
}

fn green_compare(sol: &BallSolution, mass: f64, shells: &[f64], u_side: bool) -> Result<GreenComparison> {
    if shells.is_empty() || shells.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(domain!("shell radii must lie in (0, 1)"));
    }
    let prm = &sol.params;
    let nf = prm.dim();
    let expo = if u_side { prm.beta0 } else { prm.alpha0 };
    let scale = sol.lambda_eps.powf(expo);
    let mut ratios = Vec::with_capacity(shells.len());
    for &rho in shells {
        let [u, _, v, _] = sol.eval(rho)?;
        let g = prm.c_n * (rho.powf(2.0 - nf) - 1.0);
        let val = if u_side { u } else { v };
        ratios.push(scale * val / (mass * g));
    }
    let max_deviation = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    Ok(GreenComparison { shells: shells.to_vec(), ratios, max_deviation })
}

/// Majorant constants of `U_ε(y) = λ^{-α}u(y/λ)`, `V_ε(y) = λ^{-β}v(y/λ)` on
/// `B(0, λ)`: `V_ε ≤ C_V/(1+|y|^{n-2})` and the regime's bound for `U_ε`
/// (`1+|y|^{n-2}`, `(1+|y|^{n-2})/(1+log(1+|y|))` or `1+|y|^{(n-2)p-2}`).
pub fn check_decay(sol: &BallSolution) -> Result<DecayFit> {
    let prm = &sol.params;
    let d = prm.dim() - 2.0;
    let lam = sol.lambda_eps;
    let (ua, vb) = (lam.powf(-prm.alpha_eps), lam.powf(-prm.beta_eps));
    let pr = &sol.profile;
    let mut c_u: f64 = 0.0;
    let mut c_v: f64 = 0.0;
    for i in 0..pr.len() {
        let y = lam * pr.grid[i];
        let (u, v) = (ua * pr.u_vals[i], vb * pr.v_vals[i]);
        c_v = c_v.max(v * (1.0 + y.powf(d)));
        let weight = match prm.regime {
            Regime::High => 1.0 + y.powf(d),
            Regime::Log => (1.0 + y.powf(d)) / (1.0 + y.ln_1p()),
            Regime::LowA | Regime::LowB => 1.0 + y.powf(d * prm.p - 2.0),
        };
        c_u = c_u.max(u * weight);
    }
    if !(c_u.is_finite() && c_v.is_finite()) {
        return Err(Error::Consistency(format!("non-finite decay constants C_U = {c_u}, C_V = {c_v}")));
    }
    Ok(DecayFit { eps: prm.eps, c_v, c_u })
}

/// Energy identity `∫u^{q+1} = ∫∇u·∇v = ∫v^{p+1}`, checked to
/// [`ENERGY_TOL`].
pub fn energy(sol: &BallSolution) -> Result<BallEnergy> {
    let e = sol.energy;
    if e.identity_error > ENERGY_TOL {
        return Err(Error::Consistency(format!("energy identity off by {:.2e}", e.identity_error)));
    }
    Ok(e)
}
