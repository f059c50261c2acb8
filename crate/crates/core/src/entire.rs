//! Radial ground states of the entire problem
//! `-ΔU = V^p`, `-ΔV = U^{q0}` on `R^n` with `U(0) = 1`, by shooting on
//! `s = V(0)`.
//!
//! Each shot integrates the radial system together with its
//! `s`-sensitivities and the running moments `∫ r^{n-1} U^{q0}` etc.
//! A shot is classified by the first sign change of
//! `W = U + rU'/(n-2)` or `Z = V + rV'/(n-2)`. Both are decreasing
//! (`W' = -rV^p/(n-2)`) and tend to `U(∞)`, `V(∞)`, so a negative `W`
//! means `U` would cross zero later on. This classifies a shot long before
//! the crossing itself.

use crate::error::{Error, Result};
use crate::ode::{Dopri5, OdeOptions};
use crate::params::{Regime, SystemParams};
use crate::quadrature::{QuadOptions, Quad1d};
use crate::specfun::{ln_beta, sphere_measure};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_traits::Float;
use serde::{Deserialize, Serialize};

/// Variation allowed across a plateau.
pub const PLATEAU_TOL: f64 = 0.05;
/// Relative tolerance of the three-way energy identity.
pub const IDENTITY_TOL: f64 = 1e-4;

const GRID_PER_DECADE: f64 = 40.0;
const S_RANGE: (f64, f64) = (1e-6, 1e6);
const MAX_BISECTIONS: usize = 200;
const NU: usize = 12;
/// Profiles end where `min(U, V)` drops below this multiple of the
/// shooting error `|∂U/∂s| Δs`.
const TRUNCATION: f64 = 1e3;
/// Shortest accepted positivity window, as a fraction of `r_max`.
const WINDOW_SLACK: f64 = 0.1;

/// Radial profile sampled at increasing radii, starting at `r = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    pub u_vals: Vec<f64>,
    pub v_vals: Vec<f64>,
    pub du_vals: Vec<f64>,
    pub dv_vals: Vec<f64>,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Indices of the grid points in `[r_end / 10, r_end]`.
    pub fn last_decade(&self) -> core::ops::Range<usize> {
        let end = self.grid.len();
        let Some(&r_end) = self.grid.last() else { return 0..0 };
        let start = self.grid.iter().position(|&r| r >= 0.1 * r_end).unwrap_or(end);
        start..end
    }
}

/// How a shot left the positive cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crossing {
    /// `U` heads below zero first: `s` is too large.
    U,
    /// `V` heads below zero first: `s` is too small.
    V,
    /// Both stayed positive up to the integration limit.
    Neither,
}

/// One classified shot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shot {
    pub s: f64,
    pub crossing: Crossing,
    /// Radius of the classifying event (the limit for [`Crossing::Neither`]).
    pub radius: f64,
}

/// A plateau fit `f(r) ≈ value` over the last decade of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub value: f64,
    /// `(max - min) / |value|` over the fitted samples.
    pub variation: f64,
    pub samples: usize,
}

impl Plateau {
    pub fn is_flat(&self) -> bool {
        self.variation < PLATEAU_TOL
    }
}

/// An integral over `R^n` that may diverge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Norm {
    Finite { value: f64, error: f64 },
    Divergent,
}

impl Norm {
    pub fn value(&self) -> Option<f64> {
        match self {
            Norm::Finite { value, .. } => Some(*value),
            Norm::Divergent => None,
        }
    }
}

/// Decay constants of the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayConstants {
    /// `lim r^{n-2} V₀`.
    pub a: Plateau,
    /// `b₁`, `b₂` or `b₃`, depending on the regime.
    pub b: Plateau,
    /// `lim |x|^{n-2} V₀` from the flux `-r^{n-1}V₀'/(n-2)`.
    pub l: Plateau,
}

/// Radial moments `∫_0^R r^{n-1} f dr` at the truncation radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub radius: f64,
    pub u_q: f64,
    pub v_p: f64,
    pub u_q1: f64,
    pub v_p1: f64,
}

/// Shooting controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntireOptions {
    /// Relative bracket width at which bisection stops.
    pub tol: f64,
    /// Radius the positivity window has to reach.
    pub r_max: f64,
    /// Integration limit of a single shot.
    pub r_limit: f64,
}

impl Default for EntireOptions {
    fn default() -> Self {
        EntireOptions { tol: 1e-15, r_max: 1e3, r_limit: 1e24 }
    }
}

impl EntireOptions {
    fn ode(&self) -> OdeOptions {
        OdeOptions::new((0.1 * self.tol).max(1e-14), 1e-300).controlled(4)
    }
}

/// A converged ground state with its asymptotic constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntireSolution {
    pub profile: RadialProfile,
    /// `s* = V₀(0)`.
    pub shoot_param: f64,
    /// Final bracket `[s_lo, s_hi]` (`V` crosses at `s_lo`, `U` at `s_hi`).
    pub bracket: (f64, f64),
    pub a: f64,
    pub b: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub decay: DecayConstants,
    #[serde(rename = "A_U0")]
    pub a_u0: Norm,
    #[serde(rename = "A_V0")]
    pub a_v0: Norm,
    pub moments: Moments,
    pub params: SystemParams,
    /// Every classified shot, in the order taken.
    pub shots: Vec<Shot>,
    pub warnings: Vec<String>,
}

/// Energies of the ground state and the resulting Sobolev constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevQuotient {
    /// `(∫V₀^{p+1})^{2(p+1)/(np)}`.
    pub s: f64,
    pub int_u_q1: f64,
    /// `∫|ΔU₀|^{(p+1)/p}`, equal to `∫V₀^{p+1}` through `ΔU₀ = -V₀^p`.
    pub int_lap_u: f64,
    pub int_v_p1: f64,
    pub identity_error: f64,
}

/// Radial system with sensitivities and moments.
///
/// Layout: `U, U', V, V', ∂U, ∂U', ∂V, ∂V'` (derivatives in `s`), then the
/// moments of `U^q, V^p, U^{q+1}, V^{p+1}` against `r^{n-1}`.
struct System {
    n: f64,
    p: f64,
    q: f64,
}

impl System {
    fn rhs(&self, r: f64, y: &[f64; NU], dy: &mut [f64; NU]) {
        let (n, p, q) = (self.n, self.p, self.q);
        let u = y[0].max(0.0);
        let v = y[2].max(0.0);
        let k = (n - 1.0) / r;
        let (vp, uq) = (v.powf(p), u.powf(q));
        dy[0] = y[1];
        dy[1] = -vp - k * y[1];
        dy[2] = y[3];
        dy[3] = -uq - k * y[3];
        let dvp = if v > 0.0 { p * vp / v } else { 0.0 };
        let duq = if u > 0.0 { q * uq / u } else { 0.0 };
        dy[4] = y[5];
        dy[5] = -dvp * y[6] - k * y[5];
        dy[6] = y[7];
        dy[7] = -duq * y[4] - k * y[7];
        let w = (n - 1.0) * r.ln();
        let moment = |base: f64, e: f64| if base > 0.0 { (w + e * base.ln()).exp() } else { 0.0 };
        dy[8] = moment(u, q);
        dy[9] = moment(v, p);
        dy[10] = moment(u, q + 1.0);
        dy[11] = moment(v, p + 1.0);
    }

    /// Taylor start at a radius where the quartic terms are below rounding.
    fn start(&self, s: f64) -> (f64, [f64; NU]) {
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
            -p * sp / s * r2 / (2.0 * n),
            -p * sp / s * r0 / n,
            1.0,
            0.0,
            vol,
            vol * sp,
            vol,
            vol * sp * s,
        ];
        (r0, y)
    }

    fn w(&self, r: f64, y: &[f64; NU]) -> f64 {
        y[0] + r * y[1] / (self.n - 2.0)
    }

    fn z(&self, r: f64, y: &[f64; NU]) -> f64 {
        y[2] + r * y[3] / (self.n - 2.0)
    }
}

struct Trace {
    grid: Vec<f64>,
    states: Vec<[f64; NU]>,
}

impl Trace {
    fn new() -> Self {
        Trace { grid: Vec::new(), states: Vec::new() }
    }
}

fn validate(params: &SystemParams, opts: &EntireOptions) -> Result<()> {
    let n = params.dim();
    let lo = 2.0 / (n - 2.0);
    let hi = (n + 2.0) / (n - 2.0);
    if params.eps != 0.0 {
        return Err(Error::Domain(format!("the entire problem needs eps = 0, got {}", params.eps)));
    }
    if !(params.p > lo && params.p <= hi * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("p must lie in ({lo}, {hi}], got {}", params.p)));
    }
    if !(opts.tol > 0.0 && opts.tol < 1.0) {
        return Err(Error::Domain(format!("bracket tolerance must lie in (0, 1), got {}", opts.tol)));
    }
    if !(opts.r_max > 1.0 && opts.r_limit >= opts.r_max) {
        return Err(Error::Domain(format!("need 1 < r_max <= r_limit, got {} and {}", opts.r_max, opts.r_limit)));
    }
    Ok(())
}

/// Integrates one shot until it is classified or reaches `r_limit`,
/// sampling the log grid into `trace` when given.
fn shoot(sys: &System, s: f64, opts: &EntireOptions, mut trace: Option<&mut Trace>) -> Result<Shot> {
    let (r0, y0) = sys.start(s);
    let f = |r: f64, y: &[f64; NU], dy: &mut [f64; NU]| sys.rhs(r, y, dy);
    let mut ode = Dopri5::new(f, r0, y0, 0.1 * r0, opts.ode());
    let ratio = 10f64.powf(1.0 / GRID_PER_DECADE);
    let mut next = r0;
    if let Some(t) = trace.as_deref_mut() {
        let mut origin = [0.0; NU];
        origin[0] = 1.0;
        origin[2] = s;
        origin[6] = 1.0;
        t.grid.push(0.0);
        t.states.push(origin);
        t.grid.push(r0);
        t.states.push(y0);
        next = r0 * ratio;
    }
    let mut classified = None;
    while ode.t() < opts.r_limit {
        ode.step(opts.r_limit)?;
        let r = ode.t();
        let y = ode.y();
        let (w, z) = (sys.w(r, y), sys.z(r, y));
        if classified.is_none() && (w < 0.0 || z < 0.0) {
            let first = |g: &dyn Fn(f64, &[f64; NU]) -> f64| {
                let (mut a, mut b) = (ode.t_prev(), r);
                if g(a, &ode.dense(a)) < 0.0 {
                    return a;
                }
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if g(m, &ode.dense(m)) < 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                b
            };
            let rw = if w < 0.0 { first(&|r, y| sys.w(r, y)) } else { f64::INFINITY };
            let rz = if z < 0.0 { first(&|r, y| sys.z(r, y)) } else { f64::INFINITY };
            let (crossing, radius) = if rw <= rz { (Crossing::U, rw) } else { (Crossing::V, rz) };
            classified = Some(Shot { s, crossing, radius });
        }
        let Some(t) = trace.as_deref_mut() else {
            if let Some(shot) = classified {
                return Ok(shot);
            }
            continue;
        };
        // A traced shot runs on until U or V itself reaches zero.
        let out = y[0] <= 0.0 || y[2] <= 0.0;
        while next <= r {
            let st = ode.dense(next);
            if st[0] <= 0.0 || st[2] <= 0.0 {
                break;
            }
            t.grid.push(next);
            t.states.push(st);
            next *= ratio;
        }
        if out {
            break;
        }
    }
    Ok(classified.unwrap_or(Shot { s, crossing: Crossing::Neither, radius: opts.r_limit }))
}

/// Ground state at `eps = 0` by bisection on `s = V₀(0)`.
pub fn solve_entire(params: &SystemParams, opts: &EntireOptions) -> Result<EntireSolution> {
    validate(params, opts)?;
    let sys = System { n: params.dim(), p: params.p, q: params.q0 };
    let mut shots = Vec::new();

    // Coarse scan of the admissible range. Ordered as V < Neither < U, the
    // classification must be non-decreasing in s, i.e. a single bracket.
    let rank = |c: Crossing| match c {
        Crossing::V => 0,
        Crossing::Neither => 1,
        Crossing::U => 2,
    };
    let (a, b) = (S_RANGE.0.log10(), S_RANGE.1.log10());
    let k = 24;
    for i in 0..=k {
        let s = 10f64.powf(a + (b - a) * i as f64 / k as f64);
        let shot = shoot(&sys, s, opts, None)?;
        if let Some(prev) = shots.last() {
            let prev: &Shot = prev;
            if rank(shot.crossing) < rank(prev.crossing) {
                return Err(Error::Shooting(format!(
                    "more than one bracket: {:?} at s = {} but {:?} at s = {}",
                    prev.crossing, prev.s, shot.crossing, shot.s
                )));
            }
        }
        shots.push(shot);
    }
    let lo = shots.iter().filter(|s| s.crossing == Crossing::V).map(|s| s.s).last();
    let hi = shots.iter().find(|s| s.crossing == Crossing::U).map(|s| s.s);
    let (Some(mut lo), Some(mut hi)) = (lo, hi) else {
        return Err(Error::Shooting(format!("no bracket in s ∈ [{}, {}]", S_RANGE.0, S_RANGE.1)));
    };

    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTIONS {
        mid = 0.5 * (lo + hi);
        if hi - lo < opts.tol * mid {
            break;
        }
        let shot = shoot(&sys, mid, opts, None)?;
        shots.push(shot);
        match shot.crossing {
            Crossing::U => hi = mid,
            Crossing::V => lo = mid,
            Crossing::Neither => break,
        }
    }

    let mut trace = Trace::new();
    let last = shoot(&sys, mid, opts, Some(&mut trace))?;
    // Shots closer than a few ulp are not distinguished by the integrator.
    let width = (hi - lo).max(4.0 * f64::EPSILON * mid);
    // Keep the samples where the shooting error is far below the solution,
    // so plateau fits over the last decade are not biased by it.
    let cut = trace
        .states
        .iter()
        .position(|y| y[0] < TRUNCATION * y[4].abs() * width || y[2] < TRUNCATION * y[6].abs() * width)
        .unwrap_or(trace.states.len());
    let cut = cut.min(trace.grid.len());
    let r_end = trace.grid[cut.saturating_sub(1)];
    // V₀ ~ r^{2-n} meets the rounding floor of the bracket before r = 10³
    // once n ≥ 7; a window within a decade of r_max is kept with a warning.
    let short = r_end < opts.r_max;
    if r_end < WINDOW_SLACK * opts.r_max {
        return Err(Error::Shooting(format!(
            "positivity window ends at r = {r_end:.3e} < r_max = {:.3e} (last shot: {:?} at {:.3e})",
            opts.r_max, last.crossing, last.radius
        )));
    }
    let states = &trace.states[..cut];
    let profile = RadialProfile {
        grid: trace.grid[..cut].to_vec(),
        u_vals: states.iter().map(|y| y[0]).collect(),
        v_vals: states.iter().map(|y| y[2]).collect(),
        du_vals: states.iter().map(|y| y[1]).collect(),
        dv_vals: states.iter().map(|y| y[3]).collect(),
    };
    let end = states[cut - 1];
    let moments = Moments { radius: r_end, u_q: end[8], v_p: end[9], u_q1: end[10], v_p1: end[11] };
    let placeholder = Plateau { value: f64::NAN, variation: f64::NAN, samples: 0 };
    let mut sol = EntireSolution {
        profile,
        shoot_param: mid,
        bracket: (lo, hi),
        a: f64::NAN,
        b: f64::NAN,
        l: f64::NAN,
        decay: DecayConstants { a: placeholder, b: placeholder, l: placeholder },
        a_u0: Norm::Divergent,
        a_v0: Norm::Divergent,
        moments,
        params: *params,
        shots,
        warnings: Vec::new(),
    };
    if short {
        sol.warnings.push(format!(
            "positivity window limited by precision at r = {r_end:.3e} < r_max = {:.3e}",
            opts.r_max
        ));
    }
    let decay = decay_constants(&sol)?;
    sol.decay = decay;
    sol.a = decay.a.value;
    sol.b = decay.b.value;
    sol.l = decay.l.value;
    for (name, p) in [("a", decay.a), ("b", decay.b), ("L", decay.l)] {
        if !p.is_flat() {
            sol.warnings.push(format!(
                "{name} plateau varies by {:.2}% over the last decade; increase r_max",
                100.0 * p.variation
            ));
        }
    }
    if ((decay.l.value - decay.a.value) / decay.a.value).abs() > PLATEAU_TOL {
        sol.warnings.push(format!("L = {} and a = {} disagree", decay.l.value, decay.a.value));
    }
    let (au, av) = norms(&sol)?;
    sol.a_u0 = au;
    sol.a_v0 = av;
    Ok(sol)
}

/// Decay exponent `κ` of `U₀` and whether a `log r` factor is present.
fn u_decay(params: &SystemParams) -> (f64, bool) {
    let d = params.dim() - 2.0;
    match params.regime {
        Regime::High => (d, false),
        Regime::Log => (d, true),
        Regime::LowA | Regime::LowB => (d * params.p - 2.0, false),
    }
}

fn plateau(profile: &RadialProfile, f: impl Fn(usize) -> f64) -> Result<Plateau> {
    let idx = profile.last_decade();
    let vals: Vec<f64> = idx.map(f).collect();
    if vals.len() < 2 {
        return Err(Error::Consistency(format!("{} samples in the last decade", vals.len())));
    }
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let (mn, mx) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    Ok(Plateau { value: mean, variation: (mx - mn) / mean.abs(), samples: vals.len() })
}

/// Plateaus of `r^{n-2}V₀` (`a`), the regime's compensated `U₀` (`b`) and
/// the flux `-r^{n-1}V₀'/(n-2)` (`L`) over the last decade of the grid.
pub fn decay_constants(sol: &EntireSolution) -> Result<DecayConstants> {
    let pr = &sol.profile;
    let n = sol.params.dim();
    let d = n - 2.0;
    let (kappa, log) = u_decay(&sol.params);
    let a = plateau(pr, |i| pr.grid[i].powf(d) * pr.v_vals[i])?;
    let b = plateau(pr, |i| {
        let r = pr.grid[i];
        let c = r.powf(kappa) * pr.u_vals[i];
        if log {
            c / r.ln()
        } else {
            c
        }
    })?;
    let l = plateau(pr, |i| -pr.grid[i].powf(n - 1.0) * pr.dv_vals[i] / d)?;
    Ok(DecayConstants { a, b, l })
}

/// `|S^{n-1}| ∫_R^∞ r^{n-1} (c law(r))^e dr` for `law = r^{-κ}` (times
/// `log r`), and the same with `c law(r)` matched to `value` at `R`.
fn tail(n: f64, r_end: f64, kappa: f64, log: bool, c: f64, value: f64, e: f64) -> Result<(f64, f64)> {
    let m = kappa * e - n;
    if !(m > 0.0) {
        return Err(Error::Divergence(format!("tail exponent {m}")));
    }
    let law = |r: f64| if log { r.powf(-kappa) * r.ln() } else { r.powf(-kappa) };
    let shape = |r: f64| (law(r) / law(r_end)).powf(e);
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-10, max_cells: 2000 };
    // r = R/t maps (R, ∞) onto (0, 1].
    let q = Quad1d::new(0.0, 1.0)
        .options(opts)
        .lower_singularity(m)
        .integrate(|t| if t > 0.0 { let r = r_end / t; r.powf(n - 1.0) * shape(r) * r_end / (t * t) } else { 0.0 })?;
    let base = q.value;
    let fit = (c * law(r_end)).powf(e) * base;
    let local = value.powf(e) * base;
    Ok((fit, (fit - local).abs() + q.abs_error * value.powf(e)))
}

/// `A_{U0} = ∫U₀^{q0}` and `A_{V0} = ∫V₀^p` (the latter only in the HIGH
/// regime; [`Norm::Divergent`] otherwise). Grid part plus the fitted tail;
/// the tail mismatch against the local value is reported as the error.
pub fn norms(sol: &EntireSolution) -> Result<(Norm, Norm)> {
    let params = &sol.params;
    let n = params.dim();
    let sph = sphere_measure(params.n)?;
    let pr = &sol.profile;
    let last = pr.len() - 1;
    let r_end = sol.moments.radius;
    let (kappa, log) = u_decay(params);
    let (tu, eu) = tail(n, r_end, kappa, log, sol.decay.b.value, pr.u_vals[last], params.q0)?;
    let a_u0 = Norm::Finite { value: sph * (sol.moments.u_q + tu), error: sph * eu };
    let a_v0 = if params.regime == Regime::High {
        let (tv, ev) = tail(n, r_end, n - 2.0, false, sol.decay.a.value, pr.v_vals[last], params.p)?;
        Norm::Finite { value: sph * (sol.moments.v_p + tv), error: sph * ev }
    } else {
        Norm::Divergent
    };
    Ok((a_u0, a_v0))
}

/// Sobolev constant from the ground-state energy, after checking
/// `∫U₀^{q0+1} = ∫|ΔU₀|^{(p+1)/p} = ∫V₀^{p+1}`.
pub fn sobolev_quotient(sol: &EntireSolution) -> Result<SobolevQuotient> {
    let params = &sol.params;
    let (n, p, q) = (params.dim(), params.p, params.q0);
    let sph = sphere_measure(params.n)?;
    let pr = &sol.profile;
    let last = pr.len() - 1;
    let r_end = sol.moments.radius;
    let (kappa, log) = u_decay(params);
    let (tu, _) = tail(n, r_end, kappa, log, sol.decay.b.value, pr.u_vals[last], q + 1.0)?;
    let (tv, _) = tail(n, r_end, n - 2.0, false, sol.decay.a.value, pr.v_vals[last], p + 1.0)?;
    let int_u_q1 = sph * (sol.moments.u_q1 + tu);
    let int_v_p1 = sph * (sol.moments.v_p1 + tv);
    let int_lap_u = int_v_p1;
    let identity_error = ((int_u_q1 - int_v_p1) / int_v_p1).abs();
    if identity_error > IDENTITY_TOL {
        return Err(Error::Consistency(format!(
            "∫U^(q+1) = {int_u_q1} and ∫V^(p+1) = {int_v_p1} differ by {identity_error:.2e} relative"
        )));
    }
    Ok(SobolevQuotient { s: int_v_p1.powf(2.0 * (p + 1.0) / (n * p)), int_u_q1, int_lap_u, int_v_p1, identity_error })
}

/// The bubble `(1 + r²/(n(n-2)))^{-(n-2)/2}`, the ground state at
/// `p = q0 = (n+2)/(n-2)`.
pub fn bubble(n: u32, r: f64) -> f64 {
    let nf = n as f64;
    (1.0 + r * r / (nf * (nf - 2.0))).powf(-0.5 * (nf - 2.0))
}

/// `∫_{R^n} bubble^e` in closed form, for `e (n-2) > n`.
pub fn bubble_integral(n: u32, e: f64) -> Result<f64> {
    let nf = n as f64;
    let k = nf * (nf - 2.0);
    let half = 0.5 * e * (nf - 2.0) - 0.5 * nf;
    if !(half > 0.0) {
        return Err(Error::Divergence(format!("bubble^{e} is not integrable in R^{n}")));
    }
    Ok(sphere_measure(n)? * 0.5 * k.powf(0.5 * nf) * ln_beta(0.5 * nf, half)?.exp())
}

/// Profile rows `(r, U, V, U', V')`.
pub fn profile_rows(profile: &RadialProfile) -> impl Iterator<Item = [f64; 5]> + '_ {
    (0..profile.len()).map(move |i| {
        [profile.grid[i], profile.u_vals[i], profile.v_vals[i], profile.du_vals[i], profile.dv_vals[i]]
    })
}


