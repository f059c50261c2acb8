//! Exponent and constant bookkeeping for a given `(n, p, eps)`.

use crate::error::{domain, Error, Result};
use crate::specfun::sphere_measure;
use num_traits::Float;
use serde::{Deserialize, Serialize};

/// Relative tolerance used when snapping `p` onto a regime boundary.
pub const REGIME_TIE: f64 = 1e-12;

/// Position of `p` relative to `n/(n-2)` and `(n-1)/(n-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    /// `p ∈ (n/(n-2), (n+2)/(n-2)]`.
    High,
    /// `p = n/(n-2)`.
    Log,
    /// `p ∈ [(n-1)/(n-2), n/(n-2))`.
    LowA,
    /// `p ∈ (2/(n-2), (n-1)/(n-2))`.
    LowB,
}

impl Regime {
    pub fn classify(n: u32, p: f64) -> Regime {
        let d = n as f64 - 2.0;
        let log_p = n as f64 / d;
        let a_p = (n as f64 - 1.0) / d;
        if (p - log_p).abs() <= REGIME_TIE * log_p {
            Regime::Log
        } else if p > log_p {
            Regime::High
        } else if p >= a_p * (1.0 - REGIME_TIE) {
            Regime::LowA
        } else {
            Regime::LowB
        }
    }

    pub fn is_low(self) -> bool {
        matches!(self, Regime::LowA | Regime::LowB)
    }
}

/// Exponents and scaling constants of the system at `(n, p, eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub n: u32,
    pub p: f64,
    pub eps: f64,
    pub q_eps: f64,
    pub q0: f64,
    pub alpha_eps: f64,
    pub beta_eps: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub c_n: f64,
    /// `None` when `p >= n/(n-2)`, where the constant has a pole.
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub regime: Regime,
}

impl SystemParams {
    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    /// The same `(n, p)` on the critical hyperbola.
    pub fn critical(&self) -> SystemParams {
        make_params(self.n, self.p, 0.0).expect("critical parameters of an admissible point")
    }
}

/// Fundamental-solution constant `c_n = 1/((n-2)|S^{n-1}|)`.
pub fn c_n(n: u32) -> Result<f64> {
    if n < 3 {
        return Err(domain!("c_n needs n >= 3, got {n}"));
    }
    Ok(1.0 / ((n as f64 - 2.0) * sphere_measure(n)?))
}

/// Solves `1/(p+1) + 1/(q+1) = (n-2)/n + eps` for `q`.
pub fn q_of(n: u32, p: f64, eps: f64) -> Result<f64> {
    let s = (n as f64 - 2.0) / n as f64 + eps - 1.0 / (p + 1.0);
    if !(s > 0.0) {
        return Err(domain!("no positive q for n={n}, p={p}, eps={eps}"));
    }
    Ok(1.0 / s - 1.0)
}

/// `(γ1, γ2)` for `p ∈ (2/(n-2), n/(n-2))`.
pub fn gamma_constants(n: u32, p: f64) -> Result<(f64, f64)> {
    let c = c_n(n)?;
    let d = n as f64 - 2.0;
    let lo = 2.0 / d;
    let hi = n as f64 / d;
    if p <= lo * (1.0 + REGIME_TIE) || p >= hi * (1.0 - REGIME_TIE) {
        return Err(Error::Pole(alloc::format!(
            "gamma constants need p in ({lo}, {hi}), got {p}"
        )));
    }
    let gap = n as f64 - d * p;
    let g1 = c.powf(p) / ((d * p - 2.0) * gap);
    let g2 = p * c.powf(p - 1.0) / ((d * p - 2.0 * (n as f64 - 1.0)) * gap);
    Ok((g1, g2))
}

/// Builds [`SystemParams`] at `(n, p, eps)`.
pub fn make_params(n: u32, p: f64, eps: f64) -> Result<SystemParams> {
    if n < 3 {
        return Err(domain!("dimension must be at least 3, got {n}"));
    }
    if !p.is_finite() || !eps.is_finite() || eps < 0.0 {
        return Err(domain!("need finite p and eps >= 0, got p={p}, eps={eps}"));
    }
    let d = n as f64 - 2.0;
    let lo = 2.0 / d;
    let hi = (n as f64 + 2.0) / d;
    if !(p > lo) || p > hi * (1.0 + REGIME_TIE) {
        return Err(domain!("p must lie in ({lo}, {hi}] for n={n}, got {p}"));
    }
    let q0 = q_of(n, p, 0.0)?;
    let q_eps = q_of(n, p, eps)?;
    if q_eps < p * (1.0 - REGIME_TIE) {
        return Err(Error::SupercriticalOrder { p, q_eps });
    }
    let c = c_n(n)?;
    let regime = Regime::classify(n, p);
    let (gamma1, gamma2) = match gamma_constants(n, p) {
        Ok((a, b)) => (Some(a), Some(b)),
        Err(_) => (None, None),
    };
    let pq = p * q_eps - 1.0;
    let pq0 = p * q0 - 1.0;
    if !(pq > 0.0) {
        return Err(domain!("p q_eps must exceed 1, got {}", pq + 1.0));
    }
    Ok(SystemParams {
        n,
        p,
        eps,
        q_eps,
        q0,
        alpha_eps: 2.0 * (p + 1.0) / pq,
        beta_eps: 2.0 * (q_eps + 1.0) / pq,
        alpha0: 2.0 * (p + 1.0) / pq0,
        beta0: 2.0 * (q0 + 1.0) / pq0,
        c_n: c,
        gamma1,
        gamma2,
        regime,
    })
}
