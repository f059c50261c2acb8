//! Numerics for the Lane-Emden system `-Δu = v^p`, `-Δv = u^q` near the
//! critical hyperbola `1/(p+1) + 1/(q+1) = (n-2)/n`.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation; file formats, the CLI and parallel scans live in the
//! `lane-emden-lab` crate.
//!
//! Layout, bottom up:
//!
//! * [`specfun`]: Gamma, Beta, sphere measures, elementary power bounds.
//! * [`params`]: exponent bookkeeping for a given `(n, p, eps)`.
//! * [`quadrature`]: adaptive 1D/2D integration with error budgets.
//! * [`ode`]: an embedded 5(4) Runge-Kutta integrator with dense output.
//! * [`sphere`]: product quadrature on `S^{n-1}`.
//! * [`halfspace`]: the half-space integral inequalities and their bounds.
//! * [`greenfun`]: Green's function of the unit ball and its relatives.
//! * [`entire`]: ground states on `R^n` by radial shooting.
//! * [`balldomain`]: radial solutions on the unit ball and blow-up scans.
#![no_std]
#![forbid(unsafe_code)]
// Test builds link std, which makes the `Float` imports look redundant.
// `Float` is shadowed by the inherent f64 methods whenever std is in the graph.
#![allow(unused_imports)]

extern crate alloc;

pub mod balldomain;
pub mod entire;
mod error;
pub mod greenfun;
pub mod halfspace;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod specfun;
pub mod sphere;

pub use error::{Error, Result};
pub use params::{make_params, Regime, SystemParams};
pub use quadrature::QuadResult;
