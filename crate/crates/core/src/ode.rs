//! Dormand-Prince 5(4) integrator with continuous (dense) output.
//!
//! The stepper is driven one accepted step at a time, so callers can watch
//! for sign changes and stop wherever they like.

use crate::error::{Error, Result};
use num_traits::Float;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    /// Number of leading components under error control; the rest (e.g.
    /// accumulated integrals) are carried along unchecked.
    pub controlled: usize,
}

impl OdeOptions {
    pub fn new(rtol: f64, atol: f64) -> Self {
        OdeOptions { rtol, atol, h_max: f64::INFINITY, controlled: usize::MAX }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    pub fn controlled(mut self, k: usize) -> Self {
        self.controlled = k;
        self
    }
}

/// Dormand-Prince stepper for `y' = f(t, y)` with `N` components.
pub struct Dopri5<const N: usize, F> {
    f: F,
    opts: OdeOptions,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    t_old: f64,
    h_old: f64,
    cont: [[f64; N]; 5],
    pub n_accepted: usize,
    pub n_rejected: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] += h * s;
    }
    out
}

impl<const N: usize, F: FnMut(f64, &[f64; N], &mut [f64; N])> Dopri5<N, F> {
    /// Starts at `(t0, y0)` with trial step `h0` (positive, forward only).
    pub fn new(mut f: F, t0: f64, y0: [f64; N], h0: f64, opts: OdeOptions) -> Self {
        let mut k1 = [0.0; N];
        f(t0, &y0, &mut k1);
        Dopri5 {
            f,
            opts,
            t: t0,
            y: y0,
            k1,
            h: h0.min(opts.h_max),
            t_old: t0,
            h_old: 0.0,
            cont: [y0; 5],
            n_accepted: 0,
            n_rejected: 0,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Right-hand side at the current point.
    pub fn dy(&self) -> &[f64; N] {
        &self.k1
    }

    pub fn t_prev(&self) -> f64 {
        self.t_old
    }

    /// Next trial step size.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn set_h_max(&mut self, h_max: f64) {
        self.opts.h_max = h_max;
        self.h = self.h.min(h_max);
    }

    /// Takes one accepted step, never stepping past `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<()> {
        let f = &mut self.f;
        let y = self.y;
        let k1 = self.k1;
        let mut h = self.h.min(self.opts.h_max).min(t_stop - self.t);
        if !(h > 0.0) {
            return Err(Error::Domain(alloc::format!("cannot step from {} to {}", self.t, t_stop)));
        }
        let ctrl = self.opts.controlled.min(N);
        loop {
            if h < 1e-14 * self.t.abs().max(1e-300) || !h.is_finite() {
                return Err(Error::Stiffness(self.t));
            }
            let t = self.t;
            let mut k2 = [0.0; N];
            let mut k3 = [0.0; N];
            let mut k4 = [0.0; N];
            let mut k5 = [0.0; N];
            let mut k6 = [0.0; N];
            let mut k7 = [0.0; N];
            f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]), &mut k2);
            f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]), &mut k3);
            f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]), &mut k4);
            f(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]), &mut k5);
            let y6 = axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
            f(t + h, &y6, &mut k6);
            let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            f(t + h, &y1, &mut k7);
            let mut err = 0.0;
            let mut finite = true;
            for i in 0..N {
                if !y1[i].is_finite() {
                    finite = false;
                }
                if i < ctrl {
                    let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                    let sk = self.opts.atol + self.opts.rtol * y[i].abs().max(y1[i].abs());
                    err += (e / sk) * (e / sk);
                }
            }
            err = (err / ctrl.max(1) as f64).sqrt();
            if !finite || !err.is_finite() {
                self.n_rejected += 1;
                h *= 0.2;
                continue;
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 10.0);
            if err <= 1.0 {
                let mut r3 = [0.0; N];
                let mut r4 = [0.0; N];
                let mut r5 = [0.0; N];
                let mut r2 = [0.0; N];
                for i in 0..N {
                    let dy = y1[i] - y[i];
                    let bspl = h * k1[i] - dy;
                    r2[i] = dy;
                    r3[i] = bspl;
                    r4[i] = dy - h * k7[i] - bspl;
                    r5[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                self.cont = [y, r2, r3, r4, r5];
                self.t_old = t;
                self.h_old = h;
                self.t = if t_stop - (t + h) <= 1e-15 * t_stop.abs() { t_stop } else { t + h };
                self.y = y1;
                self.k1 = k7;
                self.h = (h * fac).min(self.opts.h_max);
                self.n_accepted += 1;
                return Ok(());
            }
            self.n_rejected += 1;
            h *= fac.min(1.0);
        }
    }

    /// Dense output on the last accepted step `[t_prev, t]`.
    pub fn dense(&self, t: f64) -> [f64; N] {
        if self.h_old == 0.0 {
            return self.y;
        }
        let th = (t - self.t_old) / self.h_old;
        let th1 = 1.0 - th;
        let c = &self.cont;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])));
        }
        out
    }

    /// Locates `t` in `[t_prev, t]` where component `i` of the dense output
    /// equals `level`, assuming a sign change over the last step.
    pub fn locate(&self, i: usize, level: f64) -> f64 {
        let g = |t: f64| self.dense(t)[i] - level;
        let (mut a, mut b) = (self.t_old, self.t);
        let (mut fa, mut fb) = (g(a), g(b));
        if fa == 0.0 {
            return a;
        }
        if fb == 0.0 || fa.signum() == fb.signum() {
            return b;
        }
        // Illinois variant of regula falsi.
        let mut side = 0;
        for _ in 0..200 {
            let c = (a * fb - b * fa) / (fb - fa);
            let c = if c > a && c < b { c } else { 0.5 * (a + b) };
            let fc = g(c);
            if fc == 0.0 || (b - a) <= 4.0 * f64::EPSILON * b.abs() {
                return c;
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
        0.5 * (a + b)
    }
}
