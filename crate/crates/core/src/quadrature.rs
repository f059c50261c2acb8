//! Globally adaptive Gauss-Kronrod quadrature in one and two dimensions.
//!
//! Error estimates are the full `|K15 - G7|` differences (no empirical
//! rescaling), summed over cells, plus a round-off floor. Infinite ranges
//! are compactified with `x = a + s/(1-s)`. In 2D, each declared point
//! singularity `f = O(ρ^{m-2})` becomes a vertex of the initial partition;
//! the cells around it are integrated in polar coordinates with
//! `ρ = ρ_max(ψ) u^{1/m}`, which turns the integrand into a bounded one.
//!
//! Everything is sequential and evaluates cells in a fixed order, so results
//! are bit-reproducible.

use crate::error::{Error, Result};
use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::FRAC_PI_2;
use core::ops::{Add, Mul, Neg, Sub};
use num_traits::Float;
use serde::{Deserialize, Serialize};

const NODES: [f64; 15] = [
    -0.991455371120812639,
    -0.949107912342758524,
    -0.864864423359769072,
    -0.741531185599394439,
    -0.586087235467691130,
    -0.405845151377397166,
    -0.207784955007898467,
    0.0,
    0.207784955007898467,
    0.405845151377397166,
    0.586087235467691130,
    0.741531185599394439,
    0.864864423359769072,
    0.949107912342758524,
    0.991455371120812639,
];
const WK: [f64; 15] = [
    0.022935322010529224,
    0.063092092629978553,
    0.104790010322250183,
    0.140653259715525918,
    0.169004726639267902,
    0.190350578064785409,
    0.204432940075298892,
    0.209482141084727828,
    0.204432940075298892,
    0.190350578064785409,
    0.169004726639267902,
    0.140653259715525918,
    0.104790010322250183,
    0.063092092629978553,
    0.022935322010529224,
];
const WG: [f64; 15] = [
    0.0,
    0.129484966168869693,
    0.0,
    0.279705391489276667,
    0.0,
    0.381830050505118944,
    0.0,
    0.417959183673469387,
    0.0,
    0.381830050505118944,
    0.0,
    0.279705391489276667,
    0.0,
    0.129484966168869693,
    0.0,
];

/// Relative round-off floor applied to every cell.
const ROUNDOFF: f64 = 50.0 * f64::EPSILON;

/// An integral value with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    /// Claimed bound on `|value - truth|`.
    pub abs_error: f64,
    pub n_evals: u64,
    pub converged: bool,
}

impl QuadResult {
    pub const ZERO: QuadResult = QuadResult { value: 0.0, abs_error: 0.0, n_evals: 0, converged: true };

    /// A value known in closed form.
    pub fn exact(value: f64) -> Self {
        QuadResult { value, abs_error: 0.0, n_evals: 0, converged: true }
    }

    pub fn scale(self, c: f64) -> Self {
        QuadResult { value: c * self.value, abs_error: c.abs() * self.abs_error, ..self }
    }

    /// Whether `x` lies inside `value ± abs_error`.
    pub fn contains(&self, x: f64) -> bool {
        (self.value - x).abs() <= self.abs_error
    }

    pub fn lower(&self) -> f64 {
        self.value - self.abs_error
    }

    pub fn upper(&self) -> f64 {
        self.value + self.abs_error
    }
}

impl Add for QuadResult {
    type Output = QuadResult;
    fn add(self, o: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + o.value,
            abs_error: self.abs_error + o.abs_error,
            n_evals: self.n_evals + o.n_evals,
            converged: self.converged && o.converged,
        }
    }
}

impl Sub for QuadResult {
    type Output = QuadResult;
    fn sub(self, o: QuadResult) -> QuadResult {
        self + (-o)
    }
}

impl Neg for QuadResult {
    type Output = QuadResult;
    fn neg(self) -> QuadResult {
        QuadResult { value: -self.value, ..self }
    }
}

impl Mul<QuadResult> for f64 {
    type Output = QuadResult;
    fn mul(self, q: QuadResult) -> QuadResult {
        q.scale(self)
    }
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for x in it {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// Stopping rule: absolute and relative tolerance plus a cell budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_cells: usize,
}

impl QuadOptions {
    pub fn abs(tol: f64) -> Self {
        QuadOptions { abs_tol: tol, rel_tol: 0.0, max_cells: 20_000 }
    }

    pub fn rel(tol: f64) -> Self {
        QuadOptions { abs_tol: 0.0, rel_tol: tol, max_cells: 20_000 }
    }

    pub fn with_max_cells(mut self, max_cells: usize) -> Self {
        self.max_cells = max_cells;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy)]
enum Axis {
    Id,
    /// `x = a + s/(1-s)`, `s ∈ [0,1)`.
    Up(f64),
    /// `x = b - s/(1-s)`, `s ∈ [0,1)`.
    Down(f64),
    /// `x = a + w u^{1/m}`, `u ∈ [0,1]`; the Jacobian is folded into `f`.
    Power { a: f64, w: f64, m: f64 },
}

impl Axis {
    #[inline]
    fn map(self, s: f64) -> (f64, f64) {
        match self {
            Axis::Id => (s, 1.0),
            Axis::Up(a) => {
                let d = 1.0 - s;
                (a + s / d, 1.0 / (d * d))
            }
            Axis::Down(b) => {
                let d = 1.0 - s;
                (b - s / d, 1.0 / (d * d))
            }
            Axis::Power { a, w, m } => {
                let x = w * s.powf(1.0 / m);
                // dx = (w/m) u^{1/m - 1} du
                (a + x, w / m * s.powf(1.0 / m - 1.0))
            }
        }
    }
}

/// Splits `[lo, hi]` at `breaks` into mapped pieces `(axis, s0, s1)`.
fn pieces(lo: f64, hi: f64, breaks: &[f64]) -> Result<Vec<(Axis, f64, f64)>> {
    if lo.is_nan() || hi.is_nan() || !(lo < hi) {
        return Err(Error::Domain(format!("empty or invalid range [{lo}, {hi}]")));
    }
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|b| b.is_finite() && *b > lo && *b < hi).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut nodes = Vec::with_capacity(pts.len() + 2);
    if lo.is_finite() {
        nodes.push(lo);
    }
    nodes.extend(pts);
    if hi.is_finite() {
        nodes.push(hi);
    }
    if nodes.is_empty() {
        nodes.push(0.0);
    }
    let mut out = Vec::new();
    if lo == f64::NEG_INFINITY {
        out.push((Axis::Down(nodes[0]), 0.0, 1.0));
    }
    for w in nodes.windows(2) {
        out.push((Axis::Id, w[0], w[1]));
    }
    if hi == f64::INFINITY {
        out.push((Axis::Up(nodes[nodes.len() - 1]), 0.0, 1.0));
    }
    Ok(out)
}

struct HeapEntry {
    err: f64,
    idx: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then_with(|| o.idx.cmp(&self.idx))
    }
}

fn non_finite(x: f64, y: Option<f64>) -> Error {
    match y {
        Some(y) => Error::NonFinite(format!("({x:e}, {y:e})")),
        None => Error::NonFinite(format!("{x:e}")),
    }
}

fn too_narrow(a0: f64, a1: f64) -> bool {
    (a1 - a0) <= 1e-13 * (a0.abs() + a1.abs()) + 1e-300
}

// ---------------------------------------------------------------- 1D

/// Builder for one-dimensional integrals.
pub struct Quad1d {
    lo: f64,
    hi: f64,
    breaks: Vec<f64>,
    lower_order: Option<f64>,
    opts: QuadOptions,
}

impl Quad1d {
    pub fn new(lo: f64, hi: f64) -> Self {
        Quad1d { lo, hi, breaks: Vec::new(), lower_order: None, opts: QuadOptions::abs(1e-10) }
    }

    pub fn options(mut self, opts: QuadOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn breaks(mut self, b: &[f64]) -> Self {
        self.breaks.extend_from_slice(b);
        self
    }

    /// Declares `f(x) = O((x - lo)^{m-1})` at the (finite) lower end. The
    /// first piece is integrated in `u = ((x-lo)/w)^m`.
    pub fn lower_singularity(mut self, m: f64) -> Self {
        self.lower_order = Some(m);
        self
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<QuadResult> {
        let mut pcs = pieces(self.lo, self.hi, &self.breaks)?;
        if let Some(m) = self.lower_order {
            if !(m > 0.0) {
                return Err(Error::Divergence(format!("endpoint order m = {m} is not integrable")));
            }
            match pcs.first_mut() {
                Some(first) if matches!(first.0, Axis::Id) => {
                    let w = first.2 - first.1;
                    *first = (Axis::Power { a: self.lo, w, m }, 0.0, 1.0);
                }
                _ => return Err(Error::Domain("lower singularity needs a finite lower end".into())),
            }
        }
        adapt_1d(&f, &pcs, &self.opts)
    }
}

/// `∫_a^b f` to absolute tolerance `tol`; `b` may be `+∞`.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    Quad1d::new(a, b).options(QuadOptions::abs(tol)).integrate(f)
}

struct Cell1 {
    axis: Axis,
    a0: f64,
    a1: f64,
    value: f64,
    err: f64,
}

fn gk15_1d<F: Fn(f64) -> f64>(f: &F, axis: Axis, a0: f64, a1: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a0 + a1);
    let h = 0.5 * (a1 - a0);
    let mut k = 0.0;
    let mut g = 0.0;
    let mut abs = 0.0;
    for i in 0..15 {
        let s = c + h * NODES[i];
        let (x, jac) = axis.map(s);
        let v = if jac == 0.0 { 0.0 } else { f(x) * jac };
        if !v.is_finite() {
            return Err(non_finite(x, None));
        }
        k += WK[i] * v;
        g += WG[i] * v;
        abs += WK[i] * v.abs();
    }
    let err = (h * (k - g)).abs().max(ROUNDOFF * h * abs);
    Ok((h * k, err))
}

fn adapt_1d<F: Fn(f64) -> f64>(f: &F, pcs: &[(Axis, f64, f64)], opts: &QuadOptions) -> Result<QuadResult> {
    let mut cells: Vec<Cell1> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut evals = 0u64;
    for &(axis, a0, a1) in pcs {
        let (value, err) = gk15_1d(f, axis, a0, a1)?;
        evals += 15;
        heap.push(HeapEntry { err, idx: cells.len() });
        cells.push(Cell1 { axis, a0, a1, value, err });
    }
    let mut alive: Vec<bool> = alloc::vec![true; cells.len()];
    let (mut total, mut total_err) = totals(cells.iter().zip(&alive).map(|(c, &a)| (c.value, c.err, a)));
    let mut iter = 0usize;
    while total_err > opts.target(total) && cells.len() < opts.max_cells {
        let Some(HeapEntry { idx, .. }) = heap.pop() else { break };
        let (axis, a0, a1) = (cells[idx].axis, cells[idx].a0, cells[idx].a1);
        if too_narrow(a0, a1) {
            continue;
        }
        let mid = 0.5 * (a0 + a1);
        let (v0, e0) = gk15_1d(f, axis, a0, mid)?;
        let (v1, e1) = gk15_1d(f, axis, mid, a1)?;
        evals += 30;
        alive[idx] = false;
        total += v0 + v1 - cells[idx].value;
        total_err += e0 + e1 - cells[idx].err;
        for (lo, hi, v, e) in [(a0, mid, v0, e0), (mid, a1, v1, e1)] {
            heap.push(HeapEntry { err: e, idx: cells.len() });
            cells.push(Cell1 { axis, a0: lo, a1: hi, value: v, err: e });
            alive.push(true);
        }
        iter += 1;
        if iter % 64 == 0 {
            (total, total_err) = totals(cells.iter().zip(&alive).map(|(c, &a)| (c.value, c.err, a)));
        }
    }
    let (value, abs_error) = totals(cells.iter().zip(&alive).map(|(c, &a)| (c.value, c.err, a)));
    Ok(QuadResult { value, abs_error, n_evals: evals, converged: abs_error <= opts.target(value) })
}

fn totals<I: Iterator<Item = (f64, f64, bool)>>(it: I) -> (f64, f64) {
    let mut vs = Vec::new();
    let mut es = Vec::new();
    for (v, e, a) in it {
        if a {
            vs.push(v);
            es.push(e);
        }
    }
    (neumaier_sum(vs), neumaier_sum(es))
}

// ---------------------------------------------------------------- 2D

/// Scaled local integrand: `(ρ, d_x, d_y) ↦ ρ^{2-m} f(x0 + ρ d)` for a unit
/// direction `d`. It must stay finite as `ρ → 0`, including at `ρ = 0`.
pub type LocalFn<'a> = &'a dyn Fn(f64, f64, f64) -> f64;

/// An integrable point singularity `f = O(ρ^{m-2})`, `m > 0`.
#[derive(Clone, Copy)]
pub struct Singularity<'a> {
    pub at: (f64, f64),
    pub order: f64,
    pub local: Option<LocalFn<'a>>,
}

impl<'a> Singularity<'a> {
    pub fn new(at: (f64, f64), order: f64) -> Self {
        Singularity { at, order, local: None }
    }

    pub fn with_local(mut self, local: LocalFn<'a>) -> Self {
        self.local = Some(local);
        self
    }
}

#[derive(Debug, Clone, Copy)]
enum Frame {
    Rect { ax: Axis, ay: Axis },
    /// `a = u ∈ [0,1]`, `b = ψ ∈ [0, π/2]` about vertex `v`, opening into
    /// the quadrant `(sx, sy)` over a `wx × wy` rectangle.
    Polar { vx: f64, vy: f64, sx: f64, sy: f64, wx: f64, wy: f64, m: f64, sing: usize },
}

#[derive(Debug, Clone, Copy)]
struct Cell2 {
    frame: Frame,
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
    value: f64,
    err: f64,
    split_a: bool,
}

/// Builder for two-dimensional integrals over rectangles (possibly infinite).
pub struct Quad2d<'a> {
    x: (f64, f64),
    y: (f64, f64),
    x_breaks: Vec<f64>,
    y_breaks: Vec<f64>,
    singular: Vec<Singularity<'a>>,
    opts: QuadOptions,
}

impl<'a> Quad2d<'a> {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Quad2d {
            x,
            y,
            x_breaks: Vec::new(),
            y_breaks: Vec::new(),
            singular: Vec::new(),
            opts: QuadOptions::abs(1e-10).with_max_cells(50_000),
        }
    }

    pub fn options(mut self, opts: QuadOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn x_breaks(mut self, b: &[f64]) -> Self {
        self.x_breaks.extend_from_slice(b);
        self
    }

    pub fn y_breaks(mut self, b: &[f64]) -> Self {
        self.y_breaks.extend_from_slice(b);
        self
    }

    pub fn singular(mut self, s: Singularity<'a>) -> Self {
        self.singular.push(s);
        self
    }

    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> Result<QuadResult> {
        for s in &self.singular {
            if !(s.order > 0.0) {
                return Err(Error::Divergence(format!(
                    "singularity at ({}, {}) has order m = {} <= 0",
                    s.at.0, s.at.1, s.order
                )));
            }
            let (sx, sy) = s.at;
            if !(sx.is_finite() && sy.is_finite()) || sx < self.x.0 || sx > self.x.1 || sy < self.y.0 || sy > self.y.1 {
                return Err(Error::Domain(format!("singular point ({sx}, {sy}) outside the domain")));
            }
        }
        let mut xb = self.x_breaks.clone();
        let mut yb = self.y_breaks.clone();
        xb.extend(self.singular.iter().map(|s| s.at.0));
        yb.extend(self.singular.iter().map(|s| s.at.1));
        add_tail_break(&mut xb, self.x);
        add_tail_break(&mut yb, self.y);
        let xp = pieces(self.x.0, self.x.1, &xb)?;
        let yp = pieces(self.y.0, self.y.1, &yb)?;

        let mut init: Vec<(f64, f64, f64, f64, Axis, Axis)> = Vec::new();
        for &(ax, a0, a1) in &xp {
            for &(ay, b0, b1) in &yp {
                init.push((a0, a1, b0, b1, ax, ay));
            }
        }
        let mut seeds: Vec<Cell2> = Vec::new();
        while let Some((a0, a1, b0, b1, ax, ay)) = init.pop() {
            let finite = matches!(ax, Axis::Id) && matches!(ay, Axis::Id);
            let corners: Vec<usize> = if finite {
                (0..self.singular.len())
                    .filter(|&k| {
                        let (sx, sy) = self.singular[k].at;
                        (sx == a0 || sx == a1) && (sy == b0 || sy == b1)
                    })
                    .collect()
            } else {
                Vec::new()
            };
            if corners.len() > 1 {
                if a1 - a0 >= b1 - b0 {
                    let m = 0.5 * (a0 + a1);
                    init.push((a0, m, b0, b1, ax, ay));
                    init.push((m, a1, b0, b1, ax, ay));
                } else {
                    let m = 0.5 * (b0 + b1);
                    init.push((a0, a1, b0, m, ax, ay));
                    init.push((a0, a1, m, b1, ax, ay));
                }
                continue;
            }
            if let Some(&k) = corners.first() {
                let s = &self.singular[k];
                let (vx, vy) = s.at;
                let sx = if vx == a0 { 1.0 } else { -1.0 };
                let sy = if vy == b0 { 1.0 } else { -1.0 };
                let (wx, wy) = (a1 - a0, b1 - b0);
                let frame = Frame::Polar { vx, vy, sx, sy, wx, wy, m: s.order, sing: k };
                let psi_d = wy.atan2(wx);
                seeds.push(blank(frame, 0.0, 1.0, 0.0, psi_d));
                seeds.push(blank(frame, 0.0, 1.0, psi_d, FRAC_PI_2));
            } else {
                seeds.push(blank(Frame::Rect { ax, ay }, a0, a1, b0, b1));
            }
        }
        // Evaluation order must not depend on the work-stack order above.
        seeds.sort_by(|p, q| {
            p.a0.total_cmp(&q.a0)
                .then(p.b0.total_cmp(&q.b0))
                .then(p.a1.total_cmp(&q.a1))
                .then(p.b1.total_cmp(&q.b1))
                .then(frame_key(&p.frame).cmp(&frame_key(&q.frame)))
        });
        self.adapt(&f, seeds)
    }

    fn adapt<F: Fn(f64, f64) -> f64>(&self, f: &F, seeds: Vec<Cell2>) -> Result<QuadResult> {
        let mut cells: Vec<Cell2> = Vec::with_capacity(seeds.len() * 4);
        let mut alive: Vec<bool> = Vec::new();
        let mut heap = BinaryHeap::new();
        let mut evals = 0u64;
        for mut c in seeds {
            self.eval(f, &mut c)?;
            evals += 225;
            heap.push(HeapEntry { err: c.err, idx: cells.len() });
            cells.push(c);
            alive.push(true);
        }
        let sum = |cells: &[Cell2], alive: &[bool]| totals(cells.iter().zip(alive).map(|(c, &a)| (c.value, c.err, a)));
        let (mut total, mut total_err) = sum(&cells, &alive);
        let mut iter = 0usize;
        while total_err > self.opts.target(total) && cells.len() < self.opts.max_cells {
            let Some(HeapEntry { idx, .. }) = heap.pop() else { break };
            let c = cells[idx];
            let narrow_a = too_narrow(c.a0, c.a1);
            let narrow_b = too_narrow(c.b0, c.b1);
            if narrow_a && narrow_b {
                continue;
            }
            let split_a = if narrow_a {
                false
            } else if narrow_b {
                true
            } else {
                c.split_a
            };
            let (mut k0, mut k1) = (c, c);
            if split_a {
                let m = 0.5 * (c.a0 + c.a1);
                k0.a1 = m;
                k1.a0 = m;
            } else {
                let m = 0.5 * (c.b0 + c.b1);
                k0.b1 = m;
                k1.b0 = m;
            }
            self.eval(f, &mut k0)?;
            self.eval(f, &mut k1)?;
            evals += 450;
            alive[idx] = false;
            total += k0.value + k1.value - c.value;
            total_err += k0.err + k1.err - c.err;
            for k in [k0, k1] {
                heap.push(HeapEntry { err: k.err, idx: cells.len() });
                cells.push(k);
                alive.push(true);
            }
            iter += 1;
            if iter % 64 == 0 {
                (total, total_err) = sum(&cells, &alive);
            }
        }
        let (value, abs_error) = sum(&cells, &alive);
        Ok(QuadResult { value, abs_error, n_evals: evals, converged: abs_error <= self.opts.target(value) })
    }

    #[inline]
    fn point<F: Fn(f64, f64) -> f64>(&self, f: &F, frame: &Frame, a: f64, b: f64) -> Result<f64> {
        match *frame {
            Frame::Rect { ax, ay } => {
                let (x, jx) = ax.map(a);
                let (y, jy) = ay.map(b);
                let j = jx * jy;
                if j == 0.0 {
                    return Ok(0.0);
                }
                let v = f(x, y) * j;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(non_finite(x, Some(y)))
                }
            }
            Frame::Polar { vx, vy, sx, sy, wx, wy, m, sing } => {
                let (s, c) = b.sin_cos();
                let rmax = (wx / c).min(wy / s);
                let rho = rmax * a.powf(1.0 / m);
                let (dx, dy) = (sx * c, sy * s);
                let g = match self.singular[sing].local {
                    Some(local) => local(rho, dx, dy),
                    None => {
                        let r = rho.max(1e-300);
                        r.powf(2.0 - m) * f(vx + r * dx, vy + r * dy)
                    }
                };
                let v = g * rmax.powf(m) / m;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(non_finite(vx + rho * dx, Some(vy + rho * dy)))
                }
            }
        }
    }

    fn eval<F: Fn(f64, f64) -> f64>(&self, f: &F, c: &mut Cell2) -> Result<()> {
        let ca = 0.5 * (c.a0 + c.a1);
        let ha = 0.5 * (c.a1 - c.a0);
        let cb = 0.5 * (c.b0 + c.b1);
        let hb = 0.5 * (c.b1 - c.b0);
        let mut kk = 0.0;
        let mut gk = 0.0;
        let mut kg = 0.0;
        let mut abs = 0.0;
        for i in 0..15 {
            let a = ca + ha * NODES[i];
            let mut row_k = 0.0;
            let mut row_g = 0.0;
            let mut row_abs = 0.0;
            for j in 0..15 {
                let b = cb + hb * NODES[j];
                let v = self.point(f, &c.frame, a, b)?;
                row_k += WK[j] * v;
                row_g += WG[j] * v;
                row_abs += WK[j] * v.abs();
            }
            kk += WK[i] * row_k;
            gk += WG[i] * row_k;
            kg += WK[i] * row_g;
            abs += WK[i] * row_abs;
        }
        let area = ha * hb;
        let err_a = (area * (kk - gk)).abs();
        let err_b = (area * (kk - kg)).abs();
        c.value = area * kk;
        c.err = (err_a + err_b).max(ROUNDOFF * area * abs);
        c.split_a = err_a >= err_b;
        Ok(())
    }
}

fn blank(frame: Frame, a0: f64, a1: f64, b0: f64, b1: f64) -> Cell2 {
    Cell2 { frame, a0, a1, b0, b1, value: 0.0, err: 0.0, split_a: true }
}

fn frame_key(f: &Frame) -> (u8, u64, u64) {
    match *f {
        Frame::Rect { .. } => (0, 0, 0),
        Frame::Polar { vx, vy, .. } => (1, vx.to_bits(), vy.to_bits()),
    }
}

/// Puts a finite break beyond all finite breaks on each infinite side so
/// singular points never fall in a compactified piece.
fn add_tail_break(b: &mut Vec<f64>, range: (f64, f64)) {
    let finite: Vec<f64> = b.iter().copied().chain([range.0, range.1]).filter(|x| x.is_finite()).collect();
    if range.1 == f64::INFINITY {
        let top = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        b.push(if top.is_finite() { top + 1.0 } else { 1.0 });
    }
    if range.0 == f64::NEG_INFINITY {
        let bot = finite.iter().copied().fold(f64::INFINITY, f64::min);
        b.push(if bot.is_finite() { bot - 1.0 } else { -1.0 });
    }
}

/// `∫∫ f` over `x_range × y_range` to absolute tolerance `tol`.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    x_range: (f64, f64),
    y_range: (f64, f64),
    tol: f64,
    singular: &[Singularity<'_>],
) -> Result<QuadResult> {
    let mut q = Quad2d::new(x_range, y_range).options(QuadOptions::abs(tol).with_max_cells(50_000));
    for s in singular {
        q = q.singular(*s);
    }
    q.integrate(f)
}
