//! Symbol classes, the admissible cutoff ψ, spatial smoothing a ↦ σ_a, time
//! mollification a ↦ a_ε and the frequency-linked ã.
//!
//! A [`Symbol`] is a small expression tree over separable terms
//! field(t,x) ⊗ mult(ξ). Every structural operation (smoothing, time
//! mollification, tilde) is a tree rewrite that keeps terms separable, so a
//! fixed-t [`SymbolSlice`] is always a short sum of (x-field, ξ-multiplier)
//! pairs — the form the quantization in `paradiff` applies in O(N log N)
//! per pair.
//!
//! The tilde rewrite discretizes ε = 1/⟨ξ⟩ per dyadic band: frequencies in
//! band b share ε_b = 2^{−b}, with the band index capped at j_max so the
//! top band absorbs the unresolved bins.

use crate::dyadic::{self, DyadicPartition};
use crate::error::Error;
use crate::fft;
use crate::grid::GridFunction;
use crate::spaces;
use crate::{Result, C64, CMat};
use std::sync::Arc;

// ---------------------------------------------------------------------------
// mollifier

/// The standard even bump ρ(t) = c·exp(−1/(1−t²)) on (−1,1), mass 1.
#[derive(Debug, Clone, Copy)]
pub struct Mollifier {
    c: f64,
}

#[inline]
fn rho_raw(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

impl Default for Mollifier {
    fn default() -> Self {
        Self::new()
    }
}

impl Mollifier {
    pub fn new() -> Self {
        Self { c: 1.0 / Self::quadrature_mass(401) }
    }

    /// Trapezoid mass of the raw bump on [−1,1] with the given node count.
    pub fn quadrature_mass(nodes: usize) -> f64 {
        let h = 2.0 / (nodes - 1) as f64;
        let mut acc = 0.0;
        for i in 0..nodes {
            let t = -1.0 + i as f64 * h;
            let w = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
            acc += w * rho_raw(t);
        }
        acc * h
    }

    #[inline]
    pub fn rho(&self, t: f64) -> f64 {
        self.c * rho_raw(t)
    }

    /// ρ'(t) = ρ(t)·(−2t/(1−t²)²).
    #[inline]
    pub fn rho_prime(&self, t: f64) -> f64 {
        if t.abs() < 1.0 {
            let d = 1.0 - t * t;
            self.rho(t) * (-2.0 * t / (d * d))
        } else {
            0.0
        }
    }
}

// ---------------------------------------------------------------------------
// time-sampled coefficient fields

/// One time sample of an m×m matrix field: either x-independent or on the
/// full grid (x-major layout, entry (r,c) of point x at x·m² + r·m + c).
#[derive(Debug, Clone, PartialEq)]
pub enum XSample {
    Const(Vec<C64>),
    Grid(Vec<C64>),
}

impl XSample {
    fn scaled_add(&mut self, other: &XSample, w: f64) {
        match (self, other) {
            (XSample::Const(a), XSample::Const(b)) | (XSample::Grid(a), XSample::Grid(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y * w;
                }
            }
            _ => unreachable!("TxField enforces a uniform sample kind"),
        }
    }

    fn zeros_like(&self) -> XSample {
        match self {
            XSample::Const(v) => XSample::Const(vec![C64::new(0.0, 0.0); v.len()]),
            XSample::Grid(v) => XSample::Grid(vec![C64::new(0.0, 0.0); v.len()]),
        }
    }

    /// Matrix value at grid point x.
    pub fn matrix_at(&self, x: usize, m: usize) -> CMat {
        match self {
            XSample::Const(v) => CMat::from_row_slice(m, m, v),
            XSample::Grid(v) => CMat::from_row_slice(m, m, &v[x * m * m..(x + 1) * m * m]),
        }
    }
}

/// A coefficient a(t,x) with values in m×m matrices, sampled uniformly in
/// time over [0, t_span] (a single sample means t-constant).
#[derive(Debug, Clone)]
pub struct TxField {
    n: usize,
    m: usize,
    t_span: f64,
    samples: Vec<XSample>,
}

pub const MAX_DENSE_NT: usize = 2048;
pub const MAX_DENSE_N: usize = 4096;

impl TxField {
    fn validate(n: usize, m: usize, t_span: f64, samples: &[XSample]) -> Result<()> {
        crate::grid::check_grid_size(n)?;
        if m == 0 || samples.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient field".into()));
        }
        if samples.len() > 1 && !(t_span > 0.0) {
            return Err(Error::InvalidParameter("time-sampled field needs t_span > 0".into()));
        }
        let grid_kind = matches!(samples[0], XSample::Grid(_));
        for s in samples {
            let (len, kind) = match s {
                XSample::Const(v) => (v.len(), false),
                XSample::Grid(v) => (v.len(), true),
            };
            let want = if kind { n * m * m } else { m * m };
            if len != want || kind != grid_kind {
                return Err(Error::SizeMismatch("inconsistent coefficient samples".into()));
            }
            let finite = match s {
                XSample::Const(v) | XSample::Grid(v) => {
                    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
                }
            };
            if !finite {
                return Err(Error::NumericalGuard("non-finite coefficient sample".into()));
            }
        }
        if grid_kind && (samples.len() > MAX_DENSE_NT || n > MAX_DENSE_N) {
            return Err(Error::MemoryGuard(format!(
                "dense (t,x) coefficient storage capped at n_t ≤ {MAX_DENSE_NT}, n ≤ {MAX_DENSE_N}"
            )));
        }
        Ok(())
    }

    pub fn new(n: usize, m: usize, t_span: f64, samples: Vec<XSample>) -> Result<Self> {
        Self::validate(n, m, t_span, &samples)?;
        Ok(Self { n, m, t_span, samples })
    }

    /// t- and x-independent matrix.
    pub fn constant_matrix(n: usize, mat: &CMat) -> Result<Self> {
        let m = mat.nrows();
        if mat.ncols() != m {
            return Err(Error::SizeMismatch("coefficient matrix not square".into()));
        }
        let v: Vec<C64> = (0..m).flat_map(|r| (0..m).map(move |c| mat[(r, c)])).collect();
        Self::new(n, m, 0.0, vec![XSample::Const(v)])
    }

    /// t-independent scalar field of x.
    pub fn scalar_of_x(g: &GridFunction) -> Result<Self> {
        if g.m() != 1 {
            return Err(Error::SizeMismatch("scalar coefficient expected".into()));
        }
        Self::new(g.n(), 1, 0.0, vec![XSample::Grid(g.comp(0).to_vec())])
    }

    /// x-independent scalar path sampled over [0, t_span].
    pub fn scalar_path(n: usize, t_span: f64, values: &[f64]) -> Result<Self> {
        let samples = values.iter().map(|&v| XSample::Const(vec![C64::new(v, 0.0)])).collect();
        Self::new(n, 1, t_span, samples)
    }

    /// x-independent matrix path sampled over [0, t_span].
    pub fn matrix_path(n: usize, t_span: f64, mats: &[CMat]) -> Result<Self> {
        let m = mats.first().map(|a| a.nrows()).unwrap_or(0);
        let samples = mats
            .iter()
            .map(|a| {
                XSample::Const((0..m).flat_map(|r| (0..m).map(move |c| a[(r, c)])).collect())
            })
            .collect();
        Self::new(n, m, t_span, samples)
    }

    /// Sample a closure (t, x) ↦ m×m matrix on an n_t × n grid.
    pub fn sample_matrix_fn(
        n: usize,
        m: usize,
        t_span: f64,
        n_t: usize,
        f: impl Fn(f64, f64) -> CMat,
    ) -> Result<Self> {
        let samples = (0..n_t)
            .map(|it| {
                let t = if n_t == 1 { 0.0 } else { t_span * it as f64 / (n_t - 1) as f64 };
                let mut v = Vec::with_capacity(n * m * m);
                for x_idx in 0..n {
                    let x = GridFunction::x_of(x_idx, n);
                    let mat = f(t, x);
                    for r in 0..m {
                        for c in 0..m {
                            v.push(mat[(r, c)]);
                        }
                    }
                }
                XSample::Grid(v)
            })
            .collect();
        Self::new(n, m, t_span, samples)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n_t(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn t_span(&self) -> f64 {
        self.t_span
    }

    #[inline]
    pub fn is_const_t(&self) -> bool {
        self.samples.len() == 1
    }

    /// i-th time sample.
    #[inline]
    pub fn sample(&self, i: usize) -> &XSample {
        &self.samples[i]
    }

    /// Time of the i-th sample.
    #[inline]
    pub fn t_of(&self, i: usize) -> f64 {
        if self.is_const_t() {
            0.0
        } else {
            self.t_span * i as f64 / (self.samples.len() - 1) as f64
        }
    }

    /// Time-grid step (meaningless for t-constant fields).
    #[inline]
    pub fn dt(&self) -> f64 {
        self.t_span / (self.samples.len().max(2) - 1) as f64
    }

    /// Entrywise conjugate transpose of every sample.
    pub fn hermitian_transpose(&self) -> TxField {
        let m = self.m;
        let flip = |v: &[C64]| -> Vec<C64> {
            let mut out = vec![C64::new(0.0, 0.0); m * m];
            for r in 0..m {
                for c in 0..m {
                    out[r * m + c] = v[c * m + r].conj();
                }
            }
            out
        };
        let samples = self
            .samples
            .iter()
            .map(|s| match s {
                XSample::Const(v) => XSample::Const(flip(v)),
                XSample::Grid(v) => {
                    let mm = m * m;
                    let mut out = Vec::with_capacity(v.len());
                    for xi in 0..self.n {
                        out.extend(flip(&v[xi * mm..(xi + 1) * mm]));
                    }
                    XSample::Grid(out)
                }
            })
            .collect();
        TxField { n: self.n, m, t_span: self.t_span, samples }
    }

    #[inline]
    fn clamped(&self, i: i64) -> &XSample {
        let idx = i.clamp(0, self.samples.len() as i64 - 1) as usize;
        &self.samples[idx]
    }

    /// Raw value: linear interpolation between samples, constant extension.
    pub fn raw_at(&self, t: f64) -> XSample {
        if self.is_const_t() {
            return self.samples[0].clone();
        }
        let dt = self.dt();
        let pos = (t / dt).clamp(0.0, (self.samples.len() - 1) as f64);
        let i0 = pos.floor() as i64;
        let frac = pos - i0 as f64;
        if frac == 0.0 {
            return self.clamped(i0).clone();
        }
        let mut out = self.clamped(i0).zeros_like();
        out.scaled_add(self.clamped(i0), 1.0 - frac);
        out.scaled_add(self.clamped(i0 + 1), frac);
        out
    }

    fn check_kernel_resolution(&self, eps: f64) -> Result<()> {
        if !(0.0 < eps && eps <= 1.0) {
            return Err(Error::InvalidParameter(format!("mollification width {eps} outside (0,1]")));
        }
        if !self.is_const_t() && eps < 4.0 * self.dt() {
            return Err(Error::InsufficientResolution(format!(
                "kernel width {eps} under-resolved by time step {}",
                self.dt()
            )));
        }
        Ok(())
    }

    /// Mollified value (ρ_ε ∗ a)(t) as a normalized discrete convolution over
    /// the sample grid, with constant extension beyond [0, t_span].
    pub fn moll_at(&self, t: f64, eps: f64, rho: &Mollifier) -> Result<XSample> {
        if self.is_const_t() {
            return Ok(self.samples[0].clone());
        }
        self.check_kernel_resolution(eps)?;
        let dt = self.dt();
        let i_lo = ((t - eps) / dt).ceil() as i64;
        let i_hi = ((t + eps) / dt).floor() as i64;
        let mut wsum = 0.0;
        let mut out = self.samples[0].zeros_like();
        for i in i_lo..=i_hi {
            let w = rho.rho((t - i as f64 * dt) / eps);
            if w > 0.0 {
                out.scaled_add(self.clamped(i), w);
                wsum += w;
            }
        }
        if wsum <= 0.0 {
            return Err(Error::InsufficientResolution("empty mollification stencil".into()));
        }
        match &mut out {
            XSample::Const(v) | XSample::Grid(v) => {
                for z in v.iter_mut() {
                    *z /= wsum;
                }
            }
        }
        Ok(out)
    }

    /// ∂_t of the mollified value, by analytic differentiation of the
    /// normalized weights (so ∂_t of a t-constant field is exactly zero).
    pub fn moll_dt_at(&self, t: f64, eps: f64, rho: &Mollifier) -> Result<XSample> {
        if self.is_const_t() {
            let mut z = self.samples[0].zeros_like();
            z.scaled_add(&self.samples[0], 0.0);
            return Ok(z);
        }
        self.check_kernel_resolution(eps)?;
        let dt = self.dt();
        let i_lo = ((t - eps) / dt).ceil() as i64;
        let i_hi = ((t + eps) / dt).floor() as i64;
        let mut w = Vec::new();
        let mut dw = Vec::new();
        let mut idx = Vec::new();
        let (mut wsum, mut dwsum) = (0.0, 0.0);
        for i in i_lo..=i_hi {
            let s = (t - i as f64 * dt) / eps;
            let wi = rho.rho(s);
            let dwi = rho.rho_prime(s) / eps;
            if wi > 0.0 || dwi != 0.0 {
                w.push(wi);
                dw.push(dwi);
                idx.push(i);
                wsum += wi;
                dwsum += dwi;
            }
        }
        if wsum <= 0.0 {
            return Err(Error::InsufficientResolution("empty mollification stencil".into()));
        }
        let mut out = self.samples[0].zeros_like();
        for ((wi, dwi), i) in w.iter().zip(&dw).zip(&idx) {
            // d/dt (w_i/W) = (w_i' W − w_i W')/W²
            let coef = (dwi * wsum - wi * dwsum) / (wsum * wsum);
            out.scaled_add(self.clamped(*i), coef);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// coefficient views

/// How a symbol term reads its coefficient in time.
#[derive(Debug, Clone)]
pub enum CoeffView {
    Raw(Arc<TxField>),
    Mollified { base: Arc<TxField>, eps: f64 },
    MollifiedDt { base: Arc<TxField>, eps: f64 },
}

impl CoeffView {
    pub fn base(&self) -> &Arc<TxField> {
        match self {
            CoeffView::Raw(f) | CoeffView::Mollified { base: f, .. } | CoeffView::MollifiedDt { base: f, .. } => f,
        }
    }

    pub fn value_at(&self, t: f64, rho: &Mollifier) -> Result<XSample> {
        match self {
            CoeffView::Raw(f) => Ok(f.raw_at(t)),
            CoeffView::Mollified { base, eps } => base.moll_at(t, *eps, rho),
            CoeffView::MollifiedDt { base, eps } => base.moll_dt_at(t, *eps, rho),
        }
    }
}

// ---------------------------------------------------------------------------
// admissible cutoff

/// Windowed admissible cutoff ψ(η,ξ) = Σ_w χ(2^{−(w+shift)}η)·W_w(ξ), the
/// default being shift = −3 (ψ₋₃). The windowed form is what makes smoothing
/// separable: each ξ-window pairs with one x-low-pass filter.
#[derive(Debug, Clone)]
pub struct AdmissibleCutoff {
    shift: i32,
    eps1: f64,
    eps2: f64,
}

impl AdmissibleCutoff {
    /// ψ₋₃ with support fractions measured on the partition's grid.
    pub fn make_psi_minus3(part: &DyadicPartition) -> Self {
        Self::with_shift(part, -3)
    }

    /// Variant with a different dilation shift (−4 halves both ε's).
    pub fn with_shift(part: &DyadicPartition, shift: i32) -> Self {
        let n_eval = part.n().min(512);
        let half = (n_eval / 2) as i64;
        let mut eps1 = f64::INFINITY;
        let mut eps2 = 0.0f64;
        for eta in -half..half {
            if eta == 0 {
                continue; // ψ(0,ξ) = 1 always; no constraint
            }
            for xi in -half..half {
                let v = psi_value(shift, eta as f64, xi as f64);
                let ratio = eta.abs() as f64 / (1.0 + xi.abs() as f64);
                if v < 1.0 - 1e-9 {
                    eps1 = eps1.min(ratio);
                }
                if v > 1e-12 {
                    eps2 = eps2.max(ratio);
                }
            }
        }
        Self { shift, eps1: eps1 * (1.0 - 1e-9), eps2: eps2 * (1.0 + 1e-9) }
    }

    #[inline]
    pub fn shift(&self) -> i32 {
        self.shift
    }

    #[inline]
    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    #[inline]
    pub fn eps2(&self) -> f64 {
        self.eps2
    }

    #[inline]
    pub fn psi(&self, eta: f64, xi: f64) -> f64 {
        psi_value(self.shift, eta, xi)
    }
}

fn psi_value(shift: i32, eta: f64, xi: f64) -> f64 {
    // windows above log2|ξ|+2 vanish
    let w_hi = if xi.abs() < 2.0 { 2 } else { xi.abs().log2().ceil() as i32 + 2 };
    let mut acc = 0.0;
    for w in 0..=w_hi {
        let win = dyadic::window(w, xi);
        if win > 0.0 {
            acc += win * dyadic::chi(eta * 0.5f64.powi(w + shift));
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// symbol tree

/// Spatial regularity grade of a symbol's coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassX {
    Linf,
    LL,
    HolderLog(f64, f64),
}

/// Temporal regularity grade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassT {
    Linf,
    LL,
}

#[derive(Debug, Clone)]
pub enum SymbolKind {
    /// Separable term coeff(t,x) ⊗ mult(ξ).
    Term { coeff: CoeffView, mult: Arc<Vec<C64>> },
    Sum(Vec<Symbol>),
    Scaled(C64, Box<Symbol>),
    /// ψ(D_x, ξ)-smoothed symbol σ_inner.
    Smoothed { inner: Box<Symbol>, psi: Arc<AdmissibleCutoff> },
    /// Principal Hermitian square root, termwise over banded disjoint terms.
    SqrtHerm(Box<Symbol>),
    /// Pointwise product left(t,x,ξ)·right(t,x,ξ).
    Product(Box<Symbol>, Box<Symbol>),
}

#[derive(Debug, Clone)]
pub struct Symbol {
    pub kind: SymbolKind,
    pub order_m: f64,
    pub order_delta: f64,
    pub class_x: ClassX,
    pub class_t: ClassT,
    n: usize,
    m: usize,
}

impl Symbol {
    pub fn term(
        field: Arc<TxField>,
        mult: Vec<C64>,
        order: (f64, f64),
        class_x: ClassX,
        class_t: ClassT,
    ) -> Result<Self> {
        if mult.len() != field.n() {
            return Err(Error::SizeMismatch("multiplier table length".into()));
        }
        Ok(Self {
            n: field.n(),
            m: field.m(),
            kind: SymbolKind::Term { coeff: CoeffView::Raw(field), mult: Arc::new(mult) },
            order_m: order.0,
            order_delta: order.1,
            class_x,
            class_t,
        })
    }

    /// Order-(0,0) symbol that is just the coefficient itself (mult ≡ 1).
    pub fn coefficient(field: TxField, class_x: ClassX, class_t: ClassT) -> Result<Self> {
        let ones = vec![C64::new(1.0, 0.0); field.n()];
        Self::term(Arc::new(field), ones, (0.0, 0.0), class_x, class_t)
    }

    /// Pure Fourier multiplier w(k)·Id_dim of the stated order.
    pub fn multiplier(
        n: usize,
        dim: usize,
        w: impl Fn(i64) -> C64,
        order: (f64, f64),
    ) -> Result<Self> {
        let id = CMat::identity(dim, dim);
        let field = TxField::constant_matrix(n, &id)?;
        let mult = (0..n).map(|i| w(fft::freq_of(i, n))).collect();
        Self::term(Arc::new(field), mult, order, ClassX::Linf, ClassT::Linf)
    }

    pub fn sum(parts: Vec<Symbol>) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidParameter("empty symbol sum".into()))?;
        let (n, m) = (first.n, first.m);
        if parts.iter().any(|p| p.n != n || p.m != m) {
            return Err(Error::SizeMismatch("symbol sum shapes".into()));
        }
        let order_m = parts.iter().map(|p| p.order_m).fold(f64::NEG_INFINITY, f64::max);
        let order_delta = parts.iter().map(|p| p.order_delta).fold(f64::NEG_INFINITY, f64::max);
        let class_x = first.class_x;
        let class_t = first.class_t;
        Ok(Self { kind: SymbolKind::Sum(parts), order_m, order_delta, class_x, class_t, n, m })
    }

    pub fn scaled(self, c: C64) -> Self {
        let (order_m, order_delta, class_x, class_t, n, m) =
            (self.order_m, self.order_delta, self.class_x, self.class_t, self.n, self.m);
        Self { kind: SymbolKind::Scaled(c, Box::new(self)), order_m, order_delta, class_x, class_t, n, m }
    }

    /// Pointwise symbol product (orders add).
    pub fn product(a: Symbol, b: Symbol) -> Result<Self> {
        if a.n != b.n || a.m != b.m {
            return Err(Error::SizeMismatch("symbol product shapes".into()));
        }
        let order_m = a.order_m + b.order_m;
        let order_delta = a.order_delta + b.order_delta;
        let (class_x, class_t, n, m) = (a.class_x, a.class_t, a.n, a.m);
        Ok(Self {
            kind: SymbolKind::Product(Box::new(a), Box::new(b)),
            order_m,
            order_delta,
            class_x,
            class_t,
            n,
            m,
        })
    }

    /// Principal Hermitian square root of a banded positive symbol.
    pub fn sqrt_herm(self) -> Self {
        let (order_m, order_delta, class_x, class_t, n, m) =
            (self.order_m / 2.0, self.order_delta / 2.0, self.class_x, self.class_t, self.n, self.m);
        Self { kind: SymbolKind::SqrtHerm(Box::new(self)), order_m, order_delta, class_x, class_t, n, m }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn is_smoothed(&self) -> bool {
        match &self.kind {
            SymbolKind::Smoothed { .. } => true,
            SymbolKind::Term { coeff, .. } => {
                // x-independent terms are trivially admissible
                matches!(coeff.base().samples.first(), Some(XSample::Const(_)))
            }
            SymbolKind::Sum(parts) => parts.iter().all(|p| p.is_smoothed()),
            SymbolKind::Scaled(_, inner) | SymbolKind::SqrtHerm(inner) => inner.is_smoothed(),
            SymbolKind::Product(a, b) => a.is_smoothed() && b.is_smoothed(),
        }
    }

    /// Longest time axis among the coefficient fields: (t_span, n_t).
    pub fn time_extent(&self) -> (f64, usize) {
        match &self.kind {
            SymbolKind::Term { coeff, .. } => (coeff.base().t_span(), coeff.base().n_t()),
            SymbolKind::Sum(parts) => parts
                .iter()
                .map(|p| p.time_extent())
                .max_by(|a, b| a.1.cmp(&b.1))
                .unwrap_or((0.0, 1)),
            SymbolKind::Scaled(_, inner) | SymbolKind::Smoothed { inner, .. } | SymbolKind::SqrtHerm(inner) => {
                inner.time_extent()
            }
            SymbolKind::Product(a, b) => {
                let (ta, tb) = (a.time_extent(), b.time_extent());
                if ta.1 >= tb.1 {
                    ta
                } else {
                    tb
                }
            }
        }
    }

    /// Fixed-t separable form.
    pub fn slice(&self, t: f64) -> Result<SymbolSlice> {
        let rho = Mollifier::new();
        let mut terms = Vec::new();
        self.collect_terms(t, &rho, &mut terms)?;
        Ok(SymbolSlice { n: self.n, m: self.m, terms })
    }

    fn collect_terms(&self, t: f64, rho: &Mollifier, out: &mut Vec<SliceTerm>) -> Result<()> {
        match &self.kind {
            SymbolKind::Term { coeff, mult } => {
                out.push(SliceTerm { field: coeff.value_at(t, rho)?, mult: mult.clone() });
            }
            SymbolKind::Sum(parts) => {
                for p in parts {
                    p.collect_terms(t, rho, out)?;
                }
            }
            SymbolKind::Scaled(c, inner) => {
                let mut tmp = Vec::new();
                inner.collect_terms(t, rho, &mut tmp)?;
                for term in &mut tmp {
                    match &mut term.field {
                        XSample::Const(v) | XSample::Grid(v) => {
                            for z in v.iter_mut() {
                                *z *= c;
                            }
                        }
                    }
                }
                out.append(&mut tmp);
            }
            SymbolKind::Smoothed { inner, psi } => {
                let mut tmp = Vec::new();
                inner.collect_terms(t, rho, &mut tmp)?;
                let w_max = (self.n.trailing_zeros() as i32) - 1;
                for term in tmp {
                    match &term.field {
                        // ψ(0,ξ) = 1: smoothing of x-constant terms is the identity
                        XSample::Const(_) => out.push(term),
                        XSample::Grid(_) => {
                            for w in 0..=w_max {
                                let win: Vec<f64> = (0..self.n)
                                    .map(|i| dyadic::window(w, fft::freq_of(i, self.n) as f64))
                                    .collect();
                                let mult: Vec<C64> = term
                                    .mult
                                    .iter()
                                    .zip(&win)
                                    .map(|(z, w)| z * w)
                                    .collect();
                                if mult.iter().all(|z| z.norm_sqr() == 0.0) {
                                    continue;
                                }
                                let field = xfilter(&term.field, self.n, self.m, |eta| {
                                    dyadic::chi(eta * 0.5f64.powi(w + psi.shift()))
                                });
                                out.push(SliceTerm { field, mult: Arc::new(mult) });
                            }
                        }
                    }
                }
            }
            SymbolKind::SqrtHerm(inner) => {
                let mut tmp = Vec::new();
                inner.collect_terms(t, rho, &mut tmp)?;
                check_banded_disjoint(&tmp)?;
                for term in tmp {
                    let field = sqrt_herm_sample(&term.field, self.m)?;
                    out.push(SliceTerm { field, mult: term.mult });
                }
            }
            SymbolKind::Product(a, b) => {
                let (mut ta, mut tb) = (Vec::new(), Vec::new());
                a.collect_terms(t, rho, &mut ta)?;
                b.collect_terms(t, rho, &mut tb)?;
                for pa in &ta {
                    for pb in &tb {
                        let mult: Vec<C64> =
                            pa.mult.iter().zip(pb.mult.iter()).map(|(x, y)| x * y).collect();
                        if mult.iter().all(|z| z.norm_sqr() == 0.0) {
                            continue;
                        }
                        let field = matmul_samples(&pa.field, &pb.field, self.n, self.m);
                        out.push(SliceTerm { field, mult: Arc::new(mult) });
                    }
                }
            }
        }
        Ok(())
    }

    /// Point evaluation through a fresh slice; for repeated evaluation at one
    /// t, build the slice once and use [`SymbolSlice::eval`].
    pub fn eval(&self, t: f64, x_idx: usize, k: i64) -> Result<CMat> {
        Ok(self.slice(t)?.eval(x_idx, k))
    }
}

/// Filter every matrix entry of a Grid sample in x by a real multiplier.
fn xfilter(field: &XSample, n: usize, m: usize, w: impl Fn(f64) -> f64) -> XSample {
    match field {
        XSample::Const(v) => XSample::Const(v.clone()), // w(0)=1 for our filters
        XSample::Grid(v) => {
            let table: Vec<f64> = (0..n).map(|i| w(fft::freq_of(i, n) as f64)).collect();
            let mm = m * m;
            let mut out = vec![C64::new(0.0, 0.0); n * mm];
            let mut buf = vec![C64::new(0.0, 0.0); n];
            for e in 0..mm {
                for x in 0..n {
                    buf[x] = v[x * mm + e];
                }
                fft::forward(&mut buf);
                for (z, w) in buf.iter_mut().zip(&table) {
                    *z *= *w;
                }
                fft::inverse(&mut buf);
                for x in 0..n {
                    out[x * mm + e] = buf[x];
                }
            }
            XSample::Grid(out)
        }
    }
}

fn matmul_samples(a: &XSample, b: &XSample, n: usize, m: usize) -> XSample {
    let mul = |x: &[C64], y: &[C64], out: &mut [C64]| {
        for r in 0..m {
            for c in 0..m {
                let mut acc = C64::new(0.0, 0.0);
                for q in 0..m {
                    acc += x[r * m + q] * y[q * m + c];
                }
                out[r * m + c] = acc;
            }
        }
    };
    let mm = m * m;
    match (a, b) {
        (XSample::Const(x), XSample::Const(y)) => {
            let mut out = vec![C64::new(0.0, 0.0); mm];
            mul(x, y, &mut out);
            XSample::Const(out)
        }
        _ => {
            let slice_of = |s: &XSample, xi: usize| -> Vec<C64> {
                match s {
                    XSample::Const(v) => v.clone(),
                    XSample::Grid(v) => v[xi * mm..(xi + 1) * mm].to_vec(),
                }
            };
            let mut out = vec![C64::new(0.0, 0.0); n * mm];
            for xi in 0..n {
                let (x, y) = (slice_of(a, xi), slice_of(b, xi));
                mul(&x, &y, &mut out[xi * mm..(xi + 1) * mm]);
            }
            XSample::Grid(out)
        }
    }
}

fn check_banded_disjoint(terms: &[SliceTerm]) -> Result<()> {
    let n = terms.first().map(|t| t.mult.len()).unwrap_or(0);
    for bin in 0..n {
        let mut total = 0.0;
        for t in terms {
            let v = t.mult[bin];
            if v.im.abs() > 1e-12 || (v.re - v.re.round()).abs() > 1e-12 || !(0.0..=1.0).contains(&v.re.round()) {
                return Err(Error::InvalidParameter(
                    "square root requires 0/1 band-indicator multipliers".into(),
                ));
            }
            total += v.re;
        }
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(
                "square root requires disjoint band indicators".into(),
            ));
        }
    }
    Ok(())
}

/// Principal Hermitian square root of a positive-definite matrix sample.
fn sqrt_herm_sample(field: &XSample, m: usize) -> Result<XSample> {
    let mm = m * m;
    let root = |v: &[C64]| -> Result<Vec<C64>> {
        match m {
            1 => {
                let z = v[0];
                if z.im.abs() > 1e-9 * (1.0 + z.re.abs()) || z.re <= 0.0 {
                    return Err(Error::NotPositive(format!("scalar symmetrizer sample {z}")));
                }
                Ok(vec![C64::new(z.re.sqrt(), 0.0)])
            }
            2 => {
                // closed form for 2×2 Hermitian positive matrices:
                // √M = (M + √det·I)/√(tr + 2√det)
                let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
                if (b - c.conj()).norm() > 1e-9 * (1.0 + b.norm()) || a.im.abs() > 1e-9 || d.im.abs() > 1e-9 {
                    return Err(Error::NotPositive("non-Hermitian symmetrizer sample".into()));
                }
                let det = (a * d - b * c).re;
                let tr = (a + d).re;
                if det <= 0.0 || tr <= 0.0 {
                    return Err(Error::NotPositive(format!("indefinite sample: tr {tr}, det {det}")));
                }
                let s = det.sqrt();
                let den = (tr + 2.0 * s).sqrt();
                Ok(vec![
                    (a + s) / den,
                    b / den,
                    c / den,
                    (d + s) / den,
                ])
            }
            _ => {
                let mat = CMat::from_row_slice(m, m, v);
                let herm = (&mat + mat.adjoint()) * C64::new(0.5, 0.0);
                if (&mat - &herm).norm() > 1e-9 * (1.0 + mat.norm()) {
                    return Err(Error::NotPositive("non-Hermitian symmetrizer sample".into()));
                }
                let eig = herm.symmetric_eigen();
                if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
                    return Err(Error::NotPositive("non-positive eigenvalue".into()));
                }
                let sq = CMat::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.sqrt(), 0.0)));
                let root = &eig.eigenvectors * sq * eig.eigenvectors.adjoint();
                Ok(root.transpose().as_slice().to_vec())
            }
        }
    };
    match field {
        XSample::Const(v) => Ok(XSample::Const(root(v)?)),
        XSample::Grid(v) => {
            let n = v.len() / mm;
            let mut out = Vec::with_capacity(v.len());
            for xi in 0..n {
                out.extend(root(&v[xi * mm..(xi + 1) * mm])?);
            }
            Ok(XSample::Grid(out))
        }
    }
}

// ---------------------------------------------------------------------------
// fixed-t slices

#[derive(Debug, Clone)]
pub struct SliceTerm {
    pub field: XSample,
    /// Frequency multiplier in FFT bin order.
    pub mult: Arc<Vec<C64>>,
}

/// σ(t₀,·,·) as a sum of separable (x-field, ξ-multiplier) pairs.
#[derive(Debug, Clone)]
pub struct SymbolSlice {
    n: usize,
    m: usize,
    pub terms: Vec<SliceTerm>,
}

impl SymbolSlice {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn eval(&self, x_idx: usize, k: i64) -> CMat {
        let bin = fft::index_of(k, self.n);
        let mut acc = CMat::zeros(self.m, self.m);
        for term in &self.terms {
            let w = term.mult[bin];
            if w.norm_sqr() == 0.0 {
                continue;
            }
            acc += term.field.matrix_at(x_idx, self.m) * w;
        }
        acc
    }

    /// The x-field of σ(·,k) as a flat n·m² vector.
    pub fn field_at_k(&self, k: i64) -> Vec<C64> {
        let bin = fft::index_of(k, self.n);
        let mm = self.m * self.m;
        let mut out = vec![C64::new(0.0, 0.0); self.n * mm];
        for term in &self.terms {
            let w = term.mult[bin];
            if w.norm_sqr() == 0.0 {
                continue;
            }
            match &term.field {
                XSample::Const(v) => {
                    for x in 0..self.n {
                        for e in 0..mm {
                            out[x * mm + e] += v[e] * w;
                        }
                    }
                }
                XSample::Grid(v) => {
                    for (o, z) in out.iter_mut().zip(v.iter()) {
                        *o += z * w;
                    }
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// structural operations

/// σ_a: filter the x-spectrum of a(·,ξ) with ψ(·,ξ).
pub fn smooth_symbol(a: &Symbol, psi: &Arc<AdmissibleCutoff>) -> Symbol {
    let (order_m, order_delta, class_x, class_t, n, m) =
        (a.order_m, a.order_delta, a.class_x, a.class_t, a.n, a.m);
    Symbol {
        kind: SymbolKind::Smoothed { inner: Box::new(a.clone()), psi: psi.clone() },
        order_m,
        order_delta,
        class_x,
        class_t,
        n,
        m,
    }
}

fn map_terms(a: &Symbol, f: &impl Fn(&CoeffView, &Arc<Vec<C64>>) -> Result<SymbolKind>) -> Result<Symbol> {
    let kind = match &a.kind {
        SymbolKind::Term { coeff, mult } => f(coeff, mult)?,
        SymbolKind::Sum(parts) => {
            SymbolKind::Sum(parts.iter().map(|p| map_terms(p, f)).collect::<Result<_>>()?)
        }
        SymbolKind::Scaled(c, inner) => SymbolKind::Scaled(*c, Box::new(map_terms(inner, f)?)),
        SymbolKind::Smoothed { inner, psi } => {
            SymbolKind::Smoothed { inner: Box::new(map_terms(inner, f)?), psi: psi.clone() }
        }
        SymbolKind::SqrtHerm(_) | SymbolKind::Product(_, _) => {
            return Err(Error::InvalidParameter(
                "time smoothing applies to linear symbol expressions only".into(),
            ))
        }
    };
    let mut out = a.clone();
    out.kind = kind;
    Ok(out)
}

/// a_ε: mollify every coefficient in time with fixed width ε.
pub fn mollify_time(a: &Symbol, eps: f64) -> Result<Symbol> {
    map_terms(a, &|coeff, mult| match coeff {
        CoeffView::Raw(base) => {
            if !base.is_const_t() {
                base.check_kernel_resolution(eps)?;
            }
            let view = if base.is_const_t() {
                CoeffView::Raw(base.clone())
            } else {
                CoeffView::Mollified { base: base.clone(), eps }
            };
            Ok(SymbolKind::Term { coeff: view, mult: mult.clone() })
        }
        _ => Err(Error::InvalidParameter("coefficient is already time-smoothed".into())),
    })
}

/// Band partition for the tilde: band(k) = round(log2⟨k⟩) capped at j_max.
pub fn band_of(k: i64, j_max: i32) -> i32 {
    let mag = (1.0 + (k * k) as f64).sqrt();
    (mag.log2().round() as i32).clamp(0, j_max)
}

/// ã: time mollification with frequency-linked width ε_b = 2^{−b} per dyadic
/// band b. Errors when the coefficient time grid cannot resolve ε_{j_max}.
pub fn tilde_symbol(a: &Symbol, part: &DyadicPartition) -> Result<Symbol> {
    tilde_impl(a, part, false)
}

/// ∂_t ã as a symbol (order gains one log).
pub fn tilde_dt_symbol(a: &Symbol, part: &DyadicPartition) -> Result<Symbol> {
    let mut out = tilde_impl(a, part, true)?;
    out.order_delta = a.order_delta + 1.0;
    Ok(out)
}

fn tilde_impl(a: &Symbol, part: &DyadicPartition, dt_view: bool) -> Result<Symbol> {
    let j_max = part.j_max();
    let n = part.n();
    map_terms(a, &|coeff, mult| match coeff {
        CoeffView::Raw(base) => {
            if base.is_const_t() {
                if dt_view {
                    // ∂_t of a t-constant coefficient is zero
                    let zero = vec![C64::new(0.0, 0.0); n];
                    return Ok(SymbolKind::Term { coeff: CoeffView::Raw(base.clone()), mult: Arc::new(zero) });
                }
                return Ok(SymbolKind::Term { coeff: CoeffView::Raw(base.clone()), mult: Arc::new(mult.to_vec()) });
            }
            base.check_kernel_resolution(0.5f64.powi(j_max))?;
            let mut parts = Vec::new();
            for b in 0..=j_max {
                let masked: Vec<C64> = (0..n)
                    .map(|i| {
                        if band_of(fft::freq_of(i, n), j_max) == b {
                            mult[i]
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                if masked.iter().all(|z| z.norm_sqr() == 0.0) {
                    continue;
                }
                let eps = 0.5f64.powi(b).min(1.0);
                let view = if dt_view {
                    CoeffView::MollifiedDt { base: base.clone(), eps }
                } else {
                    CoeffView::Mollified { base: base.clone(), eps }
                };
                parts.push(Symbol {
                    kind: SymbolKind::Term { coeff: view, mult: Arc::new(masked) },
                    order_m: 0.0,
                    order_delta: 0.0,
                    class_x: ClassX::Linf,
                    class_t: ClassT::Linf,
                    n,
                    m: base.m(),
                });
            }
            Ok(SymbolKind::Sum(parts))
        }
        _ => Err(Error::InvalidParameter("coefficient is already time-smoothed".into())),
    })
}

/// ā: pointwise Hermitian transpose of the matrix symbol (the symbol of the
/// formal adjoint). Commutes with smoothing (real even filter tables) and
/// with time mollification (real weights).
pub fn adjoint_symbol(a: &Symbol) -> Result<Symbol> {
    let kind = match &a.kind {
        SymbolKind::Term { coeff, mult } => {
            let conj_mult: Vec<C64> = mult.iter().map(|z| z.conj()).collect();
            let view = match coeff {
                CoeffView::Raw(base) => CoeffView::Raw(Arc::new(base.hermitian_transpose())),
                CoeffView::Mollified { base, eps } => {
                    CoeffView::Mollified { base: Arc::new(base.hermitian_transpose()), eps: *eps }
                }
                CoeffView::MollifiedDt { base, eps } => {
                    CoeffView::MollifiedDt { base: Arc::new(base.hermitian_transpose()), eps: *eps }
                }
            };
            SymbolKind::Term { coeff: view, mult: Arc::new(conj_mult) }
        }
        SymbolKind::Sum(parts) => {
            SymbolKind::Sum(parts.iter().map(adjoint_symbol).collect::<Result<_>>()?)
        }
        SymbolKind::Scaled(c, inner) => {
            SymbolKind::Scaled(c.conj(), Box::new(adjoint_symbol(inner)?))
        }
        SymbolKind::Smoothed { inner, psi } => {
            SymbolKind::Smoothed { inner: Box::new(adjoint_symbol(inner)?), psi: psi.clone() }
        }
        SymbolKind::SqrtHerm(_) | SymbolKind::Product(_, _) => {
            return Err(Error::InvalidParameter(
                "adjoint symbol implemented for linear symbol expressions".into(),
            ))
        }
    };
    let mut out = a.clone();
    out.kind = kind;
    Ok(out)
}

/// Commutation residual of σ_ã = (σ_a)~ — spectral smoothing and time
/// mollification in either order. Both paths evaluated on a frequency ladder
/// at a few time slices; returns the max relative entrywise deviation.
pub fn commutation_check(a: &Symbol, psi: &Arc<AdmissibleCutoff>, part: &DyadicPartition) -> Result<f64> {
    let p1 = tilde_symbol(&smooth_symbol(a, psi), part)?;
    let p2 = smooth_symbol(&tilde_symbol(a, part)?, psi);
    let (t_span, n_t) = a.time_extent();
    let ts: Vec<f64> = if n_t == 1 {
        vec![0.0]
    } else {
        vec![0.1 * t_span, 0.5 * t_span, 0.9 * t_span]
    };
    let ks = frequency_ladder(a.n, 0);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for &t in &ts {
        let (s1, s2) = (p1.slice(t)?, p2.slice(t)?);
        for &k in &ks {
            let (f1, f2) = (s1.field_at_k(k), s2.field_at_k(k));
            for (x, y) in f1.iter().zip(&f2) {
                worst = worst.max((x - y).norm());
                scale = scale.max(x.norm());
            }
        }
    }
    Ok(worst / scale.max(1e-300))
}

/// Geometric frequency ladder ±{0,1,2,3,4,6,8,12,...} up to n/2−1−margin.
pub fn frequency_ladder(n: usize, margin: i64) -> Vec<i64> {
    let top = n as i64 / 2 - 1 - margin;
    let mut ks = vec![0i64, 1, 2, 3];
    let mut base = 4i64;
    while base <= top {
        ks.push(base);
        let mid = base * 3 / 2;
        if mid <= top {
            ks.push(mid);
        }
        base *= 2;
    }
    if !ks.contains(&top) && top > 0 {
        ks.push(top);
    }
    let mut all: Vec<i64> = ks.iter().flat_map(|&k| if k == 0 { vec![0] } else { vec![k, -k] }).collect();
    all.sort_unstable();
    all.dedup();
    all
}

// ---------------------------------------------------------------------------
// seminorms

#[derive(Debug, Clone)]
pub struct SeminormRow {
    pub alpha: u32,
    /// sup_ξ (1+|ξ|)^{−(m−α)} π(ξ)^{−δ} ‖∂^α_ξ a(·,ξ)‖_{L∞}
    pub linf: f64,
    /// Same weight with the class-appropriate x-seminorm (LL or Hölder-log).
    pub class_x: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SeminormTable {
    pub order: (f64, f64),
    pub rows: Vec<SeminormRow>,
}

/// Class seminorms up to ξ-derivative order k_max ≤ 2; ξ-derivatives by
/// centered differences on the integer frequency grid. Higher-order LL
/// seminorms apply the x-LL estimator to each ∂^α_ξ a.
pub fn symbol_seminorm(a: &Symbol, k_max: u32) -> Result<SeminormTable> {
    if k_max > 2 {
        return Err(Error::InvalidParameter("seminorms implemented for k_max ≤ 2".into()));
    }
    let n = a.n;
    let mm = a.m * a.m;
    let (t_span, n_t) = a.time_extent();
    let ts: Vec<f64> = if n_t == 1 {
        vec![0.0]
    } else {
        (0..5).map(|i| t_span * i as f64 / 4.0).collect()
    };
    let ks = frequency_ladder(n, k_max as i64);
    let mut rows: Vec<SeminormRow> = (0..=k_max)
        .map(|alpha| SeminormRow { alpha, linf: 0.0, class_x: None })
        .collect();
    let use_class = !matches!(a.class_x, ClassX::Linf);
    for &t in &ts {
        let slice = a.slice(t)?;
        for &k in &ks {
            let center = slice.field_at_k(k);
            let (lo, hi);
            if k_max > 0 {
                lo = Some(slice.field_at_k(k - 1));
                hi = Some(slice.field_at_k(k + 1));
            } else {
                lo = None;
                hi = None;
            }
            for alpha in 0..=k_max {
                let deriv: Vec<C64> = match alpha {
                    0 => center.clone(),
                    1 => hi
                        .as_ref()
                        .unwrap()
                        .iter()
                        .zip(lo.as_ref().unwrap())
                        .map(|(h, l)| (h - l) * 0.5)
                        .collect(),
                    _ => hi
                        .as_ref()
                        .unwrap()
                        .iter()
                        .zip(lo.as_ref().unwrap())
                        .zip(&center)
                        .map(|((h, l), c)| h + l - c * 2.0)
                        .collect(),
                };
                if deriv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::NumericalGuard(format!("non-finite symbol value at k={k}")));
                }
                let w = (1.0 + k.abs() as f64).powf(-(a.order_m - alpha as f64))
                    * (2.0 + k.abs() as f64).ln().powf(-a.order_delta);
                let sup = deriv.iter().map(|z| z.norm()).fold(0.0, f64::max);
                rows[alpha as usize].linf = rows[alpha as usize].linf.max(w * sup);
                if use_class {
                    let mut cls = 0.0f64;
                    for e in 0..mm {
                        let entry: Vec<C64> = (0..n).map(|x| deriv[x * mm + e]).collect();
                        let g = GridFunction::from_components(vec![entry])?;
                        let v = match a.class_x {
                            ClassX::LL => spaces::ll_seminorm_direct(&g),
                            ClassX::HolderLog(gamma, rho_exp) => {
                                holder_log_seminorm(&g, gamma, rho_exp)?
                            }
                            ClassX::Linf => unreachable!(),
                        };
                        cls = cls.max(v);
                    }
                    let prev = rows[alpha as usize].class_x.unwrap_or(0.0);
                    rows[alpha as usize].class_x = Some(prev.max(w * cls));
                }
            }
        }
    }
    Ok(SeminormTable { order: (a.order_m, a.order_delta), rows })
}

/// sup_j 2^{γj}(1+j)^{−ρ}‖Δ_j f‖_∞ — the Hölder-log grade in x.
fn holder_log_seminorm(f: &GridFunction, gamma: f64, rho_exp: f64) -> Result<f64> {
    spaces::log_besov_norm(f, gamma, -rho_exp, u32::MAX, u32::MAX)
}

// ---------------------------------------------------------------------------
