//! First-order hyperbolic systems on the periodic line and their microlocal
//! symmetrizers.
//!
//! A system is the data L = ∂_t + A(t,x)∂_x + B(t,x) (or its conservative
//! counterpart ∂_t + ∂_x(A ·) + B) together with a declared regularity
//! budget; the constructor audits the budget against measured seminorms so
//! that downstream estimates can trust the declared constants. For strictly
//! hyperbolic A the symmetrizer is built pointwise from the eigenbasis:
//! S = (R⁻¹)ᴴ R⁻¹, which is Hermitian, positive, and makes S·(ξA)
//! self-adjoint for real spectra.

use std::sync::Arc;

use nalgebra::SVD;

use crate::grid::GridFunction;
use crate::spaces::{holder_seminorm_direct, ll_seminorm_direct, ll_seminorm_path};
use crate::symbols::{TxField, XSample};
use crate::{C64, CMat, Error, Result};

/// Declared coefficient budget: sup bound K₀ on |A| and |B|, log-Lipschitz
/// bound K₁ on A (in t and in x), and Hölder-γ bound K₂ on B.
#[derive(Clone, Copy, Debug)]
pub struct RegularitySeminorms {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub gamma: f64,
}

/// Whether the spatial term is A∂_x (non-conservative) or ∂_x(A·).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    NonConservative,
    Conservative,
}

/// Right-hand side f(t, x), either absent or linearly interpolated between
/// sampled grid profiles.
#[derive(Clone, Debug)]
pub enum Forcing {
    Zero,
    Sampled { t_span: f64, samples: Vec<GridFunction> },
}

impl Forcing {
    fn validate(&self, n: usize, m: usize) -> Result<()> {
        match self {
            Forcing::Zero => Ok(()),
            Forcing::Sampled { t_span, samples } => {
                if samples.is_empty() || (samples.len() > 1 && !(*t_span > 0.0)) {
                    return Err(Error::InvalidParameter("forcing needs samples and span".into()));
                }
                for s in samples {
                    if s.n() != n || s.m() != m {
                        return Err(Error::SizeMismatch("forcing shape mismatch".into()));
                    }
                }
                Ok(())
            }
        }
    }

    /// Value at time t (constant extension outside the sampled span).
    pub fn at(&self, t: f64, n: usize, m: usize) -> GridFunction {
        match self {
            Forcing::Zero => {
                GridFunction::from_components(vec![vec![C64::new(0.0, 0.0); n]; m]).unwrap()
            }
            Forcing::Sampled { t_span, samples } => {
                if samples.len() == 1 {
                    return samples[0].clone();
                }
                let dt = t_span / (samples.len() - 1) as f64;
                let pos = (t / dt).clamp(0.0, (samples.len() - 1) as f64);
                let i = (pos.floor() as usize).min(samples.len() - 2);
                let w = pos - i as f64;
                samples[i].scaled(C64::new(1.0 - w, 0.0)).add(&samples[i + 1].scaled(C64::new(w, 0.0))).unwrap()
            }
        }
    }
}

/// L = ∂_t + A∂_x + B + f with an audited regularity budget.
#[derive(Clone)]
pub struct HyperbolicSystem {
    a: Arc<TxField>,
    b: Arc<TxField>,
    forcing: Forcing,
    reg: RegularitySeminorms,
    kind: SystemKind,
}

/// Audit sampling caps: spatial seminorms over ≤ `AUDIT_T_SLICES` time
/// slices, temporal seminorms at ≤ `AUDIT_X_POINTS` grid points with the
/// path subsampled to ≤ `AUDIT_PATH_CAP` steps.
pub const AUDIT_T_SLICES: usize = 17;
pub const AUDIT_X_POINTS: usize = 9;
pub const AUDIT_PATH_CAP: usize = 2049;

/// Measured seminorms of a coefficient field under the audit sampling caps.
#[derive(Clone, Copy, Debug)]
pub struct CoefficientAudit {
    pub sup: f64,
    pub max_im: f64,
    pub ll_x: f64,
    pub ll_t: f64,
    pub holder_x: Option<f64>,
}

fn stride_for(len: usize, cap: usize) -> usize {
    len.div_ceil(cap).max(1)
}

fn entry_path(field: &TxField, idx: &[usize], x: usize, r: usize, c: usize) -> Vec<f64> {
    let m = field.m();
    idx.iter().map(|&i| field.sample(i).matrix_at(x, m)[(r, c)].re).collect()
}

/// Measure sup, LL-in-x, LL-in-t and (optionally) Hölder-γ-in-x of the
/// entries of a coefficient field. Entries that do not vary along an axis
/// are skipped, so constant and x-independent fields audit in O(storage).
pub fn coefficient_audit(field: &TxField, gamma: Option<f64>) -> CoefficientAudit {
    let (n, m, n_t) = (field.n(), field.m(), field.n_t());
    let mut sup = 0.0f64;
    let mut max_im = 0.0f64;
    for i in 0..n_t {
        let (XSample::Const(v) | XSample::Grid(v)) = field.sample(i);
        for z in v {
            sup = sup.max(z.re.abs());
            max_im = max_im.max(z.im.abs());
        }
    }

    // x-direction: per retained time slice, per entry with spatial variation.
    let t_stride = stride_for(n_t, AUDIT_T_SLICES);
    let mut ll_x = 0.0f64;
    let mut holder_x = gamma.map(|_| 0.0f64);
    for i in (0..n_t).step_by(t_stride) {
        let sample = field.sample(i);
        let XSample::Grid(v) = sample else { continue };
        let mm = m * m;
        for r in 0..m {
            for c in 0..m {
                let col: Vec<C64> = (0..n).map(|x| v[x * mm + r * m + c]).collect();
                if col.iter().all(|z| (z - col[0]).norm() == 0.0) {
                    continue;
                }
                let g = GridFunction::from_components(vec![col]).unwrap();
                ll_x = ll_x.max(ll_seminorm_direct(&g));
                if let (Some(h), Some(ga)) = (holder_x.as_mut(), gamma) {
                    *h = h.max(holder_seminorm_direct(&g, ga));
                }
            }
        }
    }

    // t-direction: per retained grid point, per entry with temporal variation.
    let mut ll_t = 0.0f64;
    if n_t > 1 {
        let p_stride = stride_for(n_t, AUDIT_PATH_CAP);
        let idx: Vec<usize> = (0..n_t).step_by(p_stride).collect();
        let times: Vec<f64> = idx.iter().map(|&i| field.t_of(i)).collect();
        let xs: Vec<usize> = if matches!(field.sample(0), XSample::Const(_)) {
            vec![0]
        } else {
            (0..n).step_by(stride_for(n, AUDIT_X_POINTS)).collect()
        };
        for &x in &xs {
            for r in 0..m {
                for c in 0..m {
                    let path = entry_path(field, &idx, x, r, c);
                    if path.iter().all(|&v| v == path[0]) {
                        continue;
                    }
                    ll_t = ll_t.max(ll_seminorm_path(&times, &path));
                }
            }
        }
    }

    CoefficientAudit { sup, max_im, ll_x, ll_t, holder_x }
}

/// Budget slack: measured seminorms may exceed the declared constant by this
/// factor before the constructor refuses (discrete estimators overshoot the
/// continuum seminorm slightly near the h → 0 end).
pub const BUDGET_SLACK: f64 = 1.05;

impl HyperbolicSystem {
    pub fn new(
        a: TxField,
        b: TxField,
        forcing: Forcing,
        reg: RegularitySeminorms,
        kind: SystemKind,
    ) -> Result<Self> {
        if a.n() != b.n() || a.m() != b.m() {
            return Err(Error::SizeMismatch("A and B shapes differ".into()));
        }
        if !(reg.gamma > 0.0 && reg.gamma < 1.0) {
            return Err(Error::InvalidParameter("Hölder exponent must lie in (0,1)".into()));
        }
        if !(reg.k0 > 0.0) || reg.k1 < 0.0 || reg.k2 < 0.0 {
            return Err(Error::InvalidParameter("regularity budget must be positive".into()));
        }
        forcing.validate(a.n(), a.m())?;

        let audit_a = coefficient_audit(&a, None);
        let audit_b = coefficient_audit(&b, Some(reg.gamma));
        let real_tol = 1e-12 * (1.0 + audit_a.sup.max(audit_b.sup));
        if audit_a.max_im > real_tol || audit_b.max_im > real_tol {
            return Err(Error::InvalidParameter("coefficients must be real".into()));
        }
        let tiny = 1e-12;
        if audit_a.sup > reg.k0 + tiny || audit_b.sup > reg.k0 + tiny {
            return Err(Error::InvalidParameter(format!(
                "sup budget exceeded: measured {:.6} > K0 = {:.6}",
                audit_a.sup.max(audit_b.sup),
                reg.k0
            )));
        }
        let ll_a = audit_a.ll_x.max(audit_a.ll_t);
        if ll_a > BUDGET_SLACK * reg.k1 + tiny {
            return Err(Error::InvalidParameter(format!(
                "log-Lipschitz budget exceeded: measured {ll_a:.6} > K1 = {:.6}",
                reg.k1
            )));
        }
        let hold_b = audit_b.holder_x.unwrap_or(0.0);
        if hold_b > BUDGET_SLACK * reg.k2 + tiny {
            return Err(Error::InvalidParameter(format!(
                "Hölder budget exceeded: measured {hold_b:.6} > K2 = {:.6}",
                reg.k2
            )));
        }

        Ok(Self { a: Arc::new(a), b: Arc::new(b), forcing, reg, kind })
    }

    pub fn a(&self) -> &Arc<TxField> {
        &self.a
    }

    pub fn b(&self) -> &Arc<TxField> {
        &self.b
    }

    pub fn forcing(&self) -> &Forcing {
        &self.forcing
    }

    pub fn reg(&self) -> RegularitySeminorms {
        self.reg
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: SystemKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn m(&self) -> usize {
        self.a.m()
    }
}

/// Principal symbol 𝒜(t, x, ξ) = ξ·A(t, x) — real, degree-1 homogeneous,
/// and identical for the conservative and non-conservative kinds.
pub fn principal_symbol(sys: &HyperbolicSystem, t: f64, x: usize, xi: f64) -> CMat {
    sys.a.raw_at(t).matrix_at(x, sys.m()) * C64::new(xi, 0.0)
}

/// Default audit sampling: evenly spaced times and grid points, degenerate
/// axes collapsed to a single point.
pub fn audit_points(field: &TxField) -> (Vec<f64>, Vec<usize>) {
    let ts = if field.is_const_t() {
        vec![0.0]
    } else {
        let k = AUDIT_T_SLICES.min(field.n_t());
        (0..k).map(|i| field.t_span() * i as f64 / (k - 1) as f64).collect()
    };
    let xs = if matches!(field.sample(0), XSample::Const(_)) {
        vec![0]
    } else {
        (0..field.n()).step_by(stride_for(field.n(), AUDIT_X_POINTS)).collect()
    };
    (ts, xs)
}

fn mat_sup(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

#[derive(Clone, Debug)]
pub struct HyperbolicityReport {
    pub verdict: bool,
    /// Largest |Im λ| over the sampled (t, x), relative tolerance 1e−9·sup.
    pub max_im: f64,
    pub sup_norm: f64,
    /// Eigenvalues at the worst sample point.
    pub worst_eigenvalues: Vec<C64>,
}

fn eigenvalues_of(mat: &CMat) -> Result<Vec<C64>> {
    mat.clone()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::NumericalGuard("eigenvalue iteration failed".into()))
}

/// Sample-point hyperbolicity: real spectrum of A(t, x) at every requested
/// sample. By ξ-homogeneity, ξ = 1 decides all ξ ≠ 0.
pub fn check_hyperbolic(
    sys: &HyperbolicSystem,
    ts: &[f64],
    xs: &[usize],
) -> Result<HyperbolicityReport> {
    if ts.is_empty() || xs.is_empty() {
        return Err(Error::InvalidParameter("empty sample set".into()));
    }
    let m = sys.m();
    let mut max_im = 0.0f64;
    let mut sup_norm = 0.0f64;
    let mut worst = Vec::new();
    for &t in ts {
        let sample = sys.a.raw_at(t);
        for &x in xs {
            let mat = sample.matrix_at(x, m);
            sup_norm = sup_norm.max(mat_sup(&mat));
            let eig = eigenvalues_of(&mat)?;
            let im = eig.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
            if im >= max_im {
                max_im = im;
                worst = eig;
            }
        }
    }
    Ok(HyperbolicityReport {
        verdict: max_im <= 1e-9 * sup_norm.max(1e-300),
        max_im,
        sup_norm,
        worst_eigenvalues: worst,
    })
}

/// Microlocal symmetrizer family S(t, x, ξ): degree-0 homogeneous in ξ, so
/// in one space dimension it is the pair of Hermitian fields at sign(ξ) = ±1.
/// The eigenbasis construction is sign-independent, hence the two slots alias
/// for constructed symmetrizers; both are kept so that supplied families with
/// genuine sign dependence still fit.
#[derive(Clone)]
pub struct Symmetrizer {
    pub s_plus: Arc<TxField>,
    pub s_minus: Arc<TxField>,
    /// Uniform positivity bracket: λ Id ≤ S ≤ Λ Id over all stored samples.
    pub lambda: f64,
    pub lambda_max: f64,
}

impl Symmetrizer {
    pub fn at_sign(&self, sign: i8) -> &Arc<TxField> {
        if sign < 0 { &self.s_minus } else { &self.s_plus }
    }

    /// Wrap explicitly supplied fields, recomputing the positivity bracket
    /// over every stored sample. Fails if any sample is not positive.
    pub fn from_fields(s_plus: TxField, s_minus: TxField) -> Result<Self> {
        if s_plus.n() != s_minus.n()
            || s_plus.m() != s_minus.m()
            || s_plus.n_t() != s_minus.n_t()
        {
            return Err(Error::SizeMismatch("symmetrizer sign slots differ in shape".into()));
        }
        let mut lambda = f64::INFINITY;
        let mut lambda_max = 0.0f64;
        for field in [&s_plus, &s_minus] {
            let m = field.m();
            for i in 0..field.n_t() {
                let sample = field.sample(i);
                let nx = match sample {
                    XSample::Const(_) => 1,
                    XSample::Grid(_) => field.n(),
                };
                for x in 0..nx {
                    let mat = sample.matrix_at(x, m);
                    let herm = (mat.clone() + mat.adjoint()) * C64::new(0.5, 0.0);
                    let eig = herm.symmetric_eigen();
                    for &l in eig.eigenvalues.iter() {
                        lambda = lambda.min(l);
                        lambda_max = lambda_max.max(l);
                    }
                }
            }
        }
        if !(lambda > 0.0) {
            return Err(Error::NotPositive(format!("symmetrizer sample with λ_min = {lambda:.3e}")));
        }
        Ok(Self { s_plus: Arc::new(s_plus), s_minus: Arc::new(s_minus), lambda, lambda_max })
    }
}

/// Entrywise map over a coefficient field, preserving shape and sampling.
pub fn map_entries(field: &TxField, f: impl Fn(C64) -> C64) -> TxField {
    let samples = (0..field.n_t())
        .map(|i| match field.sample(i) {
            XSample::Const(v) => XSample::Const(v.iter().map(|&z| f(z)).collect()),
            XSample::Grid(v) => XSample::Grid(v.iter().map(|&z| f(z)).collect()),
        })
        .collect();
    TxField::new(field.n(), field.m(), field.t_span(), samples).expect("shape preserved")
}

/// Eigendecomposition of one coefficient matrix into the symmetrizer block
/// (R⁻¹)ᴴ R⁻¹. Refuses non-real spectra and eigenvalue gaps below
/// `gap_floor`; eigenvectors are ordered by eigenvalue and normalized with
/// the first significant entry rotated to the positive real axis, which
/// pins the construction down to a deterministic representative.
fn symmetrizer_block(mat: &CMat, gap_floor: f64, im_tol: f64) -> Result<CMat> {
    let m = mat.nrows();
    let mut eig = eigenvalues_of(mat)?;
    let max_im = eig.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
    if max_im > im_tol {
        return Err(Error::InvalidParameter(format!(
            "non-real spectrum (|Im λ| = {max_im:.3e}): system is not hyperbolic"
        )));
    }
    eig.sort_by(|p, q| p.re.total_cmp(&q.re));
    for w in eig.windows(2) {
        if (w[1].re - w[0].re).abs() < gap_floor {
            return Err(Error::EigenvalueGap(format!(
                "adjacent eigenvalues {:.6e} and {:.6e} closer than {:.3e}",
                w[0].re, w[1].re, gap_floor
            )));
        }
    }

    let mut r = CMat::zeros(m, m);
    let scale = mat_sup(mat).max(1e-300);
    for (col, lam) in eig.iter().enumerate() {
        let shifted = mat - CMat::identity(m, m) * *lam;
        let svd = SVD::new(shifted.clone(), false, true);
        let v_t = svd.v_t.as_ref().expect("requested V^T");
        let (kmin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|p, q| p.1.total_cmp(q.1))
            .expect("nonempty singular values");
        let mut v: Vec<C64> = v_t.row(kmin).iter().map(|z| z.conj()).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::NumericalGuard("degenerate eigenvector".into()));
        }
        for z in v.iter_mut() {
            *z /= norm;
        }
        let lead = v.iter().find(|z| z.norm() > 1e-8).copied().unwrap_or(C64::new(1.0, 0.0));
        let phase = lead.conj() / lead.norm();
        let resid = {
            let vv = CMat::from_column_slice(m, 1, &v);
            mat_sup(&(&shifted * &vv))
        };
        if resid > 1e-8 * scale {
            return Err(Error::NumericalGuard(format!(
                "eigenvector residual {resid:.3e} too large"
            )));
        }
        for row in 0..m {
            r[(row, col)] = v[row] * phase;
        }
    }

    let rinv = r
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NumericalGuard("eigenbasis not invertible".into()))?;
    Ok(rinv.adjoint() * &rinv)
}

fn sample_is_symmetric(mat: &CMat, tol: f64) -> bool {
    mat_sup(&(mat - mat.transpose())) <= tol
}

/// Build the eigenbasis symmetrizer for a strictly hyperbolic system. If A
/// is symmetric at every stored sample the answer is the identity; otherwise
/// each sample gets its (R⁻¹)ᴴR⁻¹ block, preserving x-independence. The
/// eigenvalue gap floor is 1e−6 · sup|A|.
pub fn build_symmetrizer(sys: &HyperbolicSystem) -> Result<Symmetrizer> {
    let a = &sys.a;
    let (n, m, n_t) = (a.n(), a.m(), a.n_t());
    let sup = {
        let mut s = 0.0f64;
        for i in 0..n_t {
            let (XSample::Const(v) | XSample::Grid(v)) = a.sample(i);
            for z in v {
                s = s.max(z.norm());
            }
        }
        s.max(1e-300)
    };

    let sym_tol = 1e-12 * (1.0 + sup);
    let mut all_symmetric = true;
    'outer: for i in 0..n_t {
        let sample = a.sample(i);
        let nx = match sample {
            XSample::Const(_) => 1,
            XSample::Grid(_) => n,
        };
        for x in 0..nx {
            if !sample_is_symmetric(&sample.matrix_at(x, m), sym_tol) {
                all_symmetric = false;
                break 'outer;
            }
        }
    }
    if all_symmetric {
        let id = Arc::new(TxField::constant_matrix(n, &CMat::identity(m, m))?);
        return Ok(Symmetrizer { s_plus: id.clone(), s_minus: id, lambda: 1.0, lambda_max: 1.0 });
    }

    let gap_floor = 1e-6 * sup;
    let im_tol = 1e-9 * sup;
    let mut lambda = f64::INFINITY;
    let mut lambda_max = 0.0f64;
    let mut samples = Vec::with_capacity(n_t);
    for i in 0..n_t {
        let sample = a.sample(i);
        let mut track = |s: &CMat| {
            let eig = s.clone().symmetric_eigen();
            for &l in eig.eigenvalues.iter() {
                lambda = lambda.min(l);
                lambda_max = lambda_max.max(l);
            }
        };
        let built = match sample {
            XSample::Const(_) => {
                let s = symmetrizer_block(&sample.matrix_at(0, m), gap_floor, im_tol)?;
                track(&s);
                let s = &s;
                XSample::Const((0..m).flat_map(|r| (0..m).map(move |c| s[(r, c)])).collect())
            }
            XSample::Grid(_) => {
                let mut v = Vec::with_capacity(n * m * m);
                for x in 0..n {
                    let s = symmetrizer_block(&sample.matrix_at(x, m), gap_floor, im_tol)?;
                    track(&s);
                    for r in 0..m {
                        for c in 0..m {
                            v.push(s[(r, c)]);
                        }
                    }
                }
                XSample::Grid(v)
            }
        };
        samples.push(built);
    }
    if !(lambda > 0.0) {
        return Err(Error::NotPositive(format!("built symmetrizer has λ_min = {lambda:.3e}")));
    }
    let field = Arc::new(TxField::new(n, m, a.t_span(), samples)?);
    Ok(Symmetrizer { s_plus: field.clone(), s_minus: field, lambda, lambda_max })
}

/// Verification of the four symmetrizer properties at the requested sample
/// points, all residuals relative to the sup norm of the matrix involved:
/// sign-slot (degree-0 homogeneity) agreement, self-adjointness of S,
/// self-adjointness of S·𝒜 at ξ = ±1, and the positivity bracket. The
/// regularity of the family is reported as the audited seminorms of S.
#[derive(Clone, Debug)]
pub struct SymmetrizerReport {
    pub sign_residual: f64,
    pub selfadjoint_residual: f64,
    pub product_residual: f64,
    pub lambda: f64,
    pub lambda_max: f64,
    pub positive: bool,
    pub sup: f64,
    pub ll_tx: f64,
}

pub fn verify_symmetrizer(
    sym: &Symmetrizer,
    sys: &HyperbolicSystem,
    ts: &[f64],
    xs: &[usize],
) -> Result<SymmetrizerReport> {
    if ts.is_empty() || xs.is_empty() {
        return Err(Error::InvalidParameter("empty sample set".into()));
    }
    let m = sys.m();
    if sym.s_plus.m() != m || sym.s_plus.n() != sys.n() {
        return Err(Error::SizeMismatch("symmetrizer shape mismatch".into()));
    }
    let mut sign_res = 0.0f64;
    let mut herm_res = 0.0f64;
    let mut prod_res = 0.0f64;
    let mut lambda = f64::INFINITY;
    let mut lambda_max = 0.0f64;
    for &t in ts {
        let sp = sym.s_plus.raw_at(t);
        let sm = sym.s_minus.raw_at(t);
        let at = sys.a.raw_at(t);
        for &x in xs {
            let s_p = sp.matrix_at(x, m);
            let s_m = sm.matrix_at(x, m);
            let a = at.matrix_at(x, m);
            let s_norm = mat_sup(&s_p).max(1e-300);
            sign_res = sign_res.max(mat_sup(&(&s_p - &s_m)) / s_norm);
            herm_res = herm_res.max(mat_sup(&(&s_p - &s_p.adjoint())) / s_norm);
            for (s, sgn) in [(&s_p, 1.0), (&s_m, -1.0)] {
                let a_signed = &a * C64::new(sgn, 0.0);
                let p = s.clone() * &a_signed;
                let p_norm = mat_sup(&p).max(1e-300);
                prod_res = prod_res.max(mat_sup(&(&p - &p.adjoint())) / p_norm);
            }
            let herm = (s_p.clone() + s_p.adjoint()) * C64::new(0.5, 0.0);
            let eig = herm.symmetric_eigen();
            for &l in eig.eigenvalues.iter() {
                lambda = lambda.min(l);
                lambda_max = lambda_max.max(l);
            }
        }
    }
    let audit = coefficient_audit(&sym.s_plus, None);
    Ok(SymmetrizerReport {
        sign_residual: sign_res,
        selfadjoint_residual: herm_res,
        product_residual: prod_res,
        lambda,
        lambda_max,
        positive: lambda > 0.0,
        sup: audit.sup,
        ll_tx: audit.ll_x.max(audit.ll_t),
    })
}

// ---------------------------------------------------------------------------
// Presets

fn wave_matrix(a: f64) -> CMat {
    CMat::from_row_slice(2, 2, &[
        C64::new(0.0, 0.0),
        C64::new(a, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
    ])
}

/// Smallest power-of-two-plus-one sample count that keeps every mollifier
/// scale ε_b ≥ 4·dt down to ε = 2^{−j_max(n)} over a span of length t_span.
pub fn time_samples_for(n: usize, t_span: f64) -> usize {
    let j_max = n.trailing_zeros() as i32 - 2;
    let need = (t_span * 2.0f64.powi(j_max + 2)).ceil() as usize;
    need.next_power_of_two() + 1
}

/// A = [[0,1],[1,0]], B = 0: constant symmetric transport pair.
pub fn preset_constant_symmetric(n: usize) -> Result<HyperbolicSystem> {
    let a = TxField::constant_matrix(n, &wave_matrix(1.0))?;
    let b = TxField::constant_matrix(n, &CMat::zeros(2, 2))?;
    let reg = RegularitySeminorms { k0: 1.0, k1: 0.1, k2: 0.1, gamma: 0.6 };
    HyperbolicSystem::new(a, b, Forcing::Zero, reg, SystemKind::NonConservative)
}

/// Wave reduction with the smooth coefficient a(t) = 1 + 0.3 sin t.
pub fn preset_smooth_t(n: usize, t_span: f64) -> Result<HyperbolicSystem> {
    let n_t = time_samples_for(n, t_span);
    let mats: Vec<CMat> = (0..n_t)
        .map(|i| {
            let t = t_span * i as f64 / (n_t - 1) as f64;
            wave_matrix(1.0 + 0.3 * t.sin())
        })
        .collect();
    let a = TxField::matrix_path(n, t_span, &mats)?;
    let b = TxField::constant_matrix(n, &CMat::zeros(2, 2))?;
    let reg = RegularitySeminorms { k0: 1.3, k1: 0.5, k2: 0.1, gamma: 0.6 };
    HyperbolicSystem::new(a, b, Forcing::Zero, reg, SystemKind::NonConservative)
}

/// Wave reduction with a log-Lipschitz-in-x coefficient
/// a(x) = 1 + 0.15·(lacunary LL profile), which stays in [0.55, 1.45].
pub fn preset_ll_x_wave(n: usize, seed: u64) -> Result<HyperbolicSystem> {
    let j_max = n.trailing_zeros() as i32 - 2;
    let g = crate::spaces::gen_ll_function(n, seed, (j_max - 1) as u32)?;
    let field = TxField::sample_matrix_fn(n, 2, 0.0, 1, |_, x| {
        let idx = ((x / (2.0 * std::f64::consts::PI / n as f64)).round() as usize) % n;
        wave_matrix(1.0 + 0.15 * g.comp(0)[idx].re)
    })?;
    let b = TxField::constant_matrix(n, &CMat::zeros(2, 2))?;
    let reg = RegularitySeminorms { k0: 1.5, k1: 1.3, k2: 0.1, gamma: 0.6 };
    HyperbolicSystem::new(field, b, Forcing::Zero, reg, SystemKind::NonConservative)
}

/// Wave reduction with a(t,x) = 1 + 0.1·g(x) + 0.1·c(t): log-Lipschitz in
/// both variables separately. Dense storage — keep n ≤ 512.
pub fn preset_ll_tx_wave(n: usize, seed: u64) -> Result<HyperbolicSystem> {
    let j_max = n.trailing_zeros() as i32 - 2;
    let g = crate::spaces::gen_ll_function(n, seed, (j_max - 1) as u32)?;
    let t_span = 1.9;
    let n_t = time_samples_for(n, t_span).min(crate::symbols::MAX_DENSE_NT);
    let (_, c) = crate::spaces::gen_ll_time_coefficient(crate::rng::mix(seed, 1), 8, n_t, t_span);
    let dt = t_span / (n_t - 1) as f64;
    let gv: Vec<f64> = g.comp(0).iter().map(|z| z.re).collect();
    let field = TxField::sample_matrix_fn(n, 2, t_span, n_t, move |t, x| {
        let it = (t / dt).round() as usize;
        let ix = ((x / (2.0 * std::f64::consts::PI / n as f64)).round() as usize) % n;
        wave_matrix(1.0 + 0.1 * gv[ix] + 0.1 * c[it])
    })?;
    let b = TxField::constant_matrix(n, &CMat::zeros(2, 2))?;
    let reg = RegularitySeminorms { k0: 1.7, k1: 1.0, k2: 0.1, gamma: 0.6 };
    HyperbolicSystem::new(field, b, Forcing::Zero, reg, SystemKind::NonConservative)
}

/// Log-Lipschitz budget of the loss-of-derivatives schedule.
pub const LOSS_K1: f64 = 12.0;

/// One resonance window: a(t) = 1 + δ sin(ω(t − t0)) on [t0, t1).
#[derive(Clone, Copy, Debug)]
pub struct LossWindow {
    pub t0: f64,
    pub t1: f64,
    pub omega: f64,
    pub delta: f64,
}

/// The loss-of-derivatives coefficient schedule: four rounds of windows at
/// ω = 2⁸, 2⁷, 2⁶, 2⁵, each window an exact number of periods ≥ 0.31 long
/// (so a is continuous and equals 1 at every joint), with amplitude
/// δ_ω = min(K₁·ln2·log₂ω / ω, 0.6) — the largest the log-Lipschitz budget
/// K₁ allows at that frequency. The window at ω parametrically pumps the
/// dyadic packet near wavenumber ω/2, and the δ schedule makes the pumping
/// rate per unit time grow linearly in the packet's dyadic index, which is
/// exactly the H^s → H^{s−βt} loss the energy estimate predicts.
pub fn loss_schedule() -> (Vec<LossWindow>, f64) {
    let base_len = 0.31;
    let mut windows = Vec::new();
    let mut t = 0.0f64;
    for _round in 0..4 {
        for w in [8i32, 7, 6, 5] {
            let omega = 2.0f64.powi(w);
            let period = 2.0 * std::f64::consts::PI / omega;
            let len = (base_len / period).ceil() * period;
            let delta = (LOSS_K1 * w as f64 * std::f64::consts::LN_2 / omega).min(0.6);
            windows.push(LossWindow { t0: t, t1: t + len, omega, delta });
            t += len;
        }
    }
    (windows, t)
}

/// Schedule coefficient value at time t (1 outside every window).
pub fn loss_coefficient(t: f64, windows: &[LossWindow]) -> f64 {
    for w in windows {
        if t >= w.t0 && t < w.t1 {
            return 1.0 + w.delta * (w.omega * (t - w.t0)).sin();
        }
    }
    1.0
}

/// Wave reduction driven by the loss schedule; x-independent, log-Lipschitz
/// in t with seminorm ≈ K₁, horizon T* ≈ 5.79.
pub fn preset_ll_time_loss(n: usize) -> Result<HyperbolicSystem> {
    let (windows, t_star) = loss_schedule();
    let n_t = time_samples_for(n, t_star);
    let mats: Vec<CMat> = (0..n_t)
        .map(|i| {
            let t = t_star * i as f64 / (n_t - 1) as f64;
            wave_matrix(loss_coefficient(t, &windows))
        })
        .collect();
    let a = TxField::matrix_path(n, t_star, &mats)?;
    let b = TxField::constant_matrix(n, &CMat::zeros(2, 2))?;
    let reg = RegularitySeminorms { k0: 1.6, k1: LOSS_K1, k2: 0.1, gamma: 0.6 };
    HyperbolicSystem::new(a, b, Forcing::Zero, reg, SystemKind::NonConservative)
}

/// Constant symmetric A with a Hölder-γ zero-order term
/// B(x) = g_γ(x) · M, γ = 0.6.
pub fn preset_holder_b(n: usize, seed: u64) -> Result<HyperbolicSystem> {
    let gamma = 0.6;
    let j_max = n.trailing_zeros() as i32 - 2;
    let g = crate::spaces::gen_holder_function(n, gamma, seed, (j_max - 1) as u32)?;
    let m_template = [[0.4, 1.0], [-0.6, 0.3]];
    let gv: Vec<f64> = g.comp(0).iter().map(|z| z.re).collect();
    let b = TxField::sample_matrix_fn(n, 2, 0.0, 1, move |_, x| {
        let ix = ((x / (2.0 * std::f64::consts::PI / n as f64)).round() as usize) % n;
        CMat::from_fn(2, 2, |r, c| C64::new(m_template[r][c] * gv[ix], 0.0))
    })?;
    let a = TxField::constant_matrix(n, &wave_matrix(1.0))?;
    let reg = RegularitySeminorms { k0: 2.5, k1: 0.1, k2: 5.5, gamma };
    HyperbolicSystem::new(a, b, Forcing::Zero, reg, SystemKind::NonConservative)
}

/// A = [[0,−1],[1,0]]: the rotation generator, spectrum ±i — not
/// hyperbolic. Constructs fine (regularity budgets hold); `check_hyperbolic`
/// and `build_symmetrizer` are the ops that refuse it.
pub fn preset_rotation(n: usize) -> Result<HyperbolicSystem> {
    let a = CMat::from_row_slice(2, 2, &[
        C64::new(0.0, 0.0),
        C64::new(-1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
    ]);
    let a = TxField::constant_matrix(n, &a)?;
    let b = TxField::constant_matrix(n, &CMat::zeros(2, 2))?;
    let reg = RegularitySeminorms { k0: 1.0, k1: 0.1, k2: 0.1, gamma: 0.6 };
    HyperbolicSystem::new(a, b, Forcing::Zero, reg, SystemKind::NonConservative)
}
