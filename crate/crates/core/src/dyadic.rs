//! Littlewood–Paley decomposition on the periodic frequency lattice.
//!
//! The low-frequency cutoff χ and annulus bump φ are built from the standard
//! smooth step h(s) = f(1−s)/(f(s)+f(1−s)) with f(s) = e^{−1/s}·1_{s>0}, so
//! that χ ≡ 1 on |ξ| ≤ 1.1 and χ ≡ 0 on |ξ| ≥ 1.9, and φ(ξ) = χ(ξ) − χ(2ξ).
//! With Δ_0 = χ(D), Δ_j = φ(2^{−j}D) the telescoping sum Σ_{k≤j} Δ_k equals
//! S_j = χ(2^{−j}D) exactly — no resummation error enters the partition.

use crate::error::Error;
use crate::fft;
use crate::grid::SpectralCoeffs;
use crate::{Result, C64};

/// C^∞ one-sided bump: e^{−1/s} for s > 0, zero otherwise.
#[inline]
pub fn bump_f(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth step: 1 for s ≤ 0, 0 for s ≥ 1, strictly decreasing between.
#[inline]
pub fn bump_h(s: f64) -> f64 {
    let a = bump_f(s);
    let b = bump_f(1.0 - s);
    if a == 0.0 && b == 0.0 {
        // only reachable at s = NaN; keep the step well defined
        return 0.5;
    }
    b / (a + b)
}

/// Low-frequency cutoff: 1 on |ξ| ≤ 1.1, 0 on |ξ| ≥ 1.9.
#[inline]
pub fn chi(xi: f64) -> f64 {
    bump_h((xi.abs() - 1.1) / 0.8)
}

/// Annulus bump χ(ξ) − χ(2ξ): supported in 0.55 ≤ |ξ| ≤ 1.9, ≡ 1 on
/// 0.95 ≤ |ξ| ≤ 1.1.
#[inline]
pub fn phi(xi: f64) -> f64 {
    chi(xi) - chi(2.0 * xi)
}

/// Window of block j as a function of raw frequency: W_0 = χ, W_j = φ(2^{−j}·).
#[inline]
pub fn window(j: i32, xi: f64) -> f64 {
    if j < 0 {
        0.0
    } else if j == 0 {
        chi(xi)
    } else {
        phi(xi * 0.5f64.powi(j))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DyadicPartition {
    n: usize,
    j_max: i32,
}

impl DyadicPartition {
    pub fn new(n: usize) -> Result<Self> {
        crate::grid::check_grid_size(n)?;
        let j_max = (n.trailing_zeros() as i32) - 2;
        Ok(Self { n, j_max })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest meaningful block index on this grid: log2(n) − 2.
    #[inline]
    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Largest |k| for which S_{j_max} acts as the identity, i.e. where
    /// χ(2^{−j_max}k) = 1.
    #[inline]
    pub fn resolved_radius(&self) -> i64 {
        (1.1 * 2.0f64.powi(self.j_max)).floor() as i64
    }

    /// Multiplier table of Δ_j in FFT bin order (all zeros for j < 0).
    pub fn block_table(&self, j: i32) -> Vec<f64> {
        (0..self.n)
            .map(|idx| window(j, fft::freq_of(idx, self.n) as f64))
            .collect()
    }

    /// Multiplier table of S_j = χ(2^{−j}D) (all zeros for j < 0).
    pub fn low_pass_table(&self, j: i32) -> Vec<f64> {
        if j < 0 {
            return vec![0.0; self.n];
        }
        let scale = 0.5f64.powi(j);
        (0..self.n)
            .map(|idx| chi(fft::freq_of(idx, self.n) as f64 * scale))
            .collect()
    }

    fn apply_table(u: &SpectralCoeffs, table: &[f64]) -> SpectralCoeffs {
        let t: Vec<C64> = table.iter().map(|&w| C64::new(w, 0.0)).collect();
        u.apply_multiplier_table(&t)
    }

    /// Littlewood–Paley block Δ_j u. Errors for j outside [0, j_max].
    pub fn block(&self, u: &SpectralCoeffs, j: i32) -> Result<SpectralCoeffs> {
        if u.n() != self.n {
            return Err(Error::SizeMismatch("block on mismatched grid".into()));
        }
        if !(0..=self.j_max).contains(&j) {
            return Err(Error::OutOfRange(format!(
                "block index {j} outside [0, {}]",
                self.j_max
            )));
        }
        Ok(Self::apply_table(u, &self.block_table(j)))
    }

    /// Δ_j u with the convention Δ_j = 0 for j < 0 (no upper bound check);
    /// the paraproduct sums rely on this signed form.
    pub fn block_signed(&self, u: &SpectralCoeffs, j: i32) -> SpectralCoeffs {
        if j < 0 {
            return SpectralCoeffs::zeros(self.n, u.m()).expect("validated grid");
        }
        Self::apply_table(u, &self.block_table(j))
    }

    /// Partial sum S_j u = χ(2^{−j}D)u; zero for j < 0.
    pub fn low_pass(&self, u: &SpectralCoeffs, j: i32) -> SpectralCoeffs {
        Self::apply_table(u, &self.low_pass_table(j))
    }

    /// ‖∂_x Δ_j u‖ / (2^j ‖Δ_j u‖): Bernstein's inequality confines this to
    /// the support bracket of the window. Errors with [`Error::ZeroBlock`]
    /// when the block carries no mass.
    pub fn bernstein_ratio(&self, u: &SpectralCoeffs, j: i32) -> Result<f64> {
        let bj = self.block(u, j)?;
        let denom = bj.l2_norm();
        // relative floor: transform rounding noise must not pass for mass
        if denom <= 1e-13 * u.l2_norm() {
            return Err(Error::ZeroBlock { j });
        }
        let deriv = bj.apply_multiplier(|k| C64::new(0.0, k as f64));
        Ok(deriv.l2_norm() / (2.0f64.powi(j) * denom))
    }
}
