//! Fields on the uniform periodic grid and their spectral coefficients.
//!
//! A [`GridFunction`] holds m complex components sampled at x_j = 2πj/n;
//! [`SpectralCoeffs`] holds the matching Fourier coefficients in FFT bin
//! order. The two are unitary images of each other, so `l2_norm` agrees on
//! both sides to machine precision.

use crate::error::Error;
use crate::fft;
use crate::{Result, C64};

pub const MIN_N: usize = 16;
pub const MAX_N: usize = 65536;

/// Validate a grid size: power of two within [16, 65536].
pub fn check_grid_size(n: usize) -> Result<()> {
    if n.is_power_of_two() && (MIN_N..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidGrid(n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    n: usize,
    /// One Vec per component, each of length n.
    comps: Vec<Vec<C64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs {
    n: usize,
    /// One Vec per component, FFT bin order.
    comps: Vec<Vec<C64>>,
}

impl GridFunction {
    pub fn zeros(n: usize, m: usize) -> Result<Self> {
        check_grid_size(n)?;
        if m == 0 {
            return Err(Error::InvalidParameter("component count m must be ≥ 1".into()));
        }
        Ok(Self { n, comps: vec![vec![C64::new(0.0, 0.0); n]; m] })
    }

    pub fn from_components(comps: Vec<Vec<C64>>) -> Result<Self> {
        let n = comps.first().map(|c| c.len()).unwrap_or(0);
        check_grid_size(n)?;
        if comps.iter().any(|c| c.len() != n) {
            return Err(Error::SizeMismatch("components of unequal length".into()));
        }
        Ok(Self { n, comps })
    }

    /// Scalar field from a closure of x ∈ [0, 2π).
    pub fn from_fn(n: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        check_grid_size(n)?;
        let comps = vec![(0..n).map(|j| f(Self::x_of(j, n))).collect()];
        Ok(Self { n, comps })
    }

    /// Real scalar field from a closure.
    pub fn from_real_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(n, |x| C64::new(f(x), 0.0))
    }

    #[inline]
    pub fn x_of(j: usize, n: usize) -> f64 {
        2.0 * std::f64::consts::PI * j as f64 / n as f64
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.comps.len()
    }

    #[inline]
    pub fn comp(&self, i: usize) -> &[C64] {
        &self.comps[i]
    }

    #[inline]
    pub fn comp_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.comps[i]
    }

    pub fn to_spectral(&self) -> SpectralCoeffs {
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut buf = c.clone();
                fft::forward(&mut buf);
                buf
            })
            .collect();
        SpectralCoeffs { n: self.n, comps }
    }

    /// ℓ² norm of the grid values across all components.
    pub fn l2_norm(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Sup over grid points of the Euclidean norm of the component vector.
    pub fn linf_norm(&self) -> f64 {
        (0..self.n)
            .map(|j| self.comps.iter().map(|c| c[j].norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: C64) -> Self {
        let comps = self.comps.iter().map(|c| c.iter().map(|v| v * s).collect()).collect();
        Self { n: self.n, comps }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.m() != other.m() {
            return Err(Error::SizeMismatch("grid add".into()));
        }
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(Self { n: self.n, comps })
    }

    /// Pointwise product with a scalar field (broadcast over components).
    pub fn mul_pointwise(&self, scalar: &GridFunction) -> Result<Self> {
        if scalar.m() != 1 || scalar.n != self.n {
            return Err(Error::SizeMismatch("pointwise scalar product".into()));
        }
        let s = &scalar.comps[0];
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().zip(s).map(|(v, w)| v * w).collect())
            .collect();
        Ok(Self { n: self.n, comps })
    }
}

impl SpectralCoeffs {
    pub fn zeros(n: usize, m: usize) -> Result<Self> {
        check_grid_size(n)?;
        if m == 0 {
            return Err(Error::InvalidParameter("component count m must be ≥ 1".into()));
        }
        Ok(Self { n, comps: vec![vec![C64::new(0.0, 0.0); n]; m] })
    }

    pub fn from_components(comps: Vec<Vec<C64>>) -> Result<Self> {
        let n = comps.first().map(|c| c.len()).unwrap_or(0);
        check_grid_size(n)?;
        if comps.iter().any(|c| c.len() != n) {
            return Err(Error::SizeMismatch("components of unequal length".into()));
        }
        Ok(Self { n, comps })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.comps.len()
    }

    #[inline]
    pub fn comp(&self, i: usize) -> &[C64] {
        &self.comps[i]
    }

    #[inline]
    pub fn comp_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.comps[i]
    }

    /// Coefficient at integer frequency k of component i.
    pub fn coeff(&self, i: usize, k: i64) -> Result<C64> {
        let half = self.n as i64 / 2;
        if !(-half..half).contains(&k) {
            return Err(Error::OutOfRange(format!("frequency {k} on n={} grid", self.n)));
        }
        Ok(self.comps[i][fft::index_of(k, self.n)])
    }

    pub fn set_coeff(&mut self, i: usize, k: i64, v: C64) -> Result<()> {
        let half = self.n as i64 / 2;
        if !(-half..half).contains(&k) {
            return Err(Error::OutOfRange(format!("frequency {k} on n={} grid", self.n)));
        }
        let idx = fft::index_of(k, self.n);
        self.comps[i][idx] = v;
        Ok(())
    }

    pub fn to_grid(&self) -> GridFunction {
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut buf = c.clone();
                fft::inverse(&mut buf);
                buf
            })
            .collect();
        GridFunction { n: self.n, comps }
    }

    pub fn l2_norm(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Apply a scalar Fourier multiplier w(k) to every component.
    pub fn apply_multiplier(&self, w: impl Fn(i64) -> C64) -> Self {
        let table: Vec<C64> = (0..self.n).map(|idx| w(fft::freq_of(idx, self.n))).collect();
        self.apply_multiplier_table(&table)
    }

    /// Apply a precomputed multiplier table (FFT bin order).
    pub fn apply_multiplier_table(&self, table: &[C64]) -> Self {
        debug_assert_eq!(table.len(), self.n);
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().zip(table).map(|(v, w)| v * w).collect())
            .collect();
        Self { n: self.n, comps }
    }

    /// Apply a matrix-valued multiplier M(k) (m×m, row-major closure) to the
    /// component vector.
    pub fn apply_matrix_multiplier(&self, mat: impl Fn(i64, usize, usize) -> C64) -> Self {
        let m = self.m();
        let mut out = vec![vec![C64::new(0.0, 0.0); self.n]; m];
        for idx in 0..self.n {
            let k = fft::freq_of(idx, self.n);
            for (r, out_comp) in out.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (c, comp) in self.comps.iter().enumerate() {
                    acc += mat(k, r, c) * comp[idx];
                }
                out_comp[idx] = acc;
            }
        }
        Self { n: self.n, comps: out }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.m() != other.m() {
            return Err(Error::SizeMismatch("spectral add".into()));
        }
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(Self { n: self.n, comps })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(self.add(&other.scaled(C64::new(-1.0, 0.0)))?)
    }

    pub fn scaled(&self, s: C64) -> Self {
        let comps = self.comps.iter().map(|c| c.iter().map(|v| v * s).collect()).collect();
        Self { n: self.n, comps }
    }

    /// Largest |k| carrying more than `rel_tol` of the ℓ² mass (per mode,
    /// relative to the max coefficient). Returns 0 for the zero field.
    pub fn support_radius(&self, rel_tol: f64) -> i64 {
        let peak = self
            .comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if peak == 0.0 {
            return 0;
        }
        let mut radius = 0i64;
        for c in &self.comps {
            for (idx, v) in c.iter().enumerate() {
                if v.norm() > rel_tol * peak {
                    radius = radius.max(fft::freq_of(idx, self.n).abs());
                }
            }
        }
        radius
    }
}

/// Single Fourier mode e^{ikx} as a scalar grid function.
pub fn single_mode(n: usize, k: i64) -> Result<GridFunction> {
    GridFunction::from_fn(n, |x| C64::new(0.0, k as f64 * x).exp())
}
