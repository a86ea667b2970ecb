//! Seeded test-function families for operator probes and energy corpora:
//! band-limited ring packets concentrated where Δ_j ≡ 1, and broadband
//! fields with prescribed spectral decay inside the resolved radius.

use crate::dyadic::DyadicPartition;
use crate::error::Error;
use crate::grid::{GridFunction, SpectralCoeffs};
use crate::rng::SplitMix64;
use crate::{Result, C64};

/// Random packet supported on the ring 0.95·2ʲ ≤ |k| ≤ 1.1·2ʲ (the plateau
/// of φ at scale j), unit L² norm, m components.
pub fn band_packet(n: usize, m: usize, j: i32, seed: u64) -> Result<GridFunction> {
    crate::grid::check_grid_size(n)?;
    if j < 0 {
        return Err(Error::OutOfRange(format!("packet scale {j}")));
    }
    let lo = (0.95 * 2.0f64.powi(j)).ceil() as i64;
    let hi = (1.1 * 2.0f64.powi(j)).floor() as i64;
    if hi >= n as i64 / 2 {
        return Err(Error::OutOfRange(format!(
            "packet ring at scale {j} exceeds the grid Nyquist range"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut spec = SpectralCoeffs::zeros(n, m)?;
    for c in 0..m {
        for k in lo..=hi {
            for sign in [1i64, -1] {
                let phase = rng.next_phase();
                let amp = 0.5 + rng.next_f64();
                spec.set_coeff(c, sign * k, C64::from_polar(amp, phase))?;
            }
        }
    }
    let norm = spec.l2_norm();
    if norm <= 0.0 {
        return Err(Error::InvalidParameter("empty packet ring".into()));
    }
    Ok(spec.scaled(C64::new(1.0 / norm, 0.0)).to_grid())
}

/// Broadband field with |û(k)| ≍ (1+|k|)^{−decay} up to the resolved radius,
/// random phases, unit L² norm.
pub fn random_resolved(n: usize, m: usize, decay: f64, seed: u64) -> Result<GridFunction> {
    let part = DyadicPartition::new(n)?;
    let radius = part.resolved_radius();
    let mut rng = SplitMix64::new(seed);
    let mut spec = SpectralCoeffs::zeros(n, m)?;
    for c in 0..m {
        for k in -radius..=radius {
            let phase = rng.next_phase();
            let amp = (0.5 + rng.next_f64()) * (1.0 + k.abs() as f64).powf(-decay);
            spec.set_coeff(c, k, C64::from_polar(amp, phase))?;
        }
    }
    let norm = spec.l2_norm();
    Ok(spec.scaled(C64::new(1.0 / norm, 0.0)).to_grid())
}

/// Real-valued variant of [`random_resolved`] (Hermitian spectrum).
pub fn random_resolved_real(n: usize, m: usize, decay: f64, seed: u64) -> Result<GridFunction> {
    let g = random_resolved(n, m, decay, seed)?;
    let comps = (0..m)
        .map(|c| g.comp(c).iter().map(|z| C64::new(z.re * 2.0f64.sqrt(), 0.0)).collect())
        .collect();
    GridFunction::from_components(comps)
}

/// Dyadic amplitude profile of a lacunary probe coefficient. Operator-order
/// probes fit a two-sided slope, so each remainder mechanism needs the
/// profile under which its claimed order is exhibited (not undershot):
/// `Linear` matches the ε·log(1/ε) block envelope (action, mollifier tails),
/// `Sqrt` keeps single-annulus content flat against the log compensation
/// (cutoff differences), `Flat` keeps cumulative derivative sums log-linear
/// (composition and adjoint remainders).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LacunaryWeight {
    Linear,
    Sqrt,
    Flat,
}

impl LacunaryWeight {
    fn amp(self, l: u32) -> f64 {
        let base = 0.5f64.powi(l as i32);
        match self {
            LacunaryWeight::Linear => (1.0 + l as f64) * base,
            LacunaryWeight::Sqrt => (1.0 + l as f64).sqrt() * base,
            LacunaryWeight::Flat => base,
        }
    }
}

/// Seeded lacunary coefficient Σ_{l≤J} a_l·cos(2ˡx + φ_l) with a mean offset
/// and an optional k=1 mode (so low-pass filters at every probed scale see
/// genuine content).
pub fn lacunary_coefficient(
    n: usize,
    j_terms: u32,
    weight: LacunaryWeight,
    dc: f64,
    k1_amp: f64,
    seed: u64,
) -> Result<GridFunction> {
    let part = DyadicPartition::new(n)?;
    if j_terms as i32 > part.j_max() - 1 {
        return Err(Error::OutOfRange(format!(
            "lacunary truncation J={j_terms} exceeds j_max−1={}",
            part.j_max() - 1
        )));
    }
    GridFunction::from_real_fn(n, |x| {
        let mut v = dc + k1_amp * (x + crate::rng::phase(seed, 0)).cos();
        for l in 1..=j_terms {
            v += weight.amp(l) * (2.0f64.powi(l as i32) * x + crate::rng::phase(seed, l as u64)).cos();
        }
        v
    })
}

/// Time samples of the same lacunary construction on [0, t_span].
pub fn lacunary_time_samples(
    j_terms: u32,
    weight: LacunaryWeight,
    n_t: usize,
    t_span: f64,
    seed: u64,
) -> Vec<f64> {
    lacunary_time_samples_banded(1, j_terms, weight, n_t, t_span, seed)
}

/// Same, restricted to blocks l_lo..=l_hi — for short spans where the slowest
/// blocks would sit phase-frozen across any probe's time window.
pub fn lacunary_time_samples_banded(
    l_lo: u32,
    l_hi: u32,
    weight: LacunaryWeight,
    n_t: usize,
    t_span: f64,
    seed: u64,
) -> Vec<f64> {
    (0..n_t)
        .map(|i| {
            let t = t_span * i as f64 / (n_t.max(2) - 1) as f64;
            (l_lo..=l_hi)
                .map(|l| weight.amp(l) * (2.0f64.powi(l as i32) * t + crate::rng::phase(seed, l as u64)).cos())
                .sum()
        })
        .collect()
}
