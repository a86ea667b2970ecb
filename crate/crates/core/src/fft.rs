//! Unitary FFT layer.
//!
//! Plans are cached per size. Both directions carry a 1/√n factor so that
//! the ℓ² norm of grid values equals the ℓ² norm of coefficients exactly
//! (discrete Parseval), which is the normalization every norm in the crate
//! is built on.

use crate::C64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plan_cache() -> &'static Mutex<HashMap<usize, Arc<Plans>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn plans(n: usize) -> Arc<Plans> {
    let mut cache = plan_cache().lock().expect("fft plan cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// In-place grid → spectral, unitary: û_k = n^{-1/2} Σ_j u_j e^{-2πijk/n}.
pub fn forward(buf: &mut [C64]) {
    let n = buf.len();
    plans(n).forward.process(buf);
    let scale = 1.0 / (n as f64).sqrt();
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// In-place spectral → grid, unitary: u_j = n^{-1/2} Σ_k û_k e^{+2πijk/n}.
pub fn inverse(buf: &mut [C64]) {
    let n = buf.len();
    plans(n).inverse.process(buf);
    let scale = 1.0 / (n as f64).sqrt();
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Integer frequency of FFT bin `idx` on an n-point grid: 0,1,…,n/2−1,−n/2,…,−1.
#[inline]
pub fn freq_of(idx: usize, n: usize) -> i64 {
    if idx < n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

/// FFT bin of integer frequency k (must satisfy −n/2 ≤ k < n/2).
#[inline]
pub fn index_of(k: i64, n: usize) -> usize {
    if k >= 0 {
        k as usize
    } else {
        (k + n as i64) as usize
    }
}
