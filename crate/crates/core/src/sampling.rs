//! Seeded random instances for the verification suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{ComplexMatrix, ComplexVector, RealMatrix};
use crate::realization::ComplexState;

pub type SuiteRng = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 20_240_601;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn entry(rng: &mut SuiteRng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Entries uniform in the unit square.
pub fn complex_matrix(rng: &mut SuiteRng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| entry(rng))
}

pub fn hermitean(rng: &mut SuiteRng, n: usize) -> ComplexMatrix {
    let m = complex_matrix(rng, n);
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn real_matrix(rng: &mut SuiteRng, n: usize) -> RealMatrix {
    RealMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn symmetric(rng: &mut SuiteRng, n: usize) -> RealMatrix {
    let m = real_matrix(rng, n);
    (&m + m.transpose()) * 0.5
}

pub fn state(rng: &mut SuiteRng, n: usize) -> ComplexState {
    ComplexState(ComplexVector::from_fn(n, |_, _| entry(rng)))
}

/// Table of length `n` with entries uniform in `[lo, hi)`.
pub fn uniform_table(rng: &mut SuiteRng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn size(rng: &mut SuiteRng, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}
