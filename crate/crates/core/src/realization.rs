//! Complex ↔ real dictionary.
//!
//! A state `ψ ∈ C^N` is written as `ψ_k = (q_k + i p_k)/√2` and stored as the
//! real point `x = (q_1..q_N, p_1..p_N)`. With `ħ = 1` the Schrödinger flow
//! `ψ̇ = -iHψ` becomes the linear flow `ẋ = A x`.

use num_complex::Complex64;
use std::f64::consts::SQRT_2;

use crate::dynamics::DynamicsMatrix;
use crate::error::{Error, Result};
use crate::numerics::{
    self, ComplexMatrix, ComplexVector, RealMatrix, RealVector, CONSTRUCTION_TOL,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexState(pub ComplexVector);

impl ComplexState {
    pub fn from_slice(amplitudes: &[Complex64]) -> Self {
        Self(ComplexVector::from_column_slice(amplitudes))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &ComplexVector {
        &self.0
    }

    /// `⟨ψ|ψ⟩`.
    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }
}

/// Point of the real phase space, ordered all-q-then-all-p.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPoint(RealVector);

impl RealPoint {
    pub fn new(coords: RealVector) -> Result<Self> {
        if coords.len() % 2 != 0 || coords.is_empty() {
            return Err(Error::Invalid(format!(
                "real point needs an even, nonzero length, got {}",
                coords.len()
            )));
        }
        Ok(Self(coords))
    }

    pub fn from_qp(q: &[f64], p: &[f64]) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                context: "q/p halves",
                expected: q.len(),
                found: p.len(),
            });
        }
        Self::new(RealVector::from_iterator(
            q.len() * 2,
            q.iter().chain(p.iter()).copied(),
        ))
    }

    /// Complex dimension `N`.
    pub fn modes(&self) -> usize {
        self.0.len() / 2
    }

    pub fn q(&self) -> &[f64] {
        &self.0.as_slice()[..self.modes()]
    }

    pub fn p(&self) -> &[f64] {
        &self.0.as_slice()[self.modes()..]
    }

    pub fn as_vector(&self) -> &RealVector {
        &self.0
    }

    pub fn into_vector(self) -> RealVector {
        self.0
    }
}

pub fn realify_state(psi: &ComplexState) -> RealPoint {
    let n = psi.dim();
    let coords = RealVector::from_fn(2 * n, |i, _| {
        if i < n {
            psi.0[i].re * SQRT_2
        } else {
            psi.0[i - n].im * SQRT_2
        }
    });
    RealPoint(coords)
}

pub fn complexify_state(x: &RealPoint) -> ComplexState {
    let n = x.modes();
    ComplexState(ComplexVector::from_fn(n, |k, _| {
        Complex64::new(x.0[k], x.0[k + n]) / SQRT_2
    }))
}

fn ensure_hermitean(h: &ComplexMatrix) -> Result<usize> {
    let n = numerics::ensure_square(h)?;
    numerics::ensure_finite(h)?;
    numerics::ensure_phase_dim(2 * n)?;
    let residual = numerics::hermitean_residual(h);
    if residual > CONSTRUCTION_TOL * numerics::max_abs(h).max(1.0) {
        return Err(Error::NotHermitean { residual });
    }
    Ok(n)
}

fn blocks(h: &ComplexMatrix) -> (RealMatrix, RealMatrix) {
    (h.map(|z| z.re), h.map(|z| z.im))
}

/// Real generator `A = [[H_I, H_R], [-H_R, H_I]]` of the flow equivalent to
/// `ψ̇ = -iHψ`.
pub fn realify_hamiltonian(h: &ComplexMatrix) -> Result<DynamicsMatrix> {
    let n = ensure_hermitean(h)?;
    let (re, im) = blocks(h);
    let mut a = RealMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, 0), (n, n)).copy_from(&im);
    a.view_mut((0, n), (n, n)).copy_from(&re);
    a.view_mut((n, 0), (n, n)).copy_from(&(-&re));
    a.view_mut((n, n), (n, n)).copy_from(&im);
    DynamicsMatrix::new(a)
}

/// Symmetric `Q` with `⟨ψ|B|ψ⟩ = ½ xᵀ Q x`, namely `[[B_R, -B_I], [B_I, B_R]]`.
pub fn realify_observable(b: &ComplexMatrix) -> Result<RealMatrix> {
    let n = ensure_hermitean(b)?;
    let (re, im) = blocks(b);
    let mut q = RealMatrix::zeros(2 * n, 2 * n);
    q.view_mut((0, 0), (n, n)).copy_from(&re);
    q.view_mut((0, n), (n, n)).copy_from(&(-&im));
    q.view_mut((n, 0), (n, n)).copy_from(&im);
    q.view_mut((n, n), (n, n)).copy_from(&re);
    Ok(numerics::symmetrize(&q))
}

/// Closed-form flow of the one-level system `q̇ = ωp`, `ṗ = -ωq`.
pub fn one_level_trajectory(omega: f64, q0: f64, p0: f64, t: f64) -> (f64, f64) {
    let (s, c) = (omega * t).sin_cos();
    (q0 * c + p0 * s, -q0 * s + p0 * c)
}

/// `H = ω (q² + p²)/2`.
pub fn one_level_energy(omega: f64, q: f64, p: f64) -> f64 {
    omega * (q * q + p * p) / 2.0
}
