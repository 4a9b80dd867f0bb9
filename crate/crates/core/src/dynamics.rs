//! Linear dynamics: the decomposition `A = H C`, invariance of structures
//! under the flow, and evolution in the Schrödinger, Ehrenfest and Heisenberg
//! pictures.
//!
//! Two canonical flows carry every computation: `ẋ = A x` on the real phase
//! space and `ψ̇ = -iHψ` on the complex one. Both use exact propagators.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix, RealMatrix, DERIVED_TOL};
use crate::realization::{self, ComplexState, RealPoint};
use crate::structures::{PoissonTensor, StructureTriple};

/// Generator `A` of the real linear flow `ẋ = A x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsMatrix(RealMatrix);

impl DynamicsMatrix {
    pub fn new(a: RealMatrix) -> Result<Self> {
        let dim = numerics::ensure_square(&a)?;
        numerics::ensure_finite(&a)?;
        numerics::ensure_phase_dim(dim)?;
        Ok(Self(a))
    }

    /// `[[0, ω], [-ω, 0]]` repeated on each of `modes` decoupled oscillators.
    pub fn oscillator(omega: f64, modes: usize) -> Result<Self> {
        numerics::ensure_phase_dim(2 * modes)?;
        let mut a = RealMatrix::zeros(2 * modes, 2 * modes);
        for i in 0..modes {
            a[(i, modes + i)] = omega;
            a[(modes + i, i)] = -omega;
        }
        Self::new(a)
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// `exp(tA)`.
    pub fn propagator(&self, t: f64) -> RealMatrix {
        // finiteness and squareness were checked at construction
        numerics::mat_exp(&(&self.0 * t)).expect("validated dynamics matrix")
    }
}

/// `H = A C⁻¹`, required to be symmetric within `1e-9` (relative).
pub fn decompose_hamiltonian(a: &DynamicsMatrix, c: &PoissonTensor) -> Result<RealMatrix> {
    numerics::ensure_same_shape("dynamics vs Poisson tensor", a.matrix(), c.matrix())?;
    let omega = numerics::solve_or_invert(c.matrix())?;
    let h = a.matrix() * omega;
    let residual = numerics::symmetry_residual(&h);
    if residual > 1e-9 * numerics::max_abs(&h).max(1.0) {
        return Err(Error::NotHamiltonian { residual });
    }
    Ok(numerics::symmetrize(&h))
}

/// Outcome of one residual-versus-tolerance check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub ok: bool,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(residual: f64, tolerance: f64) -> Self {
        Self {
            ok: residual <= tolerance,
            residual,
            tolerance,
        }
    }
}

/// Which structures of a triple the flow of `A` leaves invariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceReport {
    /// `|Aᵀ Ω + Ω A|`
    pub symplectic: Check,
    /// `|A J - J A|`
    pub complex: Check,
    /// `|Aᵀ s + s A|`
    pub metric: Check,
}

impl InvarianceReport {
    pub fn all_ok(&self) -> bool {
        self.symplectic.ok && self.complex.ok && self.metric.ok
    }
}

/// Residuals are max-abs entries, compared against the absolute `tol`.
pub fn check_invariance(
    a: &DynamicsMatrix,
    triple: &StructureTriple,
    tol: f64,
) -> Result<InvarianceReport> {
    numerics::ensure_same_shape("dynamics vs triple", a.matrix(), triple.metric())?;
    let a = a.matrix();
    let omega = triple.symplectic().matrix();
    let j = triple.complex().matrix();
    let s = triple.metric();
    Ok(InvarianceReport {
        symplectic: Check::new(numerics::max_abs(&(a.transpose() * omega + omega * a)), tol),
        complex: Check::new(numerics::max_abs(&(a * j - j * a)), tol),
        metric: Check::new(numerics::max_abs(&(a.transpose() * s + s * a)), tol),
    })
}

/// `(|Uᵀ s U - s|, |Uᵀ Ω U - Ω|)` for `U = exp(tA)`.
pub fn flow_preservation(
    a: &DynamicsMatrix,
    triple: &StructureTriple,
    t: f64,
) -> Result<(f64, f64)> {
    numerics::ensure_same_shape("dynamics vs triple", a.matrix(), triple.metric())?;
    let u = a.propagator(t);
    let s = triple.metric();
    let omega = triple.symplectic().matrix();
    Ok((
        numerics::max_abs_diff(&(u.transpose() * s * &u), s),
        numerics::max_abs_diff(&(u.transpose() * omega * &u), omega),
    ))
}

/// `x(t) = exp(tA) x₀`.
pub fn evolve_schrodinger(a: &DynamicsMatrix, x0: &RealPoint, t: f64) -> Result<RealPoint> {
    if x0.as_vector().len() != a.dim() {
        return Err(Error::DimensionMismatch {
            context: "state vs dynamics",
            expected: a.dim(),
            found: x0.as_vector().len(),
        });
    }
    RealPoint::new(a.propagator(t) * x0.as_vector())
}

fn ensure_hermitean(h: &ComplexMatrix) -> Result<()> {
    numerics::ensure_square(h)?;
    numerics::ensure_finite(h)?;
    let residual = numerics::hermitean_residual(h);
    if residual > numerics::CONSTRUCTION_TOL * numerics::max_abs(h).max(1.0) {
        return Err(Error::NotHermitean { residual });
    }
    Ok(())
}

/// `U = exp(-iHt)`.
pub fn unitary_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    ensure_hermitean(h)?;
    numerics::mat_exp(&(h * Complex64::new(0.0, -t)))
}

/// `ψ(t) = exp(-iHt) ψ₀`.
pub fn evolve_state(h: &ComplexMatrix, psi0: &ComplexState, t: f64) -> Result<ComplexState> {
    if psi0.dim() != h.nrows() {
        return Err(Error::DimensionMismatch {
            context: "state vs Hamiltonian",
            expected: h.nrows(),
            found: psi0.dim(),
        });
    }
    Ok(ComplexState(unitary_propagator(h, t)? * psi0.as_vector()))
}

/// `B(t) = U† B U` with `U = exp(-iHt)`.
pub fn evolve_heisenberg(h: &ComplexMatrix, b: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    numerics::ensure_same_shape("observable vs Hamiltonian", h, b)?;
    let u = unitary_propagator(h, t)?;
    Ok(u.adjoint() * b * u)
}

/// `⟨ψ|B|ψ⟩`.
pub fn expectation(b: &ComplexMatrix, psi: &ComplexState) -> Complex64 {
    (psi.as_vector().adjoint() * b * psi.as_vector())[(0, 0)]
}

/// One observable's expectation value computed three ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PictureAgreement {
    /// `⟨ψ(t)|B|ψ(t)⟩` with the state evolved.
    pub schrodinger: f64,
    /// `⟨ψ₀|B(t)|ψ₀⟩` with the operator evolved.
    pub heisenberg: f64,
    /// `½ x(t)ᵀ Q_B x(t)` along the realified flow.
    pub ehrenfest: f64,
    pub residual: f64,
    pub ok: bool,
}

/// Checks that the three pictures give the same expectation value at time `t`.
pub fn ehrenfest_check(
    h: &ComplexMatrix,
    b: &ComplexMatrix,
    psi0: &ComplexState,
    t: f64,
    tol: f64,
) -> Result<PictureAgreement> {
    ensure_hermitean(b)?;
    let schrodinger = expectation(b, &evolve_state(h, psi0, t)?).re;
    let heisenberg = expectation(&evolve_heisenberg(h, b, t)?, psi0).re;

    let a = realization::realify_hamiltonian(h)?;
    let q = realization::realify_observable(b)?;
    let x_t = evolve_schrodinger(&a, &realization::realify_state(psi0), t)?;
    let ehrenfest = 0.5 * x_t.as_vector().dot(&(q * x_t.as_vector()));

    let residual = (schrodinger - heisenberg)
        .abs()
        .max((schrodinger - ehrenfest).abs());
    Ok(PictureAgreement {
        schrodinger,
        heisenberg,
        ehrenfest,
        residual,
        ok: residual <= tol,
    })
}

/// Reconstruction residual `|H C - A|` of a decomposition.
pub fn recomposition_residual(a: &DynamicsMatrix, h: &RealMatrix, c: &PoissonTensor) -> f64 {
    numerics::max_abs_diff(&(h * c.matrix()), a.matrix())
}

/// Default tolerance for structure checks on a flow generator.
pub const INVARIANCE_TOL: f64 = DERIVED_TOL;
