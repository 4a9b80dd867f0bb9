//! Kinematic structures on the real phase space: Poisson tensors, symplectic
//! forms, complex structures, metrics and the Hermitean form they assemble to.
//!
//! Sign conventions: `C₀ = [[0, I], [-I, 0]]` so that `{q_i, p_j} = δ_ij`, and
//! `J₀ = [[0, -I], [I, 0]]` is multiplication by `i` on realified states. Their
//! product `s₀ = C₀ J₀` is the identity.
//!
//! Quadratic observables store the symmetric matrix `Q` of `f(x) = ½ xᵀ Q x`.
//! With that normalization the Poisson bracket of two quadratics has matrix
//! `Q₁ C Q₂ - Q₂ C Q₁`, the C-Lie product of the operands.

use num_complex::Complex64;

use crate::error::{CompatibilityCheck, Error, Result};
use crate::numerics::{self, RealMatrix, RealVector, CONSTRUCTION_TOL};

fn scaled(tol: f64, m: &RealMatrix) -> f64 {
    tol * numerics::max_abs(m).max(1.0)
}

/// Antisymmetric invertible matrix `c_ij = {x_i, x_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonTensor(RealMatrix);

impl PoissonTensor {
    pub fn new(c: RealMatrix) -> Result<Self> {
        let dim = numerics::ensure_square(&c)?;
        numerics::ensure_finite(&c)?;
        numerics::ensure_phase_dim(dim)?;
        let residual = numerics::antisymmetry_residual(&c);
        if residual > scaled(CONSTRUCTION_TOL, &c) {
            return Err(Error::NotAntisymmetric { residual });
        }
        let condition = numerics::condition_number(&c);
        if !(condition <= numerics::SINGULAR_CONDITION) {
            return Err(Error::Singular { condition });
        }
        Ok(Self((&c - c.transpose()) * 0.5))
    }

    /// `C₀` in the q-then-p block convention.
    pub fn canonical(modes: usize) -> Result<Self> {
        numerics::ensure_phase_dim(2 * modes)?;
        let mut c = RealMatrix::zeros(2 * modes, 2 * modes);
        for i in 0..modes {
            c[(i, modes + i)] = 1.0;
            c[(modes + i, i)] = -1.0;
        }
        Ok(Self(c))
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// `Ω` with `Ω C = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm(RealMatrix);

impl SymplecticForm {
    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn eval(&self, x: &RealVector, y: &RealVector) -> f64 {
        x.dot(&(&self.0 * y))
    }
}

/// Real linear map with `J² = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure(RealMatrix);

impl ComplexStructure {
    pub fn new(j: RealMatrix) -> Result<Self> {
        let dim = numerics::ensure_square(&j)?;
        numerics::ensure_finite(&j)?;
        numerics::ensure_phase_dim(dim)?;
        let sq = &j * &j + RealMatrix::identity(dim, dim);
        let residual = numerics::max_abs(&sq);
        let scale = numerics::max_abs(&j).max(1.0);
        if residual > CONSTRUCTION_TOL * scale * scale {
            return Err(Error::NotComplexStructure { residual });
        }
        Ok(Self(j))
    }

    /// `J₀`, multiplication by `i` under `ψ = (q + ip)/√2`.
    pub fn canonical(modes: usize) -> Result<Self> {
        numerics::ensure_phase_dim(2 * modes)?;
        let mut j = RealMatrix::zeros(2 * modes, 2 * modes);
        for i in 0..modes {
            j[(i, modes + i)] = -1.0;
            j[(modes + i, i)] = 1.0;
        }
        Ok(Self(j))
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }
}

/// Compatible pair `(C, J)` together with `Ω = C⁻¹` and the metric `s = C J`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTriple {
    poisson: PoissonTensor,
    symplectic: SymplecticForm,
    complex: ComplexStructure,
    metric: RealMatrix,
}

impl StructureTriple {
    pub fn poisson(&self) -> &PoissonTensor {
        &self.poisson
    }

    pub fn symplectic(&self) -> &SymplecticForm {
        &self.symplectic
    }

    pub fn complex(&self) -> &ComplexStructure {
        &self.complex
    }

    /// The metric `s`.
    pub fn metric(&self) -> &RealMatrix {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    /// `h(x, y) = s(x, y) + i Ω(x, y)`.
    pub fn hermitean_form(&self, x: &RealVector, y: &RealVector) -> Complex64 {
        Complex64::new(x.dot(&(&self.metric * y)), self.symplectic.eval(x, y))
    }

    /// Worst residual among `J² = -1`, `Cᵀ = -C`, `s = C J` and `sᵀ = s`.
    pub fn axiom_residual(&self) -> f64 {
        let c = self.poisson.matrix();
        let j = self.complex.matrix();
        let n = self.dim();
        [
            numerics::max_abs(&(j * j + RealMatrix::identity(n, n))),
            numerics::antisymmetry_residual(c),
            numerics::max_abs_diff(&(c * j), &self.metric),
            numerics::symmetry_residual(&self.metric),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `(C₀, J₀, s₀ = 1)` for `N` complex modes.
pub fn standard_triple(modes: usize) -> Result<StructureTriple> {
    if modes == 0 {
        return Err(Error::DimensionOutOfRange {
            dim: 0,
            min: 1,
            max: numerics::MAX_PHASE_DIM / 2,
        });
    }
    assemble_triple(
        PoissonTensor::canonical(modes)?,
        ComplexStructure::canonical(modes)?,
    )
}

pub fn symplectic_from_poisson(c: &PoissonTensor) -> Result<SymplecticForm> {
    let omega = numerics::solve_or_invert(c.matrix())?;
    // inverse of an antisymmetric matrix is antisymmetric; drop the rounding part
    Ok(SymplecticForm((&omega - omega.transpose()) * 0.5))
}

/// Builds the triple, failing with the first violated compatibility predicate.
pub fn assemble_triple(c: PoissonTensor, j: ComplexStructure) -> Result<StructureTriple> {
    if c.dim() != j.matrix().nrows() {
        return Err(Error::DimensionMismatch {
            context: "Poisson tensor vs complex structure",
            expected: c.dim(),
            found: j.matrix().nrows(),
        });
    }
    let s = c.matrix() * j.matrix();
    let residual = numerics::symmetry_residual(&s);
    if residual > scaled(CONSTRUCTION_TOL, &s) {
        return Err(Error::Incompatible {
            check: CompatibilityCheck::Symmetry,
            residual,
        });
    }
    let min_eig = numerics::min_eigenvalue(&s);
    if !(min_eig > scaled(CONSTRUCTION_TOL, &s)) {
        return Err(Error::Incompatible {
            check: CompatibilityCheck::Positivity,
            residual: min_eig,
        });
    }
    let symplectic = symplectic_from_poisson(&c)?;
    Ok(StructureTriple {
        poisson: c,
        symplectic,
        complex: j,
        metric: s,
    })
}

/// `f(x) = ½ xᵀ Q x` with `Q` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObservable(RealMatrix);

impl QuadraticObservable {
    pub fn new(q: RealMatrix) -> Result<Self> {
        numerics::ensure_square(&q)?;
        numerics::ensure_finite(&q)?;
        let residual = numerics::symmetry_residual(&q);
        if residual > scaled(CONSTRUCTION_TOL, &q) {
            return Err(Error::Invalid(format!(
                "quadratic observable matrix is not symmetric (residual {residual:e})"
            )));
        }
        Ok(Self(numerics::symmetrize(&q)))
    }

    /// Recovers `Q = ∂²f` from a quadratic function by polarization.
    pub fn from_fn(dim: usize, f: impl Fn(&RealVector) -> f64) -> Result<Self> {
        let e = |i: usize| {
            let mut v = RealVector::zeros(dim);
            v[i] = 1.0;
            v
        };
        let diag: Vec<f64> = (0..dim).map(|i| 2.0 * f(&e(i))).collect();
        let q = RealMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                diag[i]
            } else {
                f(&(e(i) + e(j))) - diag[i] / 2.0 - diag[j] / 2.0
            }
        });
        Self::new(q)
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn value(&self, x: &RealVector) -> f64 {
        0.5 * x.dot(&(&self.0 * x))
    }

    pub fn gradient(&self, x: &RealVector) -> RealVector {
        &self.0 * x
    }
}

/// `[B₁, B₂]_C = B₁ C B₂ - B₂ C B₁`.
pub fn matrix_lie_product_c(
    b1: &RealMatrix,
    b2: &RealMatrix,
    c: &PoissonTensor,
) -> Result<RealMatrix> {
    numerics::ensure_same_shape("C-Lie product operands", b1, b2)?;
    numerics::ensure_same_shape("C-Lie product vs Poisson tensor", b1, c.matrix())?;
    let c = c.matrix();
    Ok(b1 * c * b2 - b2 * c * b1)
}

/// `{f, g}` on quadratic observables through the matrix correspondence.
pub fn poisson_bracket_quadratics(
    f: &QuadraticObservable,
    g: &QuadraticObservable,
    c: &PoissonTensor,
) -> Result<QuadraticObservable> {
    let m = matrix_lie_product_c(f.matrix(), g.matrix(), c)?;
    Ok(QuadraticObservable(numerics::symmetrize(&m)))
}

/// `{f, g}(x) = ½ (∂_i f c_ij ∂_j g - ∂_i g c_ij ∂_j f)` evaluated at a point.
pub fn poisson_bracket_at(
    f: &QuadraticObservable,
    g: &QuadraticObservable,
    c: &PoissonTensor,
    x: &RealVector,
) -> f64 {
    let df = f.gradient(x);
    let dg = g.gradient(x);
    let c = c.matrix();
    0.5 * (df.dot(&(c * &dg)) - dg.dot(&(c * &df)))
}
