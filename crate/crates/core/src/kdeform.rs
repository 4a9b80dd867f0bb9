//! Deformed products on linear transformations.
//!
//! For a Hermitean `K` and a real strength `λ`:
//!
//! ```text
//! A ·_K B   = A e^{λK} B
//! [A, B]_K  = A e^{λK} B - B e^{λK} A
//! F_K(A)    = e^{λK/2} A e^{λK/2}
//! ⟨ψ₁|ψ₂⟩_K = ⟨ψ₁| e^{λK} |ψ₂⟩
//! ```
//!
//! `F_K` intertwines `·_K` with the ordinary product, so every identity of the
//! ordinary matrix algebra carries over.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix, ComplexVector, CONSTRUCTION_TOL};
use crate::realization::ComplexState;

/// How `K` is given.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    Full(ComplexMatrix),
    /// `K = diag(k_0, k_1, …)` in a preferred basis, e.g. `K(n̂)` on Fock states.
    Diagonal(Vec<f64>),
}

impl Kernel {
    pub fn dim(&self) -> usize {
        match self {
            Kernel::Full(m) => m.nrows(),
            Kernel::Diagonal(d) => d.len(),
        }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        match self {
            Kernel::Full(m) => m.clone(),
            Kernel::Diagonal(d) => ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
                d.len(),
                d.iter().map(|&x| Complex64::new(x, 0.0)),
            )),
        }
    }

    fn exp_scaled(&self, factor: f64) -> Result<ComplexMatrix> {
        match self {
            Kernel::Full(m) => numerics::mat_exp(&(m * Complex64::new(factor, 0.0))),
            Kernel::Diagonal(d) => Ok(ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
                d.len(),
                d.iter().map(|&x| Complex64::new((factor * x).exp(), 0.0)),
            ))),
        }
    }
}

/// The pair `(K, λ)` with `e^{λK}` and `e^{λK/2}` precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationOperator {
    kernel: Kernel,
    lambda: f64,
    weight: ComplexMatrix,
    half_weight: ComplexMatrix,
}

impl DeformationOperator {
    pub fn new(kernel: Kernel, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::Invalid(format!("λ must be finite, got {lambda}")));
        }
        match &kernel {
            Kernel::Full(m) => {
                numerics::ensure_square(m)?;
                numerics::ensure_finite(m)?;
                let residual = numerics::hermitean_residual(m);
                if residual > CONSTRUCTION_TOL * numerics::max_abs(m).max(1.0) {
                    return Err(Error::NotHermitean { residual });
                }
            }
            Kernel::Diagonal(d) => {
                if let Some(i) = d.iter().position(|x| !x.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: i });
                }
            }
        }
        if kernel.dim() == 0 {
            return Err(Error::Invalid("K must have nonzero dimension".into()));
        }
        let weight = kernel.exp_scaled(lambda)?;
        let half_weight = kernel.exp_scaled(lambda / 2.0)?;
        Ok(Self {
            kernel,
            lambda,
            weight,
            half_weight,
        })
    }

    /// Same `K`, different `λ`.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.kernel.clone(), lambda)
    }

    /// `(-K, λ)`, whose `F` map inverts this one's.
    pub fn negated(&self) -> Result<Self> {
        let kernel = match &self.kernel {
            Kernel::Full(m) => Kernel::Full(-m),
            Kernel::Diagonal(d) => Kernel::Diagonal(d.iter().map(|x| -x).collect()),
        };
        Self::new(kernel, self.lambda)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    /// `e^{λK}`.
    pub fn weight(&self) -> &ComplexMatrix {
        &self.weight
    }

    /// `e^{λK/2}`.
    pub fn half_weight(&self) -> &ComplexMatrix {
        &self.half_weight
    }

    fn check(&self, context: &'static str, m: &ComplexMatrix) -> Result<()> {
        numerics::ensure_same_shape(context, &self.weight, m)
    }
}

/// `A ·_K B = A e^{λK} B`.
pub fn kproduct(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    d: &DeformationOperator,
) -> Result<ComplexMatrix> {
    d.check("K-product left operand", a)?;
    d.check("K-product right operand", b)?;
    Ok(a * d.weight() * b)
}

/// `[A, B]_K = A e^{λK} B - B e^{λK} A`.
pub fn kbracket(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    d: &DeformationOperator,
) -> Result<ComplexMatrix> {
    Ok(kproduct(a, b, d)? - kproduct(b, a, d)?)
}

/// `F_K(A) = e^{λK/2} A e^{λK/2}`.
pub fn fk_map(a: &ComplexMatrix, d: &DeformationOperator) -> Result<ComplexMatrix> {
    d.check("F_K operand", a)?;
    Ok(d.half_weight() * a * d.half_weight())
}

/// `⟨ψ₁|ψ₂⟩_K = ⟨ψ₁| e^{λK/2} e^{λK/2} |ψ₂⟩`.
pub fn kscalar(
    psi1: &ComplexState,
    psi2: &ComplexState,
    d: &DeformationOperator,
) -> Result<Complex64> {
    for psi in [psi1, psi2] {
        if psi.dim() != d.dim() {
            return Err(Error::DimensionMismatch {
                context: "state vs K",
                expected: d.dim(),
                found: psi.dim(),
            });
        }
    }
    let half = d.half_weight();
    Ok((psi1.as_vector().adjoint() * half * half * psi2.as_vector())[(0, 0)])
}

/// `f_{A,K}(ψ) = ⟨ψ|F_K(A)|ψ⟩`.
pub fn kexpectation(
    a: &ComplexMatrix,
    psi: &ComplexState,
    d: &DeformationOperator,
) -> Result<Complex64> {
    let fa = fk_map(a, d)?;
    if psi.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            context: "state vs K",
            expected: d.dim(),
            found: psi.dim(),
        });
    }
    Ok((psi.as_vector().adjoint() * fa * psi.as_vector())[(0, 0)])
}

/// True iff `|[K, H]| ≤ tol` (max-abs entry).
pub fn is_constant_of_motion(k: &ComplexMatrix, h: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(commutation_residual(k, h)? <= tol)
}

pub fn commutation_residual(k: &ComplexMatrix, h: &ComplexMatrix) -> Result<f64> {
    numerics::ensure_same_shape("K vs H", k, h)?;
    Ok(numerics::max_abs(&numerics::commutator(k, h)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve_state;
    use crate::numerics::max_abs_diff;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_hermitean(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let m = random_matrix(rng, n);
        (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> ComplexState {
        ComplexState(ComplexVector::from_fn(n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        }))
    }

    fn deformation(rng: &mut ChaCha8Rng, n: usize, lambda: f64) -> DeformationOperator {
        DeformationOperator::new(Kernel::Full(random_hermitean(rng, n)), lambda).unwrap()
    }

    #[test]
    fn trivial_deformations_give_ordinary_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let a = random_matrix(&mut rng, 4);
        let b = random_matrix(&mut rng, 4);
        let k = random_hermitean(&mut rng, 4);
        let no_lambda = DeformationOperator::new(Kernel::Full(k), 0.0).unwrap();
        let no_k = DeformationOperator::new(Kernel::Full(ComplexMatrix::zeros(4, 4)), 0.7).unwrap();
        for d in [&no_lambda, &no_k] {
            assert!(max_abs_diff(&kproduct(&a, &b, d).unwrap(), &(&a * &b)) < 1e-14);
            assert!(
                max_abs_diff(&kbracket(&a, &b, d).unwrap(), &numerics::commutator(&a, &b)) < 1e-14
            );
            assert!(max_abs_diff(&fk_map(&a, d).unwrap(), &a) < 1e-14);
        }
    }

    #[test]
    fn associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let d = deformation(&mut rng, 5, 0.4);
        let (a, b, c) = (
            random_matrix(&mut rng, 5),
            random_matrix(&mut rng, 5),
            random_matrix(&mut rng, 5),
        );
        let left = kproduct(&kproduct(&a, &b, &d).unwrap(), &c, &d).unwrap();
        let right = kproduct(&a, &kproduct(&b, &c, &d).unwrap(), &d).unwrap();
        assert!(max_abs_diff(&left, &right) <= 1e-10);
    }

    #[test]
    fn bracket_antisymmetry_jacobi_derivation() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let d = deformation(&mut rng, 4, 1.0);
        let (a, b, c) = (
            random_matrix(&mut rng, 4),
            random_matrix(&mut rng, 4),
            random_matrix(&mut rng, 4),
        );
        let br = |x: &ComplexMatrix, y: &ComplexMatrix| kbracket(x, y, &d).unwrap();
        let pr = |x: &ComplexMatrix, y: &ComplexMatrix| kproduct(x, y, &d).unwrap();
        assert_eq!(br(&a, &a), ComplexMatrix::zeros(4, 4));
        assert!(numerics::max_abs(&(br(&a, &b) + br(&b, &a))) <= 1e-12);
        let jacobi = br(&a, &br(&b, &c)) + br(&b, &br(&c, &a)) + br(&c, &br(&a, &b));
        assert!(numerics::max_abs(&jacobi) <= 1e-10);
        let derivation = br(&a, &pr(&b, &c)) - pr(&br(&a, &b), &c) - pr(&b, &br(&a, &c));
        assert!(numerics::max_abs(&derivation) <= 1e-10);
    }

    #[test]
    fn fk_homomorphisms_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let d = deformation(&mut rng, 5, 0.3);
        let a = random_matrix(&mut rng, 5);
        let b = random_matrix(&mut rng, 5);
        let f = |x: &ComplexMatrix| fk_map(x, &d).unwrap();
        let assoc = f(&a) * f(&b) - f(&kproduct(&a, &b, &d).unwrap());
        assert!(numerics::max_abs(&assoc) <= 1e-10);
        let lie = numerics::commutator(&f(&a), &f(&b)) - f(&kbracket(&a, &b, &d).unwrap());
        assert!(numerics::max_abs(&lie) <= 1e-10);
        let inv = d.negated().unwrap();
        assert!(max_abs_diff(&fk_map(&f(&a), &inv).unwrap(), &a) <= 1e-10);
    }

    #[test]
    fn kscalar_reference_and_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let zero = DeformationOperator::new(Kernel::Full(ComplexMatrix::zeros(3, 3)), 1.0).unwrap();
        let (p1, p2) = (random_state(&mut rng, 3), random_state(&mut rng, 3));
        let reference = (p1.as_vector().adjoint() * p2.as_vector())[(0, 0)];
        assert!((kscalar(&p1, &p2, &zero).unwrap() - reference).norm() < 1e-15);

        for _ in 0..10 {
            let d = deformation(&mut rng, 4, 1.0);
            let min = d.weight().clone().symmetric_eigen().eigenvalues.min();
            assert!(min > 0.0);
            let psi = random_state(&mut rng, 4);
            let norm = kscalar(&psi, &psi, &d).unwrap();
            assert!(norm.re > 0.0 && norm.im.abs() < 1e-12);
            let (p1, p2) = (random_state(&mut rng, 4), random_state(&mut rng, 4));
            let h12 = kscalar(&p1, &p2, &d).unwrap();
            let h21 = kscalar(&p2, &p1, &d).unwrap();
            assert!((h12 - h21.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn kexpectation_equals_k_scalar_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        let d = deformation(&mut rng, 4, 0.6);
        let a = random_matrix(&mut rng, 4);
        for _ in 0..50 {
            let psi = random_state(&mut rng, 4);
            let lhs = kexpectation(&a, &psi, &d).unwrap();
            // ⟨ψ|A|ψ⟩_K with the K-product placing the weight halves around A
            let half = d.half_weight();
            let rhs = ((half * psi.as_vector()).adjoint() * &a * (half * psi.as_vector()))[(0, 0)];
            assert!((lhs - rhs).norm() <= 1e-12);
        }
    }

    #[test]
    fn diagonal_kernel_matches_full() {
        let diag = vec![0.1, -0.4, 0.9, 0.0];
        let d1 = DeformationOperator::new(Kernel::Diagonal(diag.clone()), 0.8).unwrap();
        let d2 = DeformationOperator::new(Kernel::Full(Kernel::Diagonal(diag).to_matrix()), 0.8)
            .unwrap();
        assert!(max_abs_diff(d1.weight(), d2.weight()) < 1e-14);
        assert!(max_abs_diff(d1.half_weight(), d2.half_weight()) < 1e-14);
        let swept = d1.with_lambda(0.0).unwrap();
        assert_eq!(swept.weight(), &ComplexMatrix::identity(4, 4));
    }

    #[test]
    fn non_hermitean_kernel_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        let m = random_matrix(&mut rng, 3);
        assert!(matches!(
            DeformationOperator::new(Kernel::Full(m), 1.0),
            Err(Error::NotHermitean { .. })
        ));
    }

    #[test]
    fn constant_of_motion_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(58);
        let h = random_hermitean(&mut rng, 4);
        assert!(is_constant_of_motion(&h, &h, 1e-12).unwrap());

        let d = 10;
        let number = |g: &dyn Fn(f64) -> f64| {
            ComplexMatrix::from_diagonal(&ComplexVector::from_fn(d, |n, _| {
                Complex64::new(g(n as f64), 0.0)
            }))
        };
        let osc = number(&|n| n + 0.5);
        let k = number(&|n| 0.3 * n * n - n + 2.0);
        assert!(is_constant_of_motion(&k, &osc, 1e-12).unwrap());

        let k = random_hermitean(&mut rng, 4);
        assert!(!is_constant_of_motion(&k, &h, 1e-6).unwrap());
    }

    #[test]
    fn k_norm_conserved_when_k_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let h = random_hermitean(&mut rng, 5);
        let k = &h * &h * Complex64::new(0.3, 0.0) - &h;
        assert!(is_constant_of_motion(&k, &h, 1e-12).unwrap());
        let d = DeformationOperator::new(Kernel::Full(k), 0.5).unwrap();
        let psi0 = random_state(&mut rng, 5);
        let n0 = kscalar(&psi0, &psi0, &d).unwrap().re;
        for t in [0.5, 2.0, 5.0, 10.0] {
            let psi = evolve_state(&h, &psi0, t).unwrap();
            assert!((kscalar(&psi, &psi, &d).unwrap().re - n0).abs() <= 1e-8);
        }
    }
}
