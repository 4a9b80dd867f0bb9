//! Dense real/complex matrix kernel.
//!
//! Everything here is a pure function of its inputs. Matrices are plain
//! `nalgebra` dynamic matrices; the helpers add the dimension caps, finiteness
//! checks and tolerance conventions the rest of the crate relies on.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;
pub type RealVector = DVector<f64>;
pub type ComplexVector = DVector<Complex64>;

/// Largest real phase-space dimension `2N` accepted anywhere in the crate.
pub const MAX_PHASE_DIM: usize = 128;
/// Largest Fock truncation `D`.
pub const MAX_FOCK_DIM: usize = 64;

/// Tolerance for checks on freshly constructed objects.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Tolerance for identities derived through a few products or an inverse.
pub const DERIVED_TOL: f64 = 1e-10;
/// Tolerance for anything that went through a propagator.
pub const EVOLUTION_TOL: f64 = 1e-8;

/// Condition number beyond which a matrix is treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e14;

pub fn ensure_square<T: nalgebra::Scalar>(m: &DMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_same_shape<T: nalgebra::Scalar, U: nalgebra::Scalar>(
    context: &'static str,
    a: &DMatrix<T>,
    b: &DMatrix<U>,
) -> Result<()> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            context,
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    if a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            context,
            expected: a.ncols(),
            found: b.ncols(),
        });
    }
    Ok(())
}

pub fn ensure_finite<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Result<()> {
    for (col, column) in m.column_iter().enumerate() {
        for (row, x) in column.iter().enumerate() {
            if !x.clone().abs().is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
    }
    Ok(())
}

/// Rejects real phase-space dimensions that are odd, zero or above [`MAX_PHASE_DIM`].
pub fn ensure_phase_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim % 2 != 0 || dim > MAX_PHASE_DIM {
        return Err(Error::DimensionOutOfRange {
            dim,
            min: 2,
            max: MAX_PHASE_DIM,
        });
    }
    Ok(())
}

/// Largest absolute entry.
pub fn max_abs<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|x| x.clone().abs()).fold(0.0, f64::max)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x.clone() - y.clone()).abs())
        .fold(0.0, f64::max)
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm_one<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.clone().abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn commutator<T: ComplexField>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    a * b - b * a
}

/// `max |M - M^T|`, i.e. the distance from symmetry.
pub fn symmetry_residual(m: &RealMatrix) -> f64 {
    max_abs_diff(m, &m.transpose())
}

/// `max |M + M^T|`, i.e. the distance from antisymmetry.
pub fn antisymmetry_residual(m: &RealMatrix) -> f64 {
    max_abs(&(m + m.transpose()))
}

/// `max |M - M^dagger|`.
pub fn hermitean_residual(m: &ComplexMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn symmetrize(m: &RealMatrix) -> RealMatrix {
    (m + m.transpose()) * 0.5
}

pub fn to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

// Padé [13/13] coefficients.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring around a [13/13] Padé core.
pub fn mat_exp<T>(m: &DMatrix<T>) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64>,
{
    let n = ensure_square(m)?;
    ensure_finite(m)?;
    let norm = norm_one(m);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = m * T::from_real(0.5f64.powi(squarings));

    let id = DMatrix::<T>::identity(n, n);
    let b = |i: usize| T::from_real(PADE13[i]);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &id * b(1);
    let u = &scaled * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &id * b(0);

    let denominator = &v - &u;
    let numerator = &v + &u;
    let mut result = denominator.lu().solve(&numerator).ok_or(Error::Singular {
        condition: f64::INFINITY,
    })?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

/// True iff `s` is symmetric within `tol` and every eigenvalue exceeds `tol`.
pub fn is_positive_definite(s: &RealMatrix, tol: f64) -> Result<bool> {
    ensure_square(s)?;
    if symmetry_residual(s) > tol {
        return Ok(false);
    }
    Ok(min_eigenvalue(s) > tol)
}

/// Smallest eigenvalue of the symmetric part of `s`.
pub fn min_eigenvalue(s: &RealMatrix) -> f64 {
    symmetrize(s)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// 2-norm condition number from the singular values.
pub fn condition_number<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse of a square matrix, refusing anything with condition number above
/// [`SINGULAR_CONDITION`].
pub fn solve_or_invert<T>(m: &DMatrix<T>) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64>,
{
    ensure_square(m)?;
    ensure_finite(m)?;
    let condition = condition_number(m);
    if !(condition <= SINGULAR_CONDITION) {
        return Err(Error::Singular { condition });
    }
    m.clone()
        .lu()
        .try_inverse()
        .ok_or(Error::Singular { condition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Truncated Taylor series; independent of the Padé path.
    fn exp_series(m: &RealMatrix, terms: usize) -> RealMatrix {
        let n = m.nrows();
        let mut sum = RealMatrix::identity(n, n);
        let mut term = RealMatrix::identity(n, n);
        for k in 1..terms {
            term = &term * m / k as f64;
            sum += &term;
        }
        sum
    }

    fn random(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> RealMatrix {
        RealMatrix::from_fn(n, n, |_, _| rng.random_range(-scale..scale))
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let e = mat_exp(&RealMatrix::zeros(5, 5)).unwrap();
        assert_eq!(e, RealMatrix::identity(5, 5));
    }

    #[test]
    fn exp_of_diagonal() {
        let d = [0.3, -1.2, 2.5, 7.0];
        let e = mat_exp(&RealMatrix::from_diagonal(&RealVector::from_row_slice(&d))).unwrap();
        for (i, x) in d.iter().enumerate() {
            assert!((e[(i, i)] - x.exp()).abs() <= 1e-12 * x.exp());
        }
        assert!(max_abs(&(e.clone() - RealMatrix::from_diagonal(&e.diagonal()))) == 0.0);
    }

    #[test]
    fn exp_of_rotation_generator_matches_series() {
        let theta = 0.7;
        let m = RealMatrix::from_row_slice(2, 2, &[0.0, theta, -theta, 0.0]);
        let oracle = exp_series(&m, 30);
        let e = mat_exp(&m).unwrap();
        assert!(max_abs_diff(&e, &oracle) <= 1e-12);
        let closed = RealMatrix::from_row_slice(
            2,
            2,
            &[theta.cos(), theta.sin(), -theta.sin(), theta.cos()],
        );
        assert!(max_abs_diff(&e, &closed) <= 1e-12);
    }

    #[test]
    fn exp_relative_residual_against_series_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [3, 6, 10] {
            let m = random(&mut rng, n, 0.5);
            let oracle = exp_series(&m, 40);
            let e = mat_exp(&m).unwrap();
            assert!(max_abs_diff(&e, &oracle) <= 1e-12 * max_abs(&oracle));
        }
    }

    #[test]
    fn exp_with_scaling_matches_series() {
        // Norm large enough to force squarings; the series still converges in f64.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random(&mut rng, 4, 3.0);
        let oracle = exp_series(&m, 120);
        let e = mat_exp(&m).unwrap();
        assert!(max_abs_diff(&e, &oracle) <= 1e-11 * max_abs(&oracle));
    }

    #[test]
    fn complex_exp_of_hermitean_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 5;
        let h = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let u = mat_exp(&(h * Complex64::new(0.0, -1.3))).unwrap();
        let id = ComplexMatrix::identity(n, n);
        assert!(max_abs_diff(&(u.adjoint() * &u), &id) <= 1e-12);
    }

    #[test]
    fn exp_rejects_non_square() {
        assert!(matches!(
            mat_exp(&RealMatrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn positive_definite_examples() {
        assert!(is_positive_definite(&RealMatrix::identity(4, 4), 1e-12).unwrap());
        let indefinite = RealMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(!is_positive_definite(&indefinite, 1e-12).unwrap());
        let asym = RealMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(!is_positive_definite(&asym, 1e-12).unwrap());
        assert!(is_positive_definite(&RealMatrix::zeros(2, 3), 1e-12).is_err());
    }

    #[test]
    fn invert_examples() {
        assert_eq!(
            solve_or_invert(&RealMatrix::identity(3, 3)).unwrap(),
            RealMatrix::identity(3, 3)
        );
        let rot = RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let inv = solve_or_invert(&rot).unwrap();
        assert_eq!(
            inv,
            RealMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
        );

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random(&mut rng, 6, 1.0) + RealMatrix::identity(6, 6) * 3.0;
        let inv = solve_or_invert(&m).unwrap();
        assert!(max_abs_diff(&(&m * inv), &RealMatrix::identity(6, 6)) <= 1e-10);
    }

    #[test]
    fn invert_rejects_singular() {
        let m = RealMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(solve_or_invert(&m), Err(Error::Singular { .. })));
        let nearly = RealMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-16]);
        assert!(matches!(
            solve_or_invert(&nearly),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn phase_dim_cap() {
        assert!(ensure_phase_dim(128).is_ok());
        assert!(ensure_phase_dim(130).is_err());
        assert!(ensure_phase_dim(3).is_err());
        assert!(ensure_phase_dim(0).is_err());
    }
}
