//! Alternative descriptions of one dynamics.
//!
//! Any invertible `T` commuting with `A` carries a compatible structure triple
//! to another one preserved by the same flow:
//!
//! ```text
//! H_T = T⁻¹ H T⁻ᵀ    C_T = Tᵀ C T    J_T = T⁻¹ J T    s_T = Tᵀ s T
//! ```
//!
//! and the three defining relations `A = H_T C_T`, `[J_T, A] = 0` with
//! `J_T² = -1`, and `C_T J_T = s_T` continue to hold. When `T` is not unitary
//! for the original triple the result is a genuinely different Hermitean
//! structure.

use serde::Serialize;

use crate::dynamics::{self, DynamicsMatrix};
use crate::error::{Error, Result};
use crate::numerics::{self, RealMatrix};
use crate::structures::{
    assemble_triple, standard_triple, ComplexStructure, PoissonTensor, StructureTriple,
};

/// Relative tolerance for `T⁻¹ A T = A` and for the transported relations.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Frobenius distance (after scale normalization) above which a transported
/// structure counts as genuinely different.
pub const ALTERNATIVE_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryOrigin {
    /// `A^k`.
    Power(u32),
    /// Element `i` of a computed commutant basis.
    Commutant(usize),
    UserSupplied,
}

/// Invertible `T` with `T⁻¹ A T = A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryTransformation {
    matrix: RealMatrix,
    inverse: RealMatrix,
    origin: SymmetryOrigin,
    residual: f64,
}

impl SymmetryTransformation {
    pub fn new(t: RealMatrix, a: &DynamicsMatrix, origin: SymmetryOrigin) -> Result<Self> {
        numerics::ensure_same_shape("symmetry vs dynamics", &t, a.matrix())?;
        let inverse = numerics::solve_or_invert(&t)?;
        let conjugated = &inverse * a.matrix() * &t;
        let residual = numerics::max_abs_diff(&conjugated, a.matrix());
        if residual > SYMMETRY_TOL * numerics::max_abs(a.matrix()).max(1.0) {
            return Err(Error::NotASymmetry { residual });
        }
        Ok(Self {
            matrix: t,
            inverse,
            origin,
            residual,
        })
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &RealMatrix {
        &self.inverse
    }

    pub fn origin(&self) -> SymmetryOrigin {
        self.origin
    }

    /// `|T⁻¹ A T - A|` measured at construction.
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPower {
    pub power: u32,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct PowerEnumeration {
    pub symmetries: Vec<SymmetryTransformation>,
    pub skipped: Vec<SkippedPower>,
}

/// `A⁰, A¹, …, A^max_power`, skipping powers that are numerically singular.
pub fn symmetry_powers(a: &DynamicsMatrix, max_power: u32) -> Result<PowerEnumeration> {
    let limit = 2 * a.dim() as u32;
    if max_power > limit {
        return Err(Error::Invalid(format!(
            "max_power {max_power} exceeds 2·(2N) = {limit}"
        )));
    }
    let n = a.dim();
    let mut power = RealMatrix::identity(n, n);
    let mut symmetries = Vec::new();
    let mut skipped = Vec::new();
    for k in 0..=max_power {
        if k > 0 {
            power = &power * a.matrix();
        }
        match SymmetryTransformation::new(power.clone(), a, SymmetryOrigin::Power(k)) {
            Ok(t) => symmetries.push(t),
            Err(Error::Singular { condition }) => skipped.push(SkippedPower {
                power: k,
                reason: format!("singular (condition {condition:e})"),
            }),
            Err(e) => skipped.push(SkippedPower {
                power: k,
                reason: e.to_string(),
            }),
        }
    }
    Ok(PowerEnumeration {
        symmetries,
        skipped,
    })
}

/// Basis of `{T : A T = T A}` from the null space of `1 ⊗ A - Aᵀ ⊗ 1`.
///
/// Limited to `2N ≤ 32`; the Kronecker system has `(2N)²` unknowns.
pub fn commutant_basis(a: &DynamicsMatrix) -> Result<Vec<RealMatrix>> {
    let n = a.dim();
    if n > 32 {
        return Err(Error::DimensionOutOfRange {
            dim: n,
            min: 2,
            max: 32,
        });
    }
    let m = a.matrix();
    let id = RealMatrix::identity(n, n);
    // column-major vec: vec(A X) = (1 ⊗ A) vec X, vec(X A) = (Aᵀ ⊗ 1) vec X
    let system = id.kronecker(m) - m.transpose().kronecker(&id);
    let svd = system.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = 1e-10 * largest.max(1.0);
    let mut basis = Vec::new();
    for (i, sigma) in svd.singular_values.iter().enumerate() {
        if *sigma <= cutoff {
            let row = v_t.row(i);
            basis.push(RealMatrix::from_iterator(n, n, row.iter().copied()));
        }
    }
    Ok(basis)
}

/// Residuals of the transported relations, max-abs entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportResiduals {
    /// `|A - H_T C_T|`
    pub hamiltonian: f64,
    /// `|J_T A - A J_T|`
    pub complex_commutes: f64,
    /// `|J_T² + 1|`
    pub complex_square: f64,
    /// `|C_T J_T - s_T|`
    pub metric: f64,
}

impl TransportResiduals {
    pub fn max(&self) -> f64 {
        self.hamiltonian
            .max(self.complex_commutes)
            .max(self.complex_square)
            .max(self.metric)
    }
}

#[derive(Debug, Clone)]
pub struct AlternativeDescription {
    pub triple: StructureTriple,
    pub hamiltonian: RealMatrix,
    pub unitary: bool,
    pub genuinely_alternative: bool,
    pub residuals: TransportResiduals,
}

/// Transports `(triple, H)` along the symmetry `T`.
pub fn transport(
    t: &SymmetryTransformation,
    a: &DynamicsMatrix,
    triple: &StructureTriple,
    h: &RealMatrix,
) -> Result<AlternativeDescription> {
    numerics::ensure_same_shape("symmetry vs triple", t.matrix(), triple.metric())?;
    numerics::ensure_same_shape("Hamiltonian vs triple", h, triple.metric())?;
    let scale = numerics::max_abs(a.matrix()).max(1.0);
    let recomposed = h * triple.poisson().matrix();
    let consistency = numerics::max_abs_diff(&recomposed, a.matrix());
    if consistency > SYMMETRY_TOL * scale {
        return Err(Error::TransportFailed {
            relation: "A = H C (input)",
            residual: consistency,
        });
    }

    let tm = t.matrix();
    let ti = t.inverse();
    let h_t = ti * h * ti.transpose();
    let c_t = PoissonTensor::new(tm.transpose() * triple.poisson().matrix() * tm)?;
    let j_t = ComplexStructure::new(ti * triple.complex().matrix() * tm)?;
    let s_t = tm.transpose() * triple.metric() * tm;
    let n = a.dim();

    let residuals = TransportResiduals {
        hamiltonian: numerics::max_abs_diff(a.matrix(), &(&h_t * c_t.matrix())),
        complex_commutes: numerics::max_abs(&numerics::commutator(j_t.matrix(), a.matrix())),
        complex_square: numerics::max_abs(
            &(j_t.matrix() * j_t.matrix() + RealMatrix::identity(n, n)),
        ),
        metric: numerics::max_abs_diff(&(c_t.matrix() * j_t.matrix()), &s_t),
    };
    let checks = [
        ("1_T: A = H_T C_T", residuals.hamiltonian, scale),
        ("2_T: J_T A = A J_T", residuals.complex_commutes, scale),
        ("2_T: J_T² = -1", residuals.complex_square, 1.0),
        (
            "3_T: C_T J_T = s_T",
            residuals.metric,
            numerics::max_abs(&s_t).max(1.0),
        ),
    ];
    for (relation, residual, scale) in checks {
        if residual > SYMMETRY_TOL * scale {
            return Err(Error::TransportFailed { relation, residual });
        }
    }

    let transported = assemble_triple(c_t, j_t)?;
    let unitary = is_unitary_wrt(t, triple, SYMMETRY_TOL);
    let genuinely_alternative = structures_differ(triple, &transported);
    Ok(AlternativeDescription {
        triple: transported,
        hamiltonian: numerics::symmetrize(&h_t),
        unitary,
        genuinely_alternative,
        residuals,
    })
}

/// True iff `Tᵀ s T = s` and `Tᵀ Ω T = Ω` within `tol` (relative to `|s|`, `|Ω|`).
pub fn is_unitary_wrt(t: &SymmetryTransformation, triple: &StructureTriple, tol: f64) -> bool {
    let tm = t.matrix();
    let s = triple.metric();
    let omega = triple.symplectic().matrix();
    let ds = numerics::max_abs_diff(&(tm.transpose() * s * tm), s);
    let dw = numerics::max_abs_diff(&(tm.transpose() * omega * tm), omega);
    ds <= tol * numerics::max_abs(s).max(1.0) && dw <= tol * numerics::max_abs(omega).max(1.0)
}

fn normalized(m: &RealMatrix) -> RealMatrix {
    let norm = m.norm();
    if norm == 0.0 {
        m.clone()
    } else {
        m / norm
    }
}

/// Whether `s` or `Ω` changed by more than [`ALTERNATIVE_DISTANCE`] once the
/// overall scale is divided out.
pub fn structures_differ(original: &StructureTriple, other: &StructureTriple) -> bool {
    let ds = (normalized(original.metric()) - normalized(other.metric())).norm();
    let dw = (normalized(original.symplectic().matrix()) - normalized(other.symplectic().matrix()))
        .norm();
    ds > ALTERNATIVE_DISTANCE || dw > ALTERNATIVE_DISTANCE
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerClass {
    pub power: u32,
    /// `A^k C⁻¹` is symmetric, i.e. `A^k = (symmetric)·C`.
    pub decomposable: bool,
    /// `|A^k C⁻¹ - (A^k C⁻¹)ᵀ|`, relative to `max(1, |A^k C⁻¹|)`.
    pub symmetry_residual: f64,
    /// `A^k` preserves the standard triple. False for singular powers.
    pub unitary: bool,
    pub singular: bool,
}

/// Per-power report of decomposability and unitarity.
pub fn classify_powers(
    a: &DynamicsMatrix,
    c: &PoissonTensor,
    max_power: u32,
) -> Result<Vec<PowerClass>> {
    dynamics::decompose_hamiltonian(a, c)?;
    let n = a.dim();
    let omega = numerics::solve_or_invert(c.matrix())?;
    let standard = standard_triple(n / 2)?;
    let mut power = RealMatrix::identity(n, n);
    let mut out = Vec::with_capacity(max_power as usize + 1);
    for k in 0..=max_power {
        if k > 0 {
            power = &power * a.matrix();
        }
        let candidate = &power * &omega;
        let symmetry_residual =
            numerics::symmetry_residual(&candidate) / numerics::max_abs(&candidate).max(1.0);
        let (unitary, singular) =
            match SymmetryTransformation::new(power.clone(), a, SymmetryOrigin::Power(k)) {
                Ok(t) => (is_unitary_wrt(&t, &standard, SYMMETRY_TOL), false),
                Err(_) => (false, true),
            };
        out.push(PowerClass {
            power: k,
            decomposable: symmetry_residual <= SYMMETRY_TOL,
            symmetry_residual,
            unitary,
            singular,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{check_invariance, decompose_hamiltonian};
    use crate::numerics::ComplexMatrix;
    use crate::realization::realify_hamiltonian;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn oscillator_setup(omega: f64) -> (DynamicsMatrix, StructureTriple, RealMatrix) {
        let a = DynamicsMatrix::oscillator(omega, 1).unwrap();
        let triple = standard_triple(1).unwrap();
        let h = decompose_hamiltonian(&a, triple.poisson()).unwrap();
        (a, triple, h)
    }

    fn random_system(
        rng: &mut ChaCha8Rng,
        n: usize,
    ) -> (DynamicsMatrix, StructureTriple, RealMatrix) {
        let m = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let hc = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let a = realify_hamiltonian(&hc).unwrap();
        let triple = standard_triple(n).unwrap();
        let h = decompose_hamiltonian(&a, triple.poisson()).unwrap();
        (a, triple, h)
    }

    #[test]
    fn powers_start_with_identity() {
        let (a, _, _) = oscillator_setup(1.0);
        let e = symmetry_powers(&a, 4).unwrap();
        assert_eq!(e.symmetries.len(), 5);
        assert_eq!(e.symmetries[0].matrix(), &RealMatrix::identity(2, 2));
        assert_eq!(e.symmetries[0].origin(), SymmetryOrigin::Power(0));
        assert_eq!(e.symmetries[2].matrix(), &(-RealMatrix::identity(2, 2)));
        for t in &e.symmetries {
            assert!(t.residual() <= 1e-10);
        }
        assert!(symmetry_powers(&a, 5).is_err());
    }

    #[test]
    fn singular_powers_are_skipped() {
        // A with a zero eigenvalue: every power k ≥ 1 is singular
        let a = DynamicsMatrix::new(RealMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, //
                -1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0,
            ],
        ))
        .unwrap();
        let e = symmetry_powers(&a, 3).unwrap();
        assert_eq!(e.symmetries.len(), 1);
        assert_eq!(
            e.skipped.iter().map(|s| s.power).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
    }

    #[test]
    fn identity_transport_is_trivial() {
        let (a, triple, h) = oscillator_setup(1.5);
        let t = SymmetryTransformation::new(
            RealMatrix::identity(2, 2),
            &a,
            SymmetryOrigin::UserSupplied,
        )
        .unwrap();
        let alt = transport(&t, &a, &triple, &h).unwrap();
        assert_eq!(alt.triple, triple);
        assert_eq!(alt.hamiltonian, h);
        assert!(alt.unitary && !alt.genuinely_alternative);
    }

    #[test]
    fn oscillator_square_scales_structures() {
        let omega = 2.0;
        let (a, triple, h) = oscillator_setup(omega);
        let sq = a.matrix() * a.matrix();
        assert_eq!(sq, RealMatrix::identity(2, 2) * -4.0);
        let t = SymmetryTransformation::new(sq, &a, SymmetryOrigin::Power(2)).unwrap();
        let alt = transport(&t, &a, &triple, &h).unwrap();
        assert!(
            numerics::max_abs_diff(
                alt.triple.poisson().matrix(),
                &(triple.poisson().matrix() * 16.0)
            ) < 1e-12
        );
        assert!(numerics::max_abs_diff(&alt.hamiltonian, &(&h / 16.0)) < 1e-12);
        assert!(
            numerics::max_abs_diff(alt.triple.complex().matrix(), triple.complex().matrix())
                < 1e-12
        );
        assert!(numerics::max_abs_diff(alt.triple.metric(), &(triple.metric() * 16.0)) < 1e-12);
        assert!(alt.residuals.max() <= 1e-9);
        assert!(!alt.unitary);
        // a pure rescaling is not a new structure once scale is divided out
        assert!(!alt.genuinely_alternative);
    }

    #[test]
    fn j0_transport_is_unitary() {
        let (a, triple, h) = oscillator_setup(1.3);
        let t = SymmetryTransformation::new(
            triple.complex().matrix().clone(),
            &a,
            SymmetryOrigin::UserSupplied,
        )
        .unwrap();
        let alt = transport(&t, &a, &triple, &h).unwrap();
        assert!(alt.unitary);
        assert!(
            numerics::max_abs_diff(alt.triple.poisson().matrix(), triple.poisson().matrix())
                <= 1e-12
        );
        assert!(
            numerics::max_abs_diff(alt.triple.complex().matrix(), triple.complex().matrix())
                <= 1e-12
        );
        assert!(numerics::max_abs_diff(alt.triple.metric(), triple.metric()) <= 1e-12);
    }

    #[test]
    fn unitarity_examples() {
        let (a, triple, _) = oscillator_setup(2.0);
        let flow =
            SymmetryTransformation::new(a.propagator(0.37), &a, SymmetryOrigin::UserSupplied)
                .unwrap();
        assert!(is_unitary_wrt(&flow, &triple, 1e-10));
        let twice = SymmetryTransformation::new(
            RealMatrix::identity(2, 2) * 2.0,
            &a,
            SymmetryOrigin::UserSupplied,
        )
        .unwrap();
        assert!(!is_unitary_wrt(&twice, &triple, 1e-10));
        let sq = SymmetryTransformation::new(a.matrix() * a.matrix(), &a, SymmetryOrigin::Power(2))
            .unwrap();
        assert!(!is_unitary_wrt(&sq, &triple, 1e-10));
    }

    #[test]
    fn non_symmetry_rejected() {
        let (a, _, _) = oscillator_setup(1.0);
        let t = RealMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            SymmetryTransformation::new(t, &a, SymmetryOrigin::UserSupplied),
            Err(Error::NotASymmetry { .. })
        ));
    }

    #[test]
    fn odd_powers_decompose_even_powers_do_not() {
        let (a, triple, _) = oscillator_setup(2.0);
        let classes = classify_powers(&a, triple.poisson(), 4).unwrap();
        let decomposable: Vec<bool> = classes.iter().map(|c| c.decomposable).collect();
        assert_eq!(decomposable, vec![false, true, false, true, false]);
        assert!(!classes[1].unitary); // A itself rescales s by ω² ≠ 1
        assert!(classes[0].unitary);

        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let (a, triple, _) = random_system(&mut rng, 3);
        let classes = classify_powers(&a, triple.poisson(), 6).unwrap();
        for c in &classes {
            assert_eq!(c.decomposable, c.power % 2 == 1, "power {}", c.power);
        }
    }

    #[test]
    fn classify_requires_hamiltonian_dynamics() {
        let a = DynamicsMatrix::new(RealMatrix::identity(2, 2)).unwrap();
        let c0 = PoissonTensor::canonical(1).unwrap();
        assert!(matches!(
            classify_powers(&a, &c0, 2),
            Err(Error::NotHamiltonian { .. })
        ));
    }

    #[test]
    fn non_unitary_symmetry_gives_invariant_alternative() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let (a, triple, h) = random_system(&mut rng, 3);
        let sq = SymmetryTransformation::new(a.matrix() * a.matrix(), &a, SymmetryOrigin::Power(2))
            .unwrap();
        let alt = transport(&sq, &a, &triple, &h).unwrap();
        assert!(!alt.unitary);
        assert!(alt.genuinely_alternative);
        assert!(alt.residuals.max() <= 1e-9);
        assert!(check_invariance(&a, &alt.triple, 1e-9).unwrap().all_ok());
    }

    #[test]
    fn transport_is_functorial() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let (a, triple, h) = random_system(&mut rng, 2);
        let n = a.dim();
        let t1m = RealMatrix::identity(n, n) * 1.5 + a.matrix() * 0.3;
        let t2m = RealMatrix::identity(n, n) - a.matrix() * a.matrix() * 0.2;
        let t1 =
            SymmetryTransformation::new(t1m.clone(), &a, SymmetryOrigin::UserSupplied).unwrap();
        let t2 =
            SymmetryTransformation::new(t2m.clone(), &a, SymmetryOrigin::UserSupplied).unwrap();
        let t12 =
            SymmetryTransformation::new(&t1m * &t2m, &a, SymmetryOrigin::UserSupplied).unwrap();

        let step = transport(&t1, &a, &triple, &h).unwrap();
        let two_step = transport(&t2, &a, &step.triple, &step.hamiltonian).unwrap();
        let direct = transport(&t12, &a, &triple, &h).unwrap();
        assert!(
            numerics::max_abs_diff(
                two_step.triple.poisson().matrix(),
                direct.triple.poisson().matrix()
            ) <= 1e-9
        );
        assert!(
            numerics::max_abs_diff(
                two_step.triple.complex().matrix(),
                direct.triple.complex().matrix()
            ) <= 1e-9
        );
        assert!(numerics::max_abs_diff(two_step.triple.metric(), direct.triple.metric()) <= 1e-9);
        assert!(numerics::max_abs_diff(&two_step.hamiltonian, &direct.hamiltonian) <= 1e-9);
    }

    #[test]
    fn unitary_flow_transport_leaves_triple_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let (a, triple, h) = random_system(&mut rng, 3);
        let u = SymmetryTransformation::new(a.propagator(0.8), &a, SymmetryOrigin::UserSupplied)
            .unwrap();
        let alt = transport(&u, &a, &triple, &h).unwrap();
        assert!(alt.unitary);
        assert!(numerics::max_abs_diff(alt.triple.metric(), triple.metric()) <= 1e-10);
        assert!(
            numerics::max_abs_diff(alt.triple.poisson().matrix(), triple.poisson().matrix())
                <= 1e-10
        );
        assert!(
            numerics::max_abs_diff(alt.triple.complex().matrix(), triple.complex().matrix())
                <= 1e-10
        );
    }

    #[test]
    fn commutant_contains_powers_and_j0() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let (a, triple, _) = random_system(&mut rng, 2);
        let basis = commutant_basis(&a).unwrap();
        // distinct eigenvalues ±iλ_k: the commutant has real dimension 2N
        assert_eq!(basis.len(), 4);
        for b in &basis {
            assert!(numerics::max_abs(&numerics::commutator(b, a.matrix())) <= 1e-9);
        }
        // J₀ lies in the span: residual of least squares projection is zero
        let stacked = RealMatrix::from_fn(16, basis.len(), |r, c| basis[c][(r % 4, r / 4)]);
        let j = triple.complex().matrix();
        let target = numerics::RealVector::from_fn(16, |r, _| j[(r % 4, r / 4)]);
        let coeffs = stacked
            .clone()
            .svd(true, true)
            .solve(&target, 1e-12)
            .unwrap();
        assert!((stacked * coeffs - target).amax() <= 1e-9);
    }
}
