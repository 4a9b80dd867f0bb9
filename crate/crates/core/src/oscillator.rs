//! The harmonic oscillator on a truncated Fock space.
//!
//! Covers the deformed commutator `[a, a†]_K = a e^{λK(n̂)} a† - a† e^{λK(n̂)} a`,
//! alternative Hamiltonians `H̃` with `H̃ e^{λK} = a†a + ½`, the one-parameter
//! family of `K` that reproduces `[a, a†]_K = 1`, and f-deformed oscillators
//! `A = a f(n̂)`.
//!
//! Functions of `n̂` are carried as tables indexed by the Fock level. Tables
//! named "weights" hold `e^{λK(n)}` directly.
//!
//! Truncation: with `D` levels, operator identities of the infinite ladder hold
//! on the interior levels `n ≤ D - 2`. The last level is reported separately.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics;
use crate::error::{Error, Result};
use crate::kdeform::{self, DeformationOperator, Kernel};
use crate::numerics::{self, ComplexMatrix, ComplexVector, MAX_FOCK_DIM};

/// Below this magnitude a table value counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn diag(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
        values.len(),
        values.iter().map(|&x| c(x)),
    ))
}

fn ensure_table(values: &[f64], dim: usize) -> Result<()> {
    if values.len() < dim {
        return Err(Error::TableTooShort {
            required: dim,
            found: values.len(),
        });
    }
    if let Some(i) = values[..dim].iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { row: i, col: 0 });
    }
    Ok(())
}

/// `a`, `a†` and `n̂` on levels `0..D`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockLadder {
    dim: usize,
    a: ComplexMatrix,
    a_dag: ComplexMatrix,
    n_hat: ComplexMatrix,
}

impl FockLadder {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn a_dag(&self) -> &ComplexMatrix {
        &self.a_dag
    }

    pub fn n_hat(&self) -> &ComplexMatrix {
        &self.n_hat
    }

    /// `H = n̂ + ½`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        &self.n_hat + ComplexMatrix::identity(self.dim, self.dim) * c(0.5)
    }

    /// Largest level where infinite-ladder identities still hold.
    pub fn last_interior(&self) -> usize {
        self.dim - 2
    }
}

pub fn build_fock(dim: usize) -> Result<FockLadder> {
    if !(2..=MAX_FOCK_DIM).contains(&dim) {
        return Err(Error::DimensionOutOfRange {
            dim,
            min: 2,
            max: MAX_FOCK_DIM,
        });
    }
    let a = ComplexMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            c((j as f64).sqrt())
        } else {
            c(0.0)
        }
    });
    let a_dag = a.adjoint();
    let levels: Vec<f64> = (0..dim).map(|n| n as f64).collect();
    Ok(FockLadder {
        dim,
        a,
        a_dag,
        n_hat: diag(&levels),
    })
}

/// Largest deviation of `block` from `target` over the interior levels.
fn interior_residual(block: &ComplexMatrix, target: &ComplexMatrix, last: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..=last {
        for j in 0..=last {
            worst = worst.max((block[(i, j)] - target[(i, j)]).norm());
        }
    }
    worst
}

/// Table of `e^{λK(n)}`, all positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KTable {
    weights: Vec<f64>,
    epsilon: f64,
}

impl KTable {
    pub fn new(weights: Vec<f64>, epsilon: f64) -> Result<Self> {
        for (index, &value) in weights.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositive { index, value });
            }
        }
        Ok(Self { weights, epsilon })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `λK(n) = ln e^{λK(n)}`.
    pub fn exponents(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.ln()).collect()
    }

    /// The table as a diagonal deformation with `λ = 1` and `K(n) = ln w(n)`.
    pub fn deformation(&self) -> Result<DeformationOperator> {
        DeformationOperator::new(Kernel::Diagonal(self.exponents()), 1.0)
    }
}

/// `a e^{λK(n̂)} a† - a† e^{λK(n̂)} a` as a matrix product.
pub fn kcommutator_fock(ladder: &FockLadder, weights: &[f64]) -> Result<ComplexMatrix> {
    ensure_table(weights, ladder.dim)?;
    let w = diag(&weights[..ladder.dim]);
    Ok(ladder.a() * &w * ladder.a_dag() - ladder.a_dag() * &w * ladder.a())
}

/// Diagonal entry `n` of the deformed commutator from the shift rules:
/// `(e^{λK(n+1)} - e^{λK(n-1)}) n + e^{λK(n+1)}`.
///
/// At `n = 0` the `e^{λK(-1)}` term carries a factor `n = 0` and is not read.
pub fn kcommutator_closed_form(weights: &[f64], n: usize) -> f64 {
    let up = weights[n + 1];
    if n == 0 {
        return up;
    }
    (up - weights[n - 1]) * n as f64 + up
}

/// `e^{λK}` tables with `[a, a†]_K = 1` on the interior, from
/// `(n+1) e^{λK(n+1)} - n e^{λK(n-1)} = 1` seeded by `e^{λK(0)} = 1 + ε`.
///
/// The `n = 0` equation forces `e^{λK(1)} = 1`, so every odd entry is 1 and the
/// even entries carry the `ε` family.
pub fn solve_standard_commutation(epsilon: f64, dim: usize) -> Result<KTable> {
    if !(2..=MAX_FOCK_DIM).contains(&dim) {
        return Err(Error::DimensionOutOfRange {
            dim,
            min: 2,
            max: MAX_FOCK_DIM,
        });
    }
    let mut w = vec![0.0; dim];
    w[0] = 1.0 + epsilon;
    w[1] = 1.0;
    for n in 1..dim - 1 {
        w[n + 1] = (n as f64 * w[n - 1] + 1.0) / (n + 1) as f64;
    }
    KTable::new(w, epsilon)
}

/// Result of solving `H̃ e^{λK} = n̂ + ½` level by level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AltHamiltonianSolution {
    /// `e^{λK(n)} = (n + ½)/H̃(n)`; `None` on singular levels.
    pub weights: Vec<Option<f64>>,
    /// Levels with `|H̃(n)| < 1e-12`.
    pub singular_modes: Vec<usize>,
    /// `max |[H̃, a]_K + a|` and `|[H̃, a†]_K - a†|` over interior, nonsingular levels.
    pub motion_residual: f64,
}

impl AltHamiltonianSolution {
    /// The full table, failing if any level was singular.
    pub fn into_table(self) -> Result<KTable> {
        if !self.singular_modes.is_empty() {
            return Err(Error::SingularModes {
                modes: self.singular_modes,
            });
        }
        KTable::new(self.weights.into_iter().flatten().collect(), 0.0)
    }
}

/// Solves `H̃ e^{λK} = H` for diagonal `H̃` and verifies the deformed equations
/// of motion `[H̃, a]_K = [H, a] = -a` and `[H̃, a†]_K = a†`.
///
/// Levels where `H̃` vanishes are excluded and listed, never regularized.
pub fn solve_alternative_hamiltonian(
    ladder: &FockLadder,
    htilde: &[f64],
) -> Result<AltHamiltonianSolution> {
    let dim = ladder.dim;
    ensure_table(htilde, dim)?;
    let mut weights = Vec::with_capacity(dim);
    let mut singular_modes = Vec::new();
    for (n, &h) in htilde[..dim].iter().enumerate() {
        if h.abs() < ZERO_TOL {
            singular_modes.push(n);
            weights.push(None);
            continue;
        }
        let w = (n as f64 + 0.5) / h;
        if !(w > 0.0) {
            return Err(Error::NonPositive { index: n, value: w });
        }
        weights.push(Some(w));
    }

    let w = diag(&weights.iter().map(|w| w.unwrap_or(0.0)).collect::<Vec<_>>());
    let ht = diag(&htilde[..dim]);
    let a = ladder.a();
    let a_dag = ladder.a_dag();
    let lowering = &ht * &w * a - a * &w * &ht + a;
    let raising = &ht * &w * a_dag - a_dag * &w * &ht - a_dag;
    // entries (i, j) of diag·a·diag depend only on levels i and j
    let valid: Vec<usize> = (0..=ladder.last_interior())
        .filter(|n| weights[*n].is_some())
        .collect();
    let mut motion_residual: f64 = 0.0;
    for &i in &valid {
        for &j in &valid {
            motion_residual = motion_residual
                .max(lowering[(i, j)].norm())
                .max(raising[(i, j)].norm());
        }
    }
    Ok(AltHamiltonianSolution {
        weights,
        singular_modes,
        motion_residual,
    })
}

/// Contiguous range of levels closed under `A` and `A†`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantBlock {
    pub start: usize,
    /// Exclusive.
    pub end: usize,
    /// Largest matrix element of `A` or `A†` coupling the block to its complement.
    pub coupling: f64,
}

impl InvariantBlock {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// `A = a f(n̂)`, `A† = f(n̂) a†` and the tables derived from `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct FOscillator {
    f: Vec<f64>,
    ladder: FockLadder,
    a: ComplexMatrix,
    a_dag: ComplexMatrix,
}

impl FOscillator {
    pub fn dim(&self) -> usize {
        self.ladder.dim
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn ladder(&self) -> &FockLadder {
        &self.ladder
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn a_dag(&self) -> &ComplexMatrix {
        &self.a_dag
    }

    /// `φ(n) = (n+1) f²(n+1) - n f²(n)` for interior levels.
    pub fn phi(&self) -> Vec<f64> {
        (0..self.dim() - 1)
            .map(|n| {
                let (f0, f1) = (self.f[n], self.f[n + 1]);
                (n + 1) as f64 * f1 * f1 - n as f64 * f0 * f0
            })
            .collect()
    }

    /// `F(n) = f²(n) n`.
    pub fn big_f(&self) -> Vec<f64> {
        self.f
            .iter()
            .enumerate()
            .map(|(n, f)| f * f * n as f64)
            .collect()
    }

    /// `A A† - A†A`.
    pub fn commutator(&self) -> ComplexMatrix {
        &self.a * &self.a_dag - &self.a_dag * &self.a
    }

    /// `max |[A, A†]_nn - φ(n)|` over interior levels, plus the off-diagonal
    /// interior entries which must vanish.
    pub fn phi_residual(&self) -> f64 {
        let comm = self.commutator();
        let phi = self.phi();
        let mut target = ComplexMatrix::zeros(self.dim(), self.dim());
        for (n, p) in phi.iter().enumerate() {
            target[(n, n)] = c(*p);
        }
        interior_residual(&comm, &target, self.ladder.last_interior())
    }

    /// Blocks cut at every level `m ≥ 1` where `f(m)` vanishes.
    pub fn invariant_blocks(&self) -> Vec<InvariantBlock> {
        let dim = self.dim();
        let mut cuts: Vec<usize> = (1..dim).filter(|&m| self.f[m].abs() < ZERO_TOL).collect();
        cuts.push(dim);
        let mut blocks = Vec::with_capacity(cuts.len());
        let mut start = 0;
        for end in cuts {
            let inside = |i: usize| (start..end).contains(&i);
            let mut coupling: f64 = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    if inside(i) != inside(j) {
                        coupling = coupling
                            .max(self.a[(i, j)].norm())
                            .max(self.a_dag[(i, j)].norm());
                    }
                }
            }
            blocks.push(InvariantBlock {
                start,
                end,
                coupling,
            });
            start = end;
        }
        blocks
    }

    /// `max |e^{iHt} A e^{-iHt} - e^{-it} A|` over the interior, `H = n̂ + ½`.
    pub fn motion_phase_residual(&self, t: f64) -> Result<f64> {
        let h = self.ladder.hamiltonian();
        let evolved = dynamics::evolve_heisenberg(&h, &self.a, t)?;
        let expected = &self.a * Complex64::from_polar(1.0, -t);
        Ok(interior_residual(
            &evolved,
            &expected,
            self.ladder.last_interior(),
        ))
    }
}

/// Builds the f-deformed pair. Zeros of `f` are legal and split the space into
/// invariant blocks.
pub fn build_f_oscillator(f: &[f64], dim: usize) -> Result<FOscillator> {
    let ladder = build_fock(dim)?;
    ensure_table(f, dim)?;
    let f = f[..dim].to_vec();
    let fd = diag(&f);
    let a = ladder.a() * &fd;
    let a_dag = &fd * ladder.a_dag();
    Ok(FOscillator {
        f,
        ladder,
        a,
        a_dag,
    })
}

/// `f(n) = exp{½[λK(n-1) + λK(n)]} = √(e^{λK(n-1)} e^{λK(n)})` for `n ≥ 1`;
/// `f(0) = 1`, which no matrix element of `a f(n̂)` reads.
pub fn f_from_k(weights: &[f64], dim: usize) -> Result<Vec<f64>> {
    ensure_table(weights, dim)?;
    if let Some(index) = weights[..dim].iter().position(|w| !(*w > 0.0)) {
        return Err(Error::NonPositive {
            index,
            value: weights[index],
        });
    }
    Ok((0..dim)
        .map(|n| {
            if n == 0 {
                1.0
            } else {
                (weights[n - 1] * weights[n]).sqrt()
            }
        })
        .collect())
}

/// `max |F_K(a) - a f(n̂)|` with `f` from [`f_from_k`].
pub fn fk_consistency_residual(ladder: &FockLadder, table: &KTable) -> Result<f64> {
    let dim = ladder.dim;
    ensure_table(table.weights(), dim)?;
    let truncated = KTable::new(table.weights()[..dim].to_vec(), table.epsilon())?;
    let fk_a = kdeform::fk_map(ladder.a(), &truncated.deformation()?)?;
    let f = f_from_k(table.weights(), dim)?;
    let a_f = ladder.a() * diag(&f);
    Ok(numerics::max_abs_diff(&fk_a, &a_f))
}

/// The two scalar products attached to an f-oscillator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualProductReport {
    /// `⟨N|N⟩_{h₁}` for `|N⟩ = (A†)ⁿ/√(n!) |0⟩`.
    pub h1_norms: Vec<f64>,
    /// Largest off-diagonal `|⟨N|M⟩_{h₁}|`.
    pub h1_offdiagonal: f64,
    /// `max |⟨M|N⟩_{h₂} - δ|`, confirming `{|N⟩}` is `h₂`-orthonormal.
    pub h2_orthonormality: f64,
    /// `max |⟨M|[Ã, A†]|N⟩_{h₂} - δ|` over interior levels, where `Ã` is the
    /// `h₂`-adjoint of `A†`.
    pub h2_commutator_residual: f64,
}

/// Builds `{|N⟩}`, its `h₁`-Gram matrix, the product `h₂` that makes it
/// orthonormal, and checks the commutation relation in `h₂`.
///
/// In `h₂` the adjoint of `A†` is `Ã = G₂⁻¹ A G₂`, not `A`; with that adjoint
/// the pair obeys the standard relation on the interior.
pub fn dual_scalar_products(fosc: &FOscillator) -> Result<DualProductReport> {
    let dim = fosc.dim();
    if let Some(index) = (1..dim).find(|&k| fosc.f[k].abs() < ZERO_TOL) {
        return Err(Error::ZeroOfF { index });
    }

    let mut basis = ComplexMatrix::zeros(dim, dim);
    let mut column = ComplexVector::zeros(dim);
    column[0] = c(1.0);
    let mut factorial = 1.0;
    for n in 0..dim {
        if n > 0 {
            column = fosc.a_dag() * column;
            factorial *= n as f64;
        }
        basis.set_column(n, &(&column / c(factorial.sqrt())));
    }

    let h1_gram = basis.adjoint() * &basis;
    let h1_norms: Vec<f64> = (0..dim).map(|n| h1_gram[(n, n)].re).collect();
    let mut h1_offdiagonal: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                h1_offdiagonal = h1_offdiagonal.max(h1_gram[(i, j)].norm());
            }
        }
    }

    let g2 = numerics::solve_or_invert(&(&basis * basis.adjoint()))?;
    let h2_gram = basis.adjoint() * &g2 * &basis;
    let id = ComplexMatrix::identity(dim, dim);
    let h2_orthonormality = numerics::max_abs_diff(&h2_gram, &id);

    let g2_inv = numerics::solve_or_invert(&g2)?;
    let raise = fosc.a_dag();
    let lower = &g2_inv * raise.adjoint() * &g2;
    let comm = &lower * raise - raise * &lower;
    let in_h2 = basis.adjoint() * &g2 * comm * &basis;
    let h2_commutator_residual = interior_residual(&in_h2, &id, dim - 2);

    Ok(DualProductReport {
        h1_norms,
        h1_offdiagonal,
        h2_orthonormality,
        h2_commutator_residual,
    })
}

/// Named tables usable wherever a function of the Fock level is expected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedTable {
    Identity,
    /// Uses `sinh(λn)/sinh λ`.
    Sinh {
        lambda: f64,
    },
    /// Uses `1 + λn`.
    Affine {
        lambda: f64,
    },
}

impl NamedTable {
    pub fn parse(name: &str, lambda: Option<f64>) -> Result<Self> {
        let need = |name: &str| {
            lambda.ok_or_else(|| Error::Invalid(format!("table \"{name}\" needs a lambda")))
        };
        match name {
            "identity" => Ok(NamedTable::Identity),
            "sinh" => {
                let lambda = need(name)?;
                if lambda == 0.0 {
                    return Err(Error::Invalid("table \"sinh\" needs lambda ≠ 0".into()));
                }
                Ok(NamedTable::Sinh { lambda })
            }
            "affine" => Ok(NamedTable::Affine {
                lambda: need(name)?,
            }),
            other => Err(Error::Invalid(format!(
                "unknown table \"{other}\" (expected identity, sinh or affine)"
            ))),
        }
    }

    /// `f(n)`: 1; `√(sinh(λn)/(n sinh λ))` so that `F(n) = sinh(λn)/sinh λ`;
    /// `√(1 + λn)`.
    pub fn f_values(&self, dim: usize) -> Vec<f64> {
        (0..dim)
            .map(|n| {
                let x = n as f64;
                match *self {
                    NamedTable::Identity => 1.0,
                    NamedTable::Sinh { lambda } => {
                        if n == 0 {
                            (lambda / lambda.sinh()).sqrt()
                        } else {
                            ((lambda * x).sinh() / (x * lambda.sinh())).sqrt()
                        }
                    }
                    NamedTable::Affine { lambda } => (1.0 + lambda * x).sqrt(),
                }
            })
            .collect()
    }

    /// `H̃(n)`: `n + ½`; `sinh(λn)/sinh λ`; `(n + ½)(1 + λn)`.
    pub fn htilde_values(&self, dim: usize) -> Vec<f64> {
        (0..dim)
            .map(|n| {
                let x = n as f64;
                match *self {
                    NamedTable::Identity => x + 0.5,
                    NamedTable::Sinh { lambda } => (lambda * x).sinh() / lambda.sinh(),
                    NamedTable::Affine { lambda } => (x + 0.5) * (1.0 + lambda * x),
                }
            })
            .collect()
    }
}
