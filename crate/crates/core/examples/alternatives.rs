//! Alternative Hermitean structures for two oscillators at frequencies 1 and 2,
//! transported along powers of A.

use altquant::alternatives::{classify_powers, symmetry_powers, transport};
use altquant::dynamics::decompose_hamiltonian;
use altquant::numerics::ComplexMatrix;
use altquant::realization::realify_hamiltonian;
use altquant::structures::standard_triple;
use num_complex::Complex64;

fn main() -> altquant::error::Result<()> {
    let h = ComplexMatrix::from_fn(2, 2, |i, j| {
        Complex64::new(if i == j { (i + 1) as f64 } else { 0.0 }, 0.0)
    });
    let a = realify_hamiltonian(&h)?;
    let triple = standard_triple(2)?;
    let h = decompose_hamiltonian(&a, triple.poisson())?;

    for class in classify_powers(&a, triple.poisson(), 3)? {
        println!(
            "A^{}: decomposable = {}, unitary = {}",
            class.power, class.decomposable, class.unitary
        );
    }

    for t in symmetry_powers(&a, 3)?.symmetries.iter().skip(1) {
        let alt = transport(t, &a, &triple, &h)?;
        println!(
            "{:?}: unitary = {}, new structure = {}, residuals = {:?}",
            t.origin(),
            alt.unitary,
            alt.genuinely_alternative,
            alt.residuals
        );
        println!(
            "  s_T =\n{}  H_T =\n{}",
            alt.triple.metric(),
            alt.hamiltonian
        );
    }
    Ok(())
}
