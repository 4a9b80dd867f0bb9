//! Which structures a flow preserves, and how well the propagator keeps them.

use altquant::dynamics::{check_invariance, flow_preservation, DynamicsMatrix, INVARIANCE_TOL};
use altquant::realization::realify_hamiltonian;
use altquant::sampling;
use altquant::structures::standard_triple;

fn main() -> altquant::error::Result<()> {
    let triple = standard_triple(3)?;
    let oscillator = DynamicsMatrix::oscillator(1.3, 3)?;
    let random = realify_hamiltonian(&sampling::hermitean(&mut sampling::rng(3), 3))?;
    for (name, a) in [("oscillator", oscillator), ("random Hermitean", random)] {
        let report = check_invariance(&a, &triple, INVARIANCE_TOL)?;
        println!("{name}: {}", serde_json::to_string(&report).unwrap());
        for t in [0.1, 1.0, 10.0] {
            let (ds, dw) = flow_preservation(&a, &triple, t)?;
            println!("  t = {t:>4}: |U^T s U - s| = {ds:.2e}  |U^T Omega U - Omega| = {dw:.2e}");
        }
    }
    Ok(())
}
