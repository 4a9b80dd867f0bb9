//! One expectation value computed in the Schrödinger, Heisenberg and Ehrenfest pictures.

use altquant::dynamics::ehrenfest_check;
use altquant::numerics::EVOLUTION_TOL;
use altquant::sampling;

fn main() -> altquant::error::Result<()> {
    let mut rng = sampling::rng(11);
    let h = sampling::hermitean(&mut rng, 4);
    let b = sampling::hermitean(&mut rng, 4);
    let psi = sampling::state(&mut rng, 4);
    for t in [0.1, 1.0, 5.0] {
        let r = ehrenfest_check(&h, &b, &psi, t, EVOLUTION_TOL)?;
        println!(
            "t = {t:>3}: schrodinger {:+.12}  heisenberg {:+.12}  ehrenfest {:+.12}  residual {:.1e}",
            r.schrodinger, r.heisenberg, r.ehrenfest, r.residual
        );
    }
    Ok(())
}
