//! Recovering the Hamiltonian from a flow generator, and a generator that has none.

use altquant::dynamics::{decompose_hamiltonian, recomposition_residual, DynamicsMatrix};
use altquant::numerics::RealMatrix;
use altquant::sampling;
use altquant::structures::PoissonTensor;

fn main() -> altquant::error::Result<()> {
    let mut rng = sampling::rng(7);
    let c = PoissonTensor::canonical(2)?;
    let h = sampling::symmetric(&mut rng, 4);
    let a = DynamicsMatrix::new(&h * c.matrix())?;
    let found = decompose_hamiltonian(&a, &c)?;
    println!("H =\n{h}recovered =\n{found}");
    println!("|H C - A| = {:e}", recomposition_residual(&a, &found, &c));

    let damped = DynamicsMatrix::new(RealMatrix::from_row_slice(2, 2, &[-0.1, 1.0, -1.0, -0.1]))?;
    match decompose_hamiltonian(&damped, &PoissonTensor::canonical(1)?) {
        Ok(h) => println!("unexpected H = {h}"),
        Err(e) => println!("damped oscillator: {e}"),
    }
    Ok(())
}
