//! A single two-level amplitude as a classical oscillator.

use altquant::dynamics::evolve_schrodinger;
use altquant::numerics::ComplexMatrix;
use altquant::realization::{self, RealPoint};
use num_complex::Complex64;

fn main() -> altquant::error::Result<()> {
    let omega = 1.0;
    let h = ComplexMatrix::from_element(1, 1, Complex64::new(omega, 0.0));
    let a = realization::realify_hamiltonian(&h)?;
    println!("A = {}", a.matrix());

    let x0 = RealPoint::from_qp(&[1.0], &[0.0])?;
    for t in [0.0, 0.5, std::f64::consts::FRAC_PI_2, 3.0] {
        let x = evolve_schrodinger(&a, &x0, t)?;
        let (q, p) = (x.q()[0], x.p()[0]);
        println!(
            "t = {t:.4}  q = {q:+.6}  p = {p:+.6}  energy = {:.12}",
            realization::one_level_energy(omega, q, p)
        );
    }
    Ok(())
}
