//! The canonical structure triple and a Hermitean form built from it.

use altquant::numerics::RealVector;
use altquant::structures::{
    assemble_triple, poisson_bracket_quadratics, standard_triple, ComplexStructure, PoissonTensor,
    QuadraticObservable,
};

fn main() -> altquant::error::Result<()> {
    let triple = standard_triple(2)?;
    println!("C =\n{}", triple.poisson().matrix());
    println!("J =\n{}", triple.complex().matrix());
    println!("s = C J =\n{}", triple.metric());
    println!("axiom residual = {:e}", triple.axiom_residual());

    let x = RealVector::from_vec(vec![1.0, 0.0, 0.5, 0.0]);
    let y = RealVector::from_vec(vec![0.5, 0.0, 1.0, 0.0]);
    println!("h(x, y) = {}", triple.hermitean_form(&x, &y));

    // a complex structure that does not fit the canonical Poisson tensor
    let mut j = ComplexStructure::canonical(2)?.matrix().clone();
    j.swap_columns(0, 1);
    j.swap_rows(0, 1);
    match ComplexStructure::new(j).and_then(|j| assemble_triple(PoissonTensor::canonical(2)?, j)) {
        Ok(_) => println!("swapped J is compatible"),
        Err(e) => println!("swapped J rejected: {e}"),
    }

    // {q1² + p1², q1 q2}
    let f = QuadraticObservable::from_fn(4, |v| v[0] * v[0] + v[2] * v[2])?;
    let g = QuadraticObservable::from_fn(4, |v| v[0] * v[1])?;
    let bracket = poisson_bracket_quadratics(&f, &g, triple.poisson())?;
    println!("{{f, g}} matrix =\n{}", bracket.matrix());
    Ok(())
}
