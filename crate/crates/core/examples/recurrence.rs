//! Deformations that leave the oscillator commutator untouched.

use altquant::oscillator::{build_fock, kcommutator_fock, solve_standard_commutation};

fn main() -> altquant::error::Result<()> {
    let ladder = build_fock(12)?;
    for epsilon in [0.0, 0.4, -0.5] {
        let table = solve_standard_commutation(epsilon, 12)?;
        let comm = kcommutator_fock(&ladder, table.weights())?;
        let diagonal: Vec<String> = (0..12).map(|n| format!("{:.3}", comm[(n, n)].re)).collect();
        println!("epsilon = {epsilon:+}");
        println!("  e^(lambda K) = {:.4?}", table.weights());
        println!("  [a, a+]_K    = [{}]", diagonal.join(", "));
    }
    Ok(())
}
