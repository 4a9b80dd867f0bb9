//! Solving H~ e^(lambda K) = n + 1/2 for the sinh Hamiltonian.

use altquant::oscillator::{build_fock, solve_alternative_hamiltonian, NamedTable};

fn main() -> altquant::error::Result<()> {
    let ladder = build_fock(16)?;
    let htilde = NamedTable::Sinh { lambda: 0.5 }.htilde_values(16);
    let solution = solve_alternative_hamiltonian(&ladder, &htilde)?;
    println!("singular levels: {:?}", solution.singular_modes);
    for (n, w) in solution.weights.iter().enumerate() {
        match w {
            Some(w) => println!(
                "n = {n:>2}  H~ = {:>10.4}  e^(lambda K) = {w:.6}",
                htilde[n]
            ),
            None => println!("n = {n:>2}  H~ = {:>10.4}  excluded", htilde[n]),
        }
    }
    println!(
        "equation of motion residual: {:.2e}",
        solution.motion_residual
    );
    Ok(())
}
