//! f-deformed ladder operators, their commutator, and the two scalar products.

use altquant::oscillator::{build_f_oscillator, dual_scalar_products, NamedTable};

fn main() -> altquant::error::Result<()> {
    let f = NamedTable::Affine { lambda: 0.2 }.f_values(10);
    let fosc = build_f_oscillator(&f, 10)?;
    println!("phi(n) = {:.3?}", fosc.phi());
    println!("|[A, A+] - phi| on interior = {:.2e}", fosc.phi_residual());
    println!(
        "phase residual at t = 1: {:.2e}",
        fosc.motion_phase_residual(1.0)?
    );

    let products = dual_scalar_products(&fosc)?;
    println!("h1 norms of |N>: {:.4?}", products.h1_norms);
    println!(
        "h2 commutator residual: {:.2e}",
        products.h2_commutator_residual
    );

    let mut cut = vec![1.0; 10];
    cut[3] = 0.0;
    let blocks = build_f_oscillator(&cut, 10)?.invariant_blocks();
    for b in blocks {
        println!("block {}..{} (coupling {:e})", b.start, b.end, b.coupling);
    }
    Ok(())
}
