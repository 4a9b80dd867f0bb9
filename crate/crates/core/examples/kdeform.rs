//! The K-deformed product, its bracket, and the map F_K that straightens it.

use altquant::kdeform::{fk_map, kbracket, kproduct, kscalar, DeformationOperator, Kernel};
use altquant::numerics::{self, commutator};
use altquant::sampling;

fn main() -> altquant::error::Result<()> {
    let mut rng = sampling::rng(5);
    let d = DeformationOperator::new(Kernel::Full(sampling::hermitean(&mut rng, 3)), 0.5)?;
    let a = sampling::complex_matrix(&mut rng, 3);
    let b = sampling::complex_matrix(&mut rng, 3);

    let product = fk_map(&a, &d)? * fk_map(&b, &d)? - fk_map(&kproduct(&a, &b, &d)?, &d)?;
    let bracket =
        commutator(&fk_map(&a, &d)?, &fk_map(&b, &d)?) - fk_map(&kbracket(&a, &b, &d)?, &d)?;
    println!(
        "|F(A)F(B) - F(A.B)|       = {:.2e}",
        numerics::max_abs(&product)
    );
    println!(
        "|[F(A),F(B)] - F([A,B]_K)| = {:.2e}",
        numerics::max_abs(&bracket)
    );

    let psi = sampling::state(&mut rng, 3);
    println!("<psi|psi>   = {:.6}", psi.norm_squared());
    println!("<psi|psi>_K = {:.6}", kscalar(&psi, &psi, &d)?.re);
    Ok(())
}
