//! A single potential on the whole sphere would make the flux vanish.

use cech_monopole::integrate::contradiction_demo;

fn main() -> cech_monopole::Result<()> {
    for g in [0.5, 1.0, 2.0] {
        let r = contradiction_demo(g)?;
        println!(
            "G = {g}: ∮_C A + ∮_(−C) A = {:.3e} but ∫F = {:.12}; obstruction {:.12}",
            r.boundary_sum, r.flux, r.obstruction
        );
    }
    Ok(())
}
