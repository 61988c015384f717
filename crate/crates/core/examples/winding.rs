//! The transition function of the Wu-Yang cover winds 2qG times around the equatorial
//! annulus: the Chern number.

use cech_monopole::collation::{local_primitives, loop_transition, winding_number};
use cech_monopole::cover::CapCover;
use cech_monopole::forms::monopole_curvature;

fn main() -> cech_monopole::Result<()> {
    let cover = CapCover::wu_yang();
    for two_g in -3..=3 {
        let g = two_g as f64 / 2.0;
        let prims = local_primitives(&monopole_curvature(g)?, &cover)?;
        let lt = loop_transition(&prims, &cover, 0, 1, 1.0)?;
        println!(
            "G = {g:>4}: ∮ dg = {:>10.6} over {} samples, winding {}",
            lt.period,
            lt.values.len(),
            winding_number(&lt.values, 1.0)?
        );
    }
    Ok(())
}
