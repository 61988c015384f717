//! Flux of the monopole and Hopf curvatures, and Stokes' theorem on a cap.

use std::f64::consts::PI;

use cech_monopole::cover::CapPatch;
use cech_monopole::forms::{hopf_curvature, monopole_curvature, wu_yang_potentials};
use cech_monopole::geometry::Vec3;
use cech_monopole::integrate::{stokes_residual, surface_integral, Region};

fn main() -> cech_monopole::Result<()> {
    for g in [0.5, 1.0, 1.5] {
        let flux = surface_integral(&monopole_curvature(g)?, &Region::Sphere, 1e-10)?;
        println!(
            "G = {g}: ∫F = {:.12} (4πG = {:.12})",
            flux.value,
            4.0 * PI * g
        );
    }
    let hopf = surface_integral(&hopf_curvature(), &Region::Sphere, 1e-10)?.value;
    println!(
        "Hopf curvature: ∫F = {hopf:.12}, Chern number {}",
        (hopf / (2.0 * PI)).round()
    );

    let (north, _) = wu_yang_potentials(1.0)?;
    let cap = CapPatch::new(Vec3::new(0.3, 0.0, 1.0), 0.8)?;
    let r = stokes_residual(&north, &cap, 0)?;
    println!(
        "Stokes on a tilted cap: ∫dA = {:.12}, ∮A = {:.12}, residual {:.1e}",
        r.surface, r.boundary, r.residual
    );
    Ok(())
}
