//! The phase of a charged particle around the equator does not depend on where it
//! switches patches, provided 2qG is an integer.

use std::f64::consts::PI;

use cech_monopole::collation::{local_primitives, transition_functions};
use cech_monopole::cover::CapCover;
use cech_monopole::forms::monopole_curvature;
use cech_monopole::geometry::SpherePoint;
use cech_monopole::nerve::nerve;
use cech_monopole::worldline::{evaluate_action, switch_point_sweep, Worldline};

fn main() -> cech_monopole::Result<()> {
    let cover = CapCover::wu_yang();
    let n = nerve(&cover, 1, 200_000, 0)?;
    // start where the transition function is normalized; its branch cut is opposite
    let samples = n.samples(1, 0);
    let phi0 = SpherePoint::from_vec(&n.point(samples.ids[samples.roots[0]])).phi;
    let w = Worldline::latitude_loop(0.5 * PI, phi0, &[0, 1], 17)?;
    for g in [0.5, 1.0, 0.3] {
        let prims = local_primitives(&monopole_curvature(g)?, &cover)?;
        let t = transition_functions(&prims, &n)?;
        let a = evaluate_action(&w, &prims, &t, &n, 1.0)?;
        let back = evaluate_action(&w.reversed(), &prims, &t, &n, 1.0)?;
        let sweep = switch_point_sweep(&w, &prims, &t, &n, 1.0, 100, 0)?;
        println!(
            "G = {g}: I = {:.9}, phase = ({:.9}, {:.9}), reversed I = {:.9}, max phase deviation over 100 placements {:.2e}",
            a.action, a.phase[0], a.phase[1], back.action, sweep.max_phase_deviation
        );
    }
    Ok(())
}
