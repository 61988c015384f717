//! η on the triple overlaps of the three-cap cover: integral multiples of 2π/q exactly
//! when 2qG is an integer.

use cech_monopole::collation::{quantize_with, QuantizeOptions};
use cech_monopole::cover::CapCover;
use cech_monopole::forms::monopole_curvature;

fn main() -> cech_monopole::Result<()> {
    let cover = CapCover::three_caps();
    for g in [0.5, 0.3, 1.0] {
        let qz = quantize_with(
            &monopole_curvature(g)?,
            &cover,
            1.0,
            1e-8,
            &QuantizeOptions::default(),
        )?;
        let r = &qz.report;
        println!(
            "G = {g}: verdict {:?}, Σε = {}, flux {:.12}",
            r.verdict, r.sum_epsilon, r.total_flux
        );
        for t in &r.triples {
            println!(
                "  {:?} component {}: raw η = {:.9}, gauge-fixed η = {:.9}, stddev {:.1e} over {} samples, ε = {}, residual {:.3}",
                t.simplex, t.component, t.raw_eta, t.eta, t.stddev, t.samples, t.epsilon, t.residual
            );
        }
    }
    Ok(())
}
