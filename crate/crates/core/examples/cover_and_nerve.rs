//! Builds the three standard covers and prints coverage and the simplices of each nerve.

use cech_monopole::cover::{validate_coverage, CapCover};
use cech_monopole::nerve::nerve;

fn main() -> cech_monopole::Result<()> {
    for (name, cover) in [
        ("two polar caps", CapCover::wu_yang()),
        ("three equatorial caps", CapCover::three_caps()),
        ("tetrahedral caps", CapCover::tetrahedral(1.3)?),
    ] {
        let coverage = validate_coverage(&cover, 200_000, 0)?;
        let n = nerve(&cover, cover.len() - 1, 200_000, 0)?;
        println!("{name}: uncovered fraction {}", coverage.uncovered_fraction);
        for p in 0..=n.dimension() {
            for (i, s) in n.simplices(p).iter().enumerate() {
                let samples = n.samples(p, i);
                let w = n.witness_point(p, i);
                println!(
                    "  {s:?}: {} samples in {} component(s), witness (θ, φ) = ({:.3}, {:.3})",
                    samples.len(),
                    samples.components,
                    w.theta,
                    w.phi
                );
            }
        }
        println!("  Euler characteristic {}", n.euler_characteristic());
    }
    Ok(())
}
