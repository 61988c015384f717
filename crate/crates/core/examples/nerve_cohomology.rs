//! Čech cohomology of nerves: only the tetrahedral cover is fine enough to see H²(S²).

use cech_monopole::cochain::coboundary_matrix;
use cech_monopole::cohomology::cohomology;
use cech_monopole::cover::{CapCover, CoefficientTag};
use cech_monopole::nerve::nerve;
use cech_monopole::snf::{smith_normal_form, IntMatrix};

fn main() -> cech_monopole::Result<()> {
    for (name, cover) in [
        ("two polar caps", CapCover::wu_yang()),
        ("three equatorial caps", CapCover::three_caps()),
        ("tetrahedral caps", CapCover::tetrahedral(1.3)?),
    ] {
        let n = nerve(&cover, cover.len() - 1, 100_000, 0)?;
        let r = cohomology(&n, CoefficientTag::Integer)?;
        println!("{name}: betti {:?}, torsion {:?}", r.betti, r.torsion);
        for w in &r.warnings {
            println!("  warning: {w}");
        }
        if n.dimension() >= 1 {
            println!("  δ₀ = {:?}", coboundary_matrix(&n, 0)?.to_rows());
        }
    }
    let m = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
    let snf = smith_normal_form(&m);
    println!(
        "Smith form of [[2,4],[6,8]]: factors {:?}, rank {}",
        snf.invariant_factors, snf.rank
    );
    Ok(())
}
