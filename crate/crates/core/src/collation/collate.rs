//! From transition functions back to a global curvature through a partition of unity.

use std::sync::Arc;

use crate::cochain::{Cochain, CochainValues};
use crate::error::{Error, Result};
use crate::forms::{exterior_derivative, CovectorFn, Domain, Expr, PatchForm};
use crate::integrate::{surface_integral, Region};
use crate::nerve::Nerve;
use crate::quadrature::Quad;

use super::partition::PartitionOfUnity;
use super::transition::eta_cocycle;

/// Accuracy to which the collated pieces must agree on overlaps.
pub const GLOBALITY_TOLERANCE: f64 = 1e-6;
/// Default tolerance of the collated flux integral.
pub const COLLATED_FLUX_TOLERANCE: f64 = 1e-7;

const GLOBALITY_SAMPLES_PER_EDGE: usize = 400;

/// Potentials `A'_α = Σ_γ p_γ dg_αγ` on each patch.
pub fn collated_potentials(
    g: &Cochain,
    partition: &PartitionOfUnity,
    nerve: &Nerve,
) -> Result<Vec<PatchForm>> {
    if g.degree() != 1 {
        return Err(Error::invalid("collation takes a degree-1 cochain"));
    }
    if partition.len() != nerve.cover().len() {
        return Err(Error::invalid(
            "partition and nerve come from different covers",
        ));
    }
    let differentials: Vec<Option<CovectorFn>> = match g.values() {
        // constant transition functions have vanishing differential
        CochainValues::Integer(_) | CochainValues::Real(_) => vec![None; nerve.count(1)],
        CochainValues::Samples(fs) => fs
            .iter()
            .zip(nerve.simplices(1))
            .map(|(f, s)| {
                f.differential.clone().map(Some).ok_or_else(|| {
                    Error::invalid(format!(
                        "transition function on {s:?} carries no differential"
                    ))
                })
            })
            .collect::<Result<_>>()?,
    };
    let potentials = (0..nerve.cover().len())
        .map(|alpha| {
            let terms: Vec<(usize, f64, CovectorFn)> = nerve
                .simplices(1)
                .iter()
                .zip(&differentials)
                .filter_map(|(s, d)| {
                    let d = d.clone()?;
                    match (s[0] == alpha, s[1] == alpha) {
                        (true, _) => Some((s[1], 1.0, d)),
                        (_, true) => Some((s[0], -1.0, d)),
                        _ => None,
                    }
                })
                .collect();
            let partition = partition.clone();
            let a: CovectorFn = Arc::new(move |x| {
                terms
                    .iter()
                    .fold(crate::geometry::Vec3::zeros(), |acc, (gamma, sign, d)| {
                        let p = partition.weight(*gamma, x);
                        if p > 0.0 {
                            acc + d(x) * (sign * p)
                        } else {
                            acc
                        }
                    })
            });
            PatchForm::single(
                Domain::Cap(nerve.cover().patches()[alpha]),
                Expr::Covector { a, d: None },
            )
        })
        .collect();
    Ok(potentials)
}

/// `F' = dA'_α`, glued over the cover and checked to be global on overlap samples.
pub fn collate_to_form(
    g: &Cochain,
    partition: &PartitionOfUnity,
    nerve: &Nerve,
) -> Result<PatchForm> {
    if nerve.dimension() >= 2 {
        eta_cocycle(g, nerve)?;
    }
    let curvatures = collated_potentials(g, partition, nerve)?
        .iter()
        .map(exterior_derivative)
        .collect::<Result<Vec<_>>>()?;
    for (e, s) in nerve.simplices(1).iter().enumerate() {
        let ids = &nerve.samples(1, e).ids;
        let stride = (ids.len() / GLOBALITY_SAMPLES_PER_EDGE).max(1);
        for &id in ids.iter().step_by(stride) {
            let x = nerve.point(id);
            let a = curvatures[s[0]].density_at(&x)?;
            let b = curvatures[s[1]].density_at(&x)?;
            let gap = (a - b).abs();
            if gap.is_nan() || gap > GLOBALITY_TOLERANCE {
                return Err(Error::CocycleInconsistency(format!(
                    "collated curvatures on {s:?} differ by {:.3e} at {:?}",
                    (a - b).abs(),
                    crate::geometry::SpherePoint::from_vec(&x)
                )));
            }
        }
    }
    let pieces = curvatures
        .into_iter()
        .flat_map(|f| f.pieces().to_vec())
        .collect();
    PatchForm::with_tolerance(pieces, GLOBALITY_TOLERANCE)
}

/// Total flux of a collated curvature.
pub fn collated_flux(form: &PatchForm, tol: f64) -> Result<Quad> {
    surface_integral(form, &Region::Sphere, tol)
}
