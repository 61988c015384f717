//! Transition functions `g_αβ` with `dg_αβ = A_α − A_β`, and the cocycle `η = δg`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cochain::{coboundary, Cochain, CochainValues, SampledFunction};
use crate::error::{Error, Result};
use crate::forms::{CovectorFn, Domain, PatchForm, FD_STEP};
use crate::geometry::{lattice_spacing, Arc as GeoArc, Vec3};
use crate::nerve::Nerve;
use crate::quadrature::fixed_line;
use crate::sampling::{bfs_forest, knn_graph, PointIndex, KNN, LINK_FACTOR};

/// Largest spread of `η` over one connected triple overlap accepted as constant.
pub const COCYCLE_THRESHOLD: f64 = 1e-6;

/// `g_αβ` on every edge of the nerve, integrated from `A_α − A_β` along a breadth-first
/// spanning tree of the overlap's sample graph. Each connected component of the overlap
/// is rooted at its deepest sample, where `g = 0`.
pub fn transition_functions(primitives: &[PatchForm], nerve: &Nerve) -> Result<Cochain> {
    if primitives.len() != nerve.cover().len() {
        return Err(Error::invalid(format!(
            "{} primitives for a cover of {} patches",
            primitives.len(),
            nerve.cover().len()
        )));
    }
    if primitives.iter().any(|p| p.degree() != 1) {
        return Err(Error::invalid("primitives must be 1-forms"));
    }
    let values = nerve
        .simplices(1)
        .par_iter()
        .enumerate()
        .map(|(i, s)| edge_function(primitives, nerve, i, s))
        .collect::<Result<Vec<_>>>()?;
    Cochain::new(nerve, 1, CochainValues::Samples(values))
}

/// How far past a patch boundary the local potentials are still evaluated. The
/// expressions are smooth there, and finite-difference stencils centred just inside an
/// overlap need it.
const BOUNDARY_SLACK: f64 = 10.0 * FD_STEP;

fn covector_near(form: &PatchForm, x: &Vec3) -> Option<Vec3> {
    form.pieces()
        .iter()
        .find(|p| match p.domain {
            Domain::Sphere => true,
            Domain::Cap(c) => c.distance(x) < c.radius() + BOUNDARY_SLACK,
        })
        .and_then(|p| p.covector(x))
}

/// `A_α − A_β` as a covector field; NaN away from the overlap.
pub fn potential_difference(a: &PatchForm, b: &PatchForm) -> CovectorFn {
    let (a, b) = (a.clone(), b.clone());
    Arc::new(
        move |x: &Vec3| match (covector_near(&a, x), covector_near(&b, x)) {
            (Some(u), Some(v)) => u - v,
            _ => Vec3::repeat(f64::NAN),
        },
    )
}

fn edge_function(
    primitives: &[PatchForm],
    nerve: &Nerve,
    i: usize,
    s: &[usize],
) -> Result<SampledFunction> {
    let diff = potential_difference(&primitives[s[0]], &primitives[s[1]]);
    let samples = nerve.samples(1, i);
    if samples.is_empty() {
        return Ok(SampledFunction::new(Vec::new(), Some(diff)));
    }
    let cutoff = LINK_FACTOR * lattice_spacing(nerve.sample_count());
    let points: Vec<Vec3> = samples.ids.iter().map(|&id| nerve.point(id)).collect();
    let index = PointIndex::new(points.clone(), cutoff);
    let adj = knn_graph(&index, KNN, cutoff);
    let cover = nerve.cover();
    let (order, parent) = bfs_forest(&adj, &samples.roots, |a, b| {
        cover.contains_all(s, &GeoArc::new(points[a], points[b]).point(0.5))
    });
    if order.len() < points.len() {
        return Err(Error::PathConstruction {
            edge: s.to_vec(),
            reason: format!(
                "{} of {} overlap samples cannot be reached inside the overlap",
                points.len() - order.len(),
                points.len()
            ),
        });
    }
    let mut values = vec![0.0; points.len()];
    for &j in &order {
        if let Some(p) = parent[j] {
            let arc = GeoArc::new(points[p], points[j]);
            values[j] = values[p] + fixed_line(|t| diff(&arc.point(t)).dot(&arc.velocity(t)));
        }
    }
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::PathConstruction {
            edge: s.to_vec(),
            reason: format!(
                "potential difference undefined near sample {}",
                samples.ids[k]
            ),
        });
    }
    Ok(SampledFunction::new(values, Some(diff)))
}

/// `η` on one connected component of a triple overlap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaEntry {
    pub simplex: Vec<usize>,
    pub component: usize,
    pub mean: f64,
    pub stddev: f64,
    pub samples: usize,
    /// Lattice index of the deepest sample of the component.
    pub root: u32,
}

#[derive(Clone, Debug)]
pub struct EtaCocycle {
    /// One entry per connected component of every triple overlap, in nerve order.
    pub entries: Vec<EtaEntry>,
    /// `η` as a real 2-cochain when every triple overlap is connected.
    pub cochain: Option<Cochain>,
    /// `max |δη|` over quadruple-overlap samples, when the nerve has 3-simplices.
    pub delta_eta_max: Option<f64>,
}

impl EtaCocycle {
    pub fn means(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.mean).collect()
    }
}

/// `η_αβγ = g_αβ + g_βγ + g_γα` at every triple-overlap sample, summarized per connected
/// component. A spread above [`COCYCLE_THRESHOLD`] means `g` is not a cocycle there.
pub fn eta_cocycle(g: &Cochain, nerve: &Nerve) -> Result<EtaCocycle> {
    if g.degree() != 1 {
        return Err(Error::invalid("η is formed from a degree-1 cochain"));
    }
    if nerve.dimension() < 2 {
        return Err(Error::invalid("the nerve has no triple overlaps"));
    }
    let eta = coboundary(g, nerve)?;
    let mut entries = Vec::new();
    for (i, s) in nerve.simplices(2).iter().enumerate() {
        let samples = nerve.samples(2, i);
        let per_sample: Vec<f64> = match eta.values() {
            CochainValues::Integer(v) => vec![v[i] as f64; samples.len()],
            CochainValues::Real(v) => vec![v[i]; samples.len()],
            CochainValues::Samples(f) => f[i].values.clone(),
        };
        for c in 0..samples.components {
            let vals: Vec<f64> = per_sample
                .iter()
                .zip(&samples.labels)
                .filter(|(_, &l)| l as usize == c)
                .map(|(v, _)| *v)
                .collect();
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let stddev = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            if stddev.is_nan() || stddev > COCYCLE_THRESHOLD {
                return Err(Error::NonCocycle {
                    simplex: s.clone(),
                    stddev,
                    threshold: COCYCLE_THRESHOLD,
                });
            }
            entries.push(EtaEntry {
                simplex: s.clone(),
                component: c,
                mean,
                stddev,
                samples: vals.len(),
                root: samples.ids[samples.roots[c]],
            });
        }
    }
    let connected = (0..nerve.count(2)).all(|i| nerve.samples(2, i).components == 1);
    let cochain = if connected {
        Some(Cochain::new(
            nerve,
            2,
            CochainValues::Real(entries.iter().map(|e| e.mean).collect()),
        )?)
    } else {
        None
    };
    let delta_eta_max = if nerve.dimension() >= 3 {
        let d = coboundary(&eta, nerve)?;
        Some(match d.values() {
            CochainValues::Integer(v) => v.iter().map(|x| x.abs() as f64).fold(0.0, f64::max),
            CochainValues::Real(v) => v.iter().map(|x| x.abs()).fold(0.0, f64::max),
            CochainValues::Samples(f) => f
                .iter()
                .flat_map(|s| s.values.iter().map(|x| x.abs()))
                .fold(0.0, f64::max),
        })
    } else {
        None
    };
    Ok(EtaCocycle {
        entries,
        cochain,
        delta_eta_max,
    })
}
