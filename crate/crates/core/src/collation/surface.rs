//! The nerve refined by overlap components, and gauge fixing of `η` on it.
//!
//! When a triple overlap is disconnected (as for three equatorial caps, whose triple
//! overlap is two polar islands) each component carries its own constant `η`. Treating
//! every `(simplex, component)` pair as a simplex of its own gives a complex whose
//! 2-skeleton, for the covers handled here, is a closed oriented surface. Its fundamental
//! cycle pairs with `η` to give the flux, and edge constants can move `η` freely within
//! that class.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::cochain::{Cochain, CochainValues, SampledFunction};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::nerve::{face, Nerve};

/// A connected component of a triple overlap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinedTriangle {
    pub simplex_index: usize,
    pub simplex: Vec<usize>,
    pub component: usize,
    /// Refined edge index and incidence sign `(−1)^k` of each face.
    pub faces: [(usize, i8); 3],
    /// Weight in the fundamental cycle.
    pub weight: i8,
}

/// A connected component of a pairwise overlap that bounds some refined triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RefinedEdge {
    pub simplex_index: usize,
    pub component: usize,
}

#[derive(Clone, Debug)]
pub struct RefinedSurface {
    pub triangles: Vec<RefinedTriangle>,
    pub edges: Vec<RefinedEdge>,
    /// Breadth-first order of the dual spanning tree, root first.
    order: Vec<usize>,
    /// Parent triangle and shared edge in the dual spanning tree.
    parent: Vec<Option<(usize, usize)>>,
}

/// Builds the refined 2-skeleton and orients it. Fails unless every refined edge bounds
/// exactly two refined triangles and the triangles form one orientable surface.
pub fn refined_surface(nerve: &Nerve) -> Result<RefinedSurface> {
    if nerve.count(2) == 0 {
        return Err(Error::invalid("the nerve has no triple overlaps"));
    }
    let mut edge_ids: BTreeMap<RefinedEdge, usize> = BTreeMap::new();
    let mut raw = Vec::new();
    for (i, s) in nerve.simplices(2).iter().enumerate() {
        let samples = nerve.samples(2, i);
        for c in 0..samples.components {
            let root = samples.ids[samples.roots[c]];
            let mut faces = [(0usize, 0i8); 3];
            for (k, slot) in faces.iter_mut().enumerate() {
                let f = face(s, k);
                let e = nerve.index_of(&f).expect("nerve is closed");
                let es = nerve.samples(1, e);
                let pos = es.position(root).ok_or_else(|| {
                    Error::Internal(format!("triple sample missing from edge {f:?}"))
                })?;
                let key = RefinedEdge {
                    simplex_index: e,
                    component: es.labels[pos] as usize,
                };
                let next = edge_ids.len();
                let id = *edge_ids.entry(key).or_insert(next);
                *slot = (id, if k % 2 == 0 { 1 } else { -1 });
            }
            raw.push((i, s.clone(), c, faces));
        }
    }
    let mut edges = vec![
        RefinedEdge {
            simplex_index: 0,
            component: 0
        };
        edge_ids.len()
    ];
    for (e, id) in &edge_ids {
        edges[*id] = *e;
    }
    let mut incident: Vec<Vec<(usize, i8)>> = vec![Vec::new(); edges.len()];
    for (t, (_, _, _, faces)) in raw.iter().enumerate() {
        for &(e, sign) in faces {
            incident[e].push((t, sign));
        }
    }
    if let Some(e) = incident.iter().position(|v| v.len() != 2) {
        let edge = &edges[e];
        return Err(Error::invalid(format!(
            "component {} of overlap {:?} bounds {} triple-overlap components; quantization \
             needs a cover whose refined nerve is a closed surface",
            edge.component,
            nerve.simplices(1)[edge.simplex_index],
            incident[e].len()
        )));
    }

    let n = raw.len();
    let mut weight = vec![0i8; n];
    let mut parent = vec![None; n];
    let mut order = Vec::with_capacity(n);
    weight[0] = 1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(t) = queue.pop_front() {
        order.push(t);
        for &(e, sign) in &raw[t].3 {
            let &(u, other_sign) = incident[e]
                .iter()
                .find(|(u, _)| *u != t)
                .unwrap_or(&incident[e][0]);
            if u == t {
                return Err(Error::invalid(
                    "a triple-overlap component is glued to itself",
                ));
            }
            // boundaries cancel along the shared edge
            let w = -weight[t] * sign * other_sign;
            if weight[u] == 0 {
                weight[u] = w;
                parent[u] = Some((t, e));
                queue.push_back(u);
            } else if weight[u] != w {
                return Err(Error::invalid("the refined nerve is not orientable"));
            }
        }
    }
    if order.len() < n {
        return Err(Error::invalid(
            "the refined nerve is not a connected surface",
        ));
    }

    // orient so that the root triangle is counterclockwise seen from outside
    let (i0, s0) = (raw[0].0, &raw[0].1);
    let samples = nerve.samples(2, i0);
    let x = nerve.point(samples.ids[samples.roots[raw[0].2]]);
    let c: Vec<Vec3> = s0
        .iter()
        .map(|&a| nerve.cover().patches()[a].center())
        .collect();
    let orientation = x.dot(&(c[1] - c[0]).cross(&(c[2] - c[0])));
    if orientation < 0.0 {
        weight.iter_mut().for_each(|w| *w = -*w);
    }

    let triangles = raw
        .into_iter()
        .zip(weight)
        .map(
            |((simplex_index, simplex, component, faces), weight)| RefinedTriangle {
                simplex_index,
                simplex,
                component,
                faces,
                weight,
            },
        )
        .collect();
    Ok(RefinedSurface {
        triangles,
        edges,
        order,
        parent,
    })
}

/// `η` moved within its class so that it is as close to `2π/q · ℤ` as the class allows.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeFix {
    /// Pairing of `η` with the fundamental cycle.
    pub class: f64,
    /// `round(q·class/2π)`.
    pub n: i64,
    /// `q·class/2π − n`, spread evenly over the triangles.
    pub fraction: f64,
    /// Gauge-fixed `η'` per refined triangle.
    pub eta: Vec<f64>,
    /// Constant added to `g` on each refined edge.
    pub edge_shifts: Vec<f64>,
}

impl RefinedSurface {
    pub fn weights(&self) -> Vec<i8> {
        self.triangles.iter().map(|t| t.weight).collect()
    }

    /// `Σ w_k η_k`.
    pub fn pair(&self, eta: &[f64]) -> f64 {
        self.triangles
            .iter()
            .zip(eta)
            .map(|(t, e)| t.weight as f64 * e)
            .sum()
    }

    /// Chooses `η'_k = (2π/q) w_k (ε_k + fraction/m)` with `ε` concentrated on the root
    /// triangle, and solves `δc = η' − η` for edge constants along the dual tree.
    pub fn balanced_gauge(&self, eta: &[f64], q: f64) -> Result<GaugeFix> {
        if eta.len() != self.triangles.len() {
            return Err(Error::invalid(
                "one η value is needed per triple-overlap component",
            ));
        }
        if !(q != 0.0 && q.is_finite()) {
            return Err(Error::invalid("the charge q must be finite and nonzero"));
        }
        let unit = 2.0 * std::f64::consts::PI / q;
        let class = self.pair(eta);
        let scaled = class / unit;
        let n = scaled.round();
        let fraction = scaled - n;
        let m = self.triangles.len() as f64;
        let target: Vec<f64> = self
            .triangles
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let eps = if k == self.order[0] { n } else { 0.0 };
                unit * t.weight as f64 * (eps + fraction / m)
            })
            .collect();
        let mut shifts = vec![0.0; self.edges.len()];
        for &t in self.order.iter().skip(1).rev() {
            let (_, tree_edge) = self.parent[t].expect("non-root triangles have parents");
            let mut rhs = target[t] - eta[t];
            let mut tree_sign = 0.0;
            for &(e, sign) in &self.triangles[t].faces {
                if e == tree_edge {
                    tree_sign = sign as f64;
                } else {
                    rhs -= sign as f64 * shifts[e];
                }
            }
            shifts[tree_edge] = rhs / tree_sign;
        }
        Ok(GaugeFix {
            class,
            n: n as i64,
            fraction,
            eta: target,
            edge_shifts: shifts,
        })
    }

    /// Adds the refined-edge constants to a sampled transition cochain.
    pub fn shift(&self, g: &Cochain, nerve: &Nerve, shifts: &[f64]) -> Result<Cochain> {
        let CochainValues::Samples(fs) = g.values() else {
            return Err(Error::invalid(
                "gauge shifts apply to sampled transition functions",
            ));
        };
        let mut by_edge: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (e, s) in self.edges.iter().zip(shifts) {
            by_edge.insert((e.simplex_index, e.component), *s);
        }
        let shifted = fs
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let labels = &nerve.samples(1, i).labels;
                let values = f
                    .values
                    .iter()
                    .zip(labels)
                    .map(|(v, &l)| v + by_edge.get(&(i, l as usize)).copied().unwrap_or(0.0))
                    .collect();
                SampledFunction::new(values, f.differential.clone())
            })
            .collect();
        Cochain::new(nerve, 1, CochainValues::Samples(shifted))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::CapCover;
    use crate::nerve::nerve;
    use std::f64::consts::PI;

    #[test]
    fn three_caps_refine_to_two_triangles() {
        let n = nerve(&CapCover::three_caps(), 2, 50_000, 0).unwrap();
        let s = refined_surface(&n).unwrap();
        assert_eq!(s.triangles.len(), 2);
        assert_eq!(s.edges.len(), 3);
        assert_eq!(s.weights().iter().map(|&w| w as i32).sum::<i32>(), 0);
        // the two polar components enter the cycle with opposite orientations
        assert!(s.triangles.iter().all(|t| t.weight.abs() == 1));
    }

    #[test]
    fn tetrahedral_surface() {
        let n = nerve(&CapCover::tetrahedral(1.3).unwrap(), 3, 200_000, 0).unwrap();
        let s = refined_surface(&n).unwrap();
        assert_eq!((s.triangles.len(), s.edges.len()), (4, 6));
        // boundary of the fundamental cycle vanishes
        let mut boundary = [0i32; 6];
        for t in &s.triangles {
            for &(e, sign) in &t.faces {
                boundary[e] += (t.weight * sign) as i32;
            }
        }
        assert!(boundary.iter().all(|&b| b == 0));
    }

    #[test]
    fn gauge_hits_target_and_keeps_class() {
        let n = nerve(&CapCover::tetrahedral(1.3).unwrap(), 3, 200_000, 0).unwrap();
        let s = refined_surface(&n).unwrap();
        let eta = [0.3, -1.7, 2.9, 0.4];
        let fix = s.balanced_gauge(&eta, 1.0).unwrap();
        // δc reproduces η' − η on every triangle
        for (k, t) in s.triangles.iter().enumerate() {
            let dc: f64 = t
                .faces
                .iter()
                .map(|&(e, sg)| sg as f64 * fix.edge_shifts[e])
                .sum();
            assert!((eta[k] + dc - fix.eta[k]).abs() < 1e-12);
        }
        assert!((s.pair(&fix.eta) - s.pair(&eta)).abs() < 1e-12);
        let residual = fix.fraction.abs() / 4.0;
        for e in &fix.eta {
            let x = e / (2.0 * PI);
            assert!(((x - x.round()).abs() - residual).abs() < 1e-12);
        }
    }

    #[test]
    fn two_patch_nerve_is_not_a_surface() {
        let n = nerve(&CapCover::wu_yang(), 2, 20_000, 0).unwrap();
        assert!(refined_surface(&n).is_err());
    }

    #[test]
    fn open_surface_is_rejected() {
        // three caps around the north pole only: the refined nerve is a single triangle
        let spec: Vec<_> = (0..3)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / 3.0;
                (crate::geometry::unit_from_angles(0.5, phi), 0.8)
            })
            .collect();
        let cover = crate::cover::build_cover(&spec, Default::default()).unwrap();
        let n = nerve(&cover, 2, 20_000, 0).unwrap();
        assert_eq!(n.count(2), 1);
        assert!(refined_surface(&n).is_err());
    }
}
