//! The nerve of a cap cover: one simplex per nonempty overlap.
//!
//! Pairwise overlaps are decided analytically from the cap geometry. Overlaps of three
//! or more caps are decided on a Fibonacci lattice, and every simplex keeps the lattice
//! samples that fall in its overlap together with a component labelling of those
//! samples. Cochains with function coefficients live on these sample sets.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cover::{angles, label_components, sample_overlaps, CapCover};
use crate::error::{Error, Result};
use crate::geometry::{Arc as GeoArc, SpherePoint, Vec3};

pub const DEFAULT_NERVE_SAMPLES: usize = 1_000_000;

/// Lattice samples of one overlap.
#[derive(Clone, Debug, Default)]
pub struct SimplexSamples {
    /// Sorted lattice indices inside the overlap.
    pub ids: Vec<u32>,
    /// Connected-component label of each sample.
    pub labels: Vec<u32>,
    pub components: usize,
    /// Deepest sample (position in `ids`) of each component.
    pub roots: Vec<usize>,
}

impl SimplexSamples {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Position of a lattice index in this sample set.
    pub fn position(&self, id: u32) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }
}

#[derive(Clone, Debug)]
pub struct Nerve {
    cover: CapCover,
    dimension: usize,
    simplices: Vec<Vec<Vec<usize>>>,
    witnesses: Vec<Vec<Vec3>>,
    samples: Vec<Vec<SimplexSamples>>,
    points: Arc<Vec<Vec3>>,
    sample_count: usize,
    seed: u64,
}

/// Builds the nerve of `cover` up to dimension `max_dim`.
pub fn nerve(cover: &CapCover, max_dim: usize, sample_count: usize, seed: u64) -> Result<Nerve> {
    if max_dim < 1 {
        return Err(Error::invalid("nerve needs max_dim ≥ 1"));
    }
    if sample_count < 1000 {
        return Err(Error::invalid("nerve needs at least 1000 samples"));
    }
    let max_dim = max_dim.min(cover.len() - 1);
    let sampled = sample_overlaps(cover, sample_count, seed, max_dim);
    let points = sampled.points;
    let n = cover.len();

    let mut simplices: Vec<Vec<Vec<usize>>> = vec![(0..n).map(|i| vec![i]).collect()];
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if cover.patches()[a].meets(&cover.patches()[b]) {
                edges.push(vec![a, b]);
            }
        }
    }
    for s in sampled.simplices.keys().filter(|s| s.len() == 2) {
        if edges.binary_search(s).is_err() {
            return Err(Error::Internal(format!(
                "sampled overlap {s:?} contradicts the analytic cap test"
            )));
        }
    }
    simplices.push(edges);
    for p in 2..=max_dim {
        let level: Vec<Vec<usize>> = sampled
            .simplices
            .keys()
            .filter(|s| s.len() == p + 1)
            .cloned()
            .collect();
        if level.is_empty() {
            break;
        }
        simplices.push(level);
    }

    let mut witnesses = Vec::with_capacity(simplices.len());
    let mut samples = Vec::with_capacity(simplices.len());
    for (p, level) in simplices.iter().enumerate() {
        let mut level_w = Vec::with_capacity(level.len());
        let mut level_s = Vec::with_capacity(level.len());
        for s in level {
            let ids = sampled.simplices.get(s).cloned().unwrap_or_default();
            let (labels, components) = if p == 0 {
                (vec![0; ids.len()], usize::from(!ids.is_empty()))
            } else {
                label_components(&points, &ids, sample_count)
            };
            let mut roots = vec![usize::MAX; components];
            let mut best = vec![f64::NEG_INFINITY; components];
            for (k, (&id, &lab)) in ids.iter().zip(&labels).enumerate() {
                let d = cover.depth_in(s, &points[id as usize]);
                if d > best[lab as usize] {
                    best[lab as usize] = d;
                    roots[lab as usize] = k;
                }
            }
            let witness = match best
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            {
                Some((c, _)) => points[ids[roots[c]] as usize],
                None => analytic_witness(cover, s)?,
            };
            level_w.push(witness);
            level_s.push(SimplexSamples {
                ids,
                labels,
                components,
                roots,
            });
        }
        witnesses.push(level_w);
        samples.push(level_s);
    }

    let nerve = Nerve {
        cover: cover.clone(),
        dimension: simplices.len() - 1,
        simplices,
        witnesses,
        samples,
        points: Arc::new(points),
        sample_count,
        seed,
    };
    nerve.check_closure()?;
    Ok(nerve)
}

/// A point of a pairwise overlap on the arc joining the two centers.
fn analytic_witness(cover: &CapCover, simplex: &[usize]) -> Result<Vec3> {
    if simplex.len() == 1 {
        return Ok(cover.patches()[simplex[0]].center());
    }
    if simplex.len() != 2 {
        return Err(Error::Internal(format!("no witness for {simplex:?}")));
    }
    let (p, q) = (&cover.patches()[simplex[0]], &cover.patches()[simplex[1]]);
    let arc = GeoArc::new(p.center(), q.center());
    let d = arc.length();
    let x = if d < 1e-12 {
        p.center()
    } else {
        let s = (d - q.radius() + p.radius()) / 2.0;
        arc.point((s / d).clamp(0.0, 1.0))
    };
    if cover.contains_all(simplex, &x) {
        Ok(x)
    } else {
        Err(Error::Internal(format!(
            "analytic witness for {simplex:?} misses the overlap"
        )))
    }
}

impl Nerve {
    pub fn cover(&self) -> &CapCover {
        &self.cover
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Increasing index tuples of the `p`-simplices, in lexicographic order.
    pub fn simplices(&self, p: usize) -> &[Vec<usize>] {
        self.simplices.get(p).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, p: usize) -> usize {
        self.simplices(p).len()
    }

    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let p = simplex.len().checked_sub(1)?;
        self.simplices(p)
            .binary_search_by(|s| s.as_slice().cmp(simplex))
            .ok()
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.index_of(simplex).is_some()
    }

    pub fn witness(&self, p: usize, i: usize) -> Vec3 {
        self.witnesses[p][i]
    }

    pub fn witness_point(&self, p: usize, i: usize) -> SpherePoint {
        SpherePoint::from_vec(&self.witnesses[p][i])
    }

    pub fn samples(&self, p: usize, i: usize) -> &SimplexSamples {
        &self.samples[p][i]
    }

    pub fn point(&self, id: u32) -> Vec3 {
        self.points[id as usize]
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    fn check_closure(&self) -> Result<()> {
        for p in 1..=self.dimension {
            for s in self.simplices(p) {
                for skip in 0..s.len() {
                    let face = face(s, skip);
                    if !self.contains(&face) {
                        return Err(Error::Internal(format!(
                            "face {face:?} of {s:?} missing from the nerve"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dimension)
            .map(|p| if p % 2 == 0 { 1 } else { -1 } * self.count(p) as i64)
            .sum()
    }

    pub fn to_json(&self) -> NerveJson {
        NerveJson {
            dimension: self.dimension,
            simplices: self.simplices.clone(),
            witnesses: self
                .witnesses
                .iter()
                .map(|l| l.iter().map(angles).collect())
                .collect(),
            components: self
                .samples
                .iter()
                .map(|l| l.iter().map(|s| s.components).collect())
                .collect(),
        }
    }
}

/// The face of `simplex` with vertex `skip` removed.
pub fn face(simplex: &[usize], skip: usize) -> Vec<usize> {
    simplex
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, v)| *v)
        .collect()
}

/// Nerve as written to disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NerveJson {
    pub dimension: usize,
    pub simplices: Vec<Vec<Vec<usize>>>,
    pub witnesses: Vec<Vec<[f64; 2]>>,
    pub components: Vec<Vec<usize>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unit_from_angles;

    fn all(n: &Nerve) -> Vec<Vec<usize>> {
        (0..=n.dimension())
            .flat_map(|p| n.simplices(p).to_vec())
            .collect()
    }

    #[test]
    fn wu_yang_nerve_is_an_edge() {
        let n = nerve(&CapCover::wu_yang(), 3, 50_000, 0).unwrap();
        assert_eq!(all(&n), vec![vec![0], vec![1], vec![0, 1]]);
        assert_eq!(n.dimension(), 1);
    }

    #[test]
    fn three_caps_give_a_full_triangle() {
        let n = nerve(&CapCover::three_caps(), 2, 200_000, 0).unwrap();
        assert_eq!(
            all(&n),
            vec![
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2]
            ]
        );
        assert_eq!(n.samples(2, 0).components, 2);
    }

    #[test]
    fn tetrahedral_nerve_is_boundary_of_tetrahedron() {
        let n = nerve(&CapCover::tetrahedral(1.25).unwrap(), 3, 1_000_000, 0).unwrap();
        assert_eq!(n.count(0), 4);
        assert_eq!(n.count(1), 6);
        assert_eq!(n.count(2), 4);
        assert_eq!(n.count(3), 0);
        assert_eq!(n.dimension(), 2);
        assert_eq!(n.euler_characteristic(), 2);
    }

    #[test]
    fn witnesses_lie_in_their_overlaps() {
        let cover = CapCover::tetrahedral(1.3).unwrap();
        let n = nerve(&cover, 3, 100_000, 4).unwrap();
        for p in 0..=n.dimension() {
            for (i, s) in n.simplices(p).iter().enumerate() {
                assert!(cover.contains_all(s, &n.witness(p, i)));
                let back = n.witness_point(p, i).unit();
                assert!(cover.contains_all(s, &back));
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let cover = CapCover::three_caps();
        let a = nerve(&cover, 2, 20_000, 9).unwrap().to_json();
        let b = nerve(&cover, 2, 20_000, 9).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn analytic_edge_without_samples_keeps_analytic_witness() {
        // two caps that barely touch: the lens is far thinner than the lattice spacing
        let a = unit_from_angles(0.0, 0.0);
        let b = unit_from_angles(1.0, 0.0);
        let cover = crate::cover::build_cover(
            &[(a, 0.5 + 1e-9), (b, 0.5 + 1e-9), (-a, 2.7)],
            Default::default(),
        )
        .unwrap();
        let n = nerve(&cover, 2, 2000, 0).unwrap();
        let i = n.index_of(&[0, 1]).unwrap();
        assert!(cover.contains_all(&[0, 1], &n.witness(1, i)));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(nerve(&CapCover::wu_yang(), 0, 10_000, 0).is_err());
        assert!(nerve(&CapCover::wu_yang(), 2, 10, 0).is_err());
    }
}
