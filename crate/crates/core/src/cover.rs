//! Open covers of the sphere by geodesic caps.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_between, fibonacci_lattice, lattice_spacing, SpherePoint, Vec3};
use crate::sampling::{components, knn_graph, PointIndex, KNN, LINK_FACTOR};

/// Covers are limited by the width of the membership bitmask.
pub const MAX_PATCHES: usize = 64;

/// Coefficient presheaf attached to a cover.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefficientTag {
    #[default]
    #[serde(rename = "Z")]
    Integer,
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "F")]
    FunctionSamples,
}

/// Open geodesic cap `{x : angle(center, x) < radius}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapPatch {
    center: Vec3,
    radius: f64,
}

impl CapPatch {
    pub fn new(center: Vec3, radius: f64) -> Result<Self> {
        let n = center.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::invalid("cap center must be a nonzero finite vector"));
        }
        if !(radius > 0.0 && radius < PI) {
            return Err(Error::invalid(format!(
                "cap radius {radius} outside (0, π)"
            )));
        }
        Ok(Self {
            center: center / n,
            radius,
        })
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn distance(&self, x: &Vec3) -> f64 {
        angle_between(&self.center, x)
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        self.distance(x) < self.radius
    }

    /// Signed distance from `x` to the cap boundary, positive inside.
    pub fn depth(&self, x: &Vec3) -> f64 {
        self.radius - self.distance(x)
    }

    /// Analytic intersection test for two open caps.
    pub fn meets(&self, other: &CapPatch) -> bool {
        angle_between(&self.center, &other.center) < self.radius + other.radius
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapCover {
    patches: Vec<CapPatch>,
    coefficient_tag: CoefficientTag,
}

/// Builds a cover from `(center, radius)` pairs, normalizing centers and keeping order.
pub fn build_cover(spec: &[(Vec3, f64)], coefficient_tag: CoefficientTag) -> Result<CapCover> {
    if spec.len() < 2 {
        return Err(Error::invalid("a cover of S² needs at least two patches"));
    }
    if spec.len() > MAX_PATCHES {
        return Err(Error::invalid(format!(
            "at most {MAX_PATCHES} patches are supported"
        )));
    }
    let patches = spec
        .iter()
        .map(|(c, r)| CapPatch::new(*c, *r))
        .collect::<Result<Vec<_>>>()?;
    Ok(CapCover {
        patches,
        coefficient_tag,
    })
}

impl CapCover {
    pub fn patches(&self) -> &[CapPatch] {
        &self.patches
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn coefficient_tag(&self) -> CoefficientTag {
        self.coefficient_tag
    }

    pub fn with_coefficients(mut self, tag: CoefficientTag) -> Self {
        self.coefficient_tag = tag;
        self
    }

    /// Two polar caps of radius 0.6π.
    pub fn wu_yang() -> Self {
        Self::polar(0.6 * PI).expect("valid polar cover")
    }

    pub fn polar(radius: f64) -> Result<Self> {
        build_cover(
            &[(Vec3::z(), radius), (-Vec3::z(), radius)],
            CoefficientTag::Integer,
        )
    }

    /// `n` caps centred on the equator at equally spaced longitudes.
    pub fn equatorial(n: usize, radius: f64) -> Result<Self> {
        let spec: Vec<_> = (0..n)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / n as f64;
                (Vec3::new(phi.cos(), phi.sin(), 0.0), radius)
            })
            .collect();
        build_cover(&spec, CoefficientTag::Integer)
    }

    /// Three equatorial caps of radius 0.55π.
    pub fn three_caps() -> Self {
        Self::equatorial(3, 0.55 * PI).expect("valid equatorial cover")
    }

    /// Four caps at the vertices of a regular tetrahedron.
    pub fn tetrahedral(radius: f64) -> Result<Self> {
        let s = 1.0 / 3f64.sqrt();
        build_cover(
            &[
                (Vec3::new(s, s, s), radius),
                (Vec3::new(s, -s, -s), radius),
                (Vec3::new(-s, s, -s), radius),
                (Vec3::new(-s, -s, s), radius),
            ],
            CoefficientTag::Integer,
        )
    }

    /// Bitmask of the patches containing `x`.
    pub fn mask(&self, x: &Vec3) -> u64 {
        self.patches
            .iter()
            .enumerate()
            .filter(|(_, p)| p.contains(x))
            .fold(0u64, |m, (i, _)| m | (1 << i))
    }

    pub fn contains_all(&self, simplex: &[usize], x: &Vec3) -> bool {
        simplex.iter().all(|&i| self.patches[i].contains(x))
    }

    /// Smallest depth of `x` over the patches of `simplex`.
    pub fn depth_in(&self, simplex: &[usize], x: &Vec3) -> f64 {
        simplex
            .iter()
            .map(|&i| self.patches[i].depth(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// `true` when the overlap of patches `a` and `b` is an annulus: the complementary
    /// closed caps around the antipodes are disjoint.
    pub fn annular_overlap(&self, a: usize, b: usize) -> bool {
        let (p, q) = (&self.patches[a], &self.patches[b]);
        let d = angle_between(&p.center, &q.center);
        p.radius + q.radius > 2.0 * PI - d
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: CoverSpec = serde_json::from_str(s)?;
        spec.into_cover()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_spec(&self) -> CoverSpec {
        CoverSpec {
            patches: self
                .patches
                .iter()
                .map(|p| PatchSpec {
                    center: [p.center.x, p.center.y, p.center.z],
                    radius: p.radius,
                })
                .collect(),
            coefficients: self.coefficient_tag,
        }
    }
}

/// On-disk cover description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSpec {
    pub patches: Vec<PatchSpec>,
    #[serde(default)]
    pub coefficients: CoefficientTag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    pub center: [f64; 3],
    pub radius: f64,
}

impl CoverSpec {
    pub fn into_cover(self) -> Result<CapCover> {
        let spec: Vec<_> = self
            .patches
            .iter()
            .map(|p| (Vec3::new(p.center[0], p.center[1], p.center[2]), p.radius))
            .collect();
        build_cover(&spec, self.coefficients)
    }
}

/// Component count of one sampled overlap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapComponents {
    pub simplex: Vec<usize>,
    pub samples: usize,
    pub components: usize,
}

/// Coverage statistics. Connectedness of overlaps is a necessary condition for a good
/// cover only; contractibility is not checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub sample_count: usize,
    pub uncovered_fraction: f64,
    pub overlap_component_counts: Vec<OverlapComponents>,
    pub note: String,
}

impl CoverageReport {
    pub fn components_of(&self, simplex: &[usize]) -> Option<usize> {
        self.overlap_component_counts
            .iter()
            .find(|o| o.simplex == simplex)
            .map(|o| o.components)
    }

    pub fn all_overlaps_connected(&self) -> bool {
        self.overlap_component_counts
            .iter()
            .all(|o| o.components <= 1)
    }
}

pub(crate) struct SampledOverlaps {
    pub points: Vec<Vec3>,
    pub masks: Vec<u64>,
    /// Sorted sample ids per simplex, for every nonempty sampled overlap up to the
    /// requested dimension.
    pub simplices: BTreeMap<Vec<usize>, Vec<u32>>,
}

pub(crate) fn sample_overlaps(
    cover: &CapCover,
    sample_count: usize,
    seed: u64,
    max_dim: usize,
) -> SampledOverlaps {
    let points = fibonacci_lattice(sample_count, seed);
    let masks: Vec<u64> = points.par_iter().map(|x| cover.mask(x)).collect();
    let mut by_mask: HashMap<u64, Vec<u32>> = HashMap::new();
    for (i, &m) in masks.iter().enumerate() {
        if m != 0 {
            by_mask.entry(m).or_default().push(i as u32);
        }
    }
    let mut simplices: BTreeMap<Vec<usize>, Vec<u32>> = BTreeMap::new();
    for (mask, ids) in &by_mask {
        let members: Vec<usize> = (0..cover.len()).filter(|i| mask & (1 << i) != 0).collect();
        for subset in subsets_up_to(&members, max_dim + 1) {
            simplices.entry(subset).or_default().extend_from_slice(ids);
        }
    }
    for ids in simplices.values_mut() {
        ids.sort_unstable();
    }
    SampledOverlaps {
        points,
        masks,
        simplices,
    }
}

/// Nonempty increasing subsets of `members` with at most `max_len` elements.
pub(crate) fn subsets_up_to(members: &[usize], max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        m: &[usize],
        start: usize,
        max_len: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for i in start..m.len() {
            cur.push(m[i]);
            out.push(cur.clone());
            if cur.len() < max_len {
                rec(m, i + 1, max_len, cur, out);
            }
            cur.pop();
        }
    }
    rec(members, 0, max_len, &mut current, &mut out);
    out
}

/// Labels the connected components of a sampled region.
pub(crate) fn label_components(
    points: &[Vec3],
    ids: &[u32],
    sample_count: usize,
) -> (Vec<u32>, usize) {
    if ids.is_empty() {
        return (Vec::new(), 0);
    }
    let cutoff = LINK_FACTOR * lattice_spacing(sample_count);
    let local: Vec<Vec3> = ids.iter().map(|&i| points[i as usize]).collect();
    let index = PointIndex::new(local, cutoff);
    let adj = knn_graph(&index, KNN, cutoff);
    components(&adj)
}

/// Estimates coverage and overlap connectivity on a Fibonacci lattice.
pub fn validate_coverage(
    cover: &CapCover,
    sample_count: usize,
    seed: u64,
) -> Result<CoverageReport> {
    if sample_count < 1000 {
        return Err(Error::invalid(
            "validate_coverage needs at least 1000 samples",
        ));
    }
    let max_dim = (cover.len() - 1).min(3);
    let sampled = sample_overlaps(cover, sample_count, seed, max_dim);
    let uncovered = sampled.masks.iter().filter(|&&m| m == 0).count();
    let overlap_component_counts = sampled
        .simplices
        .iter()
        .filter(|(s, _)| s.len() >= 2)
        .map(|(s, ids)| OverlapComponents {
            simplex: s.clone(),
            samples: ids.len(),
            components: label_components(&sampled.points, ids, sample_count).1,
        })
        .collect();
    Ok(CoverageReport {
        sample_count,
        uncovered_fraction: uncovered as f64 / sample_count as f64,
        overlap_component_counts,
        note: "component counts are estimated from a k-nearest-neighbour graph of lattice \
               samples; connectedness is necessary but not sufficient for a good cover"
            .to_string(),
    })
}

/// `(theta, phi)` of a unit vector, as used in JSON output.
pub(crate) fn angles(x: &Vec3) -> [f64; 2] {
    let p = SpherePoint::from_vec(x);
    [p.theta, p.phi]
}
