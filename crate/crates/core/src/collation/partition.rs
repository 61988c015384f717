//! Smooth partitions of unity subordinate to a cap cover.

use serde::Serialize;

use crate::cover::{CapCover, CapPatch};
use crate::error::{Error, Result};
use crate::geometry::{fibonacci_lattice, lattice_spacing, Vec3};

pub const DEFAULT_PARTITION_SAMPLES: usize = 100_000;

/// Bumps `f_α = exp(−1/(1 − (d_α/ρ'_α)²))` normalized to sum to one.
///
/// Each bump is supported on a cap of radius `ρ'_α` slightly smaller than the patch
/// radius, so the support is a compact subset of the open patch. The shrink is chosen
/// from the least-covered lattice sample so that the shrunken caps still cover.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionOfUnity {
    #[serde(skip)]
    patches: Vec<CapPatch>,
    support: Vec<f64>,
    shrink: f64,
}

pub fn build_partition(cover: &CapCover) -> Result<PartitionOfUnity> {
    build_partition_with(cover, DEFAULT_PARTITION_SAMPLES, 0)
}

pub fn build_partition_with(
    cover: &CapCover,
    sample_count: usize,
    seed: u64,
) -> Result<PartitionOfUnity> {
    if sample_count < 1000 {
        return Err(Error::invalid(
            "a partition of unity needs at least 1000 samples",
        ));
    }
    let points = fibonacci_lattice(sample_count, seed);
    let depth = points
        .iter()
        .map(|x| {
            cover
                .patches()
                .iter()
                .map(|p| p.depth(x))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    let min_radius = cover
        .patches()
        .iter()
        .map(|p| p.radius())
        .fold(f64::INFINITY, f64::min);
    let shrink = (0.05 * min_radius).min(0.5 * (depth - 1.5 * lattice_spacing(sample_count)));
    if shrink.is_nan() || shrink <= 0.0 {
        return Err(Error::Coverage(format!(
            "the cover is too thin for compactly supported bumps (least sampled depth {depth:.3e})"
        )));
    }
    let partition = PartitionOfUnity {
        patches: cover.patches().to_vec(),
        support: cover
            .patches()
            .iter()
            .map(|p| p.radius() - shrink)
            .collect(),
        shrink,
    };
    if let Some(x) = points.iter().find(|x| partition.weights(x).is_none()) {
        return Err(Error::Coverage(format!(
            "no bump is positive at {:?}",
            crate::geometry::SpherePoint::from_vec(x)
        )));
    }
    Ok(partition)
}

impl PartitionOfUnity {
    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    /// Radius of the closed cap outside of which `p_α` vanishes.
    pub fn support_radius(&self, alpha: usize) -> f64 {
        self.support[alpha]
    }

    pub fn shrink(&self) -> f64 {
        self.shrink
    }

    pub fn patch(&self, alpha: usize) -> &CapPatch {
        &self.patches[alpha]
    }

    /// `1/(1 − r²)` for `r = d/ρ' < 1`; the bump is `exp` of minus this.
    fn exponent(&self, alpha: usize, x: &Vec3) -> Option<f64> {
        let r = self.patches[alpha].distance(x) / self.support[alpha];
        (r < 1.0).then(|| 1.0 / (1.0 - r * r))
    }

    /// Unnormalized bump `f_α(x)`.
    pub fn bump(&self, alpha: usize, x: &Vec3) -> f64 {
        self.exponent(alpha, x).map_or(0.0, |u| (-u).exp())
    }

    /// All `p_α(x)`, or `None` where no bump is positive.
    pub fn weights(&self, x: &Vec3) -> Option<Vec<f64>> {
        let u: Vec<Option<f64>> = (0..self.len()).map(|a| self.exponent(a, x)).collect();
        let min = u.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        if !min.is_finite() {
            return None;
        }
        // normalize relative to the largest bump so deep exponents cannot underflow
        let e: Vec<f64> = u
            .iter()
            .map(|v| v.map_or(0.0, |v| (min - v).exp()))
            .collect();
        let total: f64 = e.iter().sum();
        Some(e.into_iter().map(|v| v / total).collect())
    }

    /// `p_α(x)`, zero where no bump is positive.
    pub fn weight(&self, alpha: usize, x: &Vec3) -> f64 {
        self.exponent(alpha, x)
            .and_then(|_| self.weights(x))
            .map_or(0.0, |w| w[alpha])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polar_partition_at_the_poles() {
        let p = build_partition(&CapCover::wu_yang()).unwrap();
        assert_eq!(p.weights(&Vec3::z()).unwrap(), vec![1.0, 0.0]);
        assert_eq!(p.weights(&-Vec3::z()).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn properties_on_the_lattice() {
        for cover in [CapCover::wu_yang(), CapCover::three_caps()] {
            let p = build_partition(&cover).unwrap();
            for x in fibonacci_lattice(20_000, 3) {
                let w = p.weights(&x).unwrap();
                assert!(w.iter().all(|&v| v >= 0.0));
                assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                for (a, patch) in cover.patches().iter().enumerate() {
                    if patch.distance(&x) >= p.support_radius(a) {
                        assert_eq!(w[a], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn vanishes_on_cap_boundaries() {
        let cover = CapCover::three_caps();
        let p = build_partition(&cover).unwrap();
        let patch = cover.patches()[0];
        let (e1, e2) = crate::geometry::tangent_frame(&patch.center());
        for k in 0..64 {
            let psi = 2.0 * PI * k as f64 / 64.0;
            let (s, c) = patch.radius().sin_cos();
            let x = patch.center() * c + (e1 * psi.cos() + e2 * psi.sin()) * s;
            assert_eq!(p.weight(0, &x), 0.0);
            assert!(p.support_radius(0) < patch.radius());
        }
    }

    #[test]
    fn uncovered_sphere_is_rejected() {
        let cover = CapCover::polar(0.4 * PI).unwrap();
        assert!(matches!(build_partition(&cover), Err(Error::Coverage(_))));
    }
}
