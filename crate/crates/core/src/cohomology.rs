//! Čech cohomology of a nerve with constant coefficients.
//!
//! Over ℤ the coboundary matrices are diagonalized by Smith normal form, which yields
//! both ranks and torsion; over ℝ only exact rational ranks are needed.

use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::cochain::coboundary_matrix;
use crate::cover::CoefficientTag;
use crate::error::{Error, Result};
use crate::nerve::Nerve;
use crate::snf::{rational_rank, smith_normal_form};

/// Betti numbers of the sphere, for flagging covers whose nerve does not see it.
pub const SPHERE_BETTI: [usize; 3] = [1, 0, 1];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiReport {
    /// `b₀ … b_d` for a nerve of dimension `d`.
    pub betti: Vec<usize>,
    /// Invariant factors `> 1` contributing torsion to each degree.
    pub torsion: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl BettiReport {
    pub fn is_torsion_free(&self) -> bool {
        self.torsion.iter().all(Vec::is_empty)
    }

    /// Whether the nerve has the cohomology of the 2-sphere.
    pub fn matches_sphere(&self) -> bool {
        self.betti == SPHERE_BETTI && self.is_torsion_free()
    }
}

/// `Ȟ^p` of the nerve for `p = 0 … dim`.
pub fn cohomology(nerve: &Nerve, coefficient_tag: CoefficientTag) -> Result<BettiReport> {
    let dim = nerve.dimension();
    let mut ranks = vec![0usize; dim + 1];
    let mut torsion = vec![Vec::new(); dim + 1];
    for p in 0..dim {
        let m = coboundary_matrix(nerve, p)?;
        ranks[p] = match coefficient_tag {
            CoefficientTag::Integer => {
                let snf = smith_normal_form(&m);
                torsion[p + 1] = snf
                    .invariant_factors
                    .iter()
                    .filter(|d| !d.is_one())
                    .map(|d| {
                        d.to_u64().ok_or_else(|| {
                            Error::Internal(format!("invariant factor {d} exceeds 64 bits"))
                        })
                    })
                    .collect::<Result<_>>()?;
                snf.rank
            }
            CoefficientTag::Real => rational_rank(&m),
            CoefficientTag::FunctionSamples => {
                return Err(Error::invalid(
                    "cohomology is computed with integer or real coefficients only",
                ))
            }
        };
    }
    let betti = (0..=dim)
        .map(|p| nerve.count(p) - ranks[p] - if p > 0 { ranks[p - 1] } else { 0 })
        .collect();
    let mut report = BettiReport {
        betti,
        torsion,
        warnings: Vec::new(),
    };
    if !report.matches_sphere() {
        report.warnings.push(format!(
            "nerve cohomology {:?} differs from H*(S²) = {:?}: the cover is too coarse to see the sphere",
            report.betti, SPHERE_BETTI
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::CapCover;
    use crate::nerve::nerve;

    #[test]
    fn wu_yang_nerve_is_contractible() {
        let n = nerve(&CapCover::wu_yang(), 2, 20_000, 0).unwrap();
        let r = cohomology(&n, CoefficientTag::Integer).unwrap();
        assert_eq!(r.betti, vec![1, 0]);
        assert!(r.is_torsion_free());
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn tetrahedral_nerve_sees_the_sphere() {
        let n = nerve(&CapCover::tetrahedral(1.3).unwrap(), 3, 100_000, 0).unwrap();
        for tag in [CoefficientTag::Integer, CoefficientTag::Real] {
            let r = cohomology(&n, tag).unwrap();
            assert_eq!(r.betti, vec![1, 0, 1]);
            assert!(r.matches_sphere());
            assert!(r.warnings.is_empty());
        }
    }

    #[test]
    fn three_caps_are_flagged() {
        let n = nerve(&CapCover::three_caps(), 2, 50_000, 0).unwrap();
        let r = cohomology(&n, CoefficientTag::Integer).unwrap();
        assert_eq!(r.betti, vec![1, 0, 0]);
        assert!(!r.warnings.is_empty());
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<BettiReport>(&json).unwrap(), r);
    }

    #[test]
    fn sampled_coefficients_are_rejected() {
        let n = nerve(&CapCover::wu_yang(), 1, 20_000, 0).unwrap();
        assert!(cohomology(&n, CoefficientTag::FunctionSamples).is_err());
    }

    #[test]
    fn euler_characteristic_matches() {
        let n = nerve(&CapCover::tetrahedral(1.3).unwrap(), 3, 100_000, 0).unwrap();
        let r = cohomology(&n, CoefficientTag::Real).unwrap();
        let chi: i64 = r
            .betti
            .iter()
            .enumerate()
            .map(|(p, &b)| if p % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum();
        assert_eq!(chi, n.euler_characteristic());
    }
}
