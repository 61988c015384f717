//! The zig-zag between global closed 2-forms and Čech 2-cocycles.
//!
//! Downward: a global curvature `F` gives local primitives `A_α`, transition functions
//! `g_αβ` with `dg_αβ = A_α − A_β`, and the constants `η = δg` on triple overlaps, whose
//! integrality after multiplying by `q/2π` is the quantization condition. Upward: a
//! partition of unity turns transition functions back into a global curvature with the
//! same flux.

mod collate;
mod partition;
mod primitives;
mod surface;
mod transition;
mod winding;

pub use collate::{
    collate_to_form, collated_flux, collated_potentials, COLLATED_FLUX_TOLERANCE,
    GLOBALITY_TOLERANCE,
};
pub use partition::{
    build_partition, build_partition_with, PartitionOfUnity, DEFAULT_PARTITION_SAMPLES,
};
pub use primitives::{homotopy_primitive, local_primitives};
pub use surface::{refined_surface, GaugeFix, RefinedEdge, RefinedSurface, RefinedTriangle};
pub use transition::{
    eta_cocycle, potential_difference, transition_functions, EtaCocycle, EtaEntry,
    COCYCLE_THRESHOLD,
};
pub use winding::{annular_loop, loop_transition, winding_number, LoopTransition};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cochain::Cochain;
use crate::cover::CapCover;
use crate::error::{Error, Result};
use crate::forms::PatchForm;
use crate::integrate::{surface_integral, Region};
use crate::nerve::{nerve, Nerve};

/// Lattice size used for overlap samples during quantization.
pub const DEFAULT_QUANTIZE_SAMPLES: usize = 200_000;
pub const DEFAULT_FLUX_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// `η` and its integer part on one connected triple-overlap component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleReport {
    pub simplex: Vec<usize>,
    pub component: usize,
    /// Sign of the component in the fundamental cycle of the refined nerve.
    pub orientation: i8,
    /// `η` with all transition functions normalized at their base points.
    pub raw_eta: f64,
    /// `η` after moving base points to bring it nearest to `2π/q · ℤ`.
    pub eta: f64,
    pub stddev: f64,
    pub samples: usize,
    pub epsilon: i64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizationReport {
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    pub q: f64,
    pub tolerance: f64,
    pub triples: Vec<TripleReport>,
    /// Winding of `e^{iqg}` around an annular overlap, for covers without triples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winding: Option<i64>,
    /// Flux seen by the Čech data: `Σ orientation·η`, or the period of `g` on an annulus.
    pub cech_flux: f64,
    /// Flux `∫ F` by quadrature.
    pub total_flux: f64,
    pub total_flux_error: f64,
    /// `Σ orientation·ε`.
    pub sum_epsilon: i64,
    pub max_residual: f64,
    pub verdict: Verdict,
}

/// Sampling parameters of the quantization pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantizeOptions {
    pub sample_count: usize,
    pub seed: u64,
    pub flux_tolerance: f64,
}

impl Default for QuantizeOptions {
    fn default() -> Self {
        Self {
            sample_count: DEFAULT_QUANTIZE_SAMPLES,
            seed: 0,
            flux_tolerance: DEFAULT_FLUX_TOLERANCE,
        }
    }
}

/// Everything the quantization pipeline builds, for reuse downstream.
#[derive(Clone, Debug)]
pub struct Quantization {
    pub report: QuantizationReport,
    pub nerve: Nerve,
    pub primitives: Vec<PatchForm>,
    /// Transition functions, gauge-fixed when the cover has triple overlaps.
    pub transitions: Cochain,
    pub eta: Option<EtaCocycle>,
    pub surface: Option<RefinedSurface>,
    pub loop_transition: Option<LoopTransition>,
}

/// Checks `q·η/2π ∈ ℤ` for the curvature `f` on `cover`.
pub fn quantize(f: &PatchForm, cover: &CapCover, q: f64, tol: f64) -> Result<QuantizationReport> {
    quantize_with(f, cover, q, tol, &QuantizeOptions::default()).map(|r| r.report)
}

pub fn quantize_with(
    f: &PatchForm,
    cover: &CapCover,
    q: f64,
    tol: f64,
    options: &QuantizeOptions,
) -> Result<Quantization> {
    if !(q != 0.0 && q.is_finite()) {
        return Err(Error::invalid("the charge q must be finite and nonzero"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("the tolerance must be positive"));
    }
    let primitives = local_primitives(f, cover)?;
    let nerve = nerve(cover, 2, options.sample_count, options.seed)?;
    let flux = surface_integral(f, &Region::Sphere, options.flux_tolerance)?;
    let g = transition_functions(&primitives, &nerve)?;
    let unit = 2.0 * PI / q;

    if nerve.dimension() < 2 {
        return quantize_annulus(f, cover, q, tol, nerve, primitives, g, flux);
    }

    let eta = eta_cocycle(&g, &nerve)?;
    let surface = refined_surface(&nerve)?;
    let fix = surface.balanced_gauge(&eta.means(), q)?;
    let transitions = surface.shift(&g, &nerve, &fix.edge_shifts)?;
    let triples: Vec<TripleReport> = eta
        .entries
        .iter()
        .zip(&surface.triangles)
        .zip(&fix.eta)
        .map(|((e, t), &fixed)| {
            let x = fixed / unit;
            TripleReport {
                simplex: e.simplex.clone(),
                component: e.component,
                orientation: t.weight,
                raw_eta: e.mean,
                eta: fixed,
                stddev: e.stddev,
                samples: e.samples,
                epsilon: x.round() as i64,
                residual: (x - x.round()).abs(),
            }
        })
        .collect();
    let sum_epsilon = triples
        .iter()
        .map(|t| t.orientation as i64 * t.epsilon)
        .sum();
    let max_residual = triples.iter().map(|t| t.residual).fold(0.0, f64::max);
    let report = QuantizationReport {
        g: f.constant(),
        q,
        tolerance: tol,
        triples,
        winding: None,
        cech_flux: fix.class,
        total_flux: flux.value,
        total_flux_error: flux.error,
        sum_epsilon,
        max_residual,
        verdict: verdict(max_residual, flux.value, sum_epsilon, unit, tol),
    };
    Ok(Quantization {
        report,
        nerve,
        primitives,
        transitions,
        eta: Some(eta),
        surface: Some(surface),
        loop_transition: None,
    })
}

fn verdict(max_residual: f64, flux: f64, sum_epsilon: i64, unit: f64, tol: f64) -> Verdict {
    if max_residual < tol && (flux - unit * sum_epsilon as f64).abs() < tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

#[allow(clippy::too_many_arguments)]
fn quantize_annulus(
    f: &PatchForm,
    cover: &CapCover,
    q: f64,
    tol: f64,
    nerve: Nerve,
    primitives: Vec<PatchForm>,
    g: Cochain,
    flux: crate::quadrature::Quad,
) -> Result<Quantization> {
    let [a, b] = match nerve.simplices(1) {
        [s] if cover.len() == 2 && cover.annular_overlap(s[0], s[1]) => [s[0], s[1]],
        _ => {
            return Err(Error::invalid(
                "the cover has no triple overlaps and is not two patches meeting in an annulus",
            ))
        }
    };
    let lt = loop_transition(&primitives, cover, a, b, q)?;
    let n = winding_number(&lt.values, q)?;
    let unit = 2.0 * PI / q;
    let residual = (lt.period / unit - n as f64).abs();
    let report = QuantizationReport {
        g: f.constant(),
        q,
        tolerance: tol,
        triples: Vec::new(),
        winding: Some(n),
        cech_flux: lt.period,
        total_flux: flux.value,
        total_flux_error: flux.error,
        sum_epsilon: n,
        max_residual: residual,
        verdict: verdict(residual, flux.value, n, unit, tol),
    };
    Ok(Quantization {
        report,
        nerve,
        primitives,
        transitions: g,
        eta: None,
        surface: None,
        loop_transition: Some(lt),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::monopole_curvature;

    fn run(g: f64, q: f64, cover: &CapCover) -> QuantizationReport {
        quantize(&monopole_curvature(g).unwrap(), cover, q, 1e-8).unwrap()
    }

    #[test]
    fn three_caps_half_passes() {
        let r = run(0.5, 1.0, &CapCover::three_caps());
        assert_eq!(r.sum_epsilon, 1);
        assert!(r.max_residual < 1e-8, "{r:?}");
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((r.cech_flux - 2.0 * PI).abs() < 1e-8, "{}", r.cech_flux);
    }

    #[test]
    fn three_caps_point_three_fails() {
        let r = run(0.3, 1.0, &CapCover::three_caps());
        assert_eq!(r.verdict, Verdict::Fail);
        assert!((r.max_residual - 0.2).abs() < 1e-8, "{}", r.max_residual);
    }

    #[test]
    fn zero_strength_passes_with_zero_epsilon() {
        let r = run(0.0, 3.0, &CapCover::three_caps());
        assert!(r.triples.iter().all(|t| t.epsilon == 0));
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn two_patch_cover_uses_winding() {
        let r = run(1.0, 1.0, &CapCover::wu_yang());
        assert_eq!(r.winding, Some(2));
        assert_eq!(r.verdict, Verdict::Pass);
        let r = run(0.3, 1.0, &CapCover::wu_yang());
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn bad_charge() {
        assert!(quantize(
            &monopole_curvature(0.5).unwrap(),
            &CapCover::three_caps(),
            0.0,
            1e-8
        )
        .is_err());
    }
}
