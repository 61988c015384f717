use std::f64::consts::PI;

use cech_monopole::collation::{
    build_partition, collate_to_form, collated_flux, quantize_with, QuantizeOptions, Verdict,
};
use cech_monopole::cover::CapCover;
use cech_monopole::forms::{hopf_curvature, monopole_curvature, PatchForm};
use cech_monopole::integrate::{stokes_residual, surface_integral, Region};

fn options(seed: u64) -> QuantizeOptions {
    QuantizeOptions {
        sample_count: 100_000,
        seed,
        ..Default::default()
    }
}

#[test]
fn tetrahedral_cover_quantizes_like_three_caps() {
    let cover = CapCover::tetrahedral(1.3).unwrap();
    let pass = quantize_with(
        &monopole_curvature(1.0).unwrap(),
        &cover,
        1.0,
        1e-8,
        &options(0),
    )
    .unwrap();
    assert_eq!(pass.report.verdict, Verdict::Pass);
    assert_eq!(pass.report.sum_epsilon, 2);
    assert!((pass.report.cech_flux - 4.0 * PI).abs() < 1e-8);
    let fail = quantize_with(
        &monopole_curvature(0.3).unwrap(),
        &cover,
        1.0,
        1e-8,
        &options(0),
    )
    .unwrap();
    assert_eq!(fail.report.verdict, Verdict::Fail);
    // the fractional class 0.6 is spread over four triangles
    assert!(
        (fail.report.max_residual - 0.1).abs() < 1e-8,
        "{}",
        fail.report.max_residual
    );
}

#[test]
fn hopf_curvature_has_chern_number_minus_one() {
    let r = quantize_with(
        &hopf_curvature(),
        &CapCover::three_caps(),
        1.0,
        1e-8,
        &options(0),
    )
    .unwrap();
    assert_eq!(r.report.sum_epsilon, -1);
    assert_eq!(r.report.verdict, Verdict::Pass);
}

#[test]
fn charge_scales_the_condition() {
    // qG = 1/2 with q = 2 means G = 1/4
    let r = quantize_with(
        &monopole_curvature(0.25).unwrap(),
        &CapCover::three_caps(),
        2.0,
        1e-8,
        &options(0),
    )
    .unwrap();
    assert_eq!(r.report.verdict, Verdict::Pass);
    assert_eq!(r.report.sum_epsilon, 1);
}

#[test]
fn base_points_do_not_change_the_gauge_fixed_cocycle() {
    let f = monopole_curvature(1.5).unwrap();
    let a = quantize_with(&f, &CapCover::three_caps(), 1.0, 1e-8, &options(0))
        .unwrap()
        .report;
    let b = quantize_with(&f, &CapCover::three_caps(), 1.0, 1e-8, &options(99))
        .unwrap()
        .report;
    assert_eq!(a.sum_epsilon, b.sum_epsilon);
    for (x, y) in a.triples.iter().zip(&b.triples) {
        assert_eq!(x.epsilon, y.epsilon);
        assert!((x.eta - y.eta).abs() < 1e-8);
    }
}

#[test]
fn nonconstant_curvature_round_trip() {
    // a closed 2-form with flux 4π·0.5 that is not a constant density
    let f = PatchForm::from_coefficient(cech_monopole::forms::Domain::Sphere, |theta, phi| {
        (0.5 + 0.3 * theta.cos() + 0.2 * theta.sin() * phi.cos()) * theta.sin()
    });
    let flux = surface_integral(&f, &Region::Sphere, 1e-10).unwrap().value;
    assert!((flux - 2.0 * PI).abs() < 1e-8, "{flux}");
    let cover = CapCover::three_caps();
    let qz = quantize_with(&f, &cover, 1.0, 1e-6, &options(0)).unwrap();
    assert_eq!(qz.report.sum_epsilon, 1);
    assert!(qz.report.max_residual < 1e-6, "{}", qz.report.max_residual);
    let partition = build_partition(&cover).unwrap();
    let collated = collate_to_form(&qz.transitions, &partition, &qz.nerve).unwrap();
    let back = collated_flux(&collated, 1e-7).unwrap().value;
    assert!((back - flux).abs() < 1e-6, "{back} vs {flux}");
}

#[test]
fn stokes_holds_on_every_patch() {
    let cover = CapCover::three_caps();
    let prims =
        cech_monopole::collation::local_primitives(&monopole_curvature(0.8).unwrap(), &cover)
            .unwrap();
    for (i, p) in cover.patches().iter().enumerate() {
        let shrunk = cech_monopole::cover::CapPatch::new(p.center(), p.radius() - 0.01).unwrap();
        let r = stokes_residual(&prims[i], &shrunk, 0).unwrap();
        assert!(r.residual < 1e-8, "patch {i}: {r:?}");
    }
}
