//! Winding of `e^{iqg}` around a loop, and the transition function of an annular overlap.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cover::CapCover;
use crate::error::{Error, Result};
use crate::forms::PatchForm;
use crate::geometry::{tangent_frame, wrap_phase};
use crate::integrate::{Curve, CurvePiece};
use crate::quadrature::adaptive;

use super::transition::potential_difference;

const MIN_LOOP_SAMPLES: usize = 720;
/// Loop samples are spaced so that `|q Δg|` stays below π / this.
const STEP_FRACTION: f64 = 8.0;
const LOOP_TOLERANCE: f64 = 1e-12;

/// `(1/2π) Σ wrap(q g_{j+1} − q g_j)` over a closed loop of samples, including the step
/// from the last sample back to the first.
pub fn winding_number(values: &[f64], q: f64) -> Result<i64> {
    if !q.is_finite() {
        return Err(Error::invalid("the charge q must be finite"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("loop values must be finite"));
    }
    let mut total = 0.0;
    for (j, w) in values.windows(2).enumerate() {
        let step = q * (w[1] - w[0]);
        if step.abs() >= PI {
            return Err(Error::UndersampledLoop { index: j + 1, step });
        }
        total += step;
    }
    if let (Some(first), Some(last)) = (values.first(), values.last()) {
        total += wrap_phase(q * (first - last));
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// A transition function followed continuously once around an annular overlap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopTransition {
    pub edge: [usize; 2],
    /// Loop parameter in `[0, 2π)` of each sample.
    pub angle: Vec<f64>,
    /// `g` at each sample, starting from 0.
    pub values: Vec<f64>,
    /// Change of `g` once around the loop: `∮ (A_α − A_β)`.
    pub period: f64,
}

/// The circle in the middle of an annular overlap, counterclockwise about the center
/// of patch `a`.
pub fn annular_loop(cover: &CapCover, a: usize, b: usize) -> Result<Curve> {
    if a >= cover.len() || b >= cover.len() || a == b {
        return Err(Error::invalid("annular loops need two distinct patches"));
    }
    if !cover.annular_overlap(a, b) {
        return Err(Error::invalid(format!(
            "the overlap of patches {a} and {b} is not an annulus"
        )));
    }
    let (p, q) = (&cover.patches()[a], &cover.patches()[b]);
    let d = p.distance(&q.center());
    // distance s from the antipode of a's center: π − r_a < s < d − π + r_b
    let s = 0.5 * ((PI - p.radius()) + (d - PI + q.radius()));
    let c = p.center();
    Ok(Curve::circle_in_frame(
        c,
        tangent_frame(&c),
        PI - s,
        0.0,
        2.0 * PI,
        a,
    ))
}

/// `g_ab` along [`annular_loop`] by cumulative integration of `A_a − A_b`.
pub fn loop_transition(
    primitives: &[PatchForm],
    cover: &CapCover,
    a: usize,
    b: usize,
    q: f64,
) -> Result<LoopTransition> {
    if primitives.len() != cover.len() {
        return Err(Error::invalid("one primitive per patch is required"));
    }
    let curve = annular_loop(cover, a, b)?;
    let piece: CurvePiece = curve.pieces[0].clone();
    let diff = potential_difference(&primitives[a], &primitives[b]);
    let integrand = |t: f64| {
        let (x, v) = piece.eval(t);
        diff(&x).dot(&v)
    };
    let period = adaptive(integrand, 0.0, 1.0, LOOP_TOLERANCE).value;
    if !period.is_finite() {
        return Err(Error::domain("the loop leaves the overlap"));
    }
    let n = MIN_LOOP_SAMPLES.max((STEP_FRACTION * (q * period).abs() / PI).ceil() as usize);
    let mut values = Vec::with_capacity(n);
    let mut g = 0.0;
    values.push(g);
    for j in 1..n {
        g += adaptive(
            integrand,
            (j - 1) as f64 / n as f64,
            j as f64 / n as f64,
            LOOP_TOLERANCE / n as f64,
        )
        .value;
        values.push(g);
    }
    Ok(LoopTransition {
        edge: [a, b],
        angle: (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect(),
        values,
        period,
    })
}
