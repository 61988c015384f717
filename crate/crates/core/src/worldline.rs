//! The patched worldline action: line integrals of the local potentials plus gauge
//! jumps at the switch points, and its independence of where the switches happen.
//!
//! Along a worldline that leaves patch `α` for patch `β` at `P`, the action picks up
//! `g_βα(P)`. Sliding `P` forward by `dx` moves `A_α·dx − A_β·dx = dg_αβ·dx` into the
//! integrals and the same amount out of the jump, so the action changes only when `g`
//! is not single-valued on the overlap, and then by its periods, which are multiples of
//! `2π/q` exactly when the charge is quantized.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cochain::{Cochain, CochainValues};
use crate::error::{Error, Result};
use crate::forms::PatchForm;
use crate::geometry::{angle_between, lattice_spacing, Arc, SpherePoint, Vec3};
use crate::integrate::{line_integral, Curve};
use crate::nerve::Nerve;

/// Largest gap allowed between the end of one segment and the start of the next.
pub const JUNCTION_TOLERANCE: f64 = 1e-12;
/// Quadrature tolerance of each segment integral.
pub const ACTION_TOLERANCE: f64 = 1e-12;

/// Switch points are kept this many lattice spacings inside their overlap, so that the
/// sampled transition functions can be evaluated there.
const SWITCH_MARGIN: f64 = 3.0;
/// Step of the scan that finds how far a switch point may slide.
const SLIDE_STEP: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub patch: usize,
    /// `(θ, φ)` pairs.
    pub points: Vec<[f64; 2]>,
}

/// Worldline file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldlineSpec {
    pub segments: Vec<SegmentSpec>,
    #[serde(default)]
    pub closed: bool,
}

/// A piece of the worldline assigned to one patch: great-circle arcs through `points`.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub patch: usize,
    pub points: Vec<Vec3>,
}

/// A switch from patch `prev` to patch `next` at `point`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Junction {
    pub prev: usize,
    pub next: usize,
    pub point: Vec3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Worldline {
    segments: Vec<Segment>,
    closed: bool,
}

impl Worldline {
    pub fn new(segments: Vec<Segment>, closed: bool) -> Result<Self> {
        for (i, s) in segments.iter().enumerate() {
            if s.points.is_empty() {
                return Err(Error::InvalidWorldline(format!(
                    "segment {i} has no points"
                )));
            }
            if s.points
                .iter()
                .any(|p| !p.iter().all(|c| c.is_finite()) || (p.norm() - 1.0).abs() > 1e-12)
            {
                return Err(Error::InvalidWorldline(format!(
                    "segment {i} has a point off the unit sphere"
                )));
            }
            if s.points
                .windows(2)
                .any(|w| angle_between(&w[0], &w[1]) > PI - 1e-9)
            {
                return Err(Error::InvalidWorldline(format!(
                    "segment {i} joins antipodal points, which fix no great-circle arc"
                )));
            }
        }
        for (i, w) in segments.windows(2).enumerate() {
            let gap = (w[0].points[w[0].points.len() - 1] - w[1].points[0]).norm();
            if gap > JUNCTION_TOLERANCE {
                return Err(Error::InvalidWorldline(format!(
                    "segment {} starts {gap:.3e} away from the end of segment {i}",
                    i + 1
                )));
            }
        }
        if closed {
            if let (Some(first), Some(last)) = (segments.first(), segments.last()) {
                let gap = (last.points[last.points.len() - 1] - first.points[0]).norm();
                if gap > JUNCTION_TOLERANCE {
                    return Err(Error::InvalidWorldline(format!(
                        "closed worldline ends {gap:.3e} away from its start"
                    )));
                }
            }
        }
        Ok(Self { segments, closed })
    }

    /// The circle of colatitude `theta` from longitude `phi0`, eastward, cut into equal
    /// arcs assigned in turn to `patches`.
    pub fn latitude_loop(
        theta: f64,
        phi0: f64,
        patches: &[usize],
        points_per_segment: usize,
    ) -> Result<Self> {
        if patches.is_empty() || points_per_segment < 2 {
            return Err(Error::invalid(
                "a latitude loop needs patches and at least two points per segment",
            ));
        }
        let n = patches.len();
        let m = points_per_segment - 1;
        let segments = patches
            .iter()
            .enumerate()
            .map(|(k, &patch)| {
                let points = (0..=m)
                    .map(|j| {
                        let step = (k * m + j) % (n * m);
                        let phi = phi0 + 2.0 * PI * step as f64 / (n * m) as f64;
                        Ok(SpherePoint::new(theta, phi)?.unit())
                    })
                    .collect::<Result<_>>()?;
                Ok(Segment { patch, points })
            })
            .collect::<Result<_>>()?;
        Self::new(segments, true)
    }

    pub fn from_spec(spec: &WorldlineSpec) -> Result<Self> {
        let segments = spec
            .segments
            .iter()
            .map(|s| {
                let points = s
                    .points
                    .iter()
                    .map(|&[theta, phi]| Ok(SpherePoint::new(theta, phi)?.unit()))
                    .collect::<Result<_>>()?;
                Ok(Segment {
                    patch: s.patch,
                    points,
                })
            })
            .collect::<Result<_>>()?;
        Self::new(segments, spec.closed)
    }

    pub fn to_spec(&self) -> WorldlineSpec {
        WorldlineSpec {
            segments: self
                .segments
                .iter()
                .map(|s| SegmentSpec {
                    patch: s.patch,
                    points: s
                        .points
                        .iter()
                        .map(|p| {
                            let sp = SpherePoint::from_vec(p);
                            [sp.theta, sp.phi]
                        })
                        .collect(),
                })
                .collect(),
            closed: self.closed,
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(s)?)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Junctions in path order; a closed worldline starts with the one closing the loop.
    pub fn junctions(&self) -> Vec<Junction> {
        let n = self.segments.len();
        let first = if self.closed { 0 } else { 1 };
        (first..n)
            .map(|k| Junction {
                prev: self.segments[(k + n - 1) % n].patch,
                next: self.segments[k].patch,
                point: self.segments[k].points[0],
            })
            .collect()
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|s| Segment {
                patch: s.patch,
                points: s.points.iter().rev().copied().collect(),
            })
            .collect();
        Self {
            segments,
            closed: self.closed,
        }
    }

    pub fn length(&self) -> f64 {
        Track::new(self).length()
    }
}

/// The worldline's path as one polyline parameterized by arc length.
struct Track {
    vertices: Vec<Vec3>,
    arcs: Vec<Arc>,
    cumulative: Vec<f64>,
    /// Arc-length position where each segment starts, then the total length.
    bounds: Vec<f64>,
    patches: Vec<usize>,
    closed: bool,
}

impl Track {
    fn new(w: &Worldline) -> Self {
        let mut vertices = Vec::new();
        let mut starts = Vec::new();
        for s in &w.segments {
            if vertices.is_empty() {
                starts.push(0);
                vertices.extend_from_slice(&s.points);
            } else {
                starts.push(vertices.len() - 1);
                vertices.extend_from_slice(&s.points[1..]);
            }
        }
        let arcs: Vec<Arc> = vertices.windows(2).map(|v| Arc::new(v[0], v[1])).collect();
        let mut cumulative = vec![0.0];
        for a in &arcs {
            cumulative.push(cumulative[cumulative.len() - 1] + a.length());
        }
        let length = cumulative[cumulative.len() - 1];
        let mut bounds: Vec<f64> = starts.iter().map(|&j| cumulative[j]).collect();
        bounds.push(length);
        Self {
            vertices,
            arcs,
            cumulative,
            bounds,
            patches: w.segments.iter().map(|s| s.patch).collect(),
            closed: w.closed,
        }
    }

    fn length(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    fn point_at(&self, s: f64) -> Vec3 {
        let len = self.length();
        let s = if self.closed && len > 0.0 {
            s.rem_euclid(len)
        } else {
            s.clamp(0.0, len)
        };
        let j = self
            .cumulative
            .partition_point(|&c| c <= s)
            .saturating_sub(1);
        match self.arcs.get(j) {
            Some(a) if a.length() > 0.0 => a.point((s - self.cumulative[j]) / a.length()),
            _ => self.vertices[j],
        }
    }

    /// Polyline from `s0` to `s1 ≥ s0` along the track.
    fn sub(&self, s0: f64, s1: f64) -> Vec<Vec3> {
        let len = self.length();
        let mut interior: Vec<(f64, Vec3)> = Vec::new();
        let laps: &[f64] = if self.closed && len > 0.0 {
            &[-1.0, 0.0, 1.0, 2.0]
        } else {
            &[0.0]
        };
        let n = if self.closed {
            self.vertices.len() - 1
        } else {
            self.vertices.len()
        };
        for &m in laps {
            for j in 0..n {
                let c = self.cumulative[j] + m * len;
                if c > s0 && c < s1 {
                    interior.push((c, self.vertices[j]));
                }
            }
        }
        interior.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points = vec![self.point_at(s0)];
        points.extend(interior.into_iter().map(|(_, v)| v));
        points.push(self.point_at(s1));
        points
    }

    /// Indices into `bounds` of the movable switch points.
    fn junction_slots(&self) -> std::ops::Range<usize> {
        let n = self.patches.len();
        if self.closed {
            0..n
        } else {
            1..n.max(1)
        }
    }

    /// Rebuilds the worldline with switch points at the given positions, one per
    /// junction slot.
    fn with_positions(&self, positions: &[f64]) -> Result<Worldline> {
        let mut bounds = self.bounds.clone();
        for (slot, &p) in self.junction_slots().zip(positions) {
            bounds[slot] = p;
        }
        let n = self.patches.len();
        if self.closed {
            bounds[n] = bounds[0] + self.length();
        }
        let segments = (0..n)
            .map(|k| Segment {
                patch: self.patches[k],
                points: self.sub(bounds[k], bounds[k + 1]),
            })
            .collect();
        Worldline::new(segments, self.closed)
    }
}

/// Value of the action and its phase `e^{iqI}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionReport {
    pub q: f64,
    pub action: f64,
    /// `[Re, Im]` of `e^{iqI}`.
    pub phase: [f64; 2],
    pub segment_integrals: f64,
    pub junction_terms: f64,
}

fn phase(q: f64, action: f64) -> [f64; 2] {
    let a = q * action;
    [a.cos(), a.sin()]
}

/// `g_ab(x)` read through the antisymmetry of the cochain; `g_aa = 0`.
pub fn transition_at(g: &Cochain, nerve: &Nerve, a: usize, b: usize, x: &Vec3) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !nerve.cover().contains_all(&[a, b], x) {
        return Err(Error::InvalidWorldline(format!(
            "switch point {:?} is outside the overlap of patches {a} and {b}",
            SpherePoint::from_vec(x)
        )));
    }
    let (sign, i) = g
        .signed_index(nerve, &[a, b])
        .ok_or_else(|| Error::InvalidWorldline(format!("patches {a} and {b} do not overlap")))?;
    let v = match g.values() {
        CochainValues::Integer(v) => v[i] as f64,
        CochainValues::Real(v) => v[i],
        CochainValues::Samples(f) => f[i].eval(nerve, 1, i, x).map_err(|e| {
            Error::InvalidWorldline(format!("switch point of patches {a} and {b}: {e}"))
        })?,
    };
    Ok(sign as f64 * v)
}

/// `I = Σ_i ∫_{segment i} A_{patch(i)} + Σ_junctions g_{next,prev}(P)`.
pub fn evaluate_action(
    w: &Worldline,
    primitives: &[PatchForm],
    g: &Cochain,
    nerve: &Nerve,
    q: f64,
) -> Result<ActionReport> {
    if !q.is_finite() {
        return Err(Error::invalid("the charge q must be finite"));
    }
    if primitives.len() != nerve.cover().len() {
        return Err(Error::invalid(
            "one primitive per patch of the nerve's cover is required",
        ));
    }
    if g.degree() != 1 {
        return Err(Error::invalid(
            "transition functions form a degree-1 cochain",
        ));
    }
    let mut segment_integrals = 0.0;
    for (i, s) in w.segments.iter().enumerate() {
        let a = primitives.get(s.patch).ok_or_else(|| {
            Error::InvalidWorldline(format!(
                "segment {i} names patch {} of a {}-patch cover",
                s.patch,
                primitives.len()
            ))
        })?;
        if s.points.len() < 2 {
            continue;
        }
        let curve = Curve::polyline(&s.points, 0);
        segment_integrals += line_integral(a, &curve, ACTION_TOLERANCE)
            .map_err(|e| Error::InvalidWorldline(format!("segment {i} (patch {}): {e}", s.patch)))?
            .value;
    }
    let junction_terms = w
        .junctions()
        .iter()
        .map(|j| transition_at(g, nerve, j.next, j.prev, &j.point))
        .sum::<Result<f64>>()?;
    let action = segment_integrals + junction_terms;
    Ok(ActionReport {
        q,
        action,
        phase: phase(q, action),
        segment_integrals,
        junction_terms,
    })
}

/// One draw of switch points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTrial {
    pub trial: usize,
    /// `(θ, φ)` of each switch point.
    pub switch_points: Vec<[f64; 2]>,
    /// Arc-length displacement of each switch point from its original position.
    pub offsets: Vec<f64>,
    pub action: f64,
    pub phase_deviation: f64,
    /// `(I − I₀)/(2π/q)` rounded, and its distance from that integer.
    pub shift: i64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub q: f64,
    pub seed: u64,
    pub base_action: f64,
    pub base_phase: [f64; 2],
    /// `max |e^{iqI} − e^{iqI₀}|` over the trials.
    pub max_phase_deviation: f64,
    pub max_residual: f64,
    pub trials: Vec<SweepTrial>,
}

impl SweepReport {
    pub fn shifts(&self) -> Vec<i64> {
        self.trials.iter().map(|t| t.shift).collect()
    }
}

/// How far each switch point may slide along the path while staying inside its overlap
/// and short of the neighbouring switch points.
fn slide_ranges(track: &Track, w: &Worldline, nerve: &Nerve) -> Vec<(f64, f64)> {
    let cover = nerve.cover();
    let margin = SWITCH_MARGIN * lattice_spacing(nerve.sample_count());
    let junctions = w.junctions();
    let len = track.length();
    let n = track.patches.len();
    track
        .junction_slots()
        .zip(&junctions)
        .map(|(slot, j)| {
            let s = track.bounds[slot];
            let before = if slot > 0 {
                track.bounds[slot - 1]
            } else {
                track.bounds[n - 1] - len
            };
            let after = track.bounds[slot + 1];
            let inside = |x: &Vec3| {
                if j.prev == j.next {
                    cover.patches()[j.prev].contains(x)
                } else {
                    cover.depth_in(&[j.prev, j.next], x) >= margin
                }
            };
            let reach = |limit: f64, dir: f64| {
                let mut d = 0.0;
                while d + SLIDE_STEP < limit && inside(&track.point_at(s + dir * (d + SLIDE_STEP)))
                {
                    d += SLIDE_STEP;
                }
                d
            };
            (
                s - reach(0.5 * (s - before), -1.0),
                s + reach(0.5 * (after - s), 1.0),
            )
        })
        .collect()
}

/// Evaluates the action at `trials` random placements of the switch points, each slid
/// along the path within its overlap, and compares with the original placement.
pub fn switch_point_sweep(
    w: &Worldline,
    primitives: &[PatchForm],
    g: &Cochain,
    nerve: &Nerve,
    q: f64,
    trials: usize,
    seed: u64,
) -> Result<SweepReport> {
    let base = evaluate_action(w, primitives, g, nerve, q)?;
    let mut report = SweepReport {
        q,
        seed,
        base_action: base.action,
        base_phase: base.phase,
        max_phase_deviation: 0.0,
        max_residual: 0.0,
        trials: Vec::new(),
    };
    if trials == 0 {
        return Ok(report);
    }
    let track = Track::new(w);
    let ranges = slide_ranges(&track, w, nerve);
    if !ranges.iter().any(|(a, b)| b > a) {
        return Err(Error::InvalidWorldline(
            "no switch point can move inside its overlap".into(),
        ));
    }
    let unit = 2.0 * PI / q;
    report.trials = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let positions: Vec<f64> = ranges
                .iter()
                .map(|&(a, b)| if b > a { rng.random_range(a..=b) } else { a })
                .collect();
            let moved = track.with_positions(&positions)?;
            let r = evaluate_action(&moved, primitives, g, nerve, q)?;
            let x = (r.action - base.action) / unit;
            Ok(SweepTrial {
                trial,
                switch_points: moved
                    .junctions()
                    .iter()
                    .map(|j| {
                        let p = SpherePoint::from_vec(&j.point);
                        [p.theta, p.phi]
                    })
                    .collect(),
                offsets: positions
                    .iter()
                    .zip(track.junction_slots())
                    .map(|(p, slot)| p - track.bounds[slot])
                    .collect(),
                action: r.action,
                phase_deviation: 2.0 * (0.5 * q * (r.action - base.action)).sin().abs(),
                shift: x.round() as i64,
                residual: (x - x.round()).abs(),
            })
        })
        .collect::<Result<_>>()?;
    report.max_phase_deviation = report
        .trials
        .iter()
        .map(|t| t.phase_deviation)
        .fold(0.0, f64::max);
    report.max_residual = report.trials.iter().map(|t| t.residual).fold(0.0, f64::max);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collation::{
        local_primitives, quantize_with, transition_functions, QuantizeOptions,
    };
    use crate::cover::CapCover;
    use crate::forms::monopole_curvature;
    use crate::nerve::nerve;

    struct Setup {
        nerve: Nerve,
        primitives: Vec<PatchForm>,
        g: Cochain,
    }

    fn wu_yang(g: f64) -> Setup {
        let cover = CapCover::wu_yang();
        let nerve = nerve(&cover, 1, 100_000, 0).unwrap();
        let primitives = local_primitives(&monopole_curvature(g).unwrap(), &cover).unwrap();
        let g = transition_functions(&primitives, &nerve).unwrap();
        Setup {
            nerve,
            primitives,
            g,
        }
    }

    /// Longitude of the base point of the transition function on the annulus; its
    /// branch cut sits on the opposite side.
    fn base_longitude(s: &Setup) -> f64 {
        let samples = s.nerve.samples(1, 0);
        SpherePoint::from_vec(&s.nerve.point(samples.ids[samples.roots[0]])).phi
    }

    fn action(s: &Setup, w: &Worldline) -> ActionReport {
        evaluate_action(w, &s.primitives, &s.g, &s.nerve, 1.0).unwrap()
    }

    #[test]
    fn loop_inside_the_north_patch() {
        let s = wu_yang(1.0);
        let w = Worldline::latitude_loop(0.5 * PI, 0.0, &[0], 9).unwrap();
        let r = action(&s, &w);
        assert!((r.action - 2.0 * PI).abs() < 1e-10, "{}", r.action);
        assert!((r.phase[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_length_worldline() {
        let s = wu_yang(1.0);
        let x = SpherePoint::new(0.3, 0.2).unwrap().unit();
        let w = Worldline::new(
            vec![Segment {
                patch: 0,
                points: vec![x],
            }],
            false,
        )
        .unwrap();
        let r = action(&s, &w);
        assert_eq!(r.action, 0.0);
        assert_eq!(r.phase, [1.0, 0.0]);
    }

    #[test]
    fn split_equator_phase_at_half() {
        let s = wu_yang(0.5);
        let w = Worldline::latitude_loop(0.5 * PI, base_longitude(&s), &[0, 1], 9).unwrap();
        let r = action(&s, &w);
        // e^{iq·2πG} with G = 1/2
        assert!((r.phase[0] + 1.0).abs() < 1e-9, "{:?}", r);
        let sweep = switch_point_sweep(&w, &s.primitives, &s.g, &s.nerve, 1.0, 100, 0).unwrap();
        assert_eq!(sweep.trials.len(), 100);
        assert!(
            sweep.max_phase_deviation < 1e-8,
            "{}",
            sweep.max_phase_deviation
        );
        assert!(sweep.max_residual < 1e-8);
        assert!(sweep.shifts().iter().any(|&k| k != 0));
    }

    #[test]
    fn unquantized_strength_depends_on_switch_points() {
        let s = wu_yang(0.3);
        let w = Worldline::latitude_loop(0.5 * PI, base_longitude(&s), &[0, 1], 9).unwrap();
        let sweep = switch_point_sweep(&w, &s.primitives, &s.g, &s.nerve, 1.0, 100, 0).unwrap();
        assert!(
            sweep.max_phase_deviation > 0.1,
            "{}",
            sweep.max_phase_deviation
        );
    }

    #[test]
    fn sweep_is_deterministic_and_empty_for_zero_trials() {
        let s = wu_yang(0.5);
        let w = Worldline::latitude_loop(0.5 * PI, 0.3, &[0, 1], 5).unwrap();
        let a = switch_point_sweep(&w, &s.primitives, &s.g, &s.nerve, 1.0, 8, 7).unwrap();
        let b = switch_point_sweep(&w, &s.primitives, &s.g, &s.nerve, 1.0, 8, 7).unwrap();
        assert_eq!(a, b);
        assert!(
            switch_point_sweep(&w, &s.primitives, &s.g, &s.nerve, 1.0, 0, 7)
                .unwrap()
                .trials
                .is_empty()
        );
    }

    #[test]
    fn reversal_negates_the_action() {
        let s = wu_yang(0.7);
        let w = Worldline::latitude_loop(0.45 * PI, 1.0, &[0, 1, 0, 1], 5).unwrap();
        let (a, b) = (action(&s, &w), action(&s, &w.reversed()));
        assert!(
            (a.action + b.action).abs() < 1e-9,
            "{} {}",
            a.action,
            b.action
        );
    }

    #[test]
    fn redundant_junction_changes_nothing() {
        let s = wu_yang(0.5);
        let w = Worldline::latitude_loop(0.5 * PI, 0.3, &[0, 1], 9).unwrap();
        let mut segments = w.segments().to_vec();
        let first = segments.remove(0);
        let (head, tail) = first.points.split_at(4);
        let mut tail = tail.to_vec();
        tail.insert(0, head[3]);
        segments.insert(
            0,
            Segment {
                patch: 0,
                points: tail,
            },
        );
        segments.insert(
            0,
            Segment {
                patch: 0,
                points: head.to_vec(),
            },
        );
        let split = Worldline::new(segments, true).unwrap();
        assert_eq!(split.junctions().len(), 3);
        assert!((action(&s, &w).action - action(&s, &split).action).abs() < 1e-10);
    }

    #[test]
    fn three_patch_cover_gives_the_same_phase() {
        for (g, expected) in [(0.5, -1.0), (1.0, 1.0)] {
            let cover = CapCover::three_caps();
            let options = QuantizeOptions {
                sample_count: 100_000,
                ..Default::default()
            };
            let qz = quantize_with(&monopole_curvature(g).unwrap(), &cover, 1.0, 1e-8, &options)
                .unwrap();
            let w = Worldline::latitude_loop(0.5 * PI, -PI / 3.0, &[0, 1, 2], 7).unwrap();
            let r = evaluate_action(&w, &qz.primitives, &qz.transitions, &qz.nerve, 1.0).unwrap();
            assert!((r.phase[0] - expected).abs() < 1e-8, "G = {g}: {:?}", r);
            let sweep =
                switch_point_sweep(&w, &qz.primitives, &qz.transitions, &qz.nerve, 1.0, 20, 1)
                    .unwrap();
            assert!(sweep.max_phase_deviation < 1e-8);
        }
    }

    #[test]
    fn switch_point_outside_overlap_is_rejected() {
        let s = wu_yang(0.5);
        let x = SpherePoint::new(0.1, 0.0).unwrap().unit();
        let y = SpherePoint::new(0.2, 0.0).unwrap().unit();
        let w = Worldline::new(
            vec![
                Segment {
                    patch: 0,
                    points: vec![x, y],
                },
                Segment {
                    patch: 1,
                    points: vec![y, x],
                },
            ],
            true,
        )
        .unwrap();
        assert!(matches!(
            evaluate_action(&w, &s.primitives, &s.g, &s.nerve, 1.0),
            Err(Error::InvalidWorldline(_))
        ));
    }

    #[test]
    fn discontinuous_and_json_worldlines() {
        let x = SpherePoint::new(1.0, 0.0).unwrap().unit();
        let y = SpherePoint::new(1.0, 0.5).unwrap().unit();
        assert!(Worldline::new(
            vec![
                Segment {
                    patch: 0,
                    points: vec![x, y]
                },
                Segment {
                    patch: 1,
                    points: vec![x, y]
                }
            ],
            false
        )
        .is_err());
        let w = Worldline::from_json_str(
            r#"{"segments":[{"patch":0,"points":[[1.0,0.0],[1.0,0.5]]},{"patch":1,"points":[[1.0,0.5],[1.2,0.9]]}],"closed":false}"#,
        )
        .unwrap();
        assert_eq!(w.junctions().len(), 1);
        let back = Worldline::from_spec(&w.to_spec()).unwrap();
        for (a, b) in w.segments().iter().zip(back.segments()) {
            for (p, q) in a.points.iter().zip(&b.points) {
                assert!((p - q).norm() < 1e-15);
            }
        }
    }
}
