//! Line and surface integrals of patchwise forms, and Stokes checks.

use std::cell::Cell;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cover::CapPatch;
use crate::error::{Error, Result};
use crate::forms::{exterior_derivative, monopole_curvature, wu_yang_potentials, PatchForm};
use crate::geometry::{tangent_frame, Arc as GeoArc, SpherePoint, Vec3};
use crate::quadrature::{adaptive, adaptive_2d, Quad};

pub const DEFAULT_LINE_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_SURFACE_TOLERANCE: f64 = 1e-9;

/// Extra evenly spaced parameters at which curve membership is checked.
const MEMBERSHIP_CHECKS: usize = 64;

pub type PathFn = Arc<dyn Fn(f64) -> (Vec3, Vec3) + Send + Sync>;

/// One smooth piece of a curve, parameterized by `t ∈ [0, 1]`.
#[derive(Clone)]
pub enum CurvePiece {
    Arc(GeoArc),
    /// `cos ρ c + sin ρ (cos ψ e1 + sin ψ e2)` with `ψ = ψ₀ + t·sweep`; positive sweep
    /// runs counterclockwise seen from outside the sphere.
    Circle {
        center: Vec3,
        e1: Vec3,
        e2: Vec3,
        radius: f64,
        start: f64,
        sweep: f64,
    },
    /// Point and velocity.
    Custom(PathFn),
}

impl CurvePiece {
    pub fn eval(&self, t: f64) -> (Vec3, Vec3) {
        match self {
            CurvePiece::Arc(a) => (a.point(t), a.velocity(t)),
            CurvePiece::Circle {
                center,
                e1,
                e2,
                radius,
                start,
                sweep,
            } => {
                let psi = start + t * sweep;
                let (sr, cr) = radius.sin_cos();
                let (sp, cp) = psi.sin_cos();
                let x = center * cr + (e1 * cp + e2 * sp) * sr;
                let v = (e2 * cp - e1 * sp) * (sr * sweep);
                (x, v)
            }
            CurvePiece::Custom(f) => f(t),
        }
    }
}

/// A piecewise smooth path assigned to one patch of the integrated form.
#[derive(Clone)]
pub struct Curve {
    pub pieces: Vec<CurvePiece>,
    pub patch_index: usize,
}

impl std::fmt::Debug for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Curve")
            .field("pieces", &self.pieces.len())
            .field("start", &SpherePoint::from_vec(&self.start()))
            .field("end", &SpherePoint::from_vec(&self.end()))
            .field("patch_index", &self.patch_index)
            .finish()
    }
}

impl Curve {
    /// Circle of angular radius `radius` around `center`, starting at angle `start` in the
    /// frame `(e1, e2)` of `center`, swept by `sweep` radians.
    pub fn circle_in_frame(
        center: Vec3,
        (e1, e2): (Vec3, Vec3),
        radius: f64,
        start: f64,
        sweep: f64,
        patch_index: usize,
    ) -> Self {
        Self {
            pieces: vec![CurvePiece::Circle {
                center,
                e1,
                e2,
                radius,
                start,
                sweep,
            }],
            patch_index,
        }
    }

    /// Full counterclockwise boundary of a cap.
    pub fn cap_boundary(cap: &CapPatch, patch_index: usize) -> Self {
        let c = cap.center();
        Self::circle_in_frame(
            c,
            tangent_frame(&c),
            cap.radius(),
            0.0,
            2.0 * PI,
            patch_index,
        )
    }

    /// Circle of colatitude `theta` from longitude `phi0`, swept by `sweep` (positive is
    /// eastward).
    pub fn latitude(theta: f64, phi0: f64, sweep: f64, patch_index: usize) -> Self {
        Self::circle_in_frame(
            Vec3::z(),
            (Vec3::x(), Vec3::y()),
            theta,
            phi0,
            sweep,
            patch_index,
        )
    }

    /// Polyline of great-circle arcs through the given points.
    pub fn polyline(points: &[Vec3], patch_index: usize) -> Self {
        Self {
            pieces: points
                .windows(2)
                .map(|w| CurvePiece::Arc(GeoArc::new(w[0], w[1])))
                .collect(),
            patch_index,
        }
    }

    pub fn constant(x: Vec3, patch_index: usize) -> Self {
        Self::polyline(&[x, x], patch_index)
    }

    pub fn reversed(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| {
                let p = p.clone();
                let f: PathFn = Arc::new(move |t| {
                    let (x, v) = p.eval(1.0 - t);
                    (x, -v)
                });
                CurvePiece::Custom(f)
            })
            .collect();
        Self {
            pieces,
            patch_index: self.patch_index,
        }
    }

    pub fn start(&self) -> Vec3 {
        self.pieces
            .first()
            .map_or_else(Vec3::zeros, |p| p.eval(0.0).0)
    }

    pub fn end(&self) -> Vec3 {
        self.pieces
            .last()
            .map_or_else(Vec3::zeros, |p| p.eval(1.0).0)
    }

    /// Point at global parameter `t ∈ [0, 1]`, pieces taking equal parameter shares.
    pub fn point(&self, t: f64) -> Vec3 {
        let n = self.pieces.len();
        let s = (t.clamp(0.0, 1.0) * n as f64).min(n as f64 - 1e-15);
        let k = (s.floor() as usize).min(n - 1);
        self.pieces[k].eval(s - k as f64).0
    }
}

/// `∮_c w` for a 1-form, using the piece of `w` named by the curve.
pub fn line_integral(w: &PatchForm, c: &Curve, tol: f64) -> Result<Quad> {
    if w.degree() != 1 {
        return Err(Error::invalid("line integrals need a 1-form"));
    }
    let piece = w.piece(c.patch_index)?;
    let n = c.pieces.len();
    let outside: Cell<Option<f64>> = Cell::new(None);
    let mut total = Quad::default();
    for (k, cp) in c.pieces.iter().enumerate() {
        let global_t = |t: f64| (k as f64 + t) / n as f64;
        for j in 0..=MEMBERSHIP_CHECKS {
            let t = j as f64 / MEMBERSHIP_CHECKS as f64;
            if !piece.domain.contains(&cp.eval(t).0) {
                return Err(outside_error(global_t(t), c.patch_index));
            }
        }
        let q = adaptive(
            |t| {
                let (x, v) = cp.eval(t);
                if !piece.domain.contains(&x) {
                    outside.set(outside.get().or(Some(global_t(t))));
                    return 0.0;
                }
                piece.covector(&x).map_or(0.0, |a| a.dot(&v))
            },
            0.0,
            1.0,
            tol / n as f64,
        );
        if let Some(t) = outside.get() {
            return Err(outside_error(t, c.patch_index));
        }
        total = total + q;
    }
    Ok(total)
}

fn outside_error(t: f64, patch: usize) -> Error {
    Error::domain(format!("curve leaves patch {patch} at t = {t:.6}"))
}

/// Integration regions for 2-forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Sphere,
    Cap {
        center: [f64; 3],
        radius: f64,
    },
    /// Geodesic triangle, signed by the orientation of its vertices.
    Triangle {
        vertices: [[f64; 3]; 3],
    },
}

impl Region {
    pub fn cap(patch: &CapPatch) -> Self {
        let c = patch.center();
        Region::Cap {
            center: [c.x, c.y, c.z],
            radius: patch.radius(),
        }
    }

    pub fn triangle(a: Vec3, b: Vec3, c: Vec3) -> Self {
        Region::Triangle {
            vertices: [[a.x, a.y, a.z], [b.x, b.y, b.z], [c.x, c.y, c.z]],
        }
    }
}

fn vec3(a: &[f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

/// `∫_R F` for a 2-form. Global forms use, at every node, the lowest-index piece defined
/// there; other forms must have a single piece containing the whole region.
pub fn surface_integral(w: &PatchForm, region: &Region, tol: f64) -> Result<Quad> {
    if w.degree() != 2 {
        return Err(Error::invalid("surface integrals need a 2-form"));
    }
    if w.is_global() {
        return integrate_density(region, tol, |x| {
            w.piece_at(x)
                .map(|i| w.pieces()[i].density(x).unwrap_or(0.0))
        });
    }
    for piece in w.pieces() {
        let r = integrate_density(region, tol, |x| {
            piece
                .domain
                .contains(x)
                .then(|| piece.density(x).unwrap_or(0.0))
        });
        if let Ok(q) = r {
            return Ok(q);
        }
    }
    Err(Error::domain(
        "the region is not contained in a single patch of a non-global form",
    ))
}

fn check_cap(radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius <= PI) {
        return Err(Error::invalid(format!(
            "cap radius {radius} outside (0, π]"
        )));
    }
    Ok(())
}

fn integrate_density(
    region: &Region,
    tol: f64,
    density: impl Fn(&Vec3) -> Option<f64>,
) -> Result<Quad> {
    let missing: Cell<Option<Vec3>> = Cell::new(None);
    let f = |x: &Vec3| match density(x) {
        Some(v) => v,
        None => {
            missing.set(missing.get().or(Some(*x)));
            0.0
        }
    };
    let q = match region {
        Region::Sphere => adaptive_2d(
            |t, p| {
                let (st, ct) = t.sin_cos();
                let (sp, cp) = p.sin_cos();
                f(&Vec3::new(st * cp, st * sp, ct)) * st
            },
            (0.0, PI),
            (0.0, 2.0 * PI),
            tol,
        ),
        Region::Cap { center, radius } => {
            check_cap(*radius)?;
            let c = vec3(center).normalize();
            let (e1, e2) = tangent_frame(&c);
            adaptive_2d(
                |s, psi| {
                    let (ss, cs) = s.sin_cos();
                    let x = c * cs + (e1 * psi.cos() + e2 * psi.sin()) * ss;
                    f(&x) * ss
                },
                (0.0, *radius),
                (0.0, 2.0 * PI),
                tol,
            )
        }
        Region::Triangle { vertices } => {
            let [a, b, c] = vertices.map(|v| vec3(&v).normalize());
            let normal = (b - a).cross(&(c - a));
            let height = a.dot(&normal);
            if height.abs() < 1e-14 {
                return Err(Error::invalid("degenerate spherical triangle"));
            }
            // Duffy map of the unit square onto the planar triangle, projected radially.
            adaptive_2d(
                |u, v| {
                    let p = a + (b - a) * u + (c - b) * (u * v);
                    let r = p.norm();
                    f(&(p / r)) * height * u / (r * r * r)
                },
                (0.0, 1.0),
                (0.0, 1.0),
                tol,
            )
        }
    };
    match missing.get() {
        Some(x) => Err(Error::domain(format!(
            "no patch of the form is defined at {:?}",
            SpherePoint::from_vec(&x)
        ))),
        None => Ok(q),
    }
}

/// Both sides of Stokes' theorem on a cap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesReport {
    pub surface: f64,
    pub boundary: f64,
    pub residual: f64,
}

/// `|∫_cap dw − ∮_∂cap w|` using piece `patch_index` of `w` on both sides.
pub fn stokes_residual(w: &PatchForm, cap: &CapPatch, patch_index: usize) -> Result<StokesReport> {
    let piece = w.restrict(patch_index)?;
    let boundary =
        line_integral(&piece, &Curve::cap_boundary(cap, 0), DEFAULT_LINE_TOLERANCE)?.value;
    let surface = surface_integral(
        &exterior_derivative(&piece)?,
        &Region::cap(cap),
        DEFAULT_SURFACE_TOLERANCE,
    )?
    .value;
    Ok(StokesReport {
        surface,
        boundary,
        residual: (surface - boundary).abs(),
    })
}

/// The argument that no single potential can describe the monopole: the equator bounds
/// both hemispheres with opposite orientations, so the boundary integrals of one global
/// potential cancel, while the flux through the sphere is `4πG`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContradictionReport {
    #[serde(rename = "G")]
    pub g: f64,
    /// `∮_C A_N` around the equator, counterclockwise about the north pole.
    pub north_boundary: f64,
    /// `∮_{−C} A_N`, the same circle as boundary of the southern hemisphere.
    pub south_boundary: f64,
    pub boundary_sum: f64,
    pub flux: f64,
    pub obstruction: f64,
}

pub fn contradiction_demo(g: f64) -> Result<ContradictionReport> {
    let (a_n, _) = wu_yang_potentials(g)?;
    let equator = Curve::latitude(PI / 2.0, 0.0, 2.0 * PI, 0);
    let north_boundary = line_integral(&a_n, &equator, DEFAULT_LINE_TOLERANCE)?.value;
    let south_boundary = line_integral(&a_n, &equator.reversed(), DEFAULT_LINE_TOLERANCE)?.value;
    let boundary_sum = north_boundary + south_boundary;
    let flux = surface_integral(
        &monopole_curvature(g)?,
        &Region::Sphere,
        DEFAULT_SURFACE_TOLERANCE,
    )?
    .value;
    Ok(ContradictionReport {
        g,
        north_boundary,
        south_boundary,
        boundary_sum,
        flux,
        obstruction: flux - boundary_sum,
    })
}
