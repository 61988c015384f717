//! Points on the unit sphere, coordinate frames and the sampling lattice.

use std::f64::consts::PI;

use nalgebra::{UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

const TAU: f64 = 2.0 * PI;

/// A point given in spherical coordinates `(theta, phi)` with an optional radius.
///
/// `theta` is the colatitude in `[0, π]` and `phi` the longitude, normalized to `[0, 2π)`.
/// The radius is only meaningful for points of `R³ \ {0}`; everything on the
/// sphere itself uses `r = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

impl SpherePoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::invalid("spherical coordinates must be finite"));
        }
        if !(-1e-12..=PI + 1e-12).contains(&theta) {
            return Err(Error::invalid(format!("colatitude {theta} outside [0, π]")));
        }
        Ok(Self {
            theta: theta.clamp(0.0, PI),
            phi: normalize_angle(phi),
            r: None,
        })
    }

    pub fn with_radius(self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!("radius {r} must be positive")));
        }
        Ok(Self { r: Some(r), ..self })
    }

    /// Direction of a nonzero vector. The radius is kept when it differs from one.
    pub fn from_vec(v: &Vec3) -> Self {
        let n = v.norm();
        let u = v / n;
        let theta = u.z.clamp(-1.0, 1.0).acos();
        let phi = normalize_angle(u.y.atan2(u.x));
        let r = if (n - 1.0).abs() > 1e-12 {
            Some(n)
        } else {
            None
        };
        Self { theta, phi, r }
    }

    pub fn radius(&self) -> f64 {
        self.r.unwrap_or(1.0)
    }

    pub fn unit(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vec3::new(st * cp, st * sp, ct)
    }

    pub fn to_vec(&self) -> Vec3 {
        self.unit() * self.radius()
    }
}

pub fn normalize_angle(phi: f64) -> f64 {
    let p = phi.rem_euclid(TAU);
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

pub fn unit_from_angles(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// Great-circle distance between two unit vectors.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// ∂x/∂θ and ∂x/∂φ of the embedding at a point.
pub fn coordinate_tangents(x: &Vec3) -> (Vec3, Vec3) {
    let p = SpherePoint::from_vec(x);
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    (
        Vec3::new(ct * cp, ct * sp, -st),
        Vec3::new(-st * sp, st * cp, 0.0),
    )
}

/// Orthonormal tangent frame `(e1, e2)` at `x` with `e1 × e2 = x`.
pub fn tangent_frame(x: &Vec3) -> (Vec3, Vec3) {
    let helper = if x.x.abs() < 0.6 {
        Vec3::x()
    } else if x.y.abs() < 0.6 {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = (helper - x * x.dot(&helper)).normalize();
    let e2 = x.cross(&e1);
    (e1, e2)
}

/// Projects an ambient vector onto the tangent plane at `x`.
pub fn tangential(x: &Vec3, v: &Vec3) -> Vec3 {
    v - x * x.dot(v)
}

/// Point reached by following the geodesic from `x` with initial tangent `v`.
pub fn exp_map(x: &Vec3, v: &Vec3) -> Vec3 {
    let len = v.norm();
    if len < 1e-300 {
        return *x;
    }
    (x * len.cos() + v * (len.sin() / len)).normalize()
}

/// Gnomonic chart centred at `x`: `(u, v) ↦ normalize(x + u e1 + v e2)` and its two partials.
#[derive(Clone, Copy, Debug)]
pub struct GnomonicChart {
    pub origin: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
}

impl GnomonicChart {
    pub fn at(x: &Vec3) -> Self {
        let (e1, e2) = tangent_frame(x);
        Self { origin: *x, e1, e2 }
    }

    pub fn point(&self, u: f64, v: f64) -> Vec3 {
        (self.origin + self.e1 * u + self.e2 * v).normalize()
    }

    pub fn point_and_partials(&self, u: f64, v: f64) -> (Vec3, Vec3, Vec3) {
        let p = self.origin + self.e1 * u + self.e2 * v;
        let n = p.norm();
        let y = p / n;
        let du = (self.e1 - y * y.dot(&self.e1)) / n;
        let dv = (self.e2 - y * y.dot(&self.e2)) / n;
        (y, du, dv)
    }
}

/// A great-circle arc between two unit vectors, parameterized by `t ∈ [0, 1]`.
#[derive(Clone, Copy, Debug)]
pub struct Arc {
    pub start: Vec3,
    pub end: Vec3,
    axis: Vec3,
    length: f64,
}

impl Arc {
    pub fn new(start: Vec3, end: Vec3) -> Self {
        let length = angle_between(&start, &end);
        let dir = end - start * start.dot(&end);
        let axis = if dir.norm() > 1e-300 {
            dir.normalize()
        } else {
            Vec3::zeros()
        };
        Self {
            start,
            end,
            axis,
            length,
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn point(&self, t: f64) -> Vec3 {
        let s = t * self.length;
        self.start * s.cos() + self.axis * s.sin()
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        let s = t * self.length;
        (self.axis * s.cos() - self.start * s.sin()) * self.length
    }
}

/// Quasi-uniform Fibonacci lattice of `n` points, rotated by a rotation drawn from `seed`.
pub fn fibonacci_lattice(n: usize, seed: u64) -> Vec<Vec3> {
    let rot = seeded_rotation(seed);
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            rot * Vec3::new(rho * phi.cos(), rho * phi.sin(), z)
        })
        .collect()
}

/// Typical nearest-neighbour distance of an `n`-point lattice.
pub fn lattice_spacing(n: usize) -> f64 {
    (4.0 * PI / n as f64).sqrt()
}

fn seeded_rotation(seed: u64) -> UnitQuaternion<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let q = nalgebra::Quaternion::new(
        a * (TAU * u2).sin(),
        a * (TAU * u2).cos(),
        b * (TAU * u3).sin(),
        b * (TAU * u3).cos(),
    );
    UnitQuaternion::from_quaternion(q)
}
