//! Local primitives `A_α` with `dA_α = F` on each cap.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::cover::{CapCover, CapPatch};
use crate::error::{Error, Result};
use crate::forms::{cap_primitive, CovectorFn, Domain, Expr, PatchForm, ScalarFn};
use crate::geometry::{angle_between, fibonacci_lattice, Vec3};
use crate::quadrature::adaptive;

/// Below this distance from the cap center the primitive uses its leading-order limit.
const CENTER_LIMIT: f64 = 1e-6;
const RADIAL_TOLERANCE: f64 = 1e-13;
const DOMAIN_CHECK_SAMPLES: usize = 8192;

/// One primitive per patch. Constant densities use the closed-form potential
/// `k (c × x)/(1 + c·x)`, which for the polar caps is the Wu-Yang pair; anything else
/// uses [`homotopy_primitive`].
pub fn local_primitives(f: &PatchForm, cover: &CapCover) -> Result<Vec<PatchForm>> {
    if f.degree() != 2 {
        return Err(Error::invalid("local primitives need a 2-form"));
    }
    if !f.is_global() {
        return Err(Error::invalid("local primitives need a global 2-form"));
    }
    cover
        .patches()
        .iter()
        .map(|p| match f.constant() {
            Some(k) => Ok(cap_primitive(*p, k)),
            None => homotopy_primitive(f, *p),
        })
        .collect()
}

/// Poincaré-lemma primitive in geodesic polar coordinates `(ρ, ψ)` about the cap center:
/// `A = Φ dψ` with `Φ(x) = ∫₀^ρ f(γ(s)) sin s ds` along the geodesic `γ` from the center
/// to `x`. Since `sin ρ dρ∧dψ` is the area form, `dA = f · area`.
pub fn homotopy_primitive(f: &PatchForm, patch: CapPatch) -> Result<PatchForm> {
    if patch.radius() >= PI {
        return Err(Error::invalid(
            "a cap of radius π is not star-shaped about its center",
        ));
    }
    if f.degree() != 2 {
        return Err(Error::invalid("homotopy primitives need a 2-form"));
    }
    let c = patch.center();
    let outside = fibonacci_lattice(DOMAIN_CHECK_SAMPLES, 0)
        .into_iter()
        .chain(std::iter::once(c))
        .find(|x| patch.contains(x) && f.piece_at(x).is_none());
    if outside.is_some() {
        return Err(Error::domain("the 2-form is not defined on the whole cap"));
    }
    let form = f.clone();
    let density: ScalarFn = Arc::new(move |x: &Vec3| form.density_at(x).unwrap_or(f64::NAN));
    let rho_density = density.clone();
    let a: CovectorFn = Arc::new(move |x: &Vec3| {
        let cx = c.cross(x);
        let rho = angle_between(&c, x);
        if rho < CENTER_LIMIT {
            return cx * (rho_density(&c) / 2.0);
        }
        let dir = (x - c * c.dot(x)).normalize();
        let phi = adaptive(
            |s| rho_density(&(c * s.cos() + dir * s.sin())) * s.sin(),
            0.0,
            rho,
            RADIAL_TOLERANCE,
        )
        .value;
        cx * (phi / cx.norm_squared())
    });
    Ok(PatchForm::single(
        Domain::Cap(patch),
        Expr::Covector {
            a,
            d: Some(density),
        },
    ))
}
