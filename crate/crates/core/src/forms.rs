//! Differential forms on the sphere given patch by patch.
//!
//! Forms are stored in ambient form so that no expression depends on the polar chart:
//!
//! * a 0-form is a scalar function of the unit vector `x`;
//! * a 1-form `A = a·dx` is a tangent vector field `a(x)`; its polar components are
//!   `a_θ = a·∂_θx` and `a_φ = a·∂_φx`;
//! * a 2-form is a density relative to the outward area form, so that the coefficient of
//!   `dθ∧dφ` is `density · sin θ`.
//!
//! Each piece of a [`PatchForm`] lives on a cap (or the whole sphere). Pieces whose
//! exterior derivative is known in closed form carry it, and `d` is then exact;
//! otherwise `d` is taken by central differences in a gnomonic chart.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cover::{CapCover, CapPatch};
use crate::error::{Error, Result};
use crate::geometry::{
    coordinate_tangents, fibonacci_lattice, tangential, GnomonicChart, SpherePoint, Vec3,
};

/// Finite-difference step of the exterior derivative. Stencils reach `2·FD_STEP` from
/// the evaluation point.
pub const FD_STEP: f64 = 1e-3;

/// Pieces agreeing to this accuracy on sampled overlaps make a global form.
pub const GLOBAL_TOLERANCE: f64 = 1e-9;

const GLOBAL_CHECK_SAMPLES: usize = 4096;

pub type ScalarFn = Arc<dyn Fn(&Vec3) -> f64 + Send + Sync>;
pub type CovectorFn = Arc<dyn Fn(&Vec3) -> Vec3 + Send + Sync>;

/// Where a piece is defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    Sphere,
    Cap(CapPatch),
}

impl Domain {
    pub fn contains(&self, x: &Vec3) -> bool {
        match self {
            Domain::Sphere => true,
            Domain::Cap(c) => c.contains(x),
        }
    }
}

#[derive(Clone)]
pub enum Expr {
    Scalar { f: ScalarFn, d: Option<CovectorFn> },
    Covector { a: CovectorFn, d: Option<ScalarFn> },
    Density { f: ScalarFn },
}

impl Expr {
    pub fn degree(&self) -> usize {
        match self {
            Expr::Scalar { .. } => 0,
            Expr::Covector { .. } => 1,
            Expr::Density { .. } => 2,
        }
    }
}

#[derive(Clone)]
pub struct Piece {
    pub domain: Domain,
    pub expr: Expr,
}

impl Piece {
    pub fn scalar(&self, x: &Vec3) -> Option<f64> {
        match &self.expr {
            Expr::Scalar { f, .. } => Some(f(x)),
            _ => None,
        }
    }

    pub fn covector(&self, x: &Vec3) -> Option<Vec3> {
        match &self.expr {
            Expr::Covector { a, .. } => Some(a(x)),
            _ => None,
        }
    }

    pub fn density(&self, x: &Vec3) -> Option<f64> {
        match &self.expr {
            Expr::Density { f } => Some(f(x)),
            _ => None,
        }
    }

    fn values(&self, x: &Vec3) -> Vec<f64> {
        match &self.expr {
            Expr::Scalar { f, .. } => vec![f(x)],
            Expr::Covector { a, .. } => a(x).iter().copied().collect(),
            Expr::Density { f } => vec![f(x)],
        }
    }
}

/// Named closed-form forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    WuYangNorth,
    WuYangSouth,
    MonopoleF,
    HopfF,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [
        Builtin::WuYangNorth,
        Builtin::WuYangSouth,
        Builtin::MonopoleF,
        Builtin::HopfF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::WuYangNorth => "wu-yang-north",
            Builtin::WuYangSouth => "wu-yang-south",
            Builtin::MonopoleF => "monopole-F",
            Builtin::HopfF => "hopf-F",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| Error::invalid(format!("unknown built-in form {name:?}")))
    }

    pub fn form(self, g: f64) -> Result<PatchForm> {
        match self {
            Builtin::WuYangNorth => Ok(wu_yang_potentials(g)?.0),
            Builtin::WuYangSouth => Ok(wu_yang_potentials(g)?.1),
            Builtin::MonopoleF => monopole_curvature(g),
            Builtin::HopfF => Ok(hopf_curvature()),
        }
    }
}

/// A q-form given by one expression per patch.
#[derive(Clone)]
pub struct PatchForm {
    degree: usize,
    pieces: Vec<Piece>,
    global: bool,
    constant_density: Option<f64>,
    builtin: Option<Builtin>,
}

impl std::fmt::Debug for PatchForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PatchForm")
            .field("degree", &self.degree)
            .field(
                "domains",
                &self.pieces.iter().map(|p| p.domain).collect::<Vec<_>>(),
            )
            .field("global", &self.global)
            .field("constant_density", &self.constant_density)
            .field("builtin", &self.builtin)
            .finish()
    }
}

impl PatchForm {
    /// Builds a form from pieces of equal degree, checking agreement on overlaps.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        Self::with_tolerance(pieces, GLOBAL_TOLERANCE)
    }

    /// As [`PatchForm::new`] with a custom agreement tolerance.
    pub fn with_tolerance(pieces: Vec<Piece>, tol: f64) -> Result<Self> {
        let degree = pieces
            .first()
            .ok_or_else(|| Error::invalid("a form needs at least one piece"))?
            .expr
            .degree();
        if pieces.iter().any(|p| p.expr.degree() != degree) {
            return Err(Error::invalid("pieces of a form must share one degree"));
        }
        let global = overlap_discrepancy(&pieces) < tol;
        Ok(Self {
            degree,
            pieces,
            global,
            constant_density: None,
            builtin: None,
        })
    }

    /// One piece on one domain.
    pub fn single(domain: Domain, expr: Expr) -> Self {
        Self {
            degree: expr.degree(),
            pieces: vec![Piece { domain, expr }],
            global: true,
            constant_density: None,
            builtin: None,
        }
    }

    /// 0-form from a function of `(θ, φ)`.
    pub fn from_scalar(
        domain: Domain,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let f: ScalarFn = Arc::new(move |x: &Vec3| {
            let p = SpherePoint::from_vec(x);
            f(p.theta, p.phi)
        });
        Self::single(domain, Expr::Scalar { f, d: None })
    }

    /// 1-form `a_θ dθ + a_φ dφ` from its polar components. The domain must avoid the poles.
    pub fn from_coordinates(
        domain: Domain,
        a_theta: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        a_phi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let a: CovectorFn = Arc::new(move |x: &Vec3| {
            let p = SpherePoint::from_vec(x);
            let (xt, xp) = coordinate_tangents(x);
            let s2 = p.theta.sin().powi(2);
            xt * a_theta(p.theta, p.phi) + xp * (a_phi(p.theta, p.phi) / s2)
        });
        Self::single(domain, Expr::Covector { a, d: None })
    }

    /// 2-form `f dθ∧dφ` from its polar coefficient. The domain must avoid the poles.
    pub fn from_coefficient(
        domain: Domain,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let f: ScalarFn = Arc::new(move |x: &Vec3| {
            let p = SpherePoint::from_vec(x);
            f(p.theta, p.phi) / p.theta.sin()
        });
        Self::single(domain, Expr::Density { f })
    }

    /// The global 2-form `k · (area form)`.
    pub fn constant_density(k: f64) -> Self {
        let f: ScalarFn = Arc::new(move |_: &Vec3| k);
        Self {
            constant_density: Some(k),
            ..Self::single(Domain::Sphere, Expr::Density { f })
        }
    }

    /// Merges the pieces of several forms, in order.
    pub fn glue(forms: &[PatchForm]) -> Result<Self> {
        let pieces: Vec<Piece> = forms.iter().flat_map(|f| f.pieces.clone()).collect();
        Self::new(pieces)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece(&self, i: usize) -> Result<&Piece> {
        self.pieces
            .get(i)
            .ok_or_else(|| Error::invalid(format!("form has no patch {i}")))
    }

    /// The form restricted to one of its pieces.
    pub fn restrict(&self, i: usize) -> Result<PatchForm> {
        let piece = self.piece(i)?.clone();
        Ok(Self {
            pieces: vec![piece],
            global: true,
            ..self.clone()
        })
    }

    /// `true` when all pieces agree on their sampled overlaps.
    pub fn is_global(&self) -> bool {
        self.global
    }

    pub fn constant(&self) -> Option<f64> {
        self.constant_density
    }

    pub fn builtin(&self) -> Option<Builtin> {
        self.builtin
    }

    fn tagged(mut self, builtin: Builtin) -> Self {
        self.builtin = Some(builtin);
        self
    }

    /// Index of the first piece defined at `x`.
    pub fn piece_at(&self, x: &Vec3) -> Option<usize> {
        self.pieces.iter().position(|p| p.domain.contains(x))
    }

    fn locate(&self, x: &Vec3) -> Result<&Piece> {
        self.piece_at(x).map(|i| &self.pieces[i]).ok_or_else(|| {
            Error::domain(format!(
                "{:?} lies outside every patch of the form",
                SpherePoint::from_vec(x)
            ))
        })
    }

    pub fn scalar_at(&self, x: &Vec3) -> Result<f64> {
        self.locate(x)?
            .scalar(x)
            .ok_or_else(|| Error::invalid("not a 0-form"))
    }

    pub fn covector_at(&self, x: &Vec3) -> Result<Vec3> {
        self.locate(x)?
            .covector(x)
            .ok_or_else(|| Error::invalid("not a 1-form"))
    }

    pub fn density_at(&self, x: &Vec3) -> Result<f64> {
        self.locate(x)?
            .density(x)
            .ok_or_else(|| Error::invalid("not a 2-form"))
    }

    /// Polar components at a point: `[f]`, `[a_θ, a_φ]` or `[f]` with `F = f dθ∧dφ`.
    pub fn components(&self, p: &SpherePoint) -> Result<Vec<f64>> {
        let x = p.unit();
        let piece = self.locate(&x)?;
        Ok(match &piece.expr {
            Expr::Scalar { f, .. } => vec![f(&x)],
            Expr::Covector { a, .. } => {
                let (xt, xp) = coordinate_tangents(&x);
                let v = a(&x);
                vec![v.dot(&xt), v.dot(&xp)]
            }
            Expr::Density { f } => vec![f(&x) * p.theta.sin()],
        })
    }
}

/// Largest disagreement between pieces at lattice points they share.
fn overlap_discrepancy(pieces: &[Piece]) -> f64 {
    if pieces.len() < 2 {
        return 0.0;
    }
    fibonacci_lattice(GLOBAL_CHECK_SAMPLES, 0)
        .iter()
        .map(|x| {
            let vals: Vec<Vec<f64>> = pieces
                .iter()
                .filter(|p| p.domain.contains(x))
                .map(|p| p.values(x))
                .collect();
            vals.iter()
                .skip(1)
                .flat_map(|v| v.iter().zip(&vals[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Tangent vector field `k (c × x) / (1 + c·x)`: the potential of `k · (area form)` that is
/// regular everywhere except at `−c`. For `c = ±ẑ` it is `k(1 ∓ cos θ) dφ`, up to sign.
pub fn cap_potential(c: Vec3, k: f64) -> CovectorFn {
    Arc::new(move |x: &Vec3| c.cross(x) * (k / (1.0 + c.dot(x))))
}

fn rotated_wu_yang(patch: CapPatch, k: f64) -> PatchForm {
    let d: ScalarFn = Arc::new(move |_: &Vec3| k);
    PatchForm::single(
        Domain::Cap(patch),
        Expr::Covector {
            a: cap_potential(patch.center(), k),
            d: Some(d),
        },
    )
}

/// The closed-form primitive of `k · (area form)` on a cap.
pub fn cap_primitive(patch: CapPatch, k: f64) -> PatchForm {
    rotated_wu_yang(patch, k)
}

/// `A_N = G(1 − cos θ) dφ` on the north cap and `A_S = −G(1 + cos θ) dφ` on the south cap
/// of the polar cover.
pub fn wu_yang_potentials(g: f64) -> Result<(PatchForm, PatchForm)> {
    if !g.is_finite() {
        return Err(Error::invalid("monopole strength must be finite"));
    }
    let cover = CapCover::wu_yang();
    let [north, south] = [cover.patches()[0], cover.patches()[1]];
    Ok((
        rotated_wu_yang(north, g).tagged(Builtin::WuYangNorth),
        rotated_wu_yang(south, g).tagged(Builtin::WuYangSouth),
    ))
}

/// Monopole field strength `F = G sin θ dθ∧dφ` on the whole sphere.
pub fn monopole_curvature(g: f64) -> Result<PatchForm> {
    if !g.is_finite() {
        return Err(Error::invalid("monopole strength must be finite"));
    }
    Ok(PatchForm::constant_density(g).tagged(Builtin::MonopoleF))
}

/// Hopf curvature `½ sin θ dφ∧dθ = −½ sin θ dθ∧dφ`.
pub fn hopf_curvature() -> PatchForm {
    PatchForm::constant_density(-0.5).tagged(Builtin::HopfF)
}

/// `dw`: exact when the piece carries its derivative, otherwise by central differences.
pub fn exterior_derivative(w: &PatchForm) -> Result<PatchForm> {
    if w.degree >= 2 {
        return Err(Error::invalid(
            "the exterior derivative of a 2-form on S² is not taken",
        ));
    }
    let pieces = w
        .pieces
        .iter()
        .map(|p| Piece {
            domain: p.domain,
            expr: derivative(&p.expr),
        })
        .collect();
    let constant_density = if w.degree == 1 && w.pieces.iter().all(|p| is_analytic(&p.expr)) {
        let x = Vec3::z();
        match &w.pieces[0].expr {
            Expr::Covector { d: Some(d), .. }
                if w.pieces.iter().all(|p| same_constant(&p.expr, d(&x))) =>
            {
                Some(d(&x))
            }
            _ => None,
        }
    } else {
        None
    };
    Ok(PatchForm {
        degree: w.degree + 1,
        pieces,
        global: w.global || w.degree == 1 && constant_density.is_some(),
        constant_density,
        builtin: None,
    })
}

fn is_analytic(e: &Expr) -> bool {
    matches!(
        e,
        Expr::Covector { d: Some(_), .. } | Expr::Scalar { d: Some(_), .. }
    )
}

/// Whether a covector's exact derivative is a known constant density.
fn same_constant(e: &Expr, k: f64) -> bool {
    match e {
        Expr::Covector { d: Some(d), .. } => [Vec3::z(), Vec3::x(), -Vec3::z(), Vec3::y()]
            .iter()
            .all(|x| d(x) == k),
        _ => false,
    }
}

fn derivative(e: &Expr) -> Expr {
    match e {
        Expr::Scalar { d: Some(d), .. } => {
            let zero: ScalarFn = Arc::new(|_: &Vec3| 0.0);
            Expr::Covector {
                a: d.clone(),
                d: Some(zero),
            }
        }
        Expr::Scalar { f, d: None } => Expr::Covector {
            a: fd_gradient(f.clone()),
            d: None,
        },
        Expr::Covector { d: Some(d), .. } => Expr::Density { f: d.clone() },
        Expr::Covector { a, d: None } => Expr::Density {
            f: fd_curl(a.clone()),
        },
        Expr::Density { .. } => unreachable!("degree checked by caller"),
    }
}

/// Five-point derivative of `f` at 0 with step [`FD_STEP`]; fourth order, so nested
/// differences (`d` of a differenced 1-form) stay far below 1e-6.
fn five_point(f: impl Fn(f64) -> f64) -> f64 {
    let h = FD_STEP;
    (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h)
}

/// Gradient of a 0-form by finite differences in the gnomonic chart at each point.
pub fn fd_gradient(f: ScalarFn) -> CovectorFn {
    Arc::new(move |x: &Vec3| {
        let chart = GnomonicChart::at(x);
        let du = five_point(|t| f(&chart.point(t, 0.0)));
        let dv = five_point(|t| f(&chart.point(0.0, t)));
        chart.e1 * du + chart.e2 * dv
    })
}

/// Density of `d(a·dx)` by finite differences of the chart components `A_u`, `A_v`.
pub fn fd_curl(a: CovectorFn) -> ScalarFn {
    Arc::new(move |x: &Vec3| {
        let chart = GnomonicChart::at(x);
        let comp = |u: f64, v: f64| {
            let (y, pu, pv) = chart.point_and_partials(u, v);
            let w = a(&y);
            (w.dot(&pu), w.dot(&pv))
        };
        five_point(|t| comp(t, 0.0).1) - five_point(|t| comp(0.0, t).0)
    })
}

/// Largest `|F₁ − F₂|` between two 2-forms over the given points.
pub fn max_density_gap(a: &PatchForm, b: &PatchForm, points: &[Vec3]) -> Result<f64> {
    points.iter().try_fold(0.0f64, |m, x| {
        Ok(m.max((a.density_at(x)? - b.density_at(x)?).abs()))
    })
}

/// Tangential projection, for building user covector fields from ambient vectors.
pub fn covector_from_ambient(v: impl Fn(&Vec3) -> Vec3 + Send + Sync + 'static) -> CovectorFn {
    Arc::new(move |x: &Vec3| tangential(x, &v(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unit_from_angles;
    use std::f64::consts::PI;

    fn at(theta: f64, phi: f64) -> SpherePoint {
        SpherePoint::new(theta, phi).unwrap()
    }

    #[test]
    fn wu_yang_components_on_the_equator() {
        let (n, s) = wu_yang_potentials(1.0).unwrap();
        for phi in [0.0, 1.0, 4.0] {
            let cn = n.components(&at(PI / 2.0, phi)).unwrap();
            let cs = s.components(&at(PI / 2.0, phi)).unwrap();
            assert!(cn[0].abs() < 1e-15 && (cn[1] - 1.0).abs() < 1e-15);
            assert!(cs[0].abs() < 1e-15 && (cs[1] + 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn wu_yang_difference_is_two_g_dphi() {
        let g = 0.7;
        let (n, s) = wu_yang_potentials(g).unwrap();
        for theta in [0.45 * PI, 0.5 * PI, 0.55 * PI] {
            let p = at(theta, 2.0);
            let d = n.components(&p).unwrap()[1] - s.components(&p).unwrap()[1];
            assert!((d - 2.0 * g).abs() < 1e-14);
            let a_n = n.components(&p).unwrap()[1];
            assert!((a_n - g * (1.0 - theta.cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_strength_is_zero() {
        let (n, s) = wu_yang_potentials(0.0).unwrap();
        let x = unit_from_angles(1.5, 1.0);
        assert_eq!(n.covector_at(&x).unwrap().norm(), 0.0);
        assert_eq!(s.covector_at(&x).unwrap().norm(), 0.0);
    }

    #[test]
    fn curvature_of_wu_yang_is_gauge_invariant() {
        for g in [1.0, -0.3, 2.5] {
            let (n, s) = wu_yang_potentials(g).unwrap();
            let (fn_, fs) = (
                exterior_derivative(&n).unwrap(),
                exterior_derivative(&s).unwrap(),
            );
            assert_eq!(fn_.constant(), Some(g));
            for theta in [0.45 * PI, 0.5 * PI, 0.55 * PI] {
                let p = at(theta, 0.3);
                let (a, b) = (
                    fn_.components(&p).unwrap()[0],
                    fs.components(&p).unwrap()[0],
                );
                assert!((a - g * theta.sin()).abs() < 1e-12);
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fd_curl_matches_analytic() {
        let (n, _) = wu_yang_potentials(1.0).unwrap();
        let Expr::Covector { a, .. } = &n.pieces()[0].expr else {
            unreachable!()
        };
        let curl = fd_curl(a.clone());
        for theta in [0.1, 0.8, 1.5, 1.7] {
            let x = unit_from_angles(theta, 0.4);
            assert!((curl(&x) - 1.0).abs() < 1e-8, "{}", curl(&x));
        }
        // the north pole is regular in ambient form
        assert!((curl(&Vec3::z()) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn d_of_constant_and_of_two_form() {
        let c = PatchForm::from_scalar(Domain::Sphere, |_, _| 3.0);
        let dc = exterior_derivative(&c).unwrap();
        assert!(dc.covector_at(&unit_from_angles(1.0, 2.0)).unwrap().norm() < 1e-9);
        assert!(exterior_derivative(&hopf_curvature()).is_err());
    }

    #[test]
    fn user_coordinates_round_trip() {
        let dom = Domain::Cap(CapPatch::new(Vec3::x(), 1.0).unwrap());
        let w = PatchForm::from_coordinates(dom, |t, p| t * p, |t, _| t.cos());
        let p = at(1.4, 0.3);
        let c = w.components(&p).unwrap();
        assert!((c[0] - 1.4 * 0.3).abs() < 1e-13);
        assert!((c[1] - 1.4f64.cos()).abs() < 1e-13);
        let f = PatchForm::from_coefficient(dom, |t, p| t + p);
        assert!((f.components(&p).unwrap()[0] - 1.7).abs() < 1e-13);
    }

    #[test]
    fn hopf_coefficient() {
        let c = hopf_curvature().components(&at(PI / 2.0, 1.0)).unwrap();
        assert!((c[0] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn glue_detects_disagreement() {
        let (n, s) = wu_yang_potentials(1.0).unwrap();
        assert!(!PatchForm::glue(&[n.clone(), s.clone()])
            .unwrap()
            .is_global());
        let f = PatchForm::glue(&[
            exterior_derivative(&n).unwrap(),
            exterior_derivative(&s).unwrap(),
        ])
        .unwrap();
        assert!(f.is_global());
        assert!(PatchForm::glue(&[n, f]).is_err());
    }

    #[test]
    fn builtin_names() {
        for b in Builtin::ALL {
            assert_eq!(Builtin::from_name(b.name()).unwrap(), b);
            assert!(b.form(1.0).is_ok());
        }
        assert!(Builtin::from_name("nope").is_err());
    }
}
