//! Adaptive composite Gauss–Legendre quadrature.
//!
//! Each interval is integrated with a fixed-order rule and compared against the sum of its
//! two halves; intervals that disagree by more than their share of the tolerance are
//! bisected. The recursion order is fixed, so results are bit-for-bit reproducible.

use std::cell::Cell;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

/// Points per panel of the adaptive rule.
const ORDER: usize = 10;
/// Points of the fixed rule used for short arcs.
const FIXED_ORDER: usize = 12;
/// Bisection depth after which a panel is accepted regardless of its estimate.
const MAX_DEPTH: u32 = 40;

fn rule(order: usize, cell: &'static OnceLock<Vec<(f64, f64)>>) -> &'static [(f64, f64)] {
    cell.get_or_init(|| {
        let n = NonZeroUsize::new(order).expect("positive order");
        GaussLegendre::new(n).as_node_weight_pairs().to_vec()
    })
}

fn panel_rule() -> &'static [(f64, f64)] {
    static CELL: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    rule(ORDER, &CELL)
}

fn fixed_rule() -> &'static [(f64, f64)] {
    static CELL: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    rule(FIXED_ORDER, &CELL)
}

fn panel(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    half * panel_rule()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// A quadrature value with its estimated absolute error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

impl std::ops::Add for Quad {
    type Output = Quad;

    fn add(self, rhs: Quad) -> Quad {
        Quad {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

/// `∫_a^b f` to absolute tolerance `tol`.
pub fn adaptive(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Quad {
    if a == b {
        return Quad::default();
    }
    let whole = panel(&mut f, a, b);
    refine(&mut f, a, b, whole, tol.max(f64::MIN_POSITIVE), 0)
}

fn refine(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Quad {
    let m = (a + b) / 2.0;
    let left = panel(f, a, m);
    let right = panel(f, m, b);
    let error = (left + right - whole).abs();
    if error <= tol || depth >= MAX_DEPTH || !error.is_finite() {
        return Quad {
            value: left + right,
            error,
        };
    }
    refine(f, a, m, left, tol / 2.0, depth + 1) + refine(f, m, b, right, tol / 2.0, depth + 1)
}

/// `∫∫ f(u, v)` over a rectangle, as an adaptive outer integral of adaptive inner integrals.
pub fn adaptive_2d(
    mut f: impl FnMut(f64, f64) -> f64,
    (u0, u1): (f64, f64),
    (v0, v1): (f64, f64),
    tol: f64,
) -> Quad {
    let inner_tol = tol / (2.0 * (u1 - u0).abs().max(1.0));
    let inner_error = Cell::new(0.0f64);
    let outer = adaptive(
        |u| {
            let q = adaptive(|v| f(u, v), v0, v1, inner_tol);
            inner_error.set(inner_error.get().max(q.error));
            q.value
        },
        u0,
        u1,
        tol / 2.0,
    );
    Quad {
        value: outer.value,
        error: outer.error + inner_error.get() * (u1 - u0).abs(),
    }
}

/// `∫_0^1 f` with one fixed Gauss–Legendre panel, for short smooth paths.
pub fn fixed_line(f: impl Fn(f64) -> f64) -> f64 {
    0.5 * fixed_rule()
        .iter()
        .map(|&(x, w)| w * f(0.5 + 0.5 * x))
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_and_trig() {
        let q = adaptive(|x| x.powi(7) - 3.0 * x, 0.0, 2.0, 1e-12);
        assert!((q.value - (32.0 - 6.0)).abs() < 1e-11);
        let q = adaptive(f64::sin, 0.0, PI, 1e-12);
        assert!((q.value - 2.0).abs() < 1e-12);
        assert!(q.error < 1e-12);
    }

    #[test]
    fn resolves_a_kink() {
        let q = adaptive(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-10);
        assert!((q.value - (0.045 + 0.245)).abs() < 1e-9);
    }

    #[test]
    fn halving_tolerance_is_consistent() {
        let f = |x: f64| (5.0 * x).cos() * (-x * x).exp();
        let coarse = adaptive(f, -2.0, 3.0, 1e-6).value;
        let fine = adaptive(f, -2.0, 3.0, 5e-7).value;
        assert!((coarse - fine).abs() <= 1e-6);
    }

    #[test]
    fn sphere_area_in_two_dimensions() {
        let q = adaptive_2d(|t, _| t.sin(), (0.0, PI), (0.0, 2.0 * PI), 1e-10);
        assert!((q.value - 4.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn empty_interval_and_fixed_rule() {
        assert_eq!(adaptive(|x| x, 1.0, 1.0, 1e-9).value, 0.0);
        assert!((fixed_line(|t| t.powi(5)) - 1.0 / 6.0).abs() < 1e-15);
    }
}
