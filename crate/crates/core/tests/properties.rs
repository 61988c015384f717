mod common;

use cech_monopole::cochain::{Cochain, CochainValues};
use cech_monopole::cohomology::cohomology;
use cech_monopole::cover::{CapCover, CoefficientTag};
use cech_monopole::forms::{exterior_derivative, Domain, PatchForm};
use cech_monopole::geometry::fibonacci_lattice;
use cech_monopole::nerve::nerve;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn coboundary_squares_to_zero(seed in any::<u64>()) {
        let n = common::random_nerve(seed);
        prop_assert!(common::delta_squared_vanishes(&n, seed));
    }

    #[test]
    fn smith_form_matches_minors(rows in (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-9i64..=9, c), r)
    })) {
        prop_assert!(common::snf_matches_minors(&rows));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn euler_characteristic_agrees(seed in any::<u64>()) {
        let n = common::random_nerve(seed);
        let r = cohomology(&n, CoefficientTag::Real).unwrap();
        let chi: i64 = r.betti.iter().enumerate().map(|(p, &b)| if p % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        prop_assert_eq!(chi, n.euler_characteristic());
        // with integer coefficients the free ranks agree
        prop_assert_eq!(cohomology(&n, CoefficientTag::Integer).unwrap().betti, r.betti);
    }

    #[test]
    fn permuted_tuples_read_with_sign(values in prop::collection::vec(-100i64..100, 3)) {
        let n = nerve(&CapCover::three_caps(), 2, 20_000, 0).unwrap();
        let c = Cochain::new(&n, 1, CochainValues::Integer(values.clone())).unwrap();
        for (i, s) in n.simplices(1).iter().enumerate() {
            prop_assert_eq!(c.integer_at(&n, &[s[0], s[1]]), Some(values[i]));
            prop_assert_eq!(c.integer_at(&n, &[s[1], s[0]]), Some(-values[i]));
        }
        prop_assert_eq!(c.integer_at(&n, &[0, 0]), Some(0));
    }

    #[test]
    fn exterior_derivative_squares_to_zero(a in -2.0f64..2.0, b in -2.0f64..2.0, k in 1u32..4) {
        let f = PatchForm::from_scalar(Domain::Sphere, move |theta, phi| {
            a * theta.cos() * (k as f64 * phi).sin() + b * (theta.sin() * phi.cos()).exp()
        });
        let ddf = exterior_derivative(&exterior_derivative(&f).unwrap()).unwrap();
        for x in fibonacci_lattice(200, 1) {
            // stay away from the poles, where (θ, φ) is singular
            if x.z.abs() < 0.95 {
                prop_assert!(ddf.density_at(&x).unwrap().abs() < 1e-6);
            }
        }
    }
}
