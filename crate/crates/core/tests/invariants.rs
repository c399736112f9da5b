use affine_bv::corpus;
use affine_bv::functionals::{affine_perimeter, inequality_report};
use affine_bv::geometry::{vector, LinearMap};
use affine_bv::io::{polytope_from_json, polytope_to_json};
use affine_bv::symmetrize::steiner;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn json_round_trip(seed in any::<u64>(), star in any::<bool>()) {
        let mut rng = corpus::rng(seed);
        let p = if star { corpus::random_star_polygon(&mut rng, 9) } else { corpus::random_convex_polygon(&mut rng, 12) }.unwrap();
        let once = polytope_from_json(&polytope_to_json(&p)).unwrap();
        let twice = polytope_from_json(&polytope_to_json(&once)).unwrap();
        prop_assert_eq!(p.vertices().len(), twice.vertices().len());
        for (a, b) in p.vertices().iter().zip(twice.vertices()) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn affine_perimeter_is_unimodular_invariant(seed in any::<u64>(), a in 0.2f64..5.0, s in -3.0f64..3.0, tx in -10.0f64..10.0) {
        let mut rng = corpus::rng(seed);
        let p = corpus::random_convex_polygon(&mut rng, 10).unwrap();
        let map = LinearMap::new(
            nalgebra::DMatrix::from_row_slice(2, 2, &[a, s, 0.0, 1.0 / a]),
            vector(&[tx, -tx]),
        ).unwrap();
        let before = affine_perimeter(&p).unwrap();
        let after = affine_perimeter(&map.apply_map(&p).unwrap()).unwrap();
        prop_assert!((after / before - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn petty_ratio_at_most_one(seed in any::<u64>(), star in any::<bool>()) {
        let mut rng = corpus::rng(seed);
        let p = if star { corpus::random_star_polygon(&mut rng, 8) } else { corpus::random_convex_polygon(&mut rng, 15) }.unwrap();
        let r = inequality_report(&p).unwrap();
        prop_assert!(r.petty_ratio <= 1.0 + 1e-9);
        prop_assert!(r.slack_e12p >= -1e-9 * r.perimeter);
    }

    #[test]
    fn steiner_keeps_volume(seed in any::<u64>(), angle in 0.0f64..std::f64::consts::PI) {
        let mut rng = corpus::rng(seed);
        let p = corpus::random_star_polygon(&mut rng, 8).unwrap();
        let r = steiner(&p, &vector(&[angle.cos(), angle.sin()])).unwrap();
        prop_assert!(r.volume_error() <= 1e-10);
        prop_assert!(r.perimeter_after <= r.perimeter_before + 1e-9);
    }
}
