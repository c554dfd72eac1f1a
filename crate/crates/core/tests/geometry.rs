use std::f64::consts::TAU;

use majorant_core::geometry::{
    disk, half_plane, hyperbolic_disc_euclidean, hyperbolic_distance, mobius_involution, pseudo_distance, Point,
};
use majorant_core::Domain;
use num_complex::Complex64;
use proptest::prelude::*;

fn disk_point() -> impl Strategy<Value = Complex64> {
    (0.0f64..0.95, 0.0f64..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn half_plane_point() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, -4.0f64..1.0).prop_map(|(x, ly)| Complex64::new(x, 10f64.powf(ly)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pseudo_distance_is_mobius_invariant(a in disk_point(), z in disk_point(), w in disk_point()) {
        let (a, z, w) = (Point::new(a, Domain::Disk).unwrap(),
                         Point::new(z, Domain::Disk).unwrap(),
                         Point::new(w, Domain::Disk).unwrap());
        let before = pseudo_distance(&z, &w).unwrap();
        let after = pseudo_distance(&mobius_involution(&a, &z).unwrap(), &mobius_involution(&a, &w).unwrap()).unwrap();
        prop_assert!((before - after).abs() <= 1e-12);
    }

    #[test]
    fn rho_is_a_metric(z in disk_point(), w in disk_point(), v in disk_point()) {
        let zw = disk::hyperbolic_distance(z, w);
        let wz = disk::hyperbolic_distance(w, z);
        prop_assert!(zw >= 0.0);
        prop_assert!((zw - wz).abs() <= 1e-12 * (1.0 + zw));
        prop_assert_eq!(disk::hyperbolic_distance(z, z), 0.0);
        let via = disk::hyperbolic_distance(z, v) + disk::hyperbolic_distance(v, w);
        prop_assert!(zw <= via + 1e-12);
    }

    #[test]
    fn half_plane_rho_is_a_metric(z in half_plane_point(), w in half_plane_point(), v in half_plane_point()) {
        let zw = half_plane::hyperbolic_distance(z, w);
        let via = half_plane::hyperbolic_distance(z, v) + half_plane::hyperbolic_distance(v, w);
        prop_assert!(zw <= via + 1e-12 * (1.0 + via));
        prop_assert!((zw - half_plane::hyperbolic_distance(w, z)).abs() <= 1e-12 * (1.0 + zw));
    }

    #[test]
    fn twice_rho_dominates_twice_d(z in disk_point(), w in disk_point()) {
        let d = disk::pseudo_distance(z, w);
        prop_assert!(2.0 * disk::hyperbolic_distance(z, w) >= 2.0 * d - 1e-15);
        let (zp, wp) = (Point::new(z, Domain::Disk).unwrap(), Point::new(w, Domain::Disk).unwrap());
        prop_assert!(hyperbolic_distance(&zp, &wp).unwrap() >= pseudo_distance(&zp, &wp).unwrap() - 1e-15);
    }

    #[test]
    fn euclidean_disc_boundary_is_at_distance_r(c in disk_point(), r in 0.01f64..3.0, t in 0.0f64..TAU) {
        let center = Point::new(c, Domain::Disk).unwrap();
        let (e, radius) = hyperbolic_disc_euclidean(&center, r).unwrap();
        let b = e + Complex64::from_polar(radius, t);
        prop_assume!(b.norm() < 1.0 - 1e-9);
        prop_assert!((disk::hyperbolic_distance(c, b) - r).abs() <= 1e-9);
    }

    #[test]
    fn half_plane_disc_boundary_is_at_distance_r(c in half_plane_point(), r in 0.01f64..3.0, t in 0.0f64..TAU) {
        let (e, radius) = half_plane::disc_euclidean(c, r);
        let b = e + Complex64::from_polar(radius, t);
        prop_assume!(b.im > 0.0);
        prop_assert!((half_plane::hyperbolic_distance(c, b) - r).abs() <= 1e-9 * (1.0 + r));
    }
}

#[test]
fn disk_and_half_plane_agree_through_the_cayley_map() {
    let cayley = |z: Complex64| Complex64::i() * (Complex64::new(1.0, 0.0) + z) / (Complex64::new(1.0, 0.0) - z);
    let pairs = [
        (Complex64::new(0.1, 0.2), Complex64::new(-0.5, 0.3)),
        (Complex64::new(0.9, 0.0), Complex64::new(0.0, -0.99)),
        (Complex64::new(0.0, 0.0), Complex64::new(0.7, 0.7)),
    ];
    for (z, w) in pairs {
        let a = disk::hyperbolic_distance(z, w);
        let b = half_plane::hyperbolic_distance(cayley(z), cayley(w));
        assert!((a - b).abs() <= 1e-10 * (1.0 + a), "{a} vs {b}");
    }
}
