mod common;

use std::f64::consts::TAU;

use proptest::prelude::*;

use qcreg_core::quadrature::{angular_average, circular_average, sup_over_circles};
use qcreg_core::{CircleSpec, DomainSpec, OuterDomain, QuadratureConfig, C64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn trigonometric_polynomials_are_exact(
        c0 in -3.0f64..3.0,
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20),
        shift in 0.0f64..TAU,
    ) {
        // Degree < nodes / 2 = 128 for the smallest fixed node count used here.
        let cfg = QuadratureConfig::fixed(256);
        let degrees: Vec<usize> = (0..coeffs.len()).map(|i| 1 + i * 6).collect();
        let got = angular_average(&cfg, |theta| {
            let mut v = c0;
            for (&(a, b), &n) in coeffs.iter().zip(&degrees) {
                let x = n as f64 * (theta + shift);
                v += a * x.cos() + b * x.sin();
            }
            v
        }).unwrap();
        prop_assert!((got - c0).abs() <= 1e-13);
    }

    #[test]
    fn sup_is_permutation_invariant(seed in 0u64..1000) {
        use rand::seq::SliceRandom;
        let mut rng = common::rng(seed);
        let mut centers = vec![C64::new(0.0, 0.0), C64::new(0.1, 0.0), C64::new(0.0, -0.2), C64::new(-0.15, 0.1)];
        let mut radii = vec![0.05, 0.1, 0.2, 0.4, 0.6];
        let f = |c: &CircleSpec| Ok((c.center.re * 3.0 + c.center.im).sin() + c.radius.sqrt());
        let first = sup_over_circles(&DomainSpec::new(centers.clone(), radii.clone(), OuterDomain::unit_disk()).unwrap(), f).unwrap();
        centers.shuffle(&mut rng);
        radii.shuffle(&mut rng);
        radii.sort_by(f64::total_cmp);
        let second = sup_over_circles(&DomainSpec::new(centers, radii, OuterDomain::unit_disk()).unwrap(), f).unwrap();
        prop_assert_eq!(first.value, second.value);
        prop_assert_eq!(first.argmax, second.argmax);
    }
}

#[test]
fn doubling_is_converged_for_catalog_integrands() {
    let cfg = QuadratureConfig::default();
    let mut finer = cfg;
    finer.nodes *= 2;
    for e in common::catalog_matrix() {
        for t in [0.1, 0.5, 1.0] {
            let c = CircleSpec::new(C64::new(0.05, 0.02), t).unwrap();
            let run = |q: &QuadratureConfig| {
                circular_average(&c, q, |theta, z| {
                    qcreg_core::bounds::distortion_integrand(e.field().eval(z), C64::from_polar(1.0, theta))
                })
                .unwrap()
            };
            let (a, b) = (run(&cfg), run(&finer));
            assert!((a - b).abs() <= cfg.rel_tol * a.abs(), "{} t={t}: {a} vs {b}", e.spec());
        }
    }
}
