mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;

use qcreg_core::catalog::{affine_map, identity, radial_stretch, spiral_map};
use qcreg_core::geometry::{
    image_area_green, image_area_jacobian, isoperimetric_defect, isoperimetric_ratio, phi_profile,
    quasicircle_length_direct, quasicircle_length_formula, ProfileConfig, RadialConfig,
};
use qcreg_core::{CircleSpec, QuadratureConfig, C64};

const RADII: [f64; 4] = [0.1, 0.25, 0.5, 1.0];

#[test]
fn agm_oracle_is_sane() {
    assert_abs_diff_eq!(common::ellip_e(0.0), PI / 2.0, epsilon = 1e-15);
    assert_abs_diff_eq!(common::ellip_e(0.5), 1.3506438810476755, epsilon = 1e-13);
    assert_abs_diff_eq!(common::ellip_e(0.75), 1.2110560275684594, epsilon = 1e-13);
    assert_abs_diff_eq!(common::ellipse_perimeter(1.0, 1.0), 2.0 * PI, epsilon = 1e-14);
}

#[test]
fn ellipse_length_matches_agm_oracle() {
    let e = affine_map(C64::new(1.0, 0.0), C64::new(1.0 / 3.0, 0.0)).unwrap();
    let cfg = QuadratureConfig::fixed(8192);
    for t in RADII {
        let c = CircleSpec::origin(t).unwrap();
        let want = common::ellipse_perimeter(4.0 / 3.0 * t, 2.0 / 3.0 * t);
        let got = quasicircle_length_direct(e.map.as_ref(), &c, &cfg).unwrap();
        assert!((got - want).abs() <= 1e-12 * want, "t={t}: {got} vs {want}");
    }
}

#[test]
fn both_length_routes_agree_on_catalog() {
    let cfg = QuadratureConfig::fixed(8192);
    for e in common::catalog_matrix() {
        for t in RADII {
            let c = CircleSpec::origin(t).unwrap();
            let d = quasicircle_length_direct(e.map.as_ref(), &c, &cfg).unwrap();
            let f = quasicircle_length_formula(e.map.as_ref(), &c, &cfg).unwrap();
            assert!((d - f).abs() <= 1e-6 * d, "{} t={t}: {d} vs {f}", e.spec());
        }
    }
}

#[test]
fn both_area_routes_agree_on_catalog() {
    let cfg = QuadratureConfig::default();
    let radial = RadialConfig::default();
    for e in common::catalog_matrix() {
        for t in RADII {
            let c = CircleSpec::origin(t).unwrap();
            let g = image_area_green(e.map.as_ref(), &c, &cfg).unwrap();
            let j = image_area_jacobian(e.map.as_ref(), &c, &radial, &cfg).unwrap();
            assert!((g - j).abs() <= 1e-6 * g, "{} t={t}: {g} vs {j}", e.spec());
        }
    }
}

#[test]
fn off_center_circles_agree_too() {
    let cfg = QuadratureConfig::fixed(8192);
    let radial = RadialConfig::default();
    for e in common::catalog_matrix() {
        let c = CircleSpec::new(C64::new(0.3, -0.2), 0.25).unwrap();
        let d = quasicircle_length_direct(e.map.as_ref(), &c, &cfg).unwrap();
        let f = quasicircle_length_formula(e.map.as_ref(), &c, &cfg).unwrap();
        assert!((d - f).abs() <= 1e-6 * d, "{}", e.spec());
        let g = image_area_green(e.map.as_ref(), &c, &cfg).unwrap();
        let j = image_area_jacobian(e.map.as_ref(), &c, &radial, &cfg).unwrap();
        assert!((g - j).abs() <= 1e-6 * g, "{}", e.spec());
    }
}

#[test]
fn isoperimetric_inequality_holds() {
    let cfg = QuadratureConfig::default();
    let mut rng = common::rng(3);
    for e in common::catalog_matrix() {
        for _ in 0..20 {
            let z = common::random_point(&mut rng) * 0.5;
            let c = CircleSpec::new(z, 0.05 + 0.4 * rand::Rng::gen::<f64>(&mut rng)).unwrap();
            let ratio = isoperimetric_ratio(e.map.as_ref(), &c, &cfg).unwrap();
            assert!(ratio <= 1.0 + 1e-6, "{}: {ratio}", e.spec());
        }
        for t in RADII {
            assert!(isoperimetric_defect(e.map.as_ref(), t, &cfg).unwrap() >= -1e-6);
        }
    }
}

#[test]
fn ellipse_defect_matches_oracle() {
    let e = affine_map(C64::new(1.0, 0.0), C64::new(1.0 / 3.0, 0.0)).unwrap();
    let want = common::affine_third_defect();
    assert_abs_diff_eq!(want, 0.18882714427582514, epsilon = 1e-12);
    for t in RADII {
        let got = isoperimetric_defect(e.map.as_ref(), t, &QuadratureConfig::default()).unwrap();
        assert_abs_diff_eq!(got, want, epsilon = 1e-9);
    }
}

#[test]
fn radial_stretch_phi_is_a_power_law() {
    let radii: Vec<f64> = qcreg_core::log_spaced(1e-3, 1.0, 12).unwrap();
    for big_k in [1.5, 2.0, 5.0] {
        let e = radial_stretch(big_k).unwrap();
        let p = phi_profile(e.map.as_ref(), &radii, &ProfileConfig::default()).unwrap();
        for (t, phi) in p.phi_samples() {
            let want = PI * t.powf(2.0 / big_k);
            assert!((phi / want - 1.0).abs() <= 1e-6, "K={big_k} t={t}");
        }
        assert!(p.delta.iter().all(|d| d.abs() <= 1e-9));
        assert!(p.phi.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn profiles_are_monotone_and_nonnegative() {
    let radii: Vec<f64> = qcreg_core::log_spaced(1e-2, 1.0, 10).unwrap();
    for e in common::catalog_matrix().into_iter().chain([identity(), spiral_map(-1.5).unwrap()]) {
        let p = phi_profile(e.map.as_ref(), &radii, &ProfileConfig::default()).unwrap();
        assert!(p.phi.windows(2).all(|w| w[1] >= w[0]), "{}", e.spec());
        assert!(p.delta.iter().all(|&d| d >= -1e-6), "{}", e.spec());
        assert!(p.length_direct.iter().all(|&l| l > 0.0));
    }
}
