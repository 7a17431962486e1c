#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcreg_core::catalog::{affine_map, power_spiral, radial_stretch, spiral_map, CatalogEntry};
use qcreg_core::C64;

/// Complete elliptic integral of the second kind E(m) by the AGM.
pub fn ellip_e(m: f64) -> f64 {
    let (mut a, mut b) = (1.0_f64, (1.0 - m).sqrt());
    let mut c = m.sqrt();
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    for _ in 0..40 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        pow *= 2.0;
        sum += pow * c * c;
        a = an;
        b = bn;
        if c.abs() < 1e-17 {
            break;
        }
    }
    let k = PI / (2.0 * a);
    k * (1.0 - sum)
}

/// Perimeter of the ellipse with semi-axes a >= b.
pub fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    4.0 * a * ellip_e(1.0 - (b / a).powi(2))
}

/// The 2:1 ellipse that affine(1, 1/3) makes of the unit disk.
pub fn affine_third_defect() -> f64 {
    let p = ellipse_perimeter(4.0 / 3.0, 2.0 / 3.0);
    let area = PI * (4.0 / 3.0) * (2.0 / 3.0);
    p * p / (4.0 * PI * area) - 1.0
}

pub fn catalog_matrix() -> Vec<CatalogEntry> {
    let mut v = Vec::new();
    for k in [1.5, 2.0, 5.0] {
        v.push(radial_stretch(k).unwrap());
    }
    for g in [0.5, 1.0, 2.0] {
        v.push(spiral_map(g).unwrap());
    }
    v.push(affine_map(C64::new(1.0, 0.0), C64::new(1.0 / 3.0, 0.0)).unwrap());
    v.push(power_spiral(0.5, 1.0).unwrap());
    v
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the annulus 1e-3 < |z| < 2.
pub fn random_point(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(rng.gen_range(1e-3..2.0), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Smooth random field with |mu| <= k: a normalized sum of plane waves,
/// blended with the radial-stretch direction -z / zbar.
pub fn random_field(rng: &mut ChaCha8Rng, k: f64) -> qcreg_core::BeltramiField {
    let waves: Vec<(C64, f64, f64)> = (0..4)
        .map(|_| {
            (
                C64::from_polar(rng.gen_range(0.1..1.0), rng.gen_range(0.0..std::f64::consts::TAU)),
                rng.gen_range(-6.0..6.0),
                rng.gen_range(-6.0..6.0),
            )
        })
        .collect();
    let total: f64 = waves.iter().map(|w| w.0.norm()).sum();
    let blend = rng.gen_range(0.0..1.0);
    let scale = k * rng.gen_range(0.2..1.0);
    qcreg_core::BeltramiField::closed_form(k, move |z| {
        let wave: C64 = waves
            .iter()
            .map(|&(c, a, b)| c * C64::from_polar(1.0, a * z.re + b * z.im))
            .sum::<C64>()
            / total;
        let radial = if z.norm_sqr() > 0.0 { -z / z.conj() } else { C64::new(0.0, 0.0) };
        scale * (blend * radial + (1.0 - blend) * wave)
    })
}

/// |mu| = k everywhere with a random smooth phase.
pub fn random_unimodular_field(rng: &mut ChaCha8Rng, k: f64) -> qcreg_core::BeltramiField {
    let (a, b, c, d) = (
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    qcreg_core::BeltramiField::closed_form(k, move |z| {
        C64::from_polar(k, a * z.re + b * z.im + c * (z.re * z.im) + d)
    })
}
