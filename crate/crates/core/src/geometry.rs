//! Lengths of image curves f(S_t), areas of image disks f(D_t) and the
//! isoperimetric defect, each computed along two independent routes.

use std::f64::consts::{PI, TAU};
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::distortion_integrand;
use crate::error::{QcError, Result};
use crate::plane::{map_mu, CircleSpec, QcMap, C64};
use crate::quadrature::{circular_average, QuadratureConfig};

/// Tangent d/dtheta f(x + rho e^{i theta}).
#[inline]
fn tangent(map: &dyn QcMap, circle: &CircleSpec, theta: f64, z: C64) -> C64 {
    let (fx, fy) = map.partials(z);
    let (s, c) = theta.sin_cos();
    (fy * c - fx * s) * circle.radius
}

/// Length of f(S) from |d gamma / d theta|.
pub fn quasicircle_length_direct(map: &dyn QcMap, circle: &CircleSpec, cfg: &QuadratureConfig) -> Result<f64> {
    let avg = circular_average(circle, cfg, |theta, z| Ok(tangent(map, circle, theta, z).norm()))?;
    Ok(TAU * avg)
}

/// Length of f(S) from the distortion integrand and the Jacobian:
/// the integral of sqrt(|1 - conj(eta)^2 mu|^2 / (1 - |mu|^2)) sqrt(J) rho dtheta.
pub fn quasicircle_length_formula(map: &dyn QcMap, circle: &CircleSpec, cfg: &QuadratureConfig) -> Result<f64> {
    let avg = circular_average(circle, cfg, |theta, z| {
        let mu = map_mu(map, z)?;
        let jac = map.jacobian(z);
        if jac < 0.0 {
            return Err(QcError::NegativeJacobian { z, jacobian: jac });
        }
        let eta = C64::from_polar(1.0, theta);
        Ok((distortion_integrand(mu, eta)? * jac).sqrt() * circle.radius)
    })?;
    Ok(TAU * avg)
}

/// Area enclosed by f(S) from the boundary integral 1/2 ∮ (u dv - v du).
pub fn image_area_green(map: &dyn QcMap, circle: &CircleSpec, cfg: &QuadratureConfig) -> Result<f64> {
    let base = map.value(circle.center);
    let avg = circular_average(circle, cfg, |theta, z| {
        let w = map.value(z) - base;
        Ok((w.conj() * tangent(map, circle, theta, z)).im)
    })?;
    Ok(PI * avg)
}

/// Radial discretization for polar area integrals.
///
/// Radii are r = rho e^{-s} for s in [0, depth], i.e. geometrically graded
/// toward the center; composite Simpson runs on the uniform s grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialConfig {
    #[serde(default = "RadialConfig::default_segments")]
    pub segments: usize,
    #[serde(default = "RadialConfig::default_depth")]
    pub depth: f64,
}

impl RadialConfig {
    const fn default_segments() -> usize {
        2048
    }
    const fn default_depth() -> f64 {
        80.0
    }

    pub fn check(&self) -> Result<()> {
        if self.segments < 16 || !self.segments.is_multiple_of(8) {
            return Err(QcError::InvalidParameter(format!(
                "radial segments must be a multiple of 8 and >= 16, got {}",
                self.segments
            )));
        }
        if !(self.depth > 0.0 && self.depth.is_finite()) {
            return Err(QcError::InvalidParameter("radial depth must be positive".into()));
        }
        Ok(())
    }
}

impl Default for RadialConfig {
    fn default() -> Self {
        Self {
            segments: Self::default_segments(),
            depth: Self::default_depth(),
        }
    }
}

fn simpson(values: &[f64], h: f64, stride: usize) -> f64 {
    let n = (values.len() - 1) / stride;
    let mut acc = values[0] + values[n * stride];
    for i in 1..n {
        acc += values[i * stride] * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h * stride as f64 / 3.0
}

/// Rings are evaluated in blocks of this many segments; integration stops
/// early once a whole block is negligible.
const RING_BLOCK: usize = 256;
const NEGLIGIBLE_RING: f64 = 1e-18;

/// |f(D)| as the polar integral of J_f over the disk.
pub fn image_area_jacobian(
    map: &dyn QcMap,
    disk: &CircleSpec,
    radial: &RadialConfig,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    radial.check()?;
    let n = radial.segments;
    let h = radial.depth / n as f64;
    // Integrand in s: r^2 * (2 pi * mean of J over the circle of radius r).
    let ring = |i: usize| -> Result<f64> {
        let r = disk.radius * (-(i as f64) * h).exp();
        let ring = CircleSpec {
            center: disk.center,
            radius: r,
        };
        let mean_j = circular_average(&ring, cfg, |_, z| {
            let j = map.jacobian(z);
            if j < 0.0 {
                return Err(QcError::NegativeJacobian { z, jacobian: j });
            }
            Ok(j)
        })?;
        Ok(TAU * r * r * mean_j)
    };
    let mut values = vec![ring(0)?];
    let mut peak = values[0];
    while values.len() <= n {
        let start = values.len();
        let end = (start + RING_BLOCK).min(n + 1);
        let block = (start..end).into_par_iter().map(ring).collect::<Result<Vec<f64>>>()?;
        let block_max = block.iter().copied().fold(0.0_f64, f64::max);
        values.extend(block);
        peak = peak.max(block_max);
        if block_max <= NEGLIGIBLE_RING * peak {
            break;
        }
    }
    // Two Richardson levels over Simpson at strides 1, 2, 4.
    let (s1, s2, s4) = (simpson(&values, h, 1), simpson(&values, h, 2), simpson(&values, h, 4));
    let (r1, r2) = (s1 + (s1 - s2) / 15.0, s2 + (s2 - s4) / 15.0);
    let mut area = r1 + (r1 - r2) / 63.0;
    // Remaining tail below the deepest ring, assuming geometric decay in s.
    let (a, b) = (values[values.len() - 2], values[values.len() - 1]);
    if b > 0.0 && a > b {
        area += b * h / (a / b).ln();
    }
    Ok(area)
}

/// 4 pi |f(D)| / H1(f(S))^2 for one circle; at most 1 by the isoperimetric inequality.
pub fn isoperimetric_ratio(map: &dyn QcMap, circle: &CircleSpec, cfg: &QuadratureConfig) -> Result<f64> {
    let len = quasicircle_length_direct(map, circle, cfg)?;
    if !(len >= 1e-14) {
        return Err(QcError::Degenerate(format!(
            "image of circle {:?} has length {len}",
            circle
        )));
    }
    let area = image_area_green(map, circle, cfg)?;
    Ok(4.0 * PI * area / (len * len))
}

/// delta(t) = H1(f(S_t))^2 / (4 pi |f(D_t)|) - 1 for the origin-centered circle.
pub fn isoperimetric_defect(map: &dyn QcMap, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let circle = CircleSpec::origin(t)?;
    let len = quasicircle_length_direct(map, &circle, cfg)?;
    let area = image_area_green(map, &circle, cfg)?;
    if !(area > 0.0) {
        return Err(QcError::Degenerate(format!("image of D_{t} has area {area}")));
    }
    Ok(len * len / (4.0 * PI * area) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub radial: RadialConfig,
    /// Relative agreement required between the two routes for each quantity.
    #[serde(default = "ProfileConfig::default_tol")]
    pub consistency_tol: f64,
}

impl ProfileConfig {
    fn default_tol() -> f64 {
        1e-6
    }
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            radial: RadialConfig::default(),
            consistency_tol: Self::default_tol(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GeometryProfile {
    pub radii: Vec<f64>,
    pub length_direct: Vec<f64>,
    pub length_formula: Vec<f64>,
    pub area_jacobian: Vec<f64>,
    pub area_green: Vec<f64>,
    /// phi(t) = |f(D_t)|.
    pub phi: Vec<f64>,
    /// h(t) = phi(t) / H1(f(S_t))^2.
    pub h: Vec<f64>,
    /// delta(t) = 1 / (4 pi h(t)) - 1.
    pub delta: Vec<f64>,
}

pub const PROFILE_CSV_HEADER: [&str; 8] = [
    "t",
    "len_direct",
    "len_formula",
    "area_jac",
    "area_green",
    "phi",
    "h",
    "delta",
];

impl GeometryProfile {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// (t, phi(t)) pairs.
    pub fn phi_samples(&self) -> Vec<(f64, f64)> {
        self.radii.iter().copied().zip(self.phi.iter().copied()).collect()
    }

    pub fn delta_samples(&self) -> Vec<(f64, f64)> {
        self.radii.iter().copied().zip(self.delta.iter().copied()).collect()
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(PROFILE_CSV_HEADER)?;
        for i in 0..self.len() {
            w.write_record(
                [
                    self.radii[i],
                    self.length_direct[i],
                    self.length_formula[i],
                    self.area_jacobian[i],
                    self.area_green[i],
                    self.phi[i],
                    self.h[i],
                    self.delta[i],
                ]
                .iter()
                .map(|v| v.to_string()),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

struct ProfileRow {
    t: f64,
    ld: f64,
    lf: f64,
    aj: f64,
    ag: f64,
}

fn profile_row(map: &dyn QcMap, t: f64, cfg: &ProfileConfig) -> Result<ProfileRow> {
    let circle = CircleSpec::origin(t)?;
    let q = &cfg.quadrature;
    let ld = quasicircle_length_direct(map, &circle, q)?;
    let lf = quasicircle_length_formula(map, &circle, q)?;
    let aj = image_area_jacobian(map, &circle, &cfg.radial, q)?;
    let ag = image_area_green(map, &circle, q)?;
    Ok(ProfileRow { t, ld, lf, aj, ag })
}

/// phi, h and delta on origin-centered circles, with both length routes and
/// both area routes cross-checked at every radius.
pub fn phi_profile(map: &dyn QcMap, radii: &[f64], cfg: &ProfileConfig) -> Result<GeometryProfile> {
    if radii.is_empty() {
        return Err(QcError::InvalidParameter("profile needs at least one radius".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(QcError::InvalidParameter("profile radii must be positive".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QcError::Unsorted);
    }
    let rows = radii
        .par_iter()
        .enumerate()
        .map(|(i, &t)| match profile_row(map, t, cfg) {
            // Image curve not rectifiable on the nodes at this radius: move
            // one grid step toward a neighbour and retry once.
            Err(QcError::NonFinite { .. }) => {
                let other = radii.get(i + 1).or(i.checked_sub(1).map(|j| &radii[j]));
                match other {
                    Some(&o) => profile_row(map, (t * o).sqrt(), cfg),
                    None => profile_row(map, t * (1.0 - 1e-6), cfg),
                }
            }
            other => other,
        })
        .collect::<Result<Vec<ProfileRow>>>()?;

    let mut p = GeometryProfile::default();
    for row in rows {
        let tol = cfg.consistency_tol;
        if (row.ld - row.lf).abs() > tol * row.ld {
            return Err(QcError::Inconsistent {
                quantity: "length",
                t: row.t,
                first: row.ld,
                second: row.lf,
            });
        }
        if (row.aj - row.ag).abs() > tol * row.ag.abs() {
            return Err(QcError::Inconsistent {
                quantity: "area",
                t: row.t,
                first: row.aj,
                second: row.ag,
            });
        }
        if !(row.aj > 0.0) {
            return Err(QcError::Degenerate(format!("zero image area at t = {}", row.t)));
        }
        let h = row.aj / (row.ld * row.ld);
        p.radii.push(row.t);
        p.length_direct.push(row.ld);
        p.length_formula.push(row.lf);
        p.area_jacobian.push(row.aj);
        p.area_green.push(row.ag);
        p.phi.push(row.aj);
        p.h.push(h);
        p.delta.push(1.0 / (4.0 * PI * h) - 1.0);
    }
    Ok(p)
}
