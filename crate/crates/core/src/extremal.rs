//! Diagnostics for extremizers of Hölder continuity at the origin.
//!
//! A coefficient is written as mu(z) = e^{2i arg z} (-k + eps(z)); extremizers
//! must have log-weighted circle averages of Re eps, and of the isoperimetric
//! defect delta, that grow like o(log 1/t) along some sequence t -> 0.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bounds::distortion_integrand;
use crate::error::{QcError, Result};
use crate::geometry::{image_area_jacobian, GeometryProfile, RadialConfig};
use crate::plane::{k_from_distortion, BeltramiField, CircleSpec, QcMap, C64};
use crate::quadrature::{circular_average, QuadratureConfig};

/// eps(z) = mu(z) e^{-2i arg z} + k.
pub fn epsilon_decompose(field: &BeltramiField, big_k: f64, z: C64) -> Result<C64> {
    let r2 = z.norm_sqr();
    if r2 == 0.0 {
        return Err(QcError::Singular(z));
    }
    let k = k_from_distortion(big_k);
    let unrotate = z.conj() * z.conj() / r2;
    Ok(field.eval(z) * unrotate + k)
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(QcError::InvalidParameter("radius list is empty".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(QcError::InvalidParameter("radii must be positive".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QcError::Unsorted);
    }
    Ok(())
}

/// Trapezoid in s = log(1/r) for the running integral of values(r) dr / r,
/// taken from each radius up to the largest one. Returns (integral, ratio to
/// log(r_max / t)); at t = r_max the ratio is its limit, the value itself.
pub fn log_weight_integral(radii: &[f64], values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = radii.len();
    let mut integral = vec![0.0; n];
    for i in (0..n.saturating_sub(1)).rev() {
        let ds = (radii[i + 1] / radii[i]).ln();
        integral[i] = integral[i + 1] + 0.5 * (values[i] + values[i + 1]) * ds;
    }
    let r_max = radii[n - 1];
    let ratio = (0..n)
        .map(|i| {
            if i == n - 1 {
                values[i]
            } else {
                integral[i] / (r_max / radii[i]).ln()
            }
        })
        .collect();
    (integral, ratio)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpsilonProfile {
    pub radii: Vec<f64>,
    /// Circle averages of Re eps with respect to normalized arclength.
    pub eps_re_avg: Vec<f64>,
    /// W(t) = integral from t to r_max of <Re eps>_{S_r} dr / r.
    pub w: Vec<f64>,
    pub ratio_w: Vec<f64>,
}

pub const EPSILON_CSV_HEADER: [&str; 4] = ["t", "eps_re_avg", "W", "ratio_W"];

impl EpsilonProfile {
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(EPSILON_CSV_HEADER)?;
        for i in 0..self.radii.len() {
            w.write_record(
                [self.radii[i], self.eps_re_avg[i], self.w[i], self.ratio_w[i]]
                    .iter()
                    .map(|v| v.to_string()),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn epsilon_weight_integral(
    field: &BeltramiField,
    big_k: f64,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<EpsilonProfile> {
    check_radii(radii)?;
    let avgs = radii
        .iter()
        .map(|&r| {
            let circle = CircleSpec::origin(r)?;
            circular_average(&circle, cfg, |_, z| Ok(epsilon_decompose(field, big_k, z)?.re))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (w, ratio_w) = log_weight_integral(radii, &avgs);
    Ok(EpsilonProfile {
        radii: radii.to_vec(),
        eps_re_avg: avgs,
        w,
        ratio_w,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub delta0: f64,
    pub lower_density: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DefectProfile {
    pub radii: Vec<f64>,
    pub delta: Vec<f64>,
    /// I(t) = integral from t to r_max of delta(r) dr / r.
    pub i: Vec<f64>,
    pub ratio_i: Vec<f64>,
    pub density: Vec<DensityEstimate>,
}

pub const DEFECT_CSV_HEADER: [&str; 4] = ["t", "delta", "I", "ratio_I"];

impl DefectProfile {
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(DEFECT_CSV_HEADER)?;
        for i in 0..self.radii.len() {
            w.write_record(
                [self.radii[i], self.delta[i], self.i[i], self.ratio_i[i]]
                    .iter()
                    .map(|v| v.to_string()),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

pub const DEFAULT_DENSITY_LEVELS: [f64; 2] = [0.01, 0.1];

/// I(t) and its ratio to log(1/t) from the defect column of a profile, plus
/// super-level density estimates at each `delta0` (radii serve as the gamma grid).
pub fn delta_weight_integral(profile: &GeometryProfile, levels: &[f64]) -> Result<DefectProfile> {
    check_radii(&profile.radii)?;
    let (i, ratio_i) = log_weight_integral(&profile.radii, &profile.delta);
    let samples = profile.delta_samples();
    let density = levels
        .iter()
        .map(|&d0| {
            Ok(DensityEstimate {
                delta0: d0,
                lower_density: superlevel_lower_density(&samples, d0, &profile.radii)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DefectProfile {
        radii: profile.radii.clone(),
        delta: profile.delta.clone(),
        i,
        ratio_i,
        density,
    })
}

/// min over gamma of |{r : delta(r) > delta0} ∩ [0, gamma]| / gamma.
///
/// delta is piecewise constant: sample i holds on [r_i, r_{i+1}), the first
/// sample extends down to 0 and the last extends upward.
pub fn superlevel_lower_density(samples: &[(f64, f64)], delta0: f64, gammas: &[f64]) -> Result<f64> {
    if gammas.is_empty() {
        return Err(QcError::InvalidParameter("gamma grid is empty".into()));
    }
    if !(delta0 > 0.0) {
        return Err(QcError::InvalidParameter(format!("delta0 must be positive, got {delta0}")));
    }
    if samples.is_empty() {
        return Err(QcError::InvalidParameter("no defect samples".into()));
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(QcError::Unsorted);
    }
    let measure_below = |gamma: f64| -> f64 {
        let mut m = 0.0;
        for (i, &(r, d)) in samples.iter().enumerate() {
            let lo = if i == 0 { 0.0 } else { r };
            if lo >= gamma {
                break;
            }
            let hi = samples.get(i + 1).map_or(f64::INFINITY, |s| s.0).min(gamma);
            if d > delta0 {
                m += hi - lo;
            }
        }
        m
    };
    let mut best = f64::INFINITY;
    for &g in gammas {
        if !(g > 0.0) {
            return Err(QcError::InvalidParameter(format!("gamma must be positive, got {g}")));
        }
        best = best.min(measure_below(g) / g);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub t: f64,
    /// log phi(t) / (2 log t).
    pub alpha_area: f64,
    /// log max_theta |f(t e^{i theta}) - f(0)| / log t.
    pub alpha_sup: f64,
}

pub const HOLDER_CSV_HEADER: [&str; 3] = ["t", "alpha_area", "alpha_sup"];

pub fn write_holder_csv<W: std::io::Write>(estimates: &[HolderEstimate], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HOLDER_CSV_HEADER)?;
    for e in estimates {
        w.write_record([e.t, e.alpha_area, e.alpha_sup].iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Empirical Hölder exponent at the origin from image areas and image radii.
pub fn empirical_holder(
    map: &dyn QcMap,
    radii: &[f64],
    radial: &RadialConfig,
    cfg: &QuadratureConfig,
) -> Result<Vec<HolderEstimate>> {
    check_radii(radii)?;
    if radii.iter().any(|&t| t >= 1.0) {
        return Err(QcError::InvalidParameter("empirical exponents need radii in (0, 1)".into()));
    }
    let f0 = map.value(C64::new(0.0, 0.0));
    radii
        .iter()
        .map(|&t| {
            let circle = CircleSpec::origin(t)?;
            let phi = image_area_jacobian(map, &circle, radial, cfg)?;
            if !(phi > 0.0) {
                return Err(QcError::Degenerate(format!("phi({t}) = {phi}")));
            }
            let n = cfg.nodes;
            let far = (0..n)
                .map(|j| {
                    let theta = 2.0 * PI * (j as f64 + 0.5) / n as f64;
                    (map.value(circle.point(theta)) - f0).norm()
                })
                .fold(0.0_f64, f64::max);
            let lt = t.ln();
            Ok(HolderEstimate {
                t,
                alpha_area: phi.ln() / (2.0 * lt),
                alpha_sup: far.ln() / lt,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalityThresholds {
    /// Ratios bounded below by this at every sampled t rule out extremality.
    #[serde(default = "ExtremalityThresholds::default_ratio")]
    pub ratio: f64,
    /// Allowed excess of the estimated exponent over 1/K.
    #[serde(default = "ExtremalityThresholds::default_alpha")]
    pub alpha: f64,
}

impl ExtremalityThresholds {
    fn default_ratio() -> f64 {
        0.01
    }
    fn default_alpha() -> f64 {
        0.05
    }
}

impl Default for ExtremalityThresholds {
    fn default() -> Self {
        Self {
            ratio: Self::default_ratio(),
            alpha: Self::default_alpha(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConsistentWithExtremal,
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityReport {
    pub verdict: Verdict,
    pub distortion: f64,
    pub min_ratio_w: f64,
    pub min_ratio_i: f64,
    /// Estimated exponent at the smallest sampled radius.
    pub alpha_est: f64,
    /// alpha_est - 1/K.
    pub alpha_gap: f64,
    pub reasons: Vec<String>,
}

/// Necessary-condition checks for an extremizer with distortion K.
pub fn extremality_report(
    eps: &EpsilonProfile,
    defect: &DefectProfile,
    holder: &[HolderEstimate],
    big_k: f64,
    thresholds: &ExtremalityThresholds,
) -> Result<ExtremalityReport> {
    if eps.radii != defect.radii {
        return Err(QcError::InvalidParameter(
            "epsilon and defect profiles use different radii".into(),
        ));
    }
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let min_ratio_w = min(&eps.ratio_w);
    let min_ratio_i = min(&defect.ratio_i);
    let alpha_est = holder
        .iter()
        .min_by(|a, b| a.t.total_cmp(&b.t))
        .map_or(f64::NAN, |h| h.alpha_sup);
    let alpha_gap = alpha_est - 1.0 / big_k;

    let mut reasons = Vec::new();
    if min_ratio_w >= thresholds.ratio {
        reasons.push(format!("ratio_W >= {} at every sampled t (min {min_ratio_w})", thresholds.ratio));
    }
    if min_ratio_i >= thresholds.ratio {
        reasons.push(format!("ratio_I >= {} at every sampled t (min {min_ratio_i})", thresholds.ratio));
    }
    if alpha_gap > thresholds.alpha {
        reasons.push(format!("estimated exponent {alpha_est} exceeds 1/K = {}", 1.0 / big_k));
    }
    Ok(ExtremalityReport {
        verdict: if reasons.is_empty() {
            Verdict::ConsistentWithExtremal
        } else {
            Verdict::Inconsistent
        },
        distortion: big_k,
        min_ratio_w,
        min_ratio_i,
        alpha_est,
        alpha_gap,
        reasons,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionDeficit {
    pub r: f64,
    /// Circle average g(r) of the distortion integrand.
    pub g: f64,
    pub eps_re_avg: f64,
    /// K - c1 <Re eps> with c1 = 2 / ((1 + k)(1 - k)).
    pub bound: f64,
}

impl DistortionDeficit {
    pub fn holds(&self, tol: f64) -> bool {
        self.g <= self.bound + tol
    }
}

/// g(r) against the sharpened bound K - c1 <Re eps>_{S_r} on origin circles.
pub fn distortion_deficit(
    field: &BeltramiField,
    big_k: f64,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<DistortionDeficit>> {
    check_radii(radii)?;
    let k = k_from_distortion(big_k);
    let c1 = 2.0 / ((1.0 + k) * (1.0 - k));
    radii
        .iter()
        .map(|&r| {
            let circle = CircleSpec::origin(r)?;
            let g = circular_average(&circle, cfg, |theta, z| {
                distortion_integrand(field.eval(z), C64::from_polar(1.0, theta))
            })?;
            let e = circular_average(&circle, cfg, |_, z| Ok(epsilon_decompose(field, big_k, z)?.re))?;
            Ok(DistortionDeficit {
                r,
                g,
                eps_re_avg: e,
                bound: big_k - c1 * e,
            })
        })
        .collect()
}
