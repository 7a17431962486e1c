//! Hölder exponent bounds: the distortion constant C, the isoperimetric
//! constant A, the combined bound 1/(A C), and the Grönwall verification of
//! phi(t) <= phi(1) t^(2/(A C)).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{QcError, Result};
use crate::geometry::isoperimetric_ratio;
use crate::plane::{CircleSpec, DomainSpec, QcMap, ValidatedField, C64};
use crate::quadrature::{circular_average, sup_over_circles, GridResolution, QuadratureConfig, SupResult};

/// |1 - conj(eta)^2 mu|^2 / (1 - |mu|^2).
#[inline]
pub fn distortion_integrand(mu: C64, eta: C64) -> Result<f64> {
    let m2 = mu.norm_sqr();
    if !(m2 < 1.0) {
        return Err(QcError::InvalidParameter(format!(
            "distortion integrand needs |mu| < 1, got {}",
            m2.sqrt()
        )));
    }
    let e = eta.conj();
    Ok((C64::new(1.0, 0.0) - e * e * mu).norm_sqr() / (1.0 - m2))
}

/// Normalized circle average of the distortion integrand with eta the outer normal.
pub fn circle_distortion_average(field: &ValidatedField, circle: &CircleSpec, cfg: &QuadratureConfig) -> Result<f64> {
    circular_average(circle, cfg, |theta, z| {
        let mu = field.mu_checked(z)?;
        distortion_integrand(mu, C64::from_polar(1.0, theta))
    })
}

/// C = sup over circles of the averaged distortion integrand.
pub fn distortion_constant(field: &ValidatedField, domain: &DomainSpec, cfg: &QuadratureConfig) -> Result<SupResult> {
    sup_over_circles(domain, |c| circle_distortion_average(field, c, cfg))
}

/// A = sup over circles of 4 pi |f(D)| / H1(f(S))^2.
pub fn isoperimetric_constant(map: &dyn QcMap, domain: &DomainSpec, cfg: &QuadratureConfig) -> Result<SupResult> {
    sup_over_circles(domain, |c| isoperimetric_ratio(map, c, cfg))
}

/// 1 / (A C).
pub fn holder_lower_bound(a: f64, c: f64) -> Result<f64> {
    if !(a > 0.0 && c > 0.0 && a.is_finite() && c.is_finite()) {
        return Err(QcError::InvalidParameter(format!(
            "A and C must be positive (A = {a}, C = {c})"
        )));
    }
    Ok(1.0 / (a * c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoriReport {
    pub k_max: f64,
    pub distortion: f64,
    pub max_average: f64,
    /// max_average - K; positive means the chain is violated.
    pub max_violation: f64,
    pub pass: bool,
    pub argmax: CircleSpec,
}

/// Checks that every circle average of the distortion integrand stays below K.
pub fn mori_consistency(
    field: &ValidatedField,
    domain: &DomainSpec,
    cfg: &QuadratureConfig,
    tol: f64,
) -> Result<MoriReport> {
    let sup = distortion_constant(field, domain, cfg)?;
    let big_k = field.distortion();
    Ok(MoriReport {
        k_max: field.k_max(),
        distortion: big_k,
        max_average: sup.value,
        max_violation: sup.value - big_k,
        pass: sup.value <= big_k + tol,
        argmax: sup.argmax,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GronwallVerdict {
    pub pass: bool,
    pub exponent: f64,
    pub samples: usize,
    /// Largest relative drop of t^(-exponent) phi(t) between consecutive samples.
    pub worst_decrease: f64,
    /// (max - min) / max of t^(-exponent) phi(t); zero for exact power laws.
    pub equality_gap: f64,
    /// Largest relative excess of phi(t) over phi(t_max) (t / t_max)^exponent.
    pub worst_excess: f64,
}

/// Discrete check that t^(-exponent) phi(t) is nondecreasing and that
/// phi(t) <= phi(t_max) (t / t_max)^exponent, both up to `tol`.
pub fn gronwall_check(phi: &[(f64, f64)], exponent: f64, tol: f64) -> Result<GronwallVerdict> {
    if phi.is_empty() {
        return Err(QcError::InvalidParameter("Grönwall check needs samples".into()));
    }
    if phi.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(QcError::Unsorted);
    }
    if phi.iter().any(|&(t, p)| !(t > 0.0 && p > 0.0 && p.is_finite())) {
        return Err(QcError::InvalidParameter(
            "Grönwall samples need t > 0 and phi(t) > 0".into(),
        ));
    }
    let scaled: Vec<f64> = phi.iter().map(|&(t, p)| p * t.powf(-exponent)).collect();
    let worst_decrease = scaled
        .windows(2)
        .map(|w| (w[0] - w[1]) / w[0])
        .fold(0.0_f64, f64::max);
    let hi = scaled.iter().copied().fold(f64::MIN, f64::max);
    let lo = scaled.iter().copied().fold(f64::MAX, f64::min);
    let (t_max, phi_max) = *phi.last().expect("nonempty");
    let worst_excess = phi
        .iter()
        .map(|&(t, p)| p / (phi_max * (t / t_max).powf(exponent)) - 1.0)
        .fold(0.0_f64, f64::max);
    Ok(GronwallVerdict {
        pass: worst_decrease <= tol && worst_excess <= tol,
        exponent,
        samples: phi.len(),
        worst_decrease,
        equality_gap: (hi - lo) / hi,
        worst_excess,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ASource {
    /// Computed from image geometry of the map.
    Map,
    /// No evaluable map; A = 1 recovers the distortion-only bound.
    Default,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub c: f64,
    pub a: f64,
    pub a_source: ASource,
    pub k_max: f64,
    pub distortion: f64,
    pub alpha_new: f64,
    pub alpha_ricciardi: f64,
    pub alpha_mori: f64,
    pub argmax_c: CircleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub argmax_a: Option<CircleSpec>,
    pub resolution: GridResolution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gronwall: Option<GronwallVerdict>,
}

pub const REPORT_CSV_HEADER: [&str; 14] = [
    "C",
    "A",
    "a_source",
    "k_max",
    "K",
    "alpha_new",
    "alpha_ricciardi",
    "alpha_mori",
    "argmax_c_x",
    "argmax_c_y",
    "argmax_c_r",
    "gronwall_pass",
    "gronwall_worst_decrease",
    "gronwall_equality_gap",
];

impl RegularityReport {
    /// Assembles the report from the two suprema.
    pub fn from_parts(field: &ValidatedField, c: &SupResult, a: Option<&SupResult>) -> Result<Self> {
        let a_value = a.map_or(1.0, |s| s.value);
        let big_k = field.distortion();
        Ok(Self {
            c: c.value,
            a: a_value,
            a_source: if a.is_some() { ASource::Map } else { ASource::Default },
            k_max: field.k_max(),
            distortion: big_k,
            alpha_new: holder_lower_bound(a_value, c.value)?,
            alpha_ricciardi: holder_lower_bound(1.0, c.value)?,
            alpha_mori: 1.0 / big_k,
            argmax_c: c.argmax,
            argmax_a: a.map(|s| s.argmax),
            resolution: c.resolution,
            gronwall: None,
        })
    }

    /// Violated invariants (A <= 1, C <= K, exponent ordering), if any.
    pub fn violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.a > 1.0 + tol {
            out.push(format!("isoperimetric constant A = {} exceeds 1", self.a));
        }
        if self.c > self.distortion + tol {
            out.push(format!("distortion constant C = {} exceeds K = {}", self.c, self.distortion));
        }
        if self.alpha_ricciardi < self.alpha_mori - 1e-9 {
            out.push(format!(
                "alpha_ricciardi = {} below alpha_mori = {}",
                self.alpha_ricciardi, self.alpha_mori
            ));
        }
        if let Some(g) = &self.gronwall {
            if !g.pass {
                out.push(format!(
                    "Grönwall check failed (worst decrease {}, worst excess {})",
                    g.worst_decrease, g.worst_excess
                ));
            }
        }
        out
    }

    pub fn csv_row(&self) -> Vec<String> {
        let g = self.gronwall.as_ref();
        vec![
            self.c.to_string(),
            self.a.to_string(),
            match self.a_source {
                ASource::Map => "map".into(),
                ASource::Default => "default".into(),
            },
            self.k_max.to_string(),
            self.distortion.to_string(),
            self.alpha_new.to_string(),
            self.alpha_ricciardi.to_string(),
            self.alpha_mori.to_string(),
            self.argmax_c.center.re.to_string(),
            self.argmax_c.center.im.to_string(),
            self.argmax_c.radius.to_string(),
            g.map_or(String::new(), |g| g.pass.to_string()),
            g.map_or(String::new(), |g| g.worst_decrease.to_string()),
            g.map_or(String::new(), |g| g.equality_gap.to_string()),
        ]
    }
}

/// Full report for a field, optionally with the map that solves its Beltrami equation.
pub fn regularity_report(
    field: &ValidatedField,
    map: Option<&dyn QcMap>,
    domain: &DomainSpec,
    cfg: &QuadratureConfig,
) -> Result<RegularityReport> {
    let c = distortion_constant(field, domain, cfg)?;
    let a = map.map(|m| isoperimetric_constant(m, domain, cfg)).transpose()?;
    RegularityReport::from_parts(field, &c, a.as_ref())
}

/// Grönwall exponent 2 / (A C) for a report.
pub fn gronwall_exponent(report: &RegularityReport) -> f64 {
    2.0 / (report.a * report.c)
}

/// phi(t) = pi t^(2 alpha), the area of the image disk for z |z|^(alpha - 1).
pub fn power_law_phi(alpha: f64, radii: &[f64]) -> Vec<(f64, f64)> {
    radii.iter().map(|&t| (t, PI * t.powf(2.0 * alpha))).collect()
}
