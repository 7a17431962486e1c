//! The run report and its provenance block.

use serde::{Deserialize, Serialize};

use qcreg_core::extremal::{DefectProfile, EpsilonProfile, ExtremalityReport, HolderEstimate};
use qcreg_core::quadrature::GridResolution;
use qcreg_core::{DomainSpec, GeometryProfile, MoriReport, QuadratureConfig, RadialConfig, RegularityReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticSummary {
    /// sqrt(lambda / Lambda).
    pub ps: f64,
    pub ric_div: f64,
    #[serde(rename = "new")]
    pub new_bound: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub eigen_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    /// SHA-256 of the canonical config JSON (defaults filled in).
    pub config_hash: String,
    /// SHA-256 of the input data file, for file subjects.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_hash: Option<String>,
    pub quadrature: QuadratureConfig,
    pub radial: RadialConfig,
    /// Circle family used for the suprema.
    pub domain: DomainSpec,
    pub resolution_c: GridResolution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution_a: Option<GridResolution>,
    /// Origin-centered radii used by profiles and diagnostics.
    pub profile_radii: Vec<f64>,
    pub validation_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub subject: String,
    pub regularity: RegularityReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mori: Option<MoriReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<EpsilonProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect: Option<DefectProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder: Option<Vec<HolderEstimate>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extremality: Option<ExtremalityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elliptic: Option<EllipticSummary>,
    /// Invariants that failed; empty on a clean run.
    pub violations: Vec<String>,
    pub provenance: Provenance,
}
