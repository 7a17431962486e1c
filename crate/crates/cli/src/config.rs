//! JSON analysis configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use qcreg_core::catalog::{parse_map_spec, CATALOG_NAMES};
use qcreg_core::extremal::{ExtremalityThresholds, DEFAULT_DENSITY_LEVELS};
use qcreg_core::{log_spaced, DomainSpec, Interpolation, OuterDomain, QcError, QuadratureConfig, RadialConfig, C64};

use crate::error::{CliError, Result};

/// What is being analysed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Value", into = "Value")]
pub enum Subject {
    /// A catalog map addressed as `name(key=value,...)`.
    Catalog(String),
    SampledMu { path: PathBuf, interpolation: Interpolation },
    MatrixField { path: PathBuf, interpolation: Interpolation },
    ConstantMatrix { matrix: [f64; 3], big_k: f64 },
}

impl Subject {
    pub fn is_matrix(&self) -> bool {
        matches!(self, Subject::MatrixField { .. } | Subject::ConstantMatrix { .. })
    }

    fn resolve_paths(&mut self, base: &Path) {
        if let Subject::SampledMu { path, .. } | Subject::MatrixField { path, .. } = self {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Catalog(spec) => f.write_str(spec),
            Subject::SampledMu { path, .. } => write!(f, "sampled_mu:{}", path.display()),
            Subject::MatrixField { path, .. } => write!(f, "matrix_field:{}", path.display()),
            Subject::ConstantMatrix { matrix: m, big_k } => {
                write!(f, "constant_matrix([{}, {}, {}], K={big_k})", m[0], m[1], m[2])
            }
        }
    }
}

fn catalog_error(e: QcError) -> String {
    match e {
        QcError::UnknownMap { .. } => format!("{e}"),
        other => format!("{other}; catalog maps: {}", CATALOG_NAMES.join(", ")),
    }
}

fn check_spec(spec: &str) -> Result<String, String> {
    parse_map_spec(spec).map_err(catalog_error)?;
    Ok(spec.to_string())
}

impl TryFrom<Value> for Subject {
    type Error = String;

    fn try_from(v: Value) -> Result<Self, String> {
        let obj = match v {
            Value::String(s) => return Ok(Subject::Catalog(check_spec(&s)?)),
            Value::Object(obj) => obj,
            other => return Err(format!("subject must be a map spec string or an object, got {other}")),
        };
        const KEYS: [&str; 4] = ["catalog", "sampled_mu", "matrix_field", "constant_matrix"];
        let present: Vec<&str> = KEYS.iter().copied().filter(|k| obj.contains_key(*k)).collect();
        if present.len() != 1 {
            return Err(format!("subject needs exactly one of {}, found {}", KEYS.join(", "), present.len()));
        }
        let kind = present[0];
        let allowed: &[&str] = match kind {
            "catalog" => &["catalog"],
            "sampled_mu" | "matrix_field" => &[kind, "interpolation"],
            _ => &["constant_matrix", "K"],
        };
        if let Some(extra) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(format!("unknown subject key `{extra}` for {kind} (expected {})", allowed.join(", ")));
        }
        let interpolation = match obj.get("interpolation") {
            None => Interpolation::default(),
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| format!("interpolation: {e}"))?,
        };
        let path = |key: &str| -> Result<PathBuf, String> {
            obj[key]
                .as_str()
                .map(PathBuf::from)
                .ok_or_else(|| format!("`{key}` must be a file path"))
        };
        match kind {
            "catalog" => {
                let s = obj["catalog"].as_str().ok_or("`catalog` must be a map spec string")?;
                Ok(Subject::Catalog(check_spec(s)?))
            }
            "sampled_mu" => Ok(Subject::SampledMu {
                path: path("sampled_mu")?,
                interpolation,
            }),
            "matrix_field" => Ok(Subject::MatrixField {
                path: path("matrix_field")?,
                interpolation,
            }),
            _ => {
                let matrix: [f64; 3] = serde_json::from_value(obj["constant_matrix"].clone())
                    .map_err(|e| format!("constant_matrix must be [a11, a12, a22]: {e}"))?;
                let big_k = obj
                    .get("K")
                    .and_then(Value::as_f64)
                    .ok_or("constant_matrix needs a numeric `K`")?;
                Ok(Subject::ConstantMatrix { matrix, big_k })
            }
        }
    }
}

impl From<Subject> for Value {
    fn from(s: Subject) -> Value {
        match s {
            Subject::Catalog(spec) => Value::String(spec),
            Subject::SampledMu { path, interpolation } => {
                json!({"sampled_mu": path, "interpolation": interpolation})
            }
            Subject::MatrixField { path, interpolation } => {
                json!({"matrix_field": path, "interpolation": interpolation})
            }
            Subject::ConstantMatrix { matrix, big_k } => json!({"constant_matrix": matrix, "K": big_k}),
        }
    }
}

/// A geometric grid `count` values from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGrid {
    pub min: f64,
    #[serde(default = "LogGrid::default_max")]
    pub max: f64,
    pub count: usize,
}

impl LogGrid {
    fn default_max() -> f64 {
        1.0
    }

    pub fn values(&self) -> qcreg_core::Result<Vec<f64>> {
        log_spaced(self.min, self.max, self.count)
    }
}

fn default_profile_radii() -> LogGrid {
    LogGrid {
        min: 1e-3,
        max: 1.0,
        count: 16,
    }
}

fn default_domain_radii() -> LogGrid {
    LogGrid {
        min: 1e-2,
        max: 1.0,
        count: 12,
    }
}

fn default_centers() -> Vec<C64> {
    vec![C64::new(0.0, 0.0)]
}

/// Circle family for the suprema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    #[serde(default = "default_centers")]
    pub centers: Vec<C64>,
    #[serde(default = "default_domain_radii")]
    pub radii: LogGrid,
    #[serde(default = "OuterDomain::unit_disk")]
    pub outer: OuterDomain,
    #[serde(default)]
    pub margin: f64,
    #[serde(default)]
    pub refine: bool,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self {
            centers: default_centers(),
            radii: default_domain_radii(),
            outer: OuterDomain::unit_disk(),
            margin: 0.0,
            refine: false,
        }
    }
}

impl DomainConfig {
    pub fn spec(&self) -> qcreg_core::Result<DomainSpec> {
        let mut d = DomainSpec::new(self.centers.clone(), self.radii.values()?, self.outer)?;
        d.margin = self.margin;
        d.refine = self.refine;
        d.check()?;
        Ok(d)
    }
}

fn yes() -> bool {
    true
}

fn default_levels() -> Vec<f64> {
    DEFAULT_DENSITY_LEVELS.to_vec()
}

/// Which sections of the report are computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    /// Length/area profile, phi and the isoperimetric defect (maps only).
    #[serde(default = "yes")]
    pub geometry: bool,
    /// Epsilon and defect log-integrals with the extremality verdict.
    #[serde(default = "yes")]
    pub extremal: bool,
    /// Empirical exponents at the origin (maps only).
    #[serde(default = "yes")]
    pub holder: bool,
    #[serde(default = "yes")]
    pub mori: bool,
    /// Comparison bounds (matrix subjects only).
    #[serde(default = "yes")]
    pub elliptic: bool,
    #[serde(default = "default_levels")]
    pub density_levels: Vec<f64>,
    #[serde(default)]
    pub thresholds: ExtremalityThresholds,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self {
            geometry: true,
            extremal: true,
            holder: true,
            mori: true,
            elliptic: true,
            density_levels: default_levels(),
            thresholds: ExtremalityThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Slack for A <= 1, C <= K and delta >= 0.
    #[serde(default = "Tolerances::default_invariant")]
    pub invariant: f64,
    /// Relative agreement required between the two length and two area routes.
    #[serde(default = "Tolerances::default_consistency")]
    pub consistency: f64,
    #[serde(default = "Tolerances::default_gronwall")]
    pub gronwall: f64,
    #[serde(default = "Tolerances::default_mori")]
    pub mori: f64,
}

impl Tolerances {
    fn default_invariant() -> f64 {
        1e-6
    }
    fn default_consistency() -> f64 {
        1e-6
    }
    fn default_gronwall() -> f64 {
        1e-6
    }
    fn default_mori() -> f64 {
        1e-9
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            invariant: Self::default_invariant(),
            consistency: Self::default_consistency(),
            gronwall: Self::default_gronwall(),
            mori: Self::default_mori(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    CsvBundle,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_dir: Option<PathBuf>,
}

impl OutputConfig {
    pub fn is_empty(&self) -> bool {
        self.json.is_none() && self.csv_dir.is_none()
    }

    fn check(&self) -> Result<()> {
        let parent_ok = |p: &Path| {
            let parent = p.parent().filter(|q| !q.as_os_str().is_empty()).unwrap_or(Path::new("."));
            parent.is_dir()
        };
        if let Some(p) = &self.json {
            if p.is_dir() || !parent_ok(p) {
                return Err(CliError::Config(format!("json output {} is not writable", p.display())));
            }
        }
        if let Some(d) = &self.csv_dir {
            if d.exists() && !d.is_dir() {
                return Err(CliError::Config(format!("csv_dir {} is not a directory", d.display())));
            }
            if !d.exists() && !parent_ok(d) {
                return Err(CliError::Config(format!("csv_dir {} cannot be created", d.display())));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub subject: Subject,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub radial: RadialConfig,
    /// Origin-centered radii for profiles and diagnostics.
    #[serde(default = "default_profile_radii")]
    pub radii: LogGrid,
    #[serde(default)]
    pub diagnostics: Diagnostics,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

impl AnalysisConfig {
    /// Defaults for everything but the subject.
    pub fn for_subject(subject: Subject) -> Self {
        Self {
            subject,
            domain: DomainConfig::default(),
            quadrature: QuadratureConfig::default(),
            radial: RadialConfig::default(),
            radii: default_profile_radii(),
            diagnostics: Diagnostics::default(),
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
        }
    }

    /// A catalog-map config with defaults, e.g. `catalog("spiral(gamma=1)")`.
    pub fn catalog(spec: &str) -> Result<Self> {
        let subject = Subject::try_from(Value::String(spec.into())).map_err(CliError::Config)?;
        Ok(Self::for_subject(subject))
    }

    /// Checks everything that can be checked without running the analysis.
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: QcError| CliError::Config(e.to_string());
        self.quadrature.check().map_err(cfg_err)?;
        self.radial.check().map_err(cfg_err)?;
        self.domain.spec().map_err(cfg_err)?;
        let radii = self.radii.values().map_err(cfg_err)?;
        if radii.iter().any(|&r| r > 1.0) {
            return Err(CliError::Config("profile radii must lie in (0, 1]".into()));
        }
        for &d in &self.diagnostics.density_levels {
            if !(d > 0.0) {
                return Err(CliError::Config(format!("density level {d} must be positive")));
            }
        }
        let t = &self.tolerances;
        if [t.invariant, t.consistency, t.gronwall, t.mori].iter().any(|v| !(*v >= 0.0)) {
            return Err(CliError::Config("tolerances must be nonnegative".into()));
        }
        self.output.check()
    }

    /// Canonical JSON used for hashing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Canonical form of everything that affects the numbers; output targets are left out.
    pub fn analysis_json(&self) -> String {
        let mut bare = self.clone();
        bare.output = OutputConfig::default();
        bare.canonical_json()
    }
}

/// Parses a config from JSON text; relative file paths resolve against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<AnalysisConfig> {
    let raw: Value = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    if !matches!(raw, Value::Object(_)) {
        return Err(CliError::Config("config must be a JSON object".into()));
    }
    // Deserialize from text again so errors carry line and column.
    let mut cfg: AnalysisConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.subject.resolve_paths(base);
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<AnalysisConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Default values embedded in help text and provenance.
pub fn documented_defaults() -> Map<String, Value> {
    let cfg = AnalysisConfig::for_subject(Subject::Catalog("identity".into()));
    let Value::Object(mut m) = serde_json::to_value(&cfg).expect("config serializes") else {
        unreachable!()
    };
    m.remove("subject");
    m.remove("output");
    m
}
