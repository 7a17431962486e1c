//! Divergence-form equations div(A grad u) = 0 with symmetric, uniformly
//! elliptic A, and their link to Beltrami coefficients through f = u + i v,
//! v the A-harmonic conjugate.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bounds::{distortion_constant, RegularityReport};
use crate::error::{QcError, Result};
use crate::plane::{
    k_from_distortion, validate_field_with, BeltramiField, DomainSpec, Provenance, ValidationSampler, C64,
};
use crate::quadrature::{circular_average, sup_over_circles, QuadratureConfig};
use crate::sampled::{read_descriptor, read_grid_rows, GridDescriptor, Interpolation};

pub const DET_TOL: f64 = 1e-9;
const EIGEN_SLACK: f64 = 1e-12;
const ASYMMETRY_TOL: f64 = 1e-12;

/// Symmetric 2 x 2 matrix [[a11, a12], [a12, a22]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymMatrix {
    pub const IDENTITY: SymMatrix = SymMatrix {
        a11: 1.0,
        a12: 0.0,
        a22: 1.0,
    };

    pub fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Self { a11, a12, a22 }
    }

    pub fn diag(a11: f64, a22: f64) -> Self {
        Self::new(a11, 0.0, a22)
    }

    pub fn from_full(m: [[f64; 2]; 2]) -> Result<Self> {
        let (a12, a21) = (m[0][1], m[1][0]);
        if (a12 - a21).abs() > ASYMMETRY_TOL {
            return Err(QcError::Asymmetric { a12, a21 });
        }
        Ok(Self::new(m[0][0], 0.5 * (a12 + a21), m[1][1]))
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    /// (smallest, largest) eigenvalue.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * self.trace();
        let r = (0.25 * (self.a11 - self.a22).powi(2) + self.a12 * self.a12).sqrt();
        (mean - r, mean + r)
    }

    pub fn apply(&self, xi: [f64; 2]) -> [f64; 2] {
        [
            self.a11 * xi[0] + self.a12 * xi[1],
            self.a12 * xi[0] + self.a22 * xi[1],
        ]
    }

    /// <A xi, xi>.
    pub fn quadratic(&self, xi: [f64; 2]) -> f64 {
        let a = self.apply(xi);
        a[0] * xi[0] + a[1] * xi[1]
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a22 * s)
    }
}

/// mu = (a22 - a11 - 2i a12) / (2 + a11 + a22) for det A = 1.
pub fn mu_from_matrix(m: &SymMatrix) -> C64 {
    C64::new(m.a22 - m.a11, -2.0 * m.a12) / (2.0 + m.trace())
}

/// The det-1 matrix with Beltrami coefficient mu:
/// [[|1 - mu|^2, -2 Im mu], [-2 Im mu, |1 + mu|^2]] / (1 - |mu|^2).
pub fn matrix_from_mu(mu: C64) -> SymMatrix {
    let one = C64::new(1.0, 0.0);
    let s = 1.0 / (1.0 - mu.norm_sqr());
    SymMatrix::new((one - mu).norm_sqr() * s, -2.0 * mu.im * s, (one + mu).norm_sqr() * s)
}

type MatrixFn = dyn Fn(C64) -> SymMatrix + Send + Sync;

#[derive(Clone)]
pub struct MatrixField {
    eval: Arc<MatrixFn>,
    big_k: f64,
    det_normalized: bool,
}

impl fmt::Debug for MatrixField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixField")
            .field("K", &self.big_k)
            .field("det_normalized", &self.det_normalized)
            .finish_non_exhaustive()
    }
}

impl MatrixField {
    pub fn new<F>(big_k: f64, det_normalized: bool, eval: F) -> Self
    where
        F: Fn(C64) -> SymMatrix + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            big_k,
            det_normalized,
        }
    }

    pub fn constant(m: SymMatrix, big_k: f64) -> Self {
        let det_normalized = (m.det() - 1.0).abs() <= DET_TOL;
        Self::new(big_k, det_normalized, move |_| m)
    }

    /// Reads `x,y,a11,a12,a22` rows with a sidecar carrying `K`. Entries are
    /// interpolated; when every node has det 1 the interpolant is rescaled
    /// back to det 1.
    pub fn read(csv_path: &Path, interp: Interpolation) -> Result<Self> {
        let desc = read_descriptor(csv_path)?;
        let big_k = desc
            .big_k
            .ok_or_else(|| QcError::FieldFile("sidecar is missing `K`".into()))?;
        let rows = read_grid_rows(csv_path, &desc, &["a11", "a12", "a22"])?;
        let values: Vec<SymMatrix> = rows.into_iter().map(|r| SymMatrix::new(r[0], r[1], r[2])).collect();
        Ok(Self::from_grid(desc, values, interp, big_k))
    }

    pub fn from_grid(desc: GridDescriptor, values: Vec<SymMatrix>, interp: Interpolation, big_k: f64) -> Self {
        let det_normalized = values.iter().all(|m| (m.det() - 1.0).abs() <= DET_TOL);
        Self::new(big_k, det_normalized, move |z| {
            let mut m = SymMatrix::new(0.0, 0.0, 0.0);
            for (n, w) in desc.stencil(z, interp) {
                let v = values[n];
                m.a11 += w * v.a11;
                m.a12 += w * v.a12;
                m.a22 += w * v.a22;
            }
            if det_normalized {
                m.scaled(1.0 / m.det().sqrt())
            } else {
                m
            }
        })
    }

    #[inline]
    pub fn eval(&self, z: C64) -> SymMatrix {
        (self.eval)(z)
    }

    pub fn distortion(&self) -> f64 {
        self.big_k
    }

    pub fn det_normalized(&self) -> bool {
        self.det_normalized
    }
}

#[derive(Debug, Clone)]
pub struct ValidatedMatrixField {
    field: MatrixField,
    big_k: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub samples: usize,
    sampler: ValidationSampler,
}

impl ValidatedMatrixField {
    pub fn field(&self) -> &MatrixField {
        &self.field
    }

    pub fn distortion(&self) -> f64 {
        self.big_k
    }
}

/// Unit test directions for the unified ellipticity inequality.
fn directions(n: usize) -> impl Iterator<Item = [f64; 2]> {
    // Golden-angle spacing: deterministic and well spread.
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n).map(move |i| {
        let (s, c) = (golden * i as f64).sin_cos();
        [c, s]
    })
}

pub fn validate_matrix_field(field: MatrixField, big_k: f64) -> Result<ValidatedMatrixField> {
    validate_matrix_field_with(field, big_k, &ValidationSampler::default())
}

/// Checks (1/K)|xi|^2 <= <A xi, xi> <= K |xi|^2 through the eigenvalues and
/// |xi|^2 + |A xi|^2 <= (K + 1/K) <A xi, xi> on test directions.
pub fn validate_matrix_field_with(
    field: MatrixField,
    big_k: f64,
    sampler: &ValidationSampler,
) -> Result<ValidatedMatrixField> {
    if !(big_k >= 1.0 && big_k.is_finite()) {
        return Err(QcError::InvalidParameter(format!("K must be >= 1, got {big_k}")));
    }
    let mut lambda_min = f64::INFINITY;
    let mut lambda_max = f64::NEG_INFINITY;
    let mut samples = 0;
    let unified = big_k + 1.0 / big_k;
    for z in sampler.points() {
        let m = field.eval(z);
        let (lo, hi) = m.eigenvalues();
        if !(lo >= 1.0 / big_k - EIGEN_SLACK && hi <= big_k + EIGEN_SLACK) {
            return Err(QcError::Ellipticity { z, lo, hi, k: big_k });
        }
        for xi in directions(16) {
            let a = m.apply(xi);
            let lhs = 1.0 + a[0] * a[0] + a[1] * a[1];
            if lhs > unified * m.quadratic(xi) + 1e-10 {
                return Err(QcError::Ellipticity { z, lo, hi, k: big_k });
            }
        }
        lambda_min = lambda_min.min(lo);
        lambda_max = lambda_max.max(hi);
        samples += 1;
    }
    Ok(ValidatedMatrixField {
        field,
        big_k,
        lambda_min,
        lambda_max,
        samples,
        sampler: *sampler,
    })
}

/// The complex distortion of f = u + i v for det-1 coefficient fields.
pub fn beltrami_from_matrix(a: &ValidatedMatrixField) -> Result<BeltramiField> {
    for z in a.sampler.points() {
        let det = a.field.eval(z).det();
        if (det - 1.0).abs() > DET_TOL {
            return Err(QcError::NotDetNormalized { z, det });
        }
    }
    let f = a.field.clone();
    Ok(BeltramiField::new(
        k_from_distortion(a.big_k),
        Provenance::ClosedForm,
        move |z| mu_from_matrix(&f.eval(z)),
    ))
}

/// Hölder bound for solutions u; A-factor is 1 since no map is available.
pub fn elliptic_holder_bound(
    a: &ValidatedMatrixField,
    domain: &DomainSpec,
    cfg: &QuadratureConfig,
) -> Result<RegularityReport> {
    let mu = beltrami_from_matrix(a)?;
    let validated = validate_field_with(mu, k_from_distortion(a.big_k), &a.sampler)?;
    let c = distortion_constant(&validated, domain, cfg)?;
    RegularityReport::from_parts(&validated, &c, None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonBounds {
    /// sqrt(lambda / Lambda) from extreme sampled eigenvalues.
    pub ps: f64,
    /// 1 / sup of circle averages of <eta, A eta>.
    pub ric_div: f64,
    /// 1 / (A C) with A = 1.
    #[serde(rename = "new")]
    pub new_bound: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub eigen_samples: usize,
    pub report: RegularityReport,
}

pub fn comparison_bounds(
    a: &ValidatedMatrixField,
    domain: &DomainSpec,
    cfg: &QuadratureConfig,
) -> Result<ComparisonBounds> {
    let report = elliptic_holder_bound(a, domain, cfg)?;
    let sup = sup_over_circles(domain, |c| {
        circular_average(c, cfg, |theta, z| {
            let (s, co) = theta.sin_cos();
            Ok(a.field.eval(z).quadratic([co, s]))
        })
    })?;
    Ok(ComparisonBounds {
        ps: (a.lambda_min / a.lambda_max).sqrt(),
        ric_div: 1.0 / sup.value,
        new_bound: report.alpha_new,
        lambda_min: a.lambda_min,
        lambda_max: a.lambda_max,
        eigen_samples: a.samples,
        report,
    })
}
