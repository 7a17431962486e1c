//! Complex-plane primitives: circles, analysis domains, Beltrami fields and
//! the map interface shared by every other module.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QcError, Result};

pub type C64 = Complex64;

/// Modulus at or above which a coefficient is treated as degenerate.
pub const DEGENERATE_MODULUS: f64 = 1.0 - 1e-12;

/// Slack allowed when comparing |mu| against a certified bound.
pub const BOUND_SLACK: f64 = 1e-12;

/// |f_z| below this is a singular point for mu = f_zbar / f_z.
pub const SINGULAR_FZ: f64 = 1e-14;

/// K = (1 + k) / (1 - k).
pub fn distortion_from_k(k: f64) -> f64 {
    (1.0 + k) / (1.0 - k)
}

/// k = (K - 1) / (K + 1).
pub fn k_from_distortion(big_k: f64) -> f64 {
    (big_k - 1.0) / (big_k + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleSpec {
    pub center: C64,
    pub radius: f64,
}

impl CircleSpec {
    pub fn new(center: C64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(QcError::InvalidParameter(format!(
                "circle radius must be positive and finite, got {radius}"
            )));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(QcError::InvalidParameter(format!(
                "circle center must be finite, got {center}"
            )));
        }
        Ok(Self { center, radius })
    }

    pub fn origin(radius: f64) -> Result<Self> {
        Self::new(C64::new(0.0, 0.0), radius)
    }

    #[inline]
    pub fn point(&self, theta: f64) -> C64 {
        self.center + C64::from_polar(self.radius, theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OuterDomain {
    Disk { center: C64, radius: f64 },
    Annulus { center: C64, inner: f64, outer: f64 },
}

impl OuterDomain {
    pub fn unit_disk() -> Self {
        OuterDomain::Disk {
            center: C64::new(0.0, 0.0),
            radius: 1.0,
        }
    }

    /// Whether the closed circle lies inside the region, keeping `margin`
    /// away from every boundary component.
    pub fn contains(&self, circle: &CircleSpec, margin: f64) -> bool {
        match *self {
            OuterDomain::Disk { center, radius } => {
                (circle.center - center).norm() + circle.radius <= radius - margin + 1e-15
            }
            OuterDomain::Annulus {
                center,
                inner,
                outer,
            } => {
                let d = (circle.center - center).norm();
                let nearest = (d - circle.radius).abs();
                let farthest = d + circle.radius;
                farthest <= outer - margin + 1e-15 && nearest >= inner + margin - 1e-15
            }
        }
    }
}

/// Family of circles S(x, rho) over which suprema are taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub centers: Vec<C64>,
    pub radii: Vec<f64>,
    pub outer: OuterDomain,
    /// Minimum distance kept between every circle and the outer boundary.
    #[serde(default)]
    pub margin: f64,
    /// One extra level of radius refinement around the argmax.
    #[serde(default)]
    pub refine: bool,
}

impl DomainSpec {
    pub fn new(centers: Vec<C64>, radii: Vec<f64>, outer: OuterDomain) -> Result<Self> {
        let spec = Self {
            centers,
            radii,
            outer,
            margin: 0.0,
            refine: false,
        };
        spec.check()?;
        Ok(spec)
    }

    /// Origin-centered circles with log-spaced radii inside the unit disk.
    pub fn origin_log(min_radius: f64, max_radius: f64, count: usize) -> Result<Self> {
        Self::new(
            vec![C64::new(0.0, 0.0)],
            log_spaced(min_radius, max_radius, count)?,
            OuterDomain::unit_disk(),
        )
    }

    pub fn with_refine(mut self, refine: bool) -> Self {
        self.refine = refine;
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    pub fn check(&self) -> Result<()> {
        if self.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(QcError::InvalidParameter(
                "radius grid entries must be positive and finite".into(),
            ));
        }
        if self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(QcError::InvalidParameter(
                "radius grid must be strictly increasing".into(),
            ));
        }
        if !(self.margin >= 0.0) {
            return Err(QcError::InvalidParameter("margin must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn admits(&self, circle: &CircleSpec) -> bool {
        self.outer.contains(circle, self.margin)
    }

    /// Admissible circles in center-major, radius-minor order.
    pub fn admissible_circles(&self) -> Vec<CircleSpec> {
        self.centers
            .iter()
            .flat_map(|&c| self.radii.iter().map(move |&r| CircleSpec { center: c, radius: r }))
            .filter(|c| self.admits(c))
            .collect()
    }
}

/// `count` geometrically spaced values from `min` to `max` inclusive.
pub fn log_spaced(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && max.is_finite()) || count == 0 {
        return Err(QcError::InvalidParameter(format!(
            "log-spaced grid needs 0 < min <= max and count > 0 (min={min}, max={max}, count={count})"
        )));
    }
    if count == 1 {
        return Ok(vec![max]);
    }
    let (lo, hi) = (min.ln(), max.ln());
    let step = (hi - lo) / (count - 1) as f64;
    let mut out: Vec<f64> = (0..count).map(|i| (lo + step * i as f64).exp()).collect();
    out[0] = min;
    out[count - 1] = max;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    SampledGrid,
}

pub type FieldFn = dyn Fn(C64) -> C64 + Send + Sync;

/// A complex distortion mu(z) together with the bound it claims.
#[derive(Clone)]
pub struct BeltramiField {
    eval: Arc<FieldFn>,
    k_max: f64,
    provenance: Provenance,
    singular: Vec<C64>,
}

impl fmt::Debug for BeltramiField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BeltramiField")
            .field("k_max", &self.k_max)
            .field("provenance", &self.provenance)
            .field("singular", &self.singular)
            .finish_non_exhaustive()
    }
}

impl BeltramiField {
    pub fn new<F>(k_max: f64, provenance: Provenance, eval: F) -> Self
    where
        F: Fn(C64) -> C64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            k_max,
            provenance,
            singular: Vec::new(),
        }
    }

    pub fn closed_form<F>(k_max: f64, eval: F) -> Self
    where
        F: Fn(C64) -> C64 + Send + Sync + 'static,
    {
        Self::new(k_max, Provenance::ClosedForm, eval)
    }

    pub fn constant(mu: C64) -> Self {
        Self::closed_form(mu.norm(), move |_| mu)
    }

    pub fn with_singular_points(mut self, points: Vec<C64>) -> Self {
        self.singular = points;
        self
    }

    #[inline]
    pub fn eval(&self, z: C64) -> C64 {
        (self.eval)(z)
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn singular_points(&self) -> &[C64] {
        &self.singular
    }

    pub fn is_singular(&self, z: C64) -> bool {
        self.singular.iter().any(|s| (z - s).norm() < 1e-12)
    }
}

/// Deterministic low-discrepancy sample set used to certify k_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationSampler {
    pub center: C64,
    pub radius: f64,
    pub count: usize,
}

impl Default for ValidationSampler {
    fn default() -> Self {
        Self {
            center: C64::new(0.0, 0.0),
            radius: 1.0,
            count: 4096,
        }
    }
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    out
}

impl ValidationSampler {
    /// Halton(2, 3) points mapped area-uniformly onto the disk.
    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        (1..=self.count).map(move |i| {
            let u = radical_inverse(i, 2);
            let v = radical_inverse(i, 3);
            self.center + C64::from_polar(self.radius * u.sqrt(), TAU * v)
        })
    }
}

/// A field whose bound has been checked on the validation samples.
#[derive(Debug, Clone)]
pub struct ValidatedField {
    field: BeltramiField,
    k_max: f64,
    observed_max: f64,
    samples: usize,
}

impl ValidatedField {
    pub fn field(&self) -> &BeltramiField {
        &self.field
    }

    /// Declared bound, checked against every sample.
    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    /// Largest |mu| actually seen on the validation samples.
    pub fn observed_max(&self) -> f64 {
        self.observed_max
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// K = (1 + k_max) / (1 - k_max).
    pub fn distortion(&self) -> f64 {
        distortion_from_k(self.k_max)
    }

    /// Evaluates mu and re-checks the certified bound at this point.
    pub fn mu_checked(&self, z: C64) -> Result<C64> {
        let mu = self.field.eval(z);
        check_modulus(z, mu, self.k_max)?;
        Ok(mu)
    }
}

fn check_modulus(z: C64, mu: C64, k_max: f64) -> Result<()> {
    let m = mu.norm();
    if !m.is_finite() || m >= DEGENERATE_MODULUS || m > k_max + BOUND_SLACK {
        return Err(QcError::BoundExceeded {
            z,
            modulus: m,
            bound: k_max,
        });
    }
    Ok(())
}

/// Checks |mu| <= k_max on the default sample set.
pub fn validate_field(field: BeltramiField, k_max: f64) -> Result<ValidatedField> {
    validate_field_with(field, k_max, &ValidationSampler::default())
}

pub fn validate_field_with(
    field: BeltramiField,
    k_max: f64,
    sampler: &ValidationSampler,
) -> Result<ValidatedField> {
    if !(0.0..1.0).contains(&k_max) {
        return Err(QcError::InvalidParameter(format!(
            "k_max must lie in [0, 1), got {k_max}"
        )));
    }
    let mut observed = 0.0_f64;
    let mut samples = 0;
    for z in sampler.points() {
        if field.is_singular(z) {
            continue;
        }
        let mu = field.eval(z);
        check_modulus(z, mu, k_max)?;
        observed = observed.max(mu.norm());
        samples += 1;
    }
    Ok(ValidatedField {
        field,
        k_max,
        observed_max: observed,
        samples,
    })
}

/// Validates a field against the bound it carries.
pub fn validate_own(field: BeltramiField) -> Result<ValidatedField> {
    let k = field.k_max();
    validate_field(field, k)
}

/// An orientation-preserving planar map with first partial derivatives.
pub trait QcMap: Send + Sync {
    fn value(&self, z: C64) -> C64;

    /// Returns (f_x, f_y).
    fn partials(&self, z: C64) -> (C64, C64);

    fn jacobian(&self, z: C64) -> f64 {
        let (fx, fy) = self.partials(z);
        (fx.conj() * fy).im
    }

    /// Exact Beltrami coefficient, when the map carries one.
    fn beltrami(&self) -> Option<&BeltramiField> {
        None
    }

    fn singular_points(&self) -> &[C64] {
        &[]
    }
}

pub type MapModel = Arc<dyn QcMap>;

type ValueFn = dyn Fn(C64) -> C64 + Send + Sync;
type PartialsFn = dyn Fn(C64) -> (C64, C64) + Send + Sync;

/// A map assembled from closures, for maps outside the catalog.
pub struct FnMap {
    value: Box<ValueFn>,
    partials: Box<PartialsFn>,
    beltrami: Option<BeltramiField>,
}

impl FnMap {
    pub fn new<V, P>(value: V, partials: P) -> Self
    where
        V: Fn(C64) -> C64 + Send + Sync + 'static,
        P: Fn(C64) -> (C64, C64) + Send + Sync + 'static,
    {
        Self {
            value: Box::new(value),
            partials: Box::new(partials),
            beltrami: None,
        }
    }

    pub fn with_beltrami(mut self, field: BeltramiField) -> Self {
        self.beltrami = Some(field);
        self
    }
}

impl QcMap for FnMap {
    fn value(&self, z: C64) -> C64 {
        (self.value)(z)
    }

    fn partials(&self, z: C64) -> (C64, C64) {
        (self.partials)(z)
    }

    fn beltrami(&self) -> Option<&BeltramiField> {
        self.beltrami.as_ref()
    }
}

/// (f_x, f_y) -> (f_z, f_zbar).
#[inline]
pub fn wirtinger_from_cartesian(fx: C64, fy: C64) -> (C64, C64) {
    let i = C64::i();
    ((fx - i * fy) * 0.5, (fx + i * fy) * 0.5)
}

/// mu(z) = f_zbar / f_z computed from the map's partials.
pub fn beltrami_of(map: &dyn QcMap, z: C64) -> Result<C64> {
    let (fx, fy) = map.partials(z);
    let (fz, fzb) = wirtinger_from_cartesian(fx, fy);
    if !(fz.norm() >= SINGULAR_FZ) {
        return Err(QcError::Singular(z));
    }
    Ok(fzb / fz)
}

/// mu at z, preferring the map's attached closed form.
pub fn map_mu(map: &dyn QcMap, z: C64) -> Result<C64> {
    match map.beltrami() {
        Some(field) => Ok(field.eval(z)),
        None => beltrami_of(map, z),
    }
}
