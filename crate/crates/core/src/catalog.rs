//! Closed-form quasiconformal test maps with exact Beltrami coefficients,
//! partials and Jacobians.

use std::fmt;
use std::sync::Arc;

use crate::error::{QcError, Result};
use crate::plane::{distortion_from_k, BeltramiField, MapModel, QcMap, C64};

/// Map families understood by [`parse_map_spec`].
pub const CATALOG_NAMES: &[&str] = &["identity", "radial_stretch", "spiral", "affine", "power_spiral"];

const ORIGIN: [C64; 1] = [C64::new(0.0, 0.0)];

/// f(z) = z |z|^(alpha - 1 + i gamma).
///
/// With beta = alpha - 1 + i gamma the Wirtinger derivatives are
/// f_z = |z|^beta (1 + beta/2) and f_zbar = |z|^beta (beta/2) z/zbar.
#[derive(Debug, Clone)]
pub struct PowerSpiral {
    alpha: f64,
    gamma: f64,
    beta: C64,
    field: BeltramiField,
}

impl PowerSpiral {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(QcError::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        if !gamma.is_finite() {
            return Err(QcError::InvalidParameter(format!("gamma must be finite, got {gamma}")));
        }
        let beta = C64::new(alpha - 1.0, gamma);
        let coeff = beta / (beta + 2.0);
        let field = BeltramiField::closed_form(coeff.norm(), move |z: C64| {
            let r2 = z.norm_sqr();
            if r2 == 0.0 {
                coeff
            } else {
                coeff * z * z / r2
            }
        })
        .with_singular_points(ORIGIN.to_vec());
        Ok(Self {
            alpha,
            gamma,
            beta,
            field,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The constant c in mu(z) = c z / zbar.
    pub fn coefficient(&self) -> C64 {
        self.beta / (self.beta + 2.0)
    }

    fn modulus_power(&self, z: C64) -> C64 {
        let r = z.norm();
        if r == 0.0 {
            if self.beta == C64::new(0.0, 0.0) {
                C64::new(1.0, 0.0)
            } else {
                C64::new(f64::NAN, f64::NAN)
            }
        } else {
            (self.beta * r.ln()).exp()
        }
    }

    fn wirtinger(&self, z: C64) -> (C64, C64) {
        let p = self.modulus_power(z);
        let half = self.beta * 0.5;
        let rot = if z.norm_sqr() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            z * z / z.norm_sqr()
        };
        (p * (half + 1.0), p * half * rot)
    }
}

impl QcMap for PowerSpiral {
    fn value(&self, z: C64) -> C64 {
        if z.norm_sqr() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        z * self.modulus_power(z)
    }

    fn partials(&self, z: C64) -> (C64, C64) {
        let (fz, fzb) = self.wirtinger(z);
        (fz + fzb, C64::i() * (fz - fzb))
    }

    fn jacobian(&self, z: C64) -> f64 {
        let r = z.norm();
        if r == 0.0 && self.alpha != 1.0 {
            return f64::NAN;
        }
        self.alpha * r.powf(2.0 * self.alpha - 2.0)
    }

    fn beltrami(&self) -> Option<&BeltramiField> {
        Some(&self.field)
    }

    fn singular_points(&self) -> &[C64] {
        if self.beta == C64::new(0.0, 0.0) {
            &[]
        } else {
            &ORIGIN
        }
    }
}

/// f(z) = a z + b zbar.
#[derive(Debug, Clone)]
pub struct Affine {
    a: C64,
    b: C64,
    field: BeltramiField,
}

impl Affine {
    pub fn new(a: C64, b: C64) -> Result<Self> {
        if !(b.norm() < a.norm()) {
            return Err(QcError::InvalidParameter(format!(
                "affine map needs |b| < |a| (a = {a}, b = {b})"
            )));
        }
        Ok(Self {
            a,
            b,
            field: BeltramiField::constant(b / a),
        })
    }
}

impl QcMap for Affine {
    fn value(&self, z: C64) -> C64 {
        self.a * z + self.b * z.conj()
    }

    fn partials(&self, _z: C64) -> (C64, C64) {
        (self.a + self.b, C64::i() * (self.a - self.b))
    }

    fn jacobian(&self, _z: C64) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr()
    }

    fn beltrami(&self) -> Option<&BeltramiField> {
        Some(&self.field)
    }
}

#[derive(Debug, Clone)]
pub enum CatalogMap {
    PowerSpiral(PowerSpiral),
    Affine(Affine),
}

impl QcMap for CatalogMap {
    fn value(&self, z: C64) -> C64 {
        match self {
            CatalogMap::PowerSpiral(m) => m.value(z),
            CatalogMap::Affine(m) => m.value(z),
        }
    }

    fn partials(&self, z: C64) -> (C64, C64) {
        match self {
            CatalogMap::PowerSpiral(m) => m.partials(z),
            CatalogMap::Affine(m) => m.partials(z),
        }
    }

    fn jacobian(&self, z: C64) -> f64 {
        match self {
            CatalogMap::PowerSpiral(m) => m.jacobian(z),
            CatalogMap::Affine(m) => m.jacobian(z),
        }
    }

    fn beltrami(&self) -> Option<&BeltramiField> {
        match self {
            CatalogMap::PowerSpiral(m) => m.beltrami(),
            CatalogMap::Affine(m) => m.beltrami(),
        }
    }

    fn singular_points(&self) -> &[C64] {
        match self {
            CatalogMap::PowerSpiral(m) => m.singular_points(),
            CatalogMap::Affine(m) => m.singular_points(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub params: Vec<(String, f64)>,
    pub map: Arc<CatalogMap>,
    /// Known Hölder exponent at the origin.
    pub exact_exponent: Option<f64>,
}

impl CatalogEntry {
    fn new(name: &str, params: Vec<(&str, f64)>, map: CatalogMap, exact: f64) -> Self {
        Self {
            name: name.to_string(),
            params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            map: Arc::new(map),
            exact_exponent: Some(exact),
        }
    }

    pub fn model(&self) -> MapModel {
        self.map.clone()
    }

    pub fn field(&self) -> &BeltramiField {
        self.map.beltrami().expect("catalog maps carry their coefficient")
    }

    /// sup |mu|.
    pub fn k(&self) -> f64 {
        self.field().k_max()
    }

    pub fn distortion(&self) -> f64 {
        distortion_from_k(self.k())
    }

    /// Canonical `name(key=value,...)` spec string.
    pub fn spec(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}({})", self.name, params.join(","))
    }
}

pub fn identity() -> CatalogEntry {
    let map = PowerSpiral::new(1.0, 0.0).expect("valid parameters");
    CatalogEntry::new("identity", vec![], CatalogMap::PowerSpiral(map), 1.0)
}

/// z |z|^(1/K - 1), mu = -k z/zbar, Hölder exponent 1/K at the origin.
pub fn radial_stretch(big_k: f64) -> Result<CatalogEntry> {
    if !(big_k >= 1.0 && big_k.is_finite()) {
        return Err(QcError::InvalidParameter(format!(
            "radial stretch needs K >= 1, got {big_k}"
        )));
    }
    let map = PowerSpiral::new(1.0 / big_k, 0.0)?;
    Ok(CatalogEntry::new(
        "radial_stretch",
        vec![("K", big_k)],
        CatalogMap::PowerSpiral(map),
        1.0 / big_k,
    ))
}

/// z |z|^(i gamma): a bilipschitz rotation of each circle about the origin.
pub fn spiral_map(gamma: f64) -> Result<CatalogEntry> {
    let map = PowerSpiral::new(1.0, gamma)?;
    Ok(CatalogEntry::new(
        "spiral",
        vec![("gamma", gamma)],
        CatalogMap::PowerSpiral(map),
        1.0,
    ))
}

pub fn affine_map(a: C64, b: C64) -> Result<CatalogEntry> {
    let map = Affine::new(a, b)?;
    let mut params = vec![("a_re", a.re), ("a_im", a.im), ("b_re", b.re), ("b_im", b.im)];
    params.retain(|(k, v)| *v != 0.0 || *k == "a_re" || *k == "b_re");
    Ok(CatalogEntry::new("affine", params, CatalogMap::Affine(map), 1.0))
}

pub fn power_spiral(alpha: f64, gamma: f64) -> Result<CatalogEntry> {
    let map = PowerSpiral::new(alpha, gamma)?;
    Ok(CatalogEntry::new(
        "power_spiral",
        vec![("alpha", alpha), ("gamma", gamma)],
        CatalogMap::PowerSpiral(map),
        alpha.min(1.0),
    ))
}

fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (p.trim().parse::<f64>().ok()?, q.trim().parse::<f64>().ok()?);
            (q != 0.0).then(|| p / q)
        }
        None => s.parse().ok(),
    }
}

struct Params {
    spec: String,
    items: Vec<(String, f64)>,
}

impl Params {
    fn take(&mut self, keys: &[&str]) -> Option<f64> {
        let pos = self.items.iter().position(|(k, _)| keys.contains(&k.as_str()))?;
        Some(self.items.remove(pos).1)
    }

    fn require(&mut self, keys: &[&str]) -> Result<f64> {
        self.take(keys)
            .ok_or_else(|| QcError::BadSpec(format!("{}: missing parameter `{}`", self.spec, keys[0])))
    }

    fn finish(self) -> Result<()> {
        match self.items.first() {
            Some((k, _)) => Err(QcError::BadSpec(format!("{}: unknown parameter `{k}`", self.spec))),
            None => Ok(()),
        }
    }
}

/// Parses `name(key=value, ...)`; values may be decimals or `p/q` fractions.
pub fn parse_map_spec(spec: &str) -> Result<CatalogEntry> {
    let spec = spec.trim();
    let (name, body) = match spec.split_once('(') {
        Some((name, rest)) => {
            let body = rest
                .strip_suffix(')')
                .ok_or_else(|| QcError::BadSpec(spec.to_string()))?;
            (name.trim(), body)
        }
        None => (spec, ""),
    };
    let mut items = Vec::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| QcError::BadSpec(format!("{spec}: expected key=value, got `{part}`")))?;
        let v = parse_number(v)
            .ok_or_else(|| QcError::BadSpec(format!("{spec}: bad number `{}`", v.trim())))?;
        items.push((k.trim().to_string(), v));
    }
    let mut p = Params {
        spec: spec.to_string(),
        items,
    };
    let entry = match name {
        "identity" => identity(),
        "radial_stretch" => radial_stretch(p.require(&["K", "k"])?)?,
        "spiral" | "spiral_map" => spiral_map(p.require(&["gamma", "g"])?)?,
        "power_spiral" => {
            let alpha = p.require(&["alpha"])?;
            let gamma = p.take(&["gamma", "g"]).unwrap_or(0.0);
            power_spiral(alpha, gamma)?
        }
        "affine" | "affine_map" => {
            let a = C64::new(
                p.take(&["a", "a_re"]).unwrap_or(1.0),
                p.take(&["a_im"]).unwrap_or(0.0),
            );
            let b = C64::new(
                p.take(&["b", "b_re"]).unwrap_or(0.0),
                p.take(&["b_im"]).unwrap_or(0.0),
            );
            affine_map(a, b)?
        }
        _ => {
            return Err(QcError::UnknownMap {
                name: name.to_string(),
                available: CATALOG_NAMES.join(", "),
            })
        }
    };
    p.finish()?;
    Ok(entry)
}

/// One representative entry per family, for listings.
pub fn default_entries() -> Vec<CatalogEntry> {
    vec![
        identity(),
        radial_stretch(2.0).expect("valid"),
        spiral_map(1.0).expect("valid"),
        affine_map(C64::new(1.0, 0.0), C64::new(1.0 / 3.0, 0.0)).expect("valid"),
        power_spiral(0.5, 1.0).expect("valid"),
    ]
}
