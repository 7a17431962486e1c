//! Grid-sampled coefficient data and the CSV + JSON sidecar file format.
//!
//! A grid file is a CSV whose rows are listed row-major (x fastest), with a
//! sidecar descriptor `{origin: [x0, y0], spacing: h, nx, ny, k_max}` stored
//! next to it with the `.json` extension.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{QcError, Result};
use crate::plane::{BeltramiField, Provenance, BOUND_SLACK, C64, DEGENERATE_MODULUS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    Nearest,
    #[default]
    Bilinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDescriptor {
    pub origin: [f64; 2],
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<f64>,
    #[serde(default, rename = "K", skip_serializing_if = "Option::is_none")]
    pub big_k: Option<f64>,
}

impl GridDescriptor {
    fn check(&self) -> Result<()> {
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(QcError::FieldFile(format!(
                "grid spacing must be positive, got {}",
                self.spacing
            )));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(QcError::FieldFile("grid needs at least 2 x 2 nodes".into()));
        }
        Ok(())
    }

    pub fn node(&self, i: usize, j: usize) -> C64 {
        C64::new(
            self.origin[0] + self.spacing * i as f64,
            self.origin[1] + self.spacing * j as f64,
        )
    }

    /// Interpolation weights for z; points outside the grid are clamped to it.
    pub fn stencil(&self, z: C64, interp: Interpolation) -> [(usize, f64); 4] {
        let gx = ((z.re - self.origin[0]) / self.spacing).clamp(0.0, (self.nx - 1) as f64);
        let gy = ((z.im - self.origin[1]) / self.spacing).clamp(0.0, (self.ny - 1) as f64);
        let idx = |i: usize, j: usize| j * self.nx + i;
        match interp {
            Interpolation::Nearest => {
                let (i, j) = (gx.round() as usize, gy.round() as usize);
                [(idx(i, j), 1.0), (0, 0.0), (0, 0.0), (0, 0.0)]
            }
            Interpolation::Bilinear => {
                let i = (gx.floor() as usize).min(self.nx - 2);
                let j = (gy.floor() as usize).min(self.ny - 2);
                let (fx, fy) = (gx - i as f64, gy - j as f64);
                [
                    (idx(i, j), (1.0 - fx) * (1.0 - fy)),
                    (idx(i + 1, j), fx * (1.0 - fy)),
                    (idx(i, j + 1), (1.0 - fx) * fy),
                    (idx(i + 1, j + 1), fx * fy),
                ]
            }
        }
    }
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn read_descriptor(csv_path: &Path) -> Result<GridDescriptor> {
    let side = sidecar_path(csv_path);
    let text = std::fs::read_to_string(&side)
        .map_err(|e| QcError::FieldFile(format!("{}: {e}", side.display())))?;
    let desc: GridDescriptor = serde_json::from_str(&text)?;
    desc.check()?;
    Ok(desc)
}

/// Reads `x,y,<columns...>` rows and checks they follow the descriptor's grid.
pub fn read_grid_rows(
    csv_path: &Path,
    desc: &GridDescriptor,
    columns: &[&str],
) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::Reader::from_path(csv_path)?;
    let headers = rdr.headers()?.clone();
    let expected: Vec<&str> = ["x", "y"].iter().chain(columns).copied().collect();
    let got: Vec<&str> = headers.iter().map(str::trim).collect();
    if got != expected {
        return Err(QcError::FieldFile(format!(
            "expected header `{}`, found `{}`",
            expected.join(","),
            got.join(",")
        )));
    }
    let mut rows = Vec::with_capacity(desc.nx * desc.ny);
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let vals = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| QcError::FieldFile(format!("row {}: {e}", n + 2)))?;
        let (i, j) = (n % desc.nx, n / desc.nx);
        let node = desc.node(i, j);
        let tol = 1e-9 * desc.spacing.max(1.0);
        if (vals[0] - node.re).abs() > tol || (vals[1] - node.im).abs() > tol {
            return Err(QcError::FieldFile(format!(
                "row {} at ({}, {}) does not match grid node ({}, {})",
                n + 2,
                vals[0],
                vals[1],
                node.re,
                node.im
            )));
        }
        rows.push(vals[2..].to_vec());
    }
    if rows.len() != desc.nx * desc.ny {
        return Err(QcError::FieldFile(format!(
            "expected {} rows, found {}",
            desc.nx * desc.ny,
            rows.len()
        )));
    }
    Ok(rows)
}

/// Discretized mu on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub descriptor: GridDescriptor,
    pub values: Vec<C64>,
    pub interpolation: Interpolation,
    pub k_max: f64,
}

impl SampledField {
    pub fn new(
        descriptor: GridDescriptor,
        values: Vec<C64>,
        interpolation: Interpolation,
        k_max: f64,
    ) -> Result<Self> {
        descriptor.check()?;
        if values.len() != descriptor.nx * descriptor.ny {
            return Err(QcError::FieldFile(format!(
                "value count {} does not match {} x {} grid",
                values.len(),
                descriptor.nx,
                descriptor.ny
            )));
        }
        if !(0.0..1.0).contains(&k_max) {
            return Err(QcError::InvalidParameter(format!("k_max {k_max} outside [0, 1)")));
        }
        for (n, v) in values.iter().enumerate() {
            let m = v.norm();
            if !m.is_finite() || m >= DEGENERATE_MODULUS || m > k_max + BOUND_SLACK {
                return Err(QcError::BoundExceeded {
                    z: descriptor.node(n % descriptor.nx, n / descriptor.nx),
                    modulus: m,
                    bound: k_max,
                });
            }
        }
        Ok(Self {
            descriptor,
            values,
            interpolation,
            k_max,
        })
    }

    pub fn read(csv_path: &Path, interpolation: Interpolation) -> Result<Self> {
        let desc = read_descriptor(csv_path)?;
        let k_max = desc
            .k_max
            .ok_or_else(|| QcError::FieldFile("sidecar is missing `k_max`".into()))?;
        let rows = read_grid_rows(csv_path, &desc, &["re", "im"])?;
        let values = rows.into_iter().map(|r| C64::new(r[0], r[1])).collect();
        Self::new(desc, values, interpolation, k_max)
    }

    pub fn write(&self, csv_path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(csv_path)?;
        w.write_record(["x", "y", "re", "im"])?;
        for (n, v) in self.values.iter().enumerate() {
            let z = self.descriptor.node(n % self.descriptor.nx, n / self.descriptor.nx);
            w.write_record(&[
                z.re.to_string(),
                z.im.to_string(),
                v.re.to_string(),
                v.im.to_string(),
            ])?;
        }
        w.flush()?;
        let desc = GridDescriptor {
            k_max: Some(self.k_max),
            ..self.descriptor.clone()
        };
        std::fs::write(sidecar_path(csv_path), serde_json::to_string_pretty(&desc)?)?;
        Ok(())
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.descriptor
            .stencil(z, self.interpolation)
            .iter()
            .map(|&(n, w)| self.values[n] * w)
            .sum()
    }

    /// Wraps the grid as an evaluable field. Convex interpolation keeps the bound.
    pub fn into_field(self) -> BeltramiField {
        let k = self.k_max;
        BeltramiField::new(k, Provenance::SampledGrid, move |z| self.eval(z))
    }
}
