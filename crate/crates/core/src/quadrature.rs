//! Periodic trapezoidal quadrature on circles and suprema over circle families.
//!
//! Nodes sit at theta_j = 2 pi (j + 1/2) / N. The half-node offset keeps nodes
//! off the rays theta = 0, pi/2, ... where branch data of z/zbar fields is
//! often tabulated, and off points where a circle touches its own center's axes.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QcError, Result};
use crate::plane::{CircleSpec, DomainSpec, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "QuadratureConfig::default_nodes")]
    pub nodes: usize,
    #[serde(default = "QuadratureConfig::default_doublings")]
    pub max_doublings: u32,
    #[serde(default = "QuadratureConfig::default_rel_tol")]
    pub rel_tol: f64,
}

impl QuadratureConfig {
    const fn default_nodes() -> usize {
        256
    }
    const fn default_doublings() -> u32 {
        6
    }
    const fn default_rel_tol() -> f64 {
        1e-9
    }

    /// A fixed node count with no doubling.
    pub fn fixed(nodes: usize) -> Self {
        Self {
            nodes,
            max_doublings: 0,
            rel_tol: 1e-9,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.nodes < 16 || !self.nodes.is_power_of_two() {
            return Err(QcError::InvalidParameter(format!(
                "quadrature nodes must be a power of two >= 16, got {}",
                self.nodes
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(QcError::InvalidParameter("rel_tol must be positive".into()));
        }
        Ok(())
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes: Self::default_nodes(),
            max_doublings: Self::default_doublings(),
            rel_tol: Self::default_rel_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageEstimate {
    pub value: f64,
    pub nodes: usize,
    pub converged: bool,
}

/// Mean of `integrand(theta, z)` over N equally spaced nodes.
fn trapezoid_mean<F>(circle: &CircleSpec, n: usize, integrand: &F) -> Result<(f64, f64)>
where
    F: Fn(f64, C64) -> Result<f64>,
{
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for j in 0..n {
        let theta = TAU * (j as f64 + 0.5) / n as f64;
        let v = integrand(theta, circle.point(theta))?;
        if !v.is_finite() {
            return Err(QcError::NonFinite { node: j, theta });
        }
        sum += v;
        abs_sum += v.abs();
    }
    Ok((sum / n as f64, abs_sum / n as f64))
}

/// Average with respect to normalized arclength, doubling the node count
/// until two successive estimates agree to `rel_tol`.
pub fn circular_average_detailed<F>(
    circle: &CircleSpec,
    cfg: &QuadratureConfig,
    integrand: F,
) -> Result<AverageEstimate>
where
    F: Fn(f64, C64) -> Result<f64>,
{
    cfg.check()?;
    let mut n = cfg.nodes;
    let (mut prev, _) = trapezoid_mean(circle, n, &integrand)?;
    for _ in 0..cfg.max_doublings {
        n *= 2;
        let (cur, scale) = trapezoid_mean(circle, n, &integrand)?;
        let diff = (cur - prev).abs();
        if diff <= cfg.rel_tol * cur.abs() || diff <= 1e-15 * scale {
            return Ok(AverageEstimate {
                value: cur,
                nodes: n,
                converged: true,
            });
        }
        prev = cur;
    }
    Ok(AverageEstimate {
        value: prev,
        nodes: n,
        converged: cfg.max_doublings == 0,
    })
}

pub fn circular_average<F>(circle: &CircleSpec, cfg: &QuadratureConfig, integrand: F) -> Result<f64>
where
    F: Fn(f64, C64) -> Result<f64>,
{
    circular_average_detailed(circle, cfg, integrand).map(|e| e.value)
}

/// Convenience for integrands that depend on the angle only.
pub fn angular_average<F>(cfg: &QuadratureConfig, integrand: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let unit = CircleSpec {
        center: C64::new(0.0, 0.0),
        radius: 1.0,
    };
    circular_average(&unit, cfg, |theta, _| Ok(integrand(theta)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridResolution {
    pub centers: usize,
    pub radii: usize,
    pub admissible: usize,
    pub refined: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupResult {
    pub value: f64,
    pub argmax: CircleSpec,
    pub per_circle: Vec<(CircleSpec, f64)>,
    pub resolution: GridResolution,
}

fn argmax(values: &[(CircleSpec, f64)]) -> usize {
    // Ties resolve to the lexicographically smallest circle so the result does
    // not depend on grid ordering.
    let key = |c: &CircleSpec| (c.center.re, c.center.im, c.radius);
    let mut best = 0;
    for (i, (c, v)) in values.iter().enumerate().skip(1) {
        let (bc, bv) = &values[best];
        if *v > *bv || (*v == *bv && key(c) < key(bc)) {
            best = i;
        }
    }
    best
}

/// Evaluates `per_circle` on every admissible circle of the domain and returns
/// the maximum. Circles are evaluated concurrently.
pub fn sup_over_circles<F>(domain: &DomainSpec, per_circle: F) -> Result<SupResult>
where
    F: Fn(&CircleSpec) -> Result<f64> + Sync,
{
    domain.check()?;
    let circles = domain.admissible_circles();
    if circles.is_empty() {
        return Err(QcError::EmptyDomain);
    }
    let mut values = circles
        .par_iter()
        .map(|c| per_circle(c).map(|v| (*c, v)))
        .collect::<Result<Vec<_>>>()?;
    let admissible = values.len();

    let mut refined = 0;
    if domain.refine {
        let best = values[argmax(&values)].0;
        let pos = domain
            .radii
            .iter()
            .position(|r| *r == best.radius)
            .expect("argmax radius comes from the grid");
        let mut extra = Vec::new();
        if pos > 0 {
            extra.push((domain.radii[pos - 1] * best.radius).sqrt());
        }
        if pos + 1 < domain.radii.len() {
            extra.push((domain.radii[pos + 1] * best.radius).sqrt());
        }
        let extra: Vec<CircleSpec> = extra
            .into_iter()
            .map(|r| CircleSpec {
                center: best.center,
                radius: r,
            })
            .filter(|c| domain.admits(c))
            .collect();
        let more = extra
            .par_iter()
            .map(|c| per_circle(c).map(|v| (*c, v)))
            .collect::<Result<Vec<_>>>()?;
        refined = more.len();
        values.extend(more);
    }

    let best = argmax(&values);
    Ok(SupResult {
        value: values[best].1,
        argmax: values[best].0,
        resolution: GridResolution {
            centers: domain.centers.len(),
            radii: domain.radii.len(),
            admissible,
            refined,
        },
        per_circle: values,
    })
}
