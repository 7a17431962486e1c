//! Analysis orchestration.

use std::path::Path;

use sha2::{Digest, Sha256};

use qcreg_core::bounds::gronwall_exponent;
use qcreg_core::catalog::parse_map_spec;
use qcreg_core::extremal::{delta_weight_integral, empirical_holder, epsilon_weight_integral, extremality_report};
use qcreg_core::plane::{distortion_from_k, validate_field, validate_own, QcMap};
use qcreg_core::sampled::sidecar_path;
use qcreg_core::{
    beltrami_from_matrix, comparison_bounds, distortion_constant, gronwall_check, isoperimetric_constant,
    mori_consistency, phi_profile, validate_matrix_field, BeltramiField, MatrixField, ProfileConfig,
    RegularityReport, SampledField, SymMatrix, ValidatedField,
};

use crate::config::{AnalysisConfig, Subject};
use crate::error::{CliError, Result};
use crate::report::{EllipticSummary, Provenance, RunReport};

fn sha256_hex(chunks: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for c in chunks {
        h.update(c);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn file_hash(csv: &Path) -> Result<String> {
    let read = |p: &Path| {
        std::fs::read(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))
    };
    Ok(sha256_hex(&[&read(csv)?, &read(&sidecar_path(csv))?]))
}

enum Prepared {
    Map(qcreg_core::CatalogEntry),
    Field { field: BeltramiField, k_max: f64 },
    Matrix(MatrixField),
}

fn prepare(subject: &Subject) -> Result<(Prepared, Option<String>)> {
    Ok(match subject {
        Subject::Catalog(spec) => (
            Prepared::Map(parse_map_spec(spec).map_err(CliError::core("map spec"))?),
            None,
        ),
        Subject::SampledMu { path, interpolation } => {
            let hash = file_hash(path)?;
            let s = SampledField::read(path, *interpolation).map_err(CliError::core("sampled field"))?;
            let k_max = s.k_max;
            (Prepared::Field { field: s.into_field(), k_max }, Some(hash))
        }
        Subject::MatrixField { path, interpolation } => {
            let hash = file_hash(path)?;
            let m = MatrixField::read(path, *interpolation).map_err(CliError::core("matrix field"))?;
            (Prepared::Matrix(m), Some(hash))
        }
        Subject::ConstantMatrix { matrix: [a11, a12, a22], big_k } => {
            (Prepared::Matrix(MatrixField::constant(SymMatrix::new(*a11, *a12, *a22), *big_k)), None)
        }
    })
}

/// Runs every enabled diagnostic for the configured subject.
///
/// The result depends only on the config and input files. Invariant
/// failures are recorded in `violations` rather than returned as errors.
pub fn run_analysis(cfg: &AnalysisConfig) -> Result<RunReport> {
    cfg.validate()?;
    let q = &cfg.quadrature;
    let diag = &cfg.diagnostics;
    let tol = &cfg.tolerances;
    let domain = cfg.domain.spec().map_err(CliError::core("domain"))?;
    let radii = cfg.radii.values().map_err(CliError::core("radii"))?;
    let (prepared, input_hash) = prepare(&cfg.subject)?;

    let mut elliptic = None;
    let mut resolution_a = None;
    let (validated, big_k, map): (ValidatedField, f64, Option<&dyn QcMap>);
    match &prepared {
        Prepared::Map(entry) => {
            validated = validate_own(entry.field().clone()).map_err(CliError::core("coefficient"))?;
            big_k = entry.distortion();
            map = Some(entry.map.as_ref());
        }
        Prepared::Field { field, k_max } => {
            validated = validate_field(field.clone(), *k_max).map_err(CliError::core("coefficient"))?;
            big_k = distortion_from_k(*k_max);
            map = None;
        }
        Prepared::Matrix(m) => {
            big_k = m.distortion();
            let vm = validate_matrix_field(m.clone(), big_k).map_err(CliError::core("matrix field"))?;
            let mu = beltrami_from_matrix(&vm).map_err(CliError::core("matrix field"))?;
            validated = validate_own(mu).map_err(CliError::core("coefficient"))?;
            if diag.elliptic {
                let b = comparison_bounds(&vm, &domain, q).map_err(CliError::core("comparison bounds"))?;
                elliptic = Some(EllipticSummary {
                    ps: b.ps,
                    ric_div: b.ric_div,
                    new_bound: b.new_bound,
                    lambda_min: b.lambda_min,
                    lambda_max: b.lambda_max,
                    eigen_samples: b.eigen_samples,
                });
            }
            map = None;
        }
    }

    let c = distortion_constant(&validated, &domain, q).map_err(CliError::core("distortion constant"))?;
    let a = match map {
        Some(m) => {
            let a = isoperimetric_constant(m, &domain, q).map_err(CliError::core("isoperimetric constant"))?;
            resolution_a = Some(a.resolution);
            Some(a)
        }
        None => None,
    };
    let mut regularity = RegularityReport::from_parts(&validated, &c, a.as_ref()).map_err(CliError::core("regularity"))?;

    let geometry = match map {
        Some(m) if diag.geometry || diag.extremal => {
            let pcfg = ProfileConfig {
                quadrature: *q,
                radial: cfg.radial,
                consistency_tol: tol.consistency,
            };
            Some(phi_profile(m, &radii, &pcfg).map_err(CliError::core("geometry profile"))?)
        }
        _ => None,
    };
    if let Some(p) = &geometry {
        let g = gronwall_check(&p.phi_samples(), gronwall_exponent(&regularity), tol.gronwall)
            .map_err(CliError::core("Grönwall check"))?;
        regularity.gronwall = Some(g);
    }

    let holder_radii: Vec<f64> = radii.iter().copied().filter(|&t| t < 1.0).collect();
    let holder = match map {
        Some(m) if (diag.holder || diag.extremal) && !holder_radii.is_empty() => Some(
            empirical_holder(m, &holder_radii, &cfg.radial, q).map_err(CliError::core("empirical exponent"))?,
        ),
        _ => None,
    };

    let (mut epsilon, mut defect, mut extremality) = (None, None, None);
    if diag.extremal {
        let eps = epsilon_weight_integral(validated.field(), big_k, &radii, q)
            .map_err(CliError::core("epsilon profile"))?;
        if let Some(p) = &geometry {
            let d = delta_weight_integral(p, &diag.density_levels).map_err(CliError::core("defect profile"))?;
            if let Some(h) = holder.as_deref().filter(|h| !h.is_empty()) {
                extremality = Some(
                    extremality_report(&eps, &d, h, big_k, &diag.thresholds)
                        .map_err(CliError::core("extremality"))?,
                );
            }
            defect = Some(d);
        }
        epsilon = Some(eps);
    }

    let mori = if diag.mori {
        Some(mori_consistency(&validated, &domain, q, tol.mori).map_err(CliError::core("Mori chain"))?)
    } else {
        None
    };

    let mut violations = regularity.violations(tol.invariant);
    if regularity.alpha_new < regularity.alpha_ricciardi - 1e-9 {
        violations.push(format!(
            "alpha_new = {} below alpha_ricciardi = {}",
            regularity.alpha_new, regularity.alpha_ricciardi
        ));
    }
    if let Some(m) = mori.as_ref().filter(|m| !m.pass) {
        violations.push(format!("circle average {} exceeds K = {}", m.max_average, m.distortion));
    }
    if let Some(p) = &geometry {
        if let Some((t, d)) = p.delta_samples().into_iter().find(|&(_, d)| d < -tol.invariant) {
            violations.push(format!("isoperimetric defect {d} < 0 at t = {t}"));
        }
    }
    if let Some(e) = &epsilon {
        if let Some(v) = e.eps_re_avg.iter().find(|&&v| v < -1e-9) {
            violations.push(format!("negative circle average of Re eps: {v}"));
        }
    }

    let provenance = Provenance {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: sha256_hex(&[cfg.analysis_json().as_bytes()]),
        input_hash,
        quadrature: *q,
        radial: cfg.radial,
        resolution_c: c.resolution,
        resolution_a,
        domain,
        profile_radii: radii,
        validation_samples: validated.samples(),
    };
    Ok(RunReport {
        subject: cfg.subject.to_string(),
        regularity,
        mori,
        // The profile may have been computed only to feed the defect integrals.
        geometry: geometry.filter(|_| diag.geometry),
        epsilon,
        defect,
        holder: holder.filter(|_| diag.holder),
        extremality,
        elliptic,
        violations,
        provenance,
    })
}
