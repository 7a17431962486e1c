//! Acceptance suite: one PASS/FAIL line per criterion.

use std::f64::consts::{PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcreg_cli::{report_json, run_analysis, AnalysisConfig, Subject};
use qcreg_core::catalog::{affine_map, power_spiral, radial_stretch, spiral_map, CatalogEntry};
use qcreg_core::elliptic::mu_from_matrix;
use qcreg_core::extremal::{
    distortion_deficit, empirical_holder, epsilon_weight_integral, superlevel_lower_density, Verdict,
};
use qcreg_core::geometry::{
    image_area_green, image_area_jacobian, quasicircle_length_direct, quasicircle_length_formula,
};
use qcreg_core::plane::{distortion_from_k, k_from_distortion, wirtinger_from_cartesian};
use qcreg_core::{
    comparison_bounds, isoperimetric_constant, log_spaced, mori_consistency, validate_field,
    validate_matrix_field, BeltramiField, CircleSpec, DomainSpec, MatrixField, OuterDomain, QuadratureConfig,
    RadialConfig, SymMatrix, C64,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

// ---- independent oracles ---------------------------------------------------

/// E(m) by the arithmetic-geometric mean.
fn ellip_e(m: f64) -> f64 {
    let (mut a, mut b) = (1.0_f64, (1.0 - m).sqrt());
    let mut c;
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..40 {
        c = 0.5 * (a - b);
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        pow *= 2.0;
        sum += pow * c * c;
        a = an;
        b = bn;
        if c.abs() < 1e-17 {
            break;
        }
    }
    PI / (2.0 * a) * (1.0 - sum)
}

fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    4.0 * a * ellip_e(1.0 - (b / a).powi(2))
}

/// Image of the unit disk under z + zbar/3: semi-axes 4/3 and 2/3.
fn ellipse_oracle() -> (f64, f64) {
    let p = ellipse_perimeter(4.0 / 3.0, 2.0 / 3.0);
    let area = 8.0 * PI / 9.0;
    let iso = 4.0 * PI * area / (p * p);
    (iso, 1.0 / iso - 1.0)
}

/// mu of f = u + i v where u = p x + q y and grad v = rot90(A grad u).
fn constructed_mu(a: &SymMatrix, p: f64, q: f64) -> C64 {
    let g = a.apply([p, q]);
    let (fx, fy) = (C64::new(p, -g[1]), C64::new(q, g[0]));
    let (fz, fzb) = wirtinger_from_cartesian(fx, fy);
    fzb / fz
}

// ---- fixtures -----------------------------------------------------------------

fn catalog_matrix() -> Vec<CatalogEntry> {
    let mut v: Vec<CatalogEntry> = [1.5, 2.0, 5.0].iter().map(|&k| radial_stretch(k).unwrap()).collect();
    v.extend([0.5, 1.0, 2.0].iter().map(|&g| spiral_map(g).unwrap()));
    v.push(affine_map(C64::new(1.0, 0.0), C64::new(1.0 / 3.0, 0.0)).unwrap());
    v.push(power_spiral(0.5, 1.0).unwrap());
    v
}

const RADII: [f64; 4] = [0.1, 0.25, 0.5, 1.0];

fn spread_domain() -> DomainSpec {
    let centers = vec![
        C64::new(0.0, 0.0),
        C64::new(0.3, 0.0),
        C64::new(0.0, -0.3),
        C64::new(-0.2, 0.2),
    ];
    DomainSpec::new(centers, log_spaced(0.05, 0.6, 6).unwrap(), OuterDomain::unit_disk()).unwrap()
}

fn lean(spec: &str) -> AnalysisConfig {
    let mut cfg = AnalysisConfig::catalog(spec).unwrap();
    let d = &mut cfg.diagnostics;
    (d.extremal, d.holder, d.mori) = (false, false, false);
    cfg
}

fn random_phase_field(rng: &mut ChaCha8Rng, k: f64) -> BeltramiField {
    let (a, b, c, d) = (
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(0.0..TAU),
    );
    BeltramiField::closed_form(k, move |z| C64::from_polar(k, a * z.re + b * z.im + c * z.re * z.im + d))
}

fn random_field(rng: &mut ChaCha8Rng, k: f64) -> BeltramiField {
    let waves: Vec<(C64, f64, f64)> = (0..4)
        .map(|_| {
            (
                C64::from_polar(rng.gen_range(0.1..1.0), rng.gen_range(0.0..TAU)),
                rng.gen_range(-6.0..6.0),
                rng.gen_range(-6.0..6.0),
            )
        })
        .collect();
    let total: f64 = waves.iter().map(|w| w.0.norm()).sum();
    let blend = rng.gen_range(0.0..1.0);
    let scale = k * rng.gen_range(0.2..1.0);
    BeltramiField::closed_form(k, move |z| {
        let wave: C64 =
            waves.iter().map(|&(c, a, b)| c * C64::from_polar(1.0, a * z.re + b * z.im)).sum::<C64>() / total;
        let radial = if z.norm_sqr() > 0.0 { -z / z.conj() } else { C64::new(0.0, 0.0) };
        scale * (blend * radial + (1.0 - blend) * wave)
    })
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---- criteria -----------------------------------------------------------------

fn length_formula() -> Outcome {
    let cfg = QuadratureConfig::fixed(8192);
    let mut worst = (0.0_f64, String::new());
    for e in catalog_matrix() {
        for t in RADII {
            let c = CircleSpec::origin(t).unwrap();
            let d = quasicircle_length_direct(e.map.as_ref(), &c, &cfg).unwrap();
            let f = quasicircle_length_formula(e.map.as_ref(), &c, &cfg).unwrap();
            let rel = (f - d).abs() / d;
            if rel >= worst.0 {
                worst = (rel, format!("{} t={t}", e.spec()));
            }
        }
    }
    check(worst.0 <= 1e-6, format!("worst relative gap {:.2e} at {} (tol 1e-6, 8192 nodes)", worst.0, worst.1))
}

fn area_cross_oracle() -> Outcome {
    let cfg = QuadratureConfig::default();
    let radial = RadialConfig::default();
    let mut worst = (0.0_f64, String::new());
    for e in catalog_matrix() {
        for t in RADII {
            let c = CircleSpec::origin(t).unwrap();
            let g = image_area_green(e.map.as_ref(), &c, &cfg).unwrap();
            let j = image_area_jacobian(e.map.as_ref(), &c, &radial, &cfg).unwrap();
            let rel = (g - j).abs() / g;
            if rel >= worst.0 {
                worst = (rel, format!("{} t={t}", e.spec()));
            }
        }
    }
    check(worst.0 <= 1e-6, format!("worst relative gap {:.2e} at {} (tol 1e-6)", worst.0, worst.1))
}

fn classic_exponent() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for k in [1.5, 2.0, 5.0] {
        let r = run_analysis(&lean(&format!("radial_stretch(K={k})"))).unwrap();
        let g = r.regularity.gronwall.clone().expect("profile present");
        let err = (r.regularity.alpha_new - 1.0 / k).abs();
        ok &= err <= 1e-6 && g.pass && g.equality_gap <= 1e-6;
        lines.push(format!("K={k}: |alpha_new-1/K|={err:.1e}, gronwall {} gap {:.1e}", g.pass, g.equality_gap));
    }
    check(ok, lines.join("; "))
}

fn rotation_example() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let t: f64 = 1e-4;
    let bound = 1.0 / t.ln().abs();
    for g in [0.5, 1.0, 2.0] {
        let r = run_analysis(&lean(&format!("spiral(gamma={g})"))).unwrap();
        let err = (r.regularity.alpha_ricciardi - 1.0).abs();
        let entry = spiral_map(g).unwrap();
        let h = empirical_holder(entry.map.as_ref(), &[t], &RadialConfig::default(), &QuadratureConfig::default())
            .unwrap()[0];
        let dev = (h.alpha_area - 1.0).abs().max((h.alpha_sup - 1.0).abs());
        ok &= err <= 1e-9 && dev <= bound && r.regularity.distortion > 1.0;
        lines.push(format!("gamma={g}: |alpha_ric-1|={err:.1e}, |alpha_est-1|={dev:.3} <= {bound:.3}"));
    }
    check(ok, lines.join("; "))
}

fn improvement_over_distortion_bound() -> Outcome {
    let r = run_analysis(&lean("affine(a=1,b=1/3)")).unwrap().regularity;
    let (iso, _) = ellipse_oracle();
    let oracle_new = 1.0 / (iso * 1.25);
    let ok = (r.alpha_ricciardi - 0.8).abs() <= 1e-6
        && (r.alpha_new - 0.9510).abs() <= 1e-3
        && (r.alpha_new - oracle_new).abs() <= 1e-3
        && r.alpha_new > r.alpha_ricciardi;
    check(
        ok,
        format!(
            "alpha_ric={:.9}, alpha_new={:.6} (ellipse oracle {:.6}), A={:.6}",
            r.alpha_ricciardi, r.alpha_new, oracle_new, r.a
        ),
    )
}

fn isoperimetric_sanity() -> Outcome {
    let cfg = QuadratureConfig::default();
    let domain = spread_domain();
    let mut worst_a = 0.0_f64;
    for e in catalog_matrix() {
        let a = isoperimetric_constant(e.map.as_ref(), &domain, &cfg).unwrap();
        worst_a = worst_a.max(a.value);
    }
    let report = run_analysis(&lean("affine(a=1,b=1/3)")).unwrap();
    let geometry = report.geometry.expect("profile present");
    let (_, want) = ellipse_oracle();
    let worst_delta = geometry.delta.iter().map(|d| (d - want).abs()).fold(0.0, f64::max);
    check(
        worst_a <= 1.0 + 1e-6 && worst_delta <= 1e-4,
        format!(
            "max A = {worst_a:.9}; affine delta vs oracle {want:.6}: worst gap {worst_delta:.1e} over {} radii",
            geometry.radii.len()
        ),
    )
}

fn mori_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let domain = spread_domain();
    let cfg = QuadratureConfig::default();
    let k = 1.0 / 3.0;
    let mut worst = f64::MIN;
    for _ in 0..100 {
        let v = validate_field(random_phase_field(&mut rng, k), k).unwrap();
        let m = mori_consistency(&v, &domain, &cfg, 1e-9).unwrap();
        worst = worst.max(m.max_average);
    }
    check(worst <= 2.0 + 1e-9, format!("largest circle average over 100 fields = {worst:.12} (bound 2)"))
}

fn extremizer_diagnostics() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;

    let r = run_analysis(&AnalysisConfig::catalog("radial_stretch(K=2)").unwrap()).unwrap();
    let eps = r.epsilon.as_ref().unwrap();
    let def = r.defect.as_ref().unwrap();
    let max_w = eps.ratio_w.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let max_i = def.ratio_i.iter().map(|v| v.abs()).fold(0.0, f64::max);
    ok &= max_w <= 1e-9 && max_i <= 1e-9;
    parts.push(format!("radial_stretch(2): max ratio_W {max_w:.1e}, ratio_I {max_i:.1e}"));

    let k = k_from_distortion(2.0);
    let perturbed = BeltramiField::closed_form(k - 0.1, move |z| (z / z.conj()) * (-k + 0.1));
    let radii = log_spaced(1e-4, 1.0, 16).unwrap();
    let p = epsilon_weight_integral(&perturbed, 2.0, &radii, &QuadratureConfig::default()).unwrap();
    let dev = p.ratio_w.iter().map(|v| (v - 0.1).abs()).fold(0.0, f64::max);
    ok &= dev <= 1e-3;
    parts.push(format!("perturbed: max |ratio_W-0.1| {dev:.1e}"));

    let r = run_analysis(&AnalysisConfig::catalog("affine(a=1,b=1/3)").unwrap()).unwrap();
    let ratio_i = &r.defect.as_ref().unwrap().ratio_i;
    let dev = ratio_i.iter().map(|v| (v - 0.1888).abs()).fold(0.0, f64::max);
    let verdict = r.extremality.as_ref().unwrap().verdict;
    ok &= dev <= 1e-3 && verdict == Verdict::Inconsistent;
    parts.push(format!("affine: max |ratio_I-0.1888| {dev:.1e}, verdict {verdict:?}"));
    check(ok, parts.join("; "))
}

fn estimate_g() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let radii = log_spaced(1e-3, 1.0, 8).unwrap();
    let cfg = QuadratureConfig::default();
    let mut worst = f64::MIN;
    for n in 0..100 {
        let k = 0.05 + 0.85 * n as f64 / 100.0;
        let field = random_field(&mut rng, k);
        for d in distortion_deficit(&field, distortion_from_k(k), &radii, &cfg).unwrap() {
            worst = worst.max(d.g - d.bound);
        }
    }
    check(worst <= 1e-9, format!("max of g(r) - (K - c1 <Re eps>) over 100 fields x 8 circles = {worst:.3e}"))
}

fn density() -> Outcome {
    let d0 = 0.05;
    // delta = 2 d0 on [2^{-2k-1}, 2^{-2k}], zero elsewhere, sampled off the block edges.
    let block = |r: f64| {
        let j = (-r.log2()).floor() as i64;
        if j % 2 == 0 {
            2.0 * d0
        } else {
            0.0
        }
    };
    let samples: Vec<(f64, f64)> =
        log_spaced(2f64.powi(-26), 1.0, 4000).unwrap().into_iter().map(|r| (r, block(r))).collect();
    let gammas: Vec<f64> = (1..=10).map(|k| 2f64.powi(-2 * k - 1)).collect();
    // |E ∩ [0, 2^{-2k-1}]| = sum_{j > k} 2^{-2j-1} = 2^{-2k-1} / 3.
    let exact = gammas
        .iter()
        .map(|&g| {
            let k = ((-g.log2() - 1.0) / 2.0).round() as i32;
            let m: f64 = (k + 1..200).map(|j| 2f64.powi(-2 * j - 1)).sum();
            m / g
        })
        .fold(f64::INFINITY, f64::min);
    let est = superlevel_lower_density(&samples, d0, &gammas).unwrap();
    let zero: Vec<(f64, f64)> = samples.iter().map(|&(r, _)| (r, 0.0)).collect();
    let flat: Vec<(f64, f64)> = samples.iter().map(|&(r, _)| (r, 3.0 * d0)).collect();
    let z = superlevel_lower_density(&zero, d0, &gammas).unwrap();
    let f = superlevel_lower_density(&flat, d0, &gammas).unwrap();
    check(
        (est - exact).abs() <= 5e-2 && z == 0.0 && f == 1.0,
        format!("dyadic estimate {est:.4} vs exact {exact:.4}; zero -> {z}; constant -> {f}"),
    )
}

fn elliptic_bridge() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut worst = 0.0_f64;
    for m in [SymMatrix::IDENTITY, SymMatrix::diag(0.5, 2.0), SymMatrix::new(1.25, -0.75, 1.25)] {
        let mu = mu_from_matrix(&m);
        for (p, q) in [(1.0, 0.0), (0.0, 1.0)] {
            worst = worst.max((mu - constructed_mu(&m, p, q)).norm());
        }
    }
    ok &= worst <= 1e-12;
    parts.push(format!("mu vs constructed solutions: {worst:.1e}"));

    let domain = DomainSpec::origin_log(0.01, 1.0, 8).unwrap();
    let cfg = QuadratureConfig::default();
    let mut ordered = true;
    for a in [0.2, 0.5, 0.8, 1.0, 1.25, 2.0, 4.0] {
        let big_k = f64::max(a, 1.0 / a);
        let v = validate_matrix_field(MatrixField::constant(SymMatrix::diag(a, 1.0 / a), big_k), big_k).unwrap();
        let b = comparison_bounds(&v, &domain, &cfg).unwrap();
        ordered &= b.ps <= b.ric_div + 1e-9 && b.ric_div <= b.new_bound + 1e-9;
    }
    ok &= ordered;
    parts.push(format!("ps <= ric-div <= new on 7 diagonal fields: {ordered}"));

    let cfg = AnalysisConfig::for_subject(Subject::ConstantMatrix {
        matrix: [0.5, 0.0, 2.0],
        big_k: 2.0,
    });
    let e = run_analysis(&cfg).unwrap().elliptic.unwrap();
    let dev = [(e.ps, 0.5), (e.ric_div, 0.8), (e.new_bound, 0.8)]
        .iter()
        .map(|(g, w)| (g - w).abs())
        .fold(0.0, f64::max);
    ok &= dev <= 1e-9;
    parts.push(format!("diag(1/2,2) -> {{{:.9}, {:.9}, {:.9}}}", e.ps, e.ric_div, e.new_bound));
    check(ok, parts.join("; "))
}

fn determinism() -> Outcome {
    let cfg = AnalysisConfig::catalog("power_spiral(alpha=0.5,gamma=1)").unwrap();
    let a = report_json(&run_analysis(&cfg).unwrap());
    let b = report_json(&run_analysis(&cfg).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_qcreg");
    let mut files = Vec::new();
    for (n, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("r{n}.json"));
        let status = std::process::Command::new(bin)
            .args(["analyze", "--subject", "affine(a=1,b=1/3)", "--json"])
            .arg(&out)
            .env("QCREG_THREADS", threads)
            .stderr(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
        files.push(std::fs::read(&out).unwrap());
    }
    check(
        a == b && files[0] == files[1],
        format!(
            "library runs identical: {} ({} bytes); CLI runs with 1 and 3 workers identical: {}",
            a == b,
            a.len(),
            files[0] == files[1]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("length formula vs direct length", length_formula),
        ("area cross-oracle", area_cross_oracle),
        ("classic exponent recovery", classic_exponent),
        ("rotation example", rotation_example),
        ("improvement over the distortion-only bound", improvement_over_distortion_bound),
        ("isoperimetric sanity", isoperimetric_sanity),
        ("Mori chain", mori_chain),
        ("extremizer diagnostics", extremizer_diagnostics),
        ("sharpened distortion estimate", estimate_g),
        ("super-level density", density),
        ("elliptic bridge", elliptic_bridge),
        ("determinism", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} [{secs:.1}s]", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail} [{secs:.1}s]", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
