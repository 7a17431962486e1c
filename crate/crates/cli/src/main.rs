use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use qcreg_cli::config::documented_defaults;
use qcreg_cli::{
    emit_report, init_threads, load_config, report_json, run_analysis, AnalysisConfig, CliError, RunReport, Subject,
    EXIT_INVARIANT, EXIT_OK, EXIT_USAGE,
};
use qcreg_core::catalog::{default_entries, CATALOG_NAMES};

#[derive(Parser)]
#[command(
    name = "qcreg",
    version,
    about = "Hölder exponent bounds and extremizer diagnostics for quasiconformal maps and elliptic coefficient fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Constants A and C, exponent bounds and every enabled diagnostic.
    Analyze(RunArgs),
    /// Length, area, phi and isoperimetric-defect profile on origin circles.
    Profile(RunArgs),
    /// Epsilon and defect log-integrals, densities, empirical exponents, verdict.
    Extremal(RunArgs),
    /// Comparison bounds for a coefficient matrix field.
    Elliptic(RunArgs),
    /// List the catalog maps and their parameters.
    Catalog {
        /// Print the listing as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file. Flags below override its keys.
    config: Option<PathBuf>,
    /// Catalog map spec, e.g. "radial_stretch(K=2)" (subject).
    #[arg(long)]
    subject: Option<String>,
    /// Initial node count per circle (quadrature.nodes).
    #[arg(long)]
    nodes: Option<usize>,
    /// Node doublings allowed (quadrature.max_doublings).
    #[arg(long)]
    max_doublings: Option<u32>,
    /// Convergence tolerance between doublings (quadrature.rel_tol).
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Radial Simpson segments for Jacobian areas (radial.segments).
    #[arg(long)]
    radial_segments: Option<usize>,
    /// Smallest profile radius (radii.min).
    #[arg(long)]
    radii_min: Option<f64>,
    /// Largest profile radius (radii.max).
    #[arg(long)]
    radii_max: Option<f64>,
    /// Number of profile radii (radii.count).
    #[arg(long)]
    radii_count: Option<usize>,
    /// Smallest circle radius in the suprema (domain.radii.min).
    #[arg(long)]
    domain_min: Option<f64>,
    /// Largest circle radius in the suprema (domain.radii.max).
    #[arg(long)]
    domain_max: Option<f64>,
    /// Number of circle radii in the suprema (domain.radii.count).
    #[arg(long)]
    domain_count: Option<usize>,
    /// Refine radii around the argmax once (domain.refine).
    #[arg(long)]
    refine: bool,
    /// Distance kept from the outer boundary (domain.margin).
    #[arg(long)]
    margin: Option<f64>,
    /// Write the JSON report here (output.json).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the CSV bundle into this directory (output.csv_dir).
    #[arg(long)]
    csv_dir: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<AnalysisConfig, CliError> {
        let mut cfg = match (&self.config, &self.subject) {
            (Some(path), _) => load_config(path)?,
            (None, Some(spec)) => AnalysisConfig::catalog(spec)?,
            (None, None) => return Err(CliError::Config("give a config file or --subject".into())),
        };
        if let (Some(_), Some(spec)) = (&self.config, &self.subject) {
            cfg.subject = AnalysisConfig::catalog(spec)?.subject;
        }
        let q = &mut cfg.quadrature;
        set(&mut q.nodes, self.nodes);
        set(&mut q.max_doublings, self.max_doublings);
        set(&mut q.rel_tol, self.rel_tol);
        set(&mut cfg.radial.segments, self.radial_segments);
        set(&mut cfg.radii.min, self.radii_min);
        set(&mut cfg.radii.max, self.radii_max);
        set(&mut cfg.radii.count, self.radii_count);
        let d = &mut cfg.domain;
        set(&mut d.radii.min, self.domain_min);
        set(&mut d.radii.max, self.domain_max);
        set(&mut d.radii.count, self.domain_count);
        set(&mut d.margin, self.margin);
        d.refine |= self.refine;
        if self.json.is_some() {
            cfg.output.json = self.json.clone();
        }
        if self.csv_dir.is_some() {
            cfg.output.csv_dir = self.csv_dir.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn summarize(report: &RunReport) {
    let r = &report.regularity;
    eprintln!("subject        {}", report.subject);
    eprintln!("K              {}", r.distortion);
    eprintln!("C              {}", r.c);
    eprintln!("A              {}", r.a);
    eprintln!("alpha_new      {}", r.alpha_new);
    eprintln!("alpha_ricciardi {}", r.alpha_ricciardi);
    eprintln!("alpha_mori     {}", r.alpha_mori);
    if let Some(g) = &r.gronwall {
        eprintln!("gronwall       {} (gap {})", if g.pass { "pass" } else { "fail" }, g.equality_gap);
    }
    if let Some(x) = &report.extremality {
        eprintln!("verdict        {:?}", x.verdict);
    }
    if let Some(e) = &report.elliptic {
        eprintln!("ps / ric_div / new  {} / {} / {}", e.ps, e.ric_div, e.new_bound);
    }
}

fn run(args: &RunArgs, tweak: impl FnOnce(&mut AnalysisConfig) -> Result<(), CliError>) -> Result<i32, CliError> {
    let mut cfg = args.config()?;
    tweak(&mut cfg)?;
    init_threads()?;
    let report = run_analysis(&cfg)?;
    if cfg.output.is_empty() {
        print!("{}", report_json(&report));
    } else {
        for p in emit_report(&report, &cfg.output)? {
            eprintln!("wrote {}", p.display());
        }
    }
    summarize(&report);
    if report.violations.is_empty() {
        Ok(EXIT_OK)
    } else {
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        Ok(EXIT_INVARIANT)
    }
}

fn catalog(json: bool) -> i32 {
    let keys = |name: &str| match name {
        "identity" => "",
        "radial_stretch" => "K >= 1",
        "spiral" => "gamma",
        "affine" => "a_re, a_im, b_re, b_im (|b| < |a|)",
        _ => "alpha > 0, gamma",
    };
    let entries = default_entries();
    if json {
        let list: Vec<_> = entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "name": e.name,
                    "parameters": keys(&e.name),
                    "example": e.spec(),
                    "K": e.distortion(),
                    "exact_exponent": e.exact_exponent,
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&list).expect("listing serializes"));
    } else {
        println!("{:<16}{:<36}{:<40}{:>10}{:>10}", "name", "parameters", "example", "K", "exponent");
        for e in &entries {
            println!(
                "{:<16}{:<36}{:<40}{:>10.4}{:>10.4}",
                e.name,
                keys(&e.name),
                e.spec(),
                e.distortion(),
                e.exact_exponent.unwrap_or(f64::NAN)
            );
        }
        debug_assert_eq!(entries.len(), CATALOG_NAMES.len());
    }
    EXIT_OK
}

fn command() -> clap::Command {
    let defaults = format!(
        "Defaults (config keys):\n{}",
        serde_json::to_string_pretty(&documented_defaults()).expect("defaults serialize")
    );
    let mut cmd = Cli::command();
    for name in ["analyze", "profile", "extremal", "elliptic"] {
        let text = defaults.clone();
        cmd = cmd.mut_subcommand(name, move |c| c.after_long_help(text));
    }
    cmd
}

fn main() -> ExitCode {
    let parsed = command()
        .try_get_matches()
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return ExitCode::from(code as u8);
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => run(a, |_| Ok(())),
        Command::Profile(a) => run(a, |c| {
            let d = &mut c.diagnostics;
            (d.geometry, d.extremal, d.holder, d.mori, d.elliptic) = (true, false, false, false, false);
            Ok(())
        }),
        Command::Extremal(a) => run(a, |c| {
            let d = &mut c.diagnostics;
            (d.extremal, d.holder, d.mori, d.elliptic) = (true, true, false, false);
            Ok(())
        }),
        Command::Elliptic(a) => run(a, |c| {
            if !matches!(c.subject, Subject::MatrixField { .. } | Subject::ConstantMatrix { .. }) {
                return Err(CliError::Config("elliptic needs a matrix_field or constant_matrix subject".into()));
            }
            let d = &mut c.diagnostics;
            (d.geometry, d.extremal, d.holder, d.mori, d.elliptic) = (false, false, false, false, true);
            Ok(())
        }),
        Command::Catalog { json } => Ok(catalog(*json)),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qcreg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
