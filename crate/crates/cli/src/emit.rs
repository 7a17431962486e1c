//! Report emission: a single JSON document or a bundle of CSV files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qcreg_core::bounds::REPORT_CSV_HEADER;
use qcreg_core::extremal::write_holder_csv;

use crate::config::{OutputConfig, OutputFormat};
use crate::error::{CliError, Result};
use crate::report::RunReport;

fn out_err(path: &Path) -> impl FnOnce(std::fmt::Arguments<'_>) -> CliError + '_ {
    move |args| CliError::Output {
        path: path.display().to_string(),
        message: args.to_string(),
    }
}

/// Pretty JSON with a trailing newline. Field order is fixed by the types.
pub fn report_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_json(report: &RunReport, path: &Path) -> Result<()> {
    fs::write(path, report_json(report)).map_err(|e| out_err(path)(format_args!("{e}")))
}

pub fn load_report(path: &Path) -> Result<RunReport> {
    let text = fs::read_to_string(path).map_err(|e| out_err(path)(format_args!("{e}")))?;
    serde_json::from_str(&text).map_err(|e| out_err(path)(format_args!("{e}")))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| out_err(path)(format_args!("{e}")))
}

fn core_write(path: &Path, r: qcreg_core::Result<()>) -> Result<()> {
    r.map_err(|e| out_err(path)(format_args!("{e}")))
}

/// Writes one CSV per section present in the report and returns their paths.
///
/// Files: regularity.csv, geometry.csv, epsilon.csv, defect.csv, density.csv,
/// holder.csv.
pub fn write_csv_bundle(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| out_err(dir)(format_args!("{e}")))?;
    let mut written = Vec::new();

    let path = dir.join("regularity.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    let res = (|| -> csv::Result<()> {
        w.write_record(REPORT_CSV_HEADER)?;
        w.write_record(report.regularity.csv_row())?;
        w.flush()?;
        Ok(())
    })();
    res.map_err(|e| out_err(&path)(format_args!("{e}")))?;
    written.push(path);

    if let Some(g) = &report.geometry {
        let path = dir.join("geometry.csv");
        core_write(&path, g.write_csv(create(&path)?))?;
        written.push(path);
    }
    if let Some(e) = &report.epsilon {
        let path = dir.join("epsilon.csv");
        core_write(&path, e.write_csv(create(&path)?))?;
        written.push(path);
    }
    if let Some(d) = &report.defect {
        let path = dir.join("defect.csv");
        core_write(&path, d.write_csv(create(&path)?))?;
        written.push(path);

        let path = dir.join("density.csv");
        let mut f = create(&path)?;
        let mut text = String::from("delta0,lower_density\n");
        for e in &d.density {
            text += &format!("{},{}\n", e.delta0, e.lower_density);
        }
        f.write_all(text.as_bytes())
            .and_then(|_| f.flush())
            .map_err(|e| out_err(&path)(format_args!("{e}")))?;
        written.push(path);
    }
    if let Some(h) = &report.holder {
        let path = dir.join("holder.csv");
        core_write(&path, write_holder_csv(h, create(&path)?))?;
        written.push(path);
    }
    Ok(written)
}

/// Writes whatever the output config asks for; returns the paths written.
pub fn emit_report(report: &RunReport, output: &OutputConfig) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if let Some(p) = &output.json {
        write_json(report, p)?;
        written.push(p.clone());
    }
    if let Some(d) = &output.csv_dir {
        written.extend(write_csv_bundle(report, d)?);
    }
    Ok(written)
}

/// Emits in a single format to `target` (a file for JSON, a directory for CSV).
pub fn emit_as(report: &RunReport, format: OutputFormat, target: &Path) -> Result<Vec<PathBuf>> {
    match format {
        OutputFormat::Json => write_json(report, target).map(|_| vec![target.to_path_buf()]),
        OutputFormat::CsvBundle => write_csv_bundle(report, target),
    }
}
