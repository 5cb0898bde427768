//! CSV and JSON result files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::config::OutputFormat;
use super::runners::ResultRow;

pub const CSV_HEADER: &str = "experiment,model,model_params,num_qubits,architecture,n_i,num_layers,param_count,\
e_gs,e_var,epsilon_signed,epsilon,infidelity,discarded_weight,seed,wall_time,status,message";

/// Twelve significant digits; empty for a missing value.
fn num(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.11e}"),
        None => String::new(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 256);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.experiment,
            csv_field(&r.model),
            csv_field(&r.model_params),
            r.num_qubits,
            r.architecture,
            r.n_i,
            r.num_layers,
            r.param_count,
            num(r.e_gs),
            num(r.e_var),
            num(r.epsilon_signed),
            num(r.epsilon),
            num(r.infidelity),
            num(r.discarded_weight),
            r.seed,
            num(Some(r.wall_time)),
            r.status.as_str(),
            csv_field(&r.message),
        );
    }
    out
}

pub fn to_json(rows: &[ResultRow]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

pub fn render(rows: &[ResultRow], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(to_csv(rows)),
        OutputFormat::Json => to_json(rows),
    }
}

/// Write `rows` to `path`, creating parent directories as needed.
pub fn write_rows(rows: &[ResultRow], path: &Path, format: OutputFormat) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, render(rows, format)?).map_err(io)
}
