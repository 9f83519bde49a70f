//! CSV and JSON emission.
//!
//! CSV numbers use six significant digits in the style of C's `%g`; JSON
//! keeps full precision. Lines end in LF.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiments::{ParamValue, SummaryTable, TraceSet};

#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
pub struct ReportError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// `%g` with six significant digits.
pub fn format_g6(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cell_text(v: &ParamValue) -> String {
    match v {
        ParamValue::Num(x) => format_g6(*x),
        ParamValue::Text(s) => s.clone(),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), ReportError> {
    fs::write(path, contents).map_err(|source| ReportError {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> Result<(), ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes a header and rows of preformatted fields.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), ReportError> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write(path, &out)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), ReportError> {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    write(path, &s)
}

pub fn summary_csv(table: &SummaryTable) -> String {
    let mut out = String::new();
    for p in &table.params {
        out.push_str(p);
        out.push(',');
    }
    out.push_str("mean,sd,stderr,n\n");
    for row in &table.rows {
        for c in &row.cell {
            out.push_str(&cell_text(c));
            out.push(',');
        }
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_g6(row.mean),
            format_g6(row.sd),
            format_g6(row.stderr),
            row.n
        );
    }
    out
}

/// Writes `<experiment>_<seed>.csv` and/or `.json` into `out_dir`.
pub fn emit_summary(table: &SummaryTable, formats: &[Format], out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    ensure_dir(out_dir)?;
    let stem = format!("{}_{}", table.experiment, table.master_seed);
    let mut paths = Vec::new();
    for f in formats {
        let path = match f {
            Format::Csv => {
                let p = out_dir.join(format!("{stem}.csv"));
                write(&p, &summary_csv(table))?;
                p
            }
            Format::Json => {
                let p = out_dir.join(format!("{stem}.json"));
                write_json(&p, table)?;
                p
            }
        };
        paths.push(path);
    }
    Ok(paths)
}

const TRACE_README: &str = "\
Trace files (*.csv other than the summary tables) are in long format:

  step    iteration, wave, or histogram bin center, depending on the file
  series  name of the curve the row belongs to
  value   the curve's value at that step

Summary tables (<experiment>_<seed>.csv) have one row per grid cell:

  leading columns  the cell's parameters
  mean, sd         mean and sample standard deviation over replicates
  stderr           sd / sqrt(n)
  n                number of replicates

Files written in this directory:
";

/// Writes `<name>.csv` for each trace set plus a `README.txt` sidecar that
/// documents the columns and each file.
pub fn emit_traces(traces: &[TraceSet], out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    ensure_dir(out_dir)?;
    let mut paths = Vec::with_capacity(traces.len() + 1);
    for t in traces {
        let mut out = String::from("step,series,value\n");
        for (step, series, value) in &t.rows {
            let _ = writeln!(out, "{},{},{}", format_g6(*step), series, format_g6(*value));
        }
        let p = out_dir.join(format!("{}.csv", t.name));
        write(&p, &out)?;
        paths.push(p);
    }

    let readme = out_dir.join("README.txt");
    let mut entries: Vec<(String, String)> = match fs::read_to_string(&readme) {
        Ok(old) => parse_readme_entries(&old),
        Err(_) => Vec::new(),
    };
    for t in traces {
        let file = format!("{}.csv", t.name);
        entries.retain(|(f, _)| *f != file);
        entries.push((file, t.description.clone()));
    }
    entries.sort();
    let mut text = TRACE_README.to_string();
    for (file, desc) in &entries {
        let _ = writeln!(text, "\n  {file}\n    {desc}");
    }
    write(&readme, &text)?;
    paths.push(readme);
    Ok(paths)
}

fn parse_readme_entries(text: &str) -> Vec<(String, String)> {
    let Some((_, listing)) = text.split_once("Files written in this directory:\n") else {
        return Vec::new();
    };
    let lines: Vec<&str> = listing.lines().filter(|l| !l.trim().is_empty()).collect();
    lines
        .chunks(2)
        .filter_map(|c| match c {
            [f, d] => Some((f.trim().to_string(), d.trim().to_string())),
            _ => None,
        })
        .collect()
}
