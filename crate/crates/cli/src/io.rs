//! Plain-text file formats.
//!
//! * features: one sample per line, comma-separated floats, no header.
//! * labels: one 0-based cluster id per line.
//! * annotations: `i j t` per line, 0-based indices, `t = 1` must-link and
//!   `t = -1` cannot-link; repeated lines add multiplicity.
//! * params: K lines of D comma-separated means, then one line of K variances.
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing a
//! written file gives back the exact same values.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ssclust::{AnnotationGraphs, Dataset, LinkKind};

use crate::error::{CliError, CliResult};

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(e)
    })
}

/// `PREFIX.suffix`, keeping any dots already in the prefix.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_float_row(path: &Path, line_no: usize, line: &str) -> CliResult<Vec<f64>> {
    line.split(',')
        .map(|field| {
            let field = field.trim();
            field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::parse(path, line_no, format!("expected a finite number, found {field:?}")))
        })
        .collect()
}

fn float_rows(path: &Path, text: &str) -> CliResult<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line_no, line) in content_lines(text) {
        let row = parse_float_row(path, line_no, line)?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CliError::parse(
                    path,
                    line_no,
                    format!("expected {} values, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_features(path: &Path) -> CliResult<Dataset> {
    let rows = float_rows(path, &read_text(path)?)?;
    if rows.is_empty() {
        return Err(CliError::Input(format!("{}: no samples", path.display())));
    }
    Ok(Dataset::from_rows(&rows)?)
}

pub fn format_features(dataset: &Dataset) -> String {
    let mut out = String::new();
    for row in dataset.rows() {
        push_float_row(&mut out, row);
    }
    out
}

fn push_float_row(out: &mut String, row: &[f64]) {
    for (f, v) in row.iter().enumerate() {
        if f > 0 {
            out.push(',');
        }
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

pub fn read_labels(path: &Path) -> CliResult<Vec<usize>> {
    content_lines(&read_text(path)?)
        .map(|(line_no, line)| {
            line.parse::<usize>().map_err(|_| {
                CliError::parse(
                    path,
                    line_no,
                    format!("expected a non-negative integer, found {line:?}"),
                )
            })
        })
        .collect()
}

pub fn format_labels(labels: &[usize]) -> String {
    let mut out = String::with_capacity(labels.len() * 3);
    for l in labels {
        writeln!(out, "{l}").unwrap();
    }
    out
}

pub fn read_annotations(path: &Path, n_samples: usize) -> CliResult<AnnotationGraphs> {
    let text = read_text(path)?;
    let mut annotations = Vec::new();
    for (line_no, line) in content_lines(&text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: String| CliError::parse(path, line_no, msg);
        if fields.len() != 3 {
            return Err(bad(format!("expected `i j t`, found {line:?}")));
        }
        let index = |s: &str| {
            s.parse::<usize>()
                .ok()
                .filter(|&i| i < n_samples)
                .ok_or_else(|| bad(format!("sample index {s:?} is not in 0..{n_samples}")))
        };
        let (i, j) = (index(fields[0])?, index(fields[1])?);
        if i == j {
            return Err(bad(format!("self-annotation on sample {i}")));
        }
        let kind = match fields[2] {
            "1" | "+1" => LinkKind::MustLink,
            "-1" => LinkKind::CannotLink,
            t => return Err(bad(format!("annotation type must be 1 or -1, found {t:?}"))),
        };
        annotations.push((i, j, kind));
    }
    Ok(AnnotationGraphs::from_annotations(n_samples, annotations)?)
}

pub fn format_annotations(graphs: &AnnotationGraphs) -> String {
    let mut out = String::new();
    for (i, j, kind) in graphs.annotations() {
        let t = match kind {
            LinkKind::MustLink => 1,
            LinkKind::CannotLink => -1,
        };
        writeln!(out, "{i} {j} {t}").unwrap();
    }
    out
}

/// Spherical mixture parameters: K×D means and K variances.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub n_features: usize,
}

pub fn read_params(path: &Path) -> CliResult<Params> {
    let rows = {
        let text = read_text(path)?;
        let mut rows = Vec::new();
        for (line_no, line) in content_lines(&text) {
            rows.push((line_no, parse_float_row(path, line_no, line)?));
        }
        rows
    };
    let Some(((var_line, variances), mean_rows)) = rows.split_last() else {
        return Err(CliError::Input(format!("{}: empty parameter file", path.display())));
    };
    let k = variances.len();
    if mean_rows.len() != k {
        return Err(CliError::parse(
            path,
            *var_line,
            format!("{} mean rows but {k} variances", mean_rows.len()),
        ));
    }
    let n_features = mean_rows[0].1.len();
    let mut means = Vec::with_capacity(k * n_features);
    for (line_no, row) in mean_rows {
        if row.len() != n_features {
            return Err(CliError::parse(
                path,
                *line_no,
                format!("expected {n_features} means, found {}", row.len()),
            ));
        }
        means.extend_from_slice(row);
    }
    if let Some(v) = variances.iter().find(|&&v| v <= 0.0) {
        return Err(CliError::parse(
            path,
            *var_line,
            format!("variance {v} is not positive"),
        ));
    }
    Ok(Params {
        means,
        variances: variances.clone(),
        n_features,
    })
}

pub fn format_params(params: &Params) -> String {
    let mut out = String::new();
    for row in params.means.chunks_exact(params.n_features) {
        push_float_row(&mut out, row);
    }
    push_float_row(&mut out, &params.variances);
    out
}
