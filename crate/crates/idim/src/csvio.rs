//! CSV dialect: comma separated, header row required, UTF-8, `.` decimal
//! separator. Floats are written with 17 significant digits so that
//! reading a written file reproduces every value bit for bit.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use idim_core::Dataset;

use crate::error::{Error, Result};

/// Name of the optional integer column holding per-row labels.
pub const LABEL_COLUMN: &str = "label";

/// Full-precision float formatting; non-finite values become `NaN`.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "NaN".to_string()
    }
}

/// Reads a dataset named after the file stem.
pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    parse_dataset(&name, file, path)
}

/// Parses CSV text; `path` is used in error messages only.
pub fn parse_dataset(name: &str, reader: impl Read, path: &Path) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::Format {
            path: path.into(),
            message: "missing header row".into(),
        });
    }
    let label_col = header.iter().position(|h| h == LABEL_COLUMN);
    let n_var = header.len() - usize::from(label_col.is_some());
    if n_var == 0 {
        return Err(Error::Format {
            path: path.into(),
            message: "no numeric columns".into(),
        });
    }
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        for (j, cell) in rec.iter().enumerate() {
            let bad = |message: String| Error::Parse {
                path: path.into(),
                line,
                column: header[j].clone(),
                message,
            };
            if Some(j) == label_col {
                labels.push(
                    cell.parse::<i64>()
                        .map_err(|_| bad(format!("label '{cell}' is not an integer")))?,
                );
            } else {
                let v = cell
                    .parse::<f64>()
                    .map_err(|_| bad(format!("'{cell}' is not a number")))?;
                if !v.is_finite() {
                    return Err(bad(format!("'{cell}' is not finite")));
                }
                values.push(v);
            }
        }
    }
    let n_obj = values.len() / n_var;
    if n_obj == 0 {
        return Err(Error::Format {
            path: path.into(),
            message: "no data rows".into(),
        });
    }
    let data = Dataset::new(name, n_obj, n_var, values)?;
    Ok(match label_col {
        Some(_) => data.with_labels(labels)?,
        None => data,
    })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => Error::Format {
            path: path.into(),
            message: format!("line {line}: expected {expected_len} fields, found {len}"),
        },
        kind => Error::Format {
            path: path.into(),
            message: format!("line {line}: {kind:?}"),
        },
    }
}

/// Writes `data` with header `x1..xD` (plus `label` when present).
pub fn write_dataset(path: &Path, data: &Dataset) -> Result<()> {
    write_atomic(path, |w| write_dataset_to(w, data))
}

pub fn write_dataset_to(w: &mut dyn Write, data: &Dataset) -> std::io::Result<()> {
    let mut header: Vec<String> = (1..=data.n_var()).map(|j| format!("x{j}")).collect();
    if data.labels().is_some() {
        header.push(LABEL_COLUMN.into());
    }
    let mut rows = Vec::with_capacity(data.n_obj());
    for (i, row) in data.rows().enumerate() {
        let mut cells: Vec<String> = row.iter().map(|&v| format_f64(v)).collect();
        if let Some(l) = data.labels() {
            cells.push(l[i].to_string());
        }
        rows.push(cells);
    }
    write_table_to(w, &header, &rows)
}

/// Writes a header and rows of already formatted cells.
pub fn write_table_to(
    w: &mut dyn Write,
    header: &[String],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header)?;
    for r in rows {
        wtr.write_record(r)?;
    }
    wtr.flush()
}

pub fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    write_atomic(path, |w| write_table_to(w, header, rows))
}

/// Writes through a temporary file in the target directory, then renames
/// it over `path`, so a failure never leaves a partial file behind.
pub fn write_atomic(
    path: &Path,
    f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    // Temporary files are created owner-only; outputs get the usual mode.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))
            .map_err(|e| Error::io(path, e))?;
    }
    {
        let mut w = BufWriter::new(tmp.as_file());
        f(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
