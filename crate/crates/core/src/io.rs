//! On-disk formats.
//!
//! - Reports: pretty-printed JSON with a trailing newline. Every report
//!   carries `"schema_version": 1`.
//! - Fields: a JSON header (`<stem>.json`) describing the grid plus node
//!   values in index order (axis 0 fastest), either as a one-column CSV
//!   (`<stem>.csv`, header `u`) or as raw little-endian `f64`
//!   (`<stem>.f64`).
//! - Plot series: two-column whitespace-separated text (`.dat`) with a
//!   `#` comment line naming the columns.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solver::{GridDomain, ScalarField};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Encoding of field values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldFormat {
    #[default]
    Csv,
    /// Raw little-endian `f64`.
    F64,
}

impl FieldFormat {
    fn extension(self) -> &'static str {
        match self {
            FieldFormat::Csv => "csv",
            FieldFormat::F64 => "f64",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub schema_version: u32,
    pub n: usize,
    pub m: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub h: f64,
    pub format: FieldFormat,
    /// Values file, relative to the header.
    pub values: String,
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    s.push('\n');
    fs::write(path, s).map_err(io_err(path))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let s = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&s).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Write `<dir>/<stem>.json` and the values file; returns both file names.
pub fn write_field(dir: &Path, stem: &str, f: &ScalarField, format: FieldFormat) -> Result<Vec<String>, IoError> {
    let values_name = format!("{stem}.{}", format.extension());
    let values_path = dir.join(&values_name);
    match format {
        FieldFormat::Csv => {
            let file = fs::File::create(&values_path).map_err(io_err(&values_path))?;
            let mut w = BufWriter::new(file);
            writeln!(w, "u").map_err(io_err(&values_path))?;
            for v in &f.values {
                writeln!(w, "{v:e}").map_err(io_err(&values_path))?;
            }
            w.flush().map_err(io_err(&values_path))?;
        }
        FieldFormat::F64 => {
            let bytes: Vec<u8> = f.values.iter().flat_map(|v| v.to_le_bytes()).collect();
            fs::write(&values_path, bytes).map_err(io_err(&values_path))?;
        }
    }
    let d = &f.domain;
    let header = FieldHeader {
        schema_version: crate::SCHEMA_VERSION,
        n: d.n,
        m: d.m,
        lo: d.lo.clone(),
        hi: d.hi.clone(),
        h: d.h,
        format,
        values: values_name.clone(),
    };
    let header_name = format!("{stem}.json");
    write_json(&dir.join(&header_name), &header)?;
    Ok(vec![header_name, values_name])
}

/// Read a field from its JSON header.
pub fn read_field(header_path: &Path) -> Result<ScalarField, IoError> {
    let header: FieldHeader = read_json(header_path)?;
    let bad = |msg: String| IoError::Format {
        path: header_path.to_path_buf(),
        msg,
    };
    if header.schema_version != crate::SCHEMA_VERSION {
        return Err(bad(format!("unsupported schema_version {}", header.schema_version)));
    }
    let dom = GridDomain::new(header.lo.clone(), header.hi.clone(), header.m).map_err(|e| bad(e.to_string()))?;
    let values_path = header_path.parent().unwrap_or(Path::new(".")).join(&header.values);
    let values: Vec<f64> = match header.format {
        FieldFormat::Csv => {
            let mut rdr = csv::Reader::from_path(&values_path).map_err(|source| IoError::Csv {
                path: values_path.clone(),
                source,
            })?;
            let mut out = Vec::with_capacity(dom.len());
            for rec in rdr.deserialize::<f64>() {
                out.push(rec.map_err(|source| IoError::Csv {
                    path: values_path.clone(),
                    source,
                })?);
            }
            out
        }
        FieldFormat::F64 => {
            let bytes = fs::read(&values_path).map_err(io_err(&values_path))?;
            if bytes.len() % 8 != 0 {
                return Err(bad(format!("{} is not a whole number of f64 values", header.values)));
            }
            bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect()
        }
    };
    ScalarField::new(dom, values).map_err(|e| bad(e.to_string()))
}

/// Two-column plot series.
pub fn write_dat(path: &Path, columns: (&str, &str), rows: &[(f64, f64)]) -> Result<(), IoError> {
    let mut s = format!("# {} {}\n", columns.0, columns.1);
    for (x, y) in rows {
        s.push_str(&format!("{x:e} {y:e}\n"));
    }
    fs::write(path, s).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let dom = GridDomain::cube(2, -1.0, 1.0, 6).unwrap();
        let f = ScalarField::from_fn(&dom, |x| x[0].sin() * x[1] + 1e-300);
        for format in [FieldFormat::Csv, FieldFormat::F64] {
            let names = write_field(dir.path(), "u", &f, format).unwrap();
            assert_eq!(names[0], "u.json");
            let g = read_field(&dir.path().join("u.json")).unwrap();
            assert_eq!(g, f);
        }
    }

    #[test]
    fn truncated_values_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let dom = GridDomain::cube(2, 0.0, 1.0, 5).unwrap();
        write_field(dir.path(), "u", &ScalarField::zeros(&dom), FieldFormat::F64).unwrap();
        fs::write(dir.path().join("u.f64"), [0u8; 12]).unwrap();
        assert!(read_field(&dir.path().join("u.json")).is_err());
        assert!(read_field(&dir.path().join("missing.json")).is_err());
    }

    #[test]
    fn dat_format() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.dat");
        write_dat(&p, ("R", "osc"), &[(1.0, 0.5), (2.0, 0.25)]).unwrap();
        assert_eq!(fs::read_to_string(p).unwrap(), "# R osc\n1e0 5e-1\n2e0 2.5e-1\n");
    }
}
