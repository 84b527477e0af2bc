//! CSV and JSON emitters.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::record::emit;

/// Writes a CSV with a header row. Rows holding a non-finite value are
/// dropped with a warning.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> CliResult<usize> {
    let io = |e: csv::Error| CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    let mut written = 0;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        if row.iter().any(|x| !x.is_finite()) {
            log::warn!(
                "{}: dropping row with a non-finite value: {row:?}",
                path.display()
            );
            continue;
        }
        w.write_record(row.iter().map(|x| x.to_string()))
            .map_err(io)?;
        written += 1;
    }
    w.flush().map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(written)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = emit(value)?;
    fs::write(path, text).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

/// Compact rendering of a parameter for file names: `1.4` becomes `1.4`,
/// infinity becomes `inf`.
pub fn tag(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

pub fn named(dir: &Path, stem: &str, s: f64, p: Option<f64>, ext: &str) -> PathBuf {
    match p {
        Some(p) => dir.join(format!("{stem}_s{}_p{}.{ext}", tag(s), tag(p))),
        None => dir.join(format!("{stem}_s{}.{ext}", tag(s))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_finite_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let n = write_csv(
            &path,
            &["x", "y"],
            &[
                vec![1.0, 2.5],
                vec![f64::NAN, 1.0],
                vec![3.0, f64::NEG_INFINITY],
                vec![0.125, -1.0],
            ],
        )
        .unwrap();
        assert_eq!(n, 2);
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "x,y\n1,2.5\n0.125,-1\n");
    }

    #[test]
    fn file_names() {
        let d = Path::new("out");
        assert_eq!(
            named(d, "F", 1.4, Some(6.0), "csv"),
            Path::new("out/F_s1.4_p6.csv")
        );
        assert_eq!(
            named(d, "eta", 1.0, None, "json"),
            Path::new("out/eta_s1.json")
        );
        assert_eq!(tag(f64::INFINITY), "inf");
    }
}
