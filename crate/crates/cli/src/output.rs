//! File writers. Floats carry 12 significant digits; rows end in LF.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Float rendered for use inside a file name (`10`, `0.5`).
pub fn file_label(x: f64) -> String {
    format!("{x}")
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Output { path: dir.to_path_buf(), source })
}

pub struct CsvFile {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl CsvFile {
    pub fn create(path: PathBuf, header: &[&str]) -> Result<Self, CliError> {
        let file = File::create(&path).map_err(|source| CliError::Output { path: path.clone(), source })?;
        let writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
        let mut f = Self { path, writer };
        f.row(header)?;
        Ok(f)
    }

    pub fn row<I, T>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(|source| CliError::Csv { path: self.path.clone(), source })
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.writer.flush().map_err(|source| CliError::Output { path: self.path.clone(), source })?;
        Ok(self.path)
    }
}

/// `t` plus one float column per series, one row per sample.
pub fn write_series(path: PathBuf, header: &[&str], times: &[f64], columns: &[&[f64]]) -> Result<PathBuf, CliError> {
    debug_assert_eq!(header.len(), columns.len() + 1);
    debug_assert!(columns.iter().all(|c| c.len() == times.len()));
    let mut f = CsvFile::create(path, header)?;
    for (k, t) in times.iter().enumerate() {
        f.row(std::iter::once(fmt_float(*t)).chain(columns.iter().map(|c| fmt_float(c[k]))))?;
    }
    f.finish()
}

pub fn write_json(path: PathBuf, value: &impl Serialize) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("summary types serialize");
    text.push('\n');
    std::fs::write(&path, text).map_err(|source| CliError::Output { path: path.clone(), source })?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_twelve_significant_digits() {
        assert_eq!(fmt_float(430.0), "4.30000000000e2");
        assert_eq!(fmt_float(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(fmt_opt(None), "");
        assert_eq!(file_label(10.0), "10");
        assert_eq!(file_label(0.5), "0.5");
    }

    #[test]
    fn series_file_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_series(dir.path().join("s.csv"), &["t", "a"], &[0.0, 1.0], &[&[0.25, 0.5]]).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text, "t,a\n0.00000000000e0,2.50000000000e-1\n1.00000000000e0,5.00000000000e-1\n");
    }
}
