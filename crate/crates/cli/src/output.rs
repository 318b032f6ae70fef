use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use telegraph_core::io::{write_table_csv, Cell};

use crate::config::Format;
use crate::error::{CliError, CliResult};

/// A row of a sweep table, writable as CSV or JSON.
pub trait TableRow: Serialize {
    const HEADER: &'static [&'static str];

    fn cells(&self) -> Vec<Cell>;
}

/// Files of one run, all placed in one directory.
#[derive(Debug, Clone)]
pub struct Output {
    dir: PathBuf,
    format: Format,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: &Path, format: Format) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            format,
            written: Vec::new(),
        })
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn extension(&self) -> &'static str {
        match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    /// Write `stem.<ext>` through `body`.
    pub fn write_with<F>(&mut self, file_name: &str, body: F) -> CliResult<PathBuf>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let path = self.dir.join(file_name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| CliError::io(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// CSV via `csv`, or pretty JSON of `value`, depending on the format.
    pub fn write_either<T, F>(&mut self, stem: &str, value: &T, csv: F) -> CliResult<PathBuf>
    where
        T: Serialize + ?Sized,
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let name = format!("{stem}.{}", self.extension());
        match self.format {
            Format::Csv => self.write_with(&name, csv),
            Format::Json => self.write_with(&name, |w| {
                serde_json::to_writer_pretty(&mut *w, value)?;
                w.write_all(b"\n")
            }),
        }
    }

    pub fn write_table<R: TableRow>(&mut self, stem: &str, rows: &[R]) -> CliResult<PathBuf> {
        let cells: Vec<Vec<Cell>> = rows.iter().map(TableRow::cells).collect();
        self.write_either(stem, rows, |w| write_table_csv(w, R::HEADER, &cells))
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, file_name: &str, value: &T) -> CliResult<PathBuf> {
        self.write_with(file_name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n")
        })
    }
}
