use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use ncg_spectra::montecarlo::checkpoint::{save_checkpoint, write_atomic, CheckpointMeta};

use crate::CliError;

/// Full-precision float field: 17 significant digits, dot decimal separator.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub version: String,
    pub seeds: Vec<u64>,
    pub outputs: Vec<String>,
    pub started_unix_seconds: u64,
    pub wall_clock_seconds: f64,
}

/// Output directory of one command; records every file written so the
/// manifest can list them.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
    started: Instant,
    started_unix: u64,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", root.display())))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            written: Vec::new(),
            started: Instant::now(),
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        write_atomic(&path, bytes)?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::io(format!("cannot serialize {name}: {e}")))?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let to_io = |e: csv::Error| CliError::io(format!("cannot write {name}: {e}"));
        w.write_record(header).map_err(to_io)?;
        for r in rows {
            w.write_record(r).map_err(to_io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::io(format!("cannot write {name}: {e}")))?;
        self.write_bytes(name, &bytes)
    }

    pub fn write_checkpoint(&mut self, name: &str, values: &[f64], meta: &CheckpointMeta) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        save_checkpoint(&path, values, meta)?;
        self.written.push(name.to_string());
        self.written.push(format!("{name}.meta"));
        Ok(path)
    }

    pub fn finish<P: Serialize>(mut self, command: &str, parameters: &P, seeds: Vec<u64>) -> Result<(), CliError> {
        let mut outputs = self.written.clone();
        outputs.push("manifest.json".into());
        let manifest = RunManifest {
            command: command.into(),
            parameters: serde_json::to_value(parameters)
                .map_err(|e| CliError::io(format!("cannot record parameters: {e}")))?,
            version: env!("CARGO_PKG_VERSION").into(),
            seeds,
            outputs,
            started_unix_seconds: self.started_unix,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        self.write_json("manifest.json", &manifest)?;
        Ok(())
    }
}

/// First two numeric columns of a CSV file with a header row.
pub fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let field = |k: usize| -> Result<f64, CliError> {
            record
                .get(k)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| {
                    CliError::usage(format!(
                        "{}: row {} lacks a numeric column {}",
                        path.display(),
                        line + 2,
                        k + 1
                    ))
                })
        };
        x.push(field(0)?);
        y.push(field(1)?);
    }
    Ok((x, y))
}
