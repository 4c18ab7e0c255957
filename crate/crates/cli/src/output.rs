//! File emission: fingerprinted CSV, JSON and SVG, each written once through
//! a temporary file and an atomic rename.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

/// Round-trip exact: 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Canonical JSON of the configuration and its SHA-256.
pub fn fingerprint(cfg: &RunConfig) -> (String, String) {
    let json = serde_json::to_string(cfg).expect("configuration serializes");
    let digest = Sha256::digest(json.as_bytes());
    let hex = digest.iter().map(|b| format!("{b:02x}")).collect();
    (json, hex)
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::Io(e.to_string()))?;
    tmp.write_all(bytes).map_err(|e| CliError::Io(e.to_string()))?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

/// A CSV table whose header comments carry the command and configuration.
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self, command: &str, cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
        let (json, hash) = fingerprint(cfg);
        let mut out = format!("# dirac-warp {command}\n# config: {json}\n# sha256: {hash}\n").into_bytes();
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        out.extend(w.into_inner().map_err(|e| CliError::Io(e.to_string()))?);
        Ok(out)
    }
}

/// Writes the requested outputs and records what was written.
pub struct Emitter<'a> {
    pub cfg: &'a RunConfig,
    pub command: &'static str,
    pub written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    sha256: String,
    config: &'a RunConfig,
    result: &'a T,
}

impl<'a> Emitter<'a> {
    pub fn new(cfg: &'a RunConfig, command: &'static str) -> Self {
        Emitter {
            cfg,
            command,
            written: Vec::new(),
        }
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.cfg.out_dir.join(name);
        write_atomic(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        if self.cfg.wants(crate::config::Format::Csv) {
            let bytes = table.to_bytes(self.command, self.cfg)?;
            self.put(name, &bytes)?;
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<(), CliError> {
        if self.cfg.wants(crate::config::Format::Json) {
            let env = Envelope {
                command: self.command,
                sha256: fingerprint(self.cfg).1,
                config: self.cfg,
                result,
            };
            let mut bytes = serde_json::to_vec_pretty(&env).map_err(|e| CliError::Io(e.to_string()))?;
            bytes.push(b'\n');
            self.put(name, &bytes)?;
        }
        Ok(())
    }

    pub fn svg(&mut self, name: &str, plot: &crate::svg::Plot) -> Result<(), CliError> {
        if self.cfg.wants(crate::config::Format::Svg) {
            self.put(name, plot.render().as_bytes())?;
        }
        Ok(())
    }
}
