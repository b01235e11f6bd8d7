//! File formats: CSV result tables with a provenance header, the flat
//! config grammar, disorder fields and realization checkpoints.
//!
//! Every table written here starts with `#` comment lines carrying the tool
//! version, the subcommand, the fully resolved config and a content hash of
//! each input file. The header never contains timestamps, so two runs with the
//! same config and seed produce byte-identical files.

mod checkpoint;
mod config;
mod disorder;
mod schema;

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub use checkpoint::Checkpoint;
pub use config::{
    apply_override, load_config, parse_overrides, CollapseConfig, CouplingsConfig, DecodeConfig,
    DisorderConfig, Mc2dConfig, Mc3dConfig, ReportConfig,
};
pub use disorder::{read_disorder_2d, read_disorder_3d, write_disorder_2d, write_disorder_3d};
pub use schema::{CouplingRow, DecodeRow, MagnetizationRow, TensionRow, WilsonRow};

/// Git-style object hash: SHA-256 over `blob <len>\0` followed by the bytes.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn hash_file(path: &Path) -> Result<String> {
    Ok(content_hash(&fs::read(path)?))
}

/// Header block written in front of every output.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub command: String,
    /// Resolved config as TOML.
    pub config: String,
    /// `(path, hash)` for each input file, config file included.
    pub inputs: Vec<(String, String)>,
}

impl Provenance {
    pub fn new<C: Serialize>(command: &str, config: &C) -> Result<Self> {
        let config = toml::to_string(config).map_err(|e| Error::Config(e.to_string()))?;
        Ok(Provenance {
            tool: format!("tcnot-lab {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            config,
            inputs: Vec::new(),
        })
    }

    pub fn with_input(mut self, path: &Path) -> Result<Self> {
        let hash = hash_file(path)?;
        self.inputs.push((path.display().to_string(), hash));
        Ok(self)
    }

    /// The header as `#` comment lines.
    pub fn comment_block(&self) -> String {
        let mut s = format!("# {} {}\n", self.tool, self.command);
        for line in self.config.lines().filter(|l| !l.trim().is_empty()) {
            s.push_str(&format!("# config: {line}\n"));
        }
        for (path, hash) in &self.inputs {
            s.push_str(&format!("# input: {path} blob-sha256:{hash}\n"));
        }
        s
    }
}

/// Serializes `rows` as CSV with a header row.
pub fn csv_body<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes provenance plus CSV to `out`, or to stdout when `out` is `None`.
pub fn write_csv<T: Serialize>(out: Option<&Path>, prov: &Provenance, rows: &[T]) -> Result<()> {
    let text = prov.comment_block() + &csv_body(rows)?;
    emit(out, &text)
}

pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, text)?;
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Reads a CSV written by [`write_csv`]; `#` lines are skipped and column
/// names must match `T` exactly.
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let schema = |msg: String| Error::Schema { path: path.display().to_string(), msg };
    let text = fs::read_to_string(path)?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| schema(e.to_string()))?;
    if rows.is_empty() {
        return Err(schema("no data rows".into()));
    }
    Ok(rows)
}

/// Pretty JSON with the provenance under `"provenance"`.
pub fn write_json<T: Serialize>(out: Option<&Path>, prov: &Provenance, value: &T) -> Result<()> {
    let mut v = serde_json::to_value(value)?;
    if let serde_json::Value::Object(map) = &mut v {
        map.insert("provenance".into(), serde_json::to_value(prov)?);
    }
    emit(out, &(serde_json::to_string_pretty(&v)? + "\n"))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Schema { path: path.display().to_string(), msg: e.to_string() })
}
