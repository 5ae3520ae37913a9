//! Chain checkpoints: `N` as a little-endian u64 followed by `N` little-endian
//! f64 eigenvalues, with a `key = value` text sidecar at `<path>.meta`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::GeometryModel;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointMeta {
    pub model: GeometryModel,
    pub g: f64,
    pub sweeps: u64,
    pub seed: u64,
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn encode_eigenvalues(values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 8 * values.len());
    out.extend_from_slice(&(values.len() as u64).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_eigenvalues(bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() < 8 {
        return Err(Error::InvalidInput("checkpoint shorter than its header".into()));
    }
    let n = u64::from_le_bytes(bytes[..8].try_into().expect("8-byte header"));
    let body = &bytes[8..];
    if body.len() as u64 != 8 * n {
        return Err(Error::InvalidInput(format!(
            "checkpoint header says {n} eigenvalues but holds {} bytes",
            body.len()
        )));
    }
    Ok(body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

/// Writes `bytes` to a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = dir.join(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn save_checkpoint(path: &Path, values: &[f64], meta: &CheckpointMeta) -> Result<()> {
    write_atomic(path, &encode_eigenvalues(values))?;
    let text = format!(
        "model = {}\ng = {:e}\nsweeps = {}\nseed = {}\nn = {}\n",
        meta.model,
        meta.g,
        meta.sweeps,
        meta.seed,
        values.len()
    );
    write_atomic(&meta_path(path), text.as_bytes())
}

pub fn load_eigenvalues(path: &Path) -> Result<Vec<f64>> {
    decode_eigenvalues(&fs::read(path)?)
}

pub fn load_meta(path: &Path) -> Result<CheckpointMeta> {
    let text = fs::read_to_string(meta_path(path))?;
    let field = |key: &str| {
        text.lines()
            .filter_map(|l| l.split_once('='))
            .find(|(k, _)| k.trim() == key)
            .map(|(_, v)| v.trim().to_string())
            .ok_or_else(|| Error::InvalidInput(format!("checkpoint metadata lacks '{key}'")))
    };
    let bad = |key: &str| Error::InvalidInput(format!("checkpoint metadata field '{key}' is malformed"));
    Ok(CheckpointMeta {
        model: field("model")?.parse()?,
        g: field("g")?.parse().map_err(|_| bad("g"))?,
        sweeps: field("sweeps")?.parse().map_err(|_| bad("sweeps"))?,
        seed: field("seed")?.parse().map_err(|_| bad("seed"))?,
    })
}
