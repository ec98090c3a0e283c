//! CSV emission and run manifests.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use twoslit_core::GridSpec;

/// Writes `header` then one row per record, `{:.16e}` per value (17
/// significant digits), comma separated, `\n` terminated.
pub fn csv_text(header: &[&str], columns: &[&[f64]]) -> String {
    let rows = columns.first().map_or(0, |c| c.len());
    debug_assert!(columns.iter().all(|c| c.len() == rows));
    let mut out = header.join(",");
    out.push('\n');
    for i in 0..rows {
        let row: Vec<String> = columns.iter().map(|c| format!("{:.16e}", c[i])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct GridRecord {
    pub role: &'static str,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridRecord {
    pub fn new(role: &'static str, g: &GridSpec) -> Self {
        Self {
            role,
            lo: g.lo,
            hi: g.hi,
            n: g.n,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run. No timestamps.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command_line: Vec<String>,
    pub config: String,
    pub config_sha256: String,
    pub grids: Vec<GridRecord>,
    pub outputs: Vec<OutputRecord>,
}

/// Collects output files under one directory and writes the manifest last.
pub struct OutputSet {
    dir: PathBuf,
    outputs: Vec<OutputRecord>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, text: &str) -> io::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, text)?;
        self.outputs.push(OutputRecord {
            file: name.to_string(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(path)
    }

    pub fn finish(
        self,
        command_line: Vec<String>,
        config: String,
        grids: Vec<GridRecord>,
    ) -> io::Result<PathBuf> {
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command_line,
            config_sha256: sha256_hex(config.as_bytes()),
            config,
            grids,
            outputs: self.outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Short, filesystem-safe rendering of a parameter value for file names.
pub fn tag(v: f64) -> String {
    format!("{v}").replace('-', "m")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_doubles() {
        let xs = [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23];
        let text = csv_text(&["x"], &[&xs]);
        let back: Vec<f64> = text.lines().skip(1).map(|l| l.parse().unwrap()).collect();
        assert_eq!(back, xs);
        assert!(text.starts_with("x\n"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn csv_columns() {
        let text = csv_text(&["x", "P"], &[&[1.0, 2.0], &[0.5, 0.25]]);
        assert_eq!(
            text,
            "x,P\n1.0000000000000000e0,5.0000000000000000e-1\n2.0000000000000000e0,2.5000000000000000e-1\n"
        );
    }

    #[test]
    fn tags() {
        assert_eq!(tag(0.7), "0.7");
        assert_eq!(tag(-1.5), "m1.5");
        assert_eq!(tag(0.0), "0");
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
