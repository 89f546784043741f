// SPDX-License-Identifier: Apache-2.0

//! Output files: CSVs with embedded config snapshots and full-precision
//! numeric formatting, one directory per run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Formats a float with 17 significant digits, enough to round-trip f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// FNV-1a 64-bit hash, used to tie histogram files to the model file they
/// were sampled from.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// A run output directory.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(path: &str) -> Result<OutDir, CliError> {
        let root = PathBuf::from(path);
        std::fs::create_dir_all(&root)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", root.display())))?;
        Ok(OutDir { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Builds a CSV document: `#`-prefixed metadata lines embedding the resolved
/// config, a header row, then data rows.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(command: &str, config_snapshot: &str, extra_meta: &[(String, String)]) -> Csv {
        let mut text = String::new();
        let _ = writeln!(text, "# qhartley {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(text, "# command = {command}");
        let _ = writeln!(text, "# rng = {}", qhartley::RNG_ALGORITHM);
        for (k, v) in extra_meta {
            let _ = writeln!(text, "# {k} = {v}");
        }
        text.push_str("# config-begin\n");
        for line in config_snapshot.lines() {
            let _ = writeln!(text, "# {line}");
        }
        text.push_str("# config-end\n");
        Csv { text }
    }

    pub fn header(&mut self, columns: &str) -> &mut Self {
        let _ = writeln!(self.text, "{columns}");
        self
    }

    pub fn row(&mut self, cells: &[String]) -> &mut Self {
        let _ = writeln!(self.text, "{}", cells.join(","));
        self
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Extracts the embedded config snapshot back out of an output file,
/// allowing any run to be reproduced from its own artifacts.
pub fn extract_embedded_config(text: &str) -> Option<String> {
    let mut lines = text.lines();
    loop {
        let line = lines.next()?;
        if line == "# config-begin" {
            break;
        }
    }
    let mut out = String::new();
    for line in lines {
        if line == "# config-end" {
            return Some(out);
        }
        out.push_str(line.strip_prefix("# ").unwrap_or(line.strip_prefix('#')?));
        out.push('\n');
    }
    None
}

/// Reads a file relative to nothing in particular; errors map to CLI I/O.
pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}
