//! Columnar trace emission. Every stream is formatted identically whether or
//! not it lands on disk: a SHA-256 digest of the exact bytes is always
//! produced, which is what the determinism checks compare.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

/// One output stream: hashes everything, optionally writes it to a file.
pub struct TraceWriter {
    hasher: Sha256,
    file: Option<BufWriter<File>>,
    lines: u64,
}

impl TraceWriter {
    /// Hash-only stream.
    pub fn new() -> Self {
        Self {
            hasher: Sha256::new(),
            file: None,
            lines: 0,
        }
    }

    /// Stream that also writes to `path`.
    pub fn to_file(path: &Path) -> io::Result<Self> {
        Ok(Self {
            hasher: Sha256::new(),
            file: Some(BufWriter::new(File::create(path)?)),
            lines: 0,
        })
    }

    /// Provenance header: identifies the batch and columns.
    pub fn header(&mut self, master_seed: u64, run_index: u32, config_hash: &str, columns: &str) {
        self.line(&format!(
            "# master_seed={master_seed} run={run_index} config={config_hash}"
        ));
        self.line(&format!("# columns: {columns}"));
        self.lines = 0; // headers do not count as records
    }

    pub fn line(&mut self, text: &str) {
        self.hasher.update(text.as_bytes());
        self.hasher.update(b"\n");
        if let Some(f) = &mut self.file {
            let _ = f.write_all(text.as_bytes());
            let _ = f.write_all(b"\n");
        }
        self.lines += 1;
    }

    /// Number of record lines emitted (headers excluded).
    pub fn records(&self) -> u64 {
        self.lines
    }

    pub fn finish(self) -> io::Result<String> {
        if let Some(mut f) = self.file {
            f.flush()?;
        }
        Ok(hex::encode(self.hasher.finalize()))
    }
}

/// Fixed-width scientific float formatting shared by all traces.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.12e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_file_independent() {
        let mut a = TraceWriter::new();
        a.header(1, 7, "beef", "t x");
        a.line("0 1");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.tsv");
        let mut b = TraceWriter::to_file(&path).unwrap();
        b.header(1, 7, "beef", "t x");
        b.line("0 1");
        assert_eq!(a.records(), 1);
        let da = a.finish().unwrap();
        let db = b.finish().unwrap();
        assert_eq!(da, db);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# master_seed=1 run=7 config=beef\n"));
        assert!(text.ends_with("0 1\n"));
    }

    #[test]
    fn float_format_is_deterministic() {
        assert_eq!(fmt_f(1.0), "1.000000000000e0");
        assert_eq!(fmt_f(-2.5e-7), "-2.500000000000e-7");
    }
}
