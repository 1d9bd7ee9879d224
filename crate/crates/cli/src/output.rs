use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use susy_pep::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    file: String,
    bytes: usize,
    sha256: String,
}

/// Collects files in one directory and finishes with `manifest.json`.
pub struct OutputDir {
    root: PathBuf,
    format: Format,
    entries: Vec<ManifestEntry>,
}

impl OutputDir {
    pub fn create(root: &Path, format: Format) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            format,
            entries: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, bytes: Vec<u8>) -> Result<()> {
        fs::write(self.root.join(name), &bytes)?;
        self.entries.push(ManifestEntry {
            file: name.to_owned(),
            bytes: bytes.len(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(())
    }

    /// Writes a CSV file if CSV output is enabled.
    pub fn csv(&mut self, name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        if !self.format.csv() {
            return Ok(());
        }
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.put(name, buf)
    }

    /// Writes a JSON file if JSON output is enabled.
    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        if !self.format.json() {
            return Ok(());
        }
        let mut buf = Vec::new();
        susy_pep::io::write_json(&mut buf, value)?;
        self.put(name, buf)
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.entries.sort_by(|a, b| a.file.cmp(&b.file));
        let path = self.root.join("manifest.json");
        let mut buf = Vec::new();
        susy_pep::io::write_json(&mut buf, &self.entries)?;
        fs::write(&path, buf)?;
        Ok(path)
    }
}
