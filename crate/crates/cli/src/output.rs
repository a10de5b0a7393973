//! Self-describing artifacts, each written through a temporary file and
//! renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;
use tempfile::NamedTempFile;

pub struct Artifacts {
    dir: PathBuf,
    config: serde_json::Value,
    config_line: String,
    pub written: Vec<PathBuf>,
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    let path = dir.join(name);
    tmp.persist(&path).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

impl Artifacts {
    pub fn new(dir: &Path, config: &impl Serialize) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let config = serde_json::to_value(config)?;
        let config_line = format!("# config: {}\n", serde_json::to_string(&config)?);
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            config,
            config_line,
            written: Vec::new(),
        })
    }

    pub fn json(&mut self, name: &str, result: &impl Serialize, incomplete: bool) -> Result<()> {
        let doc = json!({
            "config": self.config,
            "incomplete": incomplete,
            "result": result,
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        let path = write_atomic(&self.dir, name, text.as_bytes())?;
        self.written.push(path);
        Ok(())
    }

    /// RFC 4180 table after one `#` line holding the config.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut out = self.config_line.clone().into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(header)?;
            for row in rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        let path = write_atomic(&self.dir, name, &out)?;
        self.written.push(path);
        Ok(())
    }

    /// Columnar data for plotting. Returns false, writing nothing, when there
    /// are no rows.
    pub fn emit_plot_data(&mut self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<bool> {
        if rows.is_empty() {
            return Ok(false);
        }
        self.csv(name, columns, rows)?;
        Ok(true)
    }
}
