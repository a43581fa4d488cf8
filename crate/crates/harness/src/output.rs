//! Output directory handling. Every row written here starts with the
//! config hash and the seed.

use std::path::{Path, PathBuf};

use crate::config::Config;
use crate::error::{HarnessError, Result};

#[derive(Clone, Debug)]
pub struct Output {
    dir: Option<PathBuf>,
    pub hash: String,
    pub seed: u64,
}

impl Output {
    /// Creates `dir` and echoes the config into it.
    pub fn new(dir: Option<&Path>, cfg: &Config, seed: u64) -> Result<Self> {
        if let Some(d) = dir {
            std::fs::create_dir_all(d).map_err(HarnessError::io(d))?;
            let echo = d.join("config.ini");
            std::fs::write(&echo, cfg.text()).map_err(HarnessError::io(&echo))?;
        }
        Ok(Self { dir: dir.map(Path::to_path_buf), hash: cfg.hash(), seed })
    }

    /// No files, rows computed in memory only.
    pub fn discard(cfg: &Config, seed: u64) -> Self {
        Self { dir: None, hash: cfg.hash(), seed }
    }

    pub fn write(&self, name: &str, body: &str) -> Result<()> {
        if let Some(d) = &self.dir {
            let p = d.join(name);
            std::fs::write(&p, body).map_err(HarnessError::io(&p))?;
        }
        Ok(())
    }

    /// Prefixes a CSV (header first) with `config_hash,seed`.
    pub fn stamp(&self, csv: &str) -> String {
        let mut out = String::with_capacity(csv.len() + 32 * csv.lines().count());
        for (i, line) in csv.lines().enumerate() {
            if i == 0 {
                out.push_str("config_hash,seed,");
            } else {
                out.push_str(&format!("{},{},", self.hash, self.seed));
            }
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}
