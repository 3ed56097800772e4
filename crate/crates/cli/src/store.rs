//! On-disk layout of a simulation run directory.
//!
//! ```text
//! <root>/config.json          resolved config, seed filled in
//! <root>/summary.json
//! <root>/traces/run-NNNNNN.jsonl
//! <root>/graphs/<name>.json   plus <name>.dot
//! ```

use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hiernet::dynamics::TraceEvent;
use hiernet::graph::DiGraph;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::{ConfigError, ExperimentConfig};

pub const CONFIG_FILE: &str = "config.json";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TRACE_DIR: &str = "traces";
pub const GRAPH_DIR: &str = "graphs";

#[derive(Debug, Clone)]
pub struct ResultStore {
    root: PathBuf,
}

impl ResultStore {
    /// Creates the layout under `root`, which must be absent or empty.
    pub fn create(root: &Path) -> Result<Self> {
        if root.exists() && fs::read_dir(root)?.next().is_some() {
            bail!(
                "output directory {} exists and is not empty",
                root.display()
            );
        }
        fs::create_dir_all(root.join(TRACE_DIR))
            .with_context(|| format!("creating {}", root.display()))?;
        fs::create_dir_all(root.join(GRAPH_DIR))?;
        Ok(ResultStore {
            root: root.to_path_buf(),
        })
    }

    pub fn open(root: &Path) -> Result<Self> {
        if !root.join(CONFIG_FILE).is_file() {
            bail!("{} holds no {CONFIG_FILE}", root.display());
        }
        Ok(ResultStore {
            root: root.to_path_buf(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write_config(&self, cfg: &ExperimentConfig) -> Result<()> {
        let path = self.root.join(CONFIG_FILE);
        fs::write(&path, cfg.to_json_pretty() + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }

    pub fn read_config(&self) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::load(&self.root.join(CONFIG_FILE))
    }

    pub fn write_summary<T: Serialize>(&self, summary: &T) -> Result<()> {
        write_json(&self.root.join(SUMMARY_FILE), summary)
    }

    pub fn read_summary<T: DeserializeOwned>(&self) -> Result<T> {
        let path = self.root.join(SUMMARY_FILE);
        let text =
            fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Path of run `run`'s trace, relative to the root.
    pub fn trace_name(run: usize) -> String {
        format!("{TRACE_DIR}/run-{run:06}.jsonl")
    }

    /// Writes one event per line and returns the relative path.
    pub fn write_trace(&self, run: usize, events: &[TraceEvent]) -> Result<String> {
        let name = Self::trace_name(run);
        let path = self.root.join(&name);
        let mut w = BufWriter::new(
            fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?,
        );
        for e in events {
            serde_json::to_writer(&mut w, e)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(name)
    }

    pub fn read_trace(&self, run: usize) -> Result<Vec<TraceEvent>> {
        let path = self.root.join(Self::trace_name(run));
        let file = fs::File::open(&path).with_context(|| format!("reading {}", path.display()))?;
        io::BufReader::new(file)
            .lines()
            .enumerate()
            .map(|(k, line)| {
                let line = line?;
                serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), k + 1))
            })
            .collect()
    }

    /// Writes `graphs/<name>.json` and, if `dot`, `graphs/<name>.dot`.
    pub fn write_graph(&self, name: &str, g: &DiGraph, dot: bool) -> Result<()> {
        let base = self.root.join(GRAPH_DIR).join(name);
        fs::write(base.with_extension("json"), g.to_json_string() + "\n")?;
        if dot {
            fs::write(base.with_extension("dot"), g.to_dot(name))?;
        }
        Ok(())
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
