//! Graph, parameter and grid files with positioned error messages.

use std::path::Path;

use hiernet::graph::{DiGraph, GraphFile};
use hiernet::grid::{GridError, ParamGrid};
use hiernet::payoff::UtilityParams;

use crate::config::{locate, ConfigError};

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError {
        origin: path.display().to_string(),
        line: 0,
        column: 0,
        field: String::new(),
        message: e.to_string(),
    })
}

fn json_error(path: &Path, e: &serde_json::Error) -> ConfigError {
    let message = e.to_string();
    let message = match message.rfind(" at line ") {
        Some(k) => message[..k].to_string(),
        None => message,
    };
    ConfigError {
        origin: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        field: String::new(),
        message,
    }
}

pub fn load_graph(path: &Path) -> Result<DiGraph, ConfigError> {
    let text = read(path)?;
    let file: GraphFile = serde_json::from_str(&text).map_err(|e| json_error(path, &e))?;
    DiGraph::try_from(file).map_err(|e| {
        let (line, column) = locate(&text, &["edges"]);
        ConfigError {
            origin: path.display().to_string(),
            line,
            column,
            field: "edges".into(),
            message: e.to_string(),
        }
    })
}

pub fn load_params(path: &Path) -> Result<UtilityParams, ConfigError> {
    let text = read(path)?;
    UtilityParams::from_json_str(&text).map_err(|e| json_error(path, &e))
}

/// Checks that the reward covers every level on `n` nodes.
pub fn load_params_for(path: &Path, n: usize) -> Result<UtilityParams, ConfigError> {
    let params = load_params(path)?;
    params.validate_for(n).map_err(|e| {
        let text = std::fs::read_to_string(path).unwrap_or_default();
        let (line, column) = locate(&text, &["reward"]);
        ConfigError {
            origin: path.display().to_string(),
            line,
            column,
            field: "reward".into(),
            message: format!("{e} (n = {n})"),
        }
    })?;
    Ok(params)
}

pub fn load_grid(path: &Path) -> Result<ParamGrid, ConfigError> {
    let text = read(path)?;
    ParamGrid::from_json_str(&text).map_err(|e| match e {
        GridError::Parse(inner) => json_error(path, &inner),
        other => {
            let mut message = other.to_string();
            if let Some(source) = std::error::Error::source(&other) {
                message = format!("{message}: {source}");
            }
            ConfigError {
                origin: path.display().to_string(),
                line: 0,
                column: 0,
                field: String::new(),
                message,
            }
        }
    })
}
