//! Experiment configuration files.

use std::fmt;
use std::path::{Path, PathBuf};

use hiernet::dynamics::{InitialGraph, PairSelector, RunConfig, DEFAULT_MAX_STEPS};
use hiernet::equilibrium::MAX_ENUMERATION_NODES;
use hiernet::graph::{DiGraph, MAX_NODES, MIN_NODES};
use hiernet::payoff::{AgentType, UtilityParams};
use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TRACE_LIMIT: usize = 100_000;

/// A validation failure anchored to a position in the offending file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub origin: String,
    /// 1-based; 0 when the file could not be read at all.
    pub line: usize,
    pub column: usize,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.origin)?;
        if self.line > 0 {
            write!(f, ":{}:{}", self.line, self.column)?;
        }
        if !self.field.is_empty() {
            write!(f, ": {}", self.field)?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub game: GameSection,
    #[serde(default)]
    pub process: ProcessSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

fn schema_version() -> u32 {
    CONFIG_SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    pub n: usize,
    pub agent_type: AgentType,
    pub params: UtilityParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSection {
    #[serde(default)]
    pub selector: PairSelector,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    #[serde(default = "one")]
    pub absorption_check_interval: u64,
}

impl Default for ProcessSection {
    fn default() -> Self {
        ProcessSection {
            selector: PairSelector::Uniform,
            initial: InitialSpec::Empty,
            seed: None,
            max_steps: DEFAULT_MAX_STEPS,
            absorption_check_interval: 1,
        }
    }
}

fn default_max_steps() -> u64 {
    DEFAULT_MAX_STEPS
}

fn one() -> u64 {
    1
}

/// `"empty"`, `"complete"`, a path to a graph file, or an inline
/// `{"type": "random" | "graph", ..}` object.
#[derive(Debug, Clone, Default, PartialEq)]
pub enum InitialSpec {
    #[default]
    Empty,
    Complete,
    File(PathBuf),
    Inline(InitialGraph),
}

impl InitialSpec {
    /// `None` for an unresolved file path.
    pub fn to_initial_graph(&self) -> Option<InitialGraph> {
        match self {
            InitialSpec::Empty => Some(InitialGraph::Empty),
            InitialSpec::Complete => Some(InitialGraph::Complete),
            InitialSpec::File(_) => None,
            InitialSpec::Inline(g) => Some(g.clone()),
        }
    }
}

impl Serialize for InitialSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            InitialSpec::Empty => s.serialize_str("empty"),
            InitialSpec::Complete => s.serialize_str("complete"),
            InitialSpec::File(p) => p.serialize(s),
            InitialSpec::Inline(g) => g.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for InitialSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct SpecVisitor;

        impl<'de> Visitor<'de> for SpecVisitor {
            type Value = InitialSpec;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"empty\", \"complete\", a graph file path or an initial-graph object")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<InitialSpec, E> {
                Ok(match v {
                    "empty" => InitialSpec::Empty,
                    "complete" => InitialSpec::Complete,
                    "" => return Err(E::custom("empty initial graph path")),
                    path => InitialSpec::File(PathBuf::from(path)),
                })
            }

            fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<InitialSpec, A::Error> {
                InitialGraph::deserialize(de::value::MapAccessDeserializer::new(map))
                    .map(InitialSpec::Inline)
            }
        }

        d.deserialize_any(SpecVisitor)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Single,
    Batch,
    Enumerate,
    Crossval,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Single => "single",
            Mode::Batch => "batch",
            Mode::Enumerate => "enumerate",
            Mode::Crossval => "crossval",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "one_run")]
    pub runs: usize,
    #[serde(default)]
    pub outputs: Outputs,
    /// Parameter grid for crossval mode; the bundled grid when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<PathBuf>,
    /// Enumerate mode: attach the closed-form conditions to each graph.
    #[serde(default)]
    pub check_theorems: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            mode: Mode::Single,
            runs: 1,
            outputs: Outputs::default(),
            grid: None,
            check_theorems: false,
        }
    }
}

fn one_run() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Result directory; nothing is written when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub traces: bool,
    #[serde(default = "yes")]
    pub dot: bool,
    #[serde(default = "default_trace_limit")]
    pub trace_limit: usize,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            dir: None,
            traces: false,
            dot: true,
            trace_limit: DEFAULT_TRACE_LIMIT,
        }
    }
}

fn yes() -> bool {
    true
}

fn default_trace_limit() -> usize {
    DEFAULT_TRACE_LIMIT
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            origin: origin.clone(),
            line: 0,
            column: 0,
            field: String::new(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_str_at(&text, &origin, base)
    }

    /// Parses and validates `text`; relative paths resolve against `base`.
    /// A file-based initial graph is loaded and inlined.
    pub fn from_str_at(text: &str, origin: &str, base: &Path) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = match e.path().to_string() {
                p if p == "." => String::new(),
                p => p,
            };
            let inner = e.inner();
            let message = inner.to_string();
            let message = match message.rfind(" at line ") {
                Some(k) => message[..k].to_string(),
                None => message,
            };
            let keys: Vec<String> = e
                .path()
                .iter()
                .filter_map(|s| match s {
                    serde_path_to_error::Segment::Map { key } => Some(key.clone()),
                    _ => None,
                })
                .collect();
            let (line, column) = if inner.is_data() && !keys.is_empty() {
                let keys: Vec<&str> = keys.iter().map(String::as_str).collect();
                locate(text, &keys)
            } else {
                (inner.line(), inner.column())
            };
            ConfigError {
                origin: origin.to_string(),
                line,
                column,
                field,
                message,
            }
        })?;
        let anchored = |path: &[&str], message: String| {
            let (line, column) = locate(text, path);
            ConfigError {
                origin: origin.to_string(),
                line,
                column,
                field: path.join("."),
                message,
            }
        };
        if let InitialSpec::File(p) = &cfg.process.initial {
            let full = base.join(p);
            let graph = std::fs::read_to_string(&full)
                .map_err(|e| e.to_string())
                .and_then(|s| DiGraph::from_json_str(&s).map_err(|e| e.to_string()))
                .map_err(|e| {
                    anchored(&["process", "initial"], format!("{}: {e}", full.display()))
                })?;
            cfg.process.initial = InitialSpec::Inline(InitialGraph::Graph { graph });
        }
        if let Some(grid) = &cfg.experiment.grid {
            cfg.experiment.grid = Some(base.join(grid));
        }
        cfg.validate()
            .map_err(|(path, message)| anchored(path, message))?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), (&'static [&'static str], String)> {
        const N: &[&str] = &["game", "n"];
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err((
                &["schema_version"],
                format!(
                    "unsupported version {}, expected {CONFIG_SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        let n = self.game.n;
        if !(MIN_NODES..=MAX_NODES).contains(&n) {
            return Err((N, format!("must lie in {MIN_NODES}..={MAX_NODES}, got {n}")));
        }
        if matches!(self.experiment.mode, Mode::Enumerate | Mode::Crossval)
            && n > MAX_ENUMERATION_NODES
        {
            return Err((
                N,
                format!(
                    "{} mode supports n <= {MAX_ENUMERATION_NODES}, got {n}",
                    self.experiment.mode.as_str()
                ),
            ));
        }
        self.game
            .params
            .validate_for(n)
            .map_err(|e| (&["game", "params", "reward"][..], e.to_string()))?;
        self.process
            .selector
            .validate_for(n)
            .map_err(|e| (&["process", "selector"][..], e.to_string()))?;
        if let Some(init) = self.process.initial.to_initial_graph() {
            init.validate_for(n)
                .map_err(|e| (&["process", "initial"][..], e.to_string()))?;
        }
        if self.process.max_steps == 0 {
            return Err((&["process", "max_steps"], "must be at least 1".into()));
        }
        if self.process.absorption_check_interval == 0 {
            return Err((
                &["process", "absorption_check_interval"],
                "must be at least 1".into(),
            ));
        }
        let runs = self.experiment.runs;
        if runs == 0 {
            return Err((&["experiment", "runs"], "must be at least 1".into()));
        }
        if self.experiment.mode == Mode::Single && runs != 1 {
            return Err((
                &["experiment", "runs"],
                format!("single mode runs once, got {runs}"),
            ));
        }
        Ok(())
    }

    /// The dynamics configuration for one run seeded with `seed`.
    pub fn run_config(&self, seed: u64) -> RunConfig {
        let mut rc = RunConfig::new(
            self.game.n,
            self.game.params.clone(),
            self.game.agent_type,
            seed,
        );
        rc.selector = self.process.selector.clone();
        rc.initial = self
            .process
            .initial
            .to_initial_graph()
            .expect("file initial graphs are inlined on load");
        rc.max_steps = self.process.max_steps;
        rc.absorption_check_interval = self.process.absorption_check_interval;
        rc.trace_limit = if self.experiment.outputs.traces {
            self.experiment.outputs.trace_limit
        } else {
            0
        };
        rc
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Line and column of the innermost key of `path` found in `text`,
/// searching each key after the previous one.
pub(crate) fn locate(text: &str, path: &[&str]) -> (usize, usize) {
    let mut at = None;
    let mut from = 0;
    for key in path {
        let quoted = format!("\"{key}\"");
        let found = text[from..].match_indices(&quoted).find(|(k, _)| {
            text[from + k + quoted.len()..]
                .trim_start()
                .starts_with(':')
        });
        match found {
            Some((k, _)) => {
                at = Some(from + k);
                from += k + quoted.len();
            }
            None => break,
        }
    }
    let Some(pos) = at else { return (1, 1) };
    let before = &text[..pos];
    let line = before.matches('\n').count() + 1;
    let column = pos - before.rfind('\n').map_or(0, |k| k + 1) + 1;
    (line, column)
}
