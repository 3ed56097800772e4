use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use hiernet::grid::ParamGrid;
use hiernet::payoff::AgentType;
use hiernet_cli::config::{ExperimentConfig, Mode};
use hiernet_cli::experiment;
use hiernet_cli::files::{load_graph, load_grid, load_params_for};
use hiernet_cli::report;
use hiernet_cli::store::{write_json, ResultStore};

const EXIT_VALIDATION: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hiernet",
    version,
    about = "Hierarchical network formation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file
    Simulate {
        #[arg(long, required_unless_present = "replay")]
        config: Option<PathBuf>,
        /// Overrides the config seed; generated and printed when neither is set
        #[arg(long)]
        seed: Option<u64>,
        /// Result directory, overriding `experiment.outputs.dir`
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-run a stored result directory and compare summaries
        #[arg(long, conflicts_with_all = ["config", "seed", "out"])]
        replay: Option<PathBuf>,
    },
    /// Certify a graph and print every condition with both sides
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        agent_type: AgentType,
        /// Print the report as JSON
        #[arg(long)]
        json: bool,
    },
    /// List every equilibrium network on n nodes
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        agent_type: AgentType,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        check_theorems: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare brute-force equilibria with the closed-form conditions
    Crossval {
        #[arg(long)]
        n: usize,
        /// Parameter grid file; the bundled grid when omitted
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Both agent types when omitted
        #[arg(long)]
        agent_type: Option<AgentType>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a graph file to Graphviz DOT
    ExportDot {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "G")]
        name: String,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Simulate {
            replay: Some(dir), ..
        } => replay(&dir),
        Command::Simulate {
            config, seed, out, ..
        } => simulate(&config.expect("required by clap"), seed, out),
        Command::Check {
            graph,
            params,
            agent_type,
            json,
        } => {
            let g = load_graph(&graph)?;
            let params = load_params_for(&params, g.n())?;
            let r = experiment::check(&g, &params, agent_type);
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                print!("{}", report::check(&r));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate {
            n,
            agent_type,
            params,
            check_theorems,
            out,
        } => {
            let params = load_params_for(&params, n)?;
            enumerate(n, &params, agent_type, check_theorems, out.as_deref())
        }
        Command::Crossval {
            n,
            grid,
            agent_type,
            out,
        } => {
            let grid = match grid {
                Some(p) => load_grid(&p)?,
                None => ParamGrid::default_grid(),
            };
            let types = match agent_type {
                Some(t) => vec![t],
                None => AgentType::ALL.to_vec(),
            };
            crossval(n, &grid, &types, out.as_deref())
        }
        Command::ExportDot { graph, out, name } => {
            let dot = load_graph(&graph)?.to_dot(&name);
            match out {
                Some(p) => {
                    std::fs::write(&p, dot).with_context(|| format!("writing {}", p.display()))?
                }
                None => print!("{dot}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn simulate(path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<ExitCode> {
    let cfg = ExperimentConfig::load(path)?;
    match cfg.experiment.mode {
        Mode::Enumerate => {
            let dir = out.or(cfg.experiment.outputs.dir.clone());
            let file = dir.map(|d| -> Result<PathBuf> {
                std::fs::create_dir_all(&d)?;
                Ok(d.join("equilibria.json"))
            });
            let file = file.transpose()?;
            return enumerate(
                cfg.game.n,
                &cfg.game.params,
                cfg.game.agent_type,
                cfg.experiment.check_theorems,
                file.as_deref(),
            );
        }
        Mode::Crossval => {
            let grid = match &cfg.experiment.grid {
                Some(p) => load_grid(p)?,
                None => ParamGrid::default_grid(),
            };
            let dir = out.or(cfg.experiment.outputs.dir.clone());
            let file = dir.map(|d| -> Result<PathBuf> {
                std::fs::create_dir_all(&d)?;
                Ok(d.join("crossval.json"))
            });
            let file = file.transpose()?;
            return crossval(cfg.game.n, &grid, &[cfg.game.agent_type], file.as_deref());
        }
        Mode::Single | Mode::Batch => {}
    }
    let seed = match seed.or(cfg.process.seed) {
        Some(s) => s,
        None => {
            let s = rand::random::<u64>();
            println!("seed: {s} (generated)");
            s
        }
    };
    let store = match out.or(cfg.experiment.outputs.dir.clone()) {
        Some(dir) => Some(ResultStore::create(&dir)?),
        None => None,
    };
    let sim = experiment::simulate(&cfg, seed, store.as_ref())?;
    print!("{}", report::simulation(&sim.summary));
    if let Some(s) = &store {
        println!("results: {}", s.root().display());
    }
    if cfg.experiment.mode == Mode::Single && !sim.summary.runs[0].converged {
        eprintln!(
            "no equilibrium within max_steps = {}",
            cfg.process.max_steps
        );
        return Ok(ExitCode::from(EXIT_NO_CONVERGENCE));
    }
    Ok(ExitCode::SUCCESS)
}

fn replay(dir: &Path) -> Result<ExitCode> {
    let store = ResultStore::open(dir)?;
    let (stored, fresh) = experiment::replay(&store)?;
    print!("{}", report::simulation(&fresh));
    if stored == fresh {
        println!("replay: summary identical to {}", dir.display());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("replay: summary differs from {}", dir.display());
        Ok(ExitCode::from(EXIT_VIOLATION))
    }
}

fn enumerate(
    n: usize,
    params: &hiernet::payoff::UtilityParams,
    agent_type: AgentType,
    check_theorems: bool,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let list = experiment::enumerate(n, params, agent_type, check_theorems)?;
    let failing = list
        .iter()
        .filter(|e| e.theorem_result.as_ref().is_some_and(|r| !r.passes))
        .count();
    match out {
        Some(p) => {
            write_json(p, &list)?;
            println!(
                "{} equilibria on {n} nodes ({agent_type}) written to {}",
                list.len(),
                p.display()
            );
        }
        None => println!("{}", serde_json::to_string_pretty(&list)?),
    }
    if failing > 0 {
        eprintln!("{failing} equilibria fail the closed-form conditions");
        return Ok(ExitCode::from(EXIT_VIOLATION));
    }
    Ok(ExitCode::SUCCESS)
}

fn crossval(
    n: usize,
    grid: &ParamGrid,
    types: &[AgentType],
    out: Option<&Path>,
) -> Result<ExitCode> {
    grid.validate_for(n)?;
    let c = experiment::cross_validate(n, grid, types)?;
    print!("{}", report::crossval(&c));
    if let Some(p) = out {
        write_json(p, &c)?;
    }
    let nesting_broken = c.report.nesting.iter().any(|s| !s.subset);
    if c.report.total_mismatches > 0 || nesting_broken {
        return Ok(ExitCode::from(EXIT_VIOLATION));
    }
    Ok(ExitCode::SUCCESS)
}
