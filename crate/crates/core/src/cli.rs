//! Command-line configuration and subcommand execution.
//!
//! Flags may be combined with a JSON config file (`--config`); a flag given
//! on the command line always wins over the file.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::analytics::{cascade_lower_bound, recurrence_curve, AnalyticParams};
use crate::error::Error;
use crate::experiments::{self, Scenario, SweepSpec, SweptParameter};
use crate::game::{run, select_seeds, PayoffVector, Rule};
use crate::graph::{generate_er_multiplex, GenParams, MultiplexNetwork};
use crate::io;
use crate::streams::{derive_seed, purpose};

/// Environment variable capping worker threads (0 = one per core).
pub const THREADS_ENV: &str = "MULTICASCADE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "multicascade",
    about = "Innovation diffusion on multiplex Erdős–Rényi networks",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Sample a multiplex network and write it as an edge list
    Generate(Flags),
    /// Run one diffusion and write its trace
    Run(Flags),
    /// Write the mean-field curve and its lower bound
    Analytic(Flags),
    /// Replicated sweep over seed fraction, layer count or edge probability
    Sweep(Flags),
    /// Compare the sum, dominant and random rules over seed fractions
    Compare(Flags),
}

#[derive(Debug, Args, Default)]
struct Flags {
    /// JSON file providing defaults for any flag below
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    /// Edge probability, shared by all layers
    #[arg(long, value_delimiter = ',')]
    edge_prob: Option<Vec<f64>>,
    /// Comma-separated A payoffs, one per layer
    #[arg(long, value_delimiter = ',')]
    payoff_a: Option<Vec<f64>>,
    /// Comma-separated B payoffs, one per layer
    #[arg(long, value_delimiter = ',')]
    payoff_b: Option<Vec<f64>>,
    #[arg(long)]
    seed_fraction: Option<f64>,
    /// sum, dominant or random
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    rng_seed: Option<u64>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Replicates per grid point
    #[arg(long)]
    samples: Option<usize>,
    /// Swept parameter: seed-fraction, layers or edge-prob
    #[arg(long)]
    param: Option<String>,
    /// Comma-separated grid values
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Steps of the analytic curve
    #[arg(long)]
    steps: Option<usize>,
    /// Run on a saved edge list instead of sampling a network
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Same keys as the flags, snake_case.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    nodes: Option<usize>,
    layers: Option<usize>,
    edge_prob: Option<f64>,
    payoff_a: Option<Vec<f64>>,
    payoff_b: Option<Vec<f64>>,
    seed_fraction: Option<f64>,
    rule: Option<String>,
    rng_seed: Option<u64>,
    max_steps: Option<usize>,
    samples: Option<usize>,
    param: Option<String>,
    grid: Option<Vec<f64>>,
    steps: Option<usize>,
    network: Option<PathBuf>,
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    Run,
    Analytic,
    Sweep,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Run => "run",
            Command::Analytic => "analytic",
            Command::Sweep => "sweep",
            Command::Compare => "compare",
        }
    }
}

/// A fully validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub nodes: usize,
    pub layers: usize,
    pub edge_prob: f64,
    pub payoffs: PayoffVector,
    pub seed_fraction: f64,
    pub rule: Rule,
    pub rng_seed: u64,
    pub max_steps: usize,
    pub samples: usize,
    pub param: SweptParameter,
    pub grid: Option<Vec<f64>>,
    pub steps: usize,
    pub network: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum ConfigError {
    /// Usage, help or unknown-flag errors from the argument parser.
    Clap(clap::Error),
    Invalid {
        flag: &'static str,
        message: String,
    },
}

impl ConfigError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ConfigError::Clap(e) => e.exit_code(),
            ConfigError::Invalid { .. } => 2,
        }
    }

    fn invalid(flag: &'static str, message: impl fmt::Display) -> Self {
        ConfigError::Invalid {
            flag,
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Clap(e) => write!(f, "{}", e.render()),
            ConfigError::Invalid { flag, message } => write!(f, "error: --{flag}: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn param_from_str(s: &str) -> Option<SweptParameter> {
    match s {
        "seed-fraction" => Some(SweptParameter::SeedFraction),
        "layers" => Some(SweptParameter::LayerCount),
        "edge-prob" => Some(SweptParameter::EdgeProbability),
        _ => None,
    }
}

fn param_to_str(p: SweptParameter) -> &'static str {
    match p {
        SweptParameter::SeedFraction | SweptParameter::Rule => "seed-fraction",
        SweptParameter::LayerCount => "layers",
        SweptParameter::EdgeProbability => "edge-prob",
    }
}

/// Parse `argv` (including the program name) into a validated config.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(ConfigError::Clap)?;
    let (command, flags) = match cli.command {
        CommandArgs::Generate(f) => (Command::Generate, f),
        CommandArgs::Run(f) => (Command::Run, f),
        CommandArgs::Analytic(f) => (Command::Analytic, f),
        CommandArgs::Sweep(f) => (Command::Sweep, f),
        CommandArgs::Compare(f) => (Command::Compare, f),
    };
    let file = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::invalid("config", format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| ConfigError::invalid("config", e))?
        }
        None => FileConfig::default(),
    };
    resolve(command, flags, file)
}

fn resolve(command: Command, flags: Flags, file: FileConfig) -> Result<RunConfig, ConfigError> {
    let nodes = flags.nodes.or(file.nodes).unwrap_or(500);
    if nodes == 0 {
        return Err(ConfigError::invalid("nodes", "must be at least 1"));
    }
    let layers = flags.layers.or(file.layers).unwrap_or(2);
    if layers == 0 {
        return Err(ConfigError::invalid("layers", "must be at least 1"));
    }

    let edge_prob = match flags.edge_prob {
        Some(list) => {
            let first = *list
                .first()
                .ok_or_else(|| ConfigError::invalid("edge-prob", "empty list"))?;
            if list.iter().any(|&p| p != first) {
                return Err(ConfigError::invalid(
                    "edge-prob",
                    "per-layer edge probabilities are not supported; all layers share one p",
                ));
            }
            first
        }
        None => file.edge_prob.unwrap_or(0.1),
    };
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(ConfigError::invalid(
            "edge-prob",
            format!("{edge_prob} is outside [0, 1]"),
        ));
    }

    let a = flags.payoff_a.or(file.payoff_a);
    let b = flags.payoff_b.or(file.payoff_b);
    let payoffs = match (a, b) {
        (None, None) => PayoffVector::uniform(2.0, 1.0, layers).expect("valid default payoffs"),
        (Some(_), None) => {
            return Err(ConfigError::invalid("payoff-b", "required with --payoff-a"))
        }
        (None, Some(_)) => {
            return Err(ConfigError::invalid("payoff-a", "required with --payoff-b"))
        }
        (Some(a), Some(b)) => {
            if a.len() != layers {
                return Err(ConfigError::invalid(
                    "payoff-a",
                    format!("{} values given for {layers} layers", a.len()),
                ));
            }
            if b.len() != layers {
                return Err(ConfigError::invalid(
                    "payoff-b",
                    format!("{} values given for {layers} layers", b.len()),
                ));
            }
            PayoffVector::new(a, b).map_err(|e| ConfigError::invalid("payoff-a", e))?
        }
    };

    let seed_fraction = flags.seed_fraction.or(file.seed_fraction).unwrap_or(0.25);
    if !(0.0..=1.0).contains(&seed_fraction) {
        return Err(ConfigError::invalid(
            "seed-fraction",
            format!("{seed_fraction} is outside [0, 1]"),
        ));
    }
    let rule = match flags.rule.or(file.rule) {
        Some(r) => r
            .parse::<Rule>()
            .map_err(|e| ConfigError::invalid("rule", e))?,
        None => Rule::Sum,
    };
    let rng_seed = flags.rng_seed.or(file.rng_seed).unwrap_or(0);
    let max_steps = flags
        .max_steps
        .or(file.max_steps)
        .unwrap_or(experiments::DEFAULT_MAX_STEPS);
    if max_steps == 0 {
        return Err(ConfigError::invalid("max-steps", "must be at least 1"));
    }
    let samples = flags
        .samples
        .or(file.samples)
        .unwrap_or(experiments::DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(ConfigError::invalid("samples", "must be at least 1"));
    }
    let param = match flags.param.or(file.param) {
        Some(s) => param_from_str(&s).ok_or_else(|| {
            ConfigError::invalid(
                "param",
                format!("'{s}' (expected seed-fraction, layers or edge-prob)"),
            )
        })?,
        None if command == Command::Compare => SweptParameter::SeedFraction,
        None if command == Command::Sweep => {
            return Err(ConfigError::invalid(
                "param",
                "sweep needs a swept parameter",
            ))
        }
        None => SweptParameter::SeedFraction,
    };
    if command == Command::Compare && param != SweptParameter::SeedFraction {
        return Err(ConfigError::invalid(
            "param",
            "compare sweeps the seed fraction",
        ));
    }
    let grid = flags.grid.or(file.grid);
    if let Some(g) = &grid {
        if g.is_empty() || g.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::invalid(
                "grid",
                "must be non-empty and strictly increasing",
            ));
        }
    }
    let steps = flags
        .steps
        .or(file.steps)
        .unwrap_or(experiments::DEFAULT_MAX_STEPS);

    Ok(RunConfig {
        command,
        nodes,
        layers,
        edge_prob,
        payoffs,
        seed_fraction,
        rule,
        rng_seed,
        max_steps,
        samples,
        param: if command == Command::Compare {
            SweptParameter::Rule
        } else {
            param
        },
        grid,
        steps,
        network: flags.network.or(file.network),
        output: flags.output.or(file.output),
    })
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Argument vector that parses back to this config.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec!["multicascade".to_string(), self.command.name().to_string()];
        let mut push = |flag: &str, value: String| {
            args.push(format!("--{flag}"));
            args.push(value);
        };
        push("nodes", self.nodes.to_string());
        push("layers", self.layers.to_string());
        push("edge-prob", self.edge_prob.to_string());
        push("payoff-a", join(self.payoffs.a()));
        push("payoff-b", join(self.payoffs.b()));
        push("seed-fraction", self.seed_fraction.to_string());
        push("rule", self.rule.name().to_string());
        push("rng-seed", self.rng_seed.to_string());
        push("max-steps", self.max_steps.to_string());
        push("samples", self.samples.to_string());
        push("param", param_to_str(self.param).to_string());
        if let Some(g) = &self.grid {
            push("grid", join(g));
        }
        push("steps", self.steps.to_string());
        if let Some(n) = &self.network {
            push("network", n.display().to_string());
        }
        if let Some(o) = &self.output {
            push("output", o.display().to_string());
        }
        args
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            nodes: self.nodes,
            layers: self.layers,
            edge_prob: self.edge_prob,
            payoffs: self.payoffs.clone(),
            q0: self.seed_fraction,
            rule: self.rule,
        }
    }

    fn gen_params(&self) -> GenParams {
        GenParams {
            nodes: self.nodes,
            layers: self.layers,
            edge_prob: self.edge_prob,
            rng_seed: derive_seed(self.rng_seed, 0, 0, purpose::NETWORK),
        }
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            base: self.scenario(),
            swept: self.param,
            grid: self
                .grid
                .clone()
                .unwrap_or_else(|| self.param.default_grid()),
            samples: self.samples,
            max_steps: self.max_steps,
            rng_seed: self.rng_seed,
        }
    }
}

/// Read the worker-thread cap from the environment; 0 or unset means auto.
pub fn thread_cap() -> Result<usize, ConfigError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| ConfigError::Invalid {
            flag: "config",
            message: format!("{THREADS_ENV}={v} is not a non-negative integer"),
        }),
        Err(_) => Ok(0),
    }
}

fn network_for(cfg: &RunConfig) -> crate::Result<MultiplexNetwork> {
    match &cfg.network {
        Some(path) => {
            let net = io::load_network(path)?;
            if net.nodes() != cfg.nodes || net.layers() != cfg.layers {
                return Err(Error::domain(format!(
                    "{} holds n={} l={}, but the config says n={} l={}",
                    path.display(),
                    net.nodes(),
                    net.layers(),
                    cfg.nodes,
                    cfg.layers
                )));
            }
            Ok(net)
        }
        None => generate_er_multiplex(&cfg.gen_params()),
    }
}

/// Produce the subcommand's output text.
pub fn render(cfg: &RunConfig) -> crate::Result<String> {
    match cfg.command {
        Command::Generate => Ok(io::write_edge_list(&network_for(cfg)?)),
        Command::Run => {
            let net = network_for(cfg)?;
            let seeds = select_seeds(
                cfg.nodes,
                cfg.seed_fraction,
                derive_seed(cfg.rng_seed, 0, 0, purpose::SEEDS),
            )?;
            let trace = run(
                &net,
                &seeds,
                &cfg.payoffs,
                cfg.rule,
                cfg.max_steps,
                derive_seed(cfg.rng_seed, 0, 0, purpose::RULE),
            )?;
            Ok(io::trace_csv(&trace))
        }
        Command::Analytic => {
            let ap = AnalyticParams::new(
                cfg.nodes,
                cfg.edge_prob,
                cfg.layers,
                cfg.payoffs.clone(),
                cfg.seed_fraction,
            )?;
            let q = recurrence_curve(&ap, cfg.steps)?;
            let bound = cascade_lower_bound(&ap, cfg.steps)?;
            io::analytic_csv(&q, &bound.values)
        }
        Command::Sweep | Command::Compare => {
            let results = experiments::sweep(&cfg.sweep_spec())?;
            Ok(io::sweep_csv(&results))
        }
    }
}

/// Run the subcommand and write its output.
pub fn execute(cfg: &RunConfig) -> crate::Result<()> {
    let text = render(cfg)?;
    io::emit(cfg.output.as_deref().map(Path::new), &text)
}
