//! Run configuration: command-line flags merged over a `key=value` file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::geometry::LevelSetDomain;
use crate::solvers::Scheme;
use crate::verify::{DtRule, EvolutionParams, LADDER};

#[derive(Debug, Parser)]
#[command(name = "meshfree", version, about = "Meshfree finite-difference solvers with electric boundary conditions")]
pub struct Cli {
    /// Flat `key=value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a point cloud and write it in the text cloud format.
    Cloud(Flags),
    /// Solve the manufactured vector Poisson problem on one cloud.
    Vpe(Flags),
    /// Run the manufactured vector heat problem on one cloud.
    Vhe(Flags),
    /// Run the manufactured Navier-Stokes problem on one cloud.
    Nse(Flags),
    /// Error ladder with fitted convergence slopes.
    Convergence {
        problem: ProblemKind,
        #[command(flatten)]
        flags: Flags,
    },
    /// Lid-driven cavity compared against centerline reference data.
    Cavity(Flags),
    /// Forward-Euler stability constant on every ladder level.
    Stability(Flags),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProblemKind {
    Vpe,
    Vhe,
    Nse,
}

#[derive(Clone, Debug, Default, Args)]
pub struct Flags {
    /// paper, square or disk.
    #[arg(long)]
    pub domain: Option<String>,
    /// Number of cloud points.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated point counts.
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<usize>>,
    /// Stencil consistency order.
    #[arg(long)]
    pub order: Option<usize>,
    /// forward-euler, backward-euler, imex1 or imex2.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Implicit viscosity switch of imex1 (0 or 1).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Time step: `c*h^2/nu`, `c*h` or an absolute value.
    #[arg(long)]
    pub dt: Option<String>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Final time.
    #[arg(long = "T")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (directory for cavity).
    #[arg(short = 'o', long)]
    pub out: Option<PathBuf>,
    /// Reference data file for the cavity comparison.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Threads for ladder levels (0: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Configuration problems are usage errors.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Reads a flat `key=value` file. Blank lines and lines starting with `#`
/// are skipped.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, UsageError> {
    let mut map = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("config line {}: expected key=value", k + 1)))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, UsageError> {
    value.parse().map_err(|_| UsageError(format!("invalid value `{value}` for `{key}`")))
}

impl Flags {
    /// Fills every flag that was not given on the command line from `file`.
    pub fn merge_file(&mut self, file: &BTreeMap<String, String>) -> Result<(), UsageError> {
        for (key, value) in file {
            match key.as_str() {
                "domain" => fill(&mut self.domain, || Ok(value.clone()))?,
                "n" => fill(&mut self.n, || parse_value(key, value))?,
                "ladder" => fill(&mut self.ladder, || {
                    value.split(',').map(|s| parse_value(key, s.trim())).collect()
                })?,
                "order" => fill(&mut self.order, || parse_value(key, value))?,
                "scheme" => fill(&mut self.scheme, || Ok(value.clone()))?,
                "theta" => fill(&mut self.theta, || parse_value(key, value))?,
                "dt" => fill(&mut self.dt, || Ok(value.clone()))?,
                "nu" => fill(&mut self.nu, || parse_value(key, value))?,
                "lambda" => fill(&mut self.lambda, || parse_value(key, value))?,
                "T" | "t" => fill(&mut self.t_end, || parse_value(key, value))?,
                "seed" => fill(&mut self.seed, || parse_value(key, value))?,
                "out" => fill(&mut self.out, || Ok(PathBuf::from(value)))?,
                "reference" => fill(&mut self.reference, || Ok(PathBuf::from(value)))?,
                "workers" => fill(&mut self.workers, || parse_value(key, value))?,
                other => return Err(UsageError(format!("unknown config key `{other}`"))),
            }
        }
        Ok(())
    }
}

fn fill<T>(slot: &mut Option<T>, value: impl FnOnce() -> Result<T, UsageError>) -> Result<(), UsageError> {
    if slot.is_none() {
        *slot = Some(value()?);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Cloud,
    Vpe,
    Vhe,
    Nse,
    Convergence(ProblemKind),
    Cavity,
    Stability,
}

/// Fully resolved run parameters.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub task: Task,
    pub domain: LevelSetDomain,
    pub n: usize,
    pub ladder: Vec<usize>,
    pub order: usize,
    pub scheme: Scheme,
    pub theta: f64,
    pub dt: DtRule,
    pub nu: f64,
    pub lambda: f64,
    pub t_end: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub reference: PathBuf,
    pub workers: usize,
}

/// Bundled centerline reference tables.
pub fn default_reference() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("ghia_re100.txt")
}

fn default_dt(task: Task, scheme: Scheme) -> DtRule {
    match (task, scheme) {
        (_, Scheme::ForwardEuler) => DtRule::Diffusive(0.2),
        (_, Scheme::BackwardEuler) => DtRule::Linear(100.0),
        (Task::Nse | Task::Convergence(ProblemKind::Nse), _) => DtRule::Linear(0.2),
        _ => DtRule::Linear(1.0),
    }
}

impl RunConfig {
    pub fn resolve(task: Task, f: Flags) -> Result<Self, UsageError> {
        let cavity = task == Task::Cavity;
        let domain_name = f.domain.unwrap_or_else(|| if cavity { "square" } else { "paper" }.to_string());
        let domain = LevelSetDomain::by_name(&domain_name).map_err(|e| UsageError(e.to_string()))?;
        if cavity && domain_name != "square" {
            return Err(UsageError("the cavity runs on the square domain".into()));
        }
        let default_scheme = match task {
            Task::Cavity => Scheme::ForwardEuler,
            _ => Scheme::Imex2,
        };
        let scheme = match f.scheme {
            Some(s) => s.parse().map_err(|e: crate::Error| UsageError(e.to_string()))?,
            None => default_scheme,
        };
        let dt = match f.dt {
            Some(s) => s.parse().map_err(|e: crate::Error| UsageError(e.to_string()))?,
            None => default_dt(task, scheme),
        };
        let ladder = f.ladder.unwrap_or_else(|| LADDER.to_vec());
        if ladder.is_empty() {
            return Err(UsageError("empty ladder".into()));
        }
        let order = f.order.unwrap_or(2);
        if !(1..=6).contains(&order) {
            return Err(UsageError(format!("order must be between 1 and 6, got {order}")));
        }
        let cfg = RunConfig {
            task,
            domain,
            n: f.n.unwrap_or(if cavity { 4000 } else { 1000 }),
            ladder,
            order,
            scheme,
            theta: f.theta.unwrap_or(1.0),
            dt,
            nu: f.nu.unwrap_or(if cavity { 0.01 } else { 1.0 }),
            lambda: f.lambda.unwrap_or(if cavity { 100.0 } else { 30.0 }),
            t_end: f.t_end.unwrap_or(if cavity { 20.0 } else { 1.0 }),
            seed: f.seed.unwrap_or(7),
            out: f.out,
            reference: f.reference.unwrap_or_else(default_reference),
            workers: f.workers.unwrap_or(0),
        };
        if !(cfg.nu > 0.0) {
            return Err(UsageError(format!("nu must be positive, got {}", cfg.nu)));
        }
        if !(cfg.lambda >= 0.0) {
            return Err(UsageError(format!("lambda must be non-negative, got {}", cfg.lambda)));
        }
        if !(cfg.t_end > 0.0) {
            return Err(UsageError(format!("T must be positive, got {}", cfg.t_end)));
        }
        if cfg.theta != 0.0 && cfg.theta != 1.0 {
            return Err(UsageError(format!("theta must be 0 or 1, got {}", cfg.theta)));
        }
        Ok(cfg)
    }

    pub fn evolution(&self) -> EvolutionParams {
        EvolutionParams {
            scheme: self.scheme,
            theta: self.theta,
            dt: self.dt,
            nu: self.nu,
            lambda: self.lambda,
            t_end: self.t_end,
        }
    }
}
