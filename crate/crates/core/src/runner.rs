//! Headless runs: one episode driven by a simulated designer, written to an
//! output directory.
//!
//! Artifacts:
//!
//! * `problem.json`: the instance that was searched;
//! * `episode.ndjson` / `episode.csv`: the episode log;
//! * `fitness_curve.csv`: best-so-far metrics per iteration;
//! * `best_solution.json`: the best design found, with its metrics.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Parser;
use serde::Serialize;
use thiserror::Error;

use crate::aco::AcoParams;
use crate::fitness::{MetricVector, WeightVector};
use crate::log::LogError;
use crate::problem::{generate_problem, parse_problem, serialize_problem, DesignProblem, ProblemError, ProblemScale, SolutionDocument};
use crate::service::ParamOverrides;
use crate::session::{Persona, Session, SessionConfig, SessionError, SimulatedDesigner, DEFAULT_MAX_ITERATIONS};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemInput {
    File(PathBuf),
    /// Generated with the run seed.
    Generate(ProblemScale),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemInput,
    pub params: AcoParams,
    pub persona: Persona,
    pub seed: u64,
    pub max_iterations: usize,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn new(problem: ProblemInput, seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            problem,
            params: AcoParams::default(),
            persona: Persona::new(WeightVector::INITIAL, 0.0),
            seed,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            out_dir: out_dir.into(),
        }
    }
}

/// Command-line flags of the `antdesign` binary.
#[derive(Debug, Parser)]
#[command(name = "antdesign", version, about = "Interactive ant colony search for class design")]
pub struct CliArgs {
    /// Instance document to search.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["generate", "serve"])]
    pub problem: Option<PathBuf>,
    /// Generate an instance with `attributes,methods,uses,classes`.
    #[arg(long, value_name = "A,M,U,C", conflicts_with = "serve")]
    pub generate: Option<ProblemScale>,
    /// Master seed (required for headless runs).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Iteration cap.
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub iterations: usize,
    /// Simulated designer: `cbo,nac,atmr[,noise]` weights (normalized).
    #[arg(long, value_name = "W_CBO,W_NAC,W_ATMR[,NOISE]")]
    pub persona: Option<String>,
    #[arg(long)]
    pub ants: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Serve the session API on this address instead of running headless.
    #[arg(long, value_name = "ADDR")]
    pub serve: Option<String>,
}

pub fn parse_persona(text: &str) -> Result<Persona, RunError> {
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| RunError::Config(format!("persona `{v}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let (w, noise) = match *values.as_slice() {
        [c, n, a] => ([c, n, a], 0.0),
        [c, n, a, noise] => ([c, n, a], noise),
        _ => return Err(RunError::Config(format!("persona needs 3 or 4 values, got `{text}`"))),
    };
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(RunError::Config(format!("persona noise {noise} must be a non-negative number")));
    }
    let weights = WeightVector::normalized(w[0], w[1], w[2]).map_err(|e| RunError::Config(e.to_string()))?;
    Ok(Persona::new(weights, noise))
}

impl CliArgs {
    pub fn to_run_config(&self) -> Result<RunConfig, RunError> {
        let problem = match (&self.problem, self.generate) {
            (Some(path), None) => ProblemInput::File(path.clone()),
            (None, Some(scale)) => ProblemInput::Generate(scale),
            _ => return Err(RunError::Config("exactly one of --problem or --generate is required".into())),
        };
        let seed = self.seed.ok_or_else(|| RunError::Config("--seed is required for headless runs".into()))?;
        let overrides = ParamOverrides {
            colony_size: self.ants,
            alpha: self.alpha,
            mu: self.mu,
            sigma: self.sigma,
            t_min: self.tmin,
            t_max: self.tmax,
        };
        let persona = match &self.persona {
            Some(text) => parse_persona(text)?,
            None => Persona::new(WeightVector::INITIAL, 0.0),
        };
        Ok(RunConfig {
            problem,
            params: overrides.apply(AcoParams::default()),
            persona,
            seed,
            max_iterations: self.iterations,
            out_dir: self.out.clone(),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BestSolutionDocument {
    pub run_id: String,
    pub iteration: usize,
    pub metrics: MetricVector,
    pub quality: f64,
    pub weights: WeightVector,
    pub solution: SolutionDocument,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub run_id: String,
    pub iterations: usize,
    pub interactions: usize,
    pub best: MetricVector,
    pub best_quality: f64,
    pub weights: WeightVector,
    pub artifacts: Vec<PathBuf>,
}

fn load_problem(input: &ProblemInput, seed: u64) -> Result<DesignProblem, RunError> {
    match input {
        ProblemInput::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| RunError::Read { path: path.clone(), source })?;
            Ok(parse_problem(&text)?)
        }
        ProblemInput::Generate(scale) => Ok(generate_problem(*scale, seed)?),
    }
}

fn write(path: &Path, contents: &str) -> Result<PathBuf, RunError> {
    std::fs::write(path, contents).map_err(|source| RunError::Write { path: path.to_path_buf(), source })?;
    Ok(path.to_path_buf())
}

/// Seed of the simulated designer, derived from the run seed.
pub fn designer_seed(seed: u64) -> u64 {
    seed.rotate_left(17) ^ 0x9e37_79b9_7f4a_7c15
}

/// Runs one headless episode. Nothing is written unless the run completes.
pub fn run(config: &RunConfig) -> Result<RunSummary, RunError> {
    let problem = Arc::new(load_problem(&config.problem, config.seed)?);
    config.params.validate().map_err(|e| RunError::Config(e.to_string()))?;
    if config.max_iterations == 0 {
        return Err(RunError::Config("iteration cap must be at least 1".into()));
    }
    let session_config = SessionConfig {
        params: config.params,
        seed: config.seed,
        max_iterations: Some(config.max_iterations),
        parallel: true,
    };
    let mut session = Session::new(problem.clone(), session_config, None)?;
    let mut designer = SimulatedDesigner::new(config.persona, designer_seed(config.seed));
    session.run(&mut designer)?;

    let best = session.colony().best_so_far().cloned().expect("at least one iteration ran");
    let weights = session.weights();
    let log = session.log();
    let best_doc = BestSolutionDocument {
        run_id: session.run_id().to_string(),
        iteration: best.iteration,
        metrics: best.metrics,
        quality: session.colony().best_quality(&weights),
        weights,
        solution: best.solution.to_document(&problem),
    };
    let episode_csv = log.to_csv()?;
    let curve_csv = log.fitness_curve_csv()?;
    let mut best_json = serde_json::to_string_pretty(&best_doc).expect("serializable");
    best_json.push('\n');

    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|source| RunError::Write { path: dir.clone(), source })?;
    let artifacts = vec![
        write(&dir.join("problem.json"), &serialize_problem(&problem))?,
        write(&dir.join("episode.ndjson"), &log.to_ndjson())?,
        write(&dir.join("episode.csv"), &episode_csv)?,
        write(&dir.join("fitness_curve.csv"), &curve_csv)?,
        write(&dir.join("best_solution.json"), &best_json)?,
    ];
    Ok(RunSummary {
        run_id: session.run_id().to_string(),
        iterations: session.iteration(),
        interactions: session.interactions(),
        best: best.metrics,
        best_quality: best_doc.quality,
        weights,
        artifacts,
    })
}
