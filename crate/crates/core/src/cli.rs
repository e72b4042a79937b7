//! The `qbench` command line.
//!
//! ```text
//! qbench validate <config.toml>
//! qbench run <config.toml> [--out DIR] [--seed N] [--reps N] [--jobs N] [--redact-timing]
//! qbench report <results-dir>
//! qbench list-modules [--json]
//! qbench qscore [--solver sa|brute|random] [--sizes 5-12] [--time-limit 60] [--threshold 0.2]
//! ```
//!
//! Exit status is 0 on success, 1 for usage or configuration errors and 2
//! when a run or module fails during execution.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::metrics::{q_score, QScoreConfig, ScoreStatistic};
use crate::pipeline::{report, run_manifest, RunConfig, RunManifest, Registry};
use crate::solvers::{BruteForce, QuboSolver, SimulatedAnnealer, UniformSampler};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

/// Environment variable naming the directory under which `run` writes.
pub const OUTPUT_ROOT_ENV: &str = "QBENCH_OUTPUT_ROOT";

#[derive(Debug, Parser)]
#[command(name = "qbench", version, about = "Application-centric quantum benchmarking pipelines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a run config without executing it.
    Validate { config: PathBuf },
    /// Execute every repetition and sweep point of a run config.
    Run {
        config: PathBuf,
        /// Output directory; defaults to `<output root>/<run_id>`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = OUTPUT_ROOT_ENV, default_value = "qbench-results")]
        output_root: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Zero wall-clock fields so files depend only on config and seed.
        #[arg(long)]
        redact_timing: bool,
    },
    /// Aggregate a results directory into per-category CSV tables.
    Report { dir: PathBuf },
    /// Show registered modules and their payload kinds.
    ListModules {
        #[arg(long)]
        json: bool,
    },
    /// Q-score scan on random MaxCut instances.
    Qscore {
        #[arg(long, value_enum, default_value_t = SolverChoice::Sa)]
        solver: SolverChoice,
        /// A range `5-12` or a list `5,8,11`.
        #[arg(long, default_value = "5-12", value_parser = parse_sizes)]
        sizes: Sizes,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        /// Per-instance solver budget in seconds.
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 0.2)]
        threshold: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        sweeps: usize,
        #[arg(long, default_value_t = 10)]
        reads: usize,
        /// Defaults to `mean` for the random solver and `best` otherwise.
        #[arg(long, value_enum)]
        statistic: Option<StatisticChoice>,
        /// Keep scanning past the first failing size.
        #[arg(long)]
        scan_all: bool,
        /// Write the per-size table here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverChoice {
    Sa,
    Brute,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticChoice {
    Best,
    Mean,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<usize>);

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let bad = || format!("`{s}` is not a size range like 5-12 or a list like 5,8,11");
    let sizes: Vec<usize> = match s.split_once('-') {
        Some((a, b)) => {
            let (a, b) = (a.trim().parse::<usize>().map_err(|_| bad())?, b.trim().parse::<usize>().map_err(|_| bad())?);
            (a..=b).collect()
        }
        None => s.split(',').map(|x| x.trim().parse::<usize>().map_err(|_| bad())).collect::<Result<_, _>>()?,
    };
    if sizes.is_empty() {
        return Err(bad());
    }
    Ok(Sizes(sizes))
}

/// Parse `args` (including the program name) and execute, writing to the
/// given streams. Returns the process exit status.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            code
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let registry = Registry::builtin();
    let w = |e: std::io::Error| e.to_string();
    match cli.command {
        Command::Validate { config } => {
            let cfg = RunConfig::load(&config).map_err(|e| e.to_string())?;
            let pipelines = cfg.validate(&registry).map_err(|e| e.to_string())?;
            let n = cfg.modules.len();
            writeln!(out, "valid, {n} module{}", if n == 1 { "" } else { "s" }).map_err(w)?;
            if pipelines.len() > 1 {
                writeln!(out, "{} runs planned", pipelines.len()).map_err(w)?;
            }
            Ok(EXIT_OK)
        }
        Command::Run { config, out: dir, output_root, seed, reps, jobs, redact_timing } => {
            let dir = match dir {
                Some(d) => d,
                None => output_root.join(RunConfig::load(&config).map_err(|e| e.to_string())?.run_id),
            };
            let manifest = RunManifest { config, output_dir: dir, repetitions: reps, seed, jobs, redact_timing };
            let outcome = run_manifest(&registry, &manifest).map_err(|e| e.to_string())?;
            for r in outcome.index.runs.iter().filter(|r| !r.succeeded) {
                writeln!(err, "{}: {}", r.run_id, r.failure.as_deref().unwrap_or("failed")).map_err(w)?;
            }
            writeln!(
                out,
                "{} runs, {} failed, results in {}",
                outcome.index.runs.len(),
                outcome.failures(),
                outcome.output_dir.display()
            )
            .map_err(w)?;
            Ok(if outcome.failures() > 0 { EXIT_FAILURE } else { EXIT_OK })
        }
        Command::Report { dir } => {
            let summary = report(&dir).map_err(|e| e.to_string())?;
            for (file, reason) in &summary.skipped {
                writeln!(err, "warning: skipped {file}: {reason}").map_err(w)?;
            }
            writeln!(out, "aggregated {} runs", summary.runs_read).map_err(w)?;
            for path in summary.tables.values() {
                writeln!(out, "wrote {}", path.display()).map_err(w)?;
            }
            Ok(EXIT_OK)
        }
        Command::ListModules { json } => {
            let list = registry.list();
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&list).expect("module list serializes")).map_err(w)?;
            } else {
                for m in list {
                    writeln!(out, "{:<18} {:>17} -> {:<17} {:<9} {}", m.name, m.input_kind, m.output_kind, format!("{:?}", m.tag), m.description)
                        .map_err(w)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Qscore {
            solver,
            sizes,
            instances,
            time_limit,
            threshold,
            seed,
            sweeps,
            reads,
            statistic,
            scan_all,
            csv,
        } => {
            if instances == 0 || !(time_limit > 0.0) {
                return Err("instances and time limit must be positive".into());
            }
            let s: Box<dyn QuboSolver> = match solver {
                SolverChoice::Sa => Box::new(SimulatedAnnealer::new(sweeps, reads)),
                SolverChoice::Brute => Box::new(BruteForce::default()),
                SolverChoice::Random => Box::new(UniformSampler { n_samples: 256 }),
            };
            let mut cfg = QScoreConfig::new(sizes.0);
            cfg.instances_per_size = instances;
            cfg.time_limit_s = Some(time_limit);
            cfg.threshold = threshold;
            cfg.seed = seed;
            cfg.scan_all = scan_all;
            cfg.statistic = match statistic {
                Some(StatisticChoice::Mean) => ScoreStatistic::Mean,
                Some(StatisticChoice::Best) => ScoreStatistic::Best,
                None if solver == SolverChoice::Random => ScoreStatistic::Mean,
                None => ScoreStatistic::Best,
            };
            let result = match q_score(s.as_ref(), &cfg) {
                Ok(r) => r,
                Err(e) => {
                    writeln!(err, "error: {e}").map_err(w)?;
                    return Ok(EXIT_FAILURE);
                }
            };
            writeln!(out, "{:>4} {:>10} {:>10} {:>10} {:>8}", "N", "C", "C_opt", "C_rand", "beta").map_err(w)?;
            for r in &result.per_size {
                writeln!(out, "{:>4} {:>10.3} {:>10.3} {:>10.3} {:>8.4}", r.n, r.c, r.c_opt, r.c_rand, r.beta).map_err(w)?;
            }
            match result.q_score {
                Some(n) => writeln!(out, "q_score = {n}"),
                None => writeln!(out, "q_score = none (beta below {threshold} at the smallest size)"),
            }
            .map_err(w)?;
            if let Some(path) = csv {
                std::fs::write(&path, result.to_csv()).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            Ok(EXIT_OK)
        }
    }
}
