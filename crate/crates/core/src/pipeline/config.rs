use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    execute_with, validate_pipeline, BenchmarkRun, ExecOptions, MetricCategory, ModuleConfig, ParamMap, Pipeline,
    PipelineError, PipelinePayload, Registry, Result,
};
use crate::rng::derive_seed;

fn io_err(path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Io(format!("{}: {e}", path.display()))
}

fn default_run_id() -> String {
    "run".into()
}

fn one() -> usize {
    1
}

/// A declarative run description, read from TOML:
///
/// ```toml
/// run_id = "setcover"
/// seed = 7
/// repetitions = 3
///
/// [[modules]]
/// name = "SetCover"
/// params = { universe_size = 6, n_subsets = 6 }
///
/// [[modules]]
/// name = "SetCoverQubo"
///
/// [[modules]]
/// name = "SimulatedAnnealer"
/// params = { sweeps = 200 }
///
/// [sweep]
/// "SimulatedAnnealer.sweeps" = [100, 1000]
/// ```
///
/// Sweep keys address a parameter as `Module.param` (every module with that
/// name) or `index.param` (the module at that position). The sweep expands
/// as the cross-product of all listed values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_run_id")]
    pub run_id: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub modules: Vec<ModuleConfig>,
    #[serde(default)]
    pub sweep: BTreeMap<String, Vec<serde_json::Value>>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::from_toml(&text)
    }

    /// Validate every expanded run without executing anything.
    pub fn validate(&self, registry: &Registry) -> Result<Vec<Pipeline>> {
        expand_runs(self)?.iter().map(|p| p.pipeline(registry)).collect()
    }
}

/// One concrete run after sweep expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub run_id: String,
    pub repetition: usize,
    pub seed: u64,
    /// Sweep values applied to this run.
    pub stamp: ParamMap,
    pub modules: Vec<ModuleConfig>,
}

impl RunPlan {
    pub fn pipeline(&self, registry: &Registry) -> Result<Pipeline> {
        validate_pipeline(registry, &self.modules, &self.run_id, self.seed)
    }
}

enum Target {
    Name(String),
    Index(usize),
}

fn parse_sweep_key(key: &str, modules: &[ModuleConfig]) -> Result<(Target, String)> {
    let (head, param) = key
        .split_once('.')
        .filter(|(h, p)| !h.is_empty() && !p.is_empty())
        .ok_or_else(|| PipelineError::Config(format!("sweep key `{key}` must look like Module.param")))?;
    let target = match head.parse::<usize>() {
        Ok(i) if i < modules.len() => Target::Index(i),
        Ok(i) => return Err(PipelineError::Config(format!("sweep key `{key}`: no module at position {i}"))),
        Err(_) if modules.iter().any(|m| m.name == head) => Target::Name(head.to_string()),
        Err(_) => return Err(PipelineError::Config(format!("sweep key `{key}`: no module named `{head}`"))),
    };
    Ok((target, param.to_string()))
}

/// Expand repetitions and sweep points into concrete runs.
///
/// Repetition `r` is seeded with `derive_seed(config.seed, r)` at every
/// sweep point, so sweep values are compared on paired seeds.
pub fn expand_runs(config: &RunConfig) -> Result<Vec<RunPlan>> {
    if config.repetitions == 0 {
        return Err(PipelineError::Config("repetitions must be at least 1".into()));
    }
    let axes = config
        .sweep
        .iter()
        .map(|(key, values)| {
            if values.is_empty() {
                return Err(PipelineError::Config(format!("sweep key `{key}` has no values")));
            }
            Ok((key.clone(), parse_sweep_key(key, &config.modules)?, values.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let n_points: usize = axes.iter().map(|(_, _, v)| v.len()).product();
    let mut plans = Vec::with_capacity(n_points * config.repetitions);
    for point in 0..n_points {
        let mut modules = config.modules.clone();
        let mut stamp = ParamMap::new();
        let mut rest = point;
        for (key, (target, param), values) in axes.iter().rev() {
            let value = &values[rest % values.len()];
            rest /= values.len();
            stamp.insert(key.clone(), value.clone());
            for (i, m) in modules.iter_mut().enumerate() {
                let hit = match target {
                    Target::Name(n) => &m.name == n,
                    Target::Index(j) => *j == i,
                };
                if hit {
                    m.params.insert(param.clone(), value.clone());
                }
            }
        }
        for rep in 0..config.repetitions {
            let run_id = if n_points > 1 {
                format!("{}-p{point:03}-r{rep:03}", config.run_id)
            } else {
                format!("{}-r{rep:03}", config.run_id)
            };
            plans.push(RunPlan {
                run_id,
                repetition: rep,
                seed: derive_seed(config.seed, rep as u64),
                stamp: stamp.clone(),
                modules: modules.clone(),
            });
        }
    }
    Ok(plans)
}

/// What to execute and where to put the results.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: PathBuf,
    pub output_dir: PathBuf,
    /// Overrides the config's repetition count.
    pub repetitions: Option<usize>,
    /// Overrides the config's global seed.
    pub seed: Option<u64>,
    /// Worker threads; runs beyond this many wait.
    pub jobs: usize,
    /// Zero wall-clock fields so result files depend only on config and seed.
    pub redact_timing: bool,
}

impl RunManifest {
    pub fn new(config: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self { config: config.into(), output_dir: output_dir.into(), repetitions: None, seed: None, jobs: 1, redact_timing: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == Some(0) {
            return Err(PipelineError::Config("repetitions must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(PipelineError::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub run_id: String,
    pub file: String,
    pub seed: u64,
    pub repetition: usize,
    pub stamp: ParamMap,
    pub succeeded: bool,
    pub failure: Option<String>,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunIndex {
    pub run_id: String,
    pub seed: u64,
    pub repetitions: usize,
    pub runs: Vec<IndexEntry>,
}

pub const INDEX_FILE: &str = "index.json";

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestOutcome {
    pub index: RunIndex,
    pub output_dir: PathBuf,
}

impl ManifestOutcome {
    pub fn failures(&self) -> usize {
        self.index.runs.iter().filter(|r| !r.succeeded).count()
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Validate every run, then execute them on `jobs` workers. Each run writes
/// its own result file and artifacts; the index is written once at the end.
/// Module failures are recorded in the run, not returned as errors.
pub fn run_manifest(registry: &Registry, manifest: &RunManifest) -> Result<ManifestOutcome> {
    manifest.validate()?;
    let mut config = RunConfig::load(&manifest.config)?;
    if let Some(r) = manifest.repetitions {
        config.repetitions = r;
    }
    if let Some(s) = manifest.seed {
        config.seed = s;
    }
    let plans = expand_runs(&config)?;
    let pipelines = plans.iter().map(|p| p.pipeline(registry)).collect::<Result<Vec<_>>>()?;
    let dir = &manifest.output_dir;
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(manifest.jobs)
        .build()
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let opts = ExecOptions { redact_timing: manifest.redact_timing };
    let entries = pool.install(|| {
        plans
            .par_iter()
            .zip(pipelines.par_iter())
            .map(|(plan, pipeline)| {
                let mut run = execute_with(registry, pipeline, PipelinePayload::Nothing, opts);
                run.stamp = plan.stamp.clone();
                let file = format!("{}.json", plan.run_id);
                write(&dir.join(&file), &run.to_json())?;
                let mut artifacts = Vec::new();
                for (name, csv) in &run.artifacts {
                    let f = format!("{}.{name}.csv", plan.run_id);
                    write(&dir.join(&f), csv)?;
                    artifacts.push(f);
                }
                Ok(IndexEntry {
                    run_id: plan.run_id.clone(),
                    file,
                    seed: plan.seed,
                    repetition: plan.repetition,
                    stamp: plan.stamp.clone(),
                    succeeded: run.succeeded(),
                    failure: run.failure.as_ref().map(|f| f.to_string()),
                    artifacts,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let index = RunIndex { run_id: config.run_id.clone(), seed: config.seed, repetitions: config.repetitions, runs: entries };
    let text = serde_json::to_string_pretty(&index).expect("index serializes");
    write(&dir.join(INDEX_FILE), &text)?;
    Ok(ManifestOutcome { index, output_dir: dir.clone() })
}

pub fn load_index(dir: &Path) -> Result<RunIndex> {
    let path = dir.join(INDEX_FILE);
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))
}

pub fn read_run(path: &Path) -> Result<BenchmarkRun> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    BenchmarkRun::from_json(&text).map_err(|e| io_err(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportSummary {
    /// Result files that were aggregated.
    pub runs_read: usize,
    /// Files that were missing or unreadable, with the reason.
    pub skipped: Vec<(String, String)>,
    /// Written tables keyed by metric category.
    pub tables: BTreeMap<MetricCategory, PathBuf>,
}

#[derive(Default)]
struct Agg {
    count: usize,
    sum: f64,
    min: f64,
    max: f64,
}

impl Agg {
    fn add(&mut self, x: f64) {
        if self.count == 0 {
            self.min = x;
            self.max = x;
        } else {
            self.min = self.min.min(x);
            self.max = self.max.max(x);
        }
        self.count += 1;
        self.sum += x;
    }
}

fn stamp_label(stamp: &ParamMap) -> String {
    stamp.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

/// Aggregate numeric records over repetitions into one CSV per metric
/// category (`report_<category>.csv`) with columns
/// `stamp,module,key,unit,count,mean,min,max`. Unreadable result files are
/// skipped and listed in the summary.
pub fn report(dir: &Path) -> Result<ReportSummary> {
    let index = load_index(dir)?;
    type Key = (String, String, String, String);
    let mut groups: BTreeMap<MetricCategory, BTreeMap<Key, Agg>> = BTreeMap::new();
    let mut skipped = Vec::new();
    let mut runs_read = 0;
    for entry in &index.runs {
        let run = match read_run(&dir.join(&entry.file)) {
            Ok(r) => r,
            Err(e) => {
                skipped.push((entry.file.clone(), e.to_string()));
                continue;
            }
        };
        runs_read += 1;
        let stamp = stamp_label(&run.stamp);
        for r in &run.records {
            if let Some(x) = r.value.as_f64() {
                let key = (stamp.clone(), r.module.clone(), r.key.clone(), r.unit.clone().unwrap_or_default());
                groups.entry(r.category).or_default().entry(key).or_default().add(x);
            }
        }
    }
    let mut tables = BTreeMap::new();
    for (category, rows) in groups {
        let path = dir.join(format!("report_{}.csv", category.name()));
        let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
        let mut put = |fields: &[String]| w.write_record(fields).map_err(|e| io_err(&path, e));
        put(&["stamp", "module", "key", "unit", "count", "mean", "min", "max"].map(String::from))?;
        for ((stamp, module, key, unit), a) in rows {
            put(&[
                stamp,
                module,
                key,
                unit,
                a.count.to_string(),
                (a.sum / a.count as f64).to_string(),
                a.min.to_string(),
                a.max.to_string(),
            ])?;
        }
        w.flush().map_err(|e| io_err(&path, e))?;
        tables.insert(category, path);
    }
    Ok(ReportSummary { runs_read, skipped, tables })
}
