//! Typed benchmark pipelines.
//!
//! A pipeline is an ordered list of modules. Execution runs every module's
//! preprocess in order, then every postprocess in reverse, threading one
//! [`PipelinePayload`] through all phases and collecting [`MetricRecord`]s.
//!
//! ```
//! use qbench::pipeline::{execute, validate_pipeline, ModuleConfig, PayloadKind, Registry};
//!
//! let registry = Registry::builtin();
//! let modules = vec![
//!     ModuleConfig::new("SetCover"),
//!     ModuleConfig::new("SetCoverQubo"),
//!     ModuleConfig::new("SimulatedAnnealer"),
//! ];
//! let pipeline = validate_pipeline(&registry, &modules, "demo", 7).unwrap();
//! let run = execute(&registry, &pipeline);
//! assert!(run.failure.is_none());
//! assert_eq!(run.final_payload.unwrap().kind(), PayloadKind::DomainSolution);
//! ```

mod builtin;
mod config;
mod registry;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Statevector};
use crate::hamiltonian::HamiltonianSpec;
use crate::problems::{DomainSolution, PortfolioInstance, ProblemGraph, SalbpInstance, SetCoverInstance};
use crate::qubo::QuboModel;
use crate::rng::derive_seed;
use crate::solvers::SampleSet;

pub use config::{
    expand_runs, load_index, read_run, report, run_manifest, IndexEntry, ManifestOutcome, ReportSummary, RunConfig,
    RunIndex, RunManifest, RunPlan,
};
pub use registry::{Module, ModuleContext, ModuleError, ModuleFactory, ModuleInfo, Registry};

pub type ParamMap = BTreeMap<String, serde_json::Value>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("pipeline empty")]
    Empty,
    #[error("unknown module `{0}`")]
    UnknownModule(String),
    #[error("interface mismatch at position {index}: expected {expected}, found {found}")]
    InterfaceMismatch { index: usize, expected: PayloadKind, found: PayloadKind },
    #[error("invalid parameters for `{module}`: {message}")]
    InvalidParams { module: String, message: String },
    #[error("unknown payload kind `{0}`")]
    UnknownKind(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

/// The closed set of data types that can flow between modules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PayloadKind {
    Nothing,
    ProblemGraph,
    PortfolioInstance,
    SalbpInstance,
    SetCoverInstance,
    Qubo,
    SampleSet,
    DomainSolution,
    Circuit,
    Statevector,
    HamiltonianSpec,
    MetricBundle,
}

impl PayloadKind {
    pub const ALL: &'static [PayloadKind] = &[
        PayloadKind::Nothing,
        PayloadKind::ProblemGraph,
        PayloadKind::PortfolioInstance,
        PayloadKind::SalbpInstance,
        PayloadKind::SetCoverInstance,
        PayloadKind::Qubo,
        PayloadKind::SampleSet,
        PayloadKind::DomainSolution,
        PayloadKind::Circuit,
        PayloadKind::Statevector,
        PayloadKind::HamiltonianSpec,
        PayloadKind::MetricBundle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PayloadKind::Nothing => "Nothing",
            PayloadKind::ProblemGraph => "ProblemGraph",
            PayloadKind::PortfolioInstance => "PortfolioInstance",
            PayloadKind::SalbpInstance => "SalbpInstance",
            PayloadKind::SetCoverInstance => "SetCoverInstance",
            PayloadKind::Qubo => "Qubo",
            PayloadKind::SampleSet => "SampleSet",
            PayloadKind::DomainSolution => "DomainSolution",
            PayloadKind::Circuit => "Circuit",
            PayloadKind::Statevector => "Statevector",
            PayloadKind::HamiltonianSpec => "HamiltonianSpec",
            PayloadKind::MetricBundle => "MetricBundle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data")]
pub enum PipelinePayload {
    Nothing,
    ProblemGraph(ProblemGraph),
    PortfolioInstance(PortfolioInstance),
    SalbpInstance(SalbpInstance),
    SetCoverInstance(SetCoverInstance),
    Qubo(QuboModel),
    SampleSet(SampleSet),
    DomainSolution(DomainSolution),
    Circuit(Circuit),
    Statevector(Statevector),
    HamiltonianSpec(HamiltonianSpec),
    MetricBundle(Vec<MetricRecord>),
}

impl PipelinePayload {
    pub fn kind(&self) -> PayloadKind {
        match self {
            PipelinePayload::Nothing => PayloadKind::Nothing,
            PipelinePayload::ProblemGraph(_) => PayloadKind::ProblemGraph,
            PipelinePayload::PortfolioInstance(_) => PayloadKind::PortfolioInstance,
            PipelinePayload::SalbpInstance(_) => PayloadKind::SalbpInstance,
            PipelinePayload::SetCoverInstance(_) => PayloadKind::SetCoverInstance,
            PipelinePayload::Qubo(_) => PayloadKind::Qubo,
            PipelinePayload::SampleSet(_) => PayloadKind::SampleSet,
            PipelinePayload::DomainSolution(_) => PayloadKind::DomainSolution,
            PipelinePayload::Circuit(_) => PayloadKind::Circuit,
            PipelinePayload::Statevector(_) => PayloadKind::Statevector,
            PipelinePayload::HamiltonianSpec(_) => PayloadKind::HamiltonianSpec,
            PipelinePayload::MetricBundle(_) => PayloadKind::MetricBundle,
        }
    }
}

impl fmt::Display for PayloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for PayloadKind {
    type Err = PipelineError;

    /// Accepts the variant name in any case, with or without `_`.
    fn from_str(s: &str) -> Result<Self> {
        let norm = |x: &str| x.replace('_', "").to_ascii_lowercase();
        let want = norm(s);
        PayloadKind::ALL
            .iter()
            .copied()
            .find(|k| norm(k.name()) == want)
            .ok_or_else(|| PipelineError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Capability {
    /// The module's output payload round-trips through the result file.
    Serializable,
    /// The module attaches plot-ready CSV artifacts.
    Visualizable,
}

/// Whether a module's wall time counts as quantum (device or simulator)
/// or classical time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeTag {
    Quantum,
    #[default]
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub name: String,
    pub params: ParamMap,
    pub input_kind: PayloadKind,
    pub output_kind: PayloadKind,
    pub capabilities: BTreeSet<Capability>,
    pub tag: TimeTag,
}

/// A module reference as written in a run config.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleConfig {
    pub name: String,
    #[serde(default)]
    pub params: ParamMap,
    /// Overrides the registry's default time tag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<TimeTag>,
}

impl ModuleConfig {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    pub fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipeline {
    pub run_id: String,
    pub seed: u64,
    pub modules: Vec<ModuleSpec>,
}

impl Pipeline {
    /// Seed handed to module `index`.
    pub fn module_seed(&self, index: usize) -> u64 {
        derive_seed(self.seed, index as u64)
    }
}

/// The pairwise interface rule: output of module `i` must equal input of
/// module `i + 1`.
pub fn check_interfaces(modules: &[ModuleSpec]) -> Result<()> {
    if modules.is_empty() {
        return Err(PipelineError::Empty);
    }
    for (i, w) in modules.windows(2).enumerate() {
        if w[0].output_kind != w[1].input_kind {
            return Err(PipelineError::InterfaceMismatch {
                index: i + 1,
                expected: w[1].input_kind,
                found: w[0].output_kind,
            });
        }
    }
    Ok(())
}

/// Resolve every module in `registry`, instantiate it once to check its
/// parameters, and check the interface chain.
pub fn validate_pipeline(registry: &Registry, modules: &[ModuleConfig], run_id: &str, seed: u64) -> Result<Pipeline> {
    if modules.is_empty() {
        return Err(PipelineError::Empty);
    }
    let specs = modules.iter().map(|m| registry.spec_for(m)).collect::<Result<Vec<_>>>()?;
    check_interfaces(&specs)?;
    Ok(Pipeline { run_id: run_id.to_string(), seed, modules: specs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Pre,
    Post,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Pre => "preprocess",
            Phase::Post => "postprocess",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricCategory {
    Hardware,
    Circuit,
    Resource,
    Performance,
    Complexity,
    Application,
}

impl MetricCategory {
    pub const ALL: [MetricCategory; 6] = [
        MetricCategory::Hardware,
        MetricCategory::Circuit,
        MetricCategory::Resource,
        MetricCategory::Performance,
        MetricCategory::Complexity,
        MetricCategory::Application,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MetricCategory::Hardware => "hardware",
            MetricCategory::Circuit => "circuit",
            MetricCategory::Resource => "resource",
            MetricCategory::Performance => "performance",
            MetricCategory::Complexity => "complexity",
            MetricCategory::Application => "application",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricValue {
    Number(f64),
    Text(String),
}

impl MetricValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            MetricValue::Number(x) => Some(*x),
            MetricValue::Text(_) => None,
        }
    }
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricValue::Number(x) => fmt::Display::fmt(x, f),
            MetricValue::Text(s) => f.pad(s),
        }
    }
}

impl From<f64> for MetricValue {
    fn from(x: f64) -> Self {
        MetricValue::Number(x)
    }
}

impl From<usize> for MetricValue {
    fn from(x: usize) -> Self {
        MetricValue::Number(x as f64)
    }
}

impl From<bool> for MetricValue {
    fn from(x: bool) -> Self {
        MetricValue::Number(if x { 1.0 } else { 0.0 })
    }
}

impl From<&str> for MetricValue {
    fn from(x: &str) -> Self {
        MetricValue::Text(x.to_string())
    }
}

impl From<String> for MetricValue {
    fn from(x: String) -> Self {
        MetricValue::Text(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub module: String,
    pub key: String,
    pub value: MetricValue,
    pub category: MetricCategory,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl MetricRecord {
    pub fn new(module: &str, key: &str, value: impl Into<MetricValue>, category: MetricCategory) -> Self {
        Self { module: module.into(), key: key.into(), value: value.into(), category, unit: None }
    }

    pub fn with_unit(mut self, unit: &str) -> Self {
        self.unit = Some(unit.into());
        self
    }

    fn is_timing(&self) -> bool {
        self.unit.as_deref() == Some("s")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WallTime {
    pub pre_s: f64,
    pub post_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEvent {
    pub index: usize,
    pub module: String,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleFailure {
    pub index: usize,
    pub module: String,
    pub phase: Phase,
    pub message: String,
}

impl fmt::Display for ModuleFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "module {} (`{}`) failed in {}: {}", self.index, self.module, self.phase, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRun {
    pub pipeline: Pipeline,
    /// Sweep parameters applied to this run, keyed `Module.param`.
    #[serde(default)]
    pub stamp: ParamMap,
    pub records: Vec<MetricRecord>,
    pub wall_times: Vec<WallTime>,
    pub total_s: f64,
    pub phase_trace: Vec<PhaseEvent>,
    pub failure: Option<ModuleFailure>,
    pub final_payload: Option<PipelinePayload>,
    /// Plot-ready CSV tables keyed `module.name`.
    #[serde(default)]
    pub artifacts: BTreeMap<String, String>,
}

impl BenchmarkRun {
    fn new(pipeline: &Pipeline) -> Self {
        Self {
            wall_times: vec![WallTime::default(); pipeline.modules.len()],
            pipeline: pipeline.clone(),
            stamp: ParamMap::new(),
            records: Vec::new(),
            total_s: 0.0,
            phase_trace: Vec::new(),
            failure: None,
            final_payload: None,
            artifacts: BTreeMap::new(),
        }
    }

    pub fn emit(&mut self, record: MetricRecord) {
        self.records.push(record);
    }

    /// Records with this module and key, in emission order.
    pub fn get(&self, module: &str, key: &str) -> Vec<&MetricRecord> {
        self.records.iter().filter(|r| r.module == module && r.key == key).collect()
    }

    /// Numeric value of the last record with this module and key.
    pub fn value(&self, module: &str, key: &str) -> Option<f64> {
        self.get(module, key).last().and_then(|r| r.value.as_f64())
    }

    pub fn by_category(&self, category: MetricCategory) -> Vec<&MetricRecord> {
        self.records.iter().filter(|r| r.category == category).collect()
    }

    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }

    /// Zero every wall-clock quantity so that repeated runs serialize
    /// identically.
    pub fn redact_timing(&mut self) {
        self.total_s = 0.0;
        self.wall_times.iter_mut().for_each(|w| *w = WallTime::default());
        redact_records(&mut self.records);
        if let Some(p) = &mut self.final_payload {
            p.redact_timing();
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| PipelineError::Config(format!("malformed result file: {e}")))
    }
}

fn redact_records(records: &mut [MetricRecord]) {
    for r in records.iter_mut().filter(|r| r.is_timing()) {
        r.value = MetricValue::Number(0.0);
    }
}

impl PipelinePayload {
    pub fn redact_timing(&mut self) {
        match self {
            PipelinePayload::SampleSet(s) => s.runtime_s = 0.0,
            PipelinePayload::MetricBundle(r) => redact_records(r),
            _ => {}
        }
    }
}

/// Options that apply to a whole execution.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExecOptions {
    pub redact_timing: bool,
}

/// Instantiate the pipeline's modules from `registry` and run them on an
/// empty initial payload.
pub fn execute(registry: &Registry, pipeline: &Pipeline) -> BenchmarkRun {
    execute_with(registry, pipeline, PipelinePayload::Nothing, ExecOptions::default())
}

pub fn execute_with(
    registry: &Registry,
    pipeline: &Pipeline,
    initial: PipelinePayload,
    opts: ExecOptions,
) -> BenchmarkRun {
    let mut modules = Vec::with_capacity(pipeline.modules.len());
    for (i, spec) in pipeline.modules.iter().enumerate() {
        match registry.instantiate(spec) {
            Ok(m) => modules.push(m),
            Err(e) => {
                let mut run = BenchmarkRun::new(pipeline);
                run.failure =
                    Some(ModuleFailure { index: i, module: spec.name.clone(), phase: Phase::Pre, message: e.to_string() });
                return run;
            }
        }
    }
    execute_modules(pipeline, modules, initial, opts)
}

/// Run already-instantiated modules (one per pipeline entry): preprocess
/// in order, then postprocess in reverse. The first failure aborts the run.
pub fn execute_modules(
    pipeline: &Pipeline,
    mut modules: Vec<Box<dyn Module>>,
    initial: PipelinePayload,
    opts: ExecOptions,
) -> BenchmarkRun {
    assert_eq!(modules.len(), pipeline.modules.len(), "one module instance per pipeline entry");
    let start = Instant::now();
    let mut run = BenchmarkRun::new(pipeline);
    let k = modules.len();
    let order = (0..k).map(|i| (i, Phase::Pre)).chain((0..k).rev().map(|i| (i, Phase::Post)));
    let mut payload = initial;
    for (i, phase) in order {
        let spec = &pipeline.modules[i];
        let mut ctx = ModuleContext::new(spec, i, pipeline.module_seed(i), phase, opts.redact_timing);
        run.phase_trace.push(PhaseEvent { index: i, module: spec.name.clone(), phase });
        let t0 = Instant::now();
        let result = match phase {
            Phase::Pre => modules[i].preprocess(payload, &mut ctx),
            Phase::Post => modules[i].postprocess(payload, &mut ctx),
        };
        let dt = t0.elapsed().as_secs_f64();
        match phase {
            Phase::Pre => run.wall_times[i].pre_s = dt,
            Phase::Post => run.wall_times[i].post_s = dt,
        }
        let (records, artifacts) = ctx.finish();
        run.records.extend(records);
        run.artifacts.extend(artifacts);
        let result = result.and_then(|p| {
            if phase == Phase::Pre && p.kind() != spec.output_kind {
                Err(ModuleError::new(format!("produced {} but declares {}", p.kind(), spec.output_kind)))
            } else {
                Ok(p)
            }
        });
        match result {
            Ok(p) => payload = p,
            Err(e) => {
                run.failure = Some(ModuleFailure { index: i, module: spec.name.clone(), phase, message: e.to_string() });
                run.total_s = start.elapsed().as_secs_f64();
                if opts.redact_timing {
                    run.redact_timing();
                }
                return run;
            }
        }
    }
    run.final_payload = Some(payload);
    for (spec, w) in pipeline.modules.iter().zip(&run.wall_times) {
        run.records.push(
            MetricRecord::new(&spec.name, "wall_time_s", w.pre_s + w.post_s, MetricCategory::Resource).with_unit("s"),
        );
    }
    run.total_s = start.elapsed().as_secs_f64();
    if opts.redact_timing {
        run.redact_timing();
    }
    run
}
