use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{
    Capability, MetricCategory, MetricRecord, MetricValue, ModuleConfig, ModuleSpec, ParamMap, PayloadKind, Phase,
    PipelineError, PipelinePayload, Result, TimeTag,
};

/// Failure message raised by a module phase.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleError(pub String);

impl ModuleError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for ModuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for ModuleError {
    fn from(e: E) -> Self {
        Self(e.to_string())
    }
}

/// Per-phase view handed to a module: its identity, its seed, and a sink
/// for metrics and artifacts.
pub struct ModuleContext {
    module: String,
    index: usize,
    seed: u64,
    phase: Phase,
    redact_timing: bool,
    records: Vec<MetricRecord>,
    artifacts: BTreeMap<String, String>,
}

impl ModuleContext {
    pub(crate) fn new(spec: &ModuleSpec, index: usize, seed: u64, phase: Phase, redact_timing: bool) -> Self {
        Self {
            module: spec.name.clone(),
            index,
            seed,
            phase,
            redact_timing,
            records: Vec::new(),
            artifacts: BTreeMap::new(),
        }
    }

    /// A context outside any pipeline, for driving a module by hand.
    pub fn standalone(module: &str, seed: u64, phase: Phase) -> Self {
        Self {
            module: module.into(),
            index: 0,
            seed,
            phase,
            redact_timing: false,
            records: Vec::new(),
            artifacts: BTreeMap::new(),
        }
    }

    pub fn module(&self) -> &str {
        &self.module
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn redact_timing(&self) -> bool {
        self.redact_timing
    }

    pub fn emit(&mut self, key: &str, value: impl Into<MetricValue>, category: MetricCategory) {
        let r = MetricRecord::new(&self.module, key, value, category);
        self.records.push(r);
    }

    /// Emit a duration in seconds; zeroed when timing is redacted.
    pub fn emit_seconds(&mut self, key: &str, seconds: f64, category: MetricCategory) {
        let v = if self.redact_timing { 0.0 } else { seconds };
        let r = MetricRecord::new(&self.module, key, v, category).with_unit("s");
        self.records.push(r);
    }

    pub fn records(&self) -> &[MetricRecord] {
        &self.records
    }

    /// Attach a plot-ready table under `name`.
    pub fn attach(&mut self, name: &str, csv: String) {
        self.artifacts.insert(format!("{}.{name}", self.module), csv);
    }

    pub(crate) fn finish(self) -> (Vec<MetricRecord>, BTreeMap<String, String>) {
        (self.records, self.artifacts)
    }
}

/// A pipeline stage. Preprocess maps the forward payload; postprocess maps
/// the returning payload and defaults to passing it through.
pub trait Module: Send {
    fn input_kind(&self) -> PayloadKind;
    fn output_kind(&self) -> PayloadKind;

    fn preprocess(
        &mut self,
        input: PipelinePayload,
        ctx: &mut ModuleContext,
    ) -> std::result::Result<PipelinePayload, ModuleError>;

    fn postprocess(
        &mut self,
        input: PipelinePayload,
        _ctx: &mut ModuleContext,
    ) -> std::result::Result<PipelinePayload, ModuleError> {
        Ok(input)
    }
}

pub type ModuleFactory = Arc<dyn Fn(&ParamMap) -> std::result::Result<Box<dyn Module>, String> + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuleInfo {
    pub name: String,
    pub description: String,
    /// Kinds with default parameters.
    pub input_kind: PayloadKind,
    pub output_kind: PayloadKind,
    pub capabilities: BTreeSet<Capability>,
    pub tag: TimeTag,
}

struct Entry {
    description: String,
    capabilities: BTreeSet<Capability>,
    tag: TimeTag,
    factory: ModuleFactory,
}

/// Named module factories. Names are unique; registering an existing name
/// replaces it.
#[derive(Default)]
pub struct Registry {
    entries: BTreeMap<String, Entry>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every module shipped with the crate.
    pub fn builtin() -> Self {
        let mut r = Self::new();
        super::builtin::register_all(&mut r);
        r
    }

    pub fn register<F>(&mut self, name: &str, description: &str, capabilities: &[Capability], tag: TimeTag, factory: F)
    where
        F: Fn(&ParamMap) -> std::result::Result<Box<dyn Module>, String> + Send + Sync + 'static,
    {
        self.entries.insert(
            name.to_string(),
            Entry {
                description: description.to_string(),
                capabilities: capabilities.iter().copied().collect(),
                tag,
                factory: Arc::new(factory),
            },
        );
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    pub fn list(&self) -> Vec<ModuleInfo> {
        self.entries
            .iter()
            .map(|(name, e)| {
                let (input_kind, output_kind) = match (e.factory)(&ParamMap::new()) {
                    Ok(m) => (m.input_kind(), m.output_kind()),
                    Err(_) => (PayloadKind::Nothing, PayloadKind::Nothing),
                };
                ModuleInfo {
                    name: name.clone(),
                    description: e.description.clone(),
                    input_kind,
                    output_kind,
                    capabilities: e.capabilities.clone(),
                    tag: e.tag,
                }
            })
            .collect()
    }

    fn entry(&self, name: &str) -> Result<&Entry> {
        self.entries.get(name).ok_or_else(|| PipelineError::UnknownModule(name.to_string()))
    }

    /// Resolve a config entry into a spec by instantiating it once.
    pub fn spec_for(&self, m: &ModuleConfig) -> Result<ModuleSpec> {
        let e = self.entry(&m.name)?;
        let module = (e.factory)(&m.params)
            .map_err(|message| PipelineError::InvalidParams { module: m.name.clone(), message })?;
        Ok(ModuleSpec {
            name: m.name.clone(),
            params: m.params.clone(),
            input_kind: module.input_kind(),
            output_kind: module.output_kind(),
            capabilities: e.capabilities.clone(),
            tag: m.tag.unwrap_or(e.tag),
        })
    }

    pub fn instantiate(&self, spec: &ModuleSpec) -> Result<Box<dyn Module>> {
        let e = self.entry(&spec.name)?;
        (e.factory)(&spec.params).map_err(|message| PipelineError::InvalidParams { module: spec.name.clone(), message })
    }
}
