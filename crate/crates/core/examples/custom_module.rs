//! Register a user-defined module and splice it into a pipeline next to
//! the built-in ones.
//!
//! ```bash
//! cargo run --release --example custom_module
//! ```

use qbench::pipeline::{
    execute, validate_pipeline, MetricCategory, Module, ModuleConfig, ModuleContext, ModuleError,
    PayloadKind, PipelinePayload, Registry, TimeTag,
};

/// Counts the nonzero couplings of the QUBO passing through.
struct Density;

impl Module for Density {
    fn input_kind(&self) -> PayloadKind {
        PayloadKind::Qubo
    }

    fn output_kind(&self) -> PayloadKind {
        PayloadKind::Qubo
    }

    fn preprocess(&mut self, input: PipelinePayload, ctx: &mut ModuleContext) -> Result<PipelinePayload, ModuleError> {
        if let PipelinePayload::Qubo(q) = &input {
            let n = q.n_vars() as f64;
            let density = q.quadratic().len() as f64 / (n * (n - 1.0) / 2.0).max(1.0);
            ctx.emit("coupling_density", density, MetricCategory::Complexity);
        }
        Ok(input)
    }

    fn postprocess(&mut self, input: PipelinePayload, _: &mut ModuleContext) -> Result<PipelinePayload, ModuleError> {
        Ok(input)
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut registry = Registry::builtin();
    registry.register("Density", "QUBO coupling density", &[], TimeTag::Classical, |_| Ok(Box::new(Density)));

    let modules = [
        ModuleConfig::new("MaxCut").param("n", 12),
        ModuleConfig::new("MaxCutQubo"),
        ModuleConfig::new("Density"),
        ModuleConfig::new("BruteForce"),
    ];
    let run = execute(&registry, &validate_pipeline(&registry, &modules, "custom", 3)?);
    for key in ["coupling_density", "objective", "delta_rel"] {
        let rec = run.records.iter().find(|r| r.key == key).ok_or(key)?;
        println!("{:<12} {key:<18} {}", rec.module, rec.value);
    }
    Ok(())
}
