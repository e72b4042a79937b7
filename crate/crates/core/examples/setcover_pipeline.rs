//! Build a three-stage pipeline in code, run it, and print every metric.
//!
//! ```bash
//! cargo run --release --example setcover_pipeline
//! ```

use qbench::metrics::time_split;
use qbench::pipeline::{execute, validate_pipeline, MetricCategory, ModuleConfig, Registry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let registry = Registry::builtin();
    let modules = [
        ModuleConfig::new("SetCover").param("universe_size", 10).param("n_subsets", 10).param("density", 0.3),
        ModuleConfig::new("SetCoverQubo"),
        ModuleConfig::new("SimulatedAnnealer").param("sweeps", 500).param("reads", 20),
    ];
    let pipeline = validate_pipeline(&registry, &modules, "setcover-demo", 7)?;
    let run = execute(&registry, &pipeline);
    if let Some(f) = &run.failure {
        return Err(f.to_string().into());
    }

    for category in MetricCategory::ALL {
        let records = run.by_category(category);
        if records.is_empty() {
            continue;
        }
        println!("[{}]", category.name());
        for r in records {
            let unit = r.unit.as_deref().unwrap_or("");
            println!("  {:<20} {:<18} {} {unit}", r.module, r.key, r.value);
        }
    }

    let split = time_split(&run)?;
    println!("quantum share of wall time: {:.1}%", 100.0 * split.ratio);
    Ok(())
}
