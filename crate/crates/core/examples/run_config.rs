//! Run a TOML benchmark configuration with repetitions and a parameter
//! sweep, then aggregate the results into per-category CSV tables.
//!
//! ```bash
//! cargo run --release --example run_config -- examples/configs/sa_sweep.toml
//! ```

use std::path::PathBuf;

use qbench::pipeline::{report, run_manifest, Registry, RunManifest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/setcover.toml"));
    let out = std::env::temp_dir().join("qbench-run-config");
    let _ = std::fs::remove_dir_all(&out);

    let mut manifest = RunManifest::new(&config, &out);
    manifest.jobs = 2;
    let outcome = run_manifest(&Registry::builtin(), &manifest)?;
    for entry in &outcome.index.runs {
        let status = if entry.succeeded { "ok" } else { "failed" };
        println!("{:<24} seed {:>20} {status}", entry.run_id, entry.seed);
    }

    let summary = report(&out)?;
    println!("\naggregated {} runs", summary.runs_read);
    for (category, path) in &summary.tables {
        println!("  {:<12} {}", category.name(), path.display());
    }
    if let Some(path) = summary.tables.values().next() {
        println!("\n{}", std::fs::read_to_string(path)?);
    }
    Ok(())
}
