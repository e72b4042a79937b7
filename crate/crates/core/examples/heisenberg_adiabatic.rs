//! Adiabatic preparation of antiferromagnetic Heisenberg ground states,
//! starting from a product of dimer singlets.
//!
//! ```bash
//! cargo run --release --example heisenberg_adiabatic
//! ```

use qbench::hamiltonian::{
    adiabatic_prepare, build_heisenberg_with, ground_energy_dense, DynamicsConfig, Lattice, NoiseModel,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chain = Lattice::chain(4)?;
    let h = build_heisenberg_with(&chain, 1.0)?;
    let ground = ground_energy_dense(&h)? / chain.n_sites as f64;
    println!("4-site chain, exact ground energy per site {ground:.5}");
    for total_time in [2.0, 4.0, 8.0, 16.0] {
        let trace = adiabatic_prepare(&h, &DynamicsConfig::noiseless(total_time, 64))?;
        let gap = (trace.last() - ground) / ground.abs();
        println!("  T = {total_time:>4}: prepared {:.5}, relative gap {:.3}%", trace.last(), 100.0 * gap);
    }

    let ladder = Lattice::square(2, 4)?;
    let h = build_heisenberg_with(&ladder, 1.0)?;
    println!("\n2x4 ladder, exact ground energy per site {:.5}", ground_energy_dense(&h)? / 8.0);
    for p in [0.0, 0.001, 0.002] {
        let cfg = DynamicsConfig { total_time: 4.0, steps: 16, noise: NoiseModel { p }, shots: 200, seed: 11 };
        let trace = adiabatic_prepare(&h, &cfg)?;
        println!("  p = {p:<6}: lowest energy per site along the sweep {:.4}", trace.min_observable());
    }
    Ok(())
}
