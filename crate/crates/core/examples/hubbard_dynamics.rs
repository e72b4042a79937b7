//! Charge-density-wave melting on a 2x2 spinless Hubbard lattice under
//! Trotterized evolution, with and without depolarizing noise.
//!
//! ```bash
//! cargo run --release --example hubbard_dynamics
//! ```

use qbench::hamiltonian::{build_hubbard, evolve_dynamics, free_fermion_oracle, DynamicsConfig, Lattice, NoiseModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lattice = Lattice::square(2, 2)?;
    let h = build_hubbard(&lattice, 1.0, 0.0, false)?;
    let occupied: Vec<bool> = (0..lattice.n_sites).map(|i| lattice.cdw_occupied(i)).collect();
    let exact = |t: f64| -> Result<f64, Box<dyn std::error::Error>> {
        let n = free_fermion_oracle(&lattice, 1.0, &occupied, t)?;
        let (mut odd, mut even) = (0.0, 0.0);
        for (i, x) in n.iter().enumerate() {
            if occupied[i] {
                odd += x
            } else {
                even += x
            }
        }
        Ok((odd - even) / (odd + even))
    };

    let traces: Vec<_> = [0.0, 0.01, 0.05]
        .into_iter()
        .map(|p| {
            let cfg = DynamicsConfig { total_time: 2.0, steps: 8, noise: NoiseModel { p }, shots: 500, seed: 3 };
            evolve_dynamics(&h, &cfg).map(|tr| (p, tr))
        })
        .collect::<Result<_, _>>()?;

    println!("{:>6} {:>8} {:>9} {:>9} {:>9}", "t", "exact", "p=0", "p=0.01", "p=0.05");
    for k in 0..traces[0].1.points.len() {
        let step = traces[0].1.points[k].steps;
        let t = 2.0 * step as f64 / 8.0;
        print!("{t:>6.2} {:>8.4}", exact(t)?);
        for (_, tr) in &traces {
            print!(" {:>9.4}", tr.points[k].observable);
        }
        println!();
    }
    Ok(())
}
