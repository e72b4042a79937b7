//! Assembly line balancing as a QUBO: encode with slack variables, anneal,
//! decode, and compare against exhaustive search.
//!
//! ```bash
//! cargo run --release --example salbp_qubo
//! ```

use qbench::problems::{gen_salbp, salbp_optimum_exhaustive, Assignment, SalbpInstance};
use qbench::qubo::{decode, salbp_to_qubo, PenaltyConfig};
use qbench::solvers::{QuboSolver, SimulatedAnnealer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = gen_salbp(6, 0.3, 10.0, 1.0, 3)?;
    let inst = SalbpInstance::new(g.times, g.cycle_time, g.precedence, 3)?;
    println!("task times {:?}, cycle time {}, precedence {:?}", inst.times, inst.cycle_time, inst.precedence);

    for (label, cfg) in [("slack", PenaltyConfig::default()), ("unbalanced", PenaltyConfig::unbalanced(1.0, 1.0))] {
        let q = salbp_to_qubo(&inst, &cfg)?;
        let slack = q.decode_map().iter().filter(|r| r.is_slack()).count();
        let set = SimulatedAnnealer::new(4000, 50).solve(&q, 1, None)?;
        let sol = decode(&q, &set.best().ok_or("no samples")?.bits)?;
        println!("\n{label}: {} variables ({slack} slack)", q.n_vars());
        println!("  feasible {}, objective {}", sol.feasible, sol.objective);
        if let Assignment::Stations(plan) = &sol.assignment {
            for (task, stations) in plan.iter().enumerate() {
                println!("  task {task} -> station {stations:?}");
            }
        }
        for v in &sol.violations {
            println!("  violated {}: {}", v.constraint, v.detail);
        }
    }

    match salbp_optimum_exhaustive(&inst) {
        Some(best) => println!("\nexhaustive optimum: {}", best.objective),
        None => println!("\nno feasible plan with {} stations", inst.max_stations),
    }
    Ok(())
}
