//! The three cardinality-constrained portfolio formulations on one market.
//!
//! ```bash
//! cargo run --release --example portfolio_formulations
//! ```

use qbench::problems::{gen_portfolio, portfolio_optimum_exhaustive, Assignment, Formulation};
use qbench::qubo::{decode, portfolio_to_qubo, PenaltyConfig};
use qbench::solvers::{QuboSolver, SimulatedAnnealer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let forms = [
        Formulation::Minvola { r_min: 0.06 },
        Formulation::Maxret { v_max: 0.02 },
        Formulation::Multiobj { lambda: 1.0 },
    ];
    for form in forms {
        let inst = gen_portfolio(10, 3, form, 5)?;
        let exact = portfolio_optimum_exhaustive(&inst);
        let q = match portfolio_to_qubo(&inst, &PenaltyConfig::default()) {
            Ok(q) => q,
            Err(e) => {
                println!("{}: cannot encode ({e})", form.name());
                continue;
            }
        };
        let set = SimulatedAnnealer::new(1000, 20).solve(&q, 2, None)?;
        let sol = decode(&q, &set.best().ok_or("no samples")?.bits)?;
        let picked = match &sol.assignment {
            Assignment::Assets(a) => a.clone(),
            _ => Vec::new(),
        };
        println!("{} ({} QUBO variables)", form.name(), q.n_vars());
        println!("  annealed: assets {picked:?}, objective {:.6}, feasible {}", sol.objective, sol.feasible);
        match exact {
            Some(e) => println!("  optimum:  objective {:.6}", e.objective),
            None => println!("  no feasible selection"),
        }
    }
    Ok(())
}
