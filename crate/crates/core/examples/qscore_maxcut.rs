//! Q-score of simulated annealing on random MaxCut graphs, compared with
//! the uniform sampler.
//!
//! ```bash
//! cargo run --release --example qscore_maxcut
//! ```

use qbench::metrics::{q_score, QScoreConfig, ScoreStatistic};
use qbench::solvers::{QuboSolver, SimulatedAnnealer, UniformSampler};

fn report(label: &str, solver: &dyn QuboSolver, cfg: &QScoreConfig) -> Result<(), Box<dyn std::error::Error>> {
    let r = q_score(solver, cfg)?;
    println!("{label}");
    println!("   N   beta      C     C_opt  C_rand");
    for s in &r.per_size {
        let flag = if s.c_opt_estimated { "*" } else { " " };
        println!("{:>4} {:>6.3} {:>6.2} {:>7.2}{flag} {:>6.2}", s.n, s.beta, s.c, s.c_opt, s.c_rand);
    }
    match r.q_score {
        Some(n) => println!("Q-score: {n}\n"),
        None => println!("Q-score: none\n"),
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = QScoreConfig::new((5..=18).collect());
    cfg.instances_per_size = 10;
    cfg.scan_all = true;
    cfg.seed = 1;
    report("simulated annealing (200 sweeps, 10 reads)", &SimulatedAnnealer::new(200, 10), &cfg)?;

    cfg.statistic = ScoreStatistic::Mean;
    cfg.sizes = (5..=12).collect();
    report("uniform sampler (mean cut)", &UniformSampler { n_samples: 256 }, &cfg)?;
    println!("* optimum estimated from the asymptotic formula");
    Ok(())
}
