use qbench::problems::*;
use qbench::qubo::*;
use qbench::solvers::brute_force;

fn bits_of(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (mask >> i) & 1 == 1).collect()
}

/// Plain enumeration: minimum energy and every minimizing bitstring.
fn enumerate(q: &QuboModel) -> (f64, Vec<Vec<bool>>) {
    let n = q.n_vars();
    let mut best = f64::INFINITY;
    let mut arg = Vec::new();
    for m in 0..1u64 << n {
        let b = bits_of(m, n);
        let e = q.energy(&b).unwrap();
        if e < best - 1e-9 {
            best = e;
            arg = vec![b];
        } else if (e - best).abs() <= 1e-9 {
            arg.push(b);
        }
    }
    (best, arg)
}

/// Every bitstring that decodes to an infeasible solution lies strictly above
/// the optimum, and every feasible one is at or above its domain objective.
fn assert_sound(q: &QuboModel, opt: f64) {
    let n = q.n_vars();
    for m in 0..1u64 << n {
        let b = bits_of(m, n);
        let e = q.energy(&b).unwrap();
        let sol = decode(q, &b).unwrap();
        if sol.feasible {
            assert!(e >= sol.objective - 1e-9, "feasible state below its objective: {e} < {}", sol.objective);
        } else {
            assert!(e > opt + 1e-9, "infeasible state at energy {e} not above optimum {opt}");
        }
    }
}

#[test]
fn single_edge_coefficients() {
    let g = ProblemGraph::new(2, [(0, 1, 1.0)]).unwrap();
    let q = maxcut_to_qubo(&g);
    assert_eq!(q.linear(), &[-1.0, -1.0]);
    assert_eq!(q.quadratic().get(&(0, 1)), Some(&2.0));
    assert_eq!(q.offset(), 0.0);
}

#[test]
fn triangle_has_six_optimal_cuts() {
    let g = ProblemGraph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
    let (min, arg) = enumerate(&maxcut_to_qubo(&g));
    assert_eq!(min, -2.0);
    assert_eq!(arg.len(), 6);
}

#[test]
fn maxcut_energy_is_negated_cut() {
    for seed in 0..5 {
        let g = gen_maxcut(10, 0.5, seed).unwrap();
        let q = maxcut_to_qubo(&g);
        let (best_cut, _) = max_cut_exhaustive(&g);
        let (min, arg) = enumerate(&q);
        assert_eq!(min, -best_cut);
        for m in 0..1u64 << 10 {
            let b = bits_of(m, 10);
            assert_eq!(q.energy(&b).unwrap() + eval_cut(&g, &b).unwrap(), 0.0);
        }
        for b in arg {
            assert_eq!(eval_cut(&g, &b).unwrap(), best_cut);
        }
    }
}

#[test]
fn setcover_trivial_instances() {
    let inst = SetCoverInstance::new(1, vec![(1.0, vec![0])]).unwrap();
    let q = setcover_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    let (min, arg) = enumerate(&q);
    assert_eq!(min, 1.0);
    assert_eq!(arg, vec![vec![true]]);

    let inst = SetCoverInstance::new(2, vec![(1.0, vec![0]), (1.0, vec![1]), (1.0, vec![0, 1])]).unwrap();
    let q = setcover_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    let (min, arg) = enumerate(&q);
    assert_eq!(min, 1.0);
    for b in arg {
        let sol = decode(&q, &b).unwrap();
        assert_eq!(sol.assignment, Assignment::Subsets(vec![2]));
        assert!(sol.feasible);
    }
}

#[test]
fn setcover_lagrange_must_exceed_max_cost() {
    let inst = SetCoverInstance::new(1, vec![(3.0, vec![0])]).unwrap();
    assert!(setcover_to_qubo(&inst, &PenaltyConfig::slack().with_lagrange(3.0)).is_err());
    assert!(setcover_to_qubo(&inst, &PenaltyConfig::slack().with_lagrange(3.5)).is_ok());
}

#[test]
fn setcover_random_double_oracle() {
    let mut checked = 0;
    for seed in 0.. {
        let inst = gen_setcover(8, 6, 0.35, seed).unwrap();
        let q = setcover_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
        if q.n_vars() > 20 {
            continue;
        }
        let opt = setcover_optimum_exhaustive(&inst);
        let set = brute_force(&q, 16).unwrap();
        let best = set.best().unwrap();
        let sol = decode(&q, &best.bits).unwrap();
        assert!(sol.feasible);
        assert_eq!(sol.objective, opt.objective);
        assert_eq!(best.energy, opt.objective);
        assert_sound(&q, opt.objective);
        checked += 1;
        if checked == 3 {
            break;
        }
    }
}

#[test]
fn setcover_decode_drops_slacks() {
    let inst = SetCoverInstance::new(2, vec![(1.0, vec![0, 1]), (2.0, vec![0]), (2.0, vec![1])]).unwrap();
    let q = setcover_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    assert!(q.n_vars() > 3);
    let mut bits = vec![true; q.n_vars()];
    bits[1] = false;
    let sol = decode(&q, &bits).unwrap();
    assert_eq!(sol.assignment, Assignment::Subsets(vec![0, 2]));
}

#[test]
fn salbp_trivial_instances() {
    let inst = SalbpInstance::new(vec![2.0], 2.0, vec![], 1).unwrap();
    let q = salbp_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    let (min, arg) = enumerate(&q);
    assert_eq!(min, 1.0);
    for b in arg {
        assert!(b[0] && b[1]);
    }

    let inst = SalbpInstance::new(vec![3.0, 3.0], 3.0, vec![(0, 1)], 2).unwrap();
    let q = salbp_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    let (min, arg) = enumerate(&q);
    assert_eq!(min, 3.0);
    for b in arg {
        let sol = decode(&q, &b).unwrap();
        assert_eq!(sol.assignment, Assignment::Stations(vec![vec![1], vec![2]]));
    }
}

#[test]
fn salbp_all_zero_bits_violate_every_assignment() {
    let inst = gen_salbp(4, 0.3, 10.0, 1.0, 3).unwrap();
    let inst = SalbpInstance::new(inst.times.clone(), inst.cycle_time, inst.precedence.clone(), 2).unwrap();
    let q = salbp_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    let sol = decode(&q, &vec![false; q.n_vars()]).unwrap();
    assert!(!sol.feasible);
    assert_eq!(sol.violations.iter().filter(|v| v.constraint == "assignment").count(), 4);
}

#[test]
fn salbp_feasible_energy_equals_objective() {
    let inst = SalbpInstance::new(vec![2.0, 1.0, 2.0], 3.0, vec![(0, 2)], 3).unwrap();
    let q = salbp_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    for plan in [vec![vec![1], vec![1], vec![2]], vec![vec![1], vec![2], vec![3]], vec![vec![2], vec![1], vec![3]]] {
        let sol = eval_salbp(&inst, &plan).unwrap();
        assert!(sol.feasible);
        let bits = encode(&q, &sol).unwrap();
        assert!((q.energy(&bits).unwrap() - sol.objective).abs() < 1e-9);
        assert_eq!(decode(&q, &bits).unwrap(), sol);
    }
}

#[test]
fn salbp_four_tasks_double_oracle() {
    let inst = SalbpInstance::new(vec![1.0, 1.0, 2.0, 1.0], 3.0, vec![(0, 2)], 2).unwrap();
    let q = salbp_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    assert!(q.n_vars() <= 20, "{} vars", q.n_vars());
    let opt = salbp_optimum_exhaustive(&inst).unwrap();
    let set = brute_force(&q, 8).unwrap();
    let best = set.best().unwrap();
    let sol = decode(&q, &best.bits).unwrap();
    assert!(sol.feasible);
    assert_eq!(sol.objective, opt.objective);
    assert!((best.energy - opt.objective).abs() < 1e-9);
}

#[test]
fn salbp_off_grid_times_rejected() {
    let inst = SalbpInstance::new(vec![1.5], 2.0, vec![], 1).unwrap();
    assert!(matches!(salbp_to_qubo(&inst, &PenaltyConfig::default()), Err(QuboError::Unencodable(_))));
    let cfg = PenaltyConfig { resolution: Some(0.5), ..PenaltyConfig::default() };
    assert!(salbp_to_qubo(&inst, &cfg).is_ok());
}

#[test]
fn salbp_budget_guard() {
    let inst = gen_salbp(12, 0.2, 10.0, 1.0, 1).unwrap();
    let cfg = PenaltyConfig { max_vars: 50, ..PenaltyConfig::default() };
    assert!(matches!(salbp_to_qubo(&inst, &cfg), Err(QuboError::BudgetExceeded { budget: 50, .. })));
}

#[test]
fn portfolio_diagonal_picks_lower_variance() {
    let inst = PortfolioInstance::new(
        vec![0.05, 0.05],
        vec![vec![0.04, 0.0], vec![0.0, 0.01]],
        Formulation::Minvola { r_min: 0.0 },
        1,
    )
    .unwrap();
    let q = portfolio_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    let (min, arg) = enumerate(&q);
    assert!((min - 0.01).abs() < 1e-12);
    for b in arg {
        assert_eq!(decode(&q, &b).unwrap().assignment, Assignment::Assets(vec![1]));
    }
}

#[test]
fn portfolio_full_cardinality_forces_all_ones() {
    let inst = gen_portfolio(5, 5, Formulation::Multiobj { lambda: 1.0 }, 2).unwrap();
    let q = portfolio_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    let (_, arg) = enumerate(&q);
    assert_eq!(arg, vec![vec![true; 5]]);
    let (_, var) = portfolio_stats(&inst, &[true; 5]).unwrap();
    let full: f64 = inst.covariance.iter().flatten().sum::<f64>() / 25.0;
    assert!((var - full).abs() < 1e-12);
}

#[test]
fn portfolio_random_double_oracle() {
    for (seed, formulation) in [(1, Formulation::Minvola { r_min: 0.06 }), (2, Formulation::Multiobj { lambda: 2.0 })] {
        let inst = gen_portfolio(8, 3, formulation, seed).unwrap();
        let q = portfolio_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
        let opt = portfolio_optimum_exhaustive(&inst).unwrap();
        let set = brute_force(&q, 8).unwrap();
        let best = set.best().unwrap();
        let sol = decode(&q, &best.bits).unwrap();
        assert!(sol.feasible);
        assert_eq!(sol.assignment, opt.assignment);
        assert!((best.energy - opt.objective).abs() < 1e-9);
        assert_sound(&q, opt.objective);
    }
}

#[test]
fn portfolio_unreachable_floor_is_infeasible() {
    let inst = gen_portfolio(4, 2, Formulation::Minvola { r_min: 0.5 }, 0).unwrap();
    assert!(matches!(portfolio_to_qubo(&inst, &PenaltyConfig::default()), Err(QuboError::Infeasible(_))));
}

#[test]
fn maxret_penalizes_excess_volatility() {
    let inst = PortfolioInstance::new(
        vec![0.10, 0.02],
        vec![vec![0.5, 0.0], vec![0.0, 0.01]],
        Formulation::Maxret { v_max: 0.05 },
        1,
    )
    .unwrap();
    let q = portfolio_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    let (_, arg) = enumerate(&q);
    let sol = decode(&q, &arg[0]).unwrap();
    assert_eq!(sol.assignment, Assignment::Assets(vec![1]));
    assert!(sol.feasible);
}

#[test]
fn decode_rejects_wrong_length() {
    let q = maxcut_to_qubo(&ProblemGraph::new(2, [(0, 1, 1.0)]).unwrap());
    assert_eq!(decode(&q, &[true]), Err(QuboError::LengthMismatch { expected: 2, found: 1 }));
}

#[test]
fn raw_models_have_no_domain() {
    assert_eq!(decode(&QuboModel::new(1), &[true]), Err(QuboError::NoDomain));
}

#[test]
fn encode_decode_round_trip() {
    let inst = gen_setcover(6, 5, 0.4, 11).unwrap();
    let q = setcover_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    for m in 0..1u64 << 5 {
        let chosen: Vec<usize> = (0..5).filter(|j| (m >> j) & 1 == 1).collect();
        let sol = eval_setcover(&inst, &chosen).unwrap();
        let bits = encode(&q, &sol).unwrap();
        assert_eq!(decode(&q, &bits).unwrap(), sol);
        if sol.feasible {
            assert!((q.energy(&bits).unwrap() - sol.objective).abs() < 1e-9);
        }
    }

    let inst = gen_portfolio(6, 2, Formulation::Minvola { r_min: 0.05 }, 4).unwrap();
    let q = portfolio_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    for m in 1..1u64 << 6 {
        let sel = bits_of(m, 6);
        let sol = portfolio_objective(&inst, &sel).unwrap();
        let bits = encode(&q, &sol).unwrap();
        assert_eq!(decode(&q, &bits).unwrap(), sol);
        if sol.feasible {
            assert!((q.energy(&bits).unwrap() - sol.objective).abs() < 1e-9);
        }
    }
}

#[test]
fn slack_ranges_are_tight() {
    // Element 0 is in three subsets: surplus 0..=2 needs both slack bits.
    let inst = SetCoverInstance::new(1, vec![(1.0, vec![0]), (1.0, vec![0]), (1.0, vec![0])]).unwrap();
    let q = setcover_to_qubo(&inst, &PenaltyConfig::default()).unwrap();
    let group = &q.slack_groups()[0];
    assert_eq!(group.range(), 2);
    for drop in 0..group.vars.len() {
        let reachable: Vec<u64> = (0..1u64 << group.vars.len())
            .filter(|m| (m >> drop) & 1 == 0)
            .map(|m| group.coefs.iter().enumerate().filter(|(k, _)| (m >> k) & 1 == 1).map(|(_, c)| *c).sum())
            .collect();
        assert!((0..=2).any(|v| !reachable.contains(&v)), "bit {drop} is redundant");
    }
}

#[test]
fn unbalanced_penalty_values() {
    let inst = SetCoverInstance::new(1, vec![(1.0, vec![0]), (1.0, vec![0])]).unwrap();
    let cfg = PenaltyConfig::unbalanced(0.96, 0.0371).with_lagrange(10.0);
    let q = setcover_to_qubo(&inst, &cfg).unwrap();
    assert_eq!(q.n_vars(), 2);
    // g = 1 − Σb: l1·g + l2·g² on top of the costs.
    let expect = |s: f64| s + 0.96 * (1.0 - s) + 0.0371 * (1.0 - s) * (1.0 - s);
    assert!((q.energy(&[false, false]).unwrap() - expect(0.0)).abs() < 1e-12);
    assert!((q.energy(&[true, false]).unwrap() - expect(1.0)).abs() < 1e-12);
    assert!((q.energy(&[true, true]).unwrap() - expect(2.0)).abs() < 1e-12);
}
