use qbench::metrics::{expected_max_cut, q_score, quality, time_split, MetricsError, QScoreConfig, QScoreResult, ScoreStatistic};
use qbench::pipeline::{execute, validate_pipeline, ModuleConfig, Registry, TimeTag, WallTime};
use qbench::solvers::{BruteForce, SimulatedAnnealer, UniformSampler};

#[test]
fn exact_solver_scores_every_size() {
    let mut cfg = QScoreConfig::new((5..=10).collect());
    cfg.instances_per_size = 5;
    cfg.seed = 4;
    let r = q_score(&BruteForce::default(), &cfg).unwrap();
    assert_eq!(r.per_size.len(), 6);
    assert!(r.per_size.iter().all(|s| s.beta == 1.0 && s.c == s.c_opt));
    assert_eq!(r.q_score, Some(10));
    r.audit().unwrap();
    assert_eq!(QScoreResult::from_json(&serde_json::to_string(&r).unwrap()).unwrap(), r);
    assert_eq!(r.to_csv().lines().count(), 7);
}

#[test]
fn random_cut_baseline_is_half_the_edges() {
    // Each edge of G(N, 1/2) is present w.p. 1/2 and cut w.p. 1/2.
    let n = 12;
    let mut cfg = QScoreConfig::new(vec![n]);
    cfg.instances_per_size = 50;
    cfg.rand_samples = 400;
    let r = q_score(&UniformSampler { n_samples: 64 }, &cfg).unwrap();
    let expect = (n * (n - 1)) as f64 / 8.0;
    // Edge count per instance has sd sqrt(66)/2; averaged over 50 instances.
    let sd = (66.0f64).sqrt() / 2.0 / 2.0 / 50f64.sqrt();
    assert!((r.per_size[0].c_rand - expect).abs() < 4.0 * sd, "{} vs {expect}", r.per_size[0].c_rand);
}

#[test]
fn stopping_rule_and_scan_all() {
    let mut cfg = QScoreConfig::new(vec![5, 6, 7]);
    cfg.instances_per_size = 3;
    cfg.threshold = 1.5;
    let r = q_score(&BruteForce::default(), &cfg).unwrap();
    assert_eq!(r.q_score, None);
    assert_eq!(r.per_size.len(), 1);
    cfg.scan_all = true;
    let r = q_score(&BruteForce::default(), &cfg).unwrap();
    assert_eq!(r.per_size.len(), 3);
    assert_eq!(r.rescore(0.5), Some(7));
}

#[test]
fn estimated_optimum_is_flagged() {
    let mut cfg = QScoreConfig::new(vec![6, 9]);
    cfg.instances_per_size = 2;
    cfg.exact_limit = 8;
    let r = q_score(&SimulatedAnnealer::new(100, 5), &cfg).unwrap();
    assert!(!r.per_size[0].c_opt_estimated);
    assert!(r.per_size[1].c_opt_estimated);
    assert_eq!(r.per_size[1].c_opt, 81.0 / 8.0 + 0.178 * 27.0);
    assert_eq!(expected_max_cut(30), 900.0 / 8.0 + 0.178 * 30f64.powf(1.5));
}

#[test]
fn qscore_input_errors() {
    let sa = SimulatedAnnealer::new(10, 1);
    assert!(matches!(q_score(&sa, &QScoreConfig::new(vec![])), Err(MetricsError::EmptySizes)));
    assert!(q_score(&sa, &QScoreConfig::new(vec![6, 6])).is_err());
    let mut cfg = QScoreConfig::new(vec![5]);
    cfg.statistic = ScoreStatistic::Mean;
    cfg.instances_per_size = 0;
    assert!(q_score(&sa, &cfg).is_err());
}

#[test]
fn time_split_sums_by_tag() {
    let reg = Registry::builtin();
    let mods = [
        ModuleConfig::new("MaxCut").param("n", 5),
        ModuleConfig::new("MaxCutQubo"),
        ModuleConfig::new("BruteForce"),
    ];
    let mut run = execute(&reg, &validate_pipeline(&reg, &mods, "ts", 0).unwrap());
    assert_eq!(run.pipeline.modules[2].tag, TimeTag::Quantum);
    run.wall_times = vec![
        WallTime { pre_s: 1.0, post_s: 0.5 },
        WallTime { pre_s: 0.25, post_s: 0.25 },
        WallTime { pre_s: 6.0, post_s: 0.0 },
    ];
    let s = time_split(&run).unwrap();
    assert_eq!((s.quantum_s, s.classical_s, s.ratio), (6.0, 2.0, 0.75));
    run.pipeline.modules[0].tag = TimeTag::Quantum;
    assert_eq!(time_split(&run).unwrap().ratio, 7.5 / 8.0);
    run.redact_timing();
    assert_eq!(time_split(&run), Err(MetricsError::ZeroTime));
}

proptest::proptest! {
    #[test]
    fn gaps_are_exact(f_qc in 0.0f64..1e9, f_opt in 1e-9f64..1e9) {
        let q = quality(f_qc, f_opt).unwrap();
        proptest::prop_assert_eq!(q.delta_abs, f_qc - f_opt);
        proptest::prop_assert_eq!(q.theta.unwrap(), 1.0 + q.delta_rel.unwrap());
        proptest::prop_assert_eq!(q.theta.unwrap() >= 1.0, f_qc >= f_opt);
    }

    #[test]
    fn split_ratio_is_a_fraction(times in proptest::collection::vec((0.0f64..10.0, 0.0f64..10.0, proptest::bool::ANY), 3)) {
        let reg = Registry::builtin();
        let mods = [ModuleConfig::new("Identity"), ModuleConfig::new("Identity"), ModuleConfig::new("Identity")];
        let mut run = execute(&reg, &validate_pipeline(&reg, &mods, "p", 0).unwrap());
        let mut want_q = 0.0;
        let mut total = 0.0;
        for (i, &(a, b, quantum)) in times.iter().enumerate() {
            run.wall_times[i] = WallTime { pre_s: a, post_s: b };
            run.pipeline.modules[i].tag = if quantum { TimeTag::Quantum } else { TimeTag::Classical };
            total += a + b;
            if quantum { want_q += a + b; }
        }
        match time_split(&run) {
            Ok(s) => {
                proptest::prop_assert!((0.0..=1.0).contains(&s.ratio));
                proptest::prop_assert!((s.quantum_s - want_q).abs() < 1e-12);
                proptest::prop_assert!((s.quantum_s + s.classical_s - total).abs() < 1e-12);
            }
            Err(e) => {
                proptest::prop_assert_eq!(e, MetricsError::ZeroTime);
                proptest::prop_assert_eq!(total, 0.0);
            }
        }
    }
}
