use evifuse::bench::{
    evaluate, run_experiment, simulate, FusionSettings, Method, SimConfig, SourceProfile,
};

fn fixture() -> SimConfig {
    SimConfig::load(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/sediment.json"
    ))
    .unwrap()
}

#[test]
fn fixture_matches_built_in_scenario() {
    assert_eq!(fixture(), SimConfig::sediment_default());
}

#[test]
fn weighted_vote_beats_the_worst_source() {
    for seed in [1, 7, 42, 2005] {
        let mut config = SimConfig::sediment_default();
        config.seed = seed;
        config.n_samples = 1500;
        config.n_trials = 3;
        let report = run_experiment(&config, &[Method::VoteWeighted]).unwrap();
        let worst = report
            .sources
            .values()
            .map(|s| s.accuracy)
            .fold(f64::INFINITY, f64::min);
        let weighted = report.method(Method::VoteWeighted).unwrap().accuracy;
        assert!(weighted >= worst, "seed {seed}: {weighted} < {worst}");
    }
}

#[test]
fn identical_perfect_sources_never_conflict() {
    let config = SimConfig {
        classes: vec!["a".into(), "b".into(), "c".into()],
        priors: vec![0.5, 0.25, 0.25],
        sources: (0..3)
            .map(|j| SourceProfile {
                id: format!("s{j}"),
                reliability: vec![1.0; 3],
                temperature: 0.2,
            })
            .collect(),
        n_samples: 300,
        n_trials: 2,
        seed: 3,
        fusion: FusionSettings::default(),
    };
    let methods = Method::standard(&config.fusion);
    let report = run_experiment(&config, &methods).unwrap();
    for method in methods {
        let r = report.method(method).unwrap();
        assert_eq!(r.conflict_rate, 0.0, "{method}");
        assert_eq!(r.accuracy, 1.0, "{method}");
    }
}

#[test]
fn evaluation_depends_only_on_seed() {
    let mut config = SimConfig::sediment_default();
    config.n_samples = 600;
    let dataset = simulate(&config).unwrap();
    let methods = Method::standard(&config.fusion);
    let a = evaluate(&dataset, &methods, &config.fusion, 5, 4).unwrap();
    let b = evaluate(&dataset, &methods, &config.fusion, 5, 4).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    let c = evaluate(&dataset, &methods, &config.fusion, 6, 4).unwrap();
    assert_ne!(a.to_json().unwrap(), c.to_json().unwrap());
}
