use nearzero::detectors::replay::{replay_broken_ip, replay_broken_syndetic};
use nearzero::detectors::{check_broken_ip, BrokenSyndeticParams, Ladder, Verdict};
use nearzero::dynamics::{
    chi, forces_recurrence_probe, minimal_invariant, orbit_graph, ramsey_refinement, replay_refinement, ShiftSystem,
};
use nearzero::harness::partition::cross_check_with_oracle;
use nearzero::harness::random::random_seed;
use nearzero::harness::{compute_partition_regression, run_suite, RegressionOutcome, SuiteConfig, SuiteTag};
use nearzero::rng::Rng;
use nearzero::sets::{materialize, parse_setspec, plant_broken_ip, plant_broken_syndetic, FSSeed, SetSpec};
use nearzero::{Rat, WindowGrid};

#[test]
fn planted_broken_ip_survives_checker_probe_and_refinement() {
    let g = WindowGrid::dyadic(64).unwrap();
    let ladder = Ladder::halving(&Rat::one(), 3, |_| 3).unwrap();
    let mut rng = Rng::new(11);
    for i in 0..5 {
        let seed = random_seed(&mut rng, &g, 3, &Rat::new(1, 4)).unwrap();
        let (spec, cert) = plant_broken_ip(&seed, &ladder, i, &g).unwrap();
        let set = materialize(&spec, &g).unwrap();
        assert!(replay_broken_ip(&cert, &set).is_ok());
        let Verdict::Certificate(found) = check_broken_ip(&set, &ladder, 3).unwrap() else {
            panic!("checker rejects planted set {spec}");
        };
        assert!(replay_broken_ip(&found, &set).is_ok());
        assert!(forces_recurrence_probe(&spec, &g, 4, 6).unwrap().found.is_some());
        // Text round trip keeps the instance.
        assert_eq!(parse_setspec(&spec.to_string()).unwrap(), spec);
        let rf = ramsey_refinement(&spec, &cert, &g, 3).unwrap();
        assert!(replay_refinement(&rf, &spec, &g).is_ok(), "{spec}");
    }
}

#[test]
fn planted_broken_syndetic_replays() {
    let g = WindowGrid::dyadic(64).unwrap();
    let ladder = Ladder::from_pairs(&[(Rat::new(1, 4), 4), (Rat::new(1, 8), 4)]).unwrap();
    let params = BrokenSyndeticParams::new(ladder, 4);
    let base = SetSpec::Pattern {
        period: 2,
        residues: vec![1],
    };
    let (spec, cert) = plant_broken_syndetic(&base, &params, 3, &g).unwrap();
    assert!(replay_broken_syndetic(&cert, &materialize(&spec, &g).unwrap()).is_ok());
}

#[test]
fn sink_components_are_closed() {
    let g = WindowGrid::dyadic(32).unwrap();
    let spec = parse_setspec("union(pattern(3,[0]), window(explicit(1/32, 3/32), 1/8))").unwrap();
    let sys = ShiftSystem::new(chi(&spec, &g).unwrap(), 5).unwrap();
    let graph = orbit_graph(&sys, &Rat::new(2, 32)).unwrap();
    for comp in minimal_invariant(&graph) {
        for e in graph.edges.iter().filter(|e| comp.contains(&e.from)) {
            assert!(comp.contains(&e.to));
        }
    }
}

#[test]
fn partition_regression_is_pinned() {
    let small = compute_partition_regression(2, 2, 4).unwrap();
    assert_eq!(small.outcome, RegressionOutcome::NotFound { l_max: 4 });
    assert!(small.exhaustive);
    assert!(cross_check_with_oracle(&small).is_ok());
    let wide = compute_partition_regression(2, 2, 6).unwrap();
    assert_eq!(wide.outcome, RegressionOutcome::Found { l_star: 5 });
    assert!(wide.exhaustive);
    assert_eq!(compute_partition_regression(2, 1, 9).unwrap().outcome, RegressionOutcome::Found { l_star: 1 });
    let sampled = compute_partition_regression(3, 3, 6).unwrap();
    assert!(!sampled.exhaustive);
}

#[test]
fn suites_repeat_and_serialize_configs() {
    for tag in SuiteTag::ALL {
        let cfg = SuiteConfig {
            trials: 4,
            ..SuiteConfig::standard(tag)
        };
        let a = run_suite(&cfg).unwrap();
        assert_eq!(a.to_canonical_json(), run_suite(&cfg).unwrap().to_canonical_json());
        let round: SuiteConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(round, cfg);
        assert!(a.passed, "{tag}");
    }
}

#[test]
fn seeds_from_text_agree_with_constructor() {
    let spec = parse_setspec("fs(1/4, 1/16)").unwrap();
    let g = WindowGrid::dyadic(64).unwrap();
    let set = materialize(&spec, &g).unwrap();
    let seed = FSSeed::tight(vec![Rat::new(1, 4), Rat::new(1, 16)]).unwrap();
    assert_eq!(set.len(), 3);
    assert!(seed.sums_upto(2).iter().all(|s| set.contains(s)));
}
