use modval::modular::{eraser_visibility, modular_value, postselection_probability};
use modval::oracle::oracle_unitary;
use modval::search::{balanced_functions, evaluate, pareto_frontier, run_search, SearchConfig};

fn config(samples: usize, separable_only: bool) -> SearchConfig {
    SearchConfig {
        samples,
        separable_only,
        ..SearchConfig::default()
    }
}

#[test]
fn accepted_points_satisfy_filters_on_reevaluation() {
    let cfg = config(5_000, false);
    let points = run_search(&cfg).unwrap();
    let fns = balanced_functions(2).unwrap();
    let mut seen = 0;
    for p in points.iter().filter(|p| p.accepted) {
        seen += 1;
        let again = evaluate(&p.psi_i, &p.psi_f, &cfg);
        assert!(again.accepted);
        assert!(again.p_postselect > cfg.min_p);
        assert!((postselection_probability(&p.psi_i, &p.psi_f).unwrap() - p.p_postselect).abs() < 1e-12);
        for (k, f) in fns.iter().enumerate() {
            let o = modular_value(&p.psi_i, &p.psi_f, &oracle_unitary(f)).unwrap();
            assert!(o.im.abs() > cfg.min_im);
            assert!((eraser_visibility(o) - p.per_function_visibility[k]).abs() < 1e-12);
            assert!(p.per_function_visibility[k] > cfg.min_individual_visibility);
        }
    }
    assert!(seen > 0);
}

#[test]
fn frontier_is_monotone_and_undominated() {
    let points = run_search(&config(20_000, true)).unwrap();
    let frontier = pareto_frontier(&points).unwrap();
    for w in frontier.windows(2) {
        assert!(w[0].p_postselect < w[1].p_postselect);
        assert!(w[0].avg_visibility > w[1].avg_visibility);
    }
    for f in &frontier {
        assert!(!points.iter().any(|q| q.accepted
            && q.p_postselect >= f.p_postselect
            && q.avg_visibility >= f.avg_visibility
            && (q.p_postselect > f.p_postselect || q.avg_visibility > f.avg_visibility)));
    }
}

#[test]
fn separable_samples_are_products() {
    let points = run_search(&config(200, true)).unwrap();
    for p in &points {
        for s in [&p.psi_i, &p.psi_f] {
            for cut in 1..s.num_qubits() {
                assert_eq!(s.schmidt_rank(cut), 1);
            }
        }
    }
}

#[test]
fn search_is_deterministic_and_seed_sensitive() {
    let a = run_search(&config(1_000, false)).unwrap();
    let b = run_search(&config(1_000, false)).unwrap();
    assert_eq!(a, b);
    let c = run_search(&SearchConfig { seed: 43, ..config(1_000, false) }).unwrap();
    assert_ne!(a, c);
}

#[test]
fn no_accepted_points_is_an_error() {
    let cfg = SearchConfig {
        min_p: 1.0,
        ..config(200, false)
    };
    assert!(pareto_frontier(&run_search(&cfg).unwrap()).is_err());
}

#[test]
fn config_rejects_unknown_keys_and_bad_values() {
    assert!(serde_json::from_str::<SearchConfig>(r#"{"samples": 10, "extra": 1}"#).is_err());
    let cfg: SearchConfig = serde_json::from_str(r#"{"samples": 10}"#).unwrap();
    assert_eq!(cfg.min_p, 0.5);
    assert!(SearchConfig { min_im: 1.5, ..cfg.clone() }.validate().is_err());
    assert!(SearchConfig { n: 0, ..cfg }.validate().is_err());
}
