use hmhp::generator::{generate_cascades, generate_documents, random_follow_network, sample_model_parameters, GeneratorConfig, RateSpec};
use hmhp::model::{Dataset, EdgeGrouping, Event, Hyperparameters, ObservationWindow, Parent, Table};
use hmhp::{run_gibbs, Scalar, SamplerConfig, SamplerMode};

fn world(seed: u64) -> Dataset {
    let net = random_follow_network(12, 3, seed).unwrap();
    let hyper = Hyperparameters::symmetric(3, 30, 0.2, 0.5, 0.5);
    let rates = RateSpec::per_edge(&net, vec![0.25; net.edge_count()], vec![0.05; 12]);
    let p = sample_model_parameters(&net, &hyper, seed, Some(rates)).unwrap();
    let win = ObservationWindow::new(0.0, 40.0).unwrap();
    let (c, _) = generate_cascades(&net, &p, &GeneratorConfig::new(seed, win)).unwrap();
    generate_documents(&c, &p, 6.0, seed).unwrap()
}

fn config(mode: SamplerMode, seed: u64) -> SamplerConfig {
    let mut c = SamplerConfig::new(Hyperparameters::symmetric(3, 30, 0.1, 0.1, 0.1));
    c.mode = mode;
    c.iterations = 30;
    c.burn_in = 10;
    c.seed = seed;
    c.check_counts = true;
    c
}

const MODES: [SamplerMode; 3] = [SamplerMode::Full, SamplerMode::Diagonal, SamplerMode::Decoupled];

fn assert_row_stochastic<F: Scalar>(t: &Table<F>, tol: f64) {
    for r in 0..t.rows() {
        let s: f64 = t.row(r).iter().map(|x| x.as_f64()).sum();
        assert!((s - 1.0).abs() < tol, "row {r} sums to {s}");
        assert!(t.row(r).iter().all(|x| x.as_f64() >= 0.0));
    }
}

#[test]
fn same_seed_same_chain() {
    let d = world(1);
    assert!(d.len() > 30, "{} events", d.len());
    for mode in MODES {
        let a = run_gibbs(&d, &config(mode, 7)).unwrap();
        let b = run_gibbs(&d, &config(mode, 7)).unwrap();
        assert_eq!(a.topics, b.topics);
        assert_eq!(a.parents, b.parents);
        assert_eq!(a.w, b.w);
        let lls = |r: &hmhp::InferenceResult| r.trace.iter().map(|t| t.joint_ll).collect::<Vec<_>>();
        assert_eq!(lls(&a), lls(&b));
        let c = run_gibbs(&d, &config(mode, 8)).unwrap();
        assert!(a.topics != c.topics || a.parents != c.parents, "{mode}: seed had no effect");
    }
}

#[test]
fn counts_stay_consistent_and_estimates_are_distributions() {
    let d = world(2);
    for mode in MODES {
        for grouping in [EdgeGrouping::PerEdge, EdgeGrouping::Degree] {
            let mut c = config(mode, 3);
            c.grouping = grouping;
            let r = run_gibbs(&d, &c).unwrap();
            assert_eq!(r.topics.len(), d.len());
            assert!(r.topics.iter().all(|&k| k < 3));
            let est = &r.estimates;
            assert_row_stochastic(&est.zeta, 1e-9);
            assert_row_stochastic(&est.phi, 1e-9);
            assert_row_stochastic(&est.trans, 1e-9);
            assert!(r.w.iter().all(|w| w.is_finite() && *w >= 0.0));
            assert!(r.mu.iter().all(|m| m.is_finite() && *m > 0.0));
            assert_eq!(r.trace.len(), 31);
            for list in &r.ranked_parents {
                let mass: f64 = list.iter().map(|x| x.1).sum();
                assert!(mass <= 1.0 + 1e-9);
                assert!(list.windows(2).all(|w| w[0].1 >= w[1].1));
            }
        }
    }
}

#[test]
fn parents_precede_children() {
    let d = world(3);
    for mode in MODES {
        let r = run_gibbs(&d, &config(mode, 1)).unwrap();
        for (i, p) in r.parents.iter().enumerate() {
            if let Parent::Event(id) = p {
                let j = d.position(*id).unwrap();
                assert!(j < i);
                assert!(d.network.edge(d.node_of(j), d.node_of(i)).is_some());
            }
        }
    }
}

#[test]
fn diagonal_children_inherit_the_parent_topic() {
    let d = world(4);
    let r = run_gibbs(&d, &config(SamplerMode::Diagonal, 2)).unwrap();
    let mut linked = 0;
    for (i, p) in r.parents.iter().enumerate() {
        if let Parent::Event(id) = p {
            assert_eq!(r.topics[i], r.topics[d.position(*id).unwrap()]);
            linked += 1;
        }
    }
    assert!(linked > 0);
}

#[test]
fn decoupled_rows_are_one_global_mixture() {
    let d = world(5);
    let r = run_gibbs(&d, &config(SamplerMode::Decoupled, 4)).unwrap();
    let global = r.estimates.trans.row(0).to_vec();
    for t in [&r.estimates.phi, &r.estimates.trans] {
        for row in 0..t.rows() {
            assert_eq!(t.row(row), &global[..]);
        }
    }
}

#[test]
fn burn_in_must_leave_samples() {
    let d = world(6);
    let mut c = config(SamplerMode::Full, 0);
    c.burn_in = c.iterations;
    assert!(run_gibbs(&d, &c).is_err());
    c.burn_in = 0;
    c.iterations = 0;
    let r = run_gibbs(&d, &c).unwrap();
    assert_eq!(r.trace.len(), 1);
}

#[test]
fn rejects_tokens_outside_the_vocabulary() {
    let d = world(7);
    let mut c = config(SamplerMode::Full, 0);
    c.hyper = Hyperparameters::symmetric(3, 5, 0.1, 0.1, 0.1);
    assert!(run_gibbs(&d, &c).is_err());
}

#[test]
fn runs_in_single_precision() {
    let d = world(8);
    let d32: hmhp::DatasetF32 = Dataset::new(
        d.network.clone(),
        ObservationWindow::new(0.0f32, 40.0).unwrap(),
        d.events()
            .iter()
            .map(|e| {
                let mut f = Event::new(e.id, e.time as f32, e.node);
                f.tokens = e.tokens.clone();
                f
            })
            .collect(),
    );
    for mode in MODES {
        let mut c = hmhp::SamplerConfigF32::new(Hyperparameters::symmetric(3, 30, 0.1, 0.1, 0.1));
        c.mode = mode;
        c.iterations = 20;
        c.burn_in = 5;
        c.check_counts = true;
        let r = run_gibbs(&d32, &c).unwrap();
        assert_row_stochastic(&r.estimates.trans, 1e-4);
        assert_row_stochastic(&r.estimates.zeta, 1e-4);
        assert!(r.trace.iter().all(|t| t.joint_ll.is_finite()));
    }
}
