mod common;

use common::oracle::{max_conditional_error, oracle_joint, random_instance, Instance};
use hmhp::likelihood::{joint_log_likelihood, joint_log_likelihood_mode, RateParams};
use hmhp::model::EdgeGroups;
use hmhp::sampler::{SamplerContext, SamplerMode};

fn library_joint(inst: &Instance, topics: &[usize], parents: &[Option<usize>], mode: SamplerMode) -> f64 {
    let groups = EdgeGroups::new(&inst.dataset.network, inst.grouping);
    let rates = RateParams {
        groups: &groups,
        w: &inst.w,
        mu: &inst.mu,
    };
    joint_log_likelihood_mode(&inst.dataset, topics, parents, &rates, &inst.hyper, mode).unwrap()
}

#[test]
fn full_mode_conditionals_match_enumeration() {
    let mut worst: f64 = 0.0;
    let mut linked = 0;
    for seed in 0..200 {
        let inst = random_instance(seed, SamplerMode::Full);
        linked += inst.parents.iter().flatten().count();
        worst = worst.max(max_conditional_error(&inst, SamplerMode::Full));
    }
    assert!(worst < 1e-9, "max abs error {worst:e}");
    assert!(linked > 100, "instances should exercise diffusion links, got {linked}");
}

#[test]
fn diagonal_mode_conditionals_match_enumeration() {
    let mut worst: f64 = 0.0;
    for seed in 1000..1200 {
        let inst = random_instance(seed, SamplerMode::Diagonal);
        worst = worst.max(max_conditional_error(&inst, SamplerMode::Diagonal));
    }
    assert!(worst < 1e-9, "max abs error {worst:e}");
}

#[test]
fn decoupled_mode_conditionals_match_enumeration() {
    let mut worst: f64 = 0.0;
    for seed in 2000..2200 {
        let inst = random_instance(seed, SamplerMode::Decoupled);
        worst = worst.max(max_conditional_error(&inst, SamplerMode::Decoupled));
    }
    assert!(worst < 1e-9, "max abs error {worst:e}");
}

/// Every (topics, parents) assignment of the instance.
fn all_assignments(inst: &Instance) -> Vec<(Vec<usize>, Vec<Option<usize>>)> {
    let n = inst.dataset.len();
    let k = inst.hyper.topics();
    let ctx = SamplerContext::new(&inst.dataset, inst.hyper.clone(), inst.grouping, f64::INFINITY, 100);
    let options: Vec<Vec<Option<usize>>> = (0..n)
        .map(|e| {
            let mut o: Vec<Option<usize>> = ctx.candidates[e].iter().map(|c| Some(c.event)).collect();
            o.push(None);
            o
        })
        .collect();
    let mut out = Vec::new();
    let topic_configs = k.pow(n as u32);
    let mut parent_index = vec![0usize; n];
    loop {
        let parents: Vec<Option<usize>> = (0..n).map(|e| options[e][parent_index[e]]).collect();
        for code in 0..topic_configs {
            let mut c = code;
            let topics = (0..n)
                .map(|_| {
                    let t = c % k;
                    c /= k;
                    t
                })
                .collect();
            out.push((topics, parents.clone()));
        }
        let mut e = 0;
        while e < n {
            parent_index[e] += 1;
            if parent_index[e] < options[e].len() {
                break;
            }
            parent_index[e] = 0;
            e += 1;
        }
        if e == n {
            break;
        }
    }
    out
}

#[test]
fn joint_matches_product_form_and_evidence() {
    for seed in 0..60 {
        let inst = random_instance(seed, SamplerMode::Full);
        let mut lib = Vec::new();
        let mut orc = Vec::new();
        for (topics, parents) in all_assignments(&inst) {
            let a = library_joint(&inst, &topics, &parents, SamplerMode::Full);
            let b = oracle_joint(&inst, &topics, &parents, SamplerMode::Full);
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "seed {seed}: {a} vs {b}");
            lib.push(a);
            orc.push(b);
        }
        let m = orc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ev_lib: f64 = lib.iter().map(|x| (x - m).exp()).sum();
        let ev_orc: f64 = orc.iter().map(|x| (x - m).exp()).sum();
        assert!((ev_lib - ev_orc).abs() <= 1e-9 * ev_orc, "seed {seed}");
    }
}

#[test]
fn joint_invariant_under_topic_relabeling() {
    for seed in 300..340 {
        let mut inst = random_instance(seed, SamplerMode::Full);
        let k = inst.hyper.topics();
        // the invariance needs exchangeable topic priors
        inst.hyper.beta = vec![0.7; k];
        inst.hyper.gamma = vec![0.3; k];
        let base = library_joint(&inst, &inst.topics, &inst.parents, SamplerMode::Full);
        let shifted: Vec<usize> = inst.topics.iter().map(|t| (t + 1) % k).collect();
        let moved = library_joint(&inst, &shifted, &inst.parents, SamplerMode::Full);
        assert!((base - moved).abs() < 1e-9 * base.abs().max(1.0));
    }
}

#[test]
fn single_spontaneous_event_time_term() {
    use hmhp::model::{Dataset, Event, Hyperparameters, Network, ObservationWindow, Parent};
    let net = Network::from_edges(&[], [0]).unwrap();
    let mut e = Event::new(0, 0.5, 0);
    e.parent = Some(Parent::Spontaneous);
    let d = Dataset::new(net.clone(), ObservationWindow::new(0.0, 1.0).unwrap(), vec![e]);
    let groups = EdgeGroups::new(&net, hmhp::EdgeGrouping::PerEdge);
    let rates = RateParams {
        groups: &groups,
        w: &[],
        mu: &[1.0],
    };
    let ll: f64 = joint_log_likelihood(&d, &[0], &[None], &rates, &Hyperparameters::defaults(1, 1)).unwrap();
    assert!((ll + 1.0).abs() < 1e-15);
    assert!(joint_log_likelihood(&d, &[], &[None], &rates, &Hyperparameters::defaults(1, 1)).is_err());
}
