//! Brute-force reference for the sampler conditionals: the joint probability of
//! a labeled instance written out factor by factor (ascending factorials for the
//! integrated Dirichlet parts, explicit Hawkes terms), normalized over every
//! alternative value of one variable.

use hmhp::model::{Dataset, EdgeGrouping, EdgeGroups, Event, Hyperparameters, Network, ObservationWindow};
use hmhp::sampler::{parent_conditional, topic_conditional, SamplerContext, SamplerMode, SamplerState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub dataset: Dataset,
    pub hyper: Hyperparameters,
    pub grouping: EdgeGrouping,
    pub w: Vec<f64>,
    pub mu: Vec<f64>,
    pub topics: Vec<usize>,
    pub parents: Vec<Option<usize>>,
}

/// Random instance with at most 5 events, 3 topics, 3 words and 3 nodes. Parents
/// are drawn among strictly earlier events at followees; in diagonal mode
/// children copy their parent's topic.
pub fn random_instance(seed: u64, mode: SamplerMode) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = rng.gen_range(1..=3u64);
    let mut edges = Vec::new();
    for u in 0..nodes {
        for v in 0..nodes {
            if rng.gen_bool(0.6) {
                edges.push((u, v));
            }
        }
    }
    let network = Network::from_edges(&edges, 0..nodes).unwrap();
    let horizon = rng.gen_range(2.0..6.0);
    let k = rng.gen_range(1..=3usize);
    let vocab = rng.gen_range(1..=3usize);
    let n = rng.gen_range(1..=5u64);
    let coarse = rng.gen_bool(0.3);
    let events: Vec<Event> = (0..n)
        .map(|id| {
            let mut t: f64 = rng.gen_range(0.0..horizon);
            if coarse {
                t = (t * 2.0).floor() / 2.0;
            }
            let mut e = Event::new(id, t, rng.gen_range(0..nodes));
            e.tokens = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..vocab as u32)).collect();
            e
        })
        .collect();
    let dataset = Dataset::new(network, ObservationWindow::new(0.0, horizon).unwrap(), events);
    let mut draw = |len: usize| (0..len).map(|_| rng.gen_range(0.05..2.0)).collect::<Vec<f64>>();
    let mut hyper = Hyperparameters::symmetric(k, vocab, 1.0, 1.0, 1.0);
    hyper.alpha = draw(vocab);
    hyper.beta = draw(k);
    hyper.gamma = draw(k);
    let grouping = if rng.gen_bool(0.5) { EdgeGrouping::PerEdge } else { EdgeGrouping::Degree };
    let groups = EdgeGroups::new(&dataset.network, grouping);
    let w = (0..groups.len()).map(|_| rng.gen_range(0.05..1.5)).collect();
    let mu = (0..nodes).map(|_| rng.gen_range(0.05..1.0)).collect();
    let ctx = SamplerContext::new(&dataset, hyper.clone(), grouping, f64::INFINITY, 100);
    let mut topics: Vec<usize> = (0..dataset.len()).map(|_| rng.gen_range(0..k)).collect();
    let parents: Vec<Option<usize>> = (0..dataset.len())
        .map(|e| {
            let c = &ctx.candidates[e];
            let pick = rng.gen_range(0..=c.len());
            c.get(pick).map(|c| c.event)
        })
        .collect();
    if mode == SamplerMode::Diagonal {
        for e in 0..topics.len() {
            if let Some(p) = parents[e] {
                topics[e] = topics[p];
            }
        }
    }
    drop(ctx);
    Instance {
        dataset,
        hyper,
        grouping,
        w,
        mu,
        topics,
        parents,
    }
}

/// `ln Π_i a_i^(n_i) / A^(N)` with rising factorials `x^(n) = x (x+1) ... (x+n-1)`.
fn ln_polya(counts: &[u32], prior: &[f64]) -> f64 {
    let mut s = 0.0;
    let total: u32 = counts.iter().sum();
    let prior_sum: f64 = prior.iter().sum();
    for (&c, &a) in counts.iter().zip(prior) {
        for j in 0..c {
            s += (a + j as f64).ln();
        }
    }
    for j in 0..total {
        s -= (prior_sum + j as f64).ln();
    }
    s
}

fn edge_of(d: &Dataset, p: usize, e: usize) -> usize {
    let net = &d.network;
    net.edge(d.node_of(p), d.node_of(e)).expect("parent at a followee")
}

/// Log joint of the instance's data with `topics` and `parents`, with the
/// Dirichlet-distributed parameters integrated out.
pub fn oracle_joint(inst: &Instance, topics: &[usize], parents: &[Option<usize>], mode: SamplerMode) -> f64 {
    let d = &inst.dataset;
    let h = &inst.hyper;
    let k = h.topics();
    let vocab = h.vocab_size();
    let nodes = d.network.node_count();
    let events = d.events();
    let mut word = vec![vec![0u32; vocab]; k];
    let mut trans = vec![vec![0u32; k]; k];
    let mut user = vec![vec![0u32; k]; nodes];
    let mut global = vec![0u32; k];
    for (e, ev) in events.iter().enumerate() {
        for &t in &ev.tokens {
            word[topics[e]][t as usize] += 1;
        }
        global[topics[e]] += 1;
        match parents[e] {
            Some(p) => {
                if mode == SamplerMode::Diagonal && topics[p] != topics[e] {
                    return f64::NEG_INFINITY;
                }
                trans[topics[p]][topics[e]] += 1;
            }
            None => user[d.node_of(e)][topics[e]] += 1,
        }
    }
    let mut ll: f64 = word.iter().map(|r| ln_polya(r, &h.alpha)).sum();
    match mode {
        SamplerMode::Full => {
            ll += trans.iter().map(|r| ln_polya(r, &h.beta)).sum::<f64>();
            ll += user.iter().map(|r| ln_polya(r, &h.gamma)).sum::<f64>();
        }
        SamplerMode::Diagonal => ll += user.iter().map(|r| ln_polya(r, &h.gamma)).sum::<f64>(),
        SamplerMode::Decoupled => ll += ln_polya(&global, &h.gamma),
    }
    let groups = EdgeGroups::new(&d.network, inst.grouping);
    let strength = |edge: usize| inst.w[groups.group_of(edge)];
    let (start, horizon) = (d.window.start, d.window.horizon);
    for (e, ev) in events.iter().enumerate() {
        match parents[e] {
            Some(p) => ll += strength(edge_of(d, p, e)).ln() - (ev.time - events[p].time),
            None => ll += inst.mu[d.node_of(e)].ln(),
        }
        let u = d.node_of(e);
        for v in 0..nodes {
            if let Some(edge) = d.network.edge(u, v) {
                ll -= strength(edge) * (1.0 - (-(horizon - ev.time)).exp());
            }
        }
    }
    ll -= inst.mu.iter().sum::<f64>() * (horizon - start);
    ll
}

fn normalize(mut lw: Vec<f64>) -> Vec<f64> {
    let m = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = lw.iter().map(|x| (x - m).exp()).sum();
    lw.iter_mut().for_each(|x| *x = (*x - m).exp() / z);
    lw
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn subtree(parents: &[Option<usize>], root: usize) -> Vec<usize> {
    let mut out = vec![root];
    for (e, parent) in parents.iter().enumerate().skip(root + 1) {
        if parent.is_some_and(|p| out.contains(&p)) {
            out.push(e);
        }
    }
    out
}

pub fn oracle_topic_conditional(inst: &Instance, e: usize, mode: SamplerMode) -> Vec<f64> {
    let k = inst.hyper.topics();
    if mode == SamplerMode::Diagonal {
        if let Some(p) = inst.parents[e] {
            let mut out = vec![0.0; k];
            out[inst.topics[p]] = 1.0;
            return out;
        }
    }
    let members = if mode == SamplerMode::Diagonal { subtree(&inst.parents, e) } else { vec![e] };
    let lw = (0..k)
        .map(|t| {
            let mut topics = inst.topics.clone();
            for &m in &members {
                topics[m] = t;
            }
            oracle_joint(inst, &topics, &inst.parents, mode)
        })
        .collect();
    normalize(lw)
}

/// Over `options` (candidate positions) followed by spontaneity.
pub fn oracle_parent_conditional(inst: &Instance, e: usize, options: &[usize], mode: SamplerMode) -> Vec<f64> {
    let k = inst.hyper.topics();
    let members = subtree(&inst.parents, e);
    let joint_with = |parent: Option<usize>, topic: Option<usize>| {
        let mut parents = inst.parents.clone();
        parents[e] = parent;
        let mut topics = inst.topics.clone();
        if let Some(t) = topic {
            for &m in &members {
                topics[m] = t;
            }
        }
        oracle_joint(inst, &topics, &parents, mode)
    };
    let mut lw: Vec<f64> = options
        .iter()
        .map(|&p| {
            let carried = (mode == SamplerMode::Diagonal).then(|| inst.topics[p]);
            joint_with(Some(p), carried)
        })
        .collect();
    if mode == SamplerMode::Diagonal {
        let per_topic: Vec<f64> = (0..k).map(|t| joint_with(None, Some(t))).collect();
        lw.push(log_sum_exp(&per_topic));
    } else {
        lw.push(joint_with(None, None));
    }
    normalize(lw)
}

/// Largest absolute difference between library and oracle conditionals over
/// every topic and parent variable of the instance.
pub fn max_conditional_error(inst: &Instance, mode: SamplerMode) -> f64 {
    let ctx = SamplerContext::new(&inst.dataset, inst.hyper.clone(), inst.grouping, f64::INFINITY, 100);
    let mut st = SamplerState::from_assignments(
        &ctx,
        inst.topics.clone(),
        inst.parents.clone(),
        inst.w.clone(),
        inst.mu.clone(),
        0,
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    for e in 0..inst.dataset.len() {
        let got = topic_conditional(&ctx, &mut st, e, mode);
        let want = oracle_topic_conditional(inst, e, mode);
        for (a, b) in got.iter().zip(&want) {
            worst = worst.max((a - b).abs());
        }
        let options: Vec<usize> = ctx.candidates[e].iter().map(|c| c.event).collect();
        let got = parent_conditional(&ctx, &mut st, e, mode);
        let want = oracle_parent_conditional(inst, e, &options, mode);
        assert_eq!(got.len(), want.len());
        for (a, b) in got.iter().zip(&want) {
            worst = worst.max((a - b).abs());
        }
    }
    assert!(st.counts_consistent(&ctx), "conditionals must leave the counts untouched");
    worst
}
