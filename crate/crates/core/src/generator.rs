//! Forward simulation: level-wise cascade generation on the follower graph,
//! then topics and documents along each cascade; plus the circular benchmark
//! network and the semi-synthetic dataset recipe.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_distr::Poisson;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    Dataset, EdgeGroups, EdgeGrouping, Event, EventId, Hyperparameters, ModelParameters, Network, ObservationWindow,
    Parent, Table,
};
use crate::rng::{dirichlet, domain, stream_rng, SimRng};
use crate::sampler::{self, CountStatistics, NodeTimeline, SamplerConfig, SamplerContext, SamplerMode};
use crate::scalar::Scalar;

/// Hard stop for runaway branching when no event cap is set.
const RUNAWAY_LIMIT: usize = 20_000_000;

#[derive(Debug, Clone)]
pub struct GeneratorConfig<F: Scalar = f64> {
    pub seed: u64,
    pub window: ObservationWindow<F>,
    /// Keep only the earliest `max_events` events.
    pub max_events: Option<usize>,
    /// Expand each level across threads. Output is identical either way.
    pub parallel: bool,
}

impl<F: Scalar> GeneratorConfig<F> {
    pub fn new(seed: u64, window: ObservationWindow<F>) -> Self {
        GeneratorConfig {
            seed,
            window,
            max_events: None,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GenerationReport {
    /// Events generated per level before truncation.
    pub level_counts: Vec<usize>,
    pub total_events: usize,
    /// Generated events removed by the `max_events` cap. Descendants of pruned
    /// events are never simulated and not counted.
    pub dropped_events: usize,
    pub warnings: Vec<String>,
}

/// Base-rate events: per node, a Poisson(μ_v·(T − start)) count of uniform times.
/// Returned in time order with provisional ids `0..n`.
pub fn sample_spontaneous_events<F: Scalar>(
    network: &Network,
    mu: &[F],
    window: &ObservationWindow<F>,
    seed: u64,
) -> Vec<Event<F>> {
    let len = window.length().as_f64();
    let mut out = Vec::new();
    for (v, m) in mu.iter().enumerate().take(network.node_count()) {
        let rate = m.as_f64() * len;
        if !(rate > 0.0) {
            continue;
        }
        let mut rng = stream_rng(seed, domain::SPONTANEOUS, v as u64);
        let n = Poisson::new(rate).expect("positive rate").sample(&mut rng) as usize;
        for _ in 0..n {
            let t = window.start.as_f64() + rng.gen::<f64>() * len;
            let mut e = Event::new(0, F::of(t), network.node_id(v));
            e.parent = Some(Parent::Spontaneous);
            out.push(e);
        }
    }
    out.sort_by(|a, b| a.time.partial_cmp(&b.time).expect("finite times").then(a.node.cmp(&b.node)));
    for (i, e) in out.iter_mut().enumerate() {
        e.id = i as EventId;
    }
    out
}

/// Direct children of `parent`: for each follower `v`, a
/// Poisson(W·(1 − e^{−(T − t)})) count with lags from the unit exponential
/// truncated to `(0, T − t)`. Children get `parent = parent.id` and id 0; the
/// caller assigns ids.
pub fn sample_children<F: Scalar, R: Rng + ?Sized>(
    parent: &Event<F>,
    network: &Network,
    params: &ModelParameters<F>,
    window: &ObservationWindow<F>,
    rng: &mut R,
) -> Vec<Event<F>> {
    let Some(u) = network.dense(parent.node) else {
        return Vec::new();
    };
    let remaining = (window.horizon - parent.time).as_f64();
    if !(remaining > 0.0) {
        return Vec::new();
    }
    let mass = 1.0 - (-remaining).exp();
    let mut out = Vec::new();
    for &edge in network.out_edges(u) {
        let rate = params.edge_strength(edge).as_f64() * mass;
        if !(rate > 0.0) {
            continue;
        }
        let n = Poisson::new(rate).expect("positive rate").sample(rng) as usize;
        let v = network.edges()[edge].1;
        for _ in 0..n {
            let q: f64 = rng.gen();
            let lag = -(-q * mass).ln_1p();
            let t = parent.time + F::of(lag);
            // rounding can land exactly on the parent time or the horizon
            if !(t > parent.time) || t >= window.horizon {
                continue;
            }
            let mut child = Event::new(0, t, network.node_id(v));
            child.parent = Some(Parent::Event(parent.id));
            out.push(child);
        }
    }
    out
}

/// Simulates `(t, c, z)` for all events. Level 0 holds base-rate events; level
/// `l` holds the children of level `l − 1`. Output ids are reassigned in time
/// order.
pub fn generate_cascades<F: Scalar>(
    network: &Network,
    params: &ModelParameters<F>,
    config: &GeneratorConfig<F>,
) -> Result<(Dataset<F>, GenerationReport)> {
    if config.max_events == Some(0) {
        return Err(Error::invalid("max_events must be >= 1"));
    }
    let mut report = GenerationReport::default();
    for u in 0..network.node_count() {
        let total: f64 = network.out_edges(u).iter().map(|&e| params.edge_strength(e).as_f64()).sum();
        if total >= 5.0 {
            report.warnings.push(format!(
                "node {} has total outgoing strength {total:.3}; branching is likely supercritical",
                network.node_id(u)
            ));
        }
    }
    let mut all = sample_spontaneous_events(network, &params.mu, &config.window, config.seed);
    let mut level: Vec<usize> = (0..all.len()).collect();
    // lineage keys seed each event's child stream, independent of pruning
    let mut lineage: Vec<u64> = (0..all.len() as u64).collect();
    report.level_counts.push(all.len());
    let cap = config.max_events.unwrap_or(usize::MAX);
    let mut cutoff = time_cutoff(&all, cap);
    let mut pruned = 0usize;
    while !level.is_empty() {
        let expand = |&i: &usize| {
            let mut rng: SimRng = stream_rng(config.seed, domain::CHILDREN, lineage[i]);
            (i, sample_children(&all[i], network, params, &config.window, &mut rng))
        };
        let batches: Vec<(usize, Vec<Event<F>>)> = if config.parallel {
            level.par_iter().map(expand).collect()
        } else {
            level.iter().map(expand).collect()
        };
        let mut next = Vec::new();
        let mut produced = 0usize;
        for (parent, children) in batches {
            for (ordinal, mut child) in children.into_iter().enumerate() {
                produced += 1;
                if cutoff.is_some_and(|c| child.time > c) {
                    pruned += 1;
                    continue;
                }
                child.id = all.len() as EventId;
                next.push(all.len());
                lineage.push(mix_key(lineage[parent], ordinal as u64));
                all.push(child);
            }
        }
        if produced == 0 {
            break;
        }
        report.level_counts.push(produced);
        if config.max_events.is_none() && all.len() > RUNAWAY_LIMIT {
            return Err(Error::Domain(format!(
                "generation exceeded {RUNAWAY_LIMIT} events; strengths are supercritical"
            )));
        }
        cutoff = time_cutoff(&all, cap);
        level = next;
    }
    let mut order: Vec<usize> = (0..all.len()).collect();
    order.sort_by(|&a, &b| {
        all[a].time.partial_cmp(&all[b].time).expect("finite times").then(all[a].id.cmp(&all[b].id))
    });
    report.dropped_events = pruned + order.len().saturating_sub(cap);
    order.truncate(cap);
    let mut new_id = vec![EventId::MAX; all.len()];
    for (rank, &i) in order.iter().enumerate() {
        new_id[i] = rank as EventId;
    }
    let events: Vec<Event<F>> = order
        .iter()
        .map(|&i| {
            let mut e = all[i].clone();
            e.id = new_id[i];
            if let Some(Parent::Event(p)) = e.parent {
                e.parent = Some(Parent::Event(new_id[p as usize]));
            }
            e
        })
        .collect();
    report.total_events = events.len();
    Ok((Dataset::new(network.clone(), config.window, events), report))
}

fn mix_key(parent: u64, ordinal: u64) -> u64 {
    let mut z = parent
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(ordinal.wrapping_add(1).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Time of the `cap`-th earliest event, once at least `cap` exist.
fn time_cutoff<F: Scalar>(events: &[Event<F>], cap: usize) -> Option<F> {
    if cap == usize::MAX || events.len() < cap {
        return None;
    }
    let mut times: Vec<F> = events.iter().map(|e| e.time).collect();
    let (_, t, _) = times.select_nth_unstable_by(cap - 1, |a, b| a.partial_cmp(b).expect("finite"));
    Some(*t)
}

fn row_sampler<F: Scalar>(t: &Table<F>) -> Vec<WeightedIndex<f64>> {
    t.iter_rows()
        .map(|r| WeightedIndex::new(r.iter().map(|x| x.as_f64())).expect("row with positive mass"))
        .collect()
}

/// Draws every event's topic (from φ of its node if spontaneous, else from the
/// 𝒯 row of its parent's topic), a Poisson(λ) length (redrawn once if zero,
/// then floored at one) and its tokens from ζ of the topic.
pub fn generate_documents<F: Scalar>(
    dataset: &Dataset<F>,
    params: &ModelParameters<F>,
    doc_length_rate: F,
    seed: u64,
) -> Result<Dataset<F>> {
    let phi = row_sampler(&params.phi);
    let trans = row_sampler(&params.trans);
    let zeta = row_sampler(&params.zeta);
    let lengths = Poisson::new(doc_length_rate.as_f64()).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = stream_rng(seed, domain::DOCUMENTS, 0);
    let n = dataset.len();
    let mut topics: Vec<Option<usize>> = vec![None; n];
    let mut out = dataset.clone();
    let events = out.events().to_vec();
    let mut filled = Vec::with_capacity(n);
    for (i, e) in events.into_iter().enumerate() {
        let topic = match dataset.parent_position(i) {
            Some(None) => phi[dataset.node_of(i)].sample(&mut rng),
            Some(Some(p)) => {
                let kp = topics[p].ok_or_else(|| {
                    Error::invalid(format!("parent of event {} has no topic yet", e.id))
                })?;
                trans[kp].sample(&mut rng)
            }
            None => return Err(Error::invalid(format!("event {} has no parent label", e.id))),
        };
        topics[i] = Some(topic);
        let mut len = lengths.sample(&mut rng) as usize;
        if len == 0 {
            len = (lengths.sample(&mut rng) as usize).max(1);
        }
        let tokens = (0..len).map(|_| zeta[topic].sample(&mut rng) as u32).collect();
        filled.push(Event {
            tokens,
            topic: Some(topic),
            ..e
        });
    }
    out = Dataset::new(out.network.clone(), out.window, filled);
    Ok(out)
}

/// Ring of `n` nodes with a self edge (W = 0.3) and an edge to the successor
/// (W = 0.15) at every node. Strengths follow network edge order.
pub fn build_circular_network<F: Scalar>(n: usize) -> Result<(Network, Vec<F>)> {
    if n < 2 {
        return Err(Error::Domain("circular network needs at least 2 nodes".into()));
    }
    let edges: Vec<(u64, u64)> = (0..n as u64).flat_map(|i| [(i, i), (i, (i + 1) % n as u64)]).collect();
    let net = Network::from_edges(&edges, [])?;
    let w = net
        .edges()
        .iter()
        .map(|&(u, v)| if u == v { F::of(0.3) } else { F::of(0.15) })
        .collect();
    Ok((net, w))
}

/// `nodes` nodes, each following `followees` distinct others drawn uniformly.
pub fn random_follow_network(nodes: usize, followees: usize, seed: u64) -> Result<Network> {
    if followees >= nodes {
        return Err(Error::Domain("each node needs at least `followees` other nodes".into()));
    }
    let mut rng = stream_rng(seed, domain::NETWORK, 0);
    let mut edges = Vec::with_capacity(nodes * followees);
    for v in 0..nodes as u64 {
        for u in rand::seq::index::sample(&mut rng, nodes - 1, followees) {
            let u = u as u64;
            edges.push((if u >= v { u + 1 } else { u }, v));
        }
    }
    Network::from_edges(&edges, 0..nodes as u64)
}

/// φ with node `i` preferring only topic `i mod K`.
pub fn one_hot_preferences<F: Scalar>(nodes: usize, topics: usize) -> Table<F> {
    let mut t = Table::filled(nodes, topics, F::zero());
    for i in 0..nodes {
        t[(i, i % topics)] = F::one();
    }
    t
}

/// Strengths and base rates for [`sample_model_parameters`].
#[derive(Debug, Clone)]
pub struct RateSpec<F = f64> {
    pub groups: EdgeGroups,
    pub w: Vec<F>,
    pub mu: Vec<F>,
}

impl<F: Scalar> RateSpec<F> {
    /// Default rates: μ = 0.01/h and, per degree group, W = 0.5 / out-degree of
    /// the source, giving every node an expected 0.5 direct children per event.
    pub fn defaults(network: &Network) -> Self {
        let groups = EdgeGroups::new(network, EdgeGrouping::Degree);
        let w = (0..groups.len())
            .map(|g| {
                let (u, _) = network.edges()[groups.members(g)[0]];
                F::of(0.5 / network.out_degree(u) as f64)
            })
            .collect();
        RateSpec {
            groups,
            w,
            mu: vec![F::of(0.01); network.node_count()],
        }
    }

    pub fn per_edge(network: &Network, w: Vec<F>, mu: Vec<F>) -> Self {
        RateSpec {
            groups: EdgeGroups::new(network, EdgeGrouping::PerEdge),
            w,
            mu,
        }
    }
}

/// Draws ζ_k ~ Dir(α), 𝒯_k ~ Dir(β), φ_v ~ Dir(γ); strengths and base rates
/// come from `rates` (or [`RateSpec::defaults`]).
pub fn sample_model_parameters<F: Scalar>(
    network: &Network,
    hyper: &Hyperparameters<F>,
    seed: u64,
    rates: Option<RateSpec<F>>,
) -> Result<ModelParameters<F>> {
    hyper.validate()?;
    let rates = rates.unwrap_or_else(|| RateSpec::defaults(network));
    if rates.w.len() != rates.groups.len() || rates.mu.len() != network.node_count() {
        return Err(Error::invalid("rate vectors do not match the network"));
    }
    let mut rng = stream_rng(seed, domain::PARAMETERS, 0);
    let k = hyper.topics();
    let draw_rows = |n: usize, conc: &[F], rng: &mut SimRng| {
        Table::from_rows((0..n).map(|_| dirichlet(conc, rng)).collect()).expect("rectangular")
    };
    let zeta = draw_rows(k, &hyper.alpha, &mut rng);
    let trans = draw_rows(k, &hyper.beta, &mut rng);
    let phi = draw_rows(network.node_count(), &hyper.gamma, &mut rng);
    Ok(ModelParameters {
        mu: rates.mu,
        groups: rates.groups,
        w: rates.w,
        zeta,
        phi,
        trans,
    })
}

/// Parent of each event := the latest strictly earlier event at a followee no
/// more than `parent_window` hours before it; spontaneous when there is none.
pub fn heuristic_parent_assignment<F: Scalar>(source: &Dataset<F>, parent_window: F) -> Dataset<F> {
    let timeline = NodeTimeline::new(source);
    let parents: Vec<Parent> = (0..source.len())
        .map(|i| {
            timeline
                .candidates(i, source, parent_window, 1)
                .first()
                .map_or(Parent::Spontaneous, |c| Parent::Event(source.events()[c.event].id))
        })
        .collect();
    source.relabel(None, Some(&parents))
}

/// Point estimates from a fully labeled dataset: smoothed ζ̂, φ̂, 𝒯̂; pooled
/// Gamma-posterior-mean strengths per group; μ_v = spontaneous(v) / (T − start).
pub fn estimate_semisynth_parameters<F: Scalar>(
    labeled: &Dataset<F>,
    hyper: &Hyperparameters<F>,
    grouping: EdgeGrouping,
) -> Result<ModelParameters<F>> {
    hyper.validate()?;
    let n = labeled.len();
    let mut topics = Vec::with_capacity(n);
    let mut parents = Vec::with_capacity(n);
    for (i, e) in labeled.events().iter().enumerate() {
        let k = e.topic.ok_or_else(|| Error::invalid(format!("event {} has no topic label", e.id)))?;
        if k >= hyper.topics() {
            return Err(Error::invalid(format!("event {} topic {k} outside [0, K)", e.id)));
        }
        topics.push(k);
        parents.push(
            labeled
                .parent_position(i)
                .ok_or_else(|| Error::invalid(format!("event {} has no parent label", e.id)))?,
        );
    }
    if labeled.max_token_bound() > hyper.vocab_size() {
        return Err(Error::invalid("token outside vocabulary"));
    }
    let ctx = SamplerContext::new(labeled, hyper.clone(), grouping, F::infinity(), 0);
    for (e, p) in parents.iter().enumerate() {
        if let Some(p) = *p {
            if ctx.edge_between_events(p, e).is_none() {
                return Err(Error::invalid(format!(
                    "event {} has a parent that is not at a followee",
                    labeled.events()[e].id
                )));
            }
        }
    }
    let counts = CountStatistics::tally(&ctx, &topics, &parents);
    let est = sampler::estimate_parameters(&counts, &hyper.alpha, &hyper.beta, &hyper.gamma, SamplerMode::Full);
    let w = sampler::update_edge_strengths(&counts.edge_pairs, &counts.source_exposure, hyper.w_prior_shape, hyper.w_prior_scale);
    let len = labeled.window.length();
    let mu = counts.spontaneous.iter().map(|&s| F::of(s as f64) / len).collect();
    Ok(ModelParameters {
        mu,
        groups: ctx.groups.clone(),
        w,
        zeta: est.zeta,
        phi: est.phi,
        trans: est.trans,
    })
}

/// Inputs of the semi-synthetic recipe.
#[derive(Debug, Clone)]
pub struct SemiSynthRecipe<F: Scalar = f64> {
    /// Real events without gold labels.
    pub source: Dataset<F>,
    pub topics: usize,
    pub doc_length_rate: F,
    pub parent_window: F,
    /// Sweeps of the decoupled-mode topic fit.
    pub topic_sweeps: usize,
    pub grouping: EdgeGrouping,
}

/// Fits parameters to `source` (heuristic parents, decoupled-mode topics, then
/// count estimates) and simulates a fresh labeled dataset over the same window.
pub fn build_semisynthetic<F: Scalar>(
    recipe: &SemiSynthRecipe<F>,
    seed: u64,
    max_events: Option<usize>,
) -> Result<(Dataset<F>, ModelParameters<F>, GenerationReport)> {
    if !(recipe.parent_window > F::zero()) {
        return Err(Error::invalid("parent window must be positive"));
    }
    let vocab = recipe.source.max_token_bound().max(1);
    let mut hyper = Hyperparameters::defaults(recipe.topics, vocab);
    hyper.doc_length_rate = recipe.doc_length_rate;
    let with_parents = heuristic_parent_assignment(&recipe.source, recipe.parent_window);
    let mut cfg = SamplerConfig::new(hyper.clone());
    cfg.mode = SamplerMode::Decoupled;
    cfg.iterations = recipe.topic_sweeps;
    cfg.burn_in = recipe.topic_sweeps.saturating_sub(1);
    cfg.seed = seed;
    cfg.record_trace = false;
    cfg.candidate_window = recipe.parent_window;
    let fit = sampler::run_gibbs(&recipe.source, &cfg)?;
    let labeled = with_parents.relabel(Some(&fit.topics), None);
    let params = estimate_semisynth_parameters(&labeled, &hyper, recipe.grouping)?;
    let mut gen = GeneratorConfig::new(seed, recipe.source.window);
    gen.max_events = max_events;
    let (cascades, report) = generate_cascades(&recipe.source.network, &params, &gen)?;
    let docs = generate_documents(&cascades, &params, recipe.doc_length_rate, seed)?;
    Ok((docs, params, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{impulse_response, validate_dataset};

    fn circular_params(n: usize, mu: f64, k: usize, seed: u64) -> (Network, ModelParameters) {
        let (net, w) = build_circular_network::<f64>(n).unwrap();
        let hyper = Hyperparameters::symmetric(k, 20, 0.1, 0.01, 0.1);
        let mut p = sample_model_parameters(&net, &hyper, seed, Some(RateSpec::per_edge(&net, w, vec![mu; n]))).unwrap();
        p.phi = one_hot_preferences(n, k);
        (net, p)
    }

    #[test]
    fn random_follow_network_degrees() {
        let net = random_follow_network(30, 4, 9).unwrap();
        assert_eq!(net.node_count(), 30);
        for v in 0..30 {
            assert_eq!(net.in_degree(v), 4);
            assert!(net.edge(v, v).is_none());
        }
        assert_eq!(net.edges(), random_follow_network(30, 4, 9).unwrap().edges());
        assert!(random_follow_network(4, 4, 0).is_err());
    }

    #[test]
    fn circular_network_shape() {
        let (net, w) = build_circular_network::<f64>(10).unwrap();
        assert_eq!(net.edge_count(), 20);
        for v in 0..10 {
            assert_eq!(net.out_degree(v), 2);
            assert_eq!(net.in_degree(v), 2);
        }
        for (e, &(u, v)) in net.edges().iter().enumerate() {
            let expected = if u == v { 0.3 } else { 0.15 };
            assert_eq!(w[e], expected);
            if u != v {
                assert_eq!(v, (u + 1) % 10);
            }
        }
        let key = crate::model::edge_group_key(3, 4, &net).unwrap();
        assert_eq!((key.source_out_degree, key.dest_in_degree), (2, 2));
        assert!(build_circular_network::<f64>(1).is_err());
    }

    #[test]
    fn impulse_response_on_ring() {
        let (net, p) = circular_params(10, 0.02, 10, 1);
        assert!((impulse_response(2, 2, 0.0, &net, &p).unwrap() - 0.3).abs() < 1e-15);
        assert!((impulse_response(2, 3, 2f64.ln(), &net, &p).unwrap() - 0.075).abs() < 1e-15);
        assert!(impulse_response(3, 2, 0.0, &net, &p).is_err());
        let mut zero = p.clone();
        zero.w.iter_mut().for_each(|w| *w = 0.0);
        assert_eq!(impulse_response(2, 3, 0.7, &net, &zero).unwrap(), 0.0);
    }

    #[test]
    fn zero_rates_give_nothing() {
        let (net, mut p) = circular_params(4, 0.0, 2, 1);
        let win = ObservationWindow::new(0.0, 100.0).unwrap();
        assert!(sample_spontaneous_events(&net, &p.mu, &win, 3).is_empty());
        p.mu = vec![0.5; 4];
        p.w.iter_mut().for_each(|w| *w = 0.0);
        let (d, report) = generate_cascades(&net, &p, &GeneratorConfig::new(3, win)).unwrap();
        assert!(d.events().iter().all(|e| e.parent == Some(Parent::Spontaneous)));
        assert_eq!(report.level_counts.len(), 1);
        let mut rng = stream_rng(0, 0, 0);
        assert!(sample_children(&d.events()[0], &net, &p, &win, &mut rng).is_empty());
    }

    #[test]
    fn deterministic_and_parallel_invariant() {
        let (net, p) = circular_params(10, 0.02, 10, 2);
        let win = ObservationWindow::new(0.0, 2000.0).unwrap();
        let mut cfg = GeneratorConfig::new(11, win);
        let (a, _) = generate_cascades(&net, &p, &cfg).unwrap();
        let (b, _) = generate_cascades(&net, &p, &cfg).unwrap();
        cfg.parallel = true;
        let (c, _) = generate_cascades(&net, &p, &cfg).unwrap();
        assert_eq!(a.events(), b.events());
        assert_eq!(a.events(), c.events());
        assert!(validate_dataset(&a).is_empty());
    }

    #[test]
    fn max_events_keeps_earliest() {
        let (net, p) = circular_params(10, 0.02, 10, 2);
        let win = ObservationWindow::new(0.0, 3000.0).unwrap();
        let (full, _) = generate_cascades(&net, &p, &GeneratorConfig::new(5, win)).unwrap();
        let mut cfg = GeneratorConfig::new(5, win);
        cfg.max_events = Some(100);
        let (cut, report) = generate_cascades(&net, &p, &cfg).unwrap();
        assert_eq!(cut.len(), 100);
        assert!(report.dropped_events > 0 && report.dropped_events <= full.len() - 100);
        let t_full: Vec<f64> = full.events()[..100].iter().map(|e| e.time).collect();
        let t_cut: Vec<f64> = cut.events().iter().map(|e| e.time).collect();
        assert_eq!(t_full, t_cut);
        assert!(validate_dataset(&cut).is_empty());
    }

    #[test]
    fn supercritical_warning() {
        let net = Network::from_edges(&[(0, 1), (1, 0)], []).unwrap();
        let rates = RateSpec::per_edge(&net, vec![6.0, 0.0], vec![0.0, 0.0]);
        let p = sample_model_parameters(&net, &Hyperparameters::defaults(2, 2), 0, Some(rates)).unwrap();
        let (_, report) = generate_cascades(&net, &p, &GeneratorConfig::new(0, ObservationWindow::new(0.0, 1.0).unwrap())).unwrap();
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn identity_transitions_keep_cascades_single_topic() {
        let (net, mut p) = circular_params(10, 0.05, 4, 3);
        p.trans = one_hot_preferences(4, 4);
        let win = ObservationWindow::new(0.0, 1000.0).unwrap();
        let (d, _) = generate_cascades(&net, &p, &GeneratorConfig::new(1, win)).unwrap();
        let d = generate_documents(&d, &p, 7.0, 9).unwrap();
        for (i, e) in d.events().iter().enumerate() {
            if let Some(Some(pi)) = d.parent_position(i) {
                assert_eq!(e.topic, d.events()[pi].topic);
            }
            assert!(!e.tokens.is_empty());
        }
    }

    #[test]
    fn single_topic_uses_single_zeta_row() {
        let (net, mut p) = circular_params(3, 0.1, 1, 3);
        p.zeta = Table::from_rows(vec![vec![0.0, 1.0, 0.0]]).unwrap();
        let (d, _) = generate_cascades(&net, &p, &GeneratorConfig::new(1, ObservationWindow::new(0.0, 200.0).unwrap())).unwrap();
        let d = generate_documents(&d, &p, 3.0, 2).unwrap();
        assert!(d.events().iter().all(|e| e.topic == Some(0) && e.tokens.iter().all(|&w| w == 1)));
    }

    #[test]
    fn sampled_parameters_are_stochastic_and_seeded() {
        let (net, _) = build_circular_network::<f64>(5).unwrap();
        let hyper = Hyperparameters::symmetric(6, 30, 0.1, 0.01, 0.1);
        let a = sample_model_parameters(&net, &hyper, 4, None).unwrap();
        let b = sample_model_parameters(&net, &hyper, 4, None).unwrap();
        assert_eq!(a, b);
        assert!(a.validate(1e-9).is_ok());
        let flat = Hyperparameters::symmetric(6, 30, 1e6, 1e6, 1e6);
        let c = sample_model_parameters(&net, &flat, 4, None).unwrap();
        let dev = c.trans.as_slice().iter().map(|x: &f64| (x - 1.0 / 6.0).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-2);
    }

    fn event(id: u64, t: f64, node: u64) -> Event {
        Event::new(id, t, node)
    }

    #[test]
    fn heuristic_parents() {
        let net = Network::from_edges(&[(1, 3), (2, 3)], []).unwrap();
        let win = ObservationWindow::new(0.0, 100.0).unwrap();
        let d = Dataset::new(net.clone(), win, vec![event(0, 8.0, 1), event(1, 9.0, 2), event(2, 10.0, 3)]);
        let h = heuristic_parent_assignment(&d, 24.0);
        assert_eq!(h.events()[2].parent, Some(Parent::Event(1)));
        assert_eq!(h.events()[0].parent, Some(Parent::Spontaneous));
        let far = Dataset::new(net, win, vec![event(0, 1.0, 1), event(2, 26.0, 3)]);
        let h = heuristic_parent_assignment(&far, 24.0);
        assert_eq!(h.events()[1].parent, Some(Parent::Spontaneous));
    }

    #[test]
    fn semisynth_estimates() {
        let net = Network::from_edges(&[(1, 2)], [3]).unwrap();
        let win = ObservationWindow::new(0.0, 1.0e6).unwrap();
        // five 0 -> 1 topic transitions along the single edge
        let mut evs = Vec::new();
        for i in 0..5u64 {
            let mut p = event(2 * i, 10.0 * i as f64, 1);
            p.topic = Some(0);
            p.parent = Some(Parent::Spontaneous);
            let mut c = event(2 * i + 1, 10.0 * i as f64 + 0.5, 2);
            c.topic = Some(1);
            c.parent = Some(Parent::Event(2 * i));
            evs.push(p);
            evs.push(c);
        }
        let d = Dataset::new(net, win, evs);
        let mut hyper = Hyperparameters::<f64>::symmetric(2, 2, 0.1, 0.5, 0.5);
        hyper.w_prior_shape = 2.0;
        hyper.w_prior_scale = 1.0;
        let p = estimate_semisynth_parameters(&d, &hyper, EdgeGrouping::Degree).unwrap();
        assert!(p.trans[(0, 1)] > p.trans[(0, 0)]);
        let node3 = d.network.dense(3).unwrap();
        assert_eq!(p.mu[node3], 0.0);
        // 5 pairs over ~5 source events far from the horizon: (2 + 5) / (1 + 5)
        assert!((p.w[0] - 7.0 / 6.0).abs() < 1e-9);
        let unlabeled = d.map_events(|e| e.topic = None);
        assert!(estimate_semisynth_parameters(&unlabeled, &hyper, EdgeGrouping::Degree).is_err());
    }
}
