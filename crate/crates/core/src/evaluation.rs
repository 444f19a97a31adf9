//! Reconstruction metrics against gold labels: parent accuracy and recall@k,
//! edge-strength errors, and topic agreement on sampled event pairs.

use std::collections::{BTreeMap, HashSet};

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Dataset, EdgeGrouping, ModelParameters, Network, NodeId, Parent};
use crate::rng::stream_rng;
use crate::scalar::Scalar;

const PAIR_DOMAIN: u64 = 0x7061_6972;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParentMetrics {
    /// Rank-1 matches over all events; spontaneity counts as a parent.
    pub accuracy: f64,
    pub recall_at: BTreeMap<usize, f64>,
    /// Rank-1 matches over events whose gold parent is an event.
    pub diffusion_accuracy: f64,
    pub events: usize,
    pub diffusion_events: usize,
}

fn gold_parents<F: Scalar>(gold: &Dataset<F>) -> Result<Vec<Parent>> {
    gold.events()
        .iter()
        .map(|e| e.parent.ok_or_else(|| Error::invalid(format!("event {} has no gold parent", e.id))))
        .collect()
}

/// Accuracy and recall@k from ranked parent lists (dataset order).
pub fn parent_metrics<F: Scalar, S>(gold: &Dataset<F>, ranked: &[Vec<(Parent, S)>], ks: &[usize]) -> Result<ParentMetrics> {
    let truth = gold_parents(gold)?;
    if ranked.len() != truth.len() {
        return Err(Error::invalid(format!(
            "{} ranked lists for {} gold events",
            ranked.len(),
            truth.len()
        )));
    }
    let rank_of: Vec<Option<usize>> = truth
        .iter()
        .zip(ranked)
        .map(|(g, list)| list.iter().position(|(p, _)| p == g))
        .collect();
    let n = truth.len();
    let frac = |hits: usize, of: usize| if of == 0 { 0.0 } else { hits as f64 / of as f64 };
    let top1 = rank_of.iter().filter(|r| **r == Some(0)).count();
    let mut recall_at = BTreeMap::new();
    for &k in ks {
        if k == 0 {
            return Err(Error::invalid("recall depth must be >= 1"));
        }
        let hits = rank_of.iter().filter(|r| r.is_some_and(|r| r < k)).count();
        recall_at.insert(k, frac(hits, n));
    }
    let diffusion: Vec<usize> = (0..n).filter(|&i| !truth[i].is_spontaneous()).collect();
    let diffusion_hits = diffusion.iter().filter(|&&i| rank_of[i] == Some(0)).count();
    Ok(ParentMetrics {
        accuracy: frac(top1, n),
        recall_at,
        diffusion_accuracy: frac(diffusion_hits, diffusion.len()),
        events: n,
        diffusion_events: diffusion.len(),
    })
}

/// Fraction of events whose single predicted parent equals the gold parent.
pub fn assignment_accuracy<F: Scalar>(gold: &Dataset<F>, predicted: &[Parent]) -> Result<f64> {
    let truth = gold_parents(gold)?;
    if predicted.len() != truth.len() {
        return Err(Error::invalid("prediction count differs from gold event count"));
    }
    if truth.is_empty() {
        return Ok(0.0);
    }
    let hits = truth.iter().zip(predicted).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Gold children generated by each node, `N_u`, keyed by node id.
pub fn children_per_node<F: Scalar>(gold: &Dataset<F>) -> Result<BTreeMap<NodeId, u64>> {
    let mut out: BTreeMap<NodeId, u64> = gold.network.node_ids().iter().map(|&u| (u, 0)).collect();
    for i in 0..gold.len() {
        match gold.parent_position(i) {
            Some(Some(p)) => *out.entry(gold.events()[p].node).or_default() += 1,
            Some(None) => {}
            None => return Err(Error::invalid(format!("event {} has no gold parent", gold.events()[i].id))),
        }
    }
    Ok(out)
}

/// A compared strength: gold and estimate plus the activity that decides
/// whether it counts as active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrengthPair {
    pub gold: f64,
    pub estimate: f64,
    pub activity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkError {
    pub mean_ape: f64,
    pub median_ape: f64,
    pub mean_ape_active: f64,
    pub median_ape_active: f64,
    pub tae: f64,
    pub evaluated: usize,
    pub active: usize,
    /// Units with gold strength 0: excluded from APE, included in TAE.
    pub excluded_zero: usize,
}

fn lower_median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    xs[(xs.len() - 1) / 2]
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        crate::scalar::pairwise_sum(xs) / xs.len() as f64
    }
}

/// APE statistics and TAE over keyed strengths. Keyed input makes the result
/// independent of edge enumeration order.
pub fn network_error<K: Ord>(pairs: &BTreeMap<K, StrengthPair>, active_threshold: u64) -> Result<NetworkError> {
    let mut ape = Vec::new();
    let mut ape_active = Vec::new();
    let mut abs = Vec::with_capacity(pairs.len());
    let mut excluded_zero = 0;
    for p in pairs.values() {
        if !(p.gold >= 0.0) || !p.estimate.is_finite() {
            return Err(Error::invalid("strengths must be finite and nonnegative"));
        }
        let err = (p.gold - p.estimate).abs();
        abs.push(err);
        if p.gold == 0.0 {
            excluded_zero += 1;
            continue;
        }
        ape.push(err / p.gold);
        if p.activity >= active_threshold {
            ape_active.push(err / p.gold);
        }
    }
    Ok(NetworkError {
        mean_ape: mean(&ape),
        mean_ape_active: mean(&ape_active),
        evaluated: ape.len(),
        active: ape_active.len(),
        median_ape: lower_median(&mut ape),
        median_ape_active: lower_median(&mut ape_active),
        tae: crate::scalar::pairwise_sum(&abs),
        excluded_zero,
    })
}

/// Pairs gold and estimated strengths on the network. Per-edge gold is compared
/// edge by edge; degree-grouped gold is compared per gold group, with the
/// estimate averaged over the group's edges and activity summed over the
/// distinct source nodes.
pub fn strength_pairs<F: Scalar>(
    network: &Network,
    gold: &ModelParameters<F>,
    estimate: &ModelParameters<F>,
    activity: &BTreeMap<NodeId, u64>,
) -> Result<BTreeMap<(NodeId, NodeId), StrengthPair>> {
    if gold.groups.edge_count() != network.edge_count() || estimate.groups.edge_count() != network.edge_count()
    {
        return Err(Error::invalid("strength tables do not match the network"));
    }
    let act = |u: usize| activity.get(&network.node_id(u)).copied().unwrap_or(0);
    let mut out = BTreeMap::new();
    match gold.groups.grouping() {
        EdgeGrouping::PerEdge => {
            for (e, &(u, v)) in network.edges().iter().enumerate() {
                out.insert(
                    (network.node_id(u), network.node_id(v)),
                    StrengthPair {
                        gold: gold.edge_strength(e).as_f64(),
                        estimate: estimate.edge_strength(e).as_f64(),
                        activity: act(u),
                    },
                );
            }
        }
        EdgeGrouping::Degree => {
            for g in 0..gold.groups.len() {
                let members = gold.groups.members(g);
                let est: f64 = members.iter().map(|&e| estimate.edge_strength(e).as_f64()).sum::<f64>() / members.len() as f64;
                let sources: HashSet<usize> = members.iter().map(|&e| network.edges()[e].0).collect();
                let (u, v) = network.edges()[members[0]];
                out.insert(
                    (network.node_id(u), network.node_id(v)),
                    StrengthPair {
                        gold: gold.w[g].as_f64(),
                        estimate: est,
                        activity: sources.into_iter().map(act).sum(),
                    },
                );
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicPairMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub pairs: usize,
    pub gold_same_pairs: usize,
    /// Fraction of sampled pairs that share a gold topic.
    pub achieved_balance: f64,
}

fn pair_key(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Samples up to `n_pairs` distinct event pairs, half of them sharing a gold
/// topic where possible, and scores "same predicted topic" against "same gold
/// topic". Any shortfall of same-topic pairs shows in `achieved_balance`.
pub fn topic_pair_metrics(gold: &[usize], predicted: &[usize], n_pairs: usize, seed: u64) -> Result<TopicPairMetrics> {
    if gold.len() != predicted.len() {
        return Err(Error::invalid("topic labelings cover different event counts"));
    }
    let n = gold.len();
    let total_pairs = n * n.saturating_sub(1) / 2;
    let mut by_topic: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &k) in gold.iter().enumerate() {
        by_topic.entry(k).or_default().push(i);
    }
    let groups: Vec<&Vec<usize>> = by_topic.values().collect();
    let same_available: usize = groups.iter().map(|g| g.len() * (g.len() - 1) / 2).sum();
    let diff_available = total_pairs - same_available;
    let want = n_pairs.min(total_pairs);
    let want_same = (want / 2).min(same_available);
    let want_diff = (want - want_same).min(diff_available);
    let mut rng = stream_rng(seed, PAIR_DOMAIN, 0);
    let mut chosen: HashSet<(usize, usize)> = HashSet::new();

    // same-topic pairs: group by pair count, then two distinct members
    if want_same == same_available {
        for g in &groups {
            for a in 0..g.len() {
                for b in a + 1..g.len() {
                    chosen.insert(pair_key(g[a], g[b]));
                }
            }
        }
    } else if want_same > 0 {
        let weights: Vec<f64> = groups.iter().map(|g| (g.len() * (g.len() - 1) / 2) as f64).collect();
        let pick = WeightedIndex::new(&weights).expect("some group has a pair");
        while chosen.len() < want_same {
            let g = groups[pick.sample(&mut rng)];
            let a = rng.gen_range(0..g.len());
            let mut b = rng.gen_range(0..g.len() - 1);
            if b >= a {
                b += 1;
            }
            chosen.insert(pair_key(g[a], g[b]));
        }
    }
    let target = chosen.len() + want_diff;
    if want_diff == diff_available {
        for i in 0..n {
            for j in i + 1..n {
                if gold[i] != gold[j] {
                    chosen.insert((i, j));
                }
            }
        }
    } else {
        while chosen.len() < target {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if gold[i] != gold[j] {
                chosen.insert(pair_key(i, j));
            }
        }
    }
    let mut sorted: Vec<(usize, usize)> = chosen.into_iter().collect();
    sorted.sort_unstable();
    let (mut tp, mut pred_same, mut gold_same) = (0usize, 0usize, 0usize);
    for &(i, j) in &sorted {
        let g = gold[i] == gold[j];
        let p = predicted[i] == predicted[j];
        gold_same += usize::from(g);
        pred_same += usize::from(p);
        tp += usize::from(g && p);
    }
    let precision = if pred_same == 0 { 0.0 } else { tp as f64 / pred_same as f64 };
    let recall = if gold_same == 0 { 0.0 } else { tp as f64 / gold_same as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(TopicPairMetrics {
        precision,
        recall,
        f1,
        pairs: sorted.len(),
        gold_same_pairs: gold_same,
        achieved_balance: if sorted.is_empty() { 0.0 } else { gold_same as f64 / sorted.len() as f64 },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub parent_accuracy: f64,
    pub recall_at: BTreeMap<usize, f64>,
    pub diffusion_accuracy: f64,
    pub assignment_accuracy: Option<f64>,
    pub mean_ape: Option<f64>,
    pub median_ape: Option<f64>,
    pub mean_ape_active: Option<f64>,
    pub median_ape_active: Option<f64>,
    pub tae: Option<f64>,
    pub excluded_zero_edges: Option<usize>,
    pub topic_precision: f64,
    pub topic_recall: f64,
    pub topic_f1: f64,
    pub topic_pairs: usize,
    pub topic_balance: f64,
}

impl EvalReport {
    pub fn new(parents: &ParentMetrics, topics: &TopicPairMetrics, network: Option<&NetworkError>) -> Self {
        EvalReport {
            parent_accuracy: parents.accuracy,
            recall_at: parents.recall_at.clone(),
            diffusion_accuracy: parents.diffusion_accuracy,
            assignment_accuracy: None,
            mean_ape: network.map(|n| n.mean_ape),
            median_ape: network.map(|n| n.median_ape),
            mean_ape_active: network.map(|n| n.mean_ape_active),
            median_ape_active: network.map(|n| n.median_ape_active),
            tae: network.map(|n| n.tae),
            excluded_zero_edges: network.map(|n| n.excluded_zero),
            topic_precision: topics.precision,
            topic_recall: topics.recall,
            topic_f1: topics.f1,
            topic_pairs: topics.pairs,
            topic_balance: topics.achieved_balance,
        }
    }

    /// Header and value lines for a flat CSV row.
    pub fn csv(&self) -> (String, String) {
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        let mut head = vec!["parent_accuracy".to_string()];
        let mut vals = vec![self.parent_accuracy.to_string()];
        for (k, r) in &self.recall_at {
            head.push(format!("recall_at_{k}"));
            vals.push(r.to_string());
        }
        let rest: [(&str, String); 13] = [
            ("diffusion_accuracy", self.diffusion_accuracy.to_string()),
            ("assignment_accuracy", opt(self.assignment_accuracy)),
            ("mean_ape", opt(self.mean_ape)),
            ("median_ape", opt(self.median_ape)),
            ("mean_ape_active", opt(self.mean_ape_active)),
            ("median_ape_active", opt(self.median_ape_active)),
            ("tae", opt(self.tae)),
            ("excluded_zero_edges", self.excluded_zero_edges.map_or(String::new(), |v| v.to_string())),
            ("topic_precision", self.topic_precision.to_string()),
            ("topic_recall", self.topic_recall.to_string()),
            ("topic_f1", self.topic_f1.to_string()),
            ("topic_pairs", self.topic_pairs.to_string()),
            ("topic_balance", self.topic_balance.to_string()),
        ];
        for (h, v) in rest {
            head.push(h.to_string());
            vals.push(v);
        }
        (head.join(","), vals.join(","))
    }
}
