use crate::model::{Dataset, EdgeGroups, EdgeGrouping, Hyperparameters};
use crate::scalar::Scalar;

/// A possible parent of an event: its position, the connecting edge and the lag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate<F = f64> {
    pub event: usize,
    pub edge: usize,
    pub lag: F,
}

/// Parent candidates of the event at position `i`: earlier events at followees of
/// its node (self-edges included when present) no more than `window` hours
/// older, keeping the `max_candidates` most recent. Most recent first; equal
/// times are ordered by descending position.
///
/// Spontaneity is an implicit extra outcome and is not listed.
pub fn parent_candidates<F: Scalar>(
    i: usize,
    dataset: &Dataset<F>,
    window: F,
    max_candidates: usize,
) -> Vec<Candidate<F>> {
    let by_node = NodeTimeline::new(dataset);
    by_node.candidates(i, dataset, window, max_candidates)
}

/// Per-node event positions in time order.
pub(crate) struct NodeTimeline {
    positions: Vec<Vec<usize>>,
}

impl NodeTimeline {
    pub(crate) fn new<F: Scalar>(dataset: &Dataset<F>) -> Self {
        let mut positions = vec![Vec::new(); dataset.network.node_count()];
        for i in 0..dataset.len() {
            positions[dataset.node_of(i)].push(i);
        }
        NodeTimeline { positions }
    }

    pub(crate) fn candidates<F: Scalar>(
        &self,
        i: usize,
        dataset: &Dataset<F>,
        window: F,
        max_candidates: usize,
    ) -> Vec<Candidate<F>> {
        let events = dataset.events();
        let t = events[i].time;
        let v = dataset.node_of(i);
        let net = &dataset.network;
        let mut out = Vec::new();
        for &edge in net.in_edges(v) {
            let u = net.edges()[edge].0;
            let list = &self.positions[u];
            // entries strictly earlier in time than t
            let end = list.partition_point(|&j| events[j].time < t);
            for &j in list[..end].iter().rev().take(max_candidates) {
                let lag = t - events[j].time;
                if lag > window {
                    break;
                }
                out.push(Candidate { event: j, edge, lag });
            }
        }
        out.sort_by_key(|c| std::cmp::Reverse(c.event));
        out.truncate(max_candidates);
        out
    }
}

/// Everything about a dataset the sampler needs that never changes during a run.
#[derive(Debug, Clone)]
pub struct SamplerContext<'a, F: Scalar = f64> {
    pub dataset: &'a Dataset<F>,
    pub hyper: Hyperparameters<F>,
    pub groups: EdgeGroups,
    /// Dense node per event.
    pub node: Vec<usize>,
    /// Sorted `(word, multiplicity)` per event.
    pub docs: Vec<Vec<(u32, u32)>>,
    pub doc_len: Vec<u32>,
    pub candidates: Vec<Vec<Candidate<F>>>,
    /// `1 − exp(−(T − t_e))` per event.
    pub survival: Vec<F>,
    /// Per group: Σ over member edges of the source node's summed survival terms.
    pub exposure: Vec<F>,
    pub sum_alpha: F,
    pub sum_beta: F,
    pub sum_gamma: F,
}

impl<'a, F: Scalar> SamplerContext<'a, F> {
    pub fn new(
        dataset: &'a Dataset<F>,
        hyper: Hyperparameters<F>,
        grouping: EdgeGrouping,
        candidate_window: F,
        max_candidates: usize,
    ) -> Self {
        let groups = EdgeGroups::new(&dataset.network, grouping);
        Self::with_groups(dataset, hyper, groups, candidate_window, max_candidates)
    }

    pub fn with_groups(
        dataset: &'a Dataset<F>,
        hyper: Hyperparameters<F>,
        groups: EdgeGroups,
        candidate_window: F,
        max_candidates: usize,
    ) -> Self {
        let n = dataset.len();
        let node: Vec<usize> = (0..n).map(|i| dataset.node_of(i)).collect();
        let docs: Vec<Vec<(u32, u32)>> = dataset
            .events()
            .iter()
            .map(|e| {
                let mut toks = e.tokens.clone();
                toks.sort_unstable();
                let mut out: Vec<(u32, u32)> = Vec::new();
                for w in toks {
                    match out.last_mut() {
                        Some((lw, c)) if *lw == w => *c += 1,
                        _ => out.push((w, 1)),
                    }
                }
                out
            })
            .collect();
        let doc_len = dataset.events().iter().map(|e| e.tokens.len() as u32).collect();
        let timeline = NodeTimeline::new(dataset);
        let candidates = (0..n)
            .map(|i| timeline.candidates(i, dataset, candidate_window, max_candidates))
            .collect();
        let horizon = dataset.window.horizon;
        let survival: Vec<F> = dataset
            .events()
            .iter()
            .map(|e| F::one() - (-(horizon - e.time)).exp())
            .collect();
        let mut node_survival = vec![F::zero(); dataset.network.node_count()];
        for i in 0..n {
            node_survival[node[i]] = node_survival[node[i]] + survival[i];
        }
        let exposure = (0..groups.len())
            .map(|g| {
                groups
                    .members(g)
                    .iter()
                    .map(|&e| node_survival[dataset.network.edges()[e].0])
                    .sum()
            })
            .collect();
        SamplerContext {
            dataset,
            sum_alpha: hyper.alpha.iter().copied().sum(),
            sum_beta: hyper.beta.iter().copied().sum(),
            sum_gamma: hyper.gamma.iter().copied().sum(),
            hyper,
            groups,
            node,
            docs,
            doc_len,
            candidates,
            survival,
            exposure,
        }
    }

    pub fn len(&self) -> usize {
        self.node.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node.is_empty()
    }

    pub fn topics(&self) -> usize {
        self.hyper.topics()
    }

    pub fn vocab_size(&self) -> usize {
        self.hyper.vocab_size()
    }

    pub fn node_count(&self) -> usize {
        self.dataset.network.node_count()
    }

    /// Edge connecting the event at `parent` to the event at `child`, if any.
    pub fn edge_between_events(&self, parent: usize, child: usize) -> Option<usize> {
        self.dataset.network.edge(self.node[parent], self.node[child])
    }
}
