//! Domain types shared by the generator, the sampler and the evaluators: the
//! follower graph, events and datasets, hyperparameters, model parameters, the
//! exponential time kernel and edge grouping.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type NodeId = u64;
pub type EventId = u64;

/// Dense row-major matrix, used both for probability tables and count tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Table<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Table {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        let n = rows.len();
        Ok(Table {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).map(<[T]>::to_vec).take(self.rows).collect()
    }
}

impl<T> Table<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl<T> std::ops::Index<(usize, usize)> for Table<T> {
    type Output = T;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Table<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl<F: Scalar> Table<F> {
    /// Largest `|Σ row − 1|` over all rows.
    pub fn max_row_sum_error(&self) -> F {
        self.iter_rows()
            .map(|r| (r.iter().copied().sum::<F>() - F::one()).abs())
            .fold(F::zero(), F::max)
    }

    pub fn is_row_stochastic(&self, tol: F) -> bool {
        self.as_slice().iter().all(|&x| x >= F::zero()) && self.max_row_sum_error() <= tol
    }

    pub fn convert<G: Scalar>(&self) -> Table<G> {
        Table {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| G::of(x.as_f64())).collect(),
        }
    }
}

/// Directed follower graph. An edge `(u, v)` means `v` follows `u`: events at `u`
/// are visible to `v` and may trigger events there.
///
/// Nodes are stored densely in ascending id order; edges are sorted by their
/// dense `(source, destination)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl Network {
    /// Builds a graph from explicit node ids and `(source, destination)` id pairs.
    pub fn new(
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        let mut ids: Vec<NodeId> = nodes.into_iter().collect();
        ids.sort_unstable();
        let before = ids.len();
        ids.dedup();
        if ids.len() != before {
            return Err(Error::invalid("duplicate node id"));
        }
        let index: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &n)| (n, i)).collect();

        let mut dense = Vec::new();
        for (u, v) in edges {
            let du = *index.get(&u).ok_or(Error::UnknownNode(u))?;
            let dv = *index.get(&v).ok_or(Error::UnknownNode(v))?;
            dense.push((du, dv));
        }
        dense.sort_unstable();
        for w in dense.windows(2) {
            if w[0] == w[1] {
                return Err(Error::invalid(format!(
                    "duplicate edge {} -> {}",
                    ids[w[0].0], ids[w[0].1]
                )));
            }
        }
        let n = ids.len();
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        let mut edge_index = HashMap::with_capacity(dense.len());
        for (e, &(u, v)) in dense.iter().enumerate() {
            out_edges[u].push(e);
            in_edges[v].push(e);
            edge_index.insert((u, v), e);
        }
        Ok(Network {
            nodes: ids,
            index,
            edges: dense,
            edge_index,
            out_edges,
            in_edges,
        })
    }

    /// Builds a graph whose node set is the union of edge endpoints and `extra_nodes`.
    pub fn from_edges(
        edges: &[(NodeId, NodeId)],
        extra_nodes: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self> {
        let mut nodes: HashSet<NodeId> = extra_nodes.into_iter().collect();
        for &(u, v) in edges {
            nodes.insert(u);
            nodes.insert(v);
        }
        Network::new(nodes, edges.iter().copied())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_id(&self, dense: usize) -> NodeId {
        self.nodes[dense]
    }

    pub fn dense(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Dense `(source, destination)` pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().map(|&(u, v)| (self.nodes[u], self.nodes[v]))
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_index.get(&(u, v)).copied()
    }

    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Result<usize> {
        let missing = || Error::MissingEdge { src: u, dst: v };
        let du = self.dense(u).ok_or_else(missing)?;
        let dv = self.dense(v).ok_or_else(missing)?;
        self.edge(du, dv).ok_or_else(missing)
    }

    /// Edge indices leaving `u` (towards its followers).
    pub fn out_edges(&self, u: usize) -> &[usize] {
        &self.out_edges[u]
    }

    /// Edge indices entering `v` (from its followees).
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out_edges[u].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_edges[v].len()
    }

    pub fn followees(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.in_edges[v].iter().map(move |&e| self.edges[e].0)
    }

    pub fn followers(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_edges[u].iter().map(move |&e| self.edges[e].1)
    }
}

/// Pooling key for edge strengths: `(out-degree of source, in-degree of destination)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeGroupKey {
    pub source_out_degree: usize,
    pub dest_in_degree: usize,
}

impl fmt::Display for EdgeGroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.source_out_degree, self.dest_in_degree)
    }
}

/// Group key of the edge `u -> v`.
pub fn edge_group_key(u: NodeId, v: NodeId, network: &Network) -> Result<EdgeGroupKey> {
    let e = network.edge_between(u, v)?;
    let (du, dv) = network.edges()[e];
    Ok(EdgeGroupKey {
        source_out_degree: network.out_degree(du),
        dest_in_degree: network.in_degree(dv),
    })
}

/// How edge strengths are tied together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeGrouping {
    /// Every edge has its own strength.
    #[serde(alias = "per-edge")]
    PerEdge,
    /// Edges sharing an [`EdgeGroupKey`] share one strength.
    #[default]
    Degree,
}

impl std::str::FromStr for EdgeGrouping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_edge" | "per-edge" | "edge" => Ok(EdgeGrouping::PerEdge),
            "degree" => Ok(EdgeGrouping::Degree),
            other => Err(Error::Invalid(format!("unknown edge grouping '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupLabel {
    Edge { src: NodeId, dst: NodeId },
    Degree(EdgeGroupKey),
}

impl GroupLabel {
    /// `(out_deg, in_deg)` columns for tabular output; per-edge groups report their own degrees.
    pub fn degree_columns(&self, network: &Network) -> (usize, usize) {
        match *self {
            GroupLabel::Degree(k) => (k.source_out_degree, k.dest_in_degree),
            GroupLabel::Edge { src, dst } => {
                let k = edge_group_key(src, dst, network).expect("label built from this network");
                (k.source_out_degree, k.dest_in_degree)
            }
        }
    }
}

/// Partition of the edges into strength-sharing groups, with the edge → group resolver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeGroups {
    grouping: EdgeGrouping,
    of_edge: Vec<usize>,
    labels: Vec<GroupLabel>,
    members: Vec<Vec<usize>>,
}

impl EdgeGroups {
    pub fn new(network: &Network, grouping: EdgeGrouping) -> Self {
        let m = network.edge_count();
        match grouping {
            EdgeGrouping::PerEdge => EdgeGroups {
                grouping,
                of_edge: (0..m).collect(),
                labels: network
                    .edge_ids()
                    .map(|(src, dst)| GroupLabel::Edge { src, dst })
                    .collect(),
                members: (0..m).map(|e| vec![e]).collect(),
            },
            EdgeGrouping::Degree => {
                let mut by_key: BTreeMap<EdgeGroupKey, Vec<usize>> = BTreeMap::new();
                for (e, &(u, v)) in network.edges().iter().enumerate() {
                    let key = EdgeGroupKey {
                        source_out_degree: network.out_degree(u),
                        dest_in_degree: network.in_degree(v),
                    };
                    by_key.entry(key).or_default().push(e);
                }
                let mut of_edge = vec![0; m];
                let mut labels = Vec::with_capacity(by_key.len());
                let mut members = Vec::with_capacity(by_key.len());
                for (g, (key, edges)) in by_key.into_iter().enumerate() {
                    for &e in &edges {
                        of_edge[e] = g;
                    }
                    labels.push(GroupLabel::Degree(key));
                    members.push(edges);
                }
                EdgeGroups {
                    grouping,
                    of_edge,
                    labels,
                    members,
                }
            }
        }
    }

    pub fn grouping(&self) -> EdgeGrouping {
        self.grouping
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of edges partitioned.
    pub fn edge_count(&self) -> usize {
        self.of_edge.len()
    }

    #[inline]
    pub fn group_of(&self, edge: usize) -> usize {
        self.of_edge[edge]
    }

    pub fn label(&self, group: usize) -> GroupLabel {
        self.labels[group]
    }

    pub fn members(&self, group: usize) -> &[usize] {
        &self.members[group]
    }

    pub fn find(&self, label: &GroupLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Observation interval `[start, horizon)` in hours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationWindow<F = f64> {
    pub start: F,
    pub horizon: F,
}

impl<F: Scalar> ObservationWindow<F> {
    pub fn new(start: F, horizon: F) -> Result<Self> {
        if !(start < horizon) || !start.is_finite() || !horizon.is_finite() {
            return Err(Error::Domain(format!(
                "observation window requires start < horizon, got [{start}, {horizon})"
            )));
        }
        Ok(ObservationWindow { start, horizon })
    }

    pub fn length(&self) -> F {
        self.horizon - self.start
    }

    pub fn contains(&self, t: F) -> bool {
        t >= self.start && t < self.horizon
    }
}

/// Cause of an event: a base-rate (spontaneous) draw or a specific earlier event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parent {
    Spontaneous,
    Event(EventId),
}

impl Parent {
    pub fn event(self) -> Option<EventId> {
        match self {
            Parent::Spontaneous => None,
            Parent::Event(id) => Some(id),
        }
    }

    pub fn is_spontaneous(self) -> bool {
        matches!(self, Parent::Spontaneous)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event<F = f64> {
    pub id: EventId,
    pub time: F,
    pub node: NodeId,
    pub tokens: Vec<u32>,
    /// Latent topic, when known (gold labels or inferred).
    pub topic: Option<usize>,
    /// Latent parent, when known. `None` means unlabeled, not spontaneous.
    pub parent: Option<Parent>,
}

impl<F: Scalar> Event<F> {
    pub fn new(id: EventId, time: F, node: NodeId) -> Self {
        Event {
            id,
            time,
            node,
            tokens: Vec::new(),
            topic: None,
            parent: None,
        }
    }
}

/// Prior hyperparameters. `K` is the length of `beta`/`gamma`, the vocabulary
/// size the length of `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters<F = f64> {
    /// Topic-word Dirichlet.
    pub alpha: Vec<F>,
    /// Topic-transition Dirichlet.
    pub beta: Vec<F>,
    /// User-topic Dirichlet.
    pub gamma: Vec<F>,
    /// Poisson mean of document length.
    pub doc_length_rate: F,
    /// Gamma prior shape on edge strengths.
    pub w_prior_shape: F,
    /// Gamma prior scale on edge strengths.
    pub w_prior_scale: F,
}

impl<F: Scalar> Hyperparameters<F> {
    /// Symmetric priors with the crate defaults: α = 0.01, β = 0.01, γ = 0.1,
    /// Gamma(2, 0.5) on strengths, mean document length 7.
    pub fn defaults(topics: usize, vocab: usize) -> Self {
        Self::symmetric(topics, vocab, F::of(0.01), F::of(0.01), F::of(0.1))
    }

    pub fn symmetric(topics: usize, vocab: usize, alpha: F, beta: F, gamma: F) -> Self {
        Hyperparameters {
            alpha: vec![alpha; vocab],
            beta: vec![beta; topics],
            gamma: vec![gamma; topics],
            doc_length_rate: F::of(7.0),
            w_prior_shape: F::of(2.0),
            w_prior_scale: F::of(0.5),
        }
    }

    pub fn topics(&self) -> usize {
        self.beta.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.alpha.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta.is_empty() || self.gamma.len() != self.beta.len() {
            return Err(Error::Domain("need K >= 1 and |beta| = |gamma| = K".into()));
        }
        if self.alpha.is_empty() {
            return Err(Error::Domain("vocabulary size must be >= 1".into()));
        }
        let positive = |x: &F| *x > F::zero() && x.is_finite();
        let all = self
            .alpha
            .iter()
            .chain(&self.beta)
            .chain(&self.gamma)
            .chain([&self.doc_length_rate, &self.w_prior_shape, &self.w_prior_scale]);
        if !all.into_iter().all(positive) {
            return Err(Error::Domain("all hyperparameters must be strictly positive".into()));
        }
        Ok(())
    }

    pub fn w_prior_mean(&self) -> F {
        self.w_prior_shape * self.w_prior_scale
    }
}

/// Generating (or estimated) parameters of the process.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParameters<F = f64> {
    /// Base rate per dense node index, events per hour.
    pub mu: Vec<F>,
    pub groups: EdgeGroups,
    /// Strength per group of `groups`.
    pub w: Vec<F>,
    /// Topic-word distributions, `K × vocab`.
    pub zeta: Table<F>,
    /// User-topic preferences, `|V| × K`.
    pub phi: Table<F>,
    /// Topic transitions, `K × K`; row = parent topic.
    pub trans: Table<F>,
}

impl<F: Scalar> ModelParameters<F> {
    pub fn topics(&self) -> usize {
        self.trans.rows()
    }

    #[inline]
    pub fn edge_strength(&self, edge: usize) -> F {
        self.w[self.groups.group_of(edge)]
    }

    pub fn strength(&self, network: &Network, u: NodeId, v: NodeId) -> Result<F> {
        Ok(self.edge_strength(network.edge_between(u, v)?))
    }

    /// Per-edge strengths in network edge order.
    pub fn edge_strengths(&self, network: &Network) -> Vec<F> {
        (0..network.edge_count()).map(|e| self.edge_strength(e)).collect()
    }

    /// Checks row-stochasticity of ζ, φ, 𝒯 and nonnegativity of μ, W.
    pub fn validate(&self, tol: F) -> Result<()> {
        for (name, t) in [("zeta", &self.zeta), ("phi", &self.phi), ("trans", &self.trans)] {
            if !t.is_row_stochastic(tol) {
                return Err(Error::Domain(format!("{name} is not row-stochastic")));
            }
        }
        if self.mu.iter().chain(&self.w).any(|&x| !(x >= F::zero())) {
            return Err(Error::Domain("negative base rate or strength".into()));
        }
        if self.zeta.rows() != self.trans.rows() || self.phi.cols() != self.trans.rows() {
            return Err(Error::Domain("topic dimensions disagree".into()));
        }
        Ok(())
    }
}

/// Time kernel `f(Δt) = exp(−Δt)`.
pub fn exp_kernel<F: Scalar>(dt: F) -> Result<F> {
    if dt < F::zero() || dt.is_nan() {
        return Err(Error::Domain(format!("kernel lag must be >= 0, got {dt}")));
    }
    Ok((-dt).exp())
}

/// `h_{u,v}(Δt) = W_{uv} · exp(−Δt)`.
pub fn impulse_response<F: Scalar>(
    u: NodeId,
    v: NodeId,
    dt: F,
    network: &Network,
    params: &ModelParameters<F>,
) -> Result<F> {
    let w = params.strength(network, u, v)?;
    Ok(w * exp_kernel(dt)?)
}

/// Events on a network inside an observation window, sorted by `(time, id)`.
#[derive(Debug, Clone)]
pub struct Dataset<F = f64> {
    pub network: Network,
    pub window: ObservationWindow<F>,
    events: Vec<Event<F>>,
    positions: HashMap<EventId, usize>,
    /// Index → token string, when the corpus was read with a vocabulary.
    pub vocabulary: Option<Vec<String>>,
}

impl<F: Scalar> Dataset<F> {
    pub fn new(network: Network, window: ObservationWindow<F>, mut events: Vec<Event<F>>) -> Self {
        events.sort_by(|a, b| a.time.partial_cmp(&b.time).unwrap_or(std::cmp::Ordering::Equal).then(a.id.cmp(&b.id)));
        let positions = events.iter().enumerate().map(|(i, e)| (e.id, i)).collect();
        Dataset {
            network,
            window,
            events,
            positions,
            vocabulary: None,
        }
    }

    pub fn with_vocabulary(mut self, vocabulary: Vec<String>) -> Self {
        self.vocabulary = Some(vocabulary);
        self
    }

    pub fn events(&self) -> &[Event<F>] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn position(&self, id: EventId) -> Option<usize> {
        self.positions.get(&id).copied()
    }

    /// Dense node index of event `i`.
    pub fn node_of(&self, i: usize) -> usize {
        self.network.dense(self.events[i].node).expect("event node is in the network")
    }

    /// Position of the labeled parent of event `i`: `Some(None)` for spontaneous,
    /// `None` when unlabeled or unresolvable.
    pub fn parent_position(&self, i: usize) -> Option<Option<usize>> {
        match self.events[i].parent? {
            Parent::Spontaneous => Some(None),
            Parent::Event(id) => self.position(id).map(Some),
        }
    }

    /// Rebuilds the dataset with new per-event labels (same order).
    pub fn relabel(&self, topics: Option<&[usize]>, parents: Option<&[Parent]>) -> Self {
        let mut out = self.clone();
        for (i, e) in out.events.iter_mut().enumerate() {
            if let Some(t) = topics {
                e.topic = Some(t[i]);
            }
            if let Some(p) = parents {
                e.parent = Some(p[i]);
            }
        }
        out
    }

    pub fn map_events(&self, f: impl FnMut(&mut Event<F>)) -> Self {
        let mut out = self.clone();
        out.events.iter_mut().for_each(f);
        out
    }

    /// Largest token index + 1 (0 for an empty corpus).
    pub fn max_token_bound(&self) -> usize {
        self.events
            .iter()
            .flat_map(|e| e.tokens.iter())
            .map(|&w| w as usize + 1)
            .max()
            .unwrap_or(0)
    }

    /// Splits at `time`: events strictly before go left.
    pub fn split_at_time(&self, time: F) -> Result<(Self, Self)> {
        let left_w = ObservationWindow::new(self.window.start, time)?;
        let right_w = ObservationWindow::new(time, self.window.horizon)?;
        let (a, b): (Vec<_>, Vec<_>) = self.events.iter().cloned().partition(|e| e.time < time);
        let strip = |mut e: Event<F>, keep: &HashSet<EventId>| {
            if let Some(Parent::Event(p)) = e.parent {
                if !keep.contains(&p) {
                    e.parent = None;
                }
            }
            e
        };
        let ka: HashSet<_> = a.iter().map(|e| e.id).collect();
        let kb: HashSet<_> = b.iter().map(|e| e.id).collect();
        let a = a.into_iter().map(|e| strip(e, &ka)).collect();
        let b = b.into_iter().map(|e| strip(e, &kb)).collect();
        let mut left = Dataset::new(self.network.clone(), left_w, a);
        let mut right = Dataset::new(self.network.clone(), right_w, b);
        left.vocabulary = self.vocabulary.clone();
        right.vocabulary = self.vocabulary.clone();
        Ok((left, right))
    }
}

/// One broken invariant, naming the event and the rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub event: EventId,
    pub rule: &'static str,
    pub detail: String,
}

/// Checks event and dataset invariants; an empty result means the dataset is well formed.
pub fn validate_dataset<F: Scalar>(d: &Dataset<F>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |event, rule, detail: String| out.push(Violation { event, rule, detail });
    let mut seen = HashSet::new();
    let vocab = d.vocabulary.as_ref().map(Vec::len);
    for (i, e) in d.events.iter().enumerate() {
        if !seen.insert(e.id) {
            push(e.id, "duplicate-id", format!("id {} repeated", e.id));
        }
        if !d.window.contains(e.time) {
            push(e.id, "time-outside-window", format!("t = {}", e.time));
        }
        if i > 0 {
            let p = &d.events[i - 1];
            if (p.time, p.id) > (e.time, e.id) && !(p.time < e.time) {
                push(e.id, "not-time-sorted", format!("follows event {}", p.id));
            }
        }
        let Some(child_node) = d.network.dense(e.node) else {
            push(e.id, "unknown-node", format!("node {}", e.node));
            continue;
        };
        if let (Some(v), Some(&bad)) = (vocab, e.tokens.iter().find(|&&w| w as usize >= vocab.unwrap_or(0))) {
            push(e.id, "token-out-of-range", format!("token {bad} >= vocabulary size {v}"));
        }
        if let Some(Parent::Event(pid)) = e.parent {
            let Some(pi) = d.position(pid) else {
                push(e.id, "parent-not-found", format!("parent {pid} absent"));
                continue;
            };
            let parent = &d.events[pi];
            if !(parent.time < e.time) {
                push(e.id, "parent-time-order", format!("parent {pid} at {} is not earlier than {}", parent.time, e.time));
            }
            match d.network.dense(parent.node) {
                Some(pu) if d.network.edge(pu, child_node).is_some() => {}
                _ => push(
                    e.id,
                    "parent-not-followee",
                    format!("no edge {} -> {}", parent.node, e.node),
                ),
            }
        }
    }
    out
}
