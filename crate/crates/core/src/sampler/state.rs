use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{domain, stream_rng, SimRng};
use crate::scalar::Scalar;

use super::context::SamplerContext;
use super::counts::{update_base_rates, CountStatistics};
use super::{SamplerConfig, SamplerMode};

/// Current assignments plus all count tables and continuous parameters.
#[derive(Debug, Clone)]
pub struct SamplerState<F: Scalar = f64> {
    pub topics: Vec<usize>,
    /// Parent position per event; `None` is spontaneous.
    pub parents: Vec<Option<usize>>,
    /// Edge used by each event's parent link.
    pub parent_edges: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub counts: CountStatistics<F>,
    /// Strength per edge group.
    pub w: Vec<F>,
    /// Base rate per dense node.
    pub mu: Vec<F>,
    pub(crate) rng: SimRng,
}

impl<F: Scalar> SamplerState<F> {
    /// State with the given assignments; counts are tallied from scratch.
    pub fn from_assignments(
        ctx: &SamplerContext<'_, F>,
        topics: Vec<usize>,
        parents: Vec<Option<usize>>,
        w: Vec<F>,
        mu: Vec<F>,
        seed: u64,
    ) -> Result<Self> {
        let n = ctx.len();
        if topics.len() != n || parents.len() != n {
            return Err(Error::invalid("assignment length differs from event count"));
        }
        if w.len() != ctx.groups.len() || mu.len() != ctx.node_count() {
            return Err(Error::invalid("strength or base-rate vector has wrong length"));
        }
        let k = ctx.topics();
        if let Some(&bad) = topics.iter().find(|&&t| t >= k) {
            return Err(Error::invalid(format!("topic {bad} out of range for K = {k}")));
        }
        if let Some(&bad) = ctx.docs.iter().flatten().map(|(w, _)| w).find(|&&w| w as usize >= ctx.vocab_size()) {
            return Err(Error::invalid(format!("token {bad} outside vocabulary of size {}", ctx.vocab_size())));
        }
        let mut parent_edges = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for (e, p) in parents.iter().enumerate() {
            if let Some(p) = *p {
                let edge = ctx
                    .edge_between_events(p, e)
                    .filter(|_| p < e && ctx.dataset.events()[p].time < ctx.dataset.events()[e].time)
                    .ok_or_else(|| Error::invalid(format!("event at position {p} cannot be the parent of {e}")))?;
                parent_edges[e] = Some(edge);
                children[p].push(e);
            }
        }
        let counts = CountStatistics::tally(ctx, &topics, &parents);
        Ok(SamplerState {
            topics,
            parents,
            parent_edges,
            children,
            counts,
            w,
            mu,
            rng: stream_rng(seed, domain::SAMPLER, 0),
        })
    }

    pub fn len(&self) -> usize {
        self.topics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topics.is_empty()
    }

    /// From-scratch recount of every table equals the maintained one.
    pub fn counts_consistent(&self, ctx: &SamplerContext<'_, F>) -> bool {
        self.counts == CountStatistics::tally(ctx, &self.topics, &self.parents)
    }

    pub(crate) fn detach_child(&mut self, parent: usize, child: usize) {
        let kids = &mut self.children[parent];
        let pos = kids.iter().position(|&c| c == child).expect("child is linked");
        kids.swap_remove(pos);
    }

    /// `e` and all its descendants, `e` first.
    pub fn subtree(&self, e: usize) -> Vec<usize> {
        let mut out = vec![e];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out
    }
}

/// Random initial state: uniform topics, parents uniform over candidates plus
/// spontaneity, strengths at the prior mean, base rates from the initial
/// spontaneous counts. In diagonal mode diffusion events inherit their parent's
/// topic so the state starts with nonzero probability.
pub fn initialize_state<F: Scalar>(ctx: &SamplerContext<'_, F>, config: &SamplerConfig<F>) -> SamplerState<F> {
    let n = ctx.len();
    let k = ctx.topics();
    let mut rng = stream_rng(config.seed, domain::SAMPLER, 1);
    let mut topics: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let parents: Vec<Option<usize>> = (0..n)
        .map(|e| {
            let cands = &ctx.candidates[e];
            let pick = rng.gen_range(0..=cands.len());
            cands.get(pick).map(|c| c.event)
        })
        .collect();
    if config.mode == SamplerMode::Diagonal {
        for e in 0..n {
            if let Some(p) = parents[e] {
                topics[e] = topics[p];
            }
        }
    }
    let w = vec![ctx.hyper.w_prior_mean(); ctx.groups.len()];
    let mut spont = vec![0u32; ctx.node_count()];
    for e in 0..n {
        if parents[e].is_none() {
            spont[ctx.node[e]] += 1;
        }
    }
    let mu = update_base_rates(&spont, &ctx.dataset.window, config.base_rate_smoothing, config.fixed_mu.as_deref());
    SamplerState::from_assignments(ctx, topics, parents, w, mu, config.seed).expect("initial assignments are valid")
}
