//! Collapsed Gibbs inference over event topics and diffusion parents, with
//! edge strengths set to their Gamma posterior mean after every sweep.
//!
//! Three modes share the machinery:
//! * [`SamplerMode::Full`]: topics follow a Markov chain along cascades.
//! * [`SamplerMode::Diagonal`]: a child always carries its parent's topic, so a
//!   cascade has one topic. Topics are resampled per cascade and a parent move
//!   carries the moved subtree's topic with it.
//! * [`SamplerMode::Decoupled`]: topics come from a global mixture independent of
//!   the cascade structure, and parents are chosen from timing alone.

mod conditional;
mod context;
mod counts;
mod state;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::{collapsed_log_likelihood, time_log_likelihood_positions, RateParams};
use crate::model::{Dataset, EdgeGroups, EdgeGrouping, Hyperparameters, ModelParameters, Parent};
use crate::scalar::Scalar;

pub use conditional::{empty_tally, gibbs_sweep, parent_conditional, topic_conditional, ParentTally};
pub(crate) use context::NodeTimeline;
pub use context::{parent_candidates, Candidate, SamplerContext};
pub use counts::{estimate_parameters, update_base_rates, update_edge_strengths, CountStatistics, Estimates};
pub use state::{initialize_state, SamplerState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMode {
    #[default]
    Full,
    #[serde(alias = "diag")]
    Diagonal,
    Decoupled,
}

impl std::str::FromStr for SamplerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(SamplerMode::Full),
            "diag" | "diagonal" => Ok(SamplerMode::Diagonal),
            "decoupled" => Ok(SamplerMode::Decoupled),
            other => Err(Error::invalid(format!("unknown sampler mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for SamplerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SamplerMode::Full => "full",
            SamplerMode::Diagonal => "diag",
            SamplerMode::Decoupled => "decoupled",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SamplerConfig<F: Scalar = f64> {
    pub mode: SamplerMode,
    pub iterations: usize,
    /// Sweeps discarded before parent conditionals are averaged for ranking.
    pub burn_in: usize,
    /// Hours a parent may precede its child.
    pub candidate_window: F,
    pub max_candidates: usize,
    pub seed: u64,
    pub hyper: Hyperparameters<F>,
    /// Base rates held fixed instead of re-estimated, per dense node.
    pub fixed_mu: Option<Vec<F>>,
    pub grouping: EdgeGrouping,
    /// `(a₀, b₀)` in `(spontaneous + a₀) / (T − start + b₀)`.
    pub base_rate_smoothing: (F, F),
    /// Recount all tables after each sweep and panic on drift.
    pub check_counts: bool,
    /// Length of the ranked parent list kept per event.
    pub rank_depth: usize,
    /// Compute the joint log-likelihood after each sweep.
    pub record_trace: bool,
}

impl<F: Scalar> SamplerConfig<F> {
    pub fn new(hyper: Hyperparameters<F>) -> Self {
        SamplerConfig {
            mode: SamplerMode::Full,
            iterations: 200,
            burn_in: 100,
            candidate_window: F::of(24.0),
            max_candidates: 100,
            seed: 0,
            hyper,
            fixed_mu: None,
            grouping: EdgeGrouping::Degree,
            base_rate_smoothing: (F::one(), F::one()),
            check_counts: cfg!(debug_assertions),
            rank_depth: 10,
            record_trace: true,
        }
    }

    pub fn topics(&self) -> usize {
        self.hyper.topics()
    }

    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        if self.iterations > 0 && self.burn_in >= self.iterations {
            return Err(Error::invalid("burn-in must be smaller than the number of iterations"));
        }
        if self.max_candidates == 0 {
            return Err(Error::invalid("max_candidates must be >= 1"));
        }
        if !(self.candidate_window > F::zero()) {
            return Err(Error::invalid("candidate window must be positive"));
        }
        Ok(())
    }
}

/// Wall-clock split of one sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SweepTiming {
    pub topic_secs: f64,
    pub parent_secs: f64,
    pub strength_secs: f64,
    pub total_secs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub joint_ll: f64,
    pub seconds: f64,
}

/// Output of [`run_gibbs`]. Per-event vectors follow dataset order.
#[derive(Debug, Clone)]
pub struct InferenceResult<F: Scalar = f64> {
    pub mode: SamplerMode,
    pub topics: Vec<usize>,
    pub parents: Vec<Parent>,
    /// Highest-probability parents first, with their (averaged) conditional probability.
    pub ranked_parents: Vec<Vec<(Parent, F)>>,
    pub groups: EdgeGroups,
    pub w: Vec<F>,
    pub edge_pairs: Vec<u32>,
    pub exposure: Vec<F>,
    /// Per dense node of the training network.
    pub mu: Vec<F>,
    pub estimates: Estimates<F>,
    pub trace: Vec<TraceRow>,
    pub timings: Vec<SweepTiming>,
}

impl<F: Scalar> InferenceResult<F> {
    pub fn params(&self) -> ModelParameters<F> {
        ModelParameters {
            mu: self.mu.clone(),
            groups: self.groups.clone(),
            w: self.w.clone(),
            zeta: self.estimates.zeta.clone(),
            phi: self.estimates.phi.clone(),
            trans: self.estimates.trans.clone(),
        }
    }
}

fn joint_ll<F: Scalar>(ctx: &SamplerContext<'_, F>, st: &SamplerState<F>, mode: SamplerMode) -> f64 {
    let rates = RateParams {
        groups: &ctx.groups,
        w: &st.w,
        mu: &st.mu,
    };
    let content = collapsed_log_likelihood(&st.counts, &ctx.hyper, mode);
    let time = time_log_likelihood_positions(ctx.dataset, &st.parents, &st.parent_edges, &rates, &ctx.exposure);
    (content + time).as_f64()
}

/// Runs `config.iterations` sweeps from a random initialization.
pub fn run_gibbs<F: Scalar>(dataset: &Dataset<F>, config: &SamplerConfig<F>) -> Result<InferenceResult<F>> {
    config.validate()?;
    if let Some(mu) = &config.fixed_mu {
        if mu.len() != dataset.network.node_count() {
            return Err(Error::invalid("fixed base rates must cover every node"));
        }
    }
    let bound = dataset.max_token_bound();
    if bound > config.hyper.vocab_size() {
        return Err(Error::invalid(format!(
            "token {} outside vocabulary of size {}",
            bound - 1,
            config.hyper.vocab_size()
        )));
    }
    let ctx = SamplerContext::new(
        dataset,
        config.hyper.clone(),
        config.grouping,
        config.candidate_window,
        config.max_candidates,
    );
    let mut st = initialize_state(&ctx, config);
    let start = Instant::now();
    let mut trace = Vec::new();
    if config.record_trace {
        trace.push(TraceRow {
            iter: 0,
            joint_ll: joint_ll(&ctx, &st, config.mode),
            seconds: 0.0,
        });
    }
    let mut tally = empty_tally(&ctx);
    let mut tallied = 0usize;
    let mut timings = Vec::with_capacity(config.iterations);
    for iter in 1..=config.iterations {
        let acc = (iter > config.burn_in).then_some(&mut tally);
        tallied += usize::from(acc.is_some());
        timings.push(gibbs_sweep(&ctx, &mut st, config, acc));
        if config.record_trace {
            trace.push(TraceRow {
                iter,
                joint_ll: joint_ll(&ctx, &st, config.mode),
                seconds: start.elapsed().as_secs_f64(),
            });
        }
        log::debug!("sweep {iter}/{} done", config.iterations);
    }
    if tallied == 0 {
        for (e, slot) in tally.iter_mut().enumerate() {
            *slot = parent_conditional(&ctx, &mut st, e, config.mode);
        }
    }
    let events = dataset.events();
    let as_parent = |p: Option<usize>| p.map_or(Parent::Spontaneous, |j| Parent::Event(events[j].id));
    let ranked_parents = tally
        .iter()
        .enumerate()
        .map(|(e, probs)| {
            let scale = F::one() / F::of_usize(tallied.max(1));
            let cands = &ctx.candidates[e];
            let mut items: Vec<(Parent, F, usize)> = probs
                .iter()
                .enumerate()
                .map(|(i, &p)| (as_parent(cands.get(i).map(|c| c.event)), p * scale, i))
                .collect();
            items.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.2.cmp(&b.2)));
            items.truncate(config.rank_depth.max(1));
            items.into_iter().map(|(p, s, _)| (p, s)).collect()
        })
        .collect();
    let estimates = estimate_parameters(
        &st.counts,
        &config.hyper.alpha,
        &config.hyper.beta,
        &config.hyper.gamma,
        config.mode,
    );
    Ok(InferenceResult {
        mode: config.mode,
        parents: st.parents.iter().map(|&p| as_parent(p)).collect(),
        topics: st.topics.clone(),
        ranked_parents,
        groups: ctx.groups.clone(),
        w: st.w.clone(),
        edge_pairs: st.counts.edge_pairs.clone(),
        exposure: ctx.exposure.clone(),
        mu: st.mu.clone(),
        estimates,
        trace,
        timings,
    })
}
