//! Joint log-likelihood of a labeled dataset with the topic, transition and
//! preference distributions integrated out, and held-out log-likelihood under
//! frozen point estimates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Dataset, EdgeGroups, Hyperparameters, ModelParameters, Table};
use crate::sampler::{CountStatistics, SamplerContext, SamplerMode};
use crate::scalar::{ln_gamma, log_sum_exp, pairwise_sum, Scalar};

/// Base rates and grouped strengths, the non-integrated parameters.
#[derive(Debug, Clone, Copy)]
pub struct RateParams<'a, F> {
    pub groups: &'a EdgeGroups,
    /// Per group.
    pub w: &'a [F],
    /// Per dense node.
    pub mu: &'a [F],
}

/// `ln` of the Dirichlet-multinomial sequence probability of `counts` under `prior`.
fn ln_dirichlet_multinomial<F: Scalar>(counts: &[u32], prior: &[F], prior_sum: F) -> F {
    let total: u32 = counts.iter().sum();
    if total == 0 {
        return F::zero();
    }
    let mut s = ln_gamma(prior_sum) - ln_gamma(prior_sum + F::of(total as f64));
    for (&n, &a) in counts.iter().zip(prior) {
        if n > 0 {
            s = s + ln_gamma(a + F::of(n as f64)) - ln_gamma(a);
        }
    }
    s
}

/// Collapsed content terms: transitions, user-topic picks and words. Diagonal
/// mode fixes transitions (no term); decoupled mode replaces transitions and
/// user picks with one global topic mixture.
pub fn collapsed_log_likelihood<F: Scalar>(
    counts: &CountStatistics<F>,
    hyper: &Hyperparameters<F>,
    mode: SamplerMode,
) -> F {
    let sa: F = hyper.alpha.iter().copied().sum();
    let sb: F = hyper.beta.iter().copied().sum();
    let sg: F = hyper.gamma.iter().copied().sum();
    let mut terms = Vec::new();
    for row in counts.word.iter_rows() {
        terms.push(ln_dirichlet_multinomial(row, &hyper.alpha, sa));
    }
    match mode {
        SamplerMode::Full | SamplerMode::Diagonal => {
            if mode == SamplerMode::Full {
                for row in counts.trans.iter_rows() {
                    terms.push(ln_dirichlet_multinomial(row, &hyper.beta, sb));
                }
            }
            for row in counts.user.iter_rows() {
                terms.push(ln_dirichlet_multinomial(row, &hyper.gamma, sg));
            }
        }
        SamplerMode::Decoupled => terms.push(ln_dirichlet_multinomial(&counts.topic_total, &hyper.gamma, sg)),
    }
    pairwise_sum(&terms)
}

/// Hawkes log-likelihood given parent positions and the edges they use.
/// `exposure` is the per-group summed survival `Σ (1 − e^{−(T − t_e)})` of the
/// groups' source events.
pub fn time_log_likelihood_positions<F: Scalar>(
    dataset: &Dataset<F>,
    parents: &[Option<usize>],
    parent_edges: &[Option<usize>],
    rates: &RateParams<'_, F>,
    exposure: &[F],
) -> F {
    let events = dataset.events();
    let mut terms: Vec<F> = (0..events.len())
        .map(|e| match (parents[e], parent_edges[e]) {
            (Some(p), Some(edge)) => rates.w[rates.groups.group_of(edge)].ln() - (events[e].time - events[p].time),
            _ => rates.mu[dataset.node_of(e)].ln(),
        })
        .collect();
    let len = dataset.window.length();
    terms.push(-(rates.mu.iter().copied().sum::<F>() * len));
    terms.push(-pairwise_sum(
        &rates.w.iter().zip(exposure).map(|(&w, &x)| w * x).collect::<Vec<F>>(),
    ));
    pairwise_sum(&terms)
}

/// Log of the joint likelihood with ζ, 𝒯 and φ integrated out: collapsed topic
/// and word terms plus the Hawkes time terms (base-rate events, triggered
/// events, and the compensators of both).
pub fn joint_log_likelihood<F: Scalar>(
    dataset: &Dataset<F>,
    topics: &[usize],
    parents: &[Option<usize>],
    rates: &RateParams<'_, F>,
    hyper: &Hyperparameters<F>,
) -> Result<F> {
    joint_log_likelihood_mode(dataset, topics, parents, rates, hyper, SamplerMode::Full)
}

pub fn joint_log_likelihood_mode<F: Scalar>(
    dataset: &Dataset<F>,
    topics: &[usize],
    parents: &[Option<usize>],
    rates: &RateParams<'_, F>,
    hyper: &Hyperparameters<F>,
    mode: SamplerMode,
) -> Result<F> {
    if topics.len() != dataset.len() || parents.len() != dataset.len() {
        return Err(Error::invalid("incomplete assignments"));
    }
    hyper.validate()?;
    if dataset.max_token_bound() > hyper.vocab_size() {
        return Err(Error::invalid("token outside vocabulary"));
    }
    if topics.iter().any(|&k| k >= hyper.topics()) {
        return Err(Error::invalid("topic outside [0, K)"));
    }
    let ctx = SamplerContext::with_groups(dataset, hyper.clone(), rates.groups.clone(), F::infinity(), 0);
    let mut edges = Vec::with_capacity(parents.len());
    for (e, p) in parents.iter().enumerate() {
        edges.push(match *p {
            Some(p) => Some(
                ctx.edge_between_events(p, e)
                    .filter(|_| dataset.events()[p].time < dataset.events()[e].time)
                    .ok_or_else(|| Error::invalid(format!("invalid parent for event at position {e}")))?,
            ),
            None => None,
        });
    }
    let counts = CountStatistics::tally(&ctx, topics, parents);
    let content = collapsed_log_likelihood(&counts, hyper, mode);
    let time = time_log_likelihood_positions(dataset, parents, &edges, rates, &ctx.exposure);
    Ok(content + time)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LikelihoodReport<F = f64> {
    pub content_ll: F,
    pub time_ll: F,
    pub total_ll: F,
    /// `(content, time)` per event, dataset order.
    pub per_event: Option<Vec<(F, F)>>,
}

/// How held-out events are attributed to parents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeldoutParents {
    /// Sum over all possible parents: `time_ll` is the exact Hawkes
    /// log-likelihood and `content_ll` the document predictive given the times.
    #[default]
    Marginal,
    /// One greedy pass fixing each event's most probable parent.
    Greedy,
}

impl std::str::FromStr for HeldoutParents {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "marginal" => Ok(HeldoutParents::Marginal),
            "greedy" => Ok(HeldoutParents::Greedy),
            other => Err(Error::invalid(format!("unknown held-out parent rule '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HeldoutConfig<F = f64> {
    pub candidate_window: F,
    pub max_candidates: usize,
    pub parents: HeldoutParents,
    pub per_event: bool,
}

impl<F: Scalar> Default for HeldoutConfig<F> {
    fn default() -> Self {
        HeldoutConfig {
            candidate_window: F::of(24.0),
            max_candidates: 100,
            parents: HeldoutParents::Marginal,
            per_event: false,
        }
    }
}

/// Held-out fit under frozen trained parameters.
///
/// Events are visited in time order. A candidate parent contributes its impulse
/// response as rate and the probability of the new document under the parent's
/// filtered topic posterior pushed through 𝒯̂; spontaneity contributes μ̂ and
/// the document probability under φ̂. Topics are always summed out.
///
/// With [`HeldoutParents::Marginal`] the time term of an event is the log of its
/// total intensity and the content term the log of the rate-weighted mixture
/// of document probabilities. With [`HeldoutParents::Greedy`] each event takes
/// the single best parent and both terms use that parent only.
pub fn heldout_log_likelihood<F: Scalar>(
    train: &ModelParameters<F>,
    heldout: &Dataset<F>,
    config: &HeldoutConfig<F>,
) -> Result<LikelihoodReport<F>> {
    let groups = EdgeGroups::new(&heldout.network, train.groups.grouping());
    if groups != train.groups || train.w.len() != groups.len() {
        return Err(Error::invalid("held-out network differs from the training network"));
    }
    if train.mu.len() != heldout.network.node_count() {
        return Err(Error::invalid("base rates do not cover the held-out network"));
    }
    let est = train;
    let kk = est.trans.rows();
    let vocab = est.zeta.cols();
    if est.phi.rows() != heldout.network.node_count() || est.phi.cols() != kk || est.zeta.rows() != kk {
        return Err(Error::invalid("trained distributions have inconsistent shapes"));
    }
    if heldout.max_token_bound() > vocab {
        return Err(Error::invalid("held-out token outside the trained vocabulary"));
    }
    let ln_zeta = ln_table(&est.zeta);
    let ln_phi = ln_table(&est.phi);
    let timeline = SamplerContext::with_groups(
        heldout,
        Hyperparameters::defaults(kk, vocab.max(1)),
        groups,
        config.candidate_window,
        config.max_candidates,
    );
    let n = heldout.len();
    // prior over a prospective child's topic, given event j's filtered posterior
    let mut child_prior: Vec<Vec<F>> = Vec::with_capacity(n);
    let mut content = Vec::with_capacity(n);
    let mut time = Vec::with_capacity(n);
    for e in 0..n {
        let v = timeline.node[e];
        let doc_ll: Vec<F> = (0..kk)
            .map(|k| {
                timeline.docs[e]
                    .iter()
                    .map(|&(w, c)| ln_zeta[(k, w as usize)] * F::of(c as f64))
                    .sum()
            })
            .collect();
        // (log rate, per-topic log joint of topic and document)
        let mut options: Vec<(F, Vec<F>)> = Vec::with_capacity(timeline.candidates[e].len() + 1);
        let joint = |prior: &[F]| -> Vec<F> { prior.iter().zip(&doc_ll).map(|(&p, &l)| p + l).collect() };
        options.push((train.mu[v].ln(), joint(ln_phi.row(v))));
        for c in &timeline.candidates[e] {
            let rate = train.w[train.groups.group_of(c.edge)].ln() - c.lag;
            options.push((rate, joint(&child_prior[c.event])));
        }
        let doc_of: Vec<F> = options.iter().map(|(_, j)| log_sum_exp(j)).collect();
        let (lt, doc, mut post) = match config.parents {
            HeldoutParents::Greedy => {
                let mut best = 0;
                for i in 1..options.len() {
                    if options[i].0 + doc_of[i] > options[best].0 + doc_of[best] {
                        best = i;
                    }
                }
                (options[best].0, doc_of[best], options[best].1.clone())
            }
            HeldoutParents::Marginal => {
                let rates: Vec<F> = options.iter().map(|o| o.0).collect();
                let lt = log_sum_exp(&rates);
                let mut post = vec![F::neg_infinity(); kk];
                for (r, j) in &options {
                    for (p, &x) in post.iter_mut().zip(j) {
                        *p = log_sum_exp(&[*p, *r - lt + x]);
                    }
                }
                let doc = log_sum_exp(&post);
                (lt, doc, post)
            }
        };
        content.push(doc);
        time.push(lt);
        // filtered posterior of e, then pushed through 𝒯̂
        crate::scalar::normalize_log_weights(&mut post);
        let prior: Vec<F> = (0..kk)
            .map(|k| {
                let p: F = (0..kk).map(|j| post[j] * est.trans[(j, k)]).sum();
                p.ln()
            })
            .collect();
        child_prior.push(prior);
    }
    let per_event = config
        .per_event
        .then(|| content.iter().copied().zip(time.iter().copied()).collect());
    let content_ll = pairwise_sum(&content);
    let mut time_terms = time;
    time_terms.push(-(train.mu.iter().copied().sum::<F>() * heldout.window.length()));
    time_terms.push(-pairwise_sum(
        &train.w.iter().zip(&timeline.exposure).map(|(&w, &x)| w * x).collect::<Vec<F>>(),
    ));
    let time_ll = pairwise_sum(&time_terms);
    Ok(LikelihoodReport {
        content_ll,
        time_ll,
        total_ll: content_ll + time_ll,
        per_event,
    })
}

fn ln_table<F: Scalar>(t: &Table<F>) -> Table<F> {
    let rows = t.iter_rows().map(|r| r.iter().map(|x| x.ln()).collect()).collect();
    Table::from_rows(rows).expect("rectangular")
}
