//! Full conditionals and the sweep.
//!
//! Every conditional is evaluated by first removing all statistics the resampled
//! variable touches, then scoring each outcome as the Dirichlet-multinomial
//! predictive probability of re-inserting them one at a time. Repeated words
//! and repeated child topics pick up the ascending-factorial terms this way, and
//! a candidate topic equal to the parent's topic sees the incoming pair already
//! inserted when the outgoing pairs are scored.

use std::time::Instant;

use crate::scalar::{normalize_log_weights, Scalar};
use crate::rng::categorical;

use super::context::SamplerContext;
use super::counts::{update_base_rates, update_edge_strengths, CountStatistics};
use super::state::SamplerState;
use super::{SamplerConfig, SamplerMode, SweepTiming};

/// `ln P(words | topic k)` under the current (already reduced) counts.
#[inline]
pub(crate) fn ln_words<F: Scalar>(
    ctx: &SamplerContext<'_, F>,
    counts: &CountStatistics<F>,
    k: usize,
    doc: &[(u32, u32)],
    len: u32,
) -> F {
    let row = counts.word.row(k);
    let mut s = F::zero();
    for &(w, c) in doc {
        let base = ctx.hyper.alpha[w as usize] + F::of(row[w as usize] as f64);
        for i in 0..c {
            s = s + (base + F::of(i as f64)).ln();
        }
    }
    let base = ctx.sum_alpha + F::of(counts.word_row[k] as f64);
    for i in 0..len {
        s = s - (base + F::of(i as f64)).ln();
    }
    s
}

#[inline]
fn ln_user<F: Scalar>(ctx: &SamplerContext<'_, F>, counts: &CountStatistics<F>, v: usize, k: usize) -> F {
    (ctx.hyper.gamma[k] + F::of(counts.user[(v, k)] as f64)).ln()
        - (ctx.sum_gamma + F::of(counts.user_row[v] as f64)).ln()
}

#[inline]
fn ln_trans<F: Scalar>(ctx: &SamplerContext<'_, F>, counts: &CountStatistics<F>, from: usize, to: usize) -> F {
    (ctx.hyper.beta[to] + F::of(counts.trans[(from, to)] as f64)).ln()
        - (ctx.sum_beta + F::of(counts.trans_row[from] as f64)).ln()
}

#[inline]
fn ln_global<F: Scalar>(ctx: &SamplerContext<'_, F>, counts: &CountStatistics<F>, k: usize, total: u32) -> F {
    (ctx.hyper.gamma[k] + F::of(counts.topic_total[k] as f64)).ln() - (ctx.sum_gamma + F::of(total as f64)).ln()
}

fn child_topic_histogram(st: &SamplerState<impl Scalar>, e: usize) -> Vec<(usize, u32)> {
    let mut ks: Vec<usize> = st.children[e].iter().map(|&c| st.topics[c]).collect();
    ks.sort_unstable();
    let mut out: Vec<(usize, u32)> = Vec::new();
    for k in ks {
        match out.last_mut() {
            Some((lk, m)) if *lk == k => *m += 1,
            _ => out.push((k, 1)),
        }
    }
    out
}

/// Removes every statistic incident to `e`'s topic.
fn remove_topic_stats<F: Scalar>(ctx: &SamplerContext<'_, F>, st: &mut SamplerState<F>, e: usize) {
    let k = st.topics[e];
    st.counts.add_words(ctx, e, k, -1);
    st.counts.topic_total[k] -= 1;
    match st.parents[e] {
        Some(p) => st.counts.remove_pair(st.topics[p], k),
        None => {
            st.counts.user[(ctx.node[e], k)] -= 1;
            st.counts.user_row[ctx.node[e]] -= 1;
        }
    }
    for i in 0..st.children[e].len() {
        let c = st.children[e][i];
        st.counts.remove_pair(k, st.topics[c]);
    }
}

fn insert_topic_stats<F: Scalar>(ctx: &SamplerContext<'_, F>, st: &mut SamplerState<F>, e: usize, k: usize) {
    st.topics[e] = k;
    st.counts.add_words(ctx, e, k, 1);
    st.counts.topic_total[k] += 1;
    match st.parents[e] {
        Some(p) => st.counts.add_pair(st.topics[p], k),
        None => {
            st.counts.user[(ctx.node[e], k)] += 1;
            st.counts.user_row[ctx.node[e]] += 1;
        }
    }
    for i in 0..st.children[e].len() {
        let c = st.children[e][i];
        st.counts.add_pair(k, st.topics[c]);
    }
}

/// Log weights of each topic for `e`, with `e`'s statistics already removed.
fn topic_log_weights<F: Scalar>(
    ctx: &SamplerContext<'_, F>,
    st: &SamplerState<F>,
    e: usize,
    mode: SamplerMode,
    out: &mut Vec<F>,
) {
    let kk = ctx.topics();
    out.clear();
    let counts = &st.counts;
    let v = ctx.node[e];
    let parent_topic = st.parents[e].map(|p| st.topics[p]);
    let kids = if mode == SamplerMode::Full {
        child_topic_histogram(st, e)
    } else {
        Vec::new()
    };
    let n_kids: u32 = kids.iter().map(|&(_, m)| m).sum();
    let total: u32 = counts.topic_total.iter().sum();
    for k in 0..kk {
        let mut lw = match (mode, parent_topic) {
            (SamplerMode::Decoupled, _) => ln_global(ctx, counts, k, total),
            (_, Some(kp)) => ln_trans(ctx, counts, kp, k),
            (_, None) => ln_user(ctx, counts, v, k),
        };
        if n_kids > 0 {
            // the incoming pair (kp -> k) sits in row k when kp == k
            let bump = u32::from(parent_topic == Some(k));
            let row = counts.trans.row(k);
            for &(l, m) in &kids {
                let extra = if l == k { bump } else { 0 };
                let base = ctx.hyper.beta[l] + F::of((row[l] + extra) as f64);
                for i in 0..m {
                    lw = lw + (base + F::of(i as f64)).ln();
                }
            }
            let base = ctx.sum_beta + F::of((counts.trans_row[k] + bump) as f64);
            for i in 0..n_kids {
                lw = lw - (base + F::of(i as f64)).ln();
            }
        }
        lw = lw + ln_words(ctx, counts, k, &ctx.docs[e], ctx.doc_len[e]);
        out.push(lw);
    }
}

/// Aggregated words of a set of events.
struct Block {
    members: Vec<usize>,
    words: Vec<(u32, u32)>,
    len: u32,
}

impl Block {
    fn new<F: Scalar>(ctx: &SamplerContext<'_, F>, members: Vec<usize>) -> Self {
        let mut all: Vec<(u32, u32)> = members.iter().flat_map(|&m| ctx.docs[m].iter().copied()).collect();
        all.sort_unstable_by_key(|&(w, _)| w);
        let mut words: Vec<(u32, u32)> = Vec::new();
        for (w, c) in all {
            match words.last_mut() {
                Some((lw, lc)) if *lw == w => *lc += c,
                _ => words.push((w, c)),
            }
        }
        let len = members.iter().map(|&m| ctx.doc_len[m]).sum();
        Block { members, words, len }
    }

    /// Moves the block's words, topic totals and internal (k, k) pairs.
    fn shift<F: Scalar>(&self, ctx: &SamplerContext<'_, F>, st: &mut SamplerState<F>, k: usize, sign: i32) {
        for &m in &self.members {
            st.counts.add_words(ctx, m, k, sign);
        }
        let size = self.members.len() as u32;
        let internal = size - 1;
        if sign > 0 {
            st.counts.topic_total[k] += size;
            st.counts.trans[(k, k)] += internal;
            st.counts.trans_row[k] += internal;
            for &m in &self.members {
                st.topics[m] = k;
            }
        } else {
            st.counts.topic_total[k] -= size;
            st.counts.trans[(k, k)] -= internal;
            st.counts.trans_row[k] -= internal;
        }
    }
}

/// Diagonal mode: log weights of each topic for the cascade rooted at `root`,
/// whose block statistics are already removed.
fn block_topic_log_weights<F: Scalar>(
    ctx: &SamplerContext<'_, F>,
    st: &SamplerState<F>,
    root: usize,
    block: &Block,
    out: &mut Vec<F>,
) {
    out.clear();
    let v = ctx.node[root];
    for k in 0..ctx.topics() {
        out.push(ln_user(ctx, &st.counts, v, k) + ln_words(ctx, &st.counts, k, &block.words, block.len));
    }
}

fn sample_index<F: Scalar>(st: &mut SamplerState<F>, weights: &mut [F]) -> usize {
    normalize_log_weights(weights);
    categorical(weights, &mut st.rng)
}

/// Conditional distribution of `e`'s topic given everything else. `e`'s own
/// statistics are removed for the evaluation and restored afterwards.
///
/// In diagonal mode a diffusion event is pinned to its parent's topic (a point
/// mass); for a spontaneous event the distribution is the one of the topic of
/// its whole cascade.
pub fn topic_conditional<F: Scalar>(
    ctx: &SamplerContext<'_, F>,
    st: &mut SamplerState<F>,
    e: usize,
    mode: SamplerMode,
) -> Vec<F> {
    let mut w = Vec::with_capacity(ctx.topics());
    let k = st.topics[e];
    if mode == SamplerMode::Diagonal {
        if let Some(p) = st.parents[e] {
            let mut out = vec![F::zero(); ctx.topics()];
            out[st.topics[p]] = F::one();
            return out;
        }
        let block = Block::new(ctx, st.subtree(e));
        remove_root_block(ctx, st, e, &block, k);
        block_topic_log_weights(ctx, st, e, &block, &mut w);
        insert_root_block(ctx, st, e, &block, k);
    } else {
        remove_topic_stats(ctx, st, e);
        topic_log_weights(ctx, st, e, mode, &mut w);
        insert_topic_stats(ctx, st, e, k);
    }
    normalize_log_weights(&mut w);
    w
}

fn remove_root_block<F: Scalar>(ctx: &SamplerContext<'_, F>, st: &mut SamplerState<F>, root: usize, block: &Block, k: usize) {
    block.shift(ctx, st, k, -1);
    st.counts.user[(ctx.node[root], k)] -= 1;
    st.counts.user_row[ctx.node[root]] -= 1;
}

fn insert_root_block<F: Scalar>(ctx: &SamplerContext<'_, F>, st: &mut SamplerState<F>, root: usize, block: &Block, k: usize) {
    block.shift(ctx, st, k, 1);
    st.counts.user[(ctx.node[root], k)] += 1;
    st.counts.user_row[ctx.node[root]] += 1;
}

/// Resamples the topic of `e` (of its whole cascade in diagonal mode).
fn resample_topic<F: Scalar>(
    ctx: &SamplerContext<'_, F>,
    st: &mut SamplerState<F>,
    e: usize,
    mode: SamplerMode,
    buf: &mut Vec<F>,
) {
    let k = st.topics[e];
    if mode == SamplerMode::Diagonal {
        if st.parents[e].is_some() {
            return;
        }
        let block = Block::new(ctx, st.subtree(e));
        remove_root_block(ctx, st, e, &block, k);
        block_topic_log_weights(ctx, st, e, &block, buf);
        let knew = sample_index(st, buf);
        insert_root_block(ctx, st, e, &block, knew);
    } else {
        remove_topic_stats(ctx, st, e);
        topic_log_weights(ctx, st, e, mode, buf);
        let knew = sample_index(st, buf);
        insert_topic_stats(ctx, st, e, knew);
    }
}

/// Removes `e`'s parent link (pair or user-topic count, edge pair, child link).
fn unlink<F: Scalar>(ctx: &SamplerContext<'_, F>, st: &mut SamplerState<F>, e: usize) {
    let k = st.topics[e];
    match st.parents[e] {
        Some(p) => {
            st.counts.remove_pair(st.topics[p], k);
            let edge = st.parent_edges[e].expect("linked event has an edge");
            st.counts.edge_pairs[ctx.groups.group_of(edge)] -= 1;
            st.detach_child(p, e);
        }
        None => st.counts.remove_user(ctx.node[e], k),
    }
    st.parents[e] = None;
    st.parent_edges[e] = None;
}

fn link<F: Scalar>(ctx: &SamplerContext<'_, F>, st: &mut SamplerState<F>, e: usize, choice: Option<(usize, usize)>) {
    let k = st.topics[e];
    match choice {
        Some((p, edge)) => {
            st.counts.add_pair(st.topics[p], k);
            st.counts.edge_pairs[ctx.groups.group_of(edge)] += 1;
            st.children[p].push(e);
            st.parents[e] = Some(p);
            st.parent_edges[e] = Some(edge);
        }
        None => {
            st.counts.add_user(ctx.node[e], k);
            st.parents[e] = None;
            st.parent_edges[e] = None;
        }
    }
}

/// Log weights over `candidates ++ [spontaneous]` for an unlinked `e`.
fn parent_log_weights<F: Scalar>(
    ctx: &SamplerContext<'_, F>,
    st: &SamplerState<F>,
    e: usize,
    mode: SamplerMode,
    out: &mut Vec<F>,
) {
    out.clear();
    let k = st.topics[e];
    let v = ctx.node[e];
    for c in &ctx.candidates[e] {
        let mut lw = st.w[ctx.groups.group_of(c.edge)].ln() - c.lag;
        if mode == SamplerMode::Full {
            lw = lw + ln_trans(ctx, &st.counts, st.topics[c.event], k);
        }
        out.push(lw);
    }
    let mut spont = st.mu[v].ln();
    if mode == SamplerMode::Full {
        spont = spont + ln_user(ctx, &st.counts, v, k);
    }
    out.push(spont);
}

/// Diagonal-mode parent weights: moving `e` re-topics its whole subtree to the
/// new parent's topic, so each candidate is scored by the subtree's words under
/// that topic; spontaneity marginalizes over the new root topic. Returns the
/// per-topic spontaneous log weights for the follow-up topic draw.
fn block_parent_log_weights<F: Scalar>(
    ctx: &SamplerContext<'_, F>,
    st: &SamplerState<F>,
    e: usize,
    block: &Block,
    out: &mut Vec<F>,
) -> Vec<F> {
    out.clear();
    let kk = ctx.topics();
    let word_ll: Vec<F> = (0..kk)
        .map(|k| ln_words(ctx, &st.counts, k, &block.words, block.len))
        .collect();
    for c in &ctx.candidates[e] {
        out.push(st.w[ctx.groups.group_of(c.edge)].ln() - c.lag + word_ll[st.topics[c.event]]);
    }
    let v = ctx.node[e];
    let per_topic: Vec<F> = (0..kk).map(|k| ln_user(ctx, &st.counts, v, k) + word_ll[k]).collect();
    out.push(st.mu[v].ln() + crate::scalar::log_sum_exp(&per_topic));
    per_topic
}

/// Distribution over the parent of `e`: one probability per entry of
/// `ctx.candidates[e]` (same order) followed by spontaneity.
pub fn parent_conditional<F: Scalar>(
    ctx: &SamplerContext<'_, F>,
    st: &mut SamplerState<F>,
    e: usize,
    mode: SamplerMode,
) -> Vec<F> {
    let mut w = Vec::with_capacity(ctx.candidates[e].len() + 1);
    let prev = st.parents[e].map(|p| (p, st.parent_edges[e].expect("edge")));
    let k = st.topics[e];
    if mode == SamplerMode::Diagonal {
        let block = Block::new(ctx, st.subtree(e));
        unlink(ctx, st, e);
        block.shift(ctx, st, k, -1);
        block_parent_log_weights(ctx, st, e, &block, &mut w);
        block.shift(ctx, st, k, 1);
    } else {
        unlink(ctx, st, e);
        parent_log_weights(ctx, st, e, mode, &mut w);
    }
    link(ctx, st, e, prev);
    normalize_log_weights(&mut w);
    w
}

fn resample_parent<F: Scalar>(
    ctx: &SamplerContext<'_, F>,
    st: &mut SamplerState<F>,
    e: usize,
    mode: SamplerMode,
    buf: &mut Vec<F>,
    tally: Option<&mut Vec<F>>,
) {
    let cands = &ctx.candidates[e];
    if mode == SamplerMode::Diagonal {
        let k = st.topics[e];
        let block = Block::new(ctx, st.subtree(e));
        unlink(ctx, st, e);
        block.shift(ctx, st, k, -1);
        let mut per_topic = block_parent_log_weights(ctx, st, e, &block, buf);
        let pick = sample_index(st, buf);
        let (choice, knew) = match cands.get(pick) {
            Some(c) => (Some((c.event, c.edge)), st.topics[c.event]),
            None => (None, sample_index(st, &mut per_topic)),
        };
        block.shift(ctx, st, knew, 1);
        link(ctx, st, e, choice);
    } else {
        unlink(ctx, st, e);
        parent_log_weights(ctx, st, e, mode, buf);
        let pick = sample_index(st, buf);
        link(ctx, st, e, cands.get(pick).map(|c| (c.event, c.edge)));
    }
    if let Some(t) = tally {
        for (acc, &p) in t.iter_mut().zip(buf.iter()) {
            *acc = *acc + p;
        }
    }
}

/// Running sums of parent conditionals, one vector per event (candidates, then spontaneity).
pub type ParentTally<F> = Vec<Vec<F>>;

pub fn empty_tally<F: Scalar>(ctx: &SamplerContext<'_, F>) -> ParentTally<F> {
    ctx.candidates.iter().map(|c| vec![F::zero(); c.len() + 1]).collect()
}

/// One full pass: all topics, then all parents, then strengths and base rates.
pub fn gibbs_sweep<F: Scalar>(
    ctx: &SamplerContext<'_, F>,
    st: &mut SamplerState<F>,
    config: &SamplerConfig<F>,
    mut tally: Option<&mut ParentTally<F>>,
) -> SweepTiming {
    let mode = config.mode;
    let mut buf = Vec::new();
    let t0 = Instant::now();
    for e in 0..ctx.len() {
        resample_topic(ctx, st, e, mode, &mut buf);
    }
    let t1 = Instant::now();
    for e in 0..ctx.len() {
        let acc = tally.as_mut().map(|t| &mut t[e]);
        resample_parent(ctx, st, e, mode, &mut buf, acc);
    }
    let t2 = Instant::now();
    st.w = update_edge_strengths(
        &st.counts.edge_pairs,
        &st.counts.source_exposure,
        ctx.hyper.w_prior_shape,
        ctx.hyper.w_prior_scale,
    );
    st.mu = update_base_rates(
        &st.counts.spontaneous,
        &ctx.dataset.window,
        config.base_rate_smoothing,
        config.fixed_mu.as_deref(),
    );
    let t3 = Instant::now();
    if config.check_counts {
        assert!(st.counts_consistent(ctx), "count tables drifted from the assignments");
    }
    SweepTiming {
        topic_secs: (t1 - t0).as_secs_f64(),
        parent_secs: (t2 - t1).as_secs_f64(),
        strength_secs: (t3 - t2).as_secs_f64(),
        total_secs: (t3 - t0).as_secs_f64(),
    }
}
