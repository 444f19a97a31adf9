use serde::Serialize;

use crate::model::{ObservationWindow, Table};
use crate::scalar::Scalar;

use super::context::SamplerContext;
use super::SamplerMode;

/// Sufficient statistics of a topic/parent assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct CountStatistics<F = f64> {
    /// Parent-child pairs by (parent topic, child topic).
    pub trans: Table<u32>,
    pub trans_row: Vec<u32>,
    /// Word occurrences by (topic, word).
    pub word: Table<u32>,
    pub word_row: Vec<u32>,
    /// Spontaneous events by (node, topic).
    pub user: Table<u32>,
    pub user_row: Vec<u32>,
    /// Events per topic, all events.
    pub topic_total: Vec<u32>,
    /// Parent-child pairs per edge group.
    pub edge_pairs: Vec<u32>,
    /// Exposure per edge group (constant for a dataset).
    pub source_exposure: Vec<F>,
    /// Spontaneous events per node.
    pub spontaneous: Vec<u32>,
}

impl<F: Scalar> CountStatistics<F> {
    pub fn zeros(ctx: &SamplerContext<'_, F>) -> Self {
        let k = ctx.topics();
        let n = ctx.node_count();
        CountStatistics {
            trans: Table::filled(k, k, 0),
            trans_row: vec![0; k],
            word: Table::filled(k, ctx.vocab_size(), 0),
            word_row: vec![0; k],
            user: Table::filled(n, k, 0),
            user_row: vec![0; n],
            topic_total: vec![0; k],
            edge_pairs: vec![0; ctx.groups.len()],
            source_exposure: ctx.exposure.clone(),
            spontaneous: vec![0; n],
        }
    }

    /// Tallies all tables from scratch.
    pub fn tally(ctx: &SamplerContext<'_, F>, topics: &[usize], parents: &[Option<usize>]) -> Self {
        let mut c = Self::zeros(ctx);
        for e in 0..topics.len() {
            let k = topics[e];
            c.add_words(ctx, e, k, 1);
            c.topic_total[k] += 1;
            match parents[e] {
                Some(p) => {
                    c.add_pair(topics[p], k);
                    let edge = ctx.edge_between_events(p, e).expect("parent is at a followee");
                    c.edge_pairs[ctx.groups.group_of(edge)] += 1;
                }
                None => c.add_user(ctx.node[e], k),
            }
        }
        c
    }

    #[inline]
    pub(crate) fn add_words(&mut self, ctx: &SamplerContext<'_, F>, e: usize, k: usize, sign: i32) {
        let row = self.word.row_mut(k);
        for &(w, c) in &ctx.docs[e] {
            row[w as usize] = row[w as usize].wrapping_add_signed(sign * c as i32);
        }
        self.word_row[k] = self.word_row[k].wrapping_add_signed(sign * ctx.doc_len[e] as i32);
    }

    #[inline]
    pub(crate) fn add_pair(&mut self, from: usize, to: usize) {
        self.trans[(from, to)] += 1;
        self.trans_row[from] += 1;
    }

    #[inline]
    pub(crate) fn remove_pair(&mut self, from: usize, to: usize) {
        self.trans[(from, to)] -= 1;
        self.trans_row[from] -= 1;
    }

    #[inline]
    pub(crate) fn add_user(&mut self, v: usize, k: usize) {
        self.user[(v, k)] += 1;
        self.user_row[v] += 1;
        self.spontaneous[v] += 1;
    }

    #[inline]
    pub(crate) fn remove_user(&mut self, v: usize, k: usize) {
        self.user[(v, k)] -= 1;
        self.user_row[v] -= 1;
        self.spontaneous[v] -= 1;
    }

    pub fn diffusion_pairs(&self) -> u64 {
        self.trans_row.iter().map(|&x| x as u64).sum()
    }

    pub fn total_tokens(&self) -> u64 {
        self.word_row.iter().map(|&x| x as u64).sum()
    }

    /// Row sums agree with element sums in every table.
    pub fn rows_consistent(&self) -> bool {
        let rows_ok = |t: &Table<u32>, r: &[u32]| {
            t.iter_rows().zip(r).all(|(row, &s)| row.iter().map(|&x| x as u64).sum::<u64>() == s as u64)
        };
        rows_ok(&self.trans, &self.trans_row)
            && rows_ok(&self.word, &self.word_row)
            && rows_ok(&self.user, &self.user_row)
            && self.user_row == self.spontaneous
    }
}

/// Point estimates of the integrated-out distributions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimates<F = f64> {
    pub zeta: Table<F>,
    pub phi: Table<F>,
    pub trans: Table<F>,
}

fn smoothed_rows<F: Scalar>(counts: &Table<u32>, prior: &[F]) -> Table<F> {
    let mut out = Table::filled(counts.rows(), counts.cols(), F::zero());
    let prior_sum: F = prior.iter().copied().sum();
    for r in 0..counts.rows() {
        let row = counts.row(r);
        let total = F::of(row.iter().map(|&x| x as f64).sum::<f64>()) + prior_sum;
        for (o, (&c, &a)) in out.row_mut(r).iter_mut().zip(row.iter().zip(prior)) {
            *o = (F::of(c as f64) + a) / total;
        }
    }
    out
}

/// Smoothed-count estimates ζ̂, φ̂, 𝒯̂. In decoupled mode every event draws its
/// topic from one global mixture, so both φ̂ and 𝒯̂ rows equal that mixture.
pub fn estimate_parameters<F: Scalar>(
    counts: &CountStatistics<F>,
    alpha: &[F],
    beta: &[F],
    gamma: &[F],
    mode: SamplerMode,
) -> Estimates<F> {
    let zeta = smoothed_rows(&counts.word, alpha);
    match mode {
        SamplerMode::Decoupled => {
            let global = Table::from_rows(vec![counts.topic_total.clone()]).expect("one row");
            let theta = smoothed_rows(&global, gamma);
            let row = theta.row(0).to_vec();
            let k = row.len();
            Estimates {
                zeta,
                phi: Table::from_rows(vec![row.clone(); counts.user.rows()])
                    .unwrap_or_else(|_| Table::filled(0, k, F::zero())),
                trans: Table::from_rows(vec![row; k]).expect("square"),
            }
        }
        SamplerMode::Full | SamplerMode::Diagonal => Estimates {
            zeta,
            phi: smoothed_rows(&counts.user, gamma),
            trans: smoothed_rows(&counts.trans, beta),
        },
    }
}

/// Gamma-Poisson posterior mean `(α′ + pairs) / (1/β′ + exposure)` per group;
/// groups without any parent-child pair keep the prior mean `α′β′`.
pub fn update_edge_strengths<F: Scalar>(
    edge_pairs: &[u32],
    exposure: &[F],
    shape: F,
    scale: F,
) -> Vec<F> {
    edge_pairs
        .iter()
        .zip(exposure)
        .map(|(&n, &x)| {
            if n == 0 {
                shape * scale
            } else {
                (shape + F::of(n as f64)) / (scale.recip() + x)
            }
        })
        .collect()
}

/// Smoothed base rates `(spontaneous(v) + a₀) / (T − start + b₀)`, or `fixed` verbatim.
pub fn update_base_rates<F: Scalar>(
    spontaneous: &[u32],
    window: &ObservationWindow<F>,
    smoothing: (F, F),
    fixed: Option<&[F]>,
) -> Vec<F> {
    if let Some(mu) = fixed {
        return mu.to_vec();
    }
    let denom = window.length() + smoothing.1;
    spontaneous
        .iter()
        .map(|&s| (F::of(s as f64) + smoothing.0) / denom)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strength_posterior_mean() {
        let w = update_edge_strengths(&[5, 0], &[10.0f64, 10.0], 2.0, 1.0);
        assert!((w[0] - 7.0 / 11.0).abs() < 1e-15);
        assert_eq!(w[1], 2.0);
        // concentration on the empirical ratio
        let w = update_edge_strengths(&[3_000_000], &[10_000_000.0f64], 2.0, 0.5);
        assert!((w[0] - 0.3).abs() < 1e-6);
    }

    #[test]
    fn base_rates() {
        let win = ObservationWindow::new(0.0f64, 100.0).unwrap();
        let mu = update_base_rates(&[10, 0], &win, (1.0, 1.0), None);
        assert!((mu[0] - 11.0 / 101.0).abs() < 1e-15);
        assert!((mu[1] - 1.0 / 101.0).abs() < 1e-15);
        let fixed = [0.25, 0.5];
        assert_eq!(update_base_rates(&[10, 0], &win, (1.0, 1.0), Some(&fixed)), fixed);
    }

    #[test]
    fn transition_estimate_arithmetic() {
        let counts = Table::from_rows(vec![vec![8u32, 2], vec![0, 0]]).unwrap();
        let t = smoothed_rows(&counts, &[1.0f64, 1.0]);
        assert_eq!(t.row(0), &[0.75, 0.25]);
        assert_eq!(t.row(1), &[0.5, 0.5]);
    }
}
