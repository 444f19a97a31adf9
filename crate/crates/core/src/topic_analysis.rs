//! Analyses of an estimated topic transition matrix: asymmetric pairs, HITS
//! hubs and authorities, personalized PageRank, and top words per topic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Table;
use crate::scalar::Scalar;

/// Weighted directed graph over topics.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicGraph<F = f64> {
    pub weights: Table<F>,
    pub threshold: F,
    pub diagonal_removed: bool,
}

impl<F: Scalar> TopicGraph<F> {
    /// Keeps entries strictly above `threshold`, optionally dropping the diagonal.
    pub fn from_transitions(trans: &Table<F>, threshold: F, remove_diagonal: bool) -> Result<Self> {
        if trans.rows() != trans.cols() {
            return Err(Error::invalid("transition matrix must be square"));
        }
        let mut weights = trans.clone();
        for k in 0..trans.rows() {
            for j in 0..trans.cols() {
                let w = trans[(k, j)];
                if w < F::zero() {
                    return Err(Error::invalid("transition weights must be nonnegative"));
                }
                if !(w > threshold) || (remove_diagonal && k == j) {
                    weights[(k, j)] = F::zero();
                }
            }
        }
        Ok(TopicGraph {
            weights,
            threshold,
            diagonal_removed: remove_diagonal,
        })
    }

    pub fn topics(&self) -> usize {
        self.weights.rows()
    }
}

/// `𝒯_{kk′} − 𝒯_{k′k}`.
pub fn asymmetry<F: Scalar>(trans: &Table<F>, k: usize, kp: usize) -> F {
    trans[(k, kp)] - trans[(kp, k)]
}

/// The `top_n` most asymmetric topic pairs, each unordered pair once in its
/// positive orientation. Pairs with zero asymmetry are not listed.
pub fn asymmetric_pairs<F: Scalar>(trans: &Table<F>, top_n: usize) -> Vec<(usize, usize, F)> {
    let k = trans.rows();
    let mut out = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            let d = asymmetry(trans, a, b);
            if d > F::zero() {
                out.push((a, b, d));
            } else if d < F::zero() {
                out.push((b, a, -d));
            }
        }
    }
    out.sort_by(|x, y| y.2.partial_cmp(&x.2).unwrap_or(std::cmp::Ordering::Equal).then((x.0, x.1).cmp(&(y.0, y.1))));
    out.truncate(top_n);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitsScores<F = f64> {
    pub hubs: Vec<F>,
    pub authorities: Vec<F>,
    pub iterations: usize,
    pub converged: bool,
    /// The graph had no edges; scores are uniform.
    pub degenerate: bool,
}

fn l2_normalize<F: Scalar>(v: &mut [F]) -> bool {
    let norm = v.iter().map(|&x| x * x).sum::<F>().sqrt();
    if norm > F::zero() {
        v.iter_mut().for_each(|x| *x = *x / norm);
        true
    } else {
        false
    }
}

/// Weighted HITS by power iteration: authority ← Wᵀ·hub, hub ← W·authority,
/// both unit-L2 after each step. Stops once no score moves more than `tol`.
pub fn hits_scores<F: Scalar>(graph: &TopicGraph<F>, iterations: usize, tol: F) -> HitsScores<F> {
    let k = graph.topics();
    let w = &graph.weights;
    let active: Vec<bool> = (0..k)
        .map(|i| (0..k).any(|j| w[(i, j)] > F::zero() || w[(j, i)] > F::zero()))
        .collect();
    if !active.iter().any(|&a| a) {
        log::warn!("HITS on a graph without edges; returning uniform scores");
        let u = if k == 0 { F::zero() } else { F::one() / F::of_usize(k).sqrt() };
        return HitsScores {
            hubs: vec![u; k],
            authorities: vec![u; k],
            iterations: 0,
            converged: true,
            degenerate: true,
        };
    }
    let mut hubs: Vec<F> = vec![F::one(); k];
    l2_normalize(&mut hubs);
    let mut auth = vec![F::zero(); k];
    let mut done = 0;
    let mut converged = false;
    while done < iterations {
        done += 1;
        let mut next_auth: Vec<F> = (0..k).map(|j| (0..k).map(|i| w[(i, j)] * hubs[i]).sum()).collect();
        l2_normalize(&mut next_auth);
        let mut next_hubs: Vec<F> = (0..k).map(|i| (0..k).map(|j| w[(i, j)] * next_auth[j]).sum()).collect();
        l2_normalize(&mut next_hubs);
        let delta = hubs
            .iter()
            .zip(&next_hubs)
            .chain(auth.iter().zip(&next_auth))
            .map(|(a, b)| (*a - *b).abs())
            .fold(F::zero(), F::max);
        hubs = next_hubs;
        auth = next_auth;
        if delta < tol {
            converged = true;
            break;
        }
    }
    HitsScores {
        hubs,
        authorities: auth,
        iterations: done,
        converged,
        degenerate: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PageRank<F = f64> {
    /// Stationary score per topic; excluded topics score 0.
    pub scores: Vec<F>,
    /// Highest-scoring topics other than the start, best first.
    pub top: Vec<(usize, F)>,
    pub iterations: usize,
}

/// Solves `r = restart·e_start + (1 − restart)·𝒯̃ᵀ r` by fixed-point iteration,
/// where 𝒯̃ drops the `excluded` topics and renormalizes rows. A row left
/// without mass sends its walker back to the start.
pub fn personalized_pagerank<F: Scalar>(
    trans: &Table<F>,
    start: usize,
    restart: F,
    excluded: &[usize],
    top_n: usize,
) -> Result<PageRank<F>> {
    let k = trans.rows();
    if trans.cols() != k {
        return Err(Error::invalid("transition matrix must be square"));
    }
    if start >= k {
        return Err(Error::invalid(format!("start topic {start} outside [0, {k})")));
    }
    if excluded.contains(&start) {
        return Err(Error::invalid(format!("start topic {start} is excluded")));
    }
    if !(restart > F::zero() && restart <= F::one()) {
        return Err(Error::invalid("restart probability must lie in (0, 1]"));
    }
    let mut keep = vec![true; k];
    for &x in excluded {
        if x < k {
            keep[x] = false;
        }
    }
    let mut walk = Table::filled(k, k, F::zero());
    for i in (0..k).filter(|&i| keep[i]) {
        let total: F = (0..k).filter(|&j| keep[j]).map(|j| trans[(i, j)]).sum();
        if total > F::zero() {
            for j in (0..k).filter(|&j| keep[j]) {
                walk[(i, j)] = trans[(i, j)] / total;
            }
        } else {
            walk[(i, start)] = F::one();
        }
    }
    let damp = F::one() - restart;
    let mut r = vec![F::zero(); k];
    r[start] = F::one();
    let tol = F::epsilon() * F::of_usize(16 * k);
    let mut iterations = 0;
    for _ in 0..20_000 {
        iterations += 1;
        let mut next: Vec<F> = (0..k).map(|j| damp * (0..k).map(|i| walk[(i, j)] * r[i]).sum::<F>()).collect();
        next[start] = next[start] + restart;
        let delta = r.iter().zip(&next).map(|(a, b)| (*a - *b).abs()).sum::<F>();
        r = next;
        if delta < tol {
            break;
        }
    }
    let mut top: Vec<(usize, F)> = (0..k).filter(|&j| j != start && keep[j]).map(|j| (j, r[j])).collect();
    top.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
    top.truncate(top_n);
    Ok(PageRank {
        scores: r,
        top,
        iterations,
    })
}

/// Per topic, the `n` most probable word ids with their probabilities; ties go
/// to the smaller id.
pub fn top_words_per_topic<F: Scalar>(zeta: &Table<F>, n: usize) -> Vec<Vec<(usize, F)>> {
    zeta.iter_rows()
        .map(|row| {
            let mut idx: Vec<usize> = (0..row.len()).collect();
            idx.sort_by(|&a, &b| row[b].partial_cmp(&row[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
            idx.truncate(n);
            idx.into_iter().map(|w| (w, row[w])).collect()
        })
        .collect()
}

/// Gini coefficient of nonnegative values; 0 for equal values, near 1 when one
/// value holds all the mass.
pub fn gini<F: Scalar>(values: &[F]) -> F {
    let n = values.len();
    let total: F = values.iter().copied().sum();
    if n == 0 || !(total > F::zero()) {
        return F::zero();
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let weighted: F = v.iter().enumerate().map(|(i, &x)| F::of_usize(2 * (i + 1)) * x).sum();
    let nf = F::of_usize(n);
    weighted / (nf * total) - (nf + F::one()) / nf
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(rows: Vec<Vec<f64>>) -> Table<f64> {
        Table::from_rows(rows).unwrap()
    }

    #[test]
    fn asymmetric_examples() {
        let m = t(vec![vec![0.2, 0.8], vec![0.6, 0.4]]);
        let pairs = asymmetric_pairs(&m, 5);
        assert_eq!(pairs.len(), 1);
        assert_eq!((pairs[0].0, pairs[0].1), (0, 1));
        assert!((pairs[0].2 - 0.2).abs() < 1e-12);
        assert_eq!(asymmetry(&m, 0, 1), -asymmetry(&m, 1, 0));
        let sym = t(vec![vec![0.5, 0.25, 0.25], vec![0.25, 0.5, 0.25], vec![0.25, 0.25, 0.5]]);
        assert!(asymmetric_pairs(&sym, 5).is_empty());
        let id = t(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(asymmetric_pairs(&id, 5).is_empty());
    }

    #[test]
    fn graph_threshold() {
        let m = t(vec![vec![0.85, 0.1, 0.05], vec![0.3, 0.6, 0.1], vec![0.0, 0.5, 0.5]]);
        let g = TopicGraph::from_transitions(&m, 0.1, true).unwrap();
        assert_eq!(g.weights.to_rows(), vec![vec![0.0, 0.0, 0.0], vec![0.3, 0.0, 0.0], vec![0.0, 0.5, 0.0]]);
    }

    #[test]
    fn hits_single_edge_and_complete() {
        let g = TopicGraph::from_transitions(&t(vec![vec![0.0, 1.0], vec![0.0, 0.0]]), 0.0, true).unwrap();
        let h = hits_scores(&g, 100, 1e-12);
        assert_eq!(h.hubs, vec![1.0, 0.0]);
        assert_eq!(h.authorities, vec![0.0, 1.0]);
        let c = t(vec![vec![0.0, 0.5, 0.5], vec![0.5, 0.0, 0.5], vec![0.5, 0.5, 0.0]]);
        let h = hits_scores(&TopicGraph::from_transitions(&c, 0.0, true).unwrap(), 100, 1e-12);
        let u = 1.0 / 3f64.sqrt();
        assert!(h.hubs.iter().chain(&h.authorities).all(|x| (x - u).abs() < 1e-12));
        let empty = TopicGraph::from_transitions(&t(vec![vec![1.0, 0.0], vec![0.0, 1.0]]), 0.1, true).unwrap();
        assert!(hits_scores(&empty, 10, 1e-9).degenerate);
    }

    #[test]
    fn pagerank_restart_one_and_uniform() {
        let u = t(vec![vec![0.25; 4]; 4]);
        let r = personalized_pagerank(&u, 1, 1.0, &[], 3).unwrap();
        assert_eq!(r.scores, vec![0.0, 1.0, 0.0, 0.0]);
        let r = personalized_pagerank(&u, 1, 0.15, &[], 3).unwrap();
        assert!((r.scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((r.top[0].1 - r.top[2].1).abs() < 1e-12);
        assert!(r.top.iter().all(|&(k, _)| k != 1));
        assert!(personalized_pagerank(&u, 1, 0.15, &[1], 3).is_err());
        assert!(personalized_pagerank(&u, 1, 0.0, &[], 3).is_err());
        let r = personalized_pagerank(&u, 0, 0.15, &[2], 3).unwrap();
        assert_eq!(r.scores[2], 0.0);
        assert_eq!(r.top.len(), 2);
    }

    #[test]
    fn top_words_ties_and_overflow() {
        let z = t(vec![vec![0.0, 0.0, 1.0], vec![0.25; 4][..3].to_vec()]);
        let w = top_words_per_topic(&z, 2);
        assert_eq!(w[0][0].0, 2);
        assert_eq!(w[1].iter().map(|x| x.0).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(top_words_per_topic(&z, 10)[0].len(), 3);
    }

    #[test]
    fn gini_extremes() {
        assert_eq!(gini::<f64>(&[1.0, 1.0, 1.0, 1.0]), 0.0);
        assert!((gini::<f64>(&[0.0, 0.0, 0.0, 1.0]) - 0.75).abs() < 1e-12);
    }
}
