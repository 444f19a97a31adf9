use hmhp::model::Table;
use hmhp::topic_analysis::{hits_scores, personalized_pagerank, TopicGraph};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

fn principal(m: DMatrix<f64>) -> Vec<f64> {
    let eig = SymmetricEigen::new(m);
    let top = eig.eigenvalues.imax();
    let v = eig.eigenvectors.column(top);
    let sign = if v.sum() < 0.0 { -1.0 } else { 1.0 };
    v.iter().map(|x| x * sign).collect()
}

#[test]
fn hits_matches_dense_eigenvectors() {
    let rows = vec![vec![0.0, 0.5, 0.2], vec![0.3, 0.0, 0.6], vec![0.4, 0.15, 0.0]];
    let graph = TopicGraph {
        weights: Table::from_rows(rows.clone()).unwrap(),
        threshold: 0.0,
        diagonal_removed: true,
    };
    let w = DMatrix::from_fn(3, 3, |i, j| rows[i][j]);
    let hubs = principal(&w * w.transpose());
    let auths = principal(w.transpose() * &w);
    let got = hits_scores(&graph, 100_000, 1e-15);
    assert!(got.converged);
    for i in 0..3 {
        assert!((got.hubs[i] - hubs[i]).abs() < 1e-8, "hub {i}: {} vs {}", got.hubs[i], hubs[i]);
        assert!((got.authorities[i] - auths[i]).abs() < 1e-8);
    }
}

fn ppr_oracle(trans: &[Vec<f64>], start: usize, restart: f64) -> Vec<f64> {
    let k = trans.len();
    let t = DMatrix::from_fn(k, k, |i, j| trans[i][j]);
    let a = DMatrix::identity(k, k) - t.transpose() * (1.0 - restart);
    let mut b = DVector::zeros(k);
    b[start] = restart;
    a.lu().solve(&b).unwrap().iter().copied().collect()
}

#[test]
fn pagerank_matches_linear_solve() {
    let chain = vec![vec![0.1, 0.9, 0.0], vec![0.0, 0.2, 0.8], vec![0.7, 0.0, 0.3]];
    let trans = Table::from_rows(chain.clone()).unwrap();
    for start in 0..3 {
        for restart in [0.15, 0.5, 0.9] {
            let got = personalized_pagerank(&trans, start, restart, &[], 3).unwrap();
            let want = ppr_oracle(&chain, start, restart);
            for (g, w) in got.scores.iter().zip(&want) {
                assert!((g - w).abs() < 1e-10, "start {start} restart {restart}: {g} vs {w}");
            }
            assert_eq!(got.top.len(), 2);
            assert!(got.top.iter().all(|&(t, _)| t != start));
        }
    }
}

#[test]
fn pagerank_exclusion_renormalizes_rows() {
    let full = vec![
        vec![0.1, 0.4, 0.3, 0.2],
        vec![0.3, 0.1, 0.5, 0.1],
        vec![0.25, 0.25, 0.25, 0.25],
        vec![0.0, 0.6, 0.2, 0.2],
    ];
    let trans = Table::from_rows(full.clone()).unwrap();
    let got = personalized_pagerank(&trans, 1, 0.15, &[2], 5).unwrap();
    let kept = [0, 1, 3];
    let sub: Vec<Vec<f64>> = kept
        .iter()
        .map(|&i| {
            let total: f64 = kept.iter().map(|&j| full[i][j]).sum();
            kept.iter().map(|&j| full[i][j] / total).collect()
        })
        .collect();
    let want = ppr_oracle(&sub, 1, 0.15);
    assert_eq!(got.scores[2], 0.0);
    for (pos, &t) in kept.iter().enumerate() {
        assert!((got.scores[t] - want[pos]).abs() < 1e-10);
    }
    assert!(got.top.iter().all(|&(t, _)| t != 2 && t != 1));
    assert!(personalized_pagerank(&trans, 2, 0.15, &[2], 3).is_err());
}
