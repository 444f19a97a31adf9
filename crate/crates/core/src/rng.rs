//! Seed derivation and the few samplers not covered by `rand_distr`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::scalar::{log_sum_exp, Scalar};

pub type SimRng = ChaCha8Rng;

/// Independent stream for `(seed, domain, key)`. Streams for distinct keys do not
/// overlap, so work keyed by e.g. an event id is reproducible in any order.
pub fn stream_rng(seed: u64, domain: u64, key: u64) -> SimRng {
    let mixed = seed ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    rng.set_stream(key);
    rng
}

pub(crate) mod domain {
    pub const SPONTANEOUS: u64 = 1;
    pub const CHILDREN: u64 = 2;
    pub const DOCUMENTS: u64 = 3;
    pub const PARAMETERS: u64 = 4;
    pub const SAMPLER: u64 = 5;
    pub const NETWORK: u64 = 6;
}

/// `ln X` for `X ~ Gamma(shape, 1)`, stable for tiny shapes where `X` itself underflows.
pub fn ln_gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape >= 1.0 {
        Gamma::new(shape, 1.0).expect("positive shape").sample(rng).ln()
    } else {
        // Gamma(a) = Gamma(a + 1) · U^{1/a}
        let g = Gamma::new(shape + 1.0, 1.0).expect("positive shape").sample(rng);
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        g.ln() + u.ln() / shape
    }
}

/// One draw from `Dir(concentration)`; exact row sum 1 up to rounding even for
/// concentrations around 1e-3.
pub fn dirichlet<F: Scalar, R: Rng + ?Sized>(concentration: &[F], rng: &mut R) -> Vec<F> {
    let logs: Vec<f64> = concentration
        .iter()
        .map(|a| ln_gamma_variate(a.as_f64(), rng))
        .collect();
    let lse = log_sum_exp(&logs);
    let mut p: Vec<f64> = logs.iter().map(|l| (l - lse).exp()).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p.into_iter().map(F::of).collect()
}

/// Index drawn proportionally to nonnegative `weights` (linear scan).
pub fn categorical<F: Scalar, R: Rng + ?Sized>(weights: &[F], rng: &mut R) -> usize {
    let total: F = weights.iter().copied().sum();
    let mut u = F::of(rng.gen::<f64>()) * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u = u - w;
    }
    // rounding: fall back to the last positive weight
    weights.iter().rposition(|&w| w > F::zero()).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| 0).scan(stream_rng(7, 1, 3), |r, _| Some(r.gen())).collect();
        let b: Vec<u64> = (0..4).map(|_| 0).scan(stream_rng(7, 1, 3), |r, _| Some(r.gen())).collect();
        let c: Vec<u64> = (0..4).map(|_| 0).scan(stream_rng(7, 1, 4), |r, _| Some(r.gen())).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn dirichlet_tiny_concentration_sums_to_one() {
        let mut rng = stream_rng(1, 0, 0);
        for _ in 0..100 {
            let p = dirichlet(&[0.001f64; 10], &mut rng);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|x| x.is_finite() && *x >= 0.0));
        }
    }

    #[test]
    fn categorical_frequencies() {
        let mut rng = stream_rng(2, 0, 0);
        let w = [0.2f64, 0.0, 0.8];
        let mut counts = [0usize; 3];
        for _ in 0..20_000 {
            counts[categorical(&w, &mut rng)] += 1;
        }
        assert_eq!(counts[1], 0);
        assert!((counts[0] as f64 / 20_000.0 - 0.2).abs() < 0.02);
    }
}
