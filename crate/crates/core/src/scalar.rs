//! Floating-point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar usable throughout the model: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from `f64`; every literal in the crate goes through this.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `ln Γ(x)` evaluated in `f64` and cast back.
pub fn ln_gamma<F: Scalar>(x: F) -> F {
    F::of(statrs::function::gamma::ln_gamma(x.as_f64()))
}

/// Numerically stable `ln Σ exp(x_i)`. Returns `-inf` for an empty or all `-inf` slice.
pub fn log_sum_exp<F: Scalar>(xs: &[F]) -> F {
    let max = xs.iter().copied().fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() {
        return max;
    }
    let s: F = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}

/// Normalizes log weights into probabilities in place. An all `-inf` input becomes uniform.
pub fn normalize_log_weights<F: Scalar>(xs: &mut [F]) {
    let lse = log_sum_exp(xs);
    if lse == F::neg_infinity() || lse.is_nan() {
        let u = F::one() / F::of_usize(xs.len().max(1));
        xs.iter_mut().for_each(|x| *x = u);
        return;
    }
    xs.iter_mut().for_each(|x| *x = (*x - lse).exp());
}

/// Pairwise (tree) summation; the reduction order depends only on the length.
pub fn pairwise_sum<F: Scalar>(xs: &[F]) -> F {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().copied().fold(F::zero(), |a, b| a + b);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_naive() {
        let xs = [0.1f64, -2.0, 3.5];
        let naive = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - naive).abs() < 1e-12);
        assert_eq!(log_sum_exp::<f64>(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn normalize_handles_underflow() {
        let mut xs = [-1.0e5f64, -1.0e5 - 2.0f64.ln()];
        normalize_log_weights(&mut xs);
        assert!((xs[0] - 2.0 / 3.0).abs() < 1e-12);
        let mut dead = [f64::NEG_INFINITY; 4];
        normalize_log_weights(&mut dead);
        assert_eq!(dead, [0.25; 4]);
    }

    #[test]
    fn pairwise_sum_f32_and_f64() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499500.0);
        let ys: Vec<f32> = vec![0.5; 100];
        assert_eq!(pairwise_sum(&ys), 50.0);
    }

    #[test]
    fn ln_gamma_small_integers() {
        assert!((ln_gamma(5.0f64) - 24f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(1.0f32)).abs() < 1e-6);
    }
}
