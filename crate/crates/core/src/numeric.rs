//! Small floating-point helpers shared by the spectral and protocol layers.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

/// Pairwise (cascade) summation; error grows as O(log n) instead of O(n).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn big_to_f64(value: &BigUint) -> f64 {
    value.to_f64().unwrap_or(f64::INFINITY)
}

pub fn bigint_to_f64(value: &BigInt) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// `num / den` for big integers, accurate even when both exceed `f64` range.
pub fn big_ratio(num: &BigUint, den: &BigUint) -> f64 {
    let shift = num.bits().max(den.bits()).saturating_sub(1000);
    let n = big_to_f64(&(num >> shift));
    let d = big_to_f64(&(den >> shift));
    n / d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let v: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 5050.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn big_ratio_handles_huge_operands() {
        let a = BigUint::from(3u32).pow(2000);
        let b = BigUint::from(3u32).pow(1999);
        assert!((big_ratio(&a, &b) - 3.0).abs() < 1e-12);
    }
}
