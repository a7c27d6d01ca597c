//! Order-fixed pairwise summation.
//!
//! The result depends only on the order of the slice, never on how the
//! values were produced, which keeps parallel aggregation bit-reproducible.

const BLOCK: usize = 32;

pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= BLOCK {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
