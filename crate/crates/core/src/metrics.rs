//! Adjusted Rand Index for comparing two labelings.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::result::NOISE;

fn comb2(v: usize) -> f64 {
    let v = v as f64;
    v * (v - 1.0) / 2.0
}

/// ARI of two labelings of the same points. Labels are compared as opaque
/// values, so [`NOISE`] counts as one group; see [`noise_as_singletons`].
pub fn adjusted_rand_index(a: &[i64], b: &[i64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "label length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Ok(1.0);
    }
    let mut left: HashMap<i64, usize> = HashMap::new();
    let mut right: HashMap<i64, usize> = HashMap::new();
    let mut joint: HashMap<(i64, i64), usize> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *left.entry(x).or_default() += 1;
        *right.entry(y).or_default() += 1;
        *joint.entry((x, y)).or_default() += 1;
    }
    let index: f64 = joint.values().map(|&c| comb2(c)).sum();
    let sum_a: f64 = left.values().map(|&c| comb2(c)).sum();
    let sum_b: f64 = right.values().map(|&c| comb2(c)).sum();
    let expected = sum_a * sum_b / comb2(n);
    let max_index = 0.5 * (sum_a + sum_b);
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((index - expected) / denom)
}

/// Gives every noise point its own label, so noise never counts as a shared
/// group.
pub fn noise_as_singletons(labels: &[i64]) -> Vec<i64> {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| if l == NOISE { -2 - i as i64 } else { l })
        .collect()
}
