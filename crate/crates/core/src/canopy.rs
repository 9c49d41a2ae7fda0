//! Canopy pre-clustering with the L∞ metric as the cheap distance.
//!
//! Seeds are taken in ascending id order, so the sweep is deterministic.
//! Candidate lookup goes through an [`SsTree`] ball of radius `t1·√D`, which
//! contains every point within `t1` under L∞; the canopies are identical to
//! those of a linear sweep.

use crate::data::{chebyshev, Dataset, Point};
use crate::error::{Error, Result};
use crate::ss_tree::SsTree;

/// Fallback tight threshold when every sampled point has a duplicate at its
/// m-th neighbour.
const DEGENERATE_T2: f64 = 1e-9;
const T1_OVER_T2: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanopyConfig {
    /// Loose threshold: canopy membership.
    pub t1: f64,
    /// Tight threshold: removal from candidacy.
    pub t2: f64,
}

impl CanopyConfig {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(t1) || !ok(t2) {
            return Err(Error::invalid(format!(
                "canopy thresholds must be finite and positive (t1={t1}, t2={t2})"
            )));
        }
        if t2 > t1 {
            return Err(Error::invalid(format!(
                "canopy t2 ({t2}) exceeds t1 ({t1})"
            )));
        }
        Ok(CanopyConfig { t1, t2 })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canopy {
    pub center_id: usize,
    /// Ascending ids within `t1` (L∞) of the seed; includes the seed.
    pub member_ids: Vec<usize>,
}

/// Ids sampled for threshold estimation: every `ceil(n / 1000)`-th id, or
/// all ids when that would leave fewer than 32.
pub fn threshold_sample(n: usize) -> Vec<usize> {
    let mut step = n.div_ceil(1000).max(1);
    if n / step < 32 {
        step = 1;
    }
    (0..n).step_by(step).collect()
}

/// `t2` is the mean distance from each sampled point to its `m`-th nearest
/// neighbour; `t1 = 3·t2`.
pub fn estimate_thresholds(data: &Dataset, m: usize) -> Result<CanopyConfig> {
    if data.len() < 2 {
        return Err(Error::invalid(
            "threshold estimation needs at least 2 points",
        ));
    }
    if m == 0 {
        return Err(Error::invalid("m must be >= 1"));
    }
    Ok(estimate_thresholds_indexed(data, &SsTree::build(data), m))
}

pub(crate) fn estimate_thresholds_indexed(
    data: &Dataset,
    index: &SsTree,
    m: usize,
) -> CanopyConfig {
    let sample = threshold_sample(data.len());
    let total: f64 = sample
        .iter()
        .map(|&id| {
            index
                .knn(data.point(id), m, false)
                .ok()
                .and_then(|nn| nn.last().map(|x| x.distance))
                .unwrap_or(0.0)
        })
        .sum();
    let mut t2 = total / sample.len() as f64;
    if t2.is_nan() || t2 <= 0.0 {
        t2 = DEGENERATE_T2;
    }
    CanopyConfig {
        t1: T1_OVER_T2 * t2,
        t2,
    }
}

pub fn canopy_cluster(data: &Dataset, cfg: &CanopyConfig) -> Vec<Canopy> {
    canopy_cluster_indexed(data, &SsTree::build(data), cfg)
}

pub(crate) fn canopy_cluster_indexed(
    data: &Dataset,
    index: &SsTree,
    cfg: &CanopyConfig,
) -> Vec<Canopy> {
    let n = data.len();
    let mut candidate = vec![true; n];
    let mut canopies = Vec::new();
    let ball = cfg.t1 * (data.dim() as f64).sqrt() * (1.0 + 1e-9);
    let mut next = 0;
    while next < n {
        if !candidate[next] {
            next += 1;
            continue;
        }
        let seed: Point<'_> = data.point(next);
        let near = index
            .range(seed.coords, ball)
            .expect("valid radius and dims");
        let mut members = Vec::new();
        for id in near {
            if !candidate[id] {
                continue;
            }
            let d = chebyshev(seed.coords, data.coords(id));
            if d <= cfg.t1 {
                members.push(id);
                if d <= cfg.t2 {
                    candidate[id] = false;
                }
            }
        }
        canopies.push(Canopy {
            center_id: seed.id,
            member_ids: members,
        });
    }
    canopies
}
