//! Per-partition ε inference and the density-reachability merge run inside
//! each region.
//!
//! A point is core when at least `m` indexed points (itself included) lie
//! within ε of it. Every core point is unioned with all of its ε-neighbours,
//! core or not, so a non-core point reached by cores of two groups joins the
//! groups into one cluster. After the sweep a point is noise iff its set holds
//! no core point.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::result::NOISE;
use crate::ss_tree::SsTree;
use crate::union_find::{UnionFind, UnionFindStats};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityConfig {
    /// Minimum neighbourhood size (self included) for a core point.
    pub m: usize,
    /// Scan radius.
    pub epsilon: f64,
}

impl DensityConfig {
    pub fn new(m: usize, epsilon: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("m must be >= 1"));
        }
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::invalid(format!(
                "epsilon must be finite and >= 0, got {epsilon}"
            )));
        }
        Ok(DensityConfig { m, epsilon })
    }
}

/// Result of clustering one set of points. All vectors are parallel to
/// `ids`, which is ascending. Cluster labels are the minimum id of the
/// cluster, or [`NOISE`].
#[derive(Debug, Clone, Default)]
pub struct LocalLabeling {
    pub ids: Vec<usize>,
    pub labels: Vec<i64>,
    pub core: Vec<bool>,
    pub stats: UnionFindStats,
}

impl LocalLabeling {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn label_of(&self, id: usize) -> Option<i64> {
        self.ids.binary_search(&id).ok().map(|i| self.labels[i])
    }

    /// Clusters as ascending id lists, ordered by minimum id.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut groups: std::collections::BTreeMap<i64, Vec<usize>> = Default::default();
        for (&id, &label) in self.ids.iter().zip(&self.labels) {
            if label != NOISE {
                groups.entry(label).or_default().push(id);
            }
        }
        groups.into_values().collect()
    }

    pub fn noise(&self) -> Vec<usize> {
        self.ids
            .iter()
            .zip(&self.labels)
            .filter(|&(_, &l)| l == NOISE)
            .map(|(&id, _)| id)
            .collect()
    }

    pub fn core_ids(&self) -> Vec<usize> {
        self.ids
            .iter()
            .zip(&self.core)
            .filter(|&(_, &c)| c)
            .map(|(&id, _)| id)
            .collect()
    }
}

/// `c` times the mean distance from each point to its `m`-th nearest other
/// point of the partition (the farthest one when fewer than `m` exist).
/// A single point yields 0.
pub fn estimate_epsilon(partition: &Dataset, m: usize, c: f64) -> Result<f64> {
    check_epsilon_args(m, c)?;
    Ok(estimate_epsilon_indexed(&SsTree::build(partition), m, c))
}

pub(crate) fn check_epsilon_args(m: usize, c: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("m must be >= 1"));
    }
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::invalid(format!("c must be finite and > 0, got {c}")));
    }
    Ok(())
}

/// [`estimate_epsilon`] over the points of an existing index.
pub(crate) fn estimate_epsilon_indexed(index: &SsTree, m: usize, c: f64) -> f64 {
    if index.len() < 2 {
        return 0.0;
    }
    let total: f64 = (0..index.len())
        .map(|slot| mth_neighbor_distance(index, slot, m))
        .sum();
    c * total / index.len() as f64
}

pub(crate) fn mth_neighbor_distance(index: &SsTree, slot: usize, m: usize) -> f64 {
    let q = crate::data::Point {
        id: index.slot_id(slot),
        coords: index.slot_coords(slot),
    };
    index
        .knn(q, m, false)
        .ok()
        .and_then(|nn| nn.last().map(|n| n.distance))
        .unwrap_or(0.0)
}

/// Density-reachability clustering of every point held by `index`.
pub fn density_cluster(index: &SsTree, cfg: &DensityConfig) -> LocalLabeling {
    let k = index.len();
    let by_id = index.slots_by_id();
    let mut uf = UnionFind::new(k);
    let mut core = vec![false; k];
    let mut neighbours = Vec::new();
    for &slot in &by_id {
        neighbours.clear();
        index.range_slots(index.slot_coords(slot), cfg.epsilon, &mut neighbours);
        if neighbours.len() >= cfg.m {
            core[slot] = true;
            for &other in &neighbours {
                uf.join(slot, other);
            }
        }
    }

    // Visiting slots by ascending id makes the first member seen per root
    // its minimum id.
    let mut root_label = vec![NOISE; k];
    let mut root_has_core = vec![false; k];
    for (slot, &is_core) in core.iter().enumerate() {
        if is_core {
            let r = uf.root(slot);
            root_has_core[r] = true;
        }
    }
    let mut out = LocalLabeling {
        ids: Vec::with_capacity(k),
        labels: Vec::with_capacity(k),
        core: Vec::with_capacity(k),
        stats: UnionFindStats::default(),
    };
    for &slot in &by_id {
        let id = index.slot_id(slot);
        let r = uf.root(slot);
        let label = if root_has_core[r] {
            if root_label[r] == NOISE {
                root_label[r] = id as i64;
            }
            root_label[r]
        } else {
            NOISE
        };
        out.ids.push(id);
        out.labels.push(label);
        out.core.push(core[slot]);
    }
    out.stats = uf.stats();
    out
}
