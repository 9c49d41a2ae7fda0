//! Disjoint-set forest with union by rank and path compression.

use crate::error::{Error, Result};

/// Operation counters. `hops` counts every parent-pointer traversal made while
/// locating roots, so `hops / operations()` is the measured amortized cost.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UnionFindStats {
    pub finds: u64,
    pub unions: u64,
    pub hops: u64,
}

impl UnionFindStats {
    pub fn operations(&self) -> u64 {
        self.finds + self.unions
    }

    pub fn hops_per_operation(&self) -> f64 {
        match self.operations() {
            0 => 0.0,
            ops => self.hops as f64 / ops as f64,
        }
    }

    pub fn merge(&mut self, other: UnionFindStats) {
        self.finds += other.finds;
        self.unions += other.unions;
        self.hops += other.hops;
    }
}

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    sets: usize,
    stats: UnionFindStats,
}

impl UnionFind {
    /// `n` singleton sets.
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
            sets: n,
            stats: UnionFindStats::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Number of disjoint sets.
    pub fn set_count(&self) -> usize {
        self.sets
    }

    pub fn stats(&self) -> UnionFindStats {
        self.stats
    }

    /// Raw parent array, for structural inspection.
    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn ranks(&self) -> &[u8] {
        &self.rank
    }

    fn check(&self, x: usize) -> Result<()> {
        if x < self.parent.len() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "element {x} out of range for {} elements",
                self.parent.len()
            )))
        }
    }

    /// Root of `x`'s set; compresses the path so every visited node points
    /// at the root afterwards.
    pub fn find(&mut self, x: usize) -> Result<usize> {
        self.check(x)?;
        self.stats.finds += 1;
        Ok(self.root(x))
    }

    /// Merges the sets of `x` and `y`, returning the root of the result.
    pub fn union(&mut self, x: usize, y: usize) -> Result<usize> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.join(x, y))
    }

    pub fn same_set(&mut self, x: usize, y: usize) -> Result<bool> {
        Ok(self.find(x)? == self.find(y)?)
    }

    #[inline]
    pub(crate) fn root(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
            self.stats.hops += 1;
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    #[inline]
    pub(crate) fn join(&mut self, x: usize, y: usize) -> usize {
        self.stats.unions += 1;
        let rx = self.root(x);
        let ry = self.root(y);
        if rx == ry {
            return rx;
        }
        self.sets -= 1;
        match self.rank[rx].cmp(&self.rank[ry]) {
            std::cmp::Ordering::Less => {
                self.parent[rx] = ry;
                ry
            }
            std::cmp::Ordering::Greater => {
                self.parent[ry] = rx;
                rx
            }
            std::cmp::Ordering::Equal => {
                self.parent[ry] = rx;
                self.rank[rx] += 1;
                rx
            }
        }
    }

    /// Label of every element: the minimum element of its set.
    pub fn min_labels(&mut self) -> Vec<usize> {
        let n = self.len();
        let mut min_of_root = vec![usize::MAX; n];
        let mut roots = Vec::with_capacity(n);
        for x in 0..n {
            let r = self.root(x);
            roots.push(r);
            if x < min_of_root[r] {
                min_of_root[r] = x;
            }
        }
        roots.into_iter().map(|r| min_of_root[r]).collect()
    }

    /// The partition, each set sorted ascending, sets ordered by their
    /// minimum element.
    pub fn components(&mut self) -> Vec<Vec<usize>> {
        let labels = self.min_labels();
        let mut slot = vec![usize::MAX; labels.len()];
        let mut sets: Vec<Vec<usize>> = Vec::with_capacity(self.sets);
        for (x, &label) in labels.iter().enumerate() {
            if label == x {
                slot[x] = sets.len();
                sets.push(vec![x]);
            } else {
                sets[slot[label]].push(x);
            }
        }
        sets
    }
}
