//! SS+tree: a bulk-loaded hierarchy of bounding spheres answering m-nearest
//! neighbour and closed-ball range queries.
//!
//! Nodes are split top-down. A node's point set is cut along its
//! highest-variance coordinate at the position minimising the summed squared
//! deviation of the two halves; if the two resulting spheres overlap by at
//! least the radius of the sphere being split, the cut falls back to the
//! median. Cuts repeat on the largest group until a node has [`FANOUT`]
//! children or every group fits in a leaf. Every node sphere is an
//! approximate minimum enclosing sphere of all points beneath it.
//!
//! The tree copies the coordinates it indexes and keeps the caller's point
//! ids, so it can be built over any subset of a [`Dataset`].

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::data::{euclidean, Dataset, Point, Sphere};
use crate::error::{Error, Result};

/// Maximum number of children of an internal node.
pub const FANOUT: usize = 8;
/// Maximum number of points in a leaf.
pub const LEAF_CAP: usize = 16;

/// Relative slack applied to query-to-center distances before pruning, so
/// rounding in the computed distances can never prune a qualifying point.
const PRUNE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub id: usize,
    pub distance: f64,
}

#[derive(Debug, Clone)]
enum NodeKind {
    /// Storage slots `start..end`.
    Leaf {
        start: usize,
        end: usize,
    },
    Internal {
        children: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
struct Node {
    sphere: Sphere,
    count: usize,
    kind: NodeKind,
}

#[derive(Debug, Clone)]
pub struct SsTree {
    dim: usize,
    /// Point ids in storage (leaf) order.
    ids: Vec<usize>,
    /// Coordinates in storage order.
    coords: Vec<f64>,
    nodes: Vec<Node>,
    root: Option<usize>,
}

/// Orders by distance, then by id.
#[derive(Debug, Clone, Copy)]
struct Ranked {
    distance: f64,
    id: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.id.cmp(&other.id))
    }
}

struct Source<'a> {
    dim: usize,
    ids: &'a [usize],
    data: &'a Dataset,
}

impl Source<'_> {
    #[inline]
    fn coords(&self, pos: usize) -> &[f64] {
        self.data.coords(self.ids[pos])
    }
}

impl SsTree {
    /// Indexes every point of `data` under its own id.
    pub fn build(data: &Dataset) -> SsTree {
        let ids: Vec<usize> = (0..data.len()).collect();
        Self::build_subset(data, &ids)
    }

    /// Indexes the listed points of `data`, keeping their dataset ids.
    pub fn build_subset(data: &Dataset, ids: &[usize]) -> SsTree {
        let dim = data.dim();
        let mut tree = SsTree {
            dim,
            ids: Vec::new(),
            coords: Vec::new(),
            nodes: Vec::new(),
            root: None,
        };
        if ids.is_empty() {
            return tree;
        }
        let src = Source { dim, ids, data };
        let mut perm: Vec<usize> = (0..ids.len()).collect();
        let root = tree.build_node(&src, &mut perm, 0);
        tree.root = Some(root);
        tree.ids = perm.iter().map(|&p| ids[p]).collect();
        tree.coords = Vec::with_capacity(ids.len() * dim);
        for &p in &perm {
            tree.coords.extend_from_slice(src.coords(p));
        }
        tree
    }

    fn build_node(&mut self, src: &Source<'_>, perm: &mut [usize], offset: usize) -> usize {
        let sphere = Sphere::enclosing(perm.iter().map(|&p| src.coords(p)));
        let kind = if perm.len() <= LEAF_CAP {
            NodeKind::Leaf {
                start: offset,
                end: offset + perm.len(),
            }
        } else {
            let groups = partition(src, perm, &sphere);
            let children = groups
                .into_iter()
                .map(|(s, e)| self.build_node(src, &mut perm[s..e], offset + s))
                .collect();
            NodeKind::Internal { children }
        };
        self.nodes.push(Node {
            sphere,
            count: perm.len(),
            kind,
        });
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Indexed ids in ascending order.
    pub fn ids_sorted(&self) -> Vec<usize> {
        let mut ids = self.ids.clone();
        ids.sort_unstable();
        ids
    }

    pub fn root(&self) -> Option<NodeRef<'_>> {
        self.root.map(|index| NodeRef { tree: self, index })
    }

    fn check_dim(&self, q: &[f64]) -> Result<()> {
        if !self.is_empty() && q.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: q.len(),
            });
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn slot_coords(&self, slot: usize) -> &[f64] {
        &self.coords[slot * self.dim..(slot + 1) * self.dim]
    }

    #[inline]
    pub(crate) fn slot_id(&self, slot: usize) -> usize {
        self.ids[slot]
    }

    /// Storage slots ordered by ascending point id.
    pub(crate) fn slots_by_id(&self) -> Vec<usize> {
        let mut slots: Vec<usize> = (0..self.len()).collect();
        slots.sort_unstable_by_key(|&s| self.ids[s]);
        slots
    }

    /// The `m` indexed points nearest to `query`, ascending by distance with
    /// ties broken by id. Unless `include_self` is set, the indexed point
    /// whose id equals `query.id` is skipped.
    pub fn knn(&self, query: Point<'_>, m: usize, include_self: bool) -> Result<Vec<Neighbor>> {
        if m == 0 {
            return Err(Error::invalid("knn needs m >= 1"));
        }
        self.check_dim(query.coords)?;
        let exclude = (!include_self).then_some(query.id);
        Ok(self
            .knn_slots(query.coords, m, exclude)
            .into_iter()
            .map(|r| Neighbor {
                id: r.id,
                distance: r.distance,
            })
            .collect())
    }

    /// Nearest neighbours of an arbitrary location; nothing is excluded.
    pub fn knn_coords(&self, query: &[f64], m: usize) -> Result<Vec<Neighbor>> {
        if m == 0 {
            return Err(Error::invalid("knn needs m >= 1"));
        }
        self.check_dim(query)?;
        Ok(self
            .knn_slots(query, m, None)
            .into_iter()
            .map(|r| Neighbor {
                id: r.id,
                distance: r.distance,
            })
            .collect())
    }

    fn lower_bound(&self, q: &[f64], node: &Node) -> f64 {
        let d = euclidean(q, &node.sphere.center) * (1.0 - PRUNE_SLACK);
        (d - node.sphere.radius).max(0.0)
    }

    fn knn_slots(&self, q: &[f64], m: usize, exclude: Option<usize>) -> Vec<Ranked> {
        let Some(root) = self.root else {
            return Vec::new();
        };
        let mut best: BinaryHeap<Ranked> = BinaryHeap::with_capacity(m + 1);
        let mut frontier = BinaryHeap::new();
        frontier.push(Reverse(Ranked {
            distance: self.lower_bound(q, &self.nodes[root]),
            id: root,
        }));
        while let Some(Reverse(entry)) = frontier.pop() {
            let full = best.len() == m;
            if full && entry.distance > best.peek().map_or(f64::INFINITY, |w| w.distance) {
                break;
            }
            match &self.nodes[entry.id].kind {
                NodeKind::Leaf { start, end } => {
                    for slot in *start..*end {
                        let id = self.ids[slot];
                        if Some(id) == exclude {
                            continue;
                        }
                        let cand = Ranked {
                            distance: euclidean(q, self.slot_coords(slot)),
                            id,
                        };
                        if best.len() < m {
                            best.push(cand);
                        } else if best.peek().is_some_and(|w| cand < *w) {
                            best.pop();
                            best.push(cand);
                        }
                    }
                }
                NodeKind::Internal { children } => {
                    let worst = if best.len() == m {
                        best.peek().map_or(f64::INFINITY, |w| w.distance)
                    } else {
                        f64::INFINITY
                    };
                    for &child in children {
                        let lb = self.lower_bound(q, &self.nodes[child]);
                        if lb <= worst {
                            frontier.push(Reverse(Ranked {
                                distance: lb,
                                id: child,
                            }));
                        }
                    }
                }
            }
        }
        best.into_sorted_vec()
    }

    /// Ids of all indexed points within `radius` of `center` (closed ball),
    /// ascending.
    pub fn range(&self, center: &[f64], radius: f64) -> Result<Vec<usize>> {
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::invalid(format!(
                "range radius must be >= 0, got {radius}"
            )));
        }
        self.check_dim(center)?;
        let mut out = Vec::new();
        self.range_slots(center, radius, &mut out);
        let mut ids: Vec<usize> = out.into_iter().map(|s| self.ids[s]).collect();
        ids.sort_unstable();
        Ok(ids)
    }

    /// Storage slots within `radius` of `center`, in traversal order.
    pub(crate) fn range_slots(&self, center: &[f64], radius: f64, out: &mut Vec<usize>) {
        let Some(root) = self.root else {
            return;
        };
        let mut stack = vec![root];
        while let Some(index) = stack.pop() {
            let node = &self.nodes[index];
            let d = euclidean(center, &node.sphere.center) * (1.0 - PRUNE_SLACK);
            if d > radius + node.sphere.radius {
                continue;
            }
            match &node.kind {
                NodeKind::Leaf { start, end } => {
                    for slot in *start..*end {
                        if euclidean(center, self.slot_coords(slot)) <= radius {
                            out.push(slot);
                        }
                    }
                }
                NodeKind::Internal { children } => stack.extend(children.iter().rev()),
            }
        }
    }
}

/// Read-only view of a tree node, for structural inspection.
#[derive(Clone, Copy)]
pub struct NodeRef<'a> {
    tree: &'a SsTree,
    index: usize,
}

impl<'a> NodeRef<'a> {
    fn node(&self) -> &'a Node {
        &self.tree.nodes[self.index]
    }

    pub fn sphere(&self) -> &'a Sphere {
        &self.node().sphere
    }

    /// Number of points beneath this node.
    pub fn count(&self) -> usize {
        self.node().count
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.node().kind, NodeKind::Leaf { .. })
    }

    /// Child nodes; empty for a leaf.
    pub fn children(&self) -> Vec<NodeRef<'a>> {
        match &self.node().kind {
            NodeKind::Leaf { .. } => Vec::new(),
            NodeKind::Internal { children } => children
                .iter()
                .map(|&index| NodeRef {
                    tree: self.tree,
                    index,
                })
                .collect(),
        }
    }

    /// Points stored directly in this node; empty for an internal node.
    pub fn points(&self) -> Vec<(usize, &'a [f64])> {
        match self.node().kind {
            NodeKind::Leaf { start, end } => (start..end)
                .map(|s| (self.tree.ids[s], self.tree.slot_coords(s)))
                .collect(),
            NodeKind::Internal { .. } => Vec::new(),
        }
    }
}

/// Cuts `perm` into at most [`FANOUT`] contiguous groups.
fn partition(src: &Source<'_>, perm: &mut [usize], sphere: &Sphere) -> Vec<(usize, usize)> {
    let mut groups = vec![(0, perm.len())];
    let mut spheres = vec![sphere.clone()];
    while groups.len() < FANOUT {
        let (idx, &(s, e)) = groups
            .iter()
            .enumerate()
            .max_by(|a, b| {
                (a.1 .1 - a.1 .0)
                    .cmp(&(b.1 .1 - b.1 .0))
                    .then(b.0.cmp(&a.0))
            })
            .expect("non-empty groups");
        if e - s <= LEAF_CAP {
            break;
        }
        let cut = split(src, &mut perm[s..e], &spheres[idx]);
        let left = Sphere::enclosing(perm[s..s + cut].iter().map(|&p| src.coords(p)));
        let right = Sphere::enclosing(perm[s + cut..e].iter().map(|&p| src.coords(p)));
        groups[idx] = (s, s + cut);
        spheres[idx] = left;
        groups.insert(idx + 1, (s + cut, e));
        spheres.insert(idx + 1, right);
    }
    groups
}

/// Sorts `perm` along its highest-variance axis and returns the cut index.
fn split(src: &Source<'_>, perm: &mut [usize], sphere: &Sphere) -> usize {
    let n = perm.len();
    let axis = highest_variance_axis(src, perm);
    perm.sort_unstable_by(|&a, &b| {
        src.coords(a)[axis]
            .total_cmp(&src.coords(b)[axis])
            .then(src.ids[a].cmp(&src.ids[b]))
    });

    let mean = perm.iter().map(|&p| src.coords(p)[axis]).sum::<f64>() / n as f64;
    let mut prefix = Vec::with_capacity(n + 1);
    let mut prefix_sq = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    prefix_sq.push(0.0);
    for &p in perm.iter() {
        let v = src.coords(p)[axis] - mean;
        prefix.push(prefix.last().unwrap() + v);
        prefix_sq.push(prefix_sq.last().unwrap() + v * v);
    }
    let sse = |a: usize, b: usize| {
        let k = (b - a) as f64;
        let s = prefix[b] - prefix[a];
        (prefix_sq[b] - prefix_sq[a]) - s * s / k
    };

    let min_fill = (3 * n).div_ceil(10).max(1);
    let mut best_cut = n / 2;
    let mut best_cost = f64::INFINITY;
    for cut in min_fill..=(n - min_fill) {
        let cost = sse(0, cut) + sse(cut, n);
        if cost < best_cost {
            best_cost = cost;
            best_cut = cut;
        }
    }

    let left = Sphere::enclosing(perm[..best_cut].iter().map(|&p| src.coords(p)));
    let right = Sphere::enclosing(perm[best_cut..].iter().map(|&p| src.coords(p)));
    let overlap = left.radius + right.radius - euclidean(&left.center, &right.center);
    if overlap >= sphere.radius && sphere.radius > 0.0 {
        n / 2
    } else {
        best_cut
    }
}

fn highest_variance_axis(src: &Source<'_>, perm: &[usize]) -> usize {
    let n = perm.len() as f64;
    let mut best_axis = 0;
    let mut best_var = -1.0;
    for axis in 0..src.dim {
        let mean = perm.iter().map(|&p| src.coords(p)[axis]).sum::<f64>() / n;
        let var = perm
            .iter()
            .map(|&p| {
                let d = src.coords(p)[axis] - mean;
                d * d
            })
            .sum::<f64>();
        if var > best_var {
            best_var = var;
            best_axis = axis;
        }
    }
    best_axis
}
