//! Reference clusterers. `dbscan_reference` and `knn_reference` are
//! brute-force oracles: they compute distances with their own loop and use
//! neither the spatial index nor the union-find.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, Point};
use crate::density::LocalLabeling;
use crate::error::{Error, Result};
use crate::result::{canonicalize, ClusterResult, NOISE};
use crate::ss_tree::Neighbor;

fn l2(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        acc += d * d;
    }
    acc.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        KMeansConfig {
            k,
            max_iters: 100,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub result: ClusterResult,
    pub centroids: Vec<Vec<f64>>,
    pub iterations: usize,
}

/// Lloyd's algorithm from `k` distinct input points chosen uniformly with a
/// seeded generator. Stops at an assignment fixpoint or after `max_iters`.
pub fn kmeans(data: &Dataset, cfg: &KMeansConfig) -> Result<ClusterResult> {
    kmeans_fit(data, cfg).map(|f| f.result)
}

pub fn kmeans_fit(data: &Dataset, cfg: &KMeansConfig) -> Result<KMeansFit> {
    let n = data.len();
    if cfg.k == 0 || cfg.k > n {
        return Err(Error::invalid(format!(
            "k must be in 1..={n}, got {}",
            cfg.k
        )));
    }
    if cfg.max_iters == 0 {
        return Err(Error::invalid("max_iters must be >= 1"));
    }
    let dim = data.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut centroids: Vec<Vec<f64>> = rand::seq::index::sample(&mut rng, n, cfg.k)
        .into_iter()
        .map(|i| data.coords(i).to_vec())
        .collect();

    let mut assignment = vec![usize::MAX; n];
    let mut iterations = 0;
    for _ in 0..cfg.max_iters {
        iterations += 1;
        let mut changed = false;
        for (i, p) in data.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = l2(p.coords, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; cfg.k];
        let mut counts = vec![0usize; cfg.k];
        for (p, &a) in data.iter().zip(&assignment) {
            counts[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(p.coords) {
                *s += x;
            }
        }
        for c in 0..cfg.k {
            // An emptied cluster keeps its previous centroid.
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }

    let raw: Vec<i64> = assignment.iter().map(|&a| a as i64).collect();
    Ok(KMeansFit {
        result: ClusterResult {
            labels: canonicalize(&raw),
            core: vec![false; n],
            ..Default::default()
        },
        centroids,
        iterations,
    })
}

/// Quadratic density clustering with the same merge rule as
/// [`crate::density::density_cluster`]: every core point links to all points
/// within `epsilon` (itself included in the count), and clusters are the
/// connected components of those links.
pub fn dbscan_reference(data: &Dataset, epsilon: f64, m: usize) -> Result<LocalLabeling> {
    if m == 0 {
        return Err(Error::invalid("m must be >= 1"));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::invalid("epsilon must be >= 0"));
    }
    let n = data.len();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| l2(data.coords(i), data.coords(j)) <= epsilon)
                .collect()
        })
        .collect();
    let core: Vec<bool> = neighbours.iter().map(|nb| nb.len() >= m).collect();

    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        if core[i] {
            for &j in &neighbours[i] {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }

    let mut labels = vec![NOISE; n];
    let mut queue = VecDeque::new();
    for start in 0..n {
        if labels[start] != NOISE || adjacency[start].is_empty() {
            continue;
        }
        // Ascending scan: `start` is the smallest id of its component.
        labels[start] = start as i64;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if labels[v] == NOISE {
                    labels[v] = start as i64;
                    queue.push_back(v);
                }
            }
        }
    }
    Ok(LocalLabeling {
        ids: (0..n).collect(),
        labels,
        core,
        ..Default::default()
    })
}

/// Linear-scan nearest neighbours, ties by ascending id.
pub fn knn_reference(
    data: &Dataset,
    q: Point<'_>,
    m: usize,
    include_self: bool,
) -> Result<Vec<Neighbor>> {
    if m == 0 {
        return Err(Error::invalid("knn needs m >= 1"));
    }
    if !data.is_empty() && q.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            found: q.dim(),
        });
    }
    let mut all: Vec<Neighbor> = data
        .iter()
        .filter(|p| include_self || p.id != q.id)
        .map(|p| Neighbor {
            id: p.id,
            distance: l2(q.coords, p.coords),
        })
        .collect();
    all.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.id.cmp(&b.id)));
    all.truncate(m);
    Ok(all)
}

/// Linear-scan closed-ball query, ascending ids.
pub fn range_reference(data: &Dataset, center: &[f64], radius: f64) -> Vec<usize> {
    data.iter()
        .filter(|p| l2(center, p.coords) <= radius)
        .map(|p| p.id)
        .collect()
}
