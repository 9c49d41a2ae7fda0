//! Naive m-nearest-neighbour clustering: every point's set is merged with the
//! sets of its `m` nearest other points. There is no noise; a chain of sparse
//! points between two dense groups joins them once `m` exceeds the chain
//! length (the single-link effect).

use std::time::Instant;

use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::result::{ClusterResult, RunStats, StageTimings};
use crate::ss_tree::SsTree;
use crate::union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NaiveConfig {
    /// Smoothing parameter: neighbours merged per point.
    pub m: usize,
}

impl NaiveConfig {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("m must be >= 1"));
        }
        Ok(NaiveConfig { m })
    }
}

pub fn naive_cluster(data: &Dataset, cfg: &NaiveConfig) -> Result<ClusterResult> {
    if cfg.m == 0 {
        return Err(Error::invalid("m must be >= 1"));
    }
    let n = data.len();
    if n == 0 {
        return Ok(ClusterResult::default());
    }

    let start = Instant::now();
    let tree = SsTree::build(data);
    // Queries run in parallel; the edge list is ordered by point id, so the
    // union sequence is fixed regardless of scheduling.
    let edges: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|id| {
            tree.knn(data.point(id), cfg.m, false)
                .map(|nn| nn.into_iter().map(|x| x.id).collect())
        })
        .collect::<Result<_>>()?;
    let map = start.elapsed();

    let start = Instant::now();
    let mut uf = UnionFind::new(n);
    for (p, neighbours) in edges.iter().enumerate() {
        for &q in neighbours {
            uf.join(p, q);
        }
    }
    let labels = uf.min_labels().into_iter().map(|l| l as i64).collect();
    let reduce = start.elapsed();

    Ok(ClusterResult {
        labels,
        core: vec![false; n],
        stats: RunStats {
            regions: 1,
            max_region_size: n,
            total_memberships: n,
            timings: StageTimings {
                map,
                reduce,
                ..Default::default()
            },
            union_find: uf.stats(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn brute_naive(data: &Dataset, m: usize) -> Vec<Vec<usize>> {
        let n = data.len();
        let mut label: Vec<usize> = (0..n).collect();
        let mut edges = Vec::new();
        for p in 0..n {
            let mut others: Vec<(f64, usize)> = (0..n)
                .filter(|&q| q != p)
                .map(|q| {
                    let d: f64 = data
                        .coords(p)
                        .iter()
                        .zip(data.coords(q))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    (d.sqrt(), q)
                })
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(_, q) in others.iter().take(m) {
                edges.push((p, q));
            }
        }
        loop {
            let mut changed = false;
            for &(a, b) in &edges {
                let lo = label[a].min(label[b]);
                if label[a] != lo || label[b] != lo {
                    label[a] = lo;
                    label[b] = lo;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (i, l) in label.into_iter().enumerate() {
            groups.entry(l).or_default().push(i);
        }
        groups.into_values().collect()
    }

    #[test]
    fn two_pairs_with_m1() {
        let data =
            Dataset::from_rows(&[[0.0, 0.0], [0.0, 1.0], [10.0, 10.0], [10.0, 11.0]]).unwrap();
        let r = naive_cluster(&data, &NaiveConfig::new(1).unwrap()).unwrap();
        assert_eq!(r.clusters(), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(r.noise_count(), 0);
    }

    #[test]
    fn single_point_and_empty() {
        let data = Dataset::from_rows(&[[1.0, 1.0]]).unwrap();
        let r = naive_cluster(&data, &NaiveConfig::new(4).unwrap()).unwrap();
        assert_eq!(r.labels, vec![0]);
        let r = naive_cluster(&Dataset::with_dim(2), &NaiveConfig::new(1).unwrap()).unwrap();
        assert!(r.is_empty());
        assert!(NaiveConfig::new(0).is_err());
    }

    #[test]
    fn m1_clusters_have_at_least_two_points() {
        let (data, _) = generate::blobs(&generate::BlobsParams {
            n: 300,
            clusters: 4,
            seed: 1,
            ..Default::default()
        });
        let r = naive_cluster(&data, &NaiveConfig::new(1).unwrap()).unwrap();
        assert!(r.clusters().iter().all(|c| c.len() >= 2));
    }

    #[test]
    fn more_neighbours_never_adds_clusters() {
        let (data, _) = generate::blobs(&generate::BlobsParams {
            n: 400,
            clusters: 3,
            seed: 2,
            ..Default::default()
        });
        let counts: Vec<usize> = (1..=5)
            .map(|m| {
                naive_cluster(&data, &NaiveConfig::new(m).unwrap())
                    .unwrap()
                    .cluster_count()
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
        assert!(counts[0] >= counts[2]);
    }

    #[test]
    fn matches_brute_force() {
        for seed in 0..8 {
            let (data, _) = generate::blobs(&generate::BlobsParams {
                n: 40 + 30 * seed as usize,
                clusters: 3,
                seed,
                ..Default::default()
            });
            for m in [1, 2, 3] {
                let r = naive_cluster(&data, &NaiveConfig::new(m).unwrap()).unwrap();
                assert_eq!(r.clusters(), brute_naive(&data, m), "seed {seed} m {m}");
            }
        }
    }

    #[test]
    fn bridge_chain_needs_j_plus_one_neighbours() {
        let (data, truth) = generate::bridge(&generate::BridgeParams {
            blob_size: 10,
            chain: 2,
            seed: 0,
            ..Default::default()
        });
        let blob_a: Vec<usize> = (0..10).collect();
        let blob_b: Vec<usize> = (10..20).collect();
        assert!(truth[20..].iter().all(|&l| l == crate::NOISE));

        let m2 = naive_cluster(&data, &NaiveConfig::new(2).unwrap()).unwrap();
        assert_ne!(m2.labels[blob_a[0]], m2.labels[blob_b[0]]);
        let m3 = naive_cluster(&data, &NaiveConfig::new(3).unwrap()).unwrap();
        assert_eq!(m3.cluster_count(), 1);
    }
}
