//! Canopy pre-clustering, region construction, a parallel map of density
//! clustering over regions, and an order-independent reduce into one global
//! union-find.

use std::time::Instant;

use rayon::prelude::*;

use crate::canopy::{self, Canopy, CanopyConfig};
use crate::data::{euclidean, Dataset, Sphere};
use crate::density::{self, DensityConfig, LocalLabeling};
use crate::error::{Error, Result};
use crate::result::{ClusterResult, RunStats, StageTimings, NOISE};
use crate::ss_tree::SsTree;
use crate::union_find::{UnionFind, UnionFindStats};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Core threshold and ε-estimation neighbour rank.
    pub m: usize,
    /// Scale applied to every estimated ε.
    pub c: f64,
    /// Fixed canopy thresholds; estimated from the data when `None`.
    pub canopy: Option<CanopyConfig>,
    pub workers: usize,
    /// Defaults to `m` when `None`.
    pub max_regions_per_point: Option<usize>,
}

impl PipelineConfig {
    pub fn new(m: usize) -> Self {
        PipelineConfig {
            m,
            c: 1.0,
            canopy: None,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            max_regions_per_point: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_canopy(mut self, canopy: CanopyConfig) -> Self {
        self.canopy = Some(canopy);
        self
    }

    pub fn region_cap(&self) -> usize {
        self.max_regions_per_point.unwrap_or(self.m)
    }

    pub fn validate(&self) -> Result<()> {
        density::check_epsilon_args(self.m, self.c)?;
        if self.workers == 0 {
            return Err(Error::invalid("workers must be >= 1"));
        }
        if self.region_cap() == 0 {
            return Err(Error::invalid("max regions per point must be >= 1"));
        }
        if let Some(c) = &self.canopy {
            CanopyConfig::new(c.t1, c.t2)?;
        }
        Ok(())
    }
}

/// An inflated sphere around one canopy, processed independently in the map
/// step with its own ε.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub id: usize,
    pub sphere: Sphere,
    /// Ascending dataset ids inside `sphere` that survived the per-point cap.
    pub member_ids: Vec<usize>,
    pub epsilon: f64,
    pub m: usize,
}

/// Builds one region per canopy.
///
/// The sphere is the approximate enclosing sphere of the canopy members
/// inflated by the canopy's ε; it grows to reach the `m`-th point nearest its
/// center if it would otherwise hold fewer than `m` points. Each point is then
/// kept only in the `max_regions_per_point` regions whose centers are nearest
/// to it (ties by region id). A region that drops below `m` members through
/// the cap keeps what it has; it cannot produce a core point.
pub fn build_regions(
    data: &Dataset,
    canopies: &[Canopy],
    cfg: &PipelineConfig,
) -> Result<Vec<Region>> {
    cfg.validate()?;
    Ok(build_regions_indexed(
        data,
        &SsTree::build(data),
        canopies,
        cfg,
    ))
}

pub(crate) fn build_regions_indexed(
    data: &Dataset,
    index: &SsTree,
    canopies: &[Canopy],
    cfg: &PipelineConfig,
) -> Vec<Region> {
    let m = cfg.m;
    let mut regions: Vec<Region> = canopies
        .par_iter()
        .enumerate()
        .map(|(id, canopy)| {
            let local = SsTree::build_subset(data, &canopy.member_ids);
            let epsilon = density::estimate_epsilon_indexed(&local, m, cfg.c);
            let hull = Sphere::enclosing(canopy.member_ids.iter().map(|&i| data.coords(i)));
            let mut radius = hull.radius + epsilon;
            let mut members = index.range(&hull.center, radius).expect("valid query");
            if members.len() < m {
                let nearest = index.knn_coords(&hull.center, m).expect("m >= 1");
                if let Some(far) = nearest.last() {
                    radius = radius.max(far.distance);
                }
                members = index.range(&hull.center, radius).expect("valid query");
            }
            Region {
                id,
                sphere: Sphere {
                    center: hull.center,
                    radius,
                },
                member_ids: members,
                epsilon,
                m,
            }
        })
        .collect();

    enforce_region_cap(data, &mut regions, cfg.region_cap());
    regions
}

fn enforce_region_cap(data: &Dataset, regions: &mut [Region], cap: usize) {
    let mut counts = vec![0usize; data.len()];
    for r in regions.iter() {
        for &id in &r.member_ids {
            counts[id] += 1;
        }
    }
    if counts.iter().all(|&c| c <= cap) {
        return;
    }

    // (point, distance to center, region) for every over-subscribed point.
    let mut contested: Vec<(usize, f64, usize)> = Vec::new();
    for r in regions.iter() {
        for &id in &r.member_ids {
            if counts[id] > cap {
                contested.push((id, euclidean(data.coords(id), &r.sphere.center), r.id));
            }
        }
    }
    contested.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut dropped: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < contested.len() {
        let point = contested[i].0;
        let mut j = i;
        while j < contested.len() && contested[j].0 == point {
            if j - i >= cap {
                dropped.push((contested[j].2, point));
            }
            j += 1;
        }
        i = j;
    }
    dropped.sort_unstable();

    let mut cursor = 0;
    for r in regions.iter_mut() {
        let start = cursor;
        while cursor < dropped.len() && dropped[cursor].0 == r.id {
            cursor += 1;
        }
        let gone = &dropped[start..cursor];
        if !gone.is_empty() {
            // Both lists are ascending by point id.
            let mut g = 0;
            r.member_ids.retain(|&id| {
                if g < gone.len() && gone[g].1 == id {
                    g += 1;
                    false
                } else {
                    true
                }
            });
        }
    }
}

/// Density clustering of one region's members with the region's ε and m.
pub fn map_step(region: &Region, data: &Dataset) -> LocalLabeling {
    let index = SsTree::build_subset(data, &region.member_ids);
    density::density_cluster(
        &index,
        &DensityConfig {
            m: region.m,
            epsilon: region.epsilon,
        },
    )
}

/// Folds local labelings into a global partition. Local clusters are unioned
/// into one union-find over all points, so the result does not depend on the
/// order in which labelings arrive. A point is noise only if no labeling
/// places it in a cluster.
#[derive(Debug, Clone)]
pub struct Reducer {
    uf: UnionFind,
    covered: Vec<bool>,
    clustered: Vec<bool>,
    core: Vec<bool>,
    local_stats: UnionFindStats,
}

impl Reducer {
    pub fn new(n: usize) -> Self {
        Reducer {
            uf: UnionFind::new(n),
            covered: vec![false; n],
            clustered: vec![false; n],
            core: vec![false; n],
            local_stats: UnionFindStats::default(),
        }
    }

    pub fn absorb(&mut self, local: &LocalLabeling) -> Result<()> {
        let n = self.covered.len();
        for ((&id, &label), &core) in local.ids.iter().zip(&local.labels).zip(&local.core) {
            if id >= n {
                return Err(Error::invalid(format!("point {id} outside dataset of {n}")));
            }
            self.covered[id] = true;
            self.core[id] |= core;
            if label != NOISE {
                self.clustered[id] = true;
                self.uf.join(id, label as usize);
            }
        }
        self.local_stats.merge(local.stats);
        Ok(())
    }

    pub fn finish(mut self) -> Result<ClusterResult> {
        if let Some(id) = self.covered.iter().position(|&c| !c) {
            return Err(Error::Invariant(format!(
                "point {id} is covered by no region"
            )));
        }
        let n = self.covered.len();
        let mut root_label = vec![NOISE; n];
        let mut labels = Vec::with_capacity(n);
        for id in 0..n {
            if !self.clustered[id] {
                labels.push(NOISE);
                continue;
            }
            let r = self.uf.root(id);
            if root_label[r] == NOISE {
                root_label[r] = id as i64;
            }
            labels.push(root_label[r]);
        }
        let mut uf_stats = self.uf.stats();
        uf_stats.merge(self.local_stats);
        Ok(ClusterResult {
            labels,
            core: self.core,
            stats: RunStats {
                union_find: uf_stats,
                ..Default::default()
            },
        })
    }
}

pub fn reduce_merge(locals: &[LocalLabeling], n: usize) -> Result<ClusterResult> {
    let mut reducer = Reducer::new(n);
    for local in locals {
        reducer.absorb(local)?;
    }
    reducer.finish()
}

fn thresholds(data: &Dataset, index: &SsTree, cfg: &PipelineConfig) -> CanopyConfig {
    match cfg.canopy {
        Some(c) => c,
        None if data.len() >= 2 => canopy::estimate_thresholds_indexed(data, index, cfg.m),
        None => CanopyConfig { t1: 1.0, t2: 1.0 },
    }
}

/// Runs the whole pipeline.
pub fn cluster(data: &Dataset, cfg: &PipelineConfig) -> Result<ClusterResult> {
    cluster_with_regions(data, cfg).map(|(result, _)| result)
}

/// [`cluster`], also returning the regions that were processed.
pub fn cluster_with_regions(
    data: &Dataset,
    cfg: &PipelineConfig,
) -> Result<(ClusterResult, Vec<Region>)> {
    cfg.validate()?;
    if data.is_empty() {
        return Ok((ClusterResult::default(), Vec::new()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;

    let start = Instant::now();
    let index = SsTree::build(data);
    let canopies = canopy::canopy_cluster_indexed(data, &index, &thresholds(data, &index, cfg));
    let canopy_time = start.elapsed();

    let start = Instant::now();
    let regions = pool.install(|| build_regions_indexed(data, &index, &canopies, cfg));
    let regions_time = start.elapsed();

    let start = Instant::now();
    let locals: Vec<LocalLabeling> =
        pool.install(|| regions.par_iter().map(|r| map_step(r, data)).collect());
    let map_time = start.elapsed();

    let start = Instant::now();
    let mut result = reduce_merge(&locals, data.len())?;
    let reduce_time = start.elapsed();

    result.stats.regions = regions.len();
    result.stats.max_region_size = regions
        .iter()
        .map(|r| r.member_ids.len())
        .max()
        .unwrap_or(0);
    result.stats.total_memberships = regions.iter().map(|r| r.member_ids.len()).sum();
    result.stats.timings = StageTimings {
        canopy: canopy_time,
        regions: regions_time,
        map: map_time,
        reduce: reduce_time,
    };
    Ok((result, regions))
}

/// The regions [`cluster`] would process, for inspection.
pub fn plan_regions(data: &Dataset, cfg: &PipelineConfig) -> Result<Vec<Region>> {
    cfg.validate()?;
    if data.is_empty() {
        return Ok(Vec::new());
    }
    let index = SsTree::build(data);
    let canopies = canopy::canopy_cluster_indexed(data, &index, &thresholds(data, &index, cfg));
    Ok(build_regions_indexed(data, &index, &canopies, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::dbscan_reference;
    use crate::generate;

    fn two_far_blobs() -> Dataset {
        let mut rows = Vec::new();
        for i in 0..10 {
            let a = i as f64 * 0.6;
            rows.push([a.cos(), a.sin()]);
        }
        for i in 0..10 {
            let a = i as f64 * 0.6;
            rows.push([100.0 + a.cos(), a.sin()]);
        }
        Dataset::from_rows(&rows).unwrap()
    }

    #[test]
    fn one_canopy_gives_one_full_region() {
        let (data, _) = generate::blobs(&generate::BlobsParams {
            n: 200,
            seed: 1,
            ..Default::default()
        });
        let canopies = canopy::canopy_cluster(&data, &CanopyConfig::new(1e6, 1e6).unwrap());
        assert_eq!(canopies.len(), 1);
        let regions = build_regions(&data, &canopies, &PipelineConfig::new(3)).unwrap();
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].member_ids, (0..200).collect::<Vec<_>>());
    }

    #[test]
    fn far_blobs_get_disjoint_regions() {
        let data = two_far_blobs();
        let cfg = PipelineConfig::new(3);
        let thresholds = canopy::estimate_thresholds(&data, 3).unwrap();
        assert!(thresholds.t1 < 90.0);
        let regions = plan_regions(&data, &cfg).unwrap();
        let mut blob_of_region = Vec::new();
        for r in &regions {
            let left = r.member_ids.iter().all(|&i| i < 10);
            let right = r.member_ids.iter().all(|&i| i >= 10);
            assert!(left || right, "region mixes blobs: {:?}", r.member_ids);
            blob_of_region.push(left);
        }
        let mut seen = [vec![false; 20], vec![false; 20]];
        for (r, &left) in regions.iter().zip(&blob_of_region) {
            for &i in &r.member_ids {
                seen[usize::from(!left)][i] = true;
            }
        }
        assert!((0..10).all(|i| seen[0][i]));
        assert!((10..20).all(|i| seen[1][i]));
    }

    #[test]
    fn cap_limits_memberships() {
        let (data, _) = generate::blobs(&generate::BlobsParams {
            n: 1500,
            seed: 4,
            ..Default::default()
        });
        for m in [2, 3, 5] {
            let cfg = PipelineConfig::new(m);
            let regions = plan_regions(&data, &cfg).unwrap();
            let mut counts = vec![0usize; data.len()];
            for r in &regions {
                for &i in &r.member_ids {
                    counts[i] += 1;
                    assert!(r.sphere.contains(data.coords(i), 0.0));
                }
            }
            assert!(counts.iter().all(|&c| (1..=m).contains(&c)));
        }
    }

    #[test]
    fn identical_region_is_one_cluster() {
        let data = Dataset::from_rows(&[[2.0, 2.0]; 3]).unwrap();
        let region = Region {
            id: 0,
            sphere: Sphere {
                center: vec![2.0, 2.0],
                radius: 0.0,
            },
            member_ids: vec![0, 1, 2],
            epsilon: 0.0,
            m: 3,
        };
        let local = map_step(&region, &data);
        assert_eq!(local.clusters(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn map_step_equals_density_on_subset() {
        let (data, _) = generate::blobs(&generate::BlobsParams {
            n: 600,
            seed: 6,
            ..Default::default()
        });
        let regions = plan_regions(&data, &PipelineConfig::new(4)).unwrap();
        for r in regions.iter().take(20) {
            let local = map_step(r, &data);
            let sub = data.subset(&r.member_ids);
            let direct = density::density_cluster(
                &SsTree::build(&sub),
                &DensityConfig {
                    m: r.m,
                    epsilon: r.epsilon,
                },
            );
            let remap = |sets: Vec<Vec<usize>>| -> Vec<Vec<usize>> {
                sets.into_iter()
                    .map(|s| s.into_iter().map(|i| r.member_ids[i]).collect())
                    .collect()
            };
            assert_eq!(local.clusters(), remap(direct.clusters()));
            let oracle = dbscan_reference(&sub, r.epsilon, r.m).unwrap();
            assert_eq!(local.clusters(), remap(oracle.clusters()));
        }
    }

    #[test]
    fn reduce_single_region_is_identity() {
        let (data, _) = generate::blobs(&generate::BlobsParams {
            n: 300,
            seed: 2,
            ..Default::default()
        });
        let index = SsTree::build(&data);
        let local = density::density_cluster(&index, &DensityConfig { m: 4, epsilon: 0.5 });
        let global = reduce_merge(std::slice::from_ref(&local), data.len()).unwrap();
        assert_eq!(global.labels, local.labels);
        assert_eq!(global.core, local.core);
    }

    #[test]
    fn reduce_joins_through_shared_point() {
        let a = LocalLabeling {
            ids: vec![0, 1, 2],
            labels: vec![0, 0, 0],
            core: vec![true; 3],
            ..Default::default()
        };
        let b = LocalLabeling {
            ids: vec![2, 3, 4],
            labels: vec![2, 2, NOISE],
            core: vec![true, true, false],
            ..Default::default()
        };
        let r = reduce_merge(&[a, b], 5).unwrap();
        assert_eq!(r.labels, vec![0, 0, 0, 0, NOISE]);
    }

    #[test]
    fn reduce_non_noise_wins_and_coverage_is_checked() {
        let a = LocalLabeling {
            ids: vec![0, 1],
            labels: vec![NOISE, NOISE],
            core: vec![false; 2],
            ..Default::default()
        };
        let b = LocalLabeling {
            ids: vec![1, 2],
            labels: vec![1, 1],
            core: vec![true; 2],
            ..Default::default()
        };
        let r = reduce_merge(&[a.clone(), b], 3).unwrap();
        assert_eq!(r.labels, vec![NOISE, 1, 1]);
        assert!(matches!(reduce_merge(&[a], 3), Err(Error::Invariant(_))));
    }

    #[test]
    fn reduce_is_order_independent() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let (data, _) = generate::blobs(&generate::BlobsParams {
            n: 2000,
            clusters: 5,
            seed: 8,
            ..Default::default()
        });
        let regions = plan_regions(&data, &PipelineConfig::new(3)).unwrap();
        let mut locals: Vec<LocalLabeling> = regions.iter().map(|r| map_step(r, &data)).collect();
        let reference = reduce_merge(&locals, data.len()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            locals.shuffle(&mut rng);
            let shuffled = reduce_merge(&locals, data.len()).unwrap();
            assert_eq!(shuffled.labels, reference.labels);
            assert_eq!(shuffled.core, reference.core);
        }
    }

    #[test]
    fn empty_and_tiny_inputs() {
        let r = cluster(&Dataset::with_dim(2), &PipelineConfig::new(3)).unwrap();
        assert!(r.is_empty());
        let r = cluster(
            &Dataset::from_rows(&[[1.0, 1.0]]).unwrap(),
            &PipelineConfig::new(3),
        )
        .unwrap();
        assert_eq!(r.labels, vec![NOISE]);
        let r = cluster(
            &Dataset::from_rows(&[[1.0, 1.0]]).unwrap(),
            &PipelineConfig::new(1),
        )
        .unwrap();
        assert_eq!(r.labels, vec![0]);
    }

    #[test]
    fn config_validation() {
        assert!(PipelineConfig::new(0).validate().is_err());
        assert!(PipelineConfig::new(3).with_workers(0).validate().is_err());
        assert!(PipelineConfig::new(3).with_c(-1.0).validate().is_err());
        let mut cfg = PipelineConfig::new(3);
        cfg.max_regions_per_point = Some(0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn single_canopy_equals_global_density_run() {
        let (data, _) = generate::blobs(&generate::BlobsParams {
            n: 800,
            clusters: 4,
            seed: 12,
            ..Default::default()
        });
        let cfg = PipelineConfig::new(4).with_canopy(CanopyConfig::new(1e9, 1e9).unwrap());
        let piped = cluster(&data, &cfg).unwrap();
        let eps = density::estimate_epsilon(&data, 4, 1.0).unwrap();
        let direct =
            density::density_cluster(&SsTree::build(&data), &DensityConfig { m: 4, epsilon: eps });
        assert_eq!(piped.labels, direct.labels);
    }
}
