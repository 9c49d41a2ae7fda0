//! Seeded synthetic datasets with ground-truth labels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data::{euclidean, Dataset};
use crate::result::NOISE;

/// Isotropic Gaussian blobs. Centers sit on a circle with neighbouring
/// centers `separation` apart (first two coordinates; the rest are zero).
/// Blob `i` has standard deviation `spread * density_ratio^(i / (k - 1))`,
/// so the first blob is the tightest and the last is `density_ratio` times
/// wider.
#[derive(Debug, Clone, PartialEq)]
pub struct BlobsParams {
    pub n: usize,
    pub clusters: usize,
    pub dim: usize,
    pub spread: f64,
    pub separation: f64,
    pub density_ratio: f64,
    pub seed: u64,
}

impl Default for BlobsParams {
    fn default() -> Self {
        BlobsParams {
            n: 1000,
            clusters: 3,
            dim: 2,
            spread: 1.0,
            separation: 20.0,
            density_ratio: 1.0,
            seed: 0,
        }
    }
}

/// Concentric 2-D rings. Ring `i` has radius `(i + 1) * gap`; points sit
/// uniformly within `width / 2` of it, and ring sizes grow with radius so
/// every ring has the same linear density.
#[derive(Debug, Clone, PartialEq)]
pub struct RingsParams {
    pub n: usize,
    pub rings: usize,
    pub gap: f64,
    pub width: f64,
    pub seed: u64,
}

impl Default for RingsParams {
    fn default() -> Self {
        RingsParams {
            n: 1000,
            rings: 2,
            gap: 5.0,
            width: 0.5,
            seed: 0,
        }
    }
}

/// Two dense disks joined by a short chain of `chain` sparse points.
///
/// Disks are jittered sunflower spirals of `blob_size` points each. The chain
/// lies on the perpendicular bisector of the closest cross-disk pair `(a, b)`,
/// so every chain point is (nearly) equidistant from both disks; it is nudged
/// a hair towards the first disk so nearest-neighbour ties resolve
/// consistently. Chain points are ground-truth noise.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeParams {
    pub blob_size: usize,
    pub chain: usize,
    pub blob_radius: f64,
    /// Distance between the two disk rims.
    pub gap: f64,
    /// Positional jitter as a fraction of the disk point spacing.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for BridgeParams {
    fn default() -> Self {
        BridgeParams {
            blob_size: 50,
            chain: 1,
            blob_radius: 2.0,
            gap: 8.0,
            jitter: 0.25,
            seed: 0,
        }
    }
}

fn split_counts(n: usize, parts: usize) -> Vec<usize> {
    (0..parts)
        .map(|i| n / parts + usize::from(i < n % parts))
        .collect()
}

pub fn blob_centers(params: &BlobsParams) -> Vec<Vec<f64>> {
    let k = params.clusters.max(1);
    let ring = if k == 1 {
        0.0
    } else {
        params.separation / (2.0 * (std::f64::consts::PI / k as f64).sin())
    };
    (0..k)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            let mut c = vec![0.0; params.dim.max(1)];
            c[0] = ring * angle.cos();
            if c.len() > 1 {
                c[1] = ring * angle.sin();
            }
            c
        })
        .collect()
}

pub fn blobs(params: &BlobsParams) -> (Dataset, Vec<i64>) {
    let dim = params.dim.max(1);
    let k = params.clusters.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let centers = blob_centers(params);
    let mut coords = Vec::with_capacity(params.n * dim);
    let mut truth = Vec::with_capacity(params.n);
    for (i, count) in split_counts(params.n, k).into_iter().enumerate() {
        let t = if k == 1 {
            0.0
        } else {
            i as f64 / (k - 1) as f64
        };
        let sd = params.spread * params.density_ratio.powf(t);
        let normal = Normal::new(0.0, sd).expect("finite spread");
        for _ in 0..count {
            for c in &centers[i] {
                coords.push(c + normal.sample(&mut rng));
            }
            truth.push(i as i64);
        }
    }
    (
        Dataset::from_flat(dim, coords).expect("finite coordinates"),
        truth,
    )
}

pub fn rings(params: &RingsParams) -> (Dataset, Vec<i64>) {
    let k = params.rings.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let weight_total: usize = (1..=k).sum();
    let mut counts: Vec<usize> = (1..=k).map(|w| params.n * w / weight_total).collect();
    let assigned: usize = counts.iter().sum();
    counts[k - 1] += params.n - assigned;

    let mut rows = Vec::with_capacity(params.n);
    let mut truth = Vec::with_capacity(params.n);
    for (i, count) in counts.into_iter().enumerate() {
        let radius = (i + 1) as f64 * params.gap;
        for _ in 0..count {
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let r = radius + params.width * (rng.random::<f64>() - 0.5);
            rows.push([r * angle.cos(), r * angle.sin()]);
            truth.push(i as i64);
        }
    }
    (
        Dataset::from_rows(&rows).expect("finite coordinates"),
        truth,
    )
}

fn sunflower_disk(
    rng: &mut ChaCha8Rng,
    center: [f64; 2],
    radius: f64,
    count: usize,
    jitter: f64,
) -> Vec<[f64; 2]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let spacing = radius * (std::f64::consts::PI / count.max(1) as f64).sqrt();
    (0..count)
        .map(|k| {
            let r = radius * ((k as f64 + 0.5) / count as f64).sqrt();
            let theta = k as f64 * golden;
            let jx = jitter * spacing * (rng.random::<f64>() - 0.5);
            let jy = jitter * spacing * (rng.random::<f64>() - 0.5);
            [
                center[0] + r * theta.cos() + jx,
                center[1] + r * theta.sin() + jy,
            ]
        })
        .collect()
}

pub fn bridge(params: &BridgeParams) -> (Dataset, Vec<i64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let offset = params.blob_radius + 0.5 * params.gap;
    let a_pts = sunflower_disk(
        &mut rng,
        [-offset, 0.0],
        params.blob_radius,
        params.blob_size,
        params.jitter,
    );
    let b_pts = sunflower_disk(
        &mut rng,
        [offset, 0.0],
        params.blob_radius,
        params.blob_size,
        params.jitter,
    );

    let mut rows: Vec<[f64; 2]> = a_pts.iter().chain(&b_pts).copied().collect();
    let mut truth: Vec<i64> = std::iter::repeat_n(0, a_pts.len())
        .chain(std::iter::repeat_n(1, b_pts.len()))
        .collect();

    if params.chain > 0 && !a_pts.is_empty() && !b_pts.is_empty() {
        let (a, b) = a_pts
            .iter()
            .flat_map(|a| b_pts.iter().map(move |b| (a, b)))
            .min_by(|x, y| euclidean(x.0, x.1).total_cmp(&euclidean(y.0, y.1)))
            .expect("non-empty disks");
        let half = 0.5 * euclidean(a, b);
        let u = [(b[0] - a[0]) / (2.0 * half), (b[1] - a[1]) / (2.0 * half)];
        let v = [-u[1], u[0]];
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let step = (0.1 * half).min(0.5 * half / params.chain as f64);
        let nudge = 1e-6 * half;
        let centre = 0.5 * (params.chain as f64 - 1.0);
        for k in 0..params.chain {
            let along = (k as f64 - centre) * step;
            rows.push([
                mid[0] - nudge * u[0] + along * v[0],
                mid[1] - nudge * u[1] + along * v[1],
            ]);
            truth.push(NOISE);
        }
    }
    (
        Dataset::from_rows(&rows).expect("finite coordinates"),
        truth,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blobs_are_deterministic() {
        let p = BlobsParams {
            n: 500,
            seed: 7,
            ..Default::default()
        };
        assert_eq!(blobs(&p), blobs(&p));
        let other = blobs(&BlobsParams {
            seed: 8,
            ..p.clone()
        });
        assert_ne!(blobs(&p).0, other.0);
    }

    #[test]
    fn single_blob_has_one_label() {
        let (data, truth) = blobs(&BlobsParams {
            n: 100,
            clusters: 1,
            ..Default::default()
        });
        assert_eq!(data.len(), 100);
        assert!(truth.iter().all(|&l| l == 0));
    }

    #[test]
    fn blob_sizes_split_evenly() {
        let (_, truth) = blobs(&BlobsParams {
            n: 10,
            clusters: 3,
            ..Default::default()
        });
        assert_eq!(truth, vec![0, 0, 0, 0, 1, 1, 1, 2, 2, 2]);
    }

    #[test]
    fn ring_points_stay_on_their_ring() {
        let p = RingsParams {
            n: 500,
            ..Default::default()
        };
        let (data, truth) = rings(&p);
        assert_eq!(data.len(), 500);
        for (pt, &label) in data.iter().zip(&truth) {
            let r = (pt.coords[0].powi(2) + pt.coords[1].powi(2)).sqrt();
            let expected = (label + 1) as f64 * p.gap;
            assert!((r - expected).abs() <= p.width / 2.0 + 1e-12);
        }
    }

    #[test]
    fn bridge_chain_is_equidistant_noise() {
        let p = BridgeParams::default();
        let (data, truth) = bridge(&p);
        assert_eq!(data.len(), 2 * p.blob_size + 1);
        assert_eq!(truth[2 * p.blob_size], NOISE);
        let z = data.coords(2 * p.blob_size);
        let nearest = |range: std::ops::Range<usize>| {
            range
                .map(|i| euclidean(z, data.coords(i)))
                .fold(f64::INFINITY, f64::min)
        };
        let da = nearest(0..p.blob_size);
        let db = nearest(p.blob_size..2 * p.blob_size);
        assert!(da < db);
        assert!((da - db).abs() < 1e-4 * da);
    }

    #[test]
    fn bridge_chain_length() {
        let (data, truth) = bridge(&BridgeParams {
            chain: 3,
            blob_size: 10,
            ..Default::default()
        });
        assert_eq!(data.len(), 23);
        assert_eq!(truth.iter().filter(|&&l| l == NOISE).count(), 3);
    }
}
