//! Density-adaptive parallel clustering.
//!
//! The main entry point is [`pipeline::cluster`]: canopy pre-clustering
//! partitions the data, each partition becomes an inflated region with its own
//! ε, regions are density-clustered in parallel over SS+tree range queries,
//! and the per-region union-find sets are merged into one labeling.
//! [`naive::naive_cluster`] is the m-nearest-neighbour variant without noise
//! handling, and [`baselines`] holds k-means plus brute-force oracles.

pub mod baselines;
pub mod canopy;
pub mod data;
pub mod density;
pub mod error;
pub mod generate;
pub mod metrics;
pub mod naive;
pub mod pipeline;
pub mod result;
pub mod ss_tree;
pub mod union_find;

pub use canopy::{Canopy, CanopyConfig};
pub use data::{distance, load_csv, parse_csv, Dataset, Point, Sphere};
pub use density::{DensityConfig, LocalLabeling};
pub use error::{Error, Result};
pub use naive::NaiveConfig;
pub use pipeline::{PipelineConfig, Region};
pub use result::{
    load_labels, read_labels, write_labels, ClusterResult, RunStats, StageTimings, NOISE,
};
pub use ss_tree::{Neighbor, SsTree};
pub use union_find::{UnionFind, UnionFindStats};
