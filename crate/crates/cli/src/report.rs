use std::fmt;
use std::time::Duration;

use dapc_core::{ClusterResult, Dataset, StageTimings};

/// Summary of one run, printed as a single `key=value` line.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub algorithm: &'static str,
    pub params: Vec<(&'static str, String)>,
    pub n: usize,
    pub dim: usize,
    pub clusters: usize,
    pub noise: usize,
    pub stages: StageTimings,
    pub total: Duration,
    pub max_region_size: usize,
    pub regions: usize,
}

impl RunReport {
    pub fn new(algorithm: &'static str, data: &Dataset) -> Self {
        RunReport {
            algorithm,
            params: Vec::new(),
            n: data.len(),
            dim: data.dim(),
            clusters: 0,
            noise: 0,
            stages: StageTimings::default(),
            total: Duration::ZERO,
            max_region_size: 0,
            regions: 0,
        }
    }

    pub fn param(&mut self, key: &'static str, value: impl fmt::Display) {
        self.params.push((key, value.to_string()));
    }

    pub fn finish(&mut self, result: &ClusterResult, total: Duration) {
        self.clusters = result.cluster_count();
        self.noise = result.noise_count();
        self.stages = result.stats.timings;
        self.total = total;
        self.max_region_size = result.stats.max_region_size;
        self.regions = result.stats.regions;
    }
}

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "algorithm={}", self.algorithm)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        write!(
            f,
            " n={} dim={} clusters={} noise={} canopy_ms={} regions_ms={} map_ms={} reduce_ms={} total_ms={} max_region_size={} regions={}",
            self.n,
            self.dim,
            self.clusters,
            self.noise,
            ms(self.stages.canopy),
            ms(self.stages.regions),
            ms(self.stages.map),
            ms(self.stages.reduce),
            ms(self.total),
            self.max_region_size,
            self.regions,
        )
    }
}
