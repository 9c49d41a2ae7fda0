//! Clustering output shared by every algorithm.

use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::Path;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::union_find::UnionFindStats;

/// Label carried by points that belong to no cluster.
pub const NOISE: i64 = -1;

/// Wall-clock time spent in each pipeline stage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub canopy: Duration,
    pub regions: Duration,
    pub map: Duration,
    pub reduce: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.canopy + self.regions + self.map + self.reduce
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    /// Number of regions processed in the map step (`z`).
    pub regions: usize,
    /// Largest region size (`w`).
    pub max_region_size: usize,
    /// Sum of region sizes.
    pub total_memberships: usize,
    pub timings: StageTimings,
    pub union_find: UnionFindStats,
}

/// Per-point labels plus core flags. A non-noise label is the minimum id of
/// the points that carry it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClusterResult {
    pub labels: Vec<i64>,
    pub core: Vec<bool>,
    pub stats: RunStats,
}

impl ClusterResult {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_count(&self) -> usize {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(i, &l)| l == i as i64)
            .count()
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == NOISE).count()
    }

    /// Clusters as sorted id lists, ordered by their minimum id.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut slot = vec![usize::MAX; self.labels.len()];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (i, &label) in self.labels.iter().enumerate() {
            if label == NOISE {
                continue;
            }
            let label = label as usize;
            if slot[label] == usize::MAX {
                slot[label] = out.len();
                out.push(Vec::new());
            }
            out[slot[label]].push(i);
        }
        out
    }

    pub fn noise(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l == NOISE)
            .map(|(i, _)| i)
            .collect()
    }

    /// Writes `point_index,cluster_label` rows under a header line.
    pub fn write_labels<W: Write>(&self, out: W) -> io::Result<()> {
        write_labels(out, &self.labels)
    }
}

pub fn write_labels<W: Write>(mut out: W, labels: &[i64]) -> io::Result<()> {
    out.write_all(b"point_index,cluster_label\n")?;
    for (i, label) in labels.iter().enumerate() {
        writeln!(out, "{i},{label}")?;
    }
    out.flush()
}

/// Reads a file written by [`write_labels`]. Rows must list indices
/// `0, 1, 2, ...` in order.
pub fn read_labels<R: Read>(input: R) -> Result<Vec<i64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(Error::Parse {
                row,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let parse = |field: &str| {
            field.parse::<i64>().map_err(|_| Error::Parse {
                row,
                message: format!("not an integer: {field:?}"),
            })
        };
        let index = parse(&record[0])?;
        if index != i as i64 {
            return Err(Error::Parse {
                row,
                message: format!("expected point_index {i}, found {index}"),
            });
        }
        labels.push(parse(&record[1])?);
    }
    Ok(labels)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<i64>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_labels(BufReader::new(file))
}

/// Rewrites arbitrary cluster ids to canonical minimum-member labels,
/// keeping [`NOISE`] as is.
pub fn canonicalize(labels: &[i64]) -> Vec<i64> {
    use std::collections::HashMap;
    let mut first: HashMap<i64, i64> = HashMap::new();
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            if l == NOISE {
                NOISE
            } else {
                *first.entry(l).or_insert(i as i64)
            }
        })
        .collect()
}
