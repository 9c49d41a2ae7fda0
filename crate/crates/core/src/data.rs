//! Points, datasets, bounding spheres and the Euclidean metric.
//!
//! A [`Dataset`] stores its coordinates in one flat row-major buffer. Point
//! ids are row indices, so they are always the contiguous range `0..n` and
//! iteration is by ascending id.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// A borrowed view of one point of a [`Dataset`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<'a> {
    pub id: usize,
    pub coords: &'a [f64],
}

impl Point<'_> {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Fixed-dimension collection of finite points with ids `0..n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    dim: usize,
    coords: Vec<f64>,
}

impl Dataset {
    /// An empty dataset whose points will have `dim` coordinates.
    pub fn with_dim(dim: usize) -> Self {
        Dataset {
            dim,
            coords: Vec::new(),
        }
    }

    /// Builds a dataset from rows; every row must have the same length and
    /// only finite values.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Dataset::with_dim(dim);
        for row in rows {
            data.push(row.as_ref())?;
        }
        Ok(data)
    }

    /// Builds a dataset from a flat row-major buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 && !coords.is_empty() {
            return Err(Error::invalid("non-empty dataset needs dim >= 1"));
        }
        if dim > 0 && !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "buffer of {} values is not a multiple of dim {dim}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite coordinate in point {}",
                bad / dim
            )));
        }
        Ok(Dataset { dim, coords })
    }

    /// Appends a point and returns its id.
    pub fn push(&mut self, coords: &[f64]) -> Result<usize> {
        if self.is_empty() && self.dim == 0 {
            self.dim = coords.len();
        }
        if coords.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: coords.len(),
            });
        }
        if self.dim == 0 {
            return Err(Error::invalid("points need at least one coordinate"));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("coordinates must be finite"));
        }
        self.coords.extend_from_slice(coords);
        Ok(self.len() - 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coordinates of point `id`. Panics if `id` is out of range.
    #[inline]
    pub fn coords(&self, id: usize) -> &[f64] {
        &self.coords[id * self.dim..(id + 1) * self.dim]
    }

    pub fn point(&self, id: usize) -> Point<'_> {
        Point {
            id,
            coords: self.coords(id),
        }
    }

    pub fn get(&self, id: usize) -> Option<Point<'_>> {
        (id < self.len()).then(|| self.point(id))
    }

    /// Points in ascending id order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = Point<'_>> + '_ {
        (0..self.len()).map(move |id| self.point(id))
    }

    /// The flat row-major coordinate buffer.
    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// A new dataset holding the given points, renumbered `0..ids.len()` in
    /// the order given.
    pub fn subset(&self, ids: &[usize]) -> Dataset {
        let mut coords = Vec::with_capacity(ids.len() * self.dim);
        for &id in ids {
            coords.extend_from_slice(self.coords(id));
        }
        Dataset {
            dim: self.dim,
            coords,
        }
    }

    /// Writes one comma-separated row per point. Values use the shortest
    /// representation that parses back to the identical `f64`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for p in self.iter() {
            let mut first = true;
            for v in p.coords {
                if !first {
                    out.write_all(b",")?;
                }
                write!(out, "{v}")?;
                first = false;
            }
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(BufWriter::new(file))
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })
    }
}

/// Euclidean distance between two coordinate slices.
pub fn distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(euclidean(a, b))
}

/// Unchecked Euclidean distance; callers guarantee equal lengths.
#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        sum += d * d;
    }
    sum.sqrt()
}

/// Max-coordinate (L∞) distance.
#[inline]
pub(crate) fn chebyshev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// A ball given by center and radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Sphere {
    pub fn contains(&self, p: &[f64], slack: f64) -> bool {
        euclidean(&self.center, p) <= self.radius + slack
    }

    /// Approximate minimum enclosing sphere (Ritter's construction, two
    /// growth passes). The final radius is the largest computed distance from
    /// the center to any point, so containment is exact in floating point.
    ///
    /// `points` must be non-empty and of uniform dimension.
    pub fn enclosing<'a, I>(points: I) -> Sphere
    where
        I: Iterator<Item = &'a [f64]> + Clone,
    {
        let mut iter = points.clone();
        let first = iter.next().expect("enclosing sphere of no points");
        let farthest_from = |from: &[f64]| -> &'a [f64] {
            let mut best = first;
            let mut best_d = -1.0;
            for p in points.clone() {
                let d = euclidean(from, p);
                if d > best_d {
                    best_d = d;
                    best = p;
                }
            }
            best
        };
        let a = farthest_from(first);
        let b = farthest_from(a);
        let mut center: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        let mut radius = 0.5 * euclidean(a, b);

        for _ in 0..2 {
            for p in points.clone() {
                let d = euclidean(&center, p);
                if d > radius {
                    let grown = 0.5 * (radius + d);
                    let shift = (d - grown) / d;
                    for (c, x) in center.iter_mut().zip(p) {
                        *c += shift * (x - *c);
                    }
                    radius = grown;
                }
            }
        }

        let radius = points.map(|p| euclidean(&center, p)).fold(0.0, f64::max);
        Sphere { center, radius }
    }
}

/// Reads a CSV file of numeric rows; row `i` becomes the point with id `i`.
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(io_err)?;
    parse_csv(text.as_bytes(), has_header)
}

/// Parses CSV text into a [`Dataset`]. Errors name the 1-based file row.
pub fn parse_csv<R: Read>(input: R, has_header: bool) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut data = Dataset::default();
    let mut row_buf = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            row: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        row_buf.clear();
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                message: format!("field {} ({field:?}) is not a number", col + 1),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    row,
                    message: format!("field {} is not finite", col + 1),
                });
            }
            row_buf.push(value);
        }
        if row_buf.is_empty() {
            continue;
        }
        if !data.is_empty() && row_buf.len() != data.dim() {
            return Err(Error::Parse {
                row,
                message: format!("expected {} fields, found {}", data.dim(), row_buf.len()),
            });
        }
        data.push(&row_buf).map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
    }
    Ok(data)
}
