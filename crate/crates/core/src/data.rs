//! Observed and simulated datasets.
//!
//! A [`Dataset`] is an ordered sequence of `n` points of a common dimension
//! `d`, stored row-major, with optional strictly increasing timestamps. Count
//! data is stored as reals as well; count models check integrality when they
//! evaluate likelihoods.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    dim: usize,
    timestamps: Option<Vec<f64>>,
}

impl Dataset {
    /// Validates raw rows and optional timestamps.
    pub fn new(points: Vec<Vec<f64>>, timestamps: Option<Vec<f64>>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyData)?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut values = Vec::with_capacity(points.len() * dim);
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::RaggedDimensions {
                    index,
                    expected: dim,
                    found: p.len(),
                });
            }
            values.extend_from_slice(p);
        }
        Self::from_flat(values, dim, timestamps)
    }

    /// Builds a dataset from row-major values.
    pub fn from_flat(values: Vec<f64>, dim: usize, timestamps: Option<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if values.is_empty() {
            return Err(Error::EmptyData);
        }
        if !values.len().is_multiple_of(dim) {
            return Err(Error::RaggedDimensions {
                index: values.len() / dim,
                expected: dim,
                found: values.len() % dim,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index: i / dim });
        }
        let n = values.len() / dim;
        if let Some(ts) = &timestamps {
            if ts.len() != n {
                return Err(Error::TimestampLength {
                    expected: n,
                    found: ts.len(),
                });
            }
            if let Some(i) = ts.iter().position(|t| !t.is_finite()) {
                return Err(Error::NonFiniteValue { index: i });
            }
            if let Some(i) = ts.windows(2).position(|w| w[1] <= w[0]) {
                return Err(Error::NonIncreasingTimestamps { index: i + 1 });
            }
        }
        Ok(Self {
            values,
            dim,
            timestamps,
        })
    }

    /// Univariate dataset without timestamps.
    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        Self::from_flat(values, 1, None)
    }

    /// A dataset with the same shape and timestamps as `self` but new values.
    ///
    /// Used by simulators, which only ever produce finite values of the
    /// template's shape.
    pub fn like(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self {
            values,
            dim: self.dim,
            timestamps: self.timestamps.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The `j`-th coordinate of every point.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.points().map(|p| p[j]).collect()
    }

    pub fn timestamps(&self) -> Option<&[f64]> {
        self.timestamps.as_deref()
    }

    pub fn require_dim(&self, expected: usize) -> Result<()> {
        if self.dim != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.dim,
            });
        }
        Ok(())
    }

    /// Reads the CSV dataset format: a header row, an optional leading `t`
    /// column, then one column per coordinate.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let has_t = headers.get(0).is_some_and(|h| h.eq_ignore_ascii_case("t"));
        let dim = headers.len() - usize::from(has_t);
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut values = Vec::new();
        let mut times = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != headers.len() {
                return Err(Error::RaggedDimensions {
                    index: row,
                    expected: dim,
                    found: record.len().saturating_sub(usize::from(has_t)),
                });
            }
            for (col, field) in record.iter().enumerate() {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::Csv(format!("row {row}: cannot parse `{field}`")))?;
                if has_t && col == 0 {
                    times.push(v);
                } else {
                    values.push(v);
                }
            }
        }
        Self::from_flat(values, dim, has_t.then_some(times))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = Vec::with_capacity(self.dim + 1);
        if self.timestamps.is_some() {
            header.push("t".into());
        }
        header.extend((1..=self.dim).map(|j| format!("y{j}")));
        wtr.write_record(&header)?;
        for (i, p) in self.points().enumerate() {
            let mut row: Vec<String> = Vec::with_capacity(self.dim + 1);
            if let Some(ts) = &self.timestamps {
                row.push(format_f64(ts[i]));
            }
            row.extend(p.iter().map(|&v| format_f64(v)));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

// `Display` for f64 is the shortest string that parses back to the same bits.
fn format_f64(v: f64) -> String {
    format!("{v}")
}
