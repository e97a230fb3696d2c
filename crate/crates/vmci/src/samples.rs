//! Tabular sample storage: an n-by-d matrix of observations with named
//! columns, stored row-major. The universal data carrier for estimators,
//! CI tests, and generators.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// A table of real-valued observations with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    names: Vec<String>,
    data: Vec<f64>, // row-major, len == nrows * ncols
    nrows: usize,
    ncols: usize,
}

impl SampleMatrix {
    /// Build from column names and row-major data. `data.len()` must be a
    /// multiple of the column count and names must be distinct.
    pub fn new(names: Vec<String>, data: Vec<f64>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidParameter("need at least one column".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateName(n.clone()));
            }
        }
        let ncols = names.len();
        if !data.len().is_multiple_of(ncols) {
            return Err(Error::DimensionMismatch {
                expected: ncols,
                got: data.len() % ncols,
            });
        }
        let nrows = data.len() / ncols;
        Ok(Self {
            names,
            data,
            nrows,
            ncols,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.nrows
    }

    pub fn n_cols(&self) -> usize {
        self.ncols
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn value(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.ncols + c]
    }

    /// Index of a named column.
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::ColumnNotFound(name.to_string()))
    }

    /// Copy of one column.
    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.nrows).map(|r| self.value(r, c)).collect()
    }

    /// New matrix containing the given columns, in the given order.
    pub fn select(&self, cols: &[usize]) -> SampleMatrix {
        let names = cols.iter().map(|&c| self.names[c].clone()).collect();
        let mut data = Vec::with_capacity(self.nrows * cols.len());
        for r in 0..self.nrows {
            let row = self.row(r);
            for &c in cols {
                data.push(row[c]);
            }
        }
        SampleMatrix {
            names,
            data,
            nrows: self.nrows,
            ncols: cols.len(),
        }
    }

    /// New matrix containing the given rows of this one, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> SampleMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.ncols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        SampleMatrix {
            names: self.names.clone(),
            data,
            nrows: rows.len(),
            ncols: self.ncols,
        }
    }

    /// Error on the first NaN or infinity, if any.
    pub fn check_finite(&self) -> Result<()> {
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                if !self.value(r, c).is_finite() {
                    return Err(Error::NonFinite {
                        row: r,
                        column: self.names[c].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Write as CSV: header of column names, then one observation per row.
    /// Values are formatted with the shortest representation that parses
    /// back to the identical `f64`, so write/read round-trips are exact.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.names)?;
        let mut fields = Vec::with_capacity(self.ncols);
        for r in 0..self.nrows {
            fields.clear();
            fields.extend(self.row(r).iter().map(|v| format!("{v}")));
            w.write_record(&fields)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Read a CSV produced by [`SampleMatrix::write_csv`] (or any CSV with a
    /// header row and purely numeric fields).
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let names: Vec<String> = r.headers()?.iter().map(|s| s.trim().to_string()).collect();
        let ncols = names.len();
        let mut data = Vec::new();
        for (i, record) in r.records().enumerate() {
            let record = record?;
            if record.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: ncols,
                    got: record.len(),
                });
            }
            for field in record.iter() {
                let v: f64 = field.trim().parse().map_err(|_| Error::NonFinite {
                    row: i,
                    column: field.to_string(),
                })?;
                data.push(v);
            }
        }
        SampleMatrix::new(names, data)
    }

    pub fn write_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}
