//! Dataset storage, CSV ingestion, and equal-width discretization.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::schema::{ColumnKind, Schema};

/// Column-major storage; categorical cells hold level indices.
#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    Cat(Vec<u32>),
    Cont(Vec<f64>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Cat(v) => v.len(),
            Column::Cont(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug)]
pub struct Dataset {
    schema: Arc<Schema>,
    cols: Vec<Column>,
    n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadPolicy {
    Strict,
    Clamp,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LoadReport {
    pub clamped: usize,
}

impl Dataset {
    /// Validates every cell against the schema.
    pub fn new(schema: Arc<Schema>, cols: Vec<Column>) -> Result<Self> {
        if cols.len() != schema.len() {
            return Err(Error::invalid(format!(
                "{} columns for a {}-column schema",
                cols.len(),
                schema.len()
            )));
        }
        let n = cols.first().map(Column::len).unwrap_or(0);
        for (i, col) in cols.iter().enumerate() {
            let spec = schema.col(i);
            if col.len() != n {
                return Err(Error::invalid(format!(
                    "column \"{}\" has {} rows, expected {n}",
                    spec.name,
                    col.len()
                )));
            }
            match (&spec.kind, col) {
                (ColumnKind::Categorical { levels, .. }, Column::Cat(vals)) => {
                    for (row, &v) in vals.iter().enumerate() {
                        if v as usize >= levels.len() {
                            return Err(Error::Data {
                                row,
                                column: spec.name.clone(),
                                msg: format!("level index {v} out of range"),
                            });
                        }
                    }
                }
                (ColumnKind::Continuous { min, max, .. }, Column::Cont(vals)) => {
                    for (row, &v) in vals.iter().enumerate() {
                        if !v.is_finite() || v < *min || v > *max {
                            return Err(Error::Data {
                                row,
                                column: spec.name.clone(),
                                msg: format!("value {v} outside [{min}, {max}]"),
                            });
                        }
                    }
                }
                _ => {
                    return Err(Error::invalid(format!(
                        "column \"{}\" storage does not match its declared kind",
                        spec.name
                    )));
                }
            }
        }
        Ok(Self { schema, cols, n })
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, i: usize) -> &Column {
        &self.cols[i]
    }

    pub fn cat(&self, i: usize) -> Option<&[u32]> {
        match &self.cols[i] {
            Column::Cat(v) => Some(v),
            _ => None,
        }
    }

    pub fn cont(&self, i: usize) -> Option<&[f64]> {
        match &self.cols[i] {
            Column::Cont(v) => Some(v),
            _ => None,
        }
    }

    /// Row-order concatenation of two datasets over the same schema.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if **other.schema() != **self.schema() {
            return Err(Error::invalid("datasets have different schemas"));
        }
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| match (a, b) {
                (Column::Cat(x), Column::Cat(y)) => {
                    let mut v = x.clone();
                    v.extend_from_slice(y);
                    Column::Cat(v)
                }
                (Column::Cont(x), Column::Cont(y)) => {
                    let mut v = x.clone();
                    v.extend_from_slice(y);
                    Column::Cont(v)
                }
                _ => unreachable!("schema equality implies matching storage"),
            })
            .collect();
        Ok(Dataset {
            schema: self.schema.clone(),
            cols,
            n: self.n + other.n,
        })
    }

    /// Dataset containing the rows at `idx` (duplicates allowed).
    pub fn take_rows(&self, idx: &[usize]) -> Dataset {
        let cols = self
            .cols
            .iter()
            .map(|c| match c {
                Column::Cat(v) => Column::Cat(idx.iter().map(|&i| v[i]).collect()),
                Column::Cont(v) => Column::Cont(idx.iter().map(|&i| v[i]).collect()),
            })
            .collect();
        Dataset {
            schema: self.schema.clone(),
            cols,
            n: idx.len(),
        }
    }

    pub fn load_csv<R: Read>(
        schema: Arc<Schema>,
        reader: R,
        policy: LoadPolicy,
    ) -> Result<(Dataset, LoadReport)> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers().map_err(|_| Error::invalid("missing header row"))?.clone();
        if headers.is_empty() {
            return Err(Error::invalid("missing header row"));
        }
        // Map CSV field position -> schema column, order-insensitive by name.
        let mut field_to_col = Vec::with_capacity(headers.len());
        for h in headers.iter() {
            let idx = schema
                .index_of(h.trim())
                .ok_or_else(|| Error::invalid(format!("header \"{h}\" is not a schema column")))?;
            field_to_col.push(idx);
        }
        let mut seen = vec![false; schema.len()];
        for &c in &field_to_col {
            if seen[c] {
                return Err(Error::invalid(format!(
                    "header repeats column \"{}\"",
                    schema.col(c).name
                )));
            }
            seen[c] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!(
                "header lacks column \"{}\"",
                schema.col(missing).name
            )));
        }

        let mut cols: Vec<Column> = schema
            .columns()
            .iter()
            .map(|c| match c.kind {
                ColumnKind::Categorical { .. } => Column::Cat(Vec::new()),
                ColumnKind::Continuous { .. } => Column::Cont(Vec::new()),
            })
            .collect();
        let mut report = LoadReport::default();

        for (row_idx, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != field_to_col.len() {
                return Err(Error::Data {
                    row: row_idx,
                    column: String::new(),
                    msg: format!("{} fields, expected {}", record.len(), field_to_col.len()),
                });
            }
            for (field, &col_idx) in record.iter().zip(&field_to_col) {
                let spec = schema.col(col_idx);
                match (&spec.kind, &mut cols[col_idx]) {
                    (ColumnKind::Categorical { .. }, Column::Cat(out)) => {
                        let code = field.trim();
                        match schema.level_index(col_idx, code) {
                            Some(v) => out.push(v),
                            None => {
                                return Err(Error::Data {
                                    row: row_idx,
                                    column: spec.name.clone(),
                                    msg: format!("unknown code \"{code}\""),
                                })
                            }
                        }
                    }
                    (ColumnKind::Continuous { min, max, .. }, Column::Cont(out)) => {
                        let v: f64 = field.trim().parse().map_err(|_| Error::Data {
                            row: row_idx,
                            column: spec.name.clone(),
                            msg: format!("not a number: \"{field}\""),
                        })?;
                        if !v.is_finite() {
                            return Err(Error::Data {
                                row: row_idx,
                                column: spec.name.clone(),
                                msg: format!("non-finite value \"{field}\""),
                            });
                        }
                        if v < *min || v > *max {
                            match policy {
                                LoadPolicy::Strict => {
                                    return Err(Error::Data {
                                        row: row_idx,
                                        column: spec.name.clone(),
                                        msg: format!("value {v} outside [{min}, {max}]"),
                                    })
                                }
                                LoadPolicy::Clamp => {
                                    report.clamped += 1;
                                    out.push(v.clamp(*min, *max));
                                }
                            }
                        } else {
                            out.push(v);
                        }
                    }
                    _ => unreachable!(),
                }
            }
        }
        let ds = Dataset::new(schema, cols)?;
        Ok((ds, report))
    }

    /// Canonical CSV serialization: schema column order, shortest-round-trip
    /// float formatting. Byte-stable for identical datasets.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.schema.columns().iter().map(|c| c.name.as_str()))?;
        let mut record = Vec::with_capacity(self.q());
        for row in 0..self.n {
            record.clear();
            for (i, col) in self.cols.iter().enumerate() {
                match col {
                    Column::Cat(v) => match &self.schema.col(i).kind {
                        ColumnKind::Categorical { levels, .. } => {
                            record.push(levels[v[row] as usize].clone())
                        }
                        _ => unreachable!(),
                    },
                    Column::Cont(v) => record.push(format!("{}", v[row])),
                }
            }
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::invalid(e.to_string()))
    }
}

/// Dataset view with continuous values replaced by equal-width bin indices.
#[derive(Clone, Debug)]
pub struct BinnedView {
    schema: Arc<Schema>,
    cols: Vec<Vec<u32>>,
    n: usize,
}

impl BinnedView {
    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, i: usize) -> &[u32] {
        &self.cols[i]
    }

    pub fn cardinality(&self, i: usize) -> u32 {
        self.schema.cardinality(i)
    }
}

/// Bin index for a continuous value; `v = max` closes into the last bin.
pub fn bin_index(min: f64, max: f64, bin_count: u32, v: f64) -> u32 {
    let b = ((v - min) / (max - min) * bin_count as f64).floor();
    (b as i64).clamp(0, bin_count as i64 - 1) as u32
}

/// Midpoint of a bin, the canonical representative used for re-binning checks.
pub fn bin_midpoint(min: f64, max: f64, bin_count: u32, bin: u32) -> f64 {
    let w = (max - min) / bin_count as f64;
    min + w * (bin as f64 + 0.5)
}

pub fn discretize(data: &Dataset) -> BinnedView {
    let cols = data
        .schema()
        .columns()
        .iter()
        .enumerate()
        .map(|(i, spec)| match (&spec.kind, data.column(i)) {
            (ColumnKind::Categorical { .. }, Column::Cat(v)) => v.clone(),
            (ColumnKind::Continuous { min, max, bin_count }, Column::Cont(v)) => {
                v.iter().map(|&x| bin_index(*min, *max, *bin_count, x)).collect()
            }
            _ => unreachable!("dataset validated against schema"),
        })
        .collect();
    BinnedView {
        schema: data.schema().clone(),
        cols,
        n: data.n(),
    }
}
