//! Column schema and the line-oriented codebook format.
//!
//! A codebook declares one column per line:
//!
//! ```text
//! # comment
//! city   | categorical | C0,C1,C2
//! gender | categorical | F,M | missing=U
//! age    | continuous  | 18 | 90 | 12
//! ```
//!
//! Column order in the codebook is the canonical column order everywhere
//! downstream. Bounds and levels come from the codebook alone, never from
//! data, so schema construction touches nothing sensitive.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ColumnKind {
    Categorical {
        levels: Vec<String>,
        /// Index into `levels` of the code that represents missingness.
        /// Missing values are an ordinary level for every computation.
        missing_code: Option<u32>,
    },
    Continuous {
        min: f64,
        max: f64,
        bin_count: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

impl ColumnSpec {
    pub fn is_categorical(&self) -> bool {
        matches!(self.kind, ColumnKind::Categorical { .. })
    }

    /// Number of distinct codes after binning: level count, or bin count.
    pub fn cardinality(&self) -> u32 {
        match &self.kind {
            ColumnKind::Categorical { levels, .. } => levels.len() as u32,
            ColumnKind::Continuous { bin_count, .. } => *bin_count,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Schema {
    columns: Vec<ColumnSpec>,
    #[serde(skip)]
    by_name: HashMap<String, usize>,
}

impl PartialEq for Schema {
    fn eq(&self, other: &Self) -> bool {
        self.columns == other.columns
    }
}

impl Schema {
    pub fn new(columns: Vec<ColumnSpec>) -> Result<Self> {
        let mut by_name = HashMap::new();
        for (i, col) in columns.iter().enumerate() {
            if by_name.insert(col.name.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate column \"{}\"", col.name)));
            }
            match &col.kind {
                ColumnKind::Categorical { levels, missing_code } => {
                    if levels.is_empty() {
                        return Err(Error::invalid(format!(
                            "column \"{}\": empty level list",
                            col.name
                        )));
                    }
                    let mut seen = std::collections::HashSet::new();
                    for l in levels {
                        if !seen.insert(l) {
                            return Err(Error::invalid(format!(
                                "column \"{}\": duplicate level \"{l}\"",
                                col.name
                            )));
                        }
                    }
                    if let Some(m) = missing_code {
                        if *m as usize >= levels.len() {
                            return Err(Error::invalid(format!(
                                "column \"{}\": missing code outside level list",
                                col.name
                            )));
                        }
                    }
                }
                ColumnKind::Continuous { min, max, bin_count } => {
                    if !(min.is_finite() && max.is_finite() && min < max) {
                        return Err(Error::invalid(format!(
                            "column \"{}\": degenerate range [{min}, {max}]",
                            col.name
                        )));
                    }
                    if *bin_count == 0 {
                        return Err(Error::invalid(format!(
                            "column \"{}\": bin_count must be positive",
                            col.name
                        )));
                    }
                }
            }
        }
        Ok(Self { columns, by_name })
    }

    pub fn from_codebook(text: &str) -> Result<Arc<Schema>> {
        let mut columns = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            columns.push(parse_codebook_line(line, line_no)?);
        }
        if columns.is_empty() {
            return Err(Error::Codebook {
                line: 0,
                msg: "codebook declares no columns".into(),
            });
        }
        // Re-check global invariants with line-oriented error mapping.
        match Schema::new(columns) {
            Ok(s) => Ok(Arc::new(s)),
            Err(Error::InvalidArgument(msg)) => Err(Error::Codebook { line: 0, msg }),
            Err(e) => Err(e),
        }
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn col(&self, i: usize) -> &ColumnSpec {
        &self.columns[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn cardinality(&self, i: usize) -> u32 {
        self.columns[i].cardinality()
    }

    /// Level index for a categorical code.
    pub fn level_index(&self, col: usize, code: &str) -> Option<u32> {
        match &self.columns[col].kind {
            ColumnKind::Categorical { levels, .. } => {
                levels.iter().position(|l| l == code).map(|p| p as u32)
            }
            ColumnKind::Continuous { .. } => None,
        }
    }

    /// Rebuilds the name index after deserialization.
    pub fn reindex(mut self) -> Self {
        self.by_name = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| (c.name.clone(), i))
            .collect();
        self
    }
}

fn parse_codebook_line(line: &str, line_no: usize) -> Result<ColumnSpec> {
    let err = |msg: String| Error::Codebook { line: line_no, msg };
    let fields: Vec<&str> = line.split('|').map(str::trim).collect();
    if fields.len() < 3 {
        return Err(err("expected `name | kind | ...`".into()));
    }
    let name = fields[0];
    if name.is_empty() {
        return Err(err("empty column name".into()));
    }
    match fields[1] {
        "categorical" => {
            if fields.len() > 4 {
                return Err(err(format!("column \"{name}\": too many fields")));
            }
            let levels: Vec<String> = fields[2]
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            if levels.is_empty() {
                return Err(err(format!("column \"{name}\": empty level list")));
            }
            let missing_code = match fields.get(3) {
                None => None,
                Some(f) => {
                    let code = f.strip_prefix("missing=").ok_or_else(|| {
                        err(format!("column \"{name}\": expected `missing=<code>`"))
                    })?;
                    let pos = levels.iter().position(|l| l == code.trim()).ok_or_else(|| {
                        err(format!(
                            "column \"{name}\": missing code \"{code}\" is not a declared level"
                        ))
                    })?;
                    Some(pos as u32)
                }
            };
            Ok(ColumnSpec {
                name: name.to_string(),
                kind: ColumnKind::Categorical { levels, missing_code },
            })
        }
        "continuous" => {
            if fields.len() != 5 {
                return Err(err(format!(
                    "column \"{name}\": expected `name | continuous | min | max | bin_count`"
                )));
            }
            let min: f64 = fields[2]
                .parse()
                .map_err(|_| err(format!("column \"{name}\": bad min \"{}\"", fields[2])))?;
            let max: f64 = fields[3]
                .parse()
                .map_err(|_| err(format!("column \"{name}\": bad max \"{}\"", fields[3])))?;
            let bin_count: u32 = fields[4]
                .parse()
                .map_err(|_| err(format!("column \"{name}\": bad bin count \"{}\"", fields[4])))?;
            if !(min.is_finite() && max.is_finite()) || min >= max {
                return Err(err(format!("column \"{name}\": degenerate range")));
            }
            if bin_count == 0 {
                return Err(err(format!("column \"{name}\": bin_count must be positive")));
            }
            Ok(ColumnSpec {
                name: name.to_string(),
                kind: ColumnKind::Continuous { min, max, bin_count },
            })
        }
        other => Err(err(format!("column \"{name}\": unknown kind \"{other}\""))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_codebook() {
        let s = Schema::from_codebook("c | categorical | A,B\n").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.cardinality(0), 2);
        assert_eq!(s.level_index(0, "B"), Some(1));
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let text = "# header\n\nx | continuous | 0 | 10 | 5\n# trailing\n";
        let s = Schema::from_codebook(text).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.cardinality(0), 5);
    }

    #[test]
    fn degenerate_range_rejected() {
        let e = Schema::from_codebook("x | continuous | 10 | 10 | 5").unwrap_err();
        assert!(e.to_string().contains("degenerate range"), "{e}");
        assert!(e.to_string().contains("line 1"), "{e}");
    }

    #[test]
    fn duplicate_column_rejected() {
        let text = "age | continuous | 0 | 9 | 3\nage | categorical | A,B";
        let e = Schema::from_codebook(text).unwrap_err();
        assert!(e.to_string().contains("duplicate column"), "{e}");
    }

    #[test]
    fn duplicate_level_rejected() {
        let e = Schema::from_codebook("c | categorical | A,B,A").unwrap_err();
        assert!(e.to_string().contains("duplicate level"), "{e}");
    }

    #[test]
    fn empty_levels_rejected() {
        let e = Schema::from_codebook("c | categorical | ,").unwrap_err();
        assert!(e.to_string().contains("empty level list"), "{e}");
    }

    #[test]
    fn missing_code_must_be_declared() {
        let s = Schema::from_codebook("g | categorical | F,M,U | missing=U").unwrap();
        match &s.col(0).kind {
            ColumnKind::Categorical { missing_code, .. } => assert_eq!(*missing_code, Some(2)),
            _ => unreachable!(),
        }
        let e = Schema::from_codebook("g | categorical | F,M | missing=X").unwrap_err();
        assert!(e.to_string().contains("not a declared level"), "{e}");
    }
}
