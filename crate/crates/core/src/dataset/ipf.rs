//! Loader for the idiopathic pulmonary fibrosis (IPF) table.
//!
//! The table has an id column, a first block of GAP-determining columns that
//! fully fix the label, a second block of clinical columns used as features,
//! and the GAP stage label (1, 2 or 3). A sidecar TOML document maps header
//! text onto these roles, so any export of the spreadsheet can be read:
//!
//! ```toml
//! id = "ID"
//! label = "GAP stage"
//! block1 = ["FVC%", "DLCO%", "Age", "GAP Sex", "GAP FVC", "GAP DLCO", "GAP Age"]
//! block2 = ["Sex", "Oxygen saturation %", "Heart rate"]  # ...
//! ignore = ["Date of birth", "GAP point"]
//!
//! # canonical feature name = header text in this file
//! [aliases]
//! "Oxygen saturation %" = "SpO2 (%)"
//! ```
//!
//! Only block-2 columns reach the feature matrix.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::csvio::Table;
use super::{ClassLabel, Dataset};
use crate::error::{Error, Result};

pub const GAP_STAGES: [&str; 3] = ["1", "2", "3"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IpfSchema {
    pub id: String,
    pub label: String,
    pub block1: Vec<String>,
    pub block2: Vec<String>,
    /// Columns present in the file but never read (dates of birth, helper columns).
    #[serde(default)]
    pub ignore: Vec<String>,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    /// Canonical feature name → header text, for exports with renamed columns.
    #[serde(default)]
    pub aliases: BTreeMap<String, String>,
}

fn default_delimiter() -> char {
    ','
}

impl IpfSchema {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let schema: IpfSchema = toml::from_str(text).map_err(|e| Error::Schema {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        schema.validate(origin)?;
        Ok(schema)
    }

    fn validate(&self, origin: &Path) -> Result<()> {
        let fail = |message: String| Error::Schema {
            path: origin.to_path_buf(),
            message,
        };
        if self.block2.is_empty() {
            return Err(fail("block2 must name at least one column".into()));
        }
        if let Some(c) = self.block2.iter().find(|c| self.block1.contains(c)) {
            return Err(fail(format!("column '{c}' is in both blocks")));
        }
        if self.block1.contains(&self.label) || self.block2.contains(&self.label) {
            return Err(fail("label column cannot be a feature".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(c) = self.block2.iter().find(|c| !seen.insert(*c)) {
            return Err(fail(format!("column '{c}' listed twice in block2")));
        }
        Ok(())
    }

    /// Feature name used in the dataset for header column `header`.
    pub fn canonical_name<'a>(&'a self, header: &'a str) -> &'a str {
        self.aliases
            .iter()
            .find(|(_, h)| h.as_str() == header)
            .map(|(canon, _)| canon.as_str())
            .unwrap_or(header)
    }

    /// Block-2 feature names after alias resolution.
    pub fn feature_names(&self) -> Vec<String> {
        self.block2
            .iter()
            .map(|h| self.canonical_name(h).to_owned())
            .collect()
    }
}

/// A loaded IPF table. `dataset` carries the block-2 features only.
#[derive(Clone, Debug)]
pub struct IpfData {
    pub ids: Vec<String>,
    pub block1_names: Vec<String>,
    pub block1: Vec<Vec<f64>>,
    pub dataset: Dataset,
}

pub fn load_ipf(path: impl AsRef<Path>, schema: &IpfSchema) -> Result<IpfData> {
    let path = path.as_ref();
    let delimiter = super::CsvOptions::default()
        .with_delimiter(schema.delimiter)
        .delimiter_byte()?;
    let table = Table::read(path, delimiter)?;
    let id_col = table.column(&schema.id)?;
    let label_col = table.column(&schema.label)?;
    let b1 = schema
        .block1
        .iter()
        .map(|c| table.column(c))
        .collect::<Result<Vec<_>>>()?;
    let b2 = schema
        .block2
        .iter()
        .map(|c| table.column(c))
        .collect::<Result<Vec<_>>>()?;
    if table.records.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let n = table.records.len();
    let mut ids = Vec::with_capacity(n);
    let mut block1 = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for r in 0..n {
        ids.push(table.text(r, id_col)?.to_owned());
        block1.push(b1.iter().map(|&c| table.number(r, c)).collect::<Result<Vec<_>>>()?);
        rows.push(b2.iter().map(|&c| table.number(r, c)).collect::<Result<Vec<_>>>()?);
        labels.push(gap_stage(&table, r, label_col)?);
    }
    Ok(IpfData {
        ids,
        block1_names: schema.block1.clone(),
        block1,
        dataset: Dataset::new(schema.feature_names(), rows, labels)?,
    })
}

fn gap_stage(table: &Table, row: usize, col: usize) -> Result<ClassLabel> {
    let v = table.number(row, col)?;
    GAP_STAGES
        .iter()
        .zip(1..)
        .find(|&(_, k)| v == f64::from(k))
        .map(|(s, _)| ClassLabel::from(*s))
        .ok_or_else(|| Error::Schema {
            path: PathBuf::from(&table.path),
            message: format!(
                "row {}, column '{}': GAP stage must be 1, 2 or 3, got {v}",
                row + 1,
                table.header[col]
            ),
        })
}
