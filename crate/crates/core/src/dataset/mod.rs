//! Labeled datasets: the in-memory type, delimited-text I/O, seeded splitting,
//! synthetic generators, and the IPF column schema.

mod csvio;
pub mod ipf;
mod split;
pub mod synthetic;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::encoding::RescaleWeights;
use crate::error::{Error, Result};

pub use csvio::{load_csv, load_patterns, write_csv, CsvOptions, Patterns};
pub use split::{split, split_indices, SplitSpec};

/// A class identifier, kept as the text it was read from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassLabel(String);

impl ClassLabel {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for ClassLabel {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl From<String> for ClassLabel {
    fn from(s: String) -> Self {
        Self(s)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An ordered collection of labeled patterns sharing one feature layout.
///
/// `label_set` lists the distinct labels in order of first appearance; each
/// pattern stores the index of its label in that list.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    label_set: Vec<ClassLabel>,
    rows: Vec<Vec<f64>>,
    targets: Vec<usize>,
}

impl Dataset {
    pub fn new(
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Vec<ClassLabel>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if rows.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} patterns but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let dim = feature_names.len();
        if dim == 0 {
            return Err(Error::EmptyFeatureVector);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "pattern {i} has {} features, expected {dim}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "pattern {i}, feature '{}' is not finite",
                    feature_names[j]
                )));
            }
        }
        let mut label_set: Vec<ClassLabel> = Vec::new();
        let targets = labels
            .into_iter()
            .map(|l| match label_set.iter().position(|k| *k == l) {
                Some(i) => i,
                None => {
                    label_set.push(l);
                    label_set.len() - 1
                }
            })
            .collect();
        Ok(Self {
            feature_names,
            label_set,
            rows,
            targets,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == name)
    }

    pub fn label_set(&self) -> &[ClassLabel] {
        &self.label_set
    }

    pub fn num_classes(&self) -> usize {
        self.label_set.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Per-pattern index into [`Dataset::label_set`].
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn label(&self, i: usize) -> &ClassLabel {
        &self.label_set[self.targets[i]]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], &ClassLabel)> + '_ {
        self.rows
            .iter()
            .zip(&self.targets)
            .map(|(r, &t)| (r.as_slice(), &self.label_set[t]))
    }

    /// Pattern indices grouped by class, in `label_set` order.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.label_set.len()];
        for (i, &t) in self.targets.iter().enumerate() {
            groups[t].push(i);
        }
        groups
    }

    /// The patterns at `indices`, in that order; labels are re-indexed by first
    /// appearance within the subset.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let rows = indices.iter().map(|&i| self.rows[i].clone()).collect();
        let labels = indices.iter().map(|&i| self.label(i).clone()).collect();
        Dataset::new(self.feature_names.clone(), rows, labels)
    }

    /// Every pattern multiplied componentwise by `weights`.
    pub fn rescaled(&self, weights: &RescaleWeights) -> Result<Dataset> {
        let rows = self
            .rows
            .iter()
            .map(|r| weights.apply(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            feature_names: self.feature_names.clone(),
            label_set: self.label_set.clone(),
            rows,
            targets: self.targets.clone(),
        })
    }

    /// Renames labels through `f`; pattern order and label order are kept.
    pub fn map_labels(&self, f: impl Fn(&ClassLabel) -> ClassLabel) -> Result<Dataset> {
        let labels = (0..self.len()).map(|i| f(self.label(i))).collect();
        Dataset::new(self.feature_names.clone(), self.rows.clone(), labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        Dataset::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 2.0], vec![6.0, 2.0]],
            vec!["A".into(), "B".into(), "A".into(), "B".into()],
        )
        .unwrap()
    }

    #[test]
    fn first_appearance_label_order() {
        let d = Dataset::new(
            vec!["x".into()],
            vec![vec![1.0], vec![2.0], vec![3.0]],
            vec!["z".into(), "a".into(), "z".into()],
        )
        .unwrap();
        assert_eq!(d.label_set(), &[ClassLabel::from("z"), ClassLabel::from("a")]);
        assert_eq!(d.targets(), &[0, 1, 0]);
    }

    #[test]
    fn class_indices_and_subset() {
        let d = toy();
        assert_eq!(d.class_indices(), vec![vec![0, 2], vec![1, 3]]);
        let s = d.subset(&[3, 0]).unwrap();
        assert_eq!(s.label_set(), &[ClassLabel::from("B"), ClassLabel::from("A")]);
        assert_eq!(s.row(0), &[6.0, 2.0]);
    }

    #[test]
    fn rejects_ragged_and_non_finite() {
        assert!(Dataset::new(vec!["x".into()], vec![vec![1.0, 2.0]], vec!["a".into()]).is_err());
        assert!(Dataset::new(vec!["x".into()], vec![vec![f64::NAN]], vec!["a".into()]).is_err());
        assert!(matches!(
            Dataset::new(vec!["x".into()], vec![], vec![]),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn rescaled_keeps_labels() {
        let d = toy().rescaled(&RescaleWeights::new(vec![2.0, 0.5]).unwrap()).unwrap();
        assert_eq!(d.row(1), &[8.0, 0.0]);
        assert_eq!(d.label(1).as_str(), "B");
    }
}
