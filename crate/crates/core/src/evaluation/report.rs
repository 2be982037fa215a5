use serde::{Deserialize, Serialize};

use super::{mean_and_std, ExperimentConfig, RunPredictions};
use crate::classifier::ClassifierSpec;
use crate::dataset::{ClassLabel, Dataset};
use crate::error::{Error, Result};

pub const REPORT_FORMAT: &str = "qnmc-report";
pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub source: String,
    pub patterns: usize,
    pub features: Vec<String>,
    pub labels: Vec<ClassLabel>,
    pub class_sizes: Vec<usize>,
}

/// Test accuracy restricted to one class, pooled over all runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassAccuracy {
    pub label: ClassLabel,
    pub test_patterns: usize,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierResult {
    pub name: String,
    pub spec: ClassifierSpec,
    pub accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    /// `1 − mean_accuracy`: the overall misclassification rate.
    pub mean_error: f64,
    pub std_error: f64,
    pub per_class: Vec<ClassAccuracy>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub format: String,
    pub version: u32,
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub run_seeds: Vec<u64>,
    pub dataset: DatasetSummary,
    pub classifiers: Vec<ClassifierResult>,
}

impl EvaluationReport {
    /// Aggregates `runs` (in run order) for the classifiers of `cfg`.
    pub fn from_runs(cfg: &ExperimentConfig, data: &Dataset, runs: &[RunPredictions]) -> Self {
        let targets = data.targets();
        let k = data.num_classes();
        let classifiers = cfg
            .classifiers
            .iter()
            .enumerate()
            .map(|(c, entry)| {
                let mut hits = vec![0usize; k];
                let mut totals = vec![0usize; k];
                let accuracies: Vec<f64> = runs
                    .iter()
                    .map(|run| {
                        let mut correct = 0;
                        for (&i, &p) in run.test.iter().zip(&run.predicted[c]) {
                            totals[targets[i]] += 1;
                            if p == targets[i] {
                                hits[targets[i]] += 1;
                                correct += 1;
                            }
                        }
                        correct as f64 / run.test.len() as f64
                    })
                    .collect();
                let (mean_accuracy, std_accuracy) = mean_and_std(&accuracies);
                let errors: Vec<f64> = accuracies.iter().map(|a| 1.0 - a).collect();
                let (_, std_error) = mean_and_std(&errors);
                ClassifierResult {
                    name: entry.display_name(),
                    spec: entry.spec,
                    accuracies,
                    mean_accuracy,
                    std_accuracy,
                    mean_error: 1.0 - mean_accuracy,
                    std_error,
                    per_class: data
                        .label_set()
                        .iter()
                        .enumerate()
                        .map(|(j, label)| ClassAccuracy {
                            label: label.clone(),
                            test_patterns: totals[j],
                            accuracy: if totals[j] == 0 {
                                f64::NAN
                            } else {
                                hits[j] as f64 / totals[j] as f64
                            },
                        })
                        .collect(),
                }
            })
            .collect();
        EvaluationReport {
            format: REPORT_FORMAT.into(),
            version: REPORT_VERSION,
            config: cfg.clone(),
            master_seed: cfg.seed,
            run_seeds: runs.iter().map(|r| r.seed).collect(),
            dataset: DatasetSummary {
                source: cfg.dataset.describe(),
                patterns: data.len(),
                features: data.feature_names().to_vec(),
                labels: data.label_set().to_vec(),
                class_sizes: data.class_indices().iter().map(Vec::len).collect(),
            },
            classifiers,
        }
    }

    pub fn classifier(&self, name: &str) -> Option<&ClassifierResult> {
        self.classifiers.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::ModelFormat(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        if r.format != REPORT_FORMAT || r.version != REPORT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported report {} v{}",
                r.format, r.version
            )));
        }
        Ok(r)
    }

    /// Aligned text table, three decimals:
    ///
    /// ```text
    /// Classifier        | Accuracy      | Total error
    /// ------------------+---------------+--------------
    /// NMC               | 0.779 ± 0.057 | 0.221 ± 0.057
    /// ```
    pub fn to_table(&self) -> String {
        let width = self
            .classifiers
            .iter()
            .map(|c| c.name.chars().count())
            .chain(["Classifier".len()])
            .max()
            .unwrap_or(0);
        let cell = |m: f64, s: f64| format!("{m:.3} ± {s:.3}");
        let col = "0.000 ± 0.000".chars().count();
        let mut out = format!(
            "{:<width$} | {:<col$} | Total error\n{}-+-{}-+-{}\n",
            "Classifier",
            "Accuracy",
            "-".repeat(width),
            "-".repeat(col),
            "-".repeat(col)
        );
        for c in &self.classifiers {
            out.push_str(&format!(
                "{:<width$} | {} | {}\n",
                c.name,
                cell(c.mean_accuracy, c.std_accuracy),
                cell(c.mean_error, c.std_error)
            ));
        }
        out.push_str(&format!(
            "\n{} runs, master seed {}, {} ({} patterns, {} features, {} classes)\n",
            self.run_seeds.len(),
            self.master_seed,
            self.dataset.source,
            self.dataset.patterns,
            self.dataset.features.len(),
            self.dataset.labels.len()
        ));
        out
    }
}
