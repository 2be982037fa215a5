use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{run_on_dataset, ClassifierEntry, ExperimentConfig, RescaleSetting};
use crate::classifier::{ClassifierKind, ClassifierSpec};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// One point of a uniform-rescaling sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub classifier: String,
    pub mean: f64,
    pub std: f64,
    pub runs: usize,
}

/// Repeats the experiment for every factor in `t_grid`, scaling all features
/// of every pattern by `t`. The run seeds are the same at each `t`. NMC is
/// added as the reference when the config does not already contain it.
pub fn rescale_sweep(cfg: &ExperimentConfig, data: &Dataset, t_grid: &[f64], runs_per_t: usize) -> Result<Vec<SweepRow>> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("empty rescaling grid".into()));
    }
    if let Some(t) = t_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidArgument(format!("rescaling factor must be positive, got {t}")));
    }
    let mut base = cfg.clone();
    base.runs = runs_per_t;
    for c in &mut base.classifiers {
        c.rescale = None;
    }
    if !base.classifiers.iter().any(|c| c.spec.kind == ClassifierKind::Nmc) {
        base.classifiers.push(ClassifierEntry::new(ClassifierSpec::nmc()));
    }
    let mut rows = Vec::with_capacity(t_grid.len() * base.classifiers.len());
    for &t in t_grid {
        let mut swept = base.clone();
        swept.rescale = Some(RescaleSetting::Uniform(t));
        let report = run_on_dataset(&swept, data)?;
        rows.extend(report.classifiers.into_iter().map(|c| SweepRow {
            t,
            classifier: c.name,
            mean: c.mean_accuracy,
            std: c.std_accuracy,
            runs: c.accuracies.len(),
        }));
    }
    Ok(rows)
}

/// Writes `t,classifier,mean,std,runs` rows with shortest round-trip floats.
pub fn write_sweep_csv(rows: &[SweepRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Csv {
        path: "<output>".into(),
        message: e.to_string(),
    };
    w.write_record(["t", "classifier", "mean", "std", "runs"]).map_err(io)?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            r.classifier.clone(),
            r.mean.to_string(),
            r.std.to_string(),
            r.runs.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<output>".into(),
        source,
    })
}
