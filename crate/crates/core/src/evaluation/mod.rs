//! Repeated random-split experiments.
//!
//! Each run `r` draws its split from `derive_run_seed(master, r)`, fits every
//! configured classifier on the training part and scores it on the test part.
//! Runs execute in parallel but are gathered in run order, so reports do not
//! depend on scheduling.

mod report;
mod rescaling;
mod sweep;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{fit, ClassifierSpec};
use crate::dataset::ipf::{load_ipf, IpfSchema};
use crate::dataset::synthetic::GeneratorSpec;
use crate::dataset::{load_csv, split_indices, CsvOptions, Dataset, SplitSpec};
use crate::encoding::{EncoderKind, RescaleWeights};
use crate::error::{Error, Result};

pub use report::{ClassAccuracy, ClassifierResult, DatasetSummary, EvaluationReport, REPORT_FORMAT, REPORT_VERSION};
pub use rescaling::{apply_preset, RescalePreset, RescaleSetting};
pub use sweep::{rescale_sweep, write_sweep_csv, SweepRow};

pub const DEFAULT_RUNS: usize = 100;
/// Run count used by the IPF benchmark.
pub const IPF_RUNS: usize = 50;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of run `run`: SplitMix64 finalizer applied to `master + γ·(run + 1)`,
/// with γ = 0x9E3779B97F4A7C15 and the multipliers 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB. The map is a bijection of `run` for a fixed master, so
/// seeds never collide within an experiment.
pub fn derive_run_seed(master: u64, run: usize) -> u64 {
    let mut z = master.wrapping_add(GOLDEN_GAMMA.wrapping_mul(run as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fraction of positions where `predicted` and `actual` agree.
pub fn accuracy<T: PartialEq>(predicted: &[T], actual: &[T]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            got: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::InvalidArgument("accuracy of an empty test set".into()));
    }
    let hits = predicted.iter().zip(actual).filter(|(p, a)| p == a).count();
    Ok(hits as f64 / actual.len() as f64)
}

/// Mean and sample standard deviation (`n − 1` denominator; 0 for one value).
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Split parameters shared by every run; the seed comes from the run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub stratified: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        let s = SplitSpec::default();
        Self {
            train_fraction: s.train_fraction,
            stratified: s.stratified,
        }
    }
}

impl SplitConfig {
    pub fn with_seed(self, seed: u64) -> SplitSpec {
        SplitSpec {
            train_fraction: self.train_fraction,
            seed,
            stratified: self.stratified,
        }
    }
}

/// Where the patterns come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum DatasetSource {
    Csv {
        path: PathBuf,
        #[serde(default = "default_label_column")]
        label_column: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        features: Option<Vec<String>>,
        #[serde(default = "default_delimiter")]
        delimiter: char,
    },
    Ipf {
        path: PathBuf,
        schema: PathBuf,
    },
    Generator {
        #[serde(flatten)]
        spec: GeneratorSpec,
        /// Generation seed; the experiment's master seed when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

fn default_label_column() -> String {
    CsvOptions::default().label_column
}

fn default_delimiter() -> char {
    CsvOptions::default().delimiter
}

impl DatasetSource {
    pub fn generator(spec: GeneratorSpec) -> Self {
        DatasetSource::Generator { spec, seed: None }
    }

    pub fn load(&self, master_seed: u64) -> Result<Dataset> {
        match self {
            DatasetSource::Csv {
                path,
                label_column,
                features,
                delimiter,
            } => {
                let mut opts = CsvOptions::new(label_column.clone()).with_delimiter(*delimiter);
                if let Some(f) = features {
                    opts = opts.with_features(f.clone());
                }
                load_csv(path, &opts)
            }
            DatasetSource::Ipf { path, schema } => {
                Ok(load_ipf(path, &IpfSchema::load(schema)?)?.dataset)
            }
            DatasetSource::Generator { spec, seed } => spec.generate(seed.unwrap_or(master_seed)),
        }
    }

    /// Resolves relative file paths against `base`.
    pub fn with_base_dir(mut self, base: &Path) -> Self {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut self {
            DatasetSource::Csv { path, .. } => fix(path),
            DatasetSource::Ipf { path, schema } => {
                fix(path);
                fix(schema);
            }
            DatasetSource::Generator { .. } => {}
        }
        self
    }

    pub fn describe(&self) -> String {
        match self {
            DatasetSource::Csv { path, .. } => format!("csv:{}", path.display()),
            DatasetSource::Ipf { path, .. } => format!("ipf:{}", path.display()),
            DatasetSource::Generator { spec, .. } => format!("generator:{}", spec.name()),
        }
    }
}

/// One classifier row of an experiment, with an optional own rescaling that
/// replaces the experiment-wide one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub spec: ClassifierSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rescale: Option<RescaleSetting>,
}

impl ClassifierEntry {
    pub fn new(spec: ClassifierSpec) -> Self {
        Self {
            name: None,
            spec,
            rescale: None,
        }
    }

    pub fn with_rescale(mut self, rescale: RescaleSetting) -> Self {
        self.rescale = Some(rescale);
        self
    }

    /// The configured name, or one derived from the spec and rescaling.
    pub fn display_name(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        match &self.rescale {
            None => self.spec.to_string(),
            Some(RescaleSetting::Preset(p)) => format!("{} {p}", self.spec),
            Some(RescaleSetting::Uniform(t)) => format!("{} t={t}", self.spec),
            Some(_) => format!("{} rescaled", self.spec),
        }
    }
}

fn default_runs() -> usize {
    DEFAULT_RUNS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub split: SplitConfig,
    /// Applied to every classifier without its own setting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rescale: Option<RescaleSetting>,
    pub dataset: DatasetSource,
    pub classifiers: Vec<ClassifierEntry>,
}

impl ExperimentConfig {
    pub fn new(dataset: DatasetSource, classifiers: Vec<ClassifierEntry>) -> Self {
        Self {
            runs: DEFAULT_RUNS,
            seed: 0,
            split: SplitConfig::default(),
            rescale: None,
            dataset,
            classifiers,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.classifiers.is_empty() {
            return Err(Error::Config("no classifiers configured".into()));
        }
        for c in &self.classifiers {
            c.spec.validate()?;
        }
        self.split.with_seed(0).validate()
    }

    /// A copy with every implicit choice written out: generator seed and
    /// classifier names.
    pub fn resolved(&self) -> Self {
        let mut cfg = self.clone();
        if let DatasetSource::Generator { seed, .. } = &mut cfg.dataset {
            seed.get_or_insert(self.seed);
        }
        for c in &mut cfg.classifiers {
            c.name = Some(c.display_name());
        }
        cfg
    }

    pub fn run_seeds(&self) -> Vec<u64> {
        (0..self.runs).map(|r| derive_run_seed(self.seed, r)).collect()
    }
}

/// The nine rows of the IPF benchmark: QNMC (SE), QNMC (IE), QNMC (IE) with
/// each of the four presets, then NMC, LDA and QDA.
pub fn ipf_bench_classifiers() -> Vec<ClassifierEntry> {
    let ie = ClassifierSpec::qnmc(EncoderKind::Informative);
    let mut rows = vec![
        ClassifierEntry::new(ClassifierSpec::qnmc(EncoderKind::Stereographic)),
        ClassifierEntry::new(ie),
    ];
    rows.extend(
        RescalePreset::ALL
            .iter()
            .map(|p| ClassifierEntry::new(ie).with_rescale(RescaleSetting::Preset(*p))),
    );
    rows.extend([
        ClassifierEntry::new(ClassifierSpec::nmc()),
        ClassifierEntry::new(ClassifierSpec::lda(crate::classifier::DEFAULT_REGULARIZATION)),
        ClassifierEntry::new(ClassifierSpec::qda(crate::classifier::DEFAULT_REGULARIZATION)),
    ]);
    rows
}

pub fn ipf_bench_config(path: PathBuf, schema: PathBuf, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        runs: IPF_RUNS,
        seed,
        ..ExperimentConfig::new(DatasetSource::Ipf { path, schema }, ipf_bench_classifiers())
    }
}

/// Test-set predictions of one run, as indices into the full dataset's label set.
#[derive(Clone, Debug, PartialEq)]
pub struct RunPredictions {
    pub run: usize,
    pub seed: u64,
    pub test: Vec<usize>,
    /// One vector per configured classifier, aligned with `test`.
    pub predicted: Vec<Vec<usize>>,
}

struct Prepared {
    spec: ClassifierSpec,
    weights: Option<RescaleWeights>,
}

fn prepare(cfg: &ExperimentConfig, data: &Dataset) -> Result<Vec<Prepared>> {
    cfg.classifiers
        .iter()
        .map(|c| {
            let setting = c.rescale.as_ref().or(cfg.rescale.as_ref());
            Ok(Prepared {
                spec: c.spec,
                weights: setting.map(|s| s.resolve(data)).transpose()?,
            })
        })
        .collect()
}

fn one_run(data: &Dataset, prepared: &[Prepared], split: SplitConfig, run: usize, seed: u64) -> Result<RunPredictions> {
    let (train_idx, test) = split_indices(data, &split.with_seed(seed))?;
    let train = data.subset(&train_idx)?;
    let mut predicted = Vec::with_capacity(prepared.len());
    for p in prepared {
        let model = fit(&p.spec, &train, p.weights.as_ref())?;
        let remap: Vec<usize> = model
            .labels()
            .iter()
            .map(|l| data.label_set().iter().position(|k| k == l).expect("train labels come from data"))
            .collect();
        predicted.push(
            test.iter()
                .map(|&i| model.predict_index(data.row(i)).map(|k| remap[k]))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(RunPredictions {
        run,
        seed,
        test,
        predicted,
    })
}

/// Per-run test predictions of every configured classifier on `data`.
pub fn run_predictions(cfg: &ExperimentConfig, data: &Dataset) -> Result<Vec<RunPredictions>> {
    cfg.validate()?;
    let prepared = prepare(cfg, data)?;
    let seeds = cfg.run_seeds();
    let outcomes: Vec<Result<RunPredictions>> = seeds
        .par_iter()
        .enumerate()
        .map(|(run, &seed)| one_run(data, &prepared, cfg.split, run, seed))
        .collect();
    outcomes
        .into_iter()
        .enumerate()
        .map(|(run, r)| {
            r.map_err(|e| Error::Run {
                run,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Runs `cfg` on an already loaded dataset.
pub fn run_on_dataset(cfg: &ExperimentConfig, data: &Dataset) -> Result<EvaluationReport> {
    let runs = run_predictions(cfg, data)?;
    Ok(EvaluationReport::from_runs(&cfg.resolved(), data, &runs))
}

/// Loads the configured dataset and runs the experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<EvaluationReport> {
    cfg.validate()?;
    let data = cfg.dataset.load(cfg.seed)?;
    run_on_dataset(cfg, &data)
}
