//! Minimum-distance classifiers behind one fit/predict contract: the nearest
//! mean classifier (NMC), its density-matrix counterpart (QNMC), and the
//! Gaussian discriminants LDA and QDA.
//!
//! Every decision is an argmin (or argmax) over the model's label list; ties go
//! to the label that appeared first in the training set.

mod discriminant;
mod nearest_mean;
mod quantum;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{ClassLabel, Dataset};
use crate::encoding::{EncoderKind, RescaleWeights};
use crate::error::{Error, Result};
use crate::matrix::{DensityMatrix, SymMatrix};

pub use discriminant::{class_covariance, regularize};

/// Default covariance regularization, as a fraction of `trace(Σ)/d`.
pub const DEFAULT_REGULARIZATION: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Nmc,
    Qnmc,
    Lda,
    Qda,
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nmc" => Ok(ClassifierKind::Nmc),
            "qnmc" => Ok(ClassifierKind::Qnmc),
            "lda" => Ok(ClassifierKind::Lda),
            "qda" => Ok(ClassifierKind::Qda),
            other => Err(Error::InvalidSpec(format!("unknown classifier '{other}'"))),
        }
    }
}

/// What to fit. `encoder` is required for QNMC and forbidden otherwise;
/// `regularization` only affects LDA and QDA.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoder: Option<EncoderKind>,
    #[serde(default = "default_regularization")]
    pub regularization: f64,
}

fn default_regularization() -> f64 {
    DEFAULT_REGULARIZATION
}

impl ClassifierSpec {
    pub fn nmc() -> Self {
        Self::plain(ClassifierKind::Nmc)
    }

    pub fn qnmc(encoder: EncoderKind) -> Self {
        Self {
            encoder: Some(encoder),
            ..Self::plain(ClassifierKind::Qnmc)
        }
    }

    pub fn lda(regularization: f64) -> Self {
        Self {
            regularization,
            ..Self::plain(ClassifierKind::Lda)
        }
    }

    pub fn qda(regularization: f64) -> Self {
        Self {
            regularization,
            ..Self::plain(ClassifierKind::Qda)
        }
    }

    fn plain(kind: ClassifierKind) -> Self {
        Self {
            kind,
            encoder: None,
            regularization: DEFAULT_REGULARIZATION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, self.encoder) {
            (ClassifierKind::Qnmc, None) => {
                return Err(Error::InvalidSpec("QNMC needs an encoder (se or ie)".into()))
            }
            (ClassifierKind::Qnmc, Some(_)) | (_, None) => {}
            (kind, Some(_)) => {
                return Err(Error::InvalidSpec(format!(
                    "{kind:?} does not take an encoder"
                )))
            }
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "regularization must be finite and non-negative, got {}",
                self.regularization
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.encoder) {
            (ClassifierKind::Nmc, _) => f.write_str("NMC"),
            (ClassifierKind::Qnmc, Some(e)) => write!(f, "QNMC ({e})"),
            (ClassifierKind::Qnmc, None) => f.write_str("QNMC"),
            (ClassifierKind::Lda, _) => f.write_str("LDA"),
            (ClassifierKind::Qda, _) => f.write_str("QDA"),
        }
    }
}

/// Fitted per-class parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelState {
    Nmc {
        centroids: Vec<Vec<f64>>,
    },
    Qnmc {
        encoder: EncoderKind,
        centroids: Vec<DensityMatrix>,
    },
    Lda {
        means: Vec<Vec<f64>>,
        /// Pooled covariance, already regularized.
        covariance: SymMatrix,
        priors: Vec<f64>,
    },
    Qda {
        means: Vec<Vec<f64>>,
        /// Per-class covariances, already regularized.
        covariances: Vec<SymMatrix>,
        priors: Vec<f64>,
    },
}

/// Quantities derived from [`ModelState`] once, at fit or load time.
#[derive(Clone, Debug)]
enum Scorer {
    Distance,
    Linear(discriminant::LinearScorer),
    Quadratic(discriminant::QuadraticScorer),
}

/// A fitted classifier: spec, label order, optional rescaling, and state.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    spec: ClassifierSpec,
    labels: Vec<ClassLabel>,
    dim: usize,
    weights: Option<RescaleWeights>,
    state: ModelState,
    scorer: Scorer,
}

impl TrainedModel {
    /// Assembles a model from stored parts, re-checking every invariant.
    pub fn from_parts(
        spec: ClassifierSpec,
        labels: Vec<ClassLabel>,
        dim: usize,
        weights: Option<RescaleWeights>,
        state: ModelState,
    ) -> Result<Self> {
        spec.validate()?;
        if labels.is_empty() {
            return Err(Error::ModelFormat("model has no labels".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::ModelFormat(format!("duplicate label '{l}'")));
            }
        }
        if let Some(w) = &weights {
            if w.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: w.len(),
                });
            }
        }
        let n = labels.len();
        let count_err = |what: &str, got: usize| {
            Error::ModelFormat(format!("{got} {what} for {n} labels"))
        };
        let check_vectors = |vs: &[Vec<f64>], what: &str| -> Result<()> {
            if vs.len() != n {
                return Err(count_err(what, vs.len()));
            }
            match vs.iter().find(|v| v.len() != dim) {
                Some(v) => Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                }),
                None => Ok(()),
            }
        };
        let scorer = match (&state, spec.kind) {
            (ModelState::Nmc { centroids }, ClassifierKind::Nmc) => {
                check_vectors(centroids, "centroids")?;
                Scorer::Distance
            }
            (ModelState::Qnmc { encoder, centroids }, ClassifierKind::Qnmc) => {
                if Some(*encoder) != spec.encoder {
                    return Err(Error::ModelFormat("encoder differs from spec".into()));
                }
                if centroids.len() != n {
                    return Err(count_err("quantum centroids", centroids.len()));
                }
                if let Some(c) = centroids.iter().find(|c| c.dim() != dim + 1) {
                    return Err(Error::DimensionMismatch {
                        expected: dim + 1,
                        got: c.dim(),
                    });
                }
                Scorer::Distance
            }
            (
                ModelState::Lda {
                    means,
                    covariance,
                    priors,
                },
                ClassifierKind::Lda,
            ) => {
                check_vectors(means, "means")?;
                check_priors(priors, n)?;
                Scorer::Linear(discriminant::LinearScorer::new(means, covariance, priors)?)
            }
            (
                ModelState::Qda {
                    means,
                    covariances,
                    priors,
                },
                ClassifierKind::Qda,
            ) => {
                check_vectors(means, "means")?;
                check_priors(priors, n)?;
                if covariances.len() != n {
                    return Err(count_err("covariances", covariances.len()));
                }
                Scorer::Quadratic(discriminant::QuadraticScorer::new(means, covariances, priors)?)
            }
            _ => {
                return Err(Error::ModelFormat(format!(
                    "state does not match classifier kind {:?}",
                    spec.kind
                )))
            }
        };
        Ok(Self {
            spec,
            labels,
            dim,
            weights,
            state,
            scorer,
        })
    }

    pub fn spec(&self) -> &ClassifierSpec {
        &self.spec
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> Option<&RescaleWeights> {
        self.weights.as_ref()
    }

    pub fn state(&self) -> &ModelState {
        &self.state
    }

    /// Index into [`TrainedModel::labels`] of the predicted class.
    pub fn predict_index(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if let Some(index) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature {
                index,
                value: x[index],
            });
        }
        let scaled;
        let x = match &self.weights {
            Some(w) => {
                scaled = w.apply(x)?;
                &scaled[..]
            }
            None => x,
        };
        match (&self.state, &self.scorer) {
            (ModelState::Nmc { centroids }, _) => Ok(nearest_mean::nearest(centroids, x)),
            (ModelState::Qnmc { encoder, centroids }, _) => {
                quantum::nearest(centroids, *encoder, x)
            }
            (_, Scorer::Linear(s)) => s.predict(x),
            (_, Scorer::Quadratic(s)) => s.predict(x),
            _ => unreachable!("scorer is built to match the state"),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<&ClassLabel> {
        Ok(&self.labels[self.predict_index(x)?])
    }

    /// Predicted label indices for every row of `rows`.
    pub fn predict_rows(&self, rows: &[Vec<f64>]) -> Result<Vec<usize>> {
        rows.iter().map(|r| self.predict_index(r)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDocument {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            spec: self.spec,
            labels: self.labels.clone(),
            dim: self.dim,
            weights: self.weights.clone(),
            state: self.state.clone(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::ModelFormat(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        if doc.format != MODEL_FORMAT {
            return Err(Error::ModelFormat(format!("unexpected format '{}'", doc.format)));
        }
        if doc.version != MODEL_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported version {} (this build reads {MODEL_VERSION})",
                doc.version
            )));
        }
        Self::from_parts(doc.spec, doc.labels, doc.dim, doc.weights, doc.state)
    }
}

fn check_priors(priors: &[f64], n: usize) -> Result<()> {
    if priors.len() != n || priors.iter().any(|p| !(*p > 0.0 && *p <= 1.0)) {
        return Err(Error::ModelFormat(format!("invalid priors {priors:?}")));
    }
    Ok(())
}

const MODEL_FORMAT: &str = "qnmc-model";
const MODEL_VERSION: u32 = 1;

/// On-disk layout of a [`TrainedModel`]. Floats are written in shortest
/// round-trip form, so loading reproduces every bit.
#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format: String,
    version: u32,
    spec: ClassifierSpec,
    labels: Vec<ClassLabel>,
    dim: usize,
    #[serde(default)]
    weights: Option<RescaleWeights>,
    state: ModelState,
}

/// Fits the classifier described by `spec`.
///
/// With `weights`, every training pattern is rescaled first and the weights
/// are stored so that prediction applies the same transform.
pub fn fit(spec: &ClassifierSpec, train: &Dataset, weights: Option<&RescaleWeights>) -> Result<TrainedModel> {
    spec.validate()?;
    let rescaled;
    let data = match weights {
        Some(w) => {
            if w.len() != train.dim() {
                return Err(Error::DimensionMismatch {
                    expected: train.dim(),
                    got: w.len(),
                });
            }
            rescaled = train.rescaled(w)?;
            &rescaled
        }
        None => train,
    };
    let state = match spec.kind {
        ClassifierKind::Nmc => nearest_mean::fit(data)?,
        ClassifierKind::Qnmc => {
            let encoder = spec.encoder.expect("validated");
            quantum::fit(data, encoder)?
        }
        ClassifierKind::Lda => discriminant::fit_lda(data, spec.regularization)?,
        ClassifierKind::Qda => discriminant::fit_qda(data, spec.regularization)?,
    };
    TrainedModel::from_parts(
        *spec,
        data.label_set().to_vec(),
        data.dim(),
        weights.cloned(),
        state,
    )
}

/// Class centroids for Euclidean nearest-mean classification.
pub fn fit_nmc(train: &Dataset) -> Result<TrainedModel> {
    fit(&ClassifierSpec::nmc(), train, None)
}

/// Quantum centroids: per-class means of the encoded density patterns.
pub fn fit_qnmc(train: &Dataset, encoder: EncoderKind, weights: &RescaleWeights) -> Result<TrainedModel> {
    fit(&ClassifierSpec::qnmc(encoder), train, Some(weights))
}

pub fn fit_lda(train: &Dataset, regularization: f64) -> Result<TrainedModel> {
    fit(&ClassifierSpec::lda(regularization), train, None)
}

pub fn fit_qda(train: &Dataset, regularization: f64) -> Result<TrainedModel> {
    fit(&ClassifierSpec::qda(regularization), train, None)
}
