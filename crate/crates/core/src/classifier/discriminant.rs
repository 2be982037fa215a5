//! Gaussian discriminant analysis with empirical priors.
//!
//! LDA scores `xᵀΣ⁻¹μ_j − ½μ_jᵀΣ⁻¹μ_j + ln π_j` with the pooled within-class
//! covariance; QDA scores `−½ ln det Σ_j − ½(x−μ_j)ᵀΣ_j⁻¹(x−μ_j) + ln π_j`.
//! Covariances get `reg · trace(Σ)/d` added to the diagonal before inversion.

use super::nearest_mean::centroids;
use super::ModelState;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Unnormalized scatter `Σ_i (x_i − μ)(x_i − μ)ᵀ` over `idx`.
fn scatter(data: &Dataset, idx: &[usize], mean: &[f64]) -> SymMatrix {
    let d = data.dim();
    let mut s = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for &i in idx {
        for (c, (x, m)) in centered.iter_mut().zip(data.row(i).iter().zip(mean)) {
            *c = x - m;
        }
        for a in 0..d {
            for b in a..d {
                s[a * d + b] += centered[a] * centered[b];
            }
        }
    }
    for a in 0..d {
        for b in (a + 1)..d {
            s[b * d + a] = s[a * d + b];
        }
    }
    SymMatrix::new(d, s).expect("scatter is finite and mirrored")
}

/// Unbiased sample covariance of the patterns at `idx` (needs two or more).
pub fn class_covariance(data: &Dataset, idx: &[usize], mean: &[f64]) -> SymMatrix {
    let mut s = scatter(data, idx, mean);
    s.scale(1.0 / (idx.len() as f64 - 1.0));
    s
}

/// `Σ + reg · (trace(Σ)/d) · I`.
pub fn regularize(cov: &SymMatrix, reg: f64) -> SymMatrix {
    let mut out = cov.clone();
    out.add_to_diagonal(reg * cov.trace() / cov.dim() as f64);
    out
}

fn require_two_per_class(data: &Dataset) -> Result<Vec<Vec<usize>>> {
    let groups = data.class_indices();
    for (j, g) in groups.iter().enumerate() {
        if g.len() < 2 {
            return Err(Error::ClassTooSmall {
                label: data.label_set()[j].to_string(),
                size: g.len(),
                required: 2,
            });
        }
    }
    Ok(groups)
}

fn priors(groups: &[Vec<usize>], total: usize) -> Vec<f64> {
    groups.iter().map(|g| g.len() as f64 / total as f64).collect()
}

pub(super) fn fit_lda(data: &Dataset, reg: f64) -> Result<ModelState> {
    let groups = require_two_per_class(data)?;
    let means = centroids(data);
    let d = data.dim();
    let mut pooled = SymMatrix::zeros(d);
    for (g, m) in groups.iter().zip(&means) {
        pooled.add_scaled(1.0, &scatter(data, g, m))?;
    }
    pooled.scale(1.0 / (data.len() - groups.len()) as f64);
    let covariance = regularize(&pooled, reg);
    // fail at fit time rather than at first prediction
    covariance.inverse_and_log_det()?;
    Ok(ModelState::Lda {
        means,
        covariance,
        priors: priors(&groups, data.len()),
    })
}

pub(super) fn fit_qda(data: &Dataset, reg: f64) -> Result<ModelState> {
    let groups = require_two_per_class(data)?;
    let means = centroids(data);
    let covariances = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| {
            let cov = regularize(&class_covariance(data, g, m), reg);
            cov.inverse_and_log_det()?;
            Ok(cov)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelState::Qda {
        means,
        covariances,
        priors: priors(&groups, data.len()),
    })
}

fn argmax(scores: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_s = f64::NEG_INFINITY;
    for (j, s) in scores.enumerate() {
        if s > best_s {
            best = j;
            best_s = s;
        }
    }
    best
}

#[derive(Clone, Debug)]
pub(super) struct LinearScorer {
    /// `Σ⁻¹μ_j`
    weights: Vec<Vec<f64>>,
    /// `−½μ_jᵀΣ⁻¹μ_j + ln π_j`
    offsets: Vec<f64>,
}

impl LinearScorer {
    pub fn new(means: &[Vec<f64>], covariance: &SymMatrix, priors: &[f64]) -> Result<Self> {
        let (precision, _) = covariance.inverse_and_log_det()?;
        let mut weights = Vec::with_capacity(means.len());
        let mut offsets = Vec::with_capacity(means.len());
        for (mu, prior) in means.iter().zip(priors) {
            let w = precision.mul_vec(mu)?;
            let quad: f64 = w.iter().zip(mu).map(|(a, b)| a * b).sum();
            offsets.push(-0.5 * quad + prior.ln());
            weights.push(w);
        }
        Ok(Self { weights, offsets })
    }

    pub fn score(&self, j: usize, x: &[f64]) -> f64 {
        self.weights[j].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.offsets[j]
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax((0..self.weights.len()).map(|j| self.score(j, x))))
    }
}

#[derive(Clone, Debug)]
pub(super) struct QuadraticScorer {
    means: Vec<Vec<f64>>,
    precisions: Vec<SymMatrix>,
    /// `−½ ln det Σ_j + ln π_j`
    offsets: Vec<f64>,
}

impl QuadraticScorer {
    pub fn new(means: &[Vec<f64>], covariances: &[SymMatrix], priors: &[f64]) -> Result<Self> {
        let mut precisions = Vec::with_capacity(means.len());
        let mut offsets = Vec::with_capacity(means.len());
        for (cov, prior) in covariances.iter().zip(priors) {
            if cov.dim() != means[0].len() {
                return Err(Error::DimensionMismatch {
                    expected: means[0].len(),
                    got: cov.dim(),
                });
            }
            let (p, log_det) = cov.inverse_and_log_det()?;
            precisions.push(p);
            offsets.push(-0.5 * log_det + prior.ln());
        }
        Ok(Self {
            means: means.to_vec(),
            precisions,
            offsets,
        })
    }

    pub fn score(&self, j: usize, x: &[f64]) -> Result<f64> {
        let centered: Vec<f64> = x.iter().zip(&self.means[j]).map(|(a, b)| a - b).collect();
        Ok(self.offsets[j] - 0.5 * self.precisions[j].quadratic_form(&centered)?)
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let scores = (0..self.means.len())
            .map(|j| self.score(j, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(argmax(scores.into_iter()))
    }
}
