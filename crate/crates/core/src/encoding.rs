//! Feature vectors, per-feature rescaling, and the two embeddings of `R^d`
//! into pure states on `R^{d+1}`.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::ClassLabel;
use crate::error::{Error, Result};
use crate::matrix::DensityMatrix;

/// A finite, non-empty real pattern with an optional class label.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    label: Option<ClassLabel>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(Self {
            values,
            label: None,
        })
    }

    pub fn with_label(mut self, label: ClassLabel) -> Self {
        self.label = Some(label);
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> Option<&ClassLabel> {
        self.label.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

impl Deref for FeatureVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptyFeatureVector);
    }
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFiniteFeature {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

/// Strictly positive per-feature multipliers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RescaleWeights(Vec<f64>);

impl RescaleWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyFeatureVector);
        }
        if let Some(index) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidWeight {
                index,
                value: weights[index],
            });
        }
        Ok(Self(weights))
    }

    /// The same factor `t` on each of `dim` features.
    pub fn uniform(dim: usize, t: f64) -> Result<Self> {
        Self::new(vec![t; dim])
    }

    pub fn ones(dim: usize) -> Self {
        Self(vec![1.0; dim])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Multiplies `x` componentwise, checking lengths.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.0.len() {
            return Err(Error::DimensionMismatch {
                expected: self.0.len(),
                got: x.len(),
            });
        }
        Ok(x.iter().zip(&self.0).map(|(v, w)| v * w).collect())
    }
}

impl TryFrom<Vec<f64>> for RescaleWeights {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RescaleWeights> for Vec<f64> {
    fn from(w: RescaleWeights) -> Self {
        w.0
    }
}

/// `w ⊙ x`, keeping the label.
pub fn rescale(x: &FeatureVector, w: &RescaleWeights) -> Result<FeatureVector> {
    Ok(FeatureVector {
        values: w.apply(&x.values)?,
        label: x.label.clone(),
    })
}

/// Which embedding turns a pattern into a pure state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EncoderKind {
    /// Inverse stereographic projection onto the unit sphere.
    #[serde(rename = "se")]
    Stereographic,
    /// Direction plus norm, normalized; keeps `|x|` recoverable.
    #[serde(rename = "ie")]
    Informative,
}

impl EncoderKind {
    pub fn short_name(self) -> &'static str {
        match self {
            EncoderKind::Stereographic => "SE",
            EncoderKind::Informative => "IE",
        }
    }

    /// The unit vector in `R^{d+1}` this encoder assigns to `x`.
    pub fn embed(self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            EncoderKind::Stereographic => inverse_stereographic(x),
            EncoderKind::Informative => informative_embed(x),
        }
    }
}

impl fmt::Display for EncoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for EncoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "se" | "stereographic" => Ok(EncoderKind::Stereographic),
            "ie" | "informative" => Ok(EncoderKind::Informative),
            other => Err(Error::InvalidArgument(format!(
                "unknown encoder '{other}' (expected se or ie)"
            ))),
        }
    }
}

/// `SP⁻¹(x) = [2x¹, …, 2xᵈ, |x|² − 1] / (|x|² + 1)`.
pub fn inverse_stereographic(x: &[f64]) -> Result<Vec<f64>> {
    check_finite(x)?;
    let s: f64 = x.iter().map(|v| v * v).sum();
    if !s.is_finite() {
        // |x|² overflowed: the image is the projection pole
        let mut pole = vec![0.0; x.len() + 1];
        pole[x.len()] = 1.0;
        return Ok(pole);
    }
    let inv = 1.0 / (s + 1.0);
    let mut out: Vec<f64> = x.iter().map(|v| 2.0 * v * inv).collect();
    out.push((s - 1.0) * inv);
    Ok(out)
}

/// Forward stereographic projection `SP(x̃)ⁱ = x̃ⁱ / (1 − x̃ᵈ⁺¹)`.
pub fn stereographic_projection(point: &[f64]) -> Result<Vec<f64>> {
    if point.len() < 2 {
        return Err(Error::InvalidArgument(
            "stereographic projection needs at least two coordinates".into(),
        ));
    }
    check_finite(point)?;
    let (head, last) = point.split_at(point.len() - 1);
    let denom = 1.0 - last[0];
    if denom == 0.0 {
        return Err(Error::InvalidArgument(
            "point lies on the projection pole".into(),
        ));
    }
    Ok(head.iter().map(|v| v / denom).collect())
}

/// `(x/|x|, |x|) / √(|x|² + 1)`.
pub fn informative_embed(x: &[f64]) -> Result<Vec<f64>> {
    check_finite(x)?;
    let norm = euclidean_norm(x);
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let lift = norm.hypot(1.0);
    let scale = 1.0 / (norm * lift);
    let mut out: Vec<f64> = x.iter().map(|v| v * scale).collect();
    out.push(norm / lift);
    Ok(out)
}

/// The density pattern `ψ ψᵀ` with `ψ` from the chosen embedding.
pub fn encode(x: &[f64], kind: EncoderKind) -> Result<DensityMatrix> {
    DensityMatrix::pure(&kind.embed(x)?)
}

/// Overflow-safe Euclidean norm.
pub(crate) fn euclidean_norm(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * x.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt()
}
