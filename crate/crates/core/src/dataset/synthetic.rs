//! Seeded two-class synthetic datasets: overlapping Gaussians, two moons, and
//! two bananas (opposed parabolic arcs). Class labels are `"0"` and `"1"`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{ClassLabel, Dataset};
use crate::error::{Error, Result};
use crate::matrix::{sym_eigen, SymMatrix};

/// Multivariate normal classes, one mean and covariance per class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaussianConfig {
    pub n_per_class: usize,
    pub means: Vec<Vec<f64>>,
    pub covariances: Vec<Vec<Vec<f64>>>,
}

impl Default for GaussianConfig {
    /// Two crossed anisotropic clouds with nearly coincident means.
    fn default() -> Self {
        Self {
            n_per_class: 100,
            means: vec![vec![0.0, 0.0], vec![0.1, 0.1]],
            covariances: vec![
                vec![vec![1.0, 0.0], vec![0.0, 0.2]],
                vec![vec![0.2, 0.0], vec![0.0, 1.0]],
            ],
        }
    }
}

/// Two interleaved unit half-circles; the second is flipped and shifted by `(1, -0.5)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MoonConfig {
    pub n_per_class: usize,
    pub noise: f64,
}

impl Default for MoonConfig {
    fn default() -> Self {
        Self {
            n_per_class: 100,
            noise: 0.1,
        }
    }
}

/// Arcs `y = ±(curvature·x² − offset)` for `x` uniform on `[-half_width, half_width]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BananaConfig {
    pub n_per_class: usize,
    pub curvature: f64,
    pub offset: f64,
    pub half_width: f64,
    pub noise: f64,
}

impl Default for BananaConfig {
    fn default() -> Self {
        Self {
            n_per_class: 2650,
            curvature: 0.5,
            offset: 0.5,
            half_width: 2.0,
            noise: 0.2,
        }
    }
}

/// One of the built-in generators with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "lowercase")]
pub enum GeneratorSpec {
    Gaussian(GaussianConfig),
    Moon(MoonConfig),
    Banana(BananaConfig),
}

impl GeneratorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::Gaussian(_) => "gaussian",
            GeneratorSpec::Moon(_) => "moon",
            GeneratorSpec::Banana(_) => "banana",
        }
    }

    /// The default configuration of the generator called `name`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(GeneratorSpec::Gaussian(GaussianConfig::default())),
            "moon" => Ok(GeneratorSpec::Moon(MoonConfig::default())),
            "banana" => Ok(GeneratorSpec::Banana(BananaConfig::default())),
            other => Err(Error::InvalidArgument(format!(
                "unknown generator '{other}' (expected gaussian, moon or banana)"
            ))),
        }
    }

    pub fn generate(&self, seed: u64) -> Result<Dataset> {
        match self {
            GeneratorSpec::Gaussian(c) => gen_gaussian(c, seed),
            GeneratorSpec::Moon(c) => gen_moon(c, seed),
            GeneratorSpec::Banana(c) => gen_banana(c, seed),
        }
    }
}

fn two_feature_names() -> Vec<String> {
    vec!["x1".into(), "x2".into()]
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n_per_class must be at least 1".into()));
    }
    Ok(())
}

fn check_noise(sigma: f64) -> Result<()> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise must be a finite non-negative number, got {sigma}"
        )));
    }
    Ok(())
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Samples `n_per_class` points from each configured normal distribution.
pub fn gen_gaussian(config: &GaussianConfig, seed: u64) -> Result<Dataset> {
    check_count(config.n_per_class)?;
    if config.means.is_empty() || config.means.len() != config.covariances.len() {
        return Err(Error::InvalidArgument(
            "need one covariance per class mean".into(),
        ));
    }
    let dim = config.means[0].len();
    if dim == 0 {
        return Err(Error::EmptyFeatureVector);
    }
    // x = μ + V √Λ z; works for semidefinite covariances too
    let mut factors = Vec::with_capacity(config.means.len());
    for (mean, cov) in config.means.iter().zip(&config.covariances) {
        if mean.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: mean.len(),
            });
        }
        let cov = SymMatrix::from_rows(cov)?;
        if cov.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: cov.dim(),
            });
        }
        let eig = sym_eigen(&cov)?;
        let tol = 1e-12 * cov.max_abs().max(1.0);
        if eig.eigenvalues[0] < -tol {
            return Err(Error::NotPositiveSemidefinite(eig.eigenvalues[0]));
        }
        let roots: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
        let mut factor = vec![0.0; dim * dim];
        for r in 0..dim {
            for k in 0..dim {
                factor[r * dim + k] = eig.vector(r, k) * roots[k];
            }
        }
        factors.push(factor);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (class, (mean, factor)) in config.means.iter().zip(&factors).enumerate() {
        let label = ClassLabel::new(class.to_string());
        for _ in 0..config.n_per_class {
            let z: Vec<f64> = (0..dim).map(|_| normal(&mut rng)).collect();
            let x = (0..dim)
                .map(|r| mean[r] + (0..dim).map(|k| factor[r * dim + k] * z[k]).sum::<f64>())
                .collect();
            rows.push(x);
            labels.push(label.clone());
        }
    }
    let names = if dim == 2 {
        two_feature_names()
    } else {
        (1..=dim).map(|i| format!("x{i}")).collect()
    };
    Dataset::new(names, rows, labels)
}

/// Two interleaving half-moons with isotropic Gaussian noise.
pub fn gen_moon(config: &MoonConfig, seed: u64) -> Result<Dataset> {
    check_count(config.n_per_class)?;
    check_noise(config.noise)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * config.n_per_class);
    let mut labels = Vec::with_capacity(2 * config.n_per_class);
    for class in 0..2 {
        let label = ClassLabel::new(class.to_string());
        for _ in 0..config.n_per_class {
            let theta = rng.random_range(0.0..=std::f64::consts::PI);
            let (s, c) = theta.sin_cos();
            let (x, y) = if class == 0 { (c, s) } else { (1.0 - c, 0.5 - s) };
            let nx = config.noise * normal(&mut rng);
            let ny = config.noise * normal(&mut rng);
            rows.push(vec![x + nx, y + ny]);
            labels.push(label.clone());
        }
    }
    Dataset::new(two_feature_names(), rows, labels)
}

/// Two opposed parabolic arcs with isotropic Gaussian noise.
pub fn gen_banana(config: &BananaConfig, seed: u64) -> Result<Dataset> {
    check_count(config.n_per_class)?;
    check_noise(config.noise)?;
    if !(config.half_width > 0.0 && config.half_width.is_finite()) {
        return Err(Error::InvalidArgument("half_width must be positive".into()));
    }
    if !(config.curvature.is_finite() && config.offset.is_finite()) {
        return Err(Error::InvalidArgument("curvature and offset must be finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * config.n_per_class);
    let mut labels = Vec::with_capacity(2 * config.n_per_class);
    for class in 0..2 {
        let label = ClassLabel::new(class.to_string());
        let sign = if class == 0 { 1.0 } else { -1.0 };
        for _ in 0..config.n_per_class {
            let x = rng.random_range(-config.half_width..=config.half_width);
            let y = sign * (config.curvature * x * x - config.offset);
            let nx = config.noise * normal(&mut rng);
            let ny = config.noise * normal(&mut rng);
            rows.push(vec![x + nx, y + ny]);
            labels.push(label.clone());
        }
    }
    Dataset::new(two_feature_names(), rows, labels)
}
