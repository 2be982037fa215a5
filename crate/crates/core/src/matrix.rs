//! Dense real symmetric matrices, a cyclic Jacobi eigensolver, and the
//! density-matrix operations built on top of it (trace distance, PSD checks,
//! inversion of covariance matrices).
//!
//! Everything here is `f64` and row-major. Dimensions in this crate are small
//! (feature count plus one), so there is no blocking or sparse storage.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm target, relative to `1 + ||A||_F`.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
/// Sweeps before the eigensolver gives up.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Absolute tolerance on the unit-trace condition of a density matrix.
pub const TRACE_TOLERANCE: f64 = 1e-9;
/// Smallest eigenvalue accepted as "non-negative" for a density matrix.
pub const PSD_TOLERANCE: f64 = 1e-9;
/// Relative asymmetry accepted (and averaged away) by [`SymMatrix::new`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
/// Eigenvalues at or below this fraction of the largest one make a matrix singular.
pub const SINGULAR_RATIO: f64 = 1e-12;

/// A dense real symmetric matrix.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from row-major entries.
    ///
    /// Entries whose mirror differs by at most `1e-12 * max|a_ij|` are averaged;
    /// anything larger is rejected as a genuinely asymmetric input.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(Error::Shape {
                dim,
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let mut scale = 0.0f64;
        for (k, v) in entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry {
                    row: k / dim,
                    col: k % dim,
                });
            }
            scale = scale.max(v.abs());
        }
        let tol = SYMMETRY_TOLERANCE * scale;
        let mut data = entries;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let a = data[i * dim + j];
                let b = data[j * dim + i];
                let gap = (a - b).abs();
                if gap > tol {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        gap,
                    });
                }
                let mean = 0.5 * (a + b);
                data[i * dim + j] = mean;
                data[j * dim + i] = mean;
            }
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Shape {
                    dim,
                    expected: dim * dim,
                    got: rows.iter().map(Vec::len).sum(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![1.0; dim])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = d;
        }
        m
    }

    /// The outer product `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let x = v[i] * v[j];
                m.data[i * dim + j] = x;
                m.data[j * dim + i] = x;
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    /// Row-major view of the entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// `self - other`, entrywise.
    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(SymMatrix {
            dim: self.dim,
            data,
        })
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &SymMatrix) -> Result<()> {
        self.check_dim(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.data {
            *a *= alpha;
        }
    }

    pub fn add_to_diagonal(&mut self, shift: f64) {
        for i in 0..self.dim {
            self.data[i * self.dim + i] += shift;
        }
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(self
            .data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `vᵀ A v`.
    pub fn quadratic_form(&self, v: &[f64]) -> Result<f64> {
        let av = self.mul_vec(v)?;
        Ok(av.iter().zip(v).map(|(a, b)| a * b).sum())
    }

    /// Inverse and log-determinant through the eigendecomposition.
    ///
    /// Fails with [`Error::Singular`] when the largest eigenvalue is not positive
    /// or the smallest one is at or below `1e-12` times the largest.
    pub fn inverse_and_log_det(&self) -> Result<(SymMatrix, f64)> {
        let eig = sym_eigen(self)?;
        let max = eig.eigenvalues[self.dim - 1];
        let min = eig.eigenvalues[0];
        if max.is_nan() || max <= 0.0 || min <= SINGULAR_RATIO * max {
            return Err(Error::Singular { min, max });
        }
        let n = self.dim;
        let mut inv = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += eig.vector(i, k) * eig.vector(j, k) / eig.eigenvalues[k];
                }
                inv.data[i * n + j] = acc;
                inv.data[j * n + i] = acc;
            }
        }
        let log_det = eig.eigenvalues.iter().map(|l| l.ln()).sum();
        Ok((inv, log_det))
    }

    fn check_dim(&self, other: &SymMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.dim)).finish()
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        SymMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Spectral decomposition `A = V diag(λ) Vᵀ`.
#[derive(Clone, Debug)]
pub struct EigenResult {
    /// Ascending; ties keep the order in which the solver produced them.
    pub eigenvalues: Vec<f64>,
    /// Row-major `dim × dim`; column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: Vec<f64>,
    dim: usize,
}

impl EigenResult {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Component `row` of eigenvector `k`.
    #[inline]
    pub fn vector(&self, row: usize, k: usize) -> f64 {
        self.eigenvectors[row * self.dim + k]
    }

    /// Column `k` of the eigenvector matrix.
    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.dim).map(|r| self.vector(r, k)).collect()
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Converges when the off-diagonal Frobenius norm drops below
/// `1e-12 * (1 + ||A||_F)`; gives up after 100 sweeps.
pub fn sym_eigen(m: &SymMatrix) -> Result<EigenResult> {
    let n = m.dim;
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let threshold = JACOBI_TOLERANCE * (1.0 + m.frobenius_norm());

    let mut sweep = 0;
    loop {
        let off = off_diagonal_norm(&a, n);
        if off < threshold {
            break;
        }
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps: sweep,
                off_norm: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        sweep += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their original index order
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let eigenvalues = order.iter().map(|&i| a[i * n + i]).collect();
    let mut eigenvectors = vec![0.0; n * n];
    for (k, &src) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[r * n + k] = v[r * n + src];
        }
    }
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
        dim: n,
    })
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j] * a[i * n + j];
            }
        }
    }
    sum.sqrt()
}

/// True iff the smallest eigenvalue is at least `-tol`.
///
/// A matrix on which the eigensolver fails to converge is reported as not PSD.
pub fn psd_check(m: &SymMatrix, tol: f64) -> bool {
    match sym_eigen(m) {
        Ok(eig) => eig.eigenvalues[0] >= -tol,
        Err(_) => false,
    }
}

/// A real symmetric, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: SymMatrix,
}

impl DensityMatrix {
    /// Validates trace and positivity (both to within `1e-9`).
    pub fn new(mat: SymMatrix) -> Result<Self> {
        let tr = mat.trace();
        if (tr - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidTrace(tr));
        }
        let eig = sym_eigen(&mat)?;
        if eig.eigenvalues[0] < -PSD_TOLERANCE {
            return Err(Error::NotPositiveSemidefinite(eig.eigenvalues[0]));
        }
        Ok(Self { mat })
    }

    /// The pure state `ψ ψᵀ` for a unit vector `ψ`.
    pub fn pure(psi: &[f64]) -> Result<Self> {
        if psi.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let norm2: f64 = psi.iter().map(|x| x * x).sum();
        if norm2.is_nan() || (norm2 - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidTrace(norm2));
        }
        Ok(Self {
            mat: SymMatrix::outer(psi),
        })
    }

    /// Uniform convex combination of density matrices of equal dimension.
    pub fn mixture(states: &[DensityMatrix]) -> Result<Self> {
        let first = states.first().ok_or(Error::EmptyMatrix)?;
        let mut acc = SymMatrix::zeros(first.dim());
        for s in states {
            acc.add_scaled(1.0, &s.mat)?;
        }
        acc.scale(1.0 / states.len() as f64);
        Self::new(acc)
    }

    pub fn dim(&self) -> usize {
        self.mat.dim
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> SymMatrix {
        self.mat
    }

    /// `Tr(ρ²)`; equals 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        // symmetric, so Tr(ρ²) = Σ ρ_ij²
        self.mat.data.iter().map(|x| x * x).sum()
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.mat.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let mat = SymMatrix::deserialize(deserializer)?;
        DensityMatrix::new(mat).map_err(serde::de::Error::custom)
    }
}

/// `½ Tr|ρ − σ|`: half the sum of absolute eigenvalues of the difference.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let diff = rho.mat.sub(&sigma.mat)?;
    let eig = sym_eigen(&diff)?;
    let mut mags: Vec<f64> = eig.eigenvalues.iter().map(|l| l.abs()).collect();
    // summing by magnitude makes d(ρ,σ) and d(σ,ρ) agree bit for bit
    mags.sort_by(f64::total_cmp);
    Ok(0.5 * mags.iter().sum::<f64>())
}
