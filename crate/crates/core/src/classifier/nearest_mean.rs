use super::ModelState;
use crate::dataset::Dataset;
use crate::error::Result;

/// Arithmetic mean of each class.
pub(super) fn centroids(data: &Dataset) -> Vec<Vec<f64>> {
    data.class_indices()
        .iter()
        .map(|idx| {
            let mut mean = vec![0.0; data.dim()];
            for &i in idx {
                for (m, v) in mean.iter_mut().zip(data.row(i)) {
                    *m += v;
                }
            }
            let inv = 1.0 / idx.len() as f64;
            mean.iter_mut().for_each(|m| *m *= inv);
            mean
        })
        .collect()
}

pub(super) fn fit(data: &Dataset) -> Result<ModelState> {
    Ok(ModelState::Nmc {
        centroids: centroids(data),
    })
}

/// Index of the Euclidean-nearest centroid; the first one wins ties.
pub(super) fn nearest(centroids: &[Vec<f64>], x: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centroids.iter().enumerate() {
        let d: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}
