use super::ModelState;
use crate::dataset::Dataset;
use crate::encoding::{encode, EncoderKind};
use crate::error::Result;
use crate::matrix::{trace_distance, DensityMatrix};

/// Quantum centroid of each class: the uniform mixture of its density patterns.
pub(super) fn fit(data: &Dataset, encoder: EncoderKind) -> Result<ModelState> {
    let centroids = data
        .class_indices()
        .iter()
        .map(|idx| {
            let states = idx
                .iter()
                .map(|&i| encode(data.row(i), encoder))
                .collect::<Result<Vec<_>>>()?;
            DensityMatrix::mixture(&states)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelState::Qnmc { encoder, centroids })
}

/// Index of the trace-distance-nearest centroid; the first one wins ties.
pub(super) fn nearest(centroids: &[DensityMatrix], encoder: EncoderKind, x: &[f64]) -> Result<usize> {
    let rho = encode(x, encoder)?;
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centroids.iter().enumerate() {
        let d = trace_distance(&rho, c)?;
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::super::tests::dataset;
    use super::super::{fit_qnmc, ModelState, TrainedModel, ClassifierSpec};
    use crate::dataset::ClassLabel;
    use crate::encoding::{EncoderKind, RescaleWeights};
    use crate::error::Error;
    use crate::matrix::{DensityMatrix, SymMatrix};

    const SE: EncoderKind = EncoderKind::Stereographic;

    fn centroids_of(rows: &[(&[f64], &str)]) -> Vec<Vec<f64>> {
        let m = fit_qnmc(&dataset(rows), SE, &RescaleWeights::ones(1)).unwrap();
        match m.state() {
            ModelState::Qnmc { centroids, .. } => {
                centroids.iter().map(|c| c.matrix().as_slice().to_vec()).collect()
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn centroid_examples() {
        assert_eq!(centroids_of(&[(&[1.0], "A")]), vec![vec![1.0, 0.0, 0.0, 0.0]]);
        assert_eq!(centroids_of(&[(&[1.0], "A"), (&[0.0], "A")]), vec![vec![0.5, 0.0, 0.0, 0.5]]);
        // SP⁻¹(−1) = (−2/2, 0/2) = (−1, 0), whose outer product is diag(1, 0)
        assert_eq!(centroids_of(&[(&[1.0], "A"), (&[-1.0], "A")]), vec![vec![1.0, 0.0, 0.0, 0.0]]);
    }

    fn two_state_model(a: DensityMatrix, b: DensityMatrix) -> TrainedModel {
        TrainedModel::from_parts(
            ClassifierSpec::qnmc(SE),
            vec![ClassLabel::from("A"), ClassLabel::from("B")],
            1,
            None,
            ModelState::Qnmc {
                encoder: SE,
                centroids: vec![a, b],
            },
        )
        .unwrap()
    }

    #[test]
    fn prediction_examples() {
        let a = DensityMatrix::new(SymMatrix::from_diagonal(&[1.0, 0.0])).unwrap();
        let b = DensityMatrix::new(SymMatrix::from_diagonal(&[0.0, 1.0])).unwrap();
        let m = two_state_model(a.clone(), b);
        assert_eq!(m.predict(&[1.0]).unwrap().as_str(), "A");
        assert_eq!(m.predict(&[0.0]).unwrap().as_str(), "B");
        let tied = two_state_model(a.clone(), a);
        for x in [-3.0, 0.0, 0.5, 7.0] {
            assert_eq!(tied.predict(&[x]).unwrap().as_str(), "A");
        }
    }

    #[test]
    fn informative_rejects_zero_pattern() {
        let data = dataset(&[(&[0.0, 0.0], "A"), (&[1.0, 0.0], "B")]);
        let err = fit_qnmc(&data, EncoderKind::Informative, &RescaleWeights::ones(2)).unwrap_err();
        assert!(matches!(err, Error::ZeroNorm));
        let data = dataset(&[(&[1.0, 0.0], "A"), (&[0.0, 1.0], "B")]);
        let m = fit_qnmc(&data, EncoderKind::Informative, &RescaleWeights::ones(2)).unwrap();
        assert!(matches!(m.predict(&[0.0, 0.0]), Err(Error::ZeroNorm)));
    }

    #[test]
    fn stored_weights_apply_at_prediction() {
        let data = dataset(&[(&[1.0], "A"), (&[0.0], "B")]);
        let m = fit_qnmc(&data, SE, &RescaleWeights::new(vec![0.5]).unwrap()).unwrap();
        match m.state() {
            // SP⁻¹(0.5) = (1, -0.75) / 1.25 = (0.8, -0.6)
            ModelState::Qnmc { centroids, .. } => {
                let c = centroids[0].matrix();
                assert!((c.get(0, 0) - 0.64).abs() < 1e-15);
                assert!((c.get(0, 1) + 0.48).abs() < 1e-15);
            }
            _ => unreachable!(),
        }
        assert_eq!(m.predict(&[1.0]).unwrap().as_str(), "A");
        assert_eq!(m.weights().unwrap().as_slice(), &[0.5]);
    }
}
