//! Nearest-mean classification with density-matrix encodings.
//!
//! Feature vectors are mapped onto pure quantum states ([`encoding`]), averaged
//! per class into mixed "quantum centroids", and classified by minimum trace
//! distance ([`classifier`]). Classical NMC, LDA and QDA share the same
//! contract, and [`evaluation`] runs repeated seeded train/test experiments.

pub mod classifier;
pub mod dataset;
pub mod encoding;
pub mod error;
pub mod evaluation;
pub mod matrix;

pub use classifier::{fit, ClassifierKind, ClassifierSpec, ModelState, TrainedModel};
pub use dataset::{ClassLabel, Dataset, SplitSpec};
pub use encoding::{encode, EncoderKind, FeatureVector, RescaleWeights};
pub use error::{Error, Result};
pub use matrix::{sym_eigen, trace_distance, DensityMatrix, EigenResult, SymMatrix};
