//! Semi-supervised learning on the symmetric two-component Gaussian mixture.
//!
//! The crate is organised bottom-up:
//!
//! - [`gmm`]: the mixture family `X | Y ~ N(Y θ*, I_d)`, exact sampling and the
//!   closed-form prediction, excess and estimation errors.
//! - [`estimators`]: supervised mean, spectral unsupervised, sign-fixed UL+,
//!   the switching (SSL-S) and weighted (SSL-W) semi-supervised estimators,
//!   symmetric EM, ridge logistic regression, self-training and spherical LDA.
//! - [`theory`]: minimax rates, UL+ upper bounds, rate improvements, regimes
//!   and the oracle-weight gap.
//! - [`experiments`]: seeded, parallel Monte Carlo trials and sweeps.
//! - [`data_io`]: CSV ingestion, standardisation, PCA, splits and result files.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data_io;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod gmm;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
pub use gmm::{EstimatorOutput, LabeledDataset, Method, MixtureModel, UnlabeledDataset};
