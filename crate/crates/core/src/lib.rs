//! Numerical laboratory for random band matrices: sampling, spectra, the
//! block (mean-field) reduction `Q_e = A − Bᵀ(D − e)⁻¹B`, stochastic flows,
//! eigenvector statistics and local-law diagnostics.

pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod flows;
pub mod io;
pub mod linalg;
pub mod que;
pub mod reduction;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix64 = linalg::Matrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;
pub type Spectrum64 = spectral::Spectrum<f64>;
pub type Reducer64 = reduction::Reducer<f64>;
pub type BlockDecomposition64 = reduction::BlockDecomposition<f64>;
pub type DiagonalShift64 = ensemble::DiagonalShift<f64>;
pub type VarianceProfile64 = ensemble::VarianceProfile<f64>;
/// Exact rational profile for row-sum checks.
pub type RationalProfile = ensemble::VarianceProfile<num_rational::Ratio<i64>>;
pub type FlowState64 = flows::FlowState<f64>;
