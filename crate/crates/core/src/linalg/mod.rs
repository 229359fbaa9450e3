//! Dense linear-algebra kernels.

pub mod eigh;
pub mod lu;
pub mod matrix;

pub use eigh::{symmetric_eigen, symmetric_eigen_selected, symmetric_eigenvalues, tridiagonalize, Tridiagonal};
pub use lu::{complex_inverse, ComplexLu, CONDITION_CAP};
pub use matrix::{dot, norm2, Matrix};
