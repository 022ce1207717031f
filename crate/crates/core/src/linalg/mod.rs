//! Dense linear algebra kernels shared by the spectral and resolvent modules.

pub mod eigen;
pub mod zlu;

pub use eigen::{sym_eigen_full, sym_eigenvalues, EigenError, SymEigen};
pub use zlu::{zmatmul, SingularError, ZLu};
