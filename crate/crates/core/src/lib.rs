//! Hermitian structures on almost abelian Lie algebras.
//!
//! Sign convention: for a 1-form `α`, `dα(X, Y) = -α([X, Y])`, extended to
//! higher degrees as a graded derivation. With structure constants
//! `[e_i, e_j] = Σ_k c[i][j][k] e_k` this gives `de^k = -Σ_{i<j} c[i][j][k] e^{ij}`,
//! so the tuple `(f16, f26, 0, ...)` means `df^1 = f^16`, `df^2 = f^26`, and
//! hence `[f_1, f_6] = -f_1`.

pub mod almost_abelian;
pub mod catalog;
pub mod document;
pub mod error;
pub mod exterior;
pub mod hermitian;
pub mod lattice;
pub mod lchk;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod scalar;

pub use almost_abelian::{build_algebra, extract_data, HermitianData};
pub use error::{Error, Result};
pub use exterior::KForm;
pub use hermitian::{ComplexStructure, Connection, HermitianStructure, Metric};
pub use lie::{LieAlgebra, StructureConstants, Subspace};
pub use linalg::{Matrix, Vector};
pub use poly::Poly;
pub use scalar::{Rational, Scalar, ScalarKind};
