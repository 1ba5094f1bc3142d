//! Exact and high-precision computations around multiple polylogarithms at
//! roots of unity: double shuffle and distribution relations, the dihedral Lie
//! coalgebra of `μ_N`, modular complexes with coefficients, their geometric
//! realization by trees, the cyclic-word derivation algebra, and numerical
//! evaluation of multiple polylogarithms.

pub mod combinatorics;
pub mod derivations;
pub mod dihedral;
pub mod formal;
pub mod modular;
pub mod mzvdims;
pub mod numerics;
pub mod qlinalg;
pub mod realization;

pub use formal::FormalSum;
pub use qlinalg::{Rational, SparseMatrixQ};
