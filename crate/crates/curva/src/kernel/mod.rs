//! Exact arithmetic substrate: Gaussian rationals, extended naturals,
//! truncated series, bivariate polynomials, resultants and linear algebra.

pub mod bipoly;
pub mod extnat;
pub mod linalg;
pub mod scalar;
pub mod series;
pub mod torus;

pub use bipoly::{implicit_resultant, resultant, BiPoly, VarPoly};
pub use extnat::{fin_vec, vadd, vge, vinf, ExtNat, ValueVec};
pub use linalg::{kernel, rank, solve, Matrix, Solution, Subspace};
pub use scalar::Scalar;
pub use series::{Series, EXACT};
