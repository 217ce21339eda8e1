//! Finsler geometry of matrix manifolds under Schatten norms.
//!
//! The crate covers four spaces: Hermitian matrices `H(n)`, the unitary group
//! `U(n)`, the cone of positive definite matrices `Gl(n)+` and the
//! Grassmannian of orthogonal projections. For each it computes distances and
//! geodesics ([`spaces`]), measures sampled curves ([`curves`]), builds the
//! families of minimal curves for the spectral and trace norms
//! ([`minimal`]) and numerically checks the inequalities that govern them
//! ([`verify`]).

pub mod curves;
pub mod error;
pub mod linalg;
pub mod minimal;
pub mod random;
pub mod spaces;
pub mod verify;

pub use error::{GeoError, Result};
pub use linalg::{CMat, Hermitian, PositiveDefinite, Projection, SchattenIndex, Unitary};
pub use spaces::SpaceTag;
