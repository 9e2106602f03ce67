//! Upper-triangular subgroups of PSL(3,ℂ): element classification, layer
//! decomposition, canonical parabolic forms and the catalog of loxodromic
//! extensions.

pub mod cases;
pub mod classify;
pub mod cli;
pub mod error;
pub mod json;
pub mod lattice;
pub mod parabolic;
pub mod proj;
pub mod scalar;
pub mod witness;

pub use error::{Error, Result};
pub use proj::{commutator, conjugate, lambda12, lambda23, pi_proj, proj_eq, shape_of, ProjMatrix, ShapeTag};
pub use scalar::{Scalar, Tol};
