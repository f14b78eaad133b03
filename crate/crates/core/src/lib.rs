//! Numerical verification of slant, invariant and anti-invariant distributions
//! on submanifolds of flat locally product manifolds ℝⁿ with F = diag(±1).

pub mod corpus;
pub mod expr;
pub mod extrinsic;
pub mod fixtures;
pub mod geometry;
pub mod manifest;
pub mod operators;
pub mod report;
pub mod run;
pub mod tol;
pub mod warped;
