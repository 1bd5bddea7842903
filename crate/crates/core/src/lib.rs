//! A verification lab for hidden-variable no-go theorems.
//!
//! The crate builds and mechanically checks the standard ingredients of the
//! Bell and Kochen–Specker impossibility arguments at desk scale:
//!
//! - [`finprob`] — finite probability spaces, random variables, product
//!   measures, conditioning, and independence tests;
//! - [`quantum`] — closed-form EPR statistics for the photon and spin-one
//!   experiments, each paired with an independent Born-rule oracle;
//! - [`models`] — deterministic and stochastic hidden-variable models, their
//!   predicted and simulated conditional tables, factorization of raw models,
//!   Bell-locality checks, and the derandomization of stochastic kernels;
//! - [`inequalities`] — Boole inequality audits, the violation function
//!   `f(θ) = sin²3θ + sin²2θ − sin²θ` and its scan, and local-polytope
//!   membership by phase-1 linear-program feasibility;
//! - [`kochenspecker`] — orthogonality graphs over ray sets, frame-function
//!   (coloring) search with unit propagation, the Peres 33-ray set, and the
//!   frame-function obstruction pipeline.
//!
//! Every operation is a pure function over immutable values; randomness is
//! confined to the counter-based generator in [`rng`], whose output sequence
//! is part of the reproducibility contract.

pub mod error;
pub mod finprob;
pub mod gen;
pub mod inequalities;
pub mod jsonio;
pub mod kochenspecker;
pub mod models;
pub mod quantum;
pub mod rng;
pub mod tol;

pub use error::{Error, Result};
