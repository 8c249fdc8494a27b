//! Exact symbolic workbench for Lie-Rinehart algebras over Q: cochain
//! cohomology, twisted universal enveloping algebras with PBW normal forms,
//! connections and curvature, Chern character classes, extensions, jet
//! modules, and Cartan-Eilenberg homology, all with exact rational
//! arithmetic.

pub mod error;
pub mod ring;
pub mod parse;
pub mod linalg;
pub mod solve;
pub mod pmatrix;
pub mod lie;
pub mod fixtures;
pub mod cochain;
pub mod extension;
pub mod env;
pub mod curvmod;
pub mod chern;
pub mod jets;
pub mod workspace;
