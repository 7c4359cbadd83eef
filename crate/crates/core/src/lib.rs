//! Exact quantum cohomology D-modules of smooth Fano toric varieties.
//!
//! The pipeline starts from a complete simplicial unimodular fan, builds the
//! charge matrix and the cohomology ring, assembles the truncated Givental
//! series, and then searches for differential operators annihilating it. A
//! finite-dimensional model of the loop space explains the stable ratios.

pub mod cli;
pub mod cohomology;
pub mod dmodule;
pub mod error;
pub mod givental_series;
pub mod linalg;
pub mod loop_model;
pub mod rational;
pub mod toric_geometry;

pub use cohomology::{build_ring, CohomClass, CohomRing};
pub use dmodule::{apply, find_annihilators, gkz_operator, semiclassical, DiffOp, QuantumRelation};
pub use error::{Error, Result};
pub use givental_series::{build_series, euler_ratio, GiventalSeries, LaurentH, SignMode};
pub use rational::Rational;
pub use toric_geometry::{ChargeMatrix, CurveClass, FanData, ToricVariety};
