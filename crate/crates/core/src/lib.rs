//! Critical site percolation crossing probabilities on triangular-type
//! lattices, measured by Monte Carlo and compared with the conformal
//! (Cardy–Carleson) prediction.
//!
//! Module map:
//! - [`lattice`]: lattice families, embeddings and the maps between them.
//! - [`domain`]: marked triangles and their discretisation.
//! - [`engine`]: stateless per-site randomness, crossing detection and
//!   estimates with Wilson intervals, including exactly coupled runs.
//! - [`conformal`]: incomplete-beta Schwarz–Christoffel maps and the
//!   predicted limit X.
//! - [`experiment`]: configurable experiments and their CSV/JSON output.

pub mod conformal;
pub mod domain;
pub mod engine;
pub mod experiment;
pub mod geometry;
pub mod lattice;

pub use conformal::{apex_params, cardy_prediction, CardyPrediction};
pub use domain::{classify, standard_triangle, Arc, MarkedTriangle, SiteClassification};
pub use engine::{coupled_estimate, estimate, CrossingEstimate, SamplingPlan};
pub use lattice::{LatticeFamily, LatticeSpec, Site};
