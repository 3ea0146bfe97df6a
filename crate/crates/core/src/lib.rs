//! Distance ratio, quasihyperbolic, hyperbolic and chordal metrics on
//! Euclidean domains, with a numeric quasihyperbolic solver, a catalog of
//! inequalities checked by sampling, and φ-uniformity profiling.

pub mod bounds;
pub mod closed_form;
pub mod error;
pub mod geometry;
pub mod profiler;
pub mod qh_solver;
pub mod report;
pub mod rng;
pub mod vecmath;

pub use error::{Error, Result};
pub use geometry::{make_domain, Aabb, DomainOracle, DomainSpec, Point};
