//! Numerics for Laplacians on the punctured space ℝⁿ∖{0}.
//!
//! The crate covers Bessel potentials and Macdonald functions, the
//! singular/regular splitting of functions with an isolated singularity,
//! the point-interaction operators `A_β`, the explicit three-dimensional heat
//! kernel of `A_β`, and Monte Carlo simulation of the heat equation driven by
//! scalar noise at the origin.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ext;
pub mod heatkernel;
pub mod operators;
pub mod quad;
pub mod sobolev;
pub mod spde;
pub mod specfun;

pub use error::{Error, Result};
pub use ext::{Ext, ExtComplex, ExtReal};
pub use num_complex::Complex64;
pub use quad::{DecayBound, QuadResult, QuadratureSpec};
pub use specfun::{KernelValue, Method, Point};
pub use sobolev::{RepresentationCase, SingularDecomposition, SpaceContext};
pub use operators::{EigenPair, PointInteraction};
pub use heatkernel::HeatKernelQuery;
pub use spde::{PathEnsemble, SimulationConfig, WellPosednessReport};
