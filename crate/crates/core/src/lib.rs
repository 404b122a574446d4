//! Instantaneous bisection of a one-dimensional Dirichlet cavity acting on
//! multimode Gaussian states of a massless scalar field.
//!
//! The crate is split into three layers:
//!
//! * [`modes`]: cavity geometry, mode frequencies, Bogoliubov overlap
//!   coefficients and the truncated quadrature transform.
//! * [`gaussian`]: first moments and covariance matrices, state
//!   constructors, propagation through the transform, reductions and
//!   observables (particle number, logarithmic negativity).
//! * [`experiments`]: closed-form block evaluations for sparse inputs and the
//!   sweep drivers behind the figure data sets.

pub mod error;
pub mod experiments;
pub mod fmt;
pub mod gaussian;
pub mod modes;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, LogBase, ModePair, ValidationReport};
pub use modes::{CavityGeometry, Side, SymplecticTransform, TruncationConfig};
