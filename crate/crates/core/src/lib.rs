//! Reconstruction of a closed planar boundary from an unordered set of
//! discretization points, and a meshless moving-boundary heat simulation
//! built on top of it.
//!
//! The pipeline is:
//!
//! 1. [`ordering::order_points`] recovers curve-adjacency order with
//!    repeated k-d tree nearest-neighbor queries.
//! 2. [`spline::fit_periodic_cubic`] fits a closed C² cubic through the
//!    ordered points.
//! 3. [`domain::ReconstructedDomain`] projects query points onto the curve
//!    and classifies them as interior or exterior.
//! 4. [`discretize`] places fresh boundary and interior nodes with a graded
//!    spacing.
//!
//! [`rbffd`] supplies RBF-FD Laplacian weights, explicit heat stepping, a
//! Poisson harness and Shepard field transfer; [`sim`] runs the dendrite-like
//! growth loop.

pub mod discretize;
pub mod domain;
pub mod error;
pub mod geometry;
pub mod io;
pub mod ordering;
pub mod rbffd;
pub mod sim;
pub mod spline;

pub use domain::ReconstructedDomain;
pub use error::{Error, Result};
pub use geometry::{NeighborIndex, Point2};
pub use ordering::{order_points, validate_density, DensityReport, OrderedBoundary};
pub use spline::{fit_periodic_cubic, PeriodicSpline};
