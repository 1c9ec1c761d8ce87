//! Loss-landscape analysis for one-hidden-layer ReLU networks on an interval.
//!
//! The crate evaluates risks, generalized gradients and Hessians in closed
//! form, constructs a family of non-global local minima for a benchmark
//! target, enumerates critical realizations of width-one networks against
//! piecewise-polynomial targets, and runs gradient descent / gradient flow.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity, clippy::excessive_precision)]

pub mod enumerate;
pub mod error;
pub mod landscape;
pub mod linalg;
pub mod minima;
pub mod network;
pub mod polyalg;
pub mod quad;
pub mod target;
pub mod train;

pub use error::{Error, Result};
pub use landscape::{classify, CritClass, HessianCoords, HessianReport, Landscape};
pub use network::{Params, Realization, SmoothActivation};
pub use polyalg::{PiecewisePolynomial, Polynomial};
pub use target::{BenchmarkTarget, Target};
