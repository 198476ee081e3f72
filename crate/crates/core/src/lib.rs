//! Numerical laboratory for second-order hyperbolic Cauchy problems whose
//! coefficients blow up logarithmically at `t = 0` and grow polynomially in `x`.
//!
//! The crate verifies, at desk scale, the quantitative ingredients of the
//! well-posedness theory for such equations: the weight/metric axioms behind
//! the phase-space calculus, the excision of the time singularity and the
//! logarithmic integral bounds of its majorants, weighted Sobolev norms, the
//! finite-propagation cone with its anisotropic slope, and the oscillator
//! cascade that produces finite or infinite loss of regularity depending on
//! the derivative growth of the propagation speed.
//!
//! Modules mirror those stages:
//!
//! * [`weights`] — weight functions on the line and the axioms they must satisfy
//! * [`phasespace`] — spectral bracket, Planck function, interior/exterior zones
//! * [`coefficients`] — coefficient families and fitted singularity orders
//! * [`excision`] — smooth cutoff, excised symbol, majorants, log-integral bounds
//! * [`sobolev`] — weighted Sobolev norms on a periodic grid
//! * [`solver`] — 1D finite-difference wave solver and cone-of-dependence checks
//! * [`activators`] — oscillatory speed families and loss-of-regularity scans
//! * [`experiments`] — reproducible batch experiments with file outputs

// Guards are written `!(x > 0.0)` on purpose: unlike `x <= 0.0` they also
// reject NaN parameters.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod activators;
pub mod coefficients;
mod error;
pub mod excision;
pub mod experiments;
mod fft;
pub mod numerics;
pub mod phasespace;
pub mod sobolev;
pub mod solver;
pub mod weights;

pub use error::{Error, Result};
