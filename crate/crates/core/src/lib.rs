//! Reconciliation of correlated Gaussian variables for continuous-variable
//! quantum key distribution, built around two pieces:
//!
//! * a multidimensional rotation scheme that turns the physical Gaussian
//!   channel into a virtual binary-input AWGN channel (division algebras for
//!   d = 1, 2, 4, 8, constrained Householder chains for arbitrary d), and
//! * low-rate multi-edge LDPC codes decoded by syndrome-based belief
//!   propagation, with puncturing / shortening / repetition for rate tuning.
//!
//! On top of that, [`keyrate`] evaluates asymptotic collective-attack secret
//! key rates for the Gaussian protocol with homodyne detection, and
//! [`reconcile`] runs Monte Carlo frame-error-rate scans.

pub mod algebra;
pub mod channel;
pub mod error;
pub mod keyrate;
pub mod ldpc;
pub mod multidim;
pub mod numerics;
pub mod reconcile;
pub mod rng;

pub use error::{Error, Result};
pub use numerics::{Efficiency, ReferenceChannel, Snr};
