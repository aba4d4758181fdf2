//! Order-thresholding test statistics for sparse-signal detection.
//!
//! The core statistic sums the `k` largest squared observations of a
//! sequence and compares it against calibrated normal or scaled chi-square
//! references. The crate also provides the hard-thresholding and Simes
//! competitors, a one-way HANOVA extension where the number of groups is
//! large, and the deterministic simulation primitives (counter-based RNG,
//! scenario catalog) used by the companion CLI to regenerate the reference
//! tables.
//!
//! The crate is `no_std`-compatible: disable the default `std` feature and
//! enable `libm` to build without the standard library (allocation is still
//! required).

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

mod math;

pub mod calibration;
pub mod hanova;
pub mod rng;
pub mod scenario;
pub mod single;
pub mod special;
pub mod stats;

use core::fmt;

/// Errors produced by the statistical operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(&'static str),
    /// The data admit no meaningful statistic (e.g. zero within-group
    /// variance, so every studentized quantity is undefined).
    DegenerateData(&'static str),
    /// The input layout is not supported (e.g. unbalanced group sizes).
    Unsupported(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::DegenerateData(msg) => write!(f, "degenerate data: {msg}"),
            Error::Unsupported(msg) => write!(f, "unsupported input: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    /// Validates that `value` lies in `[0, 1]`.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::Domain("probability must lie in [0, 1]"))
        }
    }

    /// Clamps small floating-point excursions back into `[0, 1]`.
    ///
    /// Used internally where the result is a probability by construction
    /// and only rounding can push it out of range.
    pub(crate) fn clamped(value: f64) -> Self {
        Probability(value.clamp(0.0, 1.0))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
