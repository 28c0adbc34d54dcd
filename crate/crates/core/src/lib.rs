//! Numerical core for collinear double-downconversion (CDDC) sources.
//!
//! A single periodically poled crystal pumped at one wavelength can
//! phase-match two type-II processes at once, one through the positive and
//! one through the negative quasi-phase-matching order. When the two
//! processes emit interchangeable wavelength pairs, the photons come out
//! polarisation entangled. This crate evaluates the pieces needed to design
//! and characterise such a source:
//!
//! * [`dispersion`]: temperature dependent Sellmeier models per optical axis,
//!   group index and group delay.
//! * [`phasematch`]: momentum mismatch, poling periods and the sinc-shaped
//!   phase-matching amplitude for either sign of the QPM order.
//! * [`spectra`]: pump envelope, joint spectral amplitude/intensity on a
//!   wavelength grid, marginals, bandwidths, bandpass filtering, process
//!   amplitudes and spectral overlap.
//! * [`search`]: the two-process coincidence solver and curve tracing over
//!   the poling period.
//! * [`entanglement`]: polarisation correlation fringes, visibilities and
//!   the CHSH value of the resulting state.
//! * [`rates`]: pair rate, coupling/heralding efficiency and brightness
//!   arithmetic from measured count rates.
//! * [`source`]: end-to-end characterisation of a configured source.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! all I/O live in the companion `cddc` crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dispersion;
pub mod entanglement;
mod error;
mod math;
pub mod phasematch;
pub mod rates;
pub mod search;
pub mod source;
pub mod spectra;

#[cfg(test)]
pub(crate) mod fixtures;

pub use error::{Error, Result};

/// Speed of light in nm/ps.
pub const C_NM_PER_PS: f64 = 299_792.458;
/// Speed of light in mm/ps.
pub const C_MM_PER_PS: f64 = 0.299_792_458;
