//! Exact constructions of positive-upper-density sets, their pinned distance
//! sets, and certificates for the density inequalities relating the two.
//!
//! * [`exact`] holds the scalar layer: rationals, quadratic surds and powers of `π`.
//! * [`geometry`] computes point-to-primitive distance ranges and interval unions.
//! * [`constructions`] generates the inflating-box and thin-annulus families.
//! * [`measure`] evaluates ball-intersection volumes, density profiles and the
//!   Monte Carlo oracle.
//! * [`verify`] turns all of the above into [`verify::VerificationReport`]s.

pub mod constructions;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod io;
pub mod measure;
pub mod verify;

pub use error::{Error, Result};
