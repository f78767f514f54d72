//! orbitdeg: dynamical degree brackets, exact rational orbits, Weil heights,
//! and canonical heights for finite families of self-maps.
//!
//! The library is organized bottom-up:
//! - [`rat`]: exact rational scalars and accurate conversions.
//! - [`points`]: canonical projective points and Weil heights.
//! - [`nsr`]: pullback matrices, word semigroups, dynamical degree brackets.
//! - [`wheler`]: quartic surfaces in P^2 x P^2 with exact involutions.
//! - [`pn`]: morphism tuples on P^N given by homogeneous polynomials.
//! - [`degrees`]: orbit expansion, arithmetic degree and canonical height
//!   estimators, and the empirical checks tying them together.
//! - [`config`], [`fixture`], [`report`]: JSON configs, deterministic
//!   fixtures, and the CLI surface.

pub mod config;
pub mod degrees;
pub mod error;
pub mod fixture;
pub mod nsr;
pub mod pn;
pub mod points;
pub mod rat;
pub mod report;
pub mod wheler;

pub use error::{Error, Result};
