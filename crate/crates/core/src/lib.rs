//! Canonical frames and contact invariants of scalar ODEs
//! `x^(k+1) = F(t, x, .., x^(k))`, `k >= 3`, computed at a point with
//! exact-rational truncated jets.
//!
//! The pipeline is [`problem`] -> [`normalize`] -> [`bundle`] -> [`frame`] ->
//! [`invariants`]; [`analysis`] drives it over sample points and [`report`]
//! renders the result.

pub mod analysis;
pub mod bundle;
pub mod error;
pub mod expr;
pub mod fields;
pub mod frame;
pub mod invariants;
pub mod jets;
pub mod normalize;
pub mod problem;
pub mod rational;
pub mod report;

pub use error::{Error, Result};
