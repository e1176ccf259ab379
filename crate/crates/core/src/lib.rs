//! Hölder curves through doubling sets, dimension estimates, and the
//! Cantor-type sets that separate lower and upper box dimension.
//!
//! The pipeline runs from a point cloud in the sup-norm plane to a nested
//! chain of greedy covers ([`covering`]), a weighted tree of cover balls
//! ([`covertree`]), and a `1/d`-Hölder parametrization of that tree's Euler
//! tour ([`curve`]). [`cantor`] builds the alternating-phase Cantor sets
//! with exact exponent arithmetic, and [`beta`] measures their flatness
//! with Jones beta numbers.

pub mod beta;
pub mod cantor;
pub mod cli;
pub mod covering;
pub mod covertree;
pub mod curve;
pub mod error;
pub mod exact;
pub mod geometry;
mod grid;

pub use error::{Error, Result};
pub use geometry::{DyadicSquare, Point2};
