//! Rotative self-maps of closed real intervals.
//!
//! A map `f` is `(n, a)`-rotative when `|f^n(x) - x| <= a |f(x) - x|` for all
//! `x`, with `0 <= a < n`. On the real line every continuous 2-rotative map has
//! a fixed point; this crate builds such maps, decides rotativity exactly for
//! the affine, three-segment and q-indicator families, estimates it on grids
//! for anything else, finds fixed points with a geometric convergence
//! certificate, tabulates the known bounds on the Lipschitz threshold
//! `gamma(X, n, a)`, and runs seeded falsification campaigns.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod campaign;
pub mod cli;
pub mod error;
pub mod exact;
pub mod fixed_point;
pub mod gamma;
pub mod grid;
pub mod interval;
pub mod json;
pub mod maps;
pub mod rotativity;

pub use error::{Error, Result};
pub use interval::ClosedInterval;
pub use maps::{MapKind, MapSpec, Point};
