//! Maximal antichains of integer boxes under strict coordinatewise dominance.
//!
//! A grid over the box `[1, w_1] x ... x [1, w_d]` is an antichain exactly
//! when it avoids the `2 x ... x 2` identity pattern. Every maximal antichain
//! has `prod w_i - prod (w_i - 1)` cells; this crate constructs, checks,
//! normalizes, enumerates and counts them, and simulates the exclusion game
//! whose loser that size determines.

pub mod cli;
pub mod counting;
pub mod enumerate;
pub mod error;
pub mod game;
pub mod grid;
pub mod normalize;
pub mod rowform;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{
    contains_forbidden, is_maximal, max_size, strictly_below, weight, Cell, Grid, Shape,
};
pub use rowform::{IntervalMap, RowId};
