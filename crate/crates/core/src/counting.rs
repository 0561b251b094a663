//! Closed-form counts of maximal antichains and the bijection between
//! `R(w)` and `R([w, 2])`.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{coords_strictly_below, is_maximal, Cell, Grid, Shape};
use crate::rowform::{row_ids, RowId};

/// Exact `C(n, k)` by the multiplicative formula, reducing by the gcd at each step.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 1..=k {
        // acc * (n - k + i) / i is an integer; split i between acc and the new factor
        let g = acc.gcd(&i);
        acc /= g;
        let factor = (n - k + i) / (i / g);
        acc = acc.checked_mul(factor).ok_or(Error::Overflow)?;
    }
    Ok(acc)
}

/// `|R([w1, w2])| = C(w1 + w2 - 2, w1 - 1)`.
pub fn count_2d(w1: u32, w2: u32) -> Result<u64> {
    if w1 == 0 || w2 == 0 {
        return Err(Error::PreconditionViolated(
            "extents must be positive".into(),
        ));
    }
    binomial(u64::from(w1) + u64::from(w2) - 2, u64::from(w1) - 1)
}

/// `|R(w)| = min_i w_i` when every extent is at most 2.
pub fn count_all_le2(shape: &Shape) -> Result<u64> {
    if shape.dims().iter().any(|&w| w > 2) {
        return Err(Error::PreconditionViolated(
            "every extent must be at most 2".into(),
        ));
    }
    Ok(u64::from(
        *shape.dims().iter().min().expect("non-empty shape"),
    ))
}

/// Rows of a grid over `[w, 2]` split by which of the two last coordinates they hold.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LastAxisPartition {
    pub s12: Vec<RowId>,
    pub s11: Vec<RowId>,
    pub s22: Vec<RowId>,
}

impl LastAxisPartition {
    pub fn weight(&self) -> u64 {
        (2 * self.s12.len() + self.s11.len() + self.s22.len()) as u64
    }
}

fn require_last_two(shape: &Shape) -> Result<()> {
    if shape.d() < 2 || shape.last() != 2 {
        return Err(Error::PreconditionViolated(
            "expected a shape of the form [w, 2]".into(),
        ));
    }
    Ok(())
}

pub fn partition_last_axis(m: &Grid) -> Result<LastAxisPartition> {
    require_last_two(m.shape())?;
    let mut parts = LastAxisPartition::default();
    for row in row_ids(m.shape()) {
        match (m.is_one(&row.cell(1)), m.is_one(&row.cell(2))) {
            (true, true) => parts.s12.push(row),
            (true, false) => parts.s11.push(row),
            (false, true) => parts.s22.push(row),
            (false, false) => return Err(Error::EmptyRow(row)),
        }
    }
    Ok(parts)
}

/// Lifts a maximal antichain over `w` to one over `[w, 2]`.
///
/// Rows of `n` get both cells; a row above some member of `n` gets the lower
/// cell and a row below some member gets the upper one.
pub fn extend_by_two(n: &Grid) -> Result<Grid> {
    if !is_maximal(n) {
        return Err(Error::NotMaximal);
    }
    let shape = n.shape().extended(2)?;
    let mut ones = Vec::new();
    for x in n.shape().cells() {
        let row = RowId(x.0.clone());
        if n.is_one(&x) {
            ones.push(row.cell(1));
            ones.push(row.cell(2));
            continue;
        }
        let has_ancestor = n.ones().any(|z| coords_strictly_below(&z.0, &x.0));
        let has_descendant = n.ones().any(|z| coords_strictly_below(&x.0, &z.0));
        match (has_ancestor, has_descendant) {
            (true, false) => ones.push(row.cell(1)),
            (false, true) => ones.push(row.cell(2)),
            _ => return Err(Error::InconsistentRow(row)),
        }
    }
    Grid::new(shape, ones)
}

/// The rows of a maximal grid over `[w, 2]` that hold both cells, as a grid over `w`.
pub fn project_last(m: &Grid) -> Result<Grid> {
    require_last_two(m.shape())?;
    if !is_maximal(m) {
        return Err(Error::NotMaximal);
    }
    let base = m.shape().without_last().expect("d >= 2");
    let parts = partition_last_axis(m)?;
    Grid::new(base, parts.s12.into_iter().map(|row| Cell(row.0)))
}
