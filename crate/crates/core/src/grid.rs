//! Boxes of integer points, the strict dominance order on them, and binary
//! grids viewed as candidate antichains.
//!
//! Coordinates are 1-indexed throughout, including in serialized form.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The range vector `(w_1, ..., w_d)` of a box.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Shape {
    dims: Vec<u32>,
    cells: u64,
}

impl Shape {
    pub fn new(dims: Vec<u32>) -> Result<Shape> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidShape);
        }
        let cells = dims
            .iter()
            .try_fold(1u64, |acc, &w| acc.checked_mul(u64::from(w)))
            .ok_or_else(|| Error::ShapeOverflow(dims.clone()))?;
        Ok(Shape { dims, cells })
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    /// Number of dimensions `d`.
    pub fn d(&self) -> usize {
        self.dims.len()
    }

    pub fn cell_count(&self) -> u64 {
        self.cells
    }

    /// Extent of the last axis, `w_d`.
    pub fn last(&self) -> u32 {
        self.dims[self.dims.len() - 1]
    }

    /// The shape `[w, extra]`.
    pub fn extended(&self, extra: u32) -> Result<Shape> {
        let mut dims = self.dims.clone();
        dims.push(extra);
        Shape::new(dims)
    }

    /// Drops the last axis. `None` for `d = 1`.
    pub fn without_last(&self) -> Option<Shape> {
        if self.d() == 1 {
            return None;
        }
        Shape::new(self.dims[..self.d() - 1].to_vec()).ok()
    }

    /// Same shape with the last extent replaced.
    pub fn with_last(&self, last: u32) -> Result<Shape> {
        let mut dims = self.dims.clone();
        *dims.last_mut().expect("non-empty") = last;
        Shape::new(dims)
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        cell.0.len() == self.d()
            && cell
                .0
                .iter()
                .zip(&self.dims)
                .all(|(&x, &w)| x >= 1 && x <= w)
    }

    pub(crate) fn check_cell(&self, cell: &Cell) -> Result<()> {
        if cell.0.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                got: cell.0.len(),
            });
        }
        if !self.contains(cell) {
            return Err(Error::CellOutOfRange(cell.clone()));
        }
        Ok(())
    }

    /// All cells in ascending lexicographic order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        BoxIter::new(&self.dims).map(Cell)
    }

    /// Position of `cell` in lexicographic order (row-major, last axis fastest).
    pub fn index_of(&self, cell: &Cell) -> u64 {
        cell.0
            .iter()
            .zip(&self.dims)
            .fold(0u64, |acc, (&x, &w)| acc * u64::from(w) + u64::from(x - 1))
    }

    pub fn cell_at(&self, mut index: u64) -> Cell {
        let mut coords = vec![0u32; self.d()];
        for (slot, &w) in coords.iter_mut().zip(&self.dims).rev() {
            *slot = (index % u64::from(w)) as u32 + 1;
            index /= u64::from(w);
        }
        Cell(coords)
    }
}

impl TryFrom<Vec<u32>> for Shape {
    type Error = Error;

    fn try_from(dims: Vec<u32>) -> Result<Shape> {
        Shape::new(dims)
    }
}

impl From<Shape> for Vec<u32> {
    fn from(shape: Shape) -> Vec<u32> {
        shape.dims
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Odometer over the integer box `[1, w_1] x ... x [1, w_k]` in lexicographic
/// order. A box with zero axes yields the empty vector once.
#[derive(Clone, Debug)]
pub(crate) struct BoxIter<'a> {
    dims: &'a [u32],
    next: Option<Vec<u32>>,
}

impl<'a> BoxIter<'a> {
    pub(crate) fn new(dims: &'a [u32]) -> Self {
        let next = if dims.contains(&0) {
            None
        } else {
            Some(vec![1; dims.len()])
        };
        BoxIter { dims, next }
    }

    /// Iterates the sub-box `lo <= x <= hi` (inclusive, componentwise).
    pub(crate) fn between(lo: Vec<u32>, hi: &'a [u32]) -> BoundedBoxIter<'a> {
        let next = if lo.iter().zip(hi).any(|(a, b)| a > b) {
            None
        } else {
            Some(lo.clone())
        };
        BoundedBoxIter { lo, hi, next }
    }
}

impl Iterator for BoxIter<'_> {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            if succ[i] < self.dims[i] {
                succ[i] += 1;
                self.next = Some(succ);
                return Some(current);
            }
            succ[i] = 1;
        }
        Some(current)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct BoundedBoxIter<'a> {
    lo: Vec<u32>,
    hi: &'a [u32],
    next: Option<Vec<u32>>,
}

impl Iterator for BoundedBoxIter<'_> {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            if succ[i] < self.hi[i] {
                succ[i] += 1;
                self.next = Some(succ);
                return Some(current);
            }
            succ[i] = self.lo[i];
        }
        Some(current)
    }
}

/// One lattice point of a box.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cell(pub Vec<u32>);

impl Cell {
    pub fn new(coords: impl Into<Vec<u32>>) -> Cell {
        Cell(coords.into())
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn d(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<u32>> for Cell {
    fn from(coords: Vec<u32>) -> Cell {
        Cell(coords)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `a < b` in every coordinate.
pub fn strictly_below(a: &Cell, b: &Cell) -> Result<bool> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch {
            expected: a.d(),
            got: b.d(),
        });
    }
    Ok(coords_strictly_below(&a.0, &b.0))
}

pub(crate) fn coords_strictly_below(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x < y)
}

/// A binary matrix over a box, stored as its sorted set of one-cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    shape: Shape,
    ones: BTreeSet<Cell>,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    w: Shape,
    ones: Vec<Cell>,
}

impl TryFrom<GridRepr> for Grid {
    type Error = Error;

    fn try_from(repr: GridRepr) -> Result<Grid> {
        Grid::new(repr.w, repr.ones)
    }
}

impl From<Grid> for GridRepr {
    fn from(grid: Grid) -> GridRepr {
        GridRepr {
            w: grid.shape,
            ones: grid.ones.into_iter().collect(),
        }
    }
}

impl Grid {
    pub fn new(shape: Shape, ones: impl IntoIterator<Item = Cell>) -> Result<Grid> {
        let mut grid = Grid::empty(shape);
        for cell in ones {
            grid.shape.check_cell(&cell)?;
            if grid.ones.contains(&cell) {
                return Err(Error::DuplicateCell(cell));
            }
            grid.ones.insert(cell);
        }
        Ok(grid)
    }

    pub fn empty(shape: Shape) -> Grid {
        Grid {
            shape,
            ones: BTreeSet::new(),
        }
    }

    /// Every cell of the box set to one.
    pub fn full(shape: Shape) -> Grid {
        let ones = shape.cells().collect();
        Grid { shape, ones }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// One-cells in ascending lexicographic order.
    pub fn ones(&self) -> impl ExactSizeIterator<Item = &Cell> + DoubleEndedIterator + '_ {
        self.ones.iter()
    }

    pub fn is_one(&self, cell: &Cell) -> bool {
        self.ones.contains(cell)
    }

    /// Zero cells in ascending lexicographic order.
    pub fn zeros(&self) -> impl Iterator<Item = Cell> + '_ {
        self.shape.cells().filter(|c| !self.ones.contains(c))
    }

    /// Sets `cell` to one. Returns false if it already was.
    pub fn insert(&mut self, cell: Cell) -> Result<bool> {
        self.shape.check_cell(&cell)?;
        Ok(self.ones.insert(cell))
    }

    pub fn remove(&mut self, cell: &Cell) -> bool {
        self.ones.remove(cell)
    }

    /// Copy of the grid with `cell` added.
    pub fn with(&self, cell: Cell) -> Result<Grid> {
        let mut next = self.clone();
        next.insert(cell)?;
        Ok(next)
    }

    pub fn weight(&self) -> u64 {
        self.ones.len() as u64
    }

    /// Canonical ordering key: the sorted one-cell list.
    pub fn canonical_cmp(&self, other: &Grid) -> std::cmp::Ordering {
        self.shape
            .cmp(&other.shape)
            .then_with(|| self.ones.iter().cmp(other.ones.iter()))
    }
}

impl PartialOrd for Grid {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Grid {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical_cmp(other)
    }
}

/// Whether `cell` is strictly comparable (in either direction) to some one of `g`.
fn comparable_to_some_one(g: &Grid, cell: &Cell) -> bool {
    g.ones
        .iter()
        .any(|p| coords_strictly_below(&p.0, &cell.0) || coords_strictly_below(&cell.0, &p.0))
}

/// Whether `g` 2-contains the identity pattern `I_{2,d}`.
///
/// For `d = 1` any two one-cells count as containment.
pub fn contains_forbidden(g: &Grid) -> bool {
    if g.shape.d() == 1 {
        return g.ones.len() >= 2;
    }
    // lexicographic order means only an earlier cell can be strictly below a later one
    let ones: Vec<&Cell> = g.ones.iter().collect();
    ones.iter().enumerate().any(|(i, p)| {
        ones[i + 1..]
            .iter()
            .any(|q| coords_strictly_below(&p.0, &q.0))
    })
}

/// Whether adding the zero cell `cell` to the 2-avoiding grid `g` makes it 2-contain.
pub(crate) fn addition_contains(g: &Grid, cell: &Cell) -> bool {
    if g.shape.d() == 1 {
        return !g.ones.is_empty();
    }
    comparable_to_some_one(g, cell)
}

pub fn weight(g: &Grid) -> u64 {
    g.weight()
}

/// A 2-avoiding grid in which flipping any zero makes it 2-contain.
pub fn is_maximal(g: &Grid) -> bool {
    !contains_forbidden(g) && g.zeros().all(|c| addition_contains(g, &c))
}

/// `prod w_i - prod (w_i - 1)`, the common size of every maximal antichain.
pub fn max_size(shape: &Shape) -> Result<u64> {
    let total = shape.cell_count();
    let inner = shape
        .dims()
        .iter()
        .try_fold(1u64, |acc, &w| acc.checked_mul(u64::from(w - 1)))
        .ok_or(Error::Overflow)?;
    total.checked_sub(inner).ok_or(Error::Overflow)
}

/// Strict comparability as one bitmask per cell, for boxes of at most 64 cells.
///
/// Bit `j` of `masks[i]` is set iff cells `i` and `j` (lexicographic indices)
/// are strictly comparable. For `d = 1` that is every pair of distinct cells,
/// which matches the 2-contain convention.
#[derive(Clone, Debug)]
pub struct DenseOrder {
    masks: Vec<u64>,
}

impl DenseOrder {
    pub const MAX_CELLS: u64 = 64;

    pub fn new(shape: &Shape) -> Option<DenseOrder> {
        if shape.cell_count() > Self::MAX_CELLS {
            return None;
        }
        let cells: Vec<Cell> = shape.cells().collect();
        let masks = cells
            .iter()
            .map(|a| {
                cells.iter().enumerate().fold(0u64, |mask, (j, b)| {
                    if coords_strictly_below(&a.0, &b.0) || coords_strictly_below(&b.0, &a.0) {
                        mask | (1 << j)
                    } else {
                        mask
                    }
                })
            })
            .collect();
        Some(DenseOrder { masks })
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn comparable(&self, index: usize) -> u64 {
        self.masks[index]
    }

    /// Cells that can still be added to the antichain `ones` without containment.
    pub fn addable(&self, ones: u64) -> u64 {
        let all = if self.masks.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.masks.len()) - 1
        };
        let blocked = self.blocked(ones);
        all & !blocked & !ones
    }

    /// Union of comparability masks over `ones`.
    pub fn blocked(&self, mut ones: u64) -> u64 {
        let mut blocked = 0;
        while ones != 0 {
            let i = ones.trailing_zeros() as usize;
            blocked |= self.masks[i];
            ones &= ones - 1;
        }
        blocked
    }
}
