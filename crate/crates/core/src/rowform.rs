//! Interval form of maximal grids.
//!
//! A d-row is the fiber of the grid along the last axis, addressed by its
//! first `d - 1` coordinates. In a maximal grid every d-row holds a single
//! non-empty segment `[l, h]`, and the segments are pinned down locally by
//!
//! ```text
//! h(x) = min(w_d, l(A(x)))        l(x) = max(1, h(D(x)))
//! ```
//!
//! where `A(x)` / `D(x)` are the rows strictly below / above `x` in all
//! `d - 1` coordinates, `l(∅) = +∞` and `h(∅) = −∞`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BoxIter, Cell, Grid, Shape};

/// Address of a d-row: the first `d - 1` coordinates. Empty for `d = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RowId(pub Vec<u32>);

impl RowId {
    pub fn new(coords: impl Into<Vec<u32>>) -> RowId {
        RowId(coords.into())
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    /// The cell of this row at last coordinate `y`.
    pub fn cell(&self, y: u32) -> Cell {
        let mut coords = self.0.clone();
        coords.push(y);
        Cell(coords)
    }

    /// Whether the ancestor set is empty, i.e. some coordinate equals 1.
    /// The single row of a one-dimensional grid has neither ancestors nor descendants.
    pub fn has_no_ancestors(&self) -> bool {
        self.0.is_empty() || self.0.contains(&1)
    }

    /// The row one step down in every coordinate, if it exists.
    pub fn diagonal_predecessor(&self) -> Option<RowId> {
        if self.has_no_ancestors() {
            return None;
        }
        Some(RowId(self.0.iter().map(|x| x - 1).collect()))
    }
}

impl fmt::Display for RowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "row({})", parts.join(","))
    }
}

/// Integers extended with tagged infinities, ordered `NegInf < Finite(_) < PosInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtInt {
    NegInf,
    Finite(u32),
    PosInf,
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => f.write_str("-inf"),
            ExtInt::Finite(v) => write!(f, "{v}"),
            ExtInt::PosInf => f.write_str("+inf"),
        }
    }
}

impl Serialize for ExtInt {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtInt::Finite(v) => serializer.serialize_u32(*v),
            other => serializer.serialize_str(&other.to_string()),
        }
    }
}

/// The one-segment `[l, h]` of a d-row, `1 <= l <= h <= w_d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub l: u32,
    pub h: u32,
}

impl Interval {
    pub fn new(l: u32, h: u32) -> Interval {
        Interval { l, h }
    }

    /// Number of one-cells, `h - l + 1`.
    pub fn width(&self) -> u64 {
        u64::from(self.h - self.l + 1)
    }
}

/// Total map from d-rows to their intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IntervalMapRepr", into = "IntervalMapRepr")]
pub struct IntervalMap {
    shape: Shape,
    // indexed by the lexicographic position of the row
    intervals: Vec<Interval>,
}

#[derive(Serialize, Deserialize)]
struct RowRepr {
    x: RowId,
    l: u32,
    h: u32,
}

#[derive(Serialize, Deserialize)]
struct IntervalMapRepr {
    w: Shape,
    rows: Vec<RowRepr>,
}

impl TryFrom<IntervalMapRepr> for IntervalMap {
    type Error = Error;

    fn try_from(repr: IntervalMapRepr) -> Result<IntervalMap> {
        IntervalMap::new(
            repr.w,
            repr.rows
                .into_iter()
                .map(|r| (r.x, Interval::new(r.l, r.h))),
        )
    }
}

impl From<IntervalMap> for IntervalMapRepr {
    fn from(map: IntervalMap) -> IntervalMapRepr {
        let rows = map
            .rows()
            .map(|(x, iv)| RowRepr {
                x,
                l: iv.l,
                h: iv.h,
            })
            .collect();
        IntervalMapRepr { w: map.shape, rows }
    }
}

impl IntervalMap {
    /// Builds a map from one entry per row, in any order.
    pub fn new(
        shape: Shape,
        entries: impl IntoIterator<Item = (RowId, Interval)>,
    ) -> Result<IntervalMap> {
        let row_count = (shape.cell_count() / u64::from(shape.last())) as usize;
        let mut slots: Vec<Option<Interval>> = vec![None; row_count];
        for (row, iv) in entries {
            let index = row_index(&shape, &row)?;
            if iv.l < 1 || iv.l > iv.h || iv.h > shape.last() {
                return Err(Error::BadInterval {
                    row,
                    l: iv.l,
                    h: iv.h,
                });
            }
            if slots[index].replace(iv).is_some() {
                return Err(Error::BadRowSet(row));
            }
        }
        let mut intervals = Vec::with_capacity(row_count);
        for (slot, row) in slots.into_iter().zip(row_ids(&shape)) {
            intervals.push(slot.ok_or(Error::BadRowSet(row))?);
        }
        Ok(IntervalMap { shape, intervals })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn row_count(&self) -> usize {
        self.intervals.len()
    }

    pub fn get(&self, row: &RowId) -> Interval {
        self.intervals[row_index(&self.shape, row).expect("row within shape")]
    }

    pub(crate) fn get_mut(&mut self, row: &RowId) -> &mut Interval {
        let index = row_index(&self.shape, row).expect("row within shape");
        &mut self.intervals[index]
    }

    /// Rows and their intervals in lexicographic row order.
    pub fn rows(&self) -> impl Iterator<Item = (RowId, Interval)> + '_ {
        row_ids(&self.shape).zip(self.intervals.iter().copied())
    }

    /// `sum over rows of (h - l + 1)`.
    pub fn weight(&self) -> u64 {
        self.intervals.iter().map(Interval::width).sum()
    }

    /// `(l(A(x)), h(A(x)))`, aggregated over the rows strictly below `row`.
    pub fn ancestor_bounds(&self, row: &RowId) -> (ExtInt, ExtInt) {
        if row.has_no_ancestors() {
            return (ExtInt::PosInf, ExtInt::NegInf);
        }
        let hi: Vec<u32> = row.0.iter().map(|x| x - 1).collect();
        let lo = vec![1; hi.len()];
        self.aggregate(BoxIter::between(lo, &hi))
    }

    /// `(l(D(x)), h(D(x)))`, aggregated over the rows strictly above `row`.
    pub fn descendant_bounds(&self, row: &RowId) -> (ExtInt, ExtInt) {
        let dims = &self.shape.dims()[..self.shape.d() - 1];
        if row.0.is_empty() || row.0.iter().zip(dims).any(|(x, w)| x == w) {
            return (ExtInt::PosInf, ExtInt::NegInf);
        }
        let lo: Vec<u32> = row.0.iter().map(|x| x + 1).collect();
        self.aggregate(BoxIter::between(lo, dims))
    }

    /// Strict descendants of `row`, in lexicographic order.
    pub fn descendants<'a>(&'a self, row: &RowId) -> impl Iterator<Item = RowId> + 'a {
        let dims = &self.shape.dims()[..self.shape.d() - 1];
        let lo: Vec<u32> = row.0.iter().map(|x| x + 1).collect();
        BoxIter::between(lo, dims)
            .filter(|x| !x.is_empty())
            .map(RowId)
    }

    fn aggregate(&self, rows: impl Iterator<Item = Vec<u32>>) -> (ExtInt, ExtInt) {
        rows.fold((ExtInt::PosInf, ExtInt::NegInf), |(l, h), coords| {
            let iv = self.get(&RowId(coords));
            (l.min(ExtInt::Finite(iv.l)), h.max(ExtInt::Finite(iv.h)))
        })
    }
}

/// All d-rows of a shape in lexicographic order.
pub fn row_ids(shape: &Shape) -> impl Iterator<Item = RowId> + '_ {
    BoxIter::new(&shape.dims()[..shape.d() - 1]).map(RowId)
}

fn row_index(shape: &Shape, row: &RowId) -> Result<usize> {
    let dims = &shape.dims()[..shape.d() - 1];
    if row.0.len() != dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            got: row.0.len(),
        });
    }
    if row.0.iter().zip(dims).any(|(&x, &w)| x < 1 || x > w) {
        return Err(Error::BadRowSet(row.clone()));
    }
    Ok(row
        .0
        .iter()
        .zip(dims)
        .fold(0usize, |acc, (&x, &w)| acc * w as usize + (x - 1) as usize))
}

/// Reads off the per-row segments of a grid whose rows are all non-empty and contiguous.
pub fn to_intervals(g: &Grid) -> Result<IntervalMap> {
    let shape = g.shape();
    let w_last = shape.last();
    let mut intervals = Vec::new();
    for row in row_ids(shape) {
        let ys: Vec<u32> = (1..=w_last).filter(|&y| g.is_one(&row.cell(y))).collect();
        let (Some(&l), Some(&h)) = (ys.first(), ys.last()) else {
            return Err(Error::EmptyRow(row));
        };
        if (h - l + 1) as usize != ys.len() {
            return Err(Error::NonContiguousRow(row));
        }
        intervals.push(Interval { l, h });
    }
    Ok(IntervalMap {
        shape: shape.clone(),
        intervals,
    })
}

pub fn from_intervals(m: &IntervalMap) -> Grid {
    let ones = m
        .rows()
        .flat_map(|(row, iv)| (iv.l..=iv.h).map(move |y| row.cell(y)));
    Grid::new(m.shape().clone(), ones).expect("intervals lie within the shape")
}

/// Running `(min l, max h)` over `rows`, with `(+∞, −∞)` for the empty set.
pub fn agg_bounds<'a>(
    rows: impl IntoIterator<Item = &'a RowId>,
    m: &IntervalMap,
) -> (ExtInt, ExtInt) {
    m.aggregate(rows.into_iter().map(|r| r.0.clone()))
}

/// The equation that failed at a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Equation {
    /// `h(x) = min(w_d, l(A(x)))`
    Upper,
    /// `l(x) = max(1, h(D(x)))`
    Lower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub row: RowId,
    pub equation: Equation,
    pub expected: u32,
    pub actual: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Characterization {
    /// Every violation, ordered by row then `Upper` before `Lower`.
    pub violations: Vec<Violation>,
}

impl Characterization {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

fn require_multi_dim(shape: &Shape) -> Result<()> {
    if shape.d() < 2 {
        return Err(Error::PreconditionViolated(
            "interval characterization needs d >= 2".into(),
        ));
    }
    Ok(())
}

/// Checks both local equations at every row. Requires `d >= 2`.
pub fn check_characterization(m: &IntervalMap) -> Result<Characterization> {
    require_multi_dim(m.shape())?;
    let w_last = m.shape().last();
    let mut violations = Vec::new();
    for (row, iv) in m.rows() {
        let (l_anc, _) = m.ancestor_bounds(&row);
        let (_, h_desc) = m.descendant_bounds(&row);
        let upper = finite(ExtInt::Finite(w_last).min(l_anc));
        let lower = finite(ExtInt::Finite(1).max(h_desc));
        if iv.h != upper {
            violations.push(Violation {
                row: row.clone(),
                equation: Equation::Upper,
                expected: upper,
                actual: iv.h,
            });
        }
        if iv.l != lower {
            violations.push(Violation {
                row,
                equation: Equation::Lower,
                expected: lower,
                actual: iv.l,
            });
        }
    }
    Ok(Characterization { violations })
}

fn finite(v: ExtInt) -> u32 {
    match v {
        ExtInt::Finite(v) => v,
        _ => unreachable!("clamped by a finite bound"),
    }
}

/// Rows reaching the top cross-section despite having ancestors. Requires `d >= 2`.
pub fn x_set(m: &IntervalMap) -> Result<Vec<RowId>> {
    require_multi_dim(m.shape())?;
    let w_last = m.shape().last();
    Ok(m.rows()
        .filter(|(row, iv)| iv.h == w_last && !row.has_no_ancestors())
        .map(|(row, _)| row)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(dims: &[u32]) -> Shape {
        Shape::new(dims.to_vec()).unwrap()
    }

    fn map(dims: &[u32], rows: &[(&[u32], u32, u32)]) -> IntervalMap {
        IntervalMap::new(
            shape(dims),
            rows.iter()
                .map(|(x, l, h)| (RowId::new(x.to_vec()), Interval::new(*l, *h))),
        )
        .unwrap()
    }

    fn grid(dims: &[u32], ones: &[&[u32]]) -> Grid {
        Grid::new(shape(dims), ones.iter().map(|c| Cell::new(c.to_vec()))).unwrap()
    }

    fn r(x: &[u32]) -> RowId {
        RowId::new(x.to_vec())
    }

    #[test]
    fn to_intervals_examples() {
        let m = to_intervals(&grid(&[2, 2], &[&[1, 1], &[1, 2], &[2, 1]])).unwrap();
        assert_eq!(m, map(&[2, 2], &[(&[1], 1, 2), (&[2], 1, 1)]));
        assert_eq!(
            to_intervals(&grid(&[2, 2], &[&[1, 1]])),
            Err(Error::EmptyRow(r(&[2])))
        );
        assert_eq!(
            to_intervals(&grid(&[1, 3], &[&[1, 1], &[1, 3]])),
            Err(Error::NonContiguousRow(r(&[1])))
        );
    }

    #[test]
    fn from_intervals_examples() {
        let g = from_intervals(&map(&[2, 2], &[(&[1], 1, 2), (&[2], 1, 1)]));
        assert_eq!(g, grid(&[2, 2], &[&[1, 1], &[1, 2], &[2, 1]]));

        let one_d = IntervalMap::new(shape(&[5]), [(r(&[]), Interval::new(2, 2))]).unwrap();
        assert_eq!(from_intervals(&one_d), grid(&[5], &[&[2]]));

        let m = map(&[3, 3], &[(&[1], 3, 3), (&[2], 3, 3), (&[3], 1, 3)]);
        assert_eq!(from_intervals(&m).weight(), 5);
        assert_eq!(m.weight(), 5);
    }

    #[test]
    fn interval_map_validation() {
        let s = shape(&[2, 3]);
        let missing = IntervalMap::new(s.clone(), [(r(&[1]), Interval::new(1, 3))]);
        assert_eq!(missing, Err(Error::BadRowSet(r(&[2]))));
        let twice = IntervalMap::new(
            s.clone(),
            [
                (r(&[1]), Interval::new(1, 3)),
                (r(&[1]), Interval::new(1, 1)),
            ],
        );
        assert_eq!(twice, Err(Error::BadRowSet(r(&[1]))));
        let inverted = IntervalMap::new(s.clone(), [(r(&[1]), Interval::new(3, 2))]);
        assert!(matches!(inverted, Err(Error::BadInterval { .. })));
        let high = IntervalMap::new(s, [(r(&[1]), Interval::new(1, 4))]);
        assert!(matches!(high, Err(Error::BadInterval { .. })));
    }

    #[test]
    fn agg_bounds_examples() {
        let m = map(&[2, 2], &[(&[1], 1, 2), (&[2], 1, 1)]);
        assert_eq!(agg_bounds([], &m), (ExtInt::PosInf, ExtInt::NegInf));
        assert_eq!(
            agg_bounds([&r(&[1])], &m),
            (ExtInt::Finite(1), ExtInt::Finite(2))
        );
        let m = map(&[3, 3], &[(&[1], 3, 3), (&[2], 3, 3), (&[3], 1, 3)]);
        assert_eq!(
            agg_bounds([&r(&[1]), &r(&[2])], &m),
            (ExtInt::Finite(3), ExtInt::Finite(3))
        );
    }

    #[test]
    fn sentinels_are_ordered_outside_the_integers() {
        assert!(ExtInt::NegInf < ExtInt::Finite(0));
        assert!(ExtInt::Finite(u32::MAX) < ExtInt::PosInf);
        assert_eq!(ExtInt::Finite(4).min(ExtInt::PosInf), ExtInt::Finite(4));
        assert_eq!(ExtInt::Finite(1).max(ExtInt::NegInf), ExtInt::Finite(1));
    }

    #[test]
    fn ancestor_and_descendant_bounds() {
        let m = map(
            &[3, 3, 3],
            &[
                (&[1, 1], 3, 3),
                (&[1, 2], 3, 3),
                (&[1, 3], 1, 3),
                (&[2, 1], 3, 3),
                (&[2, 2], 2, 3),
                (&[2, 3], 1, 2),
                (&[3, 1], 1, 3),
                (&[3, 2], 1, 2),
                (&[3, 3], 1, 1),
            ],
        );
        assert_eq!(
            m.ancestor_bounds(&r(&[1, 3])),
            (ExtInt::PosInf, ExtInt::NegInf)
        );
        assert_eq!(
            m.ancestor_bounds(&r(&[3, 3])),
            (ExtInt::Finite(2), ExtInt::Finite(3))
        );
        assert_eq!(
            m.descendant_bounds(&r(&[1, 1])),
            (ExtInt::Finite(1), ExtInt::Finite(3))
        );
        assert_eq!(
            m.descendant_bounds(&r(&[2, 3])),
            (ExtInt::PosInf, ExtInt::NegInf)
        );
        let desc: Vec<RowId> = m.descendants(&r(&[1, 1])).collect();
        assert_eq!(desc, vec![r(&[2, 2]), r(&[2, 3]), r(&[3, 2]), r(&[3, 3])]);
    }

    #[test]
    fn characterization_examples() {
        let ok = map(&[2, 2], &[(&[1], 1, 2), (&[2], 1, 1)]);
        assert!(check_characterization(&ok).unwrap().holds());

        let bad = map(&[2, 2], &[(&[1], 1, 2), (&[2], 1, 2)]);
        let report = check_characterization(&bad).unwrap();
        assert!(!report.holds());
        // row(1) fails the lower equation before row(2) fails the upper one
        assert_eq!(
            report.first_violation(),
            Some(&Violation {
                row: r(&[1]),
                equation: Equation::Lower,
                expected: 2,
                actual: 1
            })
        );
        assert!(report.violations.contains(&Violation {
            row: r(&[2]),
            equation: Equation::Upper,
            expected: 1,
            actual: 2
        }));

        let worked = map(&[3, 3], &[(&[1], 3, 3), (&[2], 3, 3), (&[3], 1, 3)]);
        assert!(check_characterization(&worked).unwrap().holds());
    }

    #[test]
    fn characterization_rejects_one_dimension() {
        let one_d = IntervalMap::new(shape(&[4]), [(r(&[]), Interval::new(2, 2))]).unwrap();
        assert!(matches!(
            check_characterization(&one_d),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(x_set(&one_d), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn x_set_examples() {
        assert_eq!(
            x_set(&map(&[2, 2], &[(&[1], 2, 2), (&[2], 1, 2)])).unwrap(),
            vec![r(&[2])]
        );
        assert!(x_set(&map(&[2, 2], &[(&[1], 1, 2), (&[2], 1, 1)]))
            .unwrap()
            .is_empty());
        assert_eq!(
            x_set(&map(&[3, 3], &[(&[1], 3, 3), (&[2], 3, 3), (&[3], 1, 3)])).unwrap(),
            vec![r(&[2]), r(&[3])]
        );
    }

    #[test]
    fn interval_map_json_format() {
        let m = map(&[3, 3], &[(&[1], 3, 3), (&[2], 3, 3), (&[3], 1, 3)]);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(
            text,
            r#"{"w":[3,3],"rows":[{"x":[1],"l":3,"h":3},{"x":[2],"l":3,"h":3},{"x":[3],"l":1,"h":3}]}"#
        );
        assert_eq!(serde_json::from_str::<IntervalMap>(&text).unwrap(), m);
    }
}
