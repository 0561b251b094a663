//! Rewriting a maximal interval map until no row reaches the top
//! cross-section except those without ancestors, then peeling that
//! cross-section off.
//!
//! Choices left open by the construction are fixed lexicographically: the
//! walk starts at the smallest member of the X-set and always moves to the
//! smallest qualifying descendant.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::max_size;
use crate::rowform::{check_characterization, x_set, IntervalMap, RowId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizeReport {
    pub steps: usize,
    /// `(x, x')` pairs in the order they were converted.
    pub pairs: Vec<(RowId, RowId)>,
    pub result: IntervalMap,
}

fn require_characterized(m: &IntervalMap) -> Result<()> {
    let report = check_characterization(m)?;
    match report.first_violation() {
        Some(v) => Err(Error::NotCharacterized(v.row.clone())),
        None => Ok(()),
    }
}

/// Lexicographically smallest strict descendant of `row` (other than `skip`)
/// whose segment reaches the top.
fn top_descendant(m: &IntervalMap, row: &RowId, skip: Option<&RowId>) -> Option<RowId> {
    let w_last = m.shape().last();
    m.descendants(row)
        .find(|z| Some(z) != skip && m.get(z).h == w_last)
}

/// Locates rows `x = x' + (1, ..., 1)` with `h(x) = w_d > l(x)` such that no
/// descendant of `x'` other than `x` reaches the top.
pub fn find_pair(m: &IntervalMap) -> Result<(RowId, RowId)> {
    require_characterized(m)?;
    let mut x = x_set(m)?.into_iter().next().ok_or(Error::EmptyXSet)?;
    let w_last = m.shape().last();
    if w_last < 2 {
        return Err(Error::BottomedOut);
    }

    // stage 1: walk up through top-reaching descendants until the segment is longer than one
    while m.get(&x).l == w_last {
        x = top_descendant(m, &x, None).ok_or_else(|| Error::NotCharacterized(x.clone()))?;
    }
    let mut x_prime = x.diagonal_predecessor().expect("x has ancestors");

    // stage 2: re-anchor while x' has another top-reaching descendant
    while let Some(z) = top_descendant(m, &x_prime, Some(&x)) {
        x_prime = z
            .diagonal_predecessor()
            .expect("descendant of x' has ancestors");
        x = z;
    }
    Ok((x, x_prime))
}

fn apply_pair(m: &IntervalMap, (x, x_prime): &(RowId, RowId)) -> IntervalMap {
    let w_last = m.shape().last();
    let mut next = m.clone();
    next.get_mut(x).h = w_last - 1;
    next.get_mut(x_prime).l = w_last - 1;
    next
}

/// One conversion: lowers `h(x)` and `l(x')` to `w_d - 1` for the pair from [`find_pair`].
pub fn convert_step(m: &IntervalMap) -> Result<IntervalMap> {
    let pair = find_pair(m)?;
    Ok(apply_pair(m, &pair))
}

/// Same as [`convert_step`], also returning the pair that was used.
pub fn convert_step_traced(m: &IntervalMap) -> Result<(IntervalMap, (RowId, RowId))> {
    let pair = find_pair(m)?;
    Ok((apply_pair(m, &pair), pair))
}

/// Applies [`convert_step`] until the X-set is empty.
pub fn normalize(m: &IntervalMap) -> Result<NormalizeReport> {
    require_characterized(m)?;
    let budget = x_set(m)?.len();
    let mut current = m.clone();
    let mut pairs: Vec<(RowId, RowId)> = Vec::with_capacity(budget);
    while !x_set(&current)?.is_empty() {
        if pairs.len() == budget {
            // each step removes exactly one row from the X-set
            let (x, _) = pairs
                .last()
                .expect("budget is positive once X is non-empty");
            return Err(Error::NotCharacterized(x.clone()));
        }
        let pair = find_pair(&current)?;
        current = apply_pair(&current, &pair);
        pairs.push(pair);
    }
    Ok(NormalizeReport {
        steps: pairs.len(),
        pairs,
        result: current,
    })
}

/// Removes the top cross-section of a normalized map.
pub fn peel(m: &IntervalMap) -> Result<IntervalMap> {
    let shape = m.shape();
    if shape.d() < 2 {
        return Err(Error::PreconditionViolated("peel needs d >= 2".into()));
    }
    if shape.last() == 1 {
        return Err(Error::BottomedOut);
    }
    require_characterized(m)?;
    if !x_set(m)?.is_empty() {
        return Err(Error::XSetNonEmpty);
    }
    let w_last = shape.last();
    let peeled_shape = shape.with_last(w_last - 1)?;
    let mut rows = Vec::with_capacity(m.row_count());
    for (row, mut iv) in m.rows() {
        if row.has_no_ancestors() {
            iv.h -= 1;
            if iv.h < iv.l {
                return Err(Error::NotCharacterized(row));
            }
        }
        rows.push((row, iv));
    }
    IntervalMap::new(peeled_shape, rows)
}

/// One level of [`telescope`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeelLevel {
    /// Last extent before peeling.
    pub w_last: u32,
    pub normalize_steps: usize,
    pub weight_before: u64,
    pub weight_after: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Telescope {
    pub levels: Vec<PeelLevel>,
    /// The map once the last extent reaches 1.
    pub base: IntervalMap,
}

/// Normalizes and peels repeatedly until the last extent reaches 1.
pub fn telescope(m: &IntervalMap) -> Result<Telescope> {
    let mut current = m.clone();
    let mut levels = Vec::new();
    while current.shape().last() > 1 {
        let report = normalize(&current)?;
        let peeled = peel(&report.result)?;
        levels.push(PeelLevel {
            w_last: current.shape().last(),
            normalize_steps: report.steps,
            weight_before: report.result.weight(),
            weight_after: peeled.weight(),
        });
        current = peeled;
    }
    Ok(Telescope {
        levels,
        base: current,
    })
}

/// Weight lost by every peel: the number of rows without ancestors.
pub fn peel_loss(m: &IntervalMap) -> Result<u64> {
    match m.shape().without_last() {
        Some(rows) => max_size(&rows),
        None => Err(Error::PreconditionViolated("peel needs d >= 2".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Shape;
    use crate::rowform::Interval;

    fn map(dims: &[u32], rows: &[(&[u32], u32, u32)]) -> IntervalMap {
        IntervalMap::new(
            Shape::new(dims.to_vec()).unwrap(),
            rows.iter()
                .map(|(x, l, h)| (RowId::new(x.to_vec()), Interval::new(*l, *h))),
        )
        .unwrap()
    }

    fn r(x: &[u32]) -> RowId {
        RowId::new(x.to_vec())
    }

    fn worked() -> IntervalMap {
        map(&[3, 3], &[(&[1], 3, 3), (&[2], 3, 3), (&[3], 1, 3)])
    }

    #[test]
    fn find_pair_examples() {
        assert_eq!(
            find_pair(&map(&[2, 2], &[(&[1], 2, 2), (&[2], 1, 2)])).unwrap(),
            (r(&[2]), r(&[1]))
        );
        assert_eq!(find_pair(&worked()).unwrap(), (r(&[3]), r(&[2])));
        assert_eq!(
            find_pair(&map(&[2, 2], &[(&[1], 1, 2), (&[2], 1, 1)])),
            Err(Error::EmptyXSet)
        );
    }

    #[test]
    fn find_pair_rejects_uncharacterized_input() {
        let bad = map(&[2, 2], &[(&[1], 1, 2), (&[2], 1, 2)]);
        assert_eq!(find_pair(&bad), Err(Error::NotCharacterized(r(&[1]))));
    }

    #[test]
    fn convert_step_examples() {
        let out = convert_step(&map(&[2, 2], &[(&[1], 2, 2), (&[2], 1, 2)])).unwrap();
        assert_eq!(out, map(&[2, 2], &[(&[1], 1, 2), (&[2], 1, 1)]));

        let out = convert_step(&worked()).unwrap();
        assert_eq!(
            out,
            map(&[3, 3], &[(&[1], 3, 3), (&[2], 2, 3), (&[3], 1, 2)])
        );
        assert_eq!(out.weight(), 5);

        assert_eq!(
            convert_step(&map(&[2, 2], &[(&[1], 1, 2), (&[2], 1, 1)])),
            Err(Error::EmptyXSet)
        );
    }

    #[test]
    fn normalize_examples() {
        let report = normalize(&worked()).unwrap();
        assert_eq!(report.steps, 2);
        assert_eq!(report.pairs, vec![(r(&[3]), r(&[2])), (r(&[2]), r(&[1]))]);
        assert_eq!(
            report.result,
            map(&[3, 3], &[(&[1], 2, 3), (&[2], 2, 2), (&[3], 1, 2)])
        );

        let settled = map(&[2, 2], &[(&[1], 1, 2), (&[2], 1, 1)]);
        let report = normalize(&settled).unwrap();
        assert_eq!(report.steps, 0);
        assert_eq!(report.result, settled);
    }

    #[test]
    fn normalize_report_json() {
        let text = serde_json::to_string(&normalize(&worked()).unwrap()).unwrap();
        assert!(text.starts_with(
            r#"{"steps":2,"pairs":[[[3],[2]],[[2],[1]]],"result":{"w":[3,3],"rows":"#
        ));
    }

    #[test]
    fn normalize_cannot_clear_a_flat_top() {
        // w_d = 1: every row reaches the top, so rows with ancestors stay in X
        let flat = map(&[2, 1], &[(&[1], 1, 1), (&[2], 1, 1)]);
        assert_eq!(x_set(&flat).unwrap(), vec![r(&[2])]);
        assert_eq!(normalize(&flat), Err(Error::BottomedOut));
    }

    #[test]
    fn peel_examples() {
        let normalized = map(&[3, 3], &[(&[1], 2, 3), (&[2], 2, 2), (&[3], 1, 2)]);
        let out = peel(&normalized).unwrap();
        assert_eq!(
            out,
            map(&[3, 2], &[(&[1], 2, 2), (&[2], 2, 2), (&[3], 1, 2)])
        );
        assert_eq!(normalized.weight() - out.weight(), 3 - 2);
        assert_eq!(out.weight(), 6 - 2);

        let out = peel(&map(&[2, 2], &[(&[1], 1, 2), (&[2], 1, 1)])).unwrap();
        assert_eq!(out, map(&[2, 1], &[(&[1], 1, 1), (&[2], 1, 1)]));
        assert_eq!(out.weight(), 2);

        assert_eq!(peel(&worked()), Err(Error::XSetNonEmpty));
        assert_eq!(
            peel(&map(&[2, 1], &[(&[1], 1, 1), (&[2], 1, 1)])),
            Err(Error::BottomedOut)
        );
    }

    #[test]
    fn telescope_sums_to_max_size() {
        let t = telescope(&worked()).unwrap();
        assert_eq!(t.levels.len(), 2);
        for level in &t.levels {
            assert_eq!(level.weight_before - level.weight_after, 1);
        }
        assert_eq!(t.base.weight(), 3);
        assert_eq!(peel_loss(&worked()).unwrap(), 1);
    }
}
