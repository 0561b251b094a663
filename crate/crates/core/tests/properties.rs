use antichain_box::enumerate::{complete_to_maximal, lex_order};
use antichain_box::rowform::{from_intervals, to_intervals};
use antichain_box::{contains_forbidden, is_maximal, max_size, strictly_below, Cell, Grid, Shape};
use proptest::prelude::*;

fn arb_shape() -> impl Strategy<Value = Shape> {
    prop::collection::vec(1u32..=4, 1..=4).prop_map(|dims| Shape::new(dims).unwrap())
}

fn arb_cell(s: &Shape) -> impl Strategy<Value = Cell> {
    s.dims()
        .iter()
        .map(|&w| 1..=w)
        .collect::<Vec<_>>()
        .prop_map(Cell::new)
}

fn arb_grid() -> impl Strategy<Value = Grid> {
    arb_shape().prop_flat_map(|s| {
        let n = s.cell_count() as usize;
        prop::collection::vec(any::<bool>(), n).prop_map(move |bits| {
            let ones = s.cells().zip(bits).filter(|(_, b)| *b).map(|(c, _)| c);
            Grid::new(s.clone(), ones).unwrap()
        })
    })
}

/// Grids whose every row is a non-empty contiguous run along the last axis.
fn arb_row_contiguous() -> impl Strategy<Value = Grid> {
    prop::collection::vec(1u32..=4, 2..=4).prop_flat_map(|dims| {
        let s = Shape::new(dims).unwrap();
        let w = s.last();
        let rows = (s.cell_count() / u64::from(w)) as usize;
        prop::collection::vec((1..=w, 1..=w), rows).prop_map(move |ends| {
            let ones = s.cells().filter(|c| {
                let coords = c.coords();
                let (prefix, y) = coords.split_at(coords.len() - 1);
                let row = s
                    .without_last()
                    .unwrap()
                    .index_of(&Cell::new(prefix.to_vec())) as usize;
                let (a, b) = ends[row];
                (a.min(b)..=a.max(b)).contains(&y[0])
            });
            Grid::new(s.clone(), ones.collect::<Vec<_>>()).unwrap()
        })
    })
}

fn arb_cell_pair() -> impl Strategy<Value = (Cell, Cell)> {
    arb_shape().prop_flat_map(|s| (arb_cell(&s), arb_cell(&s)))
}

proptest! {
    #[test]
    fn order_is_irreflexive_and_antisymmetric((a, b) in arb_cell_pair()) {
        prop_assert!(!strictly_below(&a, &a).unwrap());
        prop_assert!(!(strictly_below(&a, &b).unwrap() && strictly_below(&b, &a).unwrap()));
    }

    #[test]
    fn removing_ones_keeps_avoidance(g in arb_grid(), drop in any::<prop::sample::Index>()) {
        if !contains_forbidden(&g) && g.weight() > 0 {
            let victim = g.ones().nth(drop.index(g.weight() as usize)).unwrap().clone();
            let mut smaller = g.clone();
            smaller.remove(&victim);
            prop_assert!(!contains_forbidden(&smaller));
        }
    }

    #[test]
    fn interval_round_trip(g in arb_row_contiguous()) {
        let m = to_intervals(&g).unwrap();
        prop_assert_eq!(m.weight(), g.weight());
        prop_assert_eq!(from_intervals(&m), g);
    }

    #[test]
    fn completion_is_maximal_with_full_weight(g in arb_grid()) {
        if !contains_forbidden(&g) {
            let order = lex_order(g.shape());
            let m = complete_to_maximal(&g, &order).unwrap();
            prop_assert!(is_maximal(&m));
            prop_assert_eq!(m.weight(), max_size(g.shape()).unwrap());
            prop_assert!(g.ones().all(|c| m.is_one(c)));
        }
    }

    #[test]
    fn grid_json_round_trip(g in arb_grid()) {
        let text = serde_json::to_string(&g).unwrap();
        prop_assert_eq!(serde_json::from_str::<Grid>(&text).unwrap(), g);
    }
}
