//! Exact enumeration of maximal antichains by depth-first search.
//!
//! Cells are visited in lexicographic order and each is either taken or
//! skipped, taking first. A skipped cell must end up comparable to something
//! taken, so a branch dies as soon as some skipped cell has no comparable
//! cell left that could still be taken. Taking before skipping emits the
//! grids in ascending order of their sorted cell lists, so the output is
//! canonical without a final sort.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{addition_contains, contains_forbidden, Cell, DenseOrder, Grid, Shape};

pub const DEFAULT_CELL_LIMIT: u64 = 25;

#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    /// Largest number of grids kept in a report.
    pub cap: usize,
    /// Largest shape accepted, in cells. Never above 64.
    pub cell_limit: u64,
    /// Worker threads; 1 runs on the calling thread.
    pub threads: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            cap: usize::MAX,
            cell_limit: DEFAULT_CELL_LIMIT,
            threads: 1,
        }
    }
}

impl EnumerateOptions {
    pub fn with_cap(cap: usize) -> Self {
        EnumerateOptions {
            cap,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationReport {
    #[serde(rename = "w")]
    pub shape: Shape,
    pub count: u64,
    pub truncated: bool,
    pub grids: Vec<Grid>,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    index: usize,
    chosen: u64,
    blocked: u64,
    // skipped while still addable; each must be covered by the end
    pending: u64,
}

struct Search<'a> {
    order: &'a DenseOrder,
    n: usize,
    all: u64,
}

impl<'a> Search<'a> {
    fn new(order: &'a DenseOrder) -> Self {
        let n = order.len();
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Search { order, n, all }
    }

    fn feasible(&self, node: &Node) -> bool {
        let before = if node.index >= 64 {
            u64::MAX
        } else {
            (1u64 << node.index) - 1
        };
        let future = self.all & !before & !node.blocked & !node.chosen;
        let mut open = node.pending & !node.blocked;
        while open != 0 {
            let c = open.trailing_zeros() as usize;
            if self.order.comparable(c) & future == 0 {
                return false;
            }
            open &= open - 1;
        }
        true
    }

    /// Children in take-then-skip order.
    fn children(&self, node: &Node) -> [Option<Node>; 2] {
        let bit = 1u64 << node.index;
        let next = node.index + 1;
        if node.blocked & bit != 0 {
            return [
                Some(Node {
                    index: next,
                    ..*node
                }),
                None,
            ];
        }
        let take = Node {
            index: next,
            chosen: node.chosen | bit,
            blocked: node.blocked | self.order.comparable(node.index),
            pending: node.pending,
        };
        let skip = Node {
            index: next,
            pending: node.pending | bit,
            ..*node
        };
        [Some(take), Some(skip)]
    }

    fn walk(&self, node: Node, visit: &mut impl FnMut(u64)) {
        if !self.feasible(&node) {
            return;
        }
        if node.index == self.n {
            if node.pending & !node.blocked == 0 {
                visit(node.chosen);
            }
            return;
        }
        for child in self.children(&node).into_iter().flatten() {
            self.walk(child, visit);
        }
    }

    /// Frontier nodes at `depth`, in depth-first order.
    fn frontier(&self, depth: usize) -> Vec<Node> {
        let mut layer = vec![Node {
            index: 0,
            chosen: 0,
            blocked: 0,
            pending: 0,
        }];
        for _ in 0..depth.min(self.n) {
            layer = layer
                .iter()
                .filter(|n| self.feasible(n))
                .flat_map(|n| {
                    if n.index == self.n {
                        [Some(*n), None]
                    } else {
                        self.children(n)
                    }
                })
                .flatten()
                .collect();
        }
        layer
    }
}

fn check_limit(shape: &Shape, limit: u64) -> Result<()> {
    let limit = limit.min(DenseOrder::MAX_CELLS);
    if shape.cell_count() > limit {
        return Err(Error::ShapeTooLarge {
            cells: shape.cell_count(),
            limit,
        });
    }
    Ok(())
}

fn mask_to_grid(shape: &Shape, mut mask: u64) -> Grid {
    let mut cells = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        cells.push(shape.cell_at(u64::from(mask.trailing_zeros())));
        mask &= mask - 1;
    }
    Grid::new(shape.clone(), cells).expect("indices lie within the shape")
}

/// Runs the search, returning the total count and the first `cap` masks.
fn search(shape: &Shape, opts: &EnumerateOptions) -> Result<(u64, Vec<u64>)> {
    check_limit(shape, opts.cell_limit)?;
    let order = DenseOrder::new(shape).expect("within the dense limit");
    let search = Search::new(&order);
    let cap = opts.cap;

    let run = |node: Node| {
        let mut count = 0u64;
        let mut kept = Vec::new();
        search.walk(node, &mut |mask| {
            count += 1;
            if kept.len() < cap {
                kept.push(mask);
            }
        });
        (count, kept)
    };

    let parts: Vec<(u64, Vec<u64>)> = if opts.threads <= 1 {
        vec![run(Node {
            index: 0,
            chosen: 0,
            blocked: 0,
            pending: 0,
        })]
    } else {
        let depth = (opts.threads * 4).next_power_of_two().trailing_zeros() as usize;
        let frontier = search.frontier(depth);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::PreconditionViolated(e.to_string()))?;
        pool.install(|| frontier.into_par_iter().map(run).collect())
    };

    let mut total = 0u64;
    let mut kept = Vec::new();
    for (count, masks) in parts {
        total += count;
        kept.extend(masks.into_iter().take(cap.saturating_sub(kept.len())));
    }
    Ok((total, kept))
}

pub fn enumerate_maximal(shape: &Shape, cap: usize) -> Result<EnumerationReport> {
    enumerate_maximal_with(shape, &EnumerateOptions::with_cap(cap))
}

/// Every maximal grid of `shape` once, in canonical order.
pub fn enumerate_maximal_with(shape: &Shape, opts: &EnumerateOptions) -> Result<EnumerationReport> {
    let (count, masks) = search(shape, opts)?;
    let grids: Vec<Grid> = masks.into_iter().map(|m| mask_to_grid(shape, m)).collect();
    Ok(EnumerationReport {
        shape: shape.clone(),
        count,
        truncated: count > grids.len() as u64,
        grids,
    })
}

/// `|R(w)|` without materializing any grid.
pub fn count_maximal(shape: &Shape) -> Result<u64> {
    count_maximal_with(shape, &EnumerateOptions::default())
}

pub fn count_maximal_with(shape: &Shape, opts: &EnumerateOptions) -> Result<u64> {
    let opts = EnumerateOptions {
        cap: 0,
        ..opts.clone()
    };
    Ok(search(shape, &opts)?.0)
}

/// All cells of `shape` in lexicographic order.
pub fn lex_order(shape: &Shape) -> Vec<Cell> {
    shape.cells().collect()
}

/// Greedily adds cells in `order`, skipping any that would create containment.
///
/// Cells missing from `order` are tried afterwards in lexicographic order, so
/// the result is always maximal.
pub fn complete_to_maximal(g: &Grid, order: &[Cell]) -> Result<Grid> {
    if contains_forbidden(g) {
        return Err(Error::AlreadyContains);
    }
    let shape = g.shape();
    for cell in order {
        shape.check_cell(cell)?;
    }
    let mut current = g.clone();
    for cell in order.iter().cloned().chain(shape.cells()) {
        if !current.is_one(&cell) && !addition_contains(&current, &cell) {
            current.insert(cell)?;
        }
    }
    Ok(current)
}

/// Greedy completion of the empty grid along a seeded shuffle of the cells.
pub fn random_maximal(shape: &Shape, seed: u64) -> Grid {
    let mut order = lex_order(shape);
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    complete_to_maximal(&Grid::empty(shape.clone()), &order).expect("empty grid avoids the pattern")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{is_maximal, max_size};

    fn shape(dims: &[u32]) -> Shape {
        Shape::new(dims.to_vec()).unwrap()
    }

    fn grid(dims: &[u32], ones: &[&[u32]]) -> Grid {
        Grid::new(shape(dims), ones.iter().map(|c| Cell::new(c.to_vec()))).unwrap()
    }

    /// Filters every subset of the box through `is_maximal`.
    fn subset_oracle(s: &Shape) -> Vec<Grid> {
        let cells = lex_order(s);
        let mut out: Vec<Grid> = (0u64..1 << cells.len())
            .map(|mask| {
                let ones = cells
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, c)| c.clone());
                Grid::new(s.clone(), ones).unwrap()
            })
            .filter(is_maximal)
            .collect();
        out.sort();
        out
    }

    #[test]
    fn two_by_two() {
        let report = enumerate_maximal(&shape(&[2, 2]), 10).unwrap();
        assert_eq!(report.count, 2);
        assert!(!report.truncated);
        assert_eq!(
            report.grids,
            vec![
                grid(&[2, 2], &[&[1, 1], &[1, 2], &[2, 1]]),
                grid(&[2, 2], &[&[1, 2], &[2, 1], &[2, 2]])
            ]
        );
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_maximal(&shape(&[2, 3]), 10).unwrap().count, 3);
        assert_eq!(enumerate_maximal(&shape(&[2, 2, 2]), 10).unwrap().count, 2);
        assert_eq!(count_maximal(&shape(&[3, 3])).unwrap(), 6);
        assert_eq!(count_maximal(&shape(&[7])).unwrap(), 7);
        assert_eq!(count_maximal(&shape(&[1, 4])).unwrap(), 1);
    }

    #[test]
    fn matches_subset_oracle() {
        for dims in [&[2, 3][..], &[3, 3], &[2, 2, 2], &[1, 3, 2], &[4], &[3, 1]] {
            let s = shape(dims);
            assert_eq!(
                enumerate_maximal(&s, usize::MAX).unwrap().grids,
                subset_oracle(&s),
                "{s}"
            );
        }
    }

    #[test]
    fn truncation_keeps_the_smallest() {
        let full = enumerate_maximal(&shape(&[3, 3]), usize::MAX).unwrap();
        let cut = enumerate_maximal(&shape(&[3, 3]), 4).unwrap();
        assert!(cut.truncated);
        assert_eq!(cut.count, 6);
        assert_eq!(cut.grids, full.grids[..4]);
    }

    #[test]
    fn too_large() {
        assert!(matches!(
            count_maximal(&shape(&[6, 5])),
            Err(Error::ShapeTooLarge { cells: 30, .. })
        ));
        let opts = EnumerateOptions {
            cell_limit: 1000,
            ..Default::default()
        };
        assert!(matches!(
            count_maximal_with(&shape(&[9, 9]), &opts),
            Err(Error::ShapeTooLarge { limit: 64, .. })
        ));
    }

    #[test]
    fn parallel_is_identical() {
        for dims in [&[4, 4][..], &[3, 2, 2], &[5], &[1, 1]] {
            let s = shape(dims);
            let seq = enumerate_maximal(&s, usize::MAX).unwrap();
            for threads in [2, 3, 8] {
                let opts = EnumerateOptions {
                    threads,
                    ..Default::default()
                };
                assert_eq!(enumerate_maximal_with(&s, &opts).unwrap(), seq);
            }
        }
    }

    #[test]
    fn output_is_strictly_ascending() {
        let report = enumerate_maximal(&shape(&[3, 4]), usize::MAX).unwrap();
        assert!(report.grids.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn complete_examples() {
        let s = shape(&[2, 2]);
        let empty = Grid::empty(s.clone());
        assert_eq!(
            complete_to_maximal(&empty, &lex_order(&s)).unwrap(),
            grid(&[2, 2], &[&[1, 1], &[1, 2], &[2, 1]])
        );
        let seeded = grid(&[2, 2], &[&[2, 2]]);
        assert_eq!(
            complete_to_maximal(&seeded, &lex_order(&s)).unwrap(),
            grid(&[2, 2], &[&[1, 2], &[2, 1], &[2, 2]])
        );
        let done = grid(&[2, 2], &[&[1, 2], &[2, 1], &[2, 2]]);
        let mut rev = lex_order(&s);
        rev.reverse();
        assert_eq!(complete_to_maximal(&done, &rev).unwrap(), done);
        assert_eq!(
            complete_to_maximal(&grid(&[2, 2], &[&[1, 1], &[2, 2]]), &[]),
            Err(Error::AlreadyContains)
        );
    }

    #[test]
    fn random_examples() {
        let s = shape(&[2, 2]);
        let both = enumerate_maximal(&s, 10).unwrap().grids;
        for seed in 0..20 {
            assert!(both.contains(&random_maximal(&s, seed)));
        }
        assert_eq!(
            random_maximal(&shape(&[1, 5]), 9),
            Grid::full(shape(&[1, 5]))
        );
        let s = shape(&[3, 3]);
        for seed in 0..100 {
            let g = random_maximal(&s, seed);
            assert!(is_maximal(&g));
            assert_eq!(g.weight(), max_size(&s).unwrap());
            assert_eq!(random_maximal(&s, seed), g);
        }
    }
}
