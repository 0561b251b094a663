//! Per-shape cross-check suite behind the `verify` command.
//!
//! Every check compares two independent routes: the enumerated set against
//! the size formula, the interval characterization, the normalization
//! trace, the peel recurrence, the closed-form counts, the `[w, 2]`
//! bijection, a brute-force subset filter, and seeded games.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::counting::{count_2d, count_all_le2, extend_by_two, project_last};
use crate::enumerate::{enumerate_maximal_with, EnumerateOptions};
use crate::error::{Error, Result};
use crate::game::{play_builtin, predict_loser, StrategyKind};
use crate::grid::{is_maximal, max_size, strictly_below, Cell, Grid, Shape};
use crate::normalize::{convert_step_traced, normalize, peel_loss, telescope};
use crate::rowform::{check_characterization, to_intervals, x_set};

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub enumerate: EnumerateOptions,
    /// Non-maximal grids sampled for the characterization check.
    pub non_maximal_samples: usize,
    /// Seeded games per player count.
    pub game_trials: u64,
    /// Largest shape, in cells, handed to the subset filter and the game check.
    pub brute_force_limit: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            enumerate: EnumerateOptions::default(),
            non_maximal_samples: 1000,
            game_trials: 100,
            brute_force_limit: 16,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub w: Shape,
    pub pass: bool,
    pub checks: Vec<Check>,
}

fn check(name: &'static str, outcome: std::result::Result<String, String>) -> Check {
    match outcome {
        Ok(detail) => Check {
            name,
            pass: true,
            detail,
        },
        Err(detail) => Check {
            name,
            pass: false,
            detail,
        },
    }
}

/// Runs every applicable check for `shape`.
pub fn verify_shape(shape: &Shape, opts: &VerifyOptions) -> Result<VerifyReport> {
    let report = enumerate_maximal_with(
        shape,
        &EnumerateOptions {
            cap: usize::MAX,
            ..opts.enumerate.clone()
        },
    )?;
    let grids = &report.grids;
    let mut checks = vec![check("size_law", size_law(shape, grids))];
    if shape.d() >= 2 {
        checks.push(check(
            "characterization",
            characterization(shape, grids, opts),
        ));
        checks.push(check("normalize", normalization(shape, grids)));
        checks.push(check("peel", peel_recurrence(shape, grids)));
    }
    checks.push(check("counting", counting(shape, report.count)));
    if let Some(c) = bijection(shape, grids, opts) {
        checks.push(check("bijection", c));
    }
    if shape.cell_count() <= opts.brute_force_limit {
        checks.push(check("subset_oracle", subset_oracle(shape, grids)));
        checks.push(check("game", game(shape, opts)));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        w: shape.clone(),
        pass,
        checks,
    })
}

fn size_law(shape: &Shape, grids: &[Grid]) -> std::result::Result<String, String> {
    let expected = max_size(shape).map_err(|e| e.to_string())?;
    for g in grids {
        if g.weight() != expected {
            return Err(format!("grid of weight {} != {expected}", g.weight()));
        }
        if !is_maximal(g) {
            return Err("enumerated grid is not maximal".into());
        }
    }
    Ok(format!("{} grids, all of weight {expected}", grids.len()))
}

/// `is_maximal` agrees with "rows are non-empty segments satisfying both equations".
pub fn characterization_agrees(g: &Grid) -> bool {
    let by_intervals = to_intervals(g)
        .ok()
        .and_then(|m| check_characterization(&m).ok())
        .is_some_and(|c| c.holds());
    is_maximal(g) == by_intervals
}

/// Seeded non-maximal grids: random subsets, maximal grids with a cell
/// removed, and maximal grids with extra cells or toggles.
pub fn sample_non_maximal(shape: &Shape, maximal: &[Grid], count: usize, seed: u64) -> Vec<Grid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells: Vec<Cell> = shape.cells().collect();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < count * 50 {
        attempts += 1;
        let g = match rng.gen_range(0..4) {
            0 => {
                let density: f64 = rng.gen();
                let ones = cells.iter().filter(|_| rng.gen_bool(density)).cloned();
                Grid::new(shape.clone(), ones).expect("cells of the shape")
            }
            1 if !maximal.is_empty() => {
                let mut g = maximal[rng.gen_range(0..maximal.len())].clone();
                let ones: Vec<Cell> = g.ones().cloned().collect();
                if let Some(c) = ones.get(rng.gen_range(0..ones.len().max(1))) {
                    g.remove(c);
                }
                g
            }
            2 if !maximal.is_empty() => {
                let mut g = maximal[rng.gen_range(0..maximal.len())].clone();
                let _ = g.insert(cells[rng.gen_range(0..cells.len())].clone());
                g
            }
            _ if !maximal.is_empty() => {
                let mut g = maximal[rng.gen_range(0..maximal.len())].clone();
                for _ in 0..rng.gen_range(1..=3) {
                    let c = &cells[rng.gen_range(0..cells.len())];
                    if !g.remove(c) {
                        let _ = g.insert(c.clone());
                    }
                }
                g
            }
            _ => Grid::empty(shape.clone()),
        };
        if !is_maximal(&g) {
            out.push(g);
        }
    }
    out
}

fn characterization(
    shape: &Shape,
    grids: &[Grid],
    opts: &VerifyOptions,
) -> std::result::Result<String, String> {
    for g in grids {
        if !characterization_agrees(g) {
            return Err(format!(
                "maximal grid {} fails the interval characterization",
                json(g)
            ));
        }
    }
    let samples = sample_non_maximal(shape, grids, opts.non_maximal_samples, opts.seed);
    if samples.len() < opts.non_maximal_samples {
        return Err(format!("only {} non-maximal samples drawn", samples.len()));
    }
    for g in &samples {
        if !characterization_agrees(g) {
            return Err(format!(
                "non-maximal grid {} passes the interval characterization",
                json(g)
            ));
        }
    }
    Ok(format!(
        "{} maximal and {} non-maximal grids agree",
        grids.len(),
        samples.len()
    ))
}

fn json(g: &Grid) -> String {
    serde_json::to_string(g).unwrap_or_default()
}

/// Steps one map through the full conversion trace, checking every invariant on the way.
pub fn check_normalization_trace(g: &Grid) -> std::result::Result<usize, String> {
    let start = to_intervals(g).map_err(|e| e.to_string())?;
    let weight = start.weight();
    let initial_x = x_set(&start).map_err(|e| e.to_string())?;
    let mut current = start.clone();
    let mut steps = 0;
    loop {
        let before: BTreeSet<_> = x_set(&current)
            .map_err(|e| e.to_string())?
            .into_iter()
            .collect();
        if before.is_empty() {
            break;
        }
        let (next, (x, _)) = convert_step_traced(&current).map_err(|e| e.to_string())?;
        steps += 1;
        if next.weight() != weight {
            return Err(format!("weight changed at step {steps}"));
        }
        if !check_characterization(&next)
            .map_err(|e| e.to_string())?
            .holds()
        {
            return Err(format!("characterization broken at step {steps}"));
        }
        let after: BTreeSet<_> = x_set(&next)
            .map_err(|e| e.to_string())?
            .into_iter()
            .collect();
        let mut expected = before.clone();
        expected.remove(&x);
        if after != expected || !before.contains(&x) {
            return Err(format!(
                "step {steps} did not remove exactly {x} from the X-set"
            ));
        }
        if steps > initial_x.len() {
            return Err("more steps than X-set members".into());
        }
        current = next;
    }
    if steps != initial_x.len() {
        return Err(format!("{steps} steps for an X-set of {}", initial_x.len()));
    }
    let report = normalize(&start).map_err(|e| e.to_string())?;
    if report.steps != steps || report.result != current {
        return Err("normalize disagrees with the stepwise trace".into());
    }
    Ok(steps)
}

fn normalization(shape: &Shape, grids: &[Grid]) -> std::result::Result<String, String> {
    if shape.last() == 1 {
        // every row reaches the top, so rows with ancestors can never leave the X-set
        for g in grids {
            let m = to_intervals(g).map_err(|e| e.to_string())?;
            let xs = x_set(&m).map_err(|e| e.to_string())?;
            match normalize(&m) {
                Ok(r) if r.steps == 0 && xs.is_empty() => {}
                Err(Error::BottomedOut) if !xs.is_empty() => {}
                other => return Err(format!("unexpected outcome on a flat shape: {other:?}")),
            }
        }
        return Ok("last extent is 1; nothing to normalize".into());
    }
    let mut total = 0;
    for g in grids {
        total += check_normalization_trace(g).map_err(|e| format!("{}: {e}", json(g)))?;
    }
    Ok(format!("{} grids normalized in {total} steps", grids.len()))
}

fn peel_recurrence(shape: &Shape, grids: &[Grid]) -> std::result::Result<String, String> {
    let base_rows = shape.cell_count() / u64::from(shape.last());
    for g in grids {
        let m = to_intervals(g).map_err(|e| e.to_string())?;
        let loss = peel_loss(&m).map_err(|e| e.to_string())?;
        let t = telescope(&m).map_err(|e| format!("{}: {e}", json(g)))?;
        for level in &t.levels {
            if level.weight_before - level.weight_after != loss {
                return Err(format!(
                    "peel at w_d = {} lost {}",
                    level.w_last,
                    level.weight_before - level.weight_after
                ));
            }
        }
        if t.base.weight() != base_rows || base_rows + loss * t.levels.len() as u64 != g.weight() {
            return Err("peels do not telescope to the total weight".into());
        }
    }
    Ok(format!("{} grids peeled to the base", grids.len()))
}

fn counting(shape: &Shape, count: u64) -> std::result::Result<String, String> {
    let dims = shape.dims();
    let mut notes = vec![format!("enumerated {count}")];
    if dims.len() == 1 && count != u64::from(dims[0]) {
        return Err(format!("one-dimensional count {count} != {}", dims[0]));
    }
    if dims.len() == 2 {
        let formula = count_2d(dims[0], dims[1]).map_err(|e| e.to_string())?;
        if formula != count {
            return Err(format!("binomial {formula} != enumerated {count}"));
        }
        notes.push(format!("binomial {formula}"));
    }
    if let Ok(formula) = count_all_le2(shape) {
        if formula != count {
            return Err(format!("min extent {formula} != enumerated {count}"));
        }
        notes.push(format!("min extent {formula}"));
    }
    Ok(notes.join(", "))
}

fn bijection(
    shape: &Shape,
    grids: &[Grid],
    opts: &VerifyOptions,
) -> Option<std::result::Result<String, String>> {
    let limit = opts.enumerate.cell_limit;
    let run = || -> std::result::Result<String, String> {
        let mut notes = Vec::new();
        let enumerate = |s: &Shape| {
            enumerate_maximal_with(
                s,
                &EnumerateOptions {
                    cap: usize::MAX,
                    ..opts.enumerate.clone()
                },
            )
            .map_err(|e| e.to_string())
        };
        if shape.cell_count().saturating_mul(2) <= limit {
            let up = enumerate(&shape.extended(2).map_err(|e| e.to_string())?)?;
            let mut lifted = Vec::with_capacity(grids.len());
            for g in grids {
                let m = extend_by_two(g).map_err(|e| e.to_string())?;
                if &project_last(&m).map_err(|e| e.to_string())? != g {
                    return Err("project does not invert extend".into());
                }
                lifted.push(m);
            }
            lifted.sort();
            if lifted != up.grids {
                return Err(format!(
                    "extend image has {} grids, R([w,2]) has {}",
                    lifted.len(),
                    up.count
                ));
            }
            notes.push(format!("R(w) -> R([w,2]) onto {} grids", up.count));
        }
        if shape.d() >= 2 && shape.last() == 2 {
            let base = shape.without_last().expect("d >= 2");
            let down = enumerate(&base)?;
            let mut projected = Vec::with_capacity(grids.len());
            for g in grids {
                let n = project_last(g).map_err(|e| e.to_string())?;
                if &extend_by_two(&n).map_err(|e| e.to_string())? != g {
                    return Err("extend does not invert project".into());
                }
                projected.push(n);
            }
            projected.sort();
            if projected != down.grids {
                return Err(format!(
                    "project image has {} grids, R(w) has {}",
                    projected.len(),
                    down.count
                ));
            }
            notes.push(format!("R(w,2) -> R(w) onto {} grids", down.count));
        }
        Ok(notes.join("; "))
    };
    let applicable =
        shape.cell_count().saturating_mul(2) <= limit || (shape.d() >= 2 && shape.last() == 2);
    applicable.then(run)
}

/// Filters every subset of the box, using a comparability table built here
/// from `strictly_below` and the one-dimensional convention.
pub fn brute_force_maximal(shape: &Shape) -> Vec<Grid> {
    let cells: Vec<Cell> = shape.cells().collect();
    let n = cells.len();
    assert!(n <= 24, "subset filter is limited to small boxes");
    let comparable: Vec<u32> = cells
        .iter()
        .enumerate()
        .map(|(i, a)| {
            (0..n)
                .filter(|&j| {
                    if shape.d() == 1 {
                        j != i
                    } else {
                        let b = &cells[j];
                        strictly_below(a, b).unwrap_or(false)
                            || strictly_below(b, a).unwrap_or(false)
                    }
                })
                .fold(0u32, |m, j| m | 1 << j)
        })
        .collect();
    let mut out = Vec::new();
    for subset in 0u32..(1u32 << n) {
        let maximal = (0..n).all(|i| {
            let hit = comparable[i] & subset != 0;
            if subset >> i & 1 == 1 {
                !hit
            } else {
                hit
            }
        });
        if maximal {
            let ones = (0..n)
                .filter(|i| subset >> i & 1 == 1)
                .map(|i| cells[i].clone());
            out.push(Grid::new(shape.clone(), ones).expect("cells of the shape"));
        }
    }
    out.sort();
    out
}

fn subset_oracle(shape: &Shape, grids: &[Grid]) -> std::result::Result<String, String> {
    let brute = brute_force_maximal(shape);
    if brute.as_slice() != grids {
        return Err(format!(
            "subset filter found {} grids, search found {}",
            brute.len(),
            grids.len()
        ));
    }
    Ok(format!(
        "{} subsets filtered to {} grids",
        1u64 << shape.cell_count(),
        brute.len()
    ))
}

fn game(shape: &Shape, opts: &VerifyOptions) -> std::result::Result<String, String> {
    let size = max_size(shape).map_err(|e| e.to_string())?;
    let mut games = 0;
    for players in [2usize, 3, 5] {
        let predicted = predict_loser(shape, players).map_err(|e| e.to_string())?;
        for trial in 0..opts.game_trials {
            let seed = opts.seed.wrapping_add(trial);
            let t = play_builtin(shape, players, &[StrategyKind::RandomSafe], seed)
                .map_err(|e| e.to_string())?;
            if t.loser != predicted || t.safe_moves_played as u64 != size || t.suicidal {
                return Err(format!(
                    "{players} players, seed {seed}: loser {} after {} safe moves",
                    t.loser, t.safe_moves_played
                ));
            }
            let mut before = t.final_state.board().clone();
            if let Some(c) = &t.terminal_cell {
                before.remove(c);
            }
            if !is_maximal(&before) {
                return Err(format!(
                    "{players} players, seed {seed}: pre-terminal board not maximal"
                ));
            }
            games += 1;
        }
    }
    Ok(format!("{games} games, loser always max_size mod m"))
}
