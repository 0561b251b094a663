//! Command-line front end. `run` is the whole program minus process I/O so
//! it can be driven from tests.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::counting::{count_2d, count_all_le2, extend_by_two, project_last};
use crate::enumerate::{
    count_maximal_with, enumerate_maximal_with, EnumerateOptions, EnumerationReport,
    DEFAULT_CELL_LIMIT,
};
use crate::error::Error;
use crate::game::{play_builtin, StrategyKind, Transcript};
use crate::grid::{max_size, Grid, Shape};
use crate::normalize::{normalize, peel, NormalizeReport};
use crate::rowform::{to_intervals, IntervalMap};
use crate::verify::{verify_shape, VerifyOptions, VerifyReport};

#[derive(Debug, Parser)]
#[command(
    name = "antichain-box",
    version,
    about = "Maximal antichains of integer boxes under strict dominance"
)]
struct Cli {
    /// Emit JSON even on a terminal.
    #[arg(long, global = true, conflicts_with = "plain")]
    json: bool,
    /// Emit human-readable text even when piped.
    #[arg(long, global = true)]
    plain: bool,
    /// Worker threads for enumeration.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ShapeArg {
    /// Extents of the box, comma separated, e.g. 3,3.
    #[arg(long = "w", value_parser = parse_shape)]
    w: Shape,
}

#[derive(Debug, Args)]
struct InputArg {
    /// JSON input file; standard input when omitted.
    input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CountMethod {
    Enumerate,
    Formula,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Size shared by every maximal antichain.
    Size(ShapeArg),
    /// Number of maximal antichains.
    Count {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long, value_enum, default_value = "enumerate")]
        method: CountMethod,
        /// Largest box accepted by the search, in cells.
        #[arg(long, default_value_t = DEFAULT_CELL_LIMIT)]
        limit: u64,
    },
    /// List maximal antichains in canonical order.
    Enumerate {
        #[command(flatten)]
        shape: ShapeArg,
        /// Keep at most this many grids.
        #[arg(long, default_value_t = 1000)]
        cap: usize,
        #[arg(long, default_value_t = DEFAULT_CELL_LIMIT)]
        limit: u64,
    },
    /// Run the cross-check suite for one shape; exit 1 on any failure.
    Verify {
        #[command(flatten)]
        shape: ShapeArg,
        /// Non-maximal grids sampled for the characterization check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Games per player count.
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CELL_LIMIT)]
        limit: u64,
    },
    /// Convert a maximal grid's interval form until its X-set is empty.
    Normalize(InputArg),
    /// Remove the top cross-section of a normalized grid or interval map.
    Peel {
        #[command(flatten)]
        input: InputArg,
        /// Normalize the input first.
        #[arg(long)]
        normalize: bool,
    },
    /// Lift a maximal grid over w to one over [w, 2].
    Extend(InputArg),
    /// Project a maximal grid over [w, 2] to one over w.
    Project(InputArg),
    /// Simulate the exclusion game.
    Game {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long, default_value_t = 2)]
        players: usize,
        /// One strategy for everyone, or one per player: lex, random.
        #[arg(long, value_delimiter = ',', default_value = "lex")]
        strategy: Vec<StrategyKind>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_shape(s: &str) -> Result<Shape, String> {
    let dims = s
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|e| format!("`{part}`: {e}"))
        })
        .collect::<Result<Vec<u32>, String>>()?;
    Shape::new(dims).map_err(|e| e.to_string())
}

/// What the process should do on exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(code: i32, kind: &str, detail: impl Into<String>) -> Outcome {
        let body = json!({ "error": kind, "detail": detail.into() });
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("{body}\n"),
        }
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Outcome {
        Outcome::error(1, e.code(), e.to_string())
    }
}

/// Parses `args` (program name first) and runs one command.
///
/// `terminal` says whether standard output is a terminal; it picks the
/// default output format.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, terminal: bool) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(e.to_string()),
                _ => Outcome::error(2, "Usage", e.to_string().trim_end()),
            };
        }
    };
    let plain = if cli.json {
        false
    } else {
        cli.plain || terminal
    };
    match dispatch(&cli, stdin, plain) {
        Ok(out) => out,
        Err(out) => out,
    }
}

fn emit<T: Serialize>(value: &T, plain: bool, render: impl FnOnce(&T) -> String) -> String {
    if plain {
        render(value)
    } else {
        let mut text = serde_json::to_string(value).expect("serializable");
        text.push('\n');
        text
    }
}

fn read_input(arg: &InputArg, stdin: &mut dyn Read) -> Result<serde_json::Value, Outcome> {
    let text = match &arg.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Outcome::error(1, "InvalidInput", format!("{}: {e}", path.display())))?,
        None => {
            let mut text = String::new();
            stdin
                .read_to_string(&mut text)
                .map_err(|e| Outcome::error(1, "InvalidInput", e.to_string()))?;
            text
        }
    };
    serde_json::from_str(&text).map_err(|e| Outcome::error(1, "InvalidInput", e.to_string()))
}

fn parse<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T, Outcome> {
    serde_json::from_value(value).map_err(|e| Outcome::error(1, "InvalidInput", e.to_string()))
}

fn read_grid(arg: &InputArg, stdin: &mut dyn Read) -> Result<Grid, Outcome> {
    parse(read_input(arg, stdin)?)
}

/// Accepts either a grid (`ones`) or an interval map (`rows`).
fn read_map(arg: &InputArg, stdin: &mut dyn Read) -> Result<IntervalMap, Outcome> {
    let value = read_input(arg, stdin)?;
    if value.get("rows").is_some() {
        parse(value)
    } else {
        Ok(to_intervals(&parse::<Grid>(value)?)?)
    }
}

fn dispatch(cli: &Cli, stdin: &mut dyn Read, plain: bool) -> Result<Outcome, Outcome> {
    let enum_opts = |cap: usize, limit: u64| EnumerateOptions {
        cap,
        cell_limit: limit,
        threads: cli.threads,
    };
    let stdout = match &cli.command {
        Command::Size(s) => format!("{}\n", max_size(&s.w)?),
        Command::Count {
            shape,
            method,
            limit,
        } => {
            let w = &shape.w;
            let count = match method {
                CountMethod::Enumerate => count_maximal_with(w, &enum_opts(0, *limit))?,
                CountMethod::Formula => match w.dims() {
                    [n] => u64::from(*n),
                    [a, b] => count_2d(*a, *b)?,
                    _ => count_all_le2(w).map_err(|_| {
                        Error::PreconditionViolated(format!(
                            "no closed form for shape {w}; use --method enumerate"
                        ))
                    })?,
                },
            };
            format!("{count}\n")
        }
        Command::Enumerate { shape, cap, limit } => {
            let report = enumerate_maximal_with(&shape.w, &enum_opts(*cap, *limit))?;
            emit(&report, plain, render_enumeration)
        }
        Command::Verify {
            shape,
            samples,
            trials,
            seed,
            limit,
        } => {
            let opts = VerifyOptions {
                enumerate: enum_opts(usize::MAX, *limit),
                non_maximal_samples: *samples,
                game_trials: *trials,
                seed: *seed,
                ..Default::default()
            };
            let report = verify_shape(&shape.w, &opts)?;
            let text = emit(&report, plain, render_verify);
            return Ok(Outcome {
                code: if report.pass { 0 } else { 1 },
                stdout: text,
                stderr: String::new(),
            });
        }
        Command::Normalize(input) => {
            let report = normalize(&read_map(input, stdin)?)?;
            emit(&report, plain, render_normalize)
        }
        Command::Peel {
            input,
            normalize: first,
        } => {
            let mut m = read_map(input, stdin)?;
            if *first {
                m = normalize(&m)?.result;
            }
            emit(&peel(&m)?, plain, render_map)
        }
        Command::Extend(input) => emit(
            &extend_by_two(&read_grid(input, stdin)?)?,
            plain,
            render_grid,
        ),
        Command::Project(input) => emit(
            &project_last(&read_grid(input, stdin)?)?,
            plain,
            render_grid,
        ),
        Command::Game {
            shape,
            players,
            strategy,
            seed,
        } => {
            let t = play_builtin(&shape.w, *players, strategy, *seed)?;
            emit(&t, plain, render_transcript)
        }
    };
    Ok(Outcome::ok(stdout))
}

fn render_grid(g: &Grid) -> String {
    let dims = g.shape().dims();
    let mut out = String::new();
    if let [rows, cols] = dims {
        for x in 1..=*rows {
            let line: Vec<&str> = (1..=*cols)
                .map(|y| {
                    if g.is_one(&crate::grid::Cell::new(vec![x, y])) {
                        "1"
                    } else {
                        "."
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
    } else {
        let cells: Vec<String> = g.ones().map(ToString::to_string).collect();
        let _ = writeln!(out, "{}: {}", g.shape(), cells.join(" "));
    }
    out
}

fn render_enumeration(r: &EnumerationReport) -> String {
    let mut out = format!("{}: {} maximal antichains", r.shape, r.count);
    if r.truncated {
        let _ = write!(out, " (showing {})", r.grids.len());
    }
    out.push('\n');
    for g in &r.grids {
        out.push('\n');
        out.push_str(&render_grid(g));
    }
    out
}

fn render_map(m: &IntervalMap) -> String {
    let mut out = format!("{}\n", m.shape());
    for (row, iv) in m.rows() {
        let _ = writeln!(out, "{row}: [{}, {}]", iv.l, iv.h);
    }
    out
}

fn render_normalize(r: &NormalizeReport) -> String {
    let mut out = format!("steps: {}\n", r.steps);
    for (x, x_prime) in &r.pairs {
        let _ = writeln!(out, "  {x} / {x_prime}");
    }
    out.push_str(&render_map(&r.result));
    out
}

fn render_verify(r: &VerifyReport) -> String {
    let mut out = String::new();
    for c in &r.checks {
        let _ = writeln!(
            out,
            "{} {}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let _ = writeln!(
        out,
        "{}: {}",
        r.w,
        if r.pass {
            "all checks passed"
        } else {
            "FAILED"
        }
    );
    out
}

fn render_transcript(t: &Transcript) -> String {
    let mut out = String::new();
    let moves = t.final_state.moves();
    for (player, cell) in &moves[..t.safe_moves_played] {
        let _ = writeln!(out, "player {player}: {cell}");
    }
    match &t.terminal_cell {
        Some(cell) => {
            let _ = write!(out, "player {} loses with {cell}", t.loser);
        }
        None => {
            let _ = write!(out, "player {} loses: no cell left", t.loser);
        }
    }
    if t.suicidal {
        out.push_str(" (unforced)");
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_json(args: &[&str], input: &str) -> Outcome {
        let mut argv = vec!["antichain-box"];
        argv.extend_from_slice(args);
        run(argv, &mut input.as_bytes(), false)
    }

    #[test]
    fn shape_parsing() {
        assert_eq!(parse_shape("3, 3").unwrap().dims(), &[3, 3]);
        assert!(parse_shape("3,0").is_err());
        assert!(parse_shape("3,x").is_err());
        assert!(parse_shape("").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        let out = run_json(&["size"], "");
        assert_eq!(out.code, 2);
        let err: serde_json::Value = serde_json::from_str(&out.stderr).unwrap();
        assert_eq!(err["error"], "Usage");
        assert_eq!(run_json(&["size", "--w", "0,2"], "").code, 2);
        assert_eq!(run_json(&["frobnicate"], "").code, 2);
    }

    #[test]
    fn help_exits_zero() {
        let out = run_json(&["--help"], "");
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("enumerate"));
    }

    #[test]
    fn formula_without_closed_form() {
        let out = run_json(&["count", "--w", "3,3,3", "--method", "formula"], "");
        assert_eq!(out.code, 1);
        assert!(out.stderr.contains("PreconditionViolated"));
    }

    #[test]
    fn plain_rendering() {
        let out = run(
            ["antichain-box", "enumerate", "--w", "2,2"],
            &mut "".as_bytes(),
            true,
        );
        assert_eq!(
            out.stdout,
            "2x2: 2 maximal antichains\n\n1 1\n1 .\n\n. 1\n1 1\n"
        );
        let out = run(
            ["antichain-box", "game", "--w", "2,2"],
            &mut "".as_bytes(),
            true,
        );
        assert_eq!(
            out.stdout,
            "player 0: (1,1)\nplayer 1: (1,2)\nplayer 0: (2,1)\nplayer 1 loses with (2,2)\n"
        );
    }
}
