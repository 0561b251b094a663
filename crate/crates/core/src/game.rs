//! The m-player exclusion game: players take turns flipping a zero cell to
//! one, and whoever makes the board contain the pattern loses.
//!
//! Because every maximal board has the same weight, loss-avoiding play always
//! ends with player `max_size mod m` to move on a maximal board.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::{addition_contains, contains_forbidden, max_size, Cell, DenseOrder, Grid, Shape};

/// Player `max_size(shape) mod m`.
pub fn predict_loser(shape: &Shape, players: usize) -> Result<usize> {
    if players < 2 {
        return Err(Error::PreconditionViolated(
            "the game needs at least two players".into(),
        ));
    }
    Ok((max_size(shape)? % players as u64) as usize)
}

#[derive(Clone, Debug)]
pub struct GameState {
    board: Grid,
    players: usize,
    moves: Vec<(usize, Cell)>,
    dense: Option<DenseOrder>,
    mask: u64,
}

impl GameState {
    pub fn new(shape: Shape, players: usize) -> Result<GameState> {
        if players < 2 {
            return Err(Error::PreconditionViolated(
                "the game needs at least two players".into(),
            ));
        }
        let dense = DenseOrder::new(&shape);
        Ok(GameState {
            board: Grid::empty(shape),
            players,
            moves: Vec::new(),
            dense,
            mask: 0,
        })
    }

    pub fn shape(&self) -> &Shape {
        self.board.shape()
    }

    pub fn board(&self) -> &Grid {
        &self.board
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn moves(&self) -> &[(usize, Cell)] {
        &self.moves
    }

    pub fn to_move(&self) -> usize {
        self.moves.len() % self.players
    }

    fn flip(&mut self, cell: Cell) {
        if self.dense.is_some() {
            self.mask |= 1 << self.shape().index_of(&cell);
        }
        let player = self.to_move();
        self.board.insert(cell.clone()).expect("validated cell");
        self.moves.push((player, cell));
    }
}

/// Zero cells whose flip keeps the board 2-avoiding, in lexicographic order.
pub fn safe_moves(state: &GameState) -> Vec<Cell> {
    match &state.dense {
        Some(order) => {
            let mut open = order.addable(state.mask);
            let mut cells = Vec::with_capacity(open.count_ones() as usize);
            while open != 0 {
                cells.push(state.shape().cell_at(u64::from(open.trailing_zeros())));
                open &= open - 1;
            }
            cells
        }
        None => state
            .board
            .zeros()
            .filter(|c| !addition_contains(&state.board, c))
            .collect(),
    }
}

/// A player. Asked for a move only while some safe move exists; must return a zero cell.
pub trait Strategy {
    fn choose(&mut self, state: &GameState) -> Cell;
}

/// Always the lexicographically first safe move.
#[derive(Clone, Copy, Debug, Default)]
pub struct LexSafe;

impl Strategy for LexSafe {
    fn choose(&mut self, state: &GameState) -> Cell {
        safe_moves(state)
            .into_iter()
            .next()
            .expect("asked only while a safe move exists")
    }
}

/// A uniformly random safe move.
#[derive(Clone, Debug)]
pub struct RandomSafe {
    rng: ChaCha8Rng,
}

impl RandomSafe {
    pub fn new(seed: u64) -> RandomSafe {
        RandomSafe {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Strategy for RandomSafe {
    fn choose(&mut self, state: &GameState) -> Cell {
        safe_moves(state)
            .choose(&mut self.rng)
            .cloned()
            .expect("asked only while a safe move exists")
    }
}

/// Built-in strategies by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    LexSafe,
    RandomSafe,
}

impl std::str::FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lex" | "lex-safe" => Ok(StrategyKind::LexSafe),
            "random" | "random-safe" => Ok(StrategyKind::RandomSafe),
            other => Err(format!(
                "unknown strategy `{other}` (expected lex or random)"
            )),
        }
    }
}

impl StrategyKind {
    /// Player `index` of a game seeded with `seed`.
    pub fn build(self, seed: u64, index: usize) -> Box<dyn Strategy> {
        match self {
            StrategyKind::LexSafe => Box::new(LexSafe),
            StrategyKind::RandomSafe => Box::new(RandomSafe::new(
                seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Transcript {
    pub final_state: GameState,
    pub loser: usize,
    /// The losing flip; `None` when the board filled up with nothing left to flip.
    pub terminal_cell: Option<Cell>,
    /// Moves made before the losing one.
    pub safe_moves_played: usize,
    /// The loser flipped an unsafe cell while a safe one was still available.
    pub suicidal: bool,
}

impl Serialize for Transcript {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Transcript", 7)?;
        s.serialize_field("w", self.final_state.shape())?;
        s.serialize_field("players", &self.final_state.players)?;
        s.serialize_field("moves", &self.final_state.moves)?;
        s.serialize_field("loser", &self.loser)?;
        s.serialize_field("terminal", &self.terminal_cell)?;
        s.serialize_field("safe_moves", &self.safe_moves_played)?;
        s.serialize_field("suicidal", &self.suicidal)?;
        s.end()
    }
}

/// Plays one game; the number of players is `strategies.len()`.
///
/// When no safe move is left the player to move is forced to flip the
/// lexicographically first zero cell, and loses. If the board is full there
/// is nothing to flip and that player loses without moving.
pub fn play(shape: &Shape, strategies: &mut [Box<dyn Strategy>]) -> Result<Transcript> {
    let mut state = GameState::new(shape.clone(), strategies.len())?;
    loop {
        let player = state.to_move();
        let safe = safe_moves(&state);
        if safe.is_empty() {
            let terminal = state.board.zeros().next();
            let safe_moves_played = state.moves.len();
            if let Some(cell) = &terminal {
                state.flip(cell.clone());
            }
            return Ok(Transcript {
                final_state: state,
                loser: player,
                terminal_cell: terminal,
                safe_moves_played,
                suicidal: false,
            });
        }
        let cell = strategies[player].choose(&state);
        if !state.shape().contains(&cell) {
            return Err(Error::StrategyReturnedOutOfRange { player, cell });
        }
        if state.board.is_one(&cell) {
            return Err(Error::StrategyReturnedNonZeroCell { player, cell });
        }
        let unsafe_flip = !safe.contains(&cell);
        let safe_moves_played = state.moves.len();
        state.flip(cell.clone());
        if unsafe_flip {
            debug_assert!(contains_forbidden(&state.board));
            return Ok(Transcript {
                final_state: state,
                loser: player,
                terminal_cell: Some(cell),
                safe_moves_played,
                suicidal: true,
            });
        }
    }
}

/// Plays with built-in strategies. A single kind is used for every player.
pub fn play_builtin(
    shape: &Shape,
    players: usize,
    kinds: &[StrategyKind],
    seed: u64,
) -> Result<Transcript> {
    if kinds.len() != 1 && kinds.len() != players {
        return Err(Error::PreconditionViolated(format!(
            "got {} strategies for {players} players",
            kinds.len()
        )));
    }
    let mut strategies: Vec<Box<dyn Strategy>> = (0..players)
        .map(|i| kinds[i % kinds.len()].build(seed, i))
        .collect();
    play(shape, &mut strategies)
}
