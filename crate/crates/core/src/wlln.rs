//! The N-round one-sided game and Sceptic's prudent strategy.
//!
//! Protocol: `K_0 = 1`; in each round Sceptic announces a stake `s_n ≥ 0`,
//! Reality announces `x_n ∈ [-c, c]`, and `K_n = K_{n-1} + s_n x_n`. Sceptic
//! stakes `2/(c²N) · Σ_{j≤n} x_j` while that sum is non-negative and nothing
//! otherwise, which guarantees
//!
//! ```text
//! K_n ≥ (N − n)/N + (Σ_{j≤n} x_j)^{+,2} / (c²N),   n = 0..N.
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub rounds: usize,
    pub move_bound: f64,
}

impl GameConfig {
    pub fn new(rounds: usize, move_bound: f64) -> Result<Self> {
        if rounds == 0 {
            return domain("the game needs at least one round");
        }
        if !(move_bound > 0.0 && move_bound.is_finite()) {
            return domain(format!("move bound must be positive, got {move_bound}"));
        }
        Ok(GameConfig { rounds, move_bound })
    }
}

/// One play of the game. `capitals` has `rounds + 1` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub config: GameConfig,
    pub stakes: Vec<f64>,
    pub moves: Vec<f64>,
    pub capitals: Vec<f64>,
}

impl GameTranscript {
    pub fn final_capital(&self) -> f64 {
        *self.capitals.last().expect("K_0 is always present")
    }

    /// `Σ_{j≤n} x_j` for `n = 0..=N`.
    pub fn prefix_sums(&self) -> Vec<f64> {
        let mut sums = Vec::with_capacity(self.moves.len() + 1);
        let mut acc = 0.0;
        sums.push(acc);
        for x in &self.moves {
            acc += x;
            sums.push(acc);
        }
        sums
    }

    /// `K_n − bound_n` for every n.
    pub fn slacks(&self) -> Vec<f64> {
        self.prefix_sums()
            .iter()
            .zip(&self.capitals)
            .enumerate()
            .map(|(n, (&sum, &k))| k - capital_bound(&self.config, n, sum))
            .collect()
    }

    /// `n,s,x,K` rows; round 0 has empty stake and move cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,s,x,K\n");
        out.push_str(&format!("0,,,{:.16e}\n", self.capitals[0]));
        for n in 1..self.capitals.len() {
            out.push_str(&format!(
                "{n},{:.16e},{:.16e},{:.16e}\n",
                self.stakes[n - 1],
                self.moves[n - 1],
                self.capitals[n]
            ));
        }
        out
    }
}

/// Sceptic's stake for the next round given `Σ_{j≤n} x_j`.
pub fn sceptic_stake(config: &GameConfig, prefix_sum: f64) -> f64 {
    if prefix_sum >= 0.0 {
        2.0 / (config.move_bound * config.move_bound * config.rounds as f64) * prefix_sum
    } else {
        0.0
    }
}

/// The guaranteed lower bound on `K_n`.
pub fn capital_bound(config: &GameConfig, n: usize, prefix_sum: f64) -> f64 {
    let big_n = config.rounds as f64;
    let pos = prefix_sum.max(0.0);
    (big_n - n as f64) / big_n + pos * pos / (config.move_bound * config.move_bound * big_n)
}

/// State visible to Reality before it moves in round `round` (1-based).
#[derive(Debug, Clone, Copy)]
pub struct RoundView<'a> {
    pub round: usize,
    pub stake: f64,
    pub capital: f64,
    pub moves: &'a [f64],
    pub config: &'a GameConfig,
}

/// A source of Reality's moves.
pub trait Reality {
    fn next_move(&mut self, view: RoundView<'_>) -> f64;
}

/// Moves fixed in advance.
#[derive(Debug, Clone)]
pub struct FixedMoves(pub Vec<f64>);

impl Reality for FixedMoves {
    fn next_move(&mut self, view: RoundView<'_>) -> f64 {
        self.0.get(view.round - 1).copied().unwrap_or(0.0)
    }
}

/// Independent uniform moves on `[-c, c]`.
#[derive(Debug, Clone)]
pub struct SeededRandom {
    rng: ChaCha8Rng,
}

impl SeededRandom {
    pub fn new(seed: u64) -> Self {
        SeededRandom {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Reality for SeededRandom {
    fn next_move(&mut self, view: RoundView<'_>) -> f64 {
        let c = view.config.move_bound;
        self.rng.gen_range(-c..=c)
    }
}

/// Reality driven by a callback that sees Sceptic's stake.
pub struct Adaptive<F>(pub F);

impl<F: FnMut(RoundView<'_>) -> f64> Reality for Adaptive<F> {
    fn next_move(&mut self, view: RoundView<'_>) -> f64 {
        (self.0)(view)
    }
}

/// An adversary that tries to keep Sceptic's capital close to the bound:
/// it plays `-c` whenever Sceptic stakes, and otherwise a move that keeps the
/// prefix sum hovering at zero (the region where the bound loses most).
#[derive(Debug, Clone)]
pub struct StakeAdversary {
    rng: ChaCha8Rng,
}

impl StakeAdversary {
    pub fn new(seed: u64) -> Self {
        StakeAdversary {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Reality for StakeAdversary {
    fn next_move(&mut self, view: RoundView<'_>) -> f64 {
        let c = view.config.move_bound;
        let sum: f64 = view.moves.iter().sum();
        if view.stake > 0.0 {
            // lose as much as allowed, but sometimes stop at zero
            if self.rng.gen_bool(0.5) {
                -c
            } else {
                (-sum).max(-c)
            }
        } else if sum < 0.0 {
            (-sum).min(c) * self.rng.gen_range(0.5..=1.0)
        } else {
            c * self.rng.gen_range(0.0..=1.0)
        }
    }
}

/// Plays the game with Sceptic using [`sceptic_stake`].
pub fn play_game(config: &GameConfig, reality: &mut dyn Reality) -> Result<GameTranscript> {
    let n_rounds = config.rounds;
    let c = config.move_bound;
    let mut stakes = Vec::with_capacity(n_rounds);
    let mut moves = Vec::with_capacity(n_rounds);
    let mut capitals = Vec::with_capacity(n_rounds + 1);
    capitals.push(1.0);
    let mut sum = 0.0;
    for round in 1..=n_rounds {
        let stake = sceptic_stake(config, sum);
        let capital = *capitals.last().unwrap();
        let x = reality.next_move(RoundView {
            round,
            stake,
            capital,
            moves: &moves,
            config,
        });
        if !(x.abs() <= c) {
            return Err(Error::Protocol {
                round,
                value: x,
                bound: c,
            });
        }
        stakes.push(stake);
        moves.push(x);
        capitals.push(capital + stake * x);
        sum += x;
    }
    Ok(GameTranscript {
        config: *config,
        stakes,
        moves,
        capitals,
    })
}

/// Smallest `N` with `N ≥ c²/(δ₁ δ₂²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub delta1: f64,
    pub delta2: f64,
    pub c: f64,
    #[serde(rename = "N")]
    pub rounds: u64,
}

pub fn wlln_certificate(delta1: f64, delta2: f64, c: f64) -> Result<Certificate> {
    for (name, v) in [("delta1", delta1), ("delta2", delta2), ("c", c)] {
        if !(v > 0.0 && v.is_finite()) {
            return domain(format!("{name} must be positive, got {v}"));
        }
    }
    let raw = c * c / (delta1 * delta2 * delta2);
    let mut rounds = raw.ceil().max(1.0);
    // ceil of a rounded quotient can overshoot by one when the exact value is an integer
    if rounds > 1.0 && (rounds - 1.0) * delta1 * delta2 * delta2 >= c * c {
        rounds -= 1.0;
    }
    if rounds > u64::MAX as f64 {
        return domain(format!("certificate needs {raw} rounds"));
    }
    Ok(Certificate {
        delta1,
        delta2,
        c,
        rounds: rounds as u64,
    })
}
