use serde::Serialize;

use sceptic_core::wlln::{play_game, FixedMoves, GameConfig, Reality, SeededRandom, StakeAdversary};

use crate::config::{PlayConfig, RealityChoice};
use crate::error::{CliError, Context, Result};
use crate::output::{numbered, Staged};
use crate::seeds::item_seed;

#[derive(Debug, Serialize)]
struct GameSummary {
    index: usize,
    seed: Option<u64>,
    transcript: String,
    final_capital: f64,
    min_capital: f64,
    /// Smallest `K_n − bound_n` over the game.
    min_slack: f64,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    root_seed: u64,
    config: &'a PlayConfig,
    games: Vec<GameSummary>,
}

pub fn wlln_play(cfg: &PlayConfig, root: u64) -> Result<Staged> {
    if cfg.games == 0 {
        return Err(CliError::Usage("games = 0: nothing to play".into()));
    }
    if cfg.reality == RealityChoice::Fixed && cfg.moves.len() != cfg.rounds {
        return Err(CliError::Usage(format!(
            "reality = \"fixed\" needs {} moves, got {}",
            cfg.rounds,
            cfg.moves.len()
        )));
    }
    let game = GameConfig::new(cfg.rounds, cfg.move_bound).context(|| "game config".into())?;
    let mut staged = Staged::default();
    let mut games = Vec::with_capacity(cfg.games);
    for index in 0..cfg.games {
        let seed = item_seed(root, index as u64);
        let (mut reality, seed): (Box<dyn Reality>, Option<u64>) = match cfg.reality {
            RealityChoice::Fixed => (Box::new(FixedMoves(cfg.moves.clone())), None),
            RealityChoice::Zero => (Box::new(FixedMoves(vec![0.0; cfg.rounds])), None),
            RealityChoice::Random => (Box::new(SeededRandom::new(seed)), Some(seed)),
            RealityChoice::Adversary => (Box::new(StakeAdversary::new(seed)), Some(seed)),
        };
        let t = play_game(&game, reality.as_mut()).context(|| format!("game {index}"))?;
        let transcript = numbered("transcripts", "game", index, "csv");
        staged.text(&transcript, t.to_csv());
        games.push(GameSummary {
            index,
            seed,
            transcript,
            final_capital: t.final_capital(),
            min_capital: t.capitals.iter().copied().fold(f64::INFINITY, f64::min),
            min_slack: t.slacks().into_iter().fold(f64::INFINITY, f64::min),
        });
    }
    staged.json(
        "summary.json",
        &Summary {
            root_seed: root,
            config: cfg,
            games,
        },
    )?;
    Ok(staged)
}
