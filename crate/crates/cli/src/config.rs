//! Flat TOML configs, one struct per subcommand. Unknown keys are rejected
//! and every key has a default, so the canonical form lists all of them.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub fn load<T: DeserializeOwned>(file: &Path) -> Result<T> {
    let text = std::fs::read_to_string(file).map_err(|e| CliError::io(file, e))?;
    parse(&text).map_err(|e| match e {
        CliError::Config { message, .. } => CliError::Config {
            file: file.display().to_string(),
            message,
        },
        other => other,
    })
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| CliError::Config {
        file: "<string>".into(),
        message: e.to_string(),
    })
}

/// Canonical text of a config. Parsing it again yields the same text.
pub fn canonical<T: Serialize>(config: &T) -> Result<String> {
    toml::to_string(config).map_err(|e| CliError::Usage(format!("config cannot be written back: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusKind {
    RandomWalk,
    AdaptedWalk,
    Ratchet,
    Constant,
    IsolatedPoints,
    MonotoneRuns,
    SemiStrict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusConfig {
    pub seed: Option<u64>,
    pub kind: CorpusKind,
    pub count: usize,
    pub steps: usize,
    pub dt: f64,
    pub step: f64,
    pub start: f64,
    pub b_grid: Vec<f64>,
    pub a_grid: Vec<f64>,
    pub d_grid: Vec<f64>,
    pub touch_at: f64,
    pub levels: Vec<f64>,
    pub horizon: f64,
    pub rise_max: f64,
    pub k: u32,
    pub cap: f64,
    pub rise: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: None,
            kind: CorpusKind::RandomWalk,
            count: 100,
            steps: 256,
            dt: 1.0,
            step: 0.0625,
            start: 0.0,
            b_grid: vec![0.0],
            a_grid: vec![0.0],
            d_grid: vec![1.0],
            touch_at: 1.0,
            levels: vec![0.0],
            horizon: 10.0,
            rise_max: 0.2,
            k: 4,
            cap: 2.0,
            rise: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorChoice {
    IsolatedPoint,
    Monotone,
    Increase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionChoice {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightingChoice {
    Geometric,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectConfig {
    pub seed: Option<u64>,
    /// Corpus directory holding `manifest.json`; relative paths are taken
    /// from the config file's directory.
    pub corpus: String,
    pub detector: DetectorChoice,
    pub b: f64,
    pub direction: DirectionChoice,
    pub a_grid: Vec<f64>,
    pub d_grid: Vec<f64>,
    pub weighting: WeightingChoice,
    pub stop_loss: f64,
    /// Halve the stop-loss width for each later member.
    pub stop_loss_decay: bool,
    pub alarm_factor: f64,
    pub k: u32,
    pub cap: f64,
    pub rise: f64,
    pub target_factor: f64,
    pub decrease: bool,
    pub write_traces: bool,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            seed: None,
            corpus: "corpus".into(),
            detector: DetectorChoice::IsolatedPoint,
            b: 0.0,
            direction: DirectionChoice::Up,
            a_grid: vec![0.0, 1.0, 4.0],
            d_grid: vec![1.0, -1.0],
            weighting: WeightingChoice::Geometric,
            stop_loss: 1e-3,
            stop_loss_decay: true,
            alarm_factor: 100.0,
            k: 4,
            cap: 2.0,
            rise: 1.0,
            target_factor: 2.0,
            decrease: false,
            write_traces: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub seed: Option<u64>,
    pub suites: Vec<String>,
    pub instances: usize,
    pub k: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: None,
            suites: crate::verify::SUITES.iter().map(|s| s.to_string()).collect(),
            instances: 1000,
            k: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealityChoice {
    Fixed,
    Zero,
    Random,
    Adversary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlayConfig {
    pub seed: Option<u64>,
    pub rounds: usize,
    pub move_bound: f64,
    pub reality: RealityChoice,
    pub moves: Vec<f64>,
    pub games: usize,
}

impl Default for PlayConfig {
    fn default() -> Self {
        PlayConfig {
            seed: None,
            rounds: 4,
            move_bound: 1.0,
            reality: RealityChoice::Fixed,
            moves: vec![1.0; 4],
            games: 1,
        }
    }
}
