//! Named invariant sweeps. Each suite reports pass/fail and the worst slack
//! it saw; a negative slack means the invariant was violated by that much.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use sceptic_core::detectors::{
    enumerate_events, isolated_point_witness, DetectorKind, Direction, EventParams, StopLossWidth, Weighting,
};
use sceptic_core::increase::{
    darboux_sums, layer_program, FirstProcess, IncreaseSchedule, IncreaseWitness, SecondProcess, Termination, LAYER_TOL,
};
use sceptic_core::path::{gen_constant, gen_ratchet, Path};
use sceptic_core::trading::{buy_and_hold, CapitalProcess};
use sceptic_core::upper_prob::coherence_check;
use sceptic_core::wlln::{capital_bound, play_game, FixedMoves, GameConfig, Reality, SeededRandom, StakeAdversary};

use crate::config::VerifyConfig;
use crate::error::{CliError, Context, Result};
use crate::seeds::item_seed;

pub const SUITES: [&str; 6] = [
    "wlln_tightness",
    "wlln_sweep",
    "coherence",
    "layers",
    "first_bound",
    "darboux",
];

const REL_TOL: f64 = 1e-9;

#[derive(Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub pass: bool,
    pub instances: usize,
    pub worst_slack: f64,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub root_seed: u64,
    pub pass: bool,
    pub suites: Vec<SuiteResult>,
}

pub fn verify(cfg: &VerifyConfig, root: u64) -> Result<VerifyReport> {
    if cfg.suites.is_empty() {
        return Err(CliError::Usage("no suites requested".into()));
    }
    if let Some(bad) = cfg.suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(CliError::Usage(format!(
            "unknown suite {bad:?}; known suites: {}",
            SUITES.join(", ")
        )));
    }
    let mut suites = Vec::new();
    for name in &cfg.suites {
        let index = SUITES.iter().position(|s| s == name).expect("checked above");
        let rng = ChaCha8Rng::seed_from_u64(item_seed(root, index as u64));
        let (instances, worst_slack, pass) = match name.as_str() {
            "wlln_tightness" => wlln_tightness()?,
            "wlln_sweep" => wlln_sweep(cfg.instances, rng)?,
            "coherence" => coherence(cfg.k)?,
            "layers" => layers(cfg.instances, rng)?,
            "first_bound" => first_bound(cfg.instances, cfg.k, rng)?,
            _ => darboux(cfg.instances, rng)?,
        };
        suites.push(SuiteResult {
            name: name.clone(),
            pass,
            instances,
            worst_slack,
        });
    }
    Ok(VerifyReport {
        root_seed: root,
        pass: suites.iter().all(|s| s.pass),
        suites,
    })
}

type Outcome = Result<(usize, f64, bool)>;

fn relative_slack(value: f64, bound: f64) -> f64 {
    (value - bound) / bound.abs().max(1.0)
}

fn wlln_tightness() -> Outcome {
    let cfg = GameConfig::new(4, 1.0).context(|| "game".into())?;
    let t = play_game(&cfg, &mut FixedMoves(vec![1.0; 4])).context(|| "game".into())?;
    let worst = t.slacks().into_iter().fold(f64::INFINITY, f64::min);
    let exact = t.slacks().iter().all(|&s| s == 0.0) && t.stakes == [0.0, 0.5, 1.0, 1.5];
    Ok((1, worst, exact))
}

fn wlln_sweep(instances: usize, mut rng: ChaCha8Rng) -> Outcome {
    let mut worst = f64::INFINITY;
    for i in 0..instances {
        let c = [0.5, 1.0, 2.0][i % 3];
        let cfg = GameConfig::new(rng.gen_range(1..=200), c).context(|| "game".into())?;
        let mut reality: Box<dyn Reality> = if i % 2 == 0 {
            Box::new(SeededRandom::new(rng.gen()))
        } else {
            Box::new(StakeAdversary::new(rng.gen()))
        };
        let t = play_game(&cfg, reality.as_mut()).context(|| format!("game {i}"))?;
        for (n, (&k, &s)) in t.capitals.iter().zip(&t.prefix_sums()).enumerate() {
            worst = worst.min(relative_slack(k, capital_bound(&cfg, n, s)));
        }
    }
    Ok((instances, worst, worst >= -REL_TOL))
}

fn coherence(k: u32) -> Outcome {
    let schedule = IncreaseSchedule::new(k, 2.0, 1.0).context(|| "schedule".into())?;
    let mut library: Vec<Box<dyn CapitalProcess>> = vec![
        Box::new(isolated_point_witness(
            EventParams::new(0.0, 0.0, 1.0, 1e-3).context(|| "witness".into())?,
        )),
        Box::new(isolated_point_witness(
            EventParams::new(1.0, 0.5, -1.0, 0.1).context(|| "witness".into())?,
        )),
        Box::new(buy_and_hold(1.0, 0.0, 2.0)),
        Box::new(FirstProcess { schedule }),
        Box::new(SecondProcess { schedule }),
    ];
    for direction in [Direction::Up, Direction::Down] {
        let family = enumerate_events(
            DetectorKind::Monotone { direction },
            &[0.0, 1.0],
            &[0.5, 1.0],
            Weighting::Geometric,
            StopLossWidth::default(),
        )
        .context(|| "family".into())?;
        library.push(Box::new(family.superposition));
    }
    for m in 1..=schedule.layers {
        library.push(Box::new(
            layer_program(0.0, 0.0, m, schedule.epsilon, schedule.delta).context(|| "layer".into())?,
        ));
    }
    let paths: Vec<Path> = [0.0, 1.0, -2.5]
        .iter()
        .map(|&l| gen_constant(l, 5.0))
        .collect::<std::result::Result<_, _>>()
        .context(|| "constant paths".into())?;
    let refs: Vec<&dyn CapitalProcess> = library.iter().map(|b| b.as_ref()).collect();
    let verdict = coherence_check(&refs, &paths).context(|| "coherence".into())?;
    Ok((verdict.processes * verdict.paths, 0.0, verdict.pass))
}

fn layers(instances: usize, mut rng: ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let eps = (-rng.gen_range(1.0..12.0f64)).exp();
        let layers = rng.gen_range(1..=256usize);
        let delta = (eps.sqrt() - eps) / layers as f64;
        let m = rng.gen_range(1..=layers);
        let level = rng.gen_range(-5.0..5.0);
        let w = layer_program(0.5, level, m, eps, delta).context(|| "layer".into())?;
        let path = |end: f64| Path::new(vec![0.0, 0.5, 1.5], vec![level, level, end]).context(|| "path".into());
        let up = w
            .evaluate(&path(level + m as f64 * delta)?)
            .context(|| "layer".into())?
            .final_value;
        let down = w.evaluate(&path(level - eps)?).context(|| "layer".into())?.final_value;
        worst = worst.max((up - delta).abs()).max(down.abs());
    }
    Ok((instances, -worst, worst <= LAYER_TOL))
}

fn first_bound(instances: usize, k: u32, mut rng: ChaCha8Rng) -> Outcome {
    let schedule = IncreaseSchedule::new(k, 1e9, 1.0).context(|| "schedule".into())?;
    let witness = IncreaseWitness {
        schedule,
        target_factor: 1.0,
        decrease: false,
    };
    let tr = schedule.truncation();
    let mut worst = f64::INFINITY;
    let mut checked = 0;
    let mut pass = true;
    for i in 0..instances {
        let rises: Vec<f64> = (0..schedule.cycles + 2)
            .map(|j| match i % 3 {
                0 => rng.gen_range(0.0..1.5 * tr),
                1 => {
                    if j % 2 == 0 {
                        0.0
                    } else {
                        tr
                    }
                }
                _ => {
                    if rng.gen_bool(0.8) {
                        0.0
                    } else {
                        tr
                    }
                }
            })
            .collect();
        let path = gen_ratchet(&rises, schedule.epsilon, 1.0).context(|| "ratchet".into())?;
        let out = witness.evaluate(&path).context(|| format!("path {i}"))?;
        if out.decomposition.termination != Termination::AllResolved {
            continue;
        }
        let (lhs, rhs) = (
            out.report.bound_lhs.unwrap_or(f64::NAN),
            out.report.bound_rhs.unwrap_or(f64::NAN),
        );
        worst = worst.min(relative_slack(lhs, rhs));
        pass &= out.first.trace.min_value >= -sceptic_core::trading::POSITIVITY_TOL;
        checked += 1;
    }
    Ok((checked, worst, pass && worst >= -REL_TOL))
}

fn darboux(instances: usize, mut rng: ChaCha8Rng) -> Outcome {
    let mut worst = f64::INFINITY;
    for _ in 0..instances {
        let eps = (-rng.gen_range(0.2..20.0f64)).exp();
        let layers = rng.gen_range(1..=2000usize);
        let sums = darboux_sums(eps, (eps.sqrt() - eps) / layers as f64).context(|| "darboux".into())?;
        let integral = eps / 2.0 * (1.0 / eps).ln();
        worst = worst.min(integral - sums.lower).min(sums.upper - integral);
    }
    Ok((instances, worst, worst >= 0.0))
}
