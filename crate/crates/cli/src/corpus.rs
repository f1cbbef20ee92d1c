use std::path::{Path as FsPath, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use sceptic_core::increase::{CycleTracker, IncreaseSchedule};
use sceptic_core::path::{
    gen_adapted_walk, gen_constant, gen_random_walk, gen_ratchet, gen_violation, load_path_csv, path_to_csv, Path,
    Violation,
};

use crate::config::{CorpusConfig, CorpusKind};
use crate::error::{CliError, Context, Result};
use crate::output::{numbered, Staged};
use crate::seeds::item_seed;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Seconds since the Unix epoch. The only field that differs between
    /// reruns of the same config.
    pub created_unix: u64,
    pub root_seed: u64,
    pub kind: CorpusKind,
    pub config: CorpusConfig,
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub index: usize,
    pub file: String,
    /// Item seed; `None` for deterministic constructions.
    pub seed: Option<u64>,
    pub label: String,
    pub points: usize,
}

fn grid<'a>(name: &str, g: &'a [f64]) -> Result<&'a [f64]> {
    if g.is_empty() {
        return Err(CliError::Usage(format!(
            "{name} is empty: the corpus would have no paths"
        )));
    }
    Ok(g)
}

fn build(cfg: &CorpusConfig, root: u64) -> Result<Vec<(Path, Option<u64>, String)>> {
    let seeded = |i: usize| item_seed(root, i as u64);
    let count = || {
        if cfg.count == 0 {
            Err(CliError::Usage("count = 0: the corpus would have no paths".into()))
        } else {
            Ok(cfg.count)
        }
    };
    let mut out = Vec::new();
    match cfg.kind {
        CorpusKind::RandomWalk => {
            for i in 0..count()? {
                let s = seeded(i);
                let p = gen_random_walk(s, cfg.steps, cfg.dt, cfg.step, cfg.start).context(|| format!("item {i}"))?;
                out.push((p, Some(s), "random_walk".into()));
            }
        }
        CorpusKind::AdaptedWalk => {
            let schedule = IncreaseSchedule::new(cfg.k, cfg.cap, cfg.rise).context(|| "schedule".into())?;
            for i in 0..count()? {
                let s = seeded(i);
                let mut tracker = CycleTracker::new(schedule);
                let p = gen_adapted_walk(s, cfg.steps, cfg.dt, cfg.step, 0.0, |v| tracker.levels(v))
                    .context(|| format!("item {i}"))?;
                out.push((p, Some(s), format!("adapted_walk(k={})", cfg.k)));
            }
        }
        CorpusKind::Ratchet => {
            for i in 0..count()? {
                let s = seeded(i);
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let rises: Vec<f64> = (0..cfg.steps).map(|_| rng.gen_range(0.0..=cfg.rise_max)).collect();
                let drop = (-f64::from(cfg.k)).exp();
                let p = gen_ratchet(&rises, drop, cfg.dt).context(|| format!("item {i}"))?;
                out.push((p, Some(s), format!("ratchet(drop=e^-{})", cfg.k)));
            }
        }
        CorpusKind::Constant => {
            for &l in grid("levels", &cfg.levels)? {
                let p = gen_constant(l, cfg.horizon).context(|| format!("constant {l}"))?;
                out.push((p, None, format!("constant({l})")));
            }
        }
        CorpusKind::IsolatedPoints => {
            for &b in grid("b_grid", &cfg.b_grid)? {
                for &d in grid("d_grid", &cfg.d_grid)? {
                    let p = gen_violation(Violation::IsolatedLevelPoint {
                        b,
                        d,
                        touch_at: cfg.touch_at,
                    })
                    .context(|| format!("isolated point b={b} D={d}"))?;
                    out.push((p, None, format!("isolated_point(b={b},D={d})")));
                }
            }
        }
        CorpusKind::MonotoneRuns => {
            for &a in grid("a_grid", &cfg.a_grid)? {
                for &d in grid("d_grid", &cfg.d_grid)? {
                    let p =
                        gen_violation(Violation::MonotoneRun { a, d }).context(|| format!("monotone a={a} D={d}"))?;
                    out.push((p, None, format!("monotone_run(a={a},D={d})")));
                }
            }
        }
        CorpusKind::SemiStrict => {
            for &d in grid("d_grid", &cfg.d_grid)? {
                let p = gen_violation(Violation::SemiStrictIncrease { c: cfg.cap, d })
                    .context(|| format!("semi-strict C={} D={d}", cfg.cap))?;
                out.push((p, None, format!("semi_strict(C={},D={d})", cfg.cap)));
            }
        }
    }
    Ok(out)
}

pub fn gen_corpus(cfg: &CorpusConfig, root: u64) -> Result<Staged> {
    let paths = build(cfg, root)?;
    let mut staged = Staged::default();
    let mut items = Vec::with_capacity(paths.len());
    for (index, (path, seed, label)) in paths.into_iter().enumerate() {
        let file = numbered("paths", "path", index, "csv");
        staged.text(&file, path_to_csv(&path));
        items.push(Item {
            index,
            file,
            seed,
            label,
            points: path.len(),
        });
    }
    let manifest = Manifest {
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        root_seed: root,
        kind: cfg.kind,
        config: cfg.clone(),
        items,
    };
    staged.json(MANIFEST, &manifest)?;
    Ok(staged)
}

pub fn read_manifest(dir: &FsPath) -> Result<Manifest> {
    let file = dir.join(MANIFEST);
    let text = std::fs::read(&file).map_err(|e| CliError::io(&file, e))?;
    serde_json::from_slice(&text).map_err(|e| CliError::Usage(format!("{}: {e}", file.display())))
}

pub fn load_items(dir: &FsPath, manifest: &Manifest) -> Result<Vec<(Item, Path)>> {
    manifest
        .items
        .iter()
        .map(|item| {
            let file: PathBuf = dir.join(&item.file);
            let bytes = std::fs::read(&file).map_err(|e| CliError::io(&file, e))?;
            let path = load_path_csv(&bytes).context(|| file.display().to_string())?;
            Ok((item.clone(), path))
        })
        .collect()
}
