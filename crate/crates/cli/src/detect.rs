use std::path::Path as FsPath;

use serde::Serialize;

use sceptic_core::detectors::{
    enumerate_events, run_detector, DetectionReport, DetectorKind, Direction, StopLossWidth, Weighting,
};
use sceptic_core::increase::{e_cd_witness, Branch, EcdReport};

use crate::config::{DetectConfig, DetectorChoice, DirectionChoice, WeightingChoice};
use crate::corpus::{load_items, read_manifest};
use crate::error::{CliError, Context, Result};
use crate::output::{numbered, Staged};

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum PathReport {
    Basic(DetectionReport),
    Increase(EcdReport),
}

#[derive(Debug, Serialize)]
struct Entry {
    index: usize,
    file: String,
    label: String,
    alarm: bool,
    factor: f64,
    report: PathReport,
}

#[derive(Debug, Serialize)]
struct Aggregate {
    paths: usize,
    alarms: usize,
    max_factor: f64,
    mean_factor: f64,
    factor_std_error: f64,
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    detector: DetectorChoice,
    corpus: String,
    root_seed: u64,
    corpus_seed: u64,
    config: &'a DetectConfig,
    aggregate: Aggregate,
    paths: Vec<Entry>,
}

pub struct Detection {
    pub staged: Staged,
    pub alarm: bool,
}

pub fn detect(cfg: &DetectConfig, config_dir: &FsPath, root: u64) -> Result<Detection> {
    let dir = config_dir.join(&cfg.corpus);
    let manifest = read_manifest(&dir)?;
    let items = load_items(&dir, &manifest)?;
    let mut staged = Staged::default();
    let mut entries = Vec::with_capacity(items.len());

    match cfg.detector {
        DetectorChoice::IsolatedPoint | DetectorChoice::Monotone => {
            let kind = match cfg.detector {
                DetectorChoice::IsolatedPoint => DetectorKind::IsolatedPoint { b: cfg.b },
                _ => DetectorKind::Monotone {
                    direction: match cfg.direction {
                        DirectionChoice::Up => Direction::Up,
                        DirectionChoice::Down => Direction::Down,
                    },
                },
            };
            let weighting = match cfg.weighting {
                WeightingChoice::Geometric => Weighting::Geometric,
                WeightingChoice::Uniform => Weighting::Uniform,
            };
            let widths = if cfg.stop_loss_decay {
                StopLossWidth::Geometric(cfg.stop_loss)
            } else {
                StopLossWidth::Constant(cfg.stop_loss)
            };
            let family = enumerate_events(kind, &cfg.a_grid, &cfg.d_grid, weighting, widths)
                .context(|| "detector family".into())?;
            for (item, path) in &items {
                let report = run_detector(&family, path, cfg.alarm_factor).context(|| item.file.clone())?;
                if cfg.write_traces {
                    staged.text(
                        numbered("traces", "trace", item.index, "csv"),
                        report.composite_trace.to_csv(),
                    );
                }
                let factor = report.composite.final_value / report.composite.initial;
                entries.push(Entry {
                    index: item.index,
                    file: item.file.clone(),
                    label: item.label.clone(),
                    alarm: report.alarm,
                    factor,
                    report: PathReport::Basic(report),
                });
            }
        }
        DetectorChoice::Increase => {
            let mut witness =
                e_cd_witness(cfg.cap, cfg.rise, cfg.k, cfg.target_factor).context(|| "increase witness".into())?;
            witness.decrease = cfg.decrease;
            for (item, path) in &items {
                let out = witness.evaluate(path).context(|| item.file.clone())?;
                let factor = match out.report.branch {
                    Branch::First => out.report.factors.first,
                    Branch::Second => out.report.factors.second,
                    Branch::Undetermined => out.report.factors.first.max(out.report.factors.second),
                };
                let alarm = out.report.branch != Branch::Undetermined && factor >= cfg.target_factor;
                if cfg.write_traces {
                    staged.text(numbered("traces", "first", item.index, "csv"), out.first.trace.to_csv());
                    staged.text(numbered("traces", "second", item.index, "csv"), out.second.to_csv());
                }
                entries.push(Entry {
                    index: item.index,
                    file: item.file.clone(),
                    label: item.label.clone(),
                    alarm,
                    factor,
                    report: PathReport::Increase(out.report),
                });
            }
        }
    }
    if entries.is_empty() {
        return Err(CliError::Usage(format!("corpus {} has no paths", dir.display())));
    }

    let n = entries.len() as f64;
    let mean = entries.iter().map(|e| e.factor).sum::<f64>() / n;
    let var = if entries.len() > 1 {
        entries.iter().map(|e| (e.factor - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let alarms = entries.iter().filter(|e| e.alarm).count();
    let report = Report {
        detector: cfg.detector,
        corpus: cfg.corpus.clone(),
        root_seed: root,
        corpus_seed: manifest.root_seed,
        config: cfg,
        aggregate: Aggregate {
            paths: entries.len(),
            alarms,
            max_factor: entries.iter().map(|e| e.factor).fold(f64::NEG_INFINITY, f64::max),
            mean_factor: mean,
            factor_std_error: (var / n).sqrt(),
        },
        paths: entries,
    };
    staged.json("report.json", &report)?;
    Ok(Detection {
        staged,
        alarm: alarms > 0,
    })
}
