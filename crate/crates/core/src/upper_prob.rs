//! Upper-probability evidence from explicit witnesses.
//!
//! A positive capital process that starts from `S₀` and ends at 1 or more on
//! every path of an event bounds the event's upper probability by `S₀`. This
//! module checks that contract on a corpus, and shows for the completely
//! uncertain events that both sides are realised by martingale-like paths.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::path::{gen_constant, gen_random_walk, gen_stopped_random_walk, Path, Tail};
use crate::trading::{CapitalProcess, CapitalTrace, POSITIVITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    /// The answer depends on the path after its last breakpoint.
    Undetermined,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }
}

/// A decidable property of piecewise-linear paths.
pub trait EventPredicate: Send + Sync {
    fn name(&self) -> String;
    fn evaluate(&self, path: &Path) -> Verdict;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremum {
    Maximum,
    Minimum,
    Either,
}

/// The events the library knows how to decide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    /// The empty event.
    Nothing,
    /// The whole sample space.
    Everything,
    /// Some time in the level set of `b` is isolated in it.
    IsolatedLevelPoint { b: f64 },
    /// After the first visit to `b` at or after `a`, the path reaches `b + d`
    /// before returning to `b`.
    LeavesLevel { b: f64, a: f64, d: f64 },
    /// The path is monotone and non-constant on some interval.
    MonotoneNonConstant,
    /// The path starts at 0, has a point of semi-strict increase `t` before
    /// it first reaches `c`, and after `t` reaches `ω(t) + d` before `ω(t)`.
    SemiStrictIncrease { c: f64, d: f64 },
    /// The level set of `b` has Lebesgue measure zero.
    LevelSetNull { b: f64 },
    /// The level set of `b` is unbounded.
    LevelSetUnbounded { b: f64 },
    /// The path is constant on `[0, ∞)`.
    Constant,
    /// Some ray `[t, ∞)`, `t > 0`, is a ray of local extremum.
    RayOfLocalExtremum { kind: Extremum },
    /// `ω'(t)` exists for no `t`.
    NowhereDifferentiable,
}

impl EventPredicate for Event {
    fn name(&self) -> String {
        match self {
            Event::Nothing => "nothing".into(),
            Event::Everything => "everything".into(),
            Event::IsolatedLevelPoint { b } => format!("isolated-level-point(b={b})"),
            Event::LeavesLevel { b, a, d } => format!("leaves-level(b={b},a={a},D={d})"),
            Event::MonotoneNonConstant => "monotone-non-constant".into(),
            Event::SemiStrictIncrease { c, d } => format!("semi-strict-increase(C={c},D={d})"),
            Event::LevelSetNull { b } => format!("level-set-null(b={b})"),
            Event::LevelSetUnbounded { b } => format!("level-set-unbounded(b={b})"),
            Event::Constant => "constant".into(),
            Event::RayOfLocalExtremum { kind } => format!("ray-of-local-extremum({kind:?})").to_lowercase(),
            Event::NowhereDifferentiable => "nowhere-differentiable".into(),
        }
    }

    fn evaluate(&self, path: &Path) -> Verdict {
        let open_tail = path.tail() == Tail::Truncated;
        let t = path.times();
        let v = path.values();
        match *self {
            Event::Nothing => Verdict::Fails,
            Event::Everything => Verdict::Holds,
            Event::IsolatedLevelPoint { b } => isolated_level_point(path, b),
            Event::LeavesLevel { b, a, d } => leaves_level(path, b, a, d),
            Event::MonotoneNonConstant => {
                if v.windows(2).any(|w| w[0] != w[1]) {
                    Verdict::Holds
                } else if open_tail {
                    Verdict::Undetermined
                } else {
                    Verdict::Fails
                }
            }
            Event::SemiStrictIncrease { c, d } => semi_strict_increase(path, c, d),
            Event::LevelSetNull { b } => {
                let flat_at_b = v.windows(2).any(|w| w[0] == b && w[1] == b);
                if flat_at_b {
                    Verdict::Fails
                } else if *v.last().unwrap() == b {
                    if open_tail {
                        Verdict::Undetermined
                    } else {
                        Verdict::Fails
                    }
                } else {
                    Verdict::Holds
                }
            }
            Event::LevelSetUnbounded { b } => {
                if open_tail {
                    Verdict::Undetermined
                } else {
                    Verdict::from_bool(*v.last().unwrap() == b)
                }
            }
            Event::Constant => {
                if v.iter().any(|&x| x != v[0]) {
                    Verdict::Fails
                } else if open_tail {
                    Verdict::Undetermined
                } else {
                    Verdict::Holds
                }
            }
            Event::RayOfLocalExtremum { kind } => {
                if open_tail {
                    return Verdict::Undetermined;
                }
                let last = *v.last().unwrap();
                let start = v.iter().rposition(|&x| x != last).map_or(0, |i| i + 1);
                if start == 0 || t[start] <= 0.0 {
                    return Verdict::Fails;
                }
                let from_below = v[start - 1] < last;
                Verdict::from_bool(match kind {
                    Extremum::Maximum => from_below,
                    Extremum::Minimum => !from_below,
                    Extremum::Either => true,
                })
            }
            // piecewise-linear paths are differentiable inside every segment
            Event::NowhereDifferentiable => Verdict::Fails,
        }
    }
}

fn isolated_level_point(path: &Path, b: f64) -> Verdict {
    let v = path.values();
    let n = v.len();
    for i in 0..n - 1 {
        let (u0, u1) = (v[i], v[i + 1]);
        if (u0 < b && b < u1) || (u1 < b && b < u0) {
            return Verdict::Holds;
        }
    }
    for i in 0..n {
        if v[i] != b {
            continue;
        }
        let left_off = i == 0 || v[i - 1] != b;
        let right_off = i + 1 < n && v[i + 1] != b;
        if left_off && right_off {
            return Verdict::Holds;
        }
        if left_off && i + 1 == n && i > 0 && path.tail() == Tail::Truncated {
            return Verdict::Undetermined;
        }
    }
    Verdict::Fails
}

fn leaves_level(path: &Path, b: f64, a: f64, d: f64) -> Verdict {
    let open = path.tail() == Tail::Truncated;
    let undecided = if open { Verdict::Undetermined } else { Verdict::Fails };
    let Ok(Some(entry)) = path.first_hit(a.max(0.0), &[b], false) else {
        return undecided;
    };
    match path.first_hit(entry.time, &[b, b + d], true) {
        Ok(Some(hit)) => Verdict::from_bool(hit.index == 1),
        _ => undecided,
    }
}

/// Exact check on the rising segments before `C` is first reached. For
/// a start `t` on a rising segment the outcome only changes when `ω(t)` or
/// `ω(t) + d` crosses a breakpoint value, so it suffices to test those
/// levels and the midpoints between them.
fn semi_strict_increase(path: &Path, c: f64, d: f64) -> Verdict {
    let t = path.times();
    let v = path.values();
    if v[0] != 0.0 {
        return Verdict::Fails;
    }
    let cap_time = match path.first_hit(0.0, &[c], false) {
        Ok(Some(h)) => h.time,
        _ => f64::INFINITY,
    };
    let open = path.tail() == Tail::Truncated;
    let mut undetermined = false;
    for i in 0..v.len() - 1 {
        let (s0, s1, u0, u1) = (t[i], t[i + 1], v[i], v[i + 1]);
        if !(u1 > u0) || s0 >= cap_time {
            continue;
        }
        let top = u1.min(if cap_time < s1 { c } else { u1 });
        let mut levels: Vec<f64> = vec![u0, top];
        for &x in v {
            for y in [x, x - d] {
                if y > u0 && y < top {
                    levels.push(y);
                }
            }
        }
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let mut probes = levels.clone();
        probes.extend(levels.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        for y in probes {
            if y >= top {
                continue;
            }
            let time = s0 + (y - u0) / (u1 - u0) * (s1 - s0);
            if time >= cap_time {
                continue;
            }
            // at a segment start the left neighbourhood must not exceed y
            if y == u0 && i > 0 && v[i - 1] > u0 {
                continue;
            }
            match path.first_hit(time, &[y, y + d], true) {
                Ok(Some(hit)) if hit.index == 1 => return Verdict::Holds,
                Ok(Some(_)) => {}
                _ => undetermined |= open,
            }
        }
    }
    if undetermined {
        Verdict::Undetermined
    } else {
        Verdict::Fails
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PathResult {
    pub index: usize,
    pub verdict: Verdict,
    #[serde(rename = "final")]
    pub final_value: f64,
    pub min: f64,
    /// The final value stands in for a limit over an open-ended path.
    pub horizon_limited: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WitnessStatus {
    /// `UpProb(E) ≤ S₀` on the evidence of the corpus.
    Valid { bound: f64 },
    /// The capital went negative on a corpus path.
    Invalid { path: usize, time: f64, value: f64 },
    /// On an event path the witness did not end at 1 or more.
    NotSuperhedging { path: usize, final_value: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub event: String,
    pub witness: String,
    pub initial_capital: f64,
    pub paths: Vec<PathResult>,
    /// Corpus paths on which the event holds and superhedging was checked.
    pub event_paths: usize,
    pub status: WitnessStatus,
}

impl WitnessReport {
    pub fn bound(&self) -> Option<f64> {
        match self.status {
            WitnessStatus::Valid { bound } => Some(bound),
            _ => None,
        }
    }
}

fn first_negative(trace: &CapitalTrace) -> Option<(f64, f64)> {
    trace
        .times
        .iter()
        .zip(&trace.capital)
        .find(|(_, &k)| k < -POSITIVITY_TOL)
        .map(|(&t, &k)| (t, k))
}

pub fn witness_upper_bound(
    event: &dyn EventPredicate,
    witness: &dyn CapitalProcess,
    corpus: &[Path],
) -> Result<WitnessReport> {
    if corpus.is_empty() {
        return domain("corpus is empty");
    }
    let mut paths = Vec::with_capacity(corpus.len());
    let mut status = None;
    let mut event_paths = 0;
    for (index, path) in corpus.iter().enumerate() {
        let verdict = event.evaluate(path);
        let trace = witness.evaluate(path)?;
        if status.is_none() {
            if let Some((time, value)) = first_negative(&trace) {
                status = Some(WitnessStatus::Invalid {
                    path: index,
                    time,
                    value,
                });
            }
        }
        if verdict == Verdict::Holds {
            event_paths += 1;
            if status.is_none() && trace.final_value < 1.0 - POSITIVITY_TOL {
                status = Some(WitnessStatus::NotSuperhedging {
                    path: index,
                    final_value: trace.final_value,
                });
            }
        }
        paths.push(PathResult {
            index,
            verdict,
            final_value: trace.final_value,
            min: trace.min_value,
            horizon_limited: trace.horizon_limited(),
        });
    }
    Ok(WitnessReport {
        event: event.name(),
        witness: witness.name(),
        initial_capital: witness.initial_capital(),
        paths,
        event_paths,
        status: status.unwrap_or(WitnessStatus::Valid {
            bound: witness.initial_capital(),
        }),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub process: String,
    pub path: usize,
    pub time: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceVerdict {
    pub pass: bool,
    pub processes: usize,
    pub paths: usize,
    pub counterexample: Option<Counterexample>,
}

/// Every process must keep its initial capital, exactly, on every constant
/// path.
pub fn coherence_check(library: &[&dyn CapitalProcess], constant_paths: &[Path]) -> Result<CoherenceVerdict> {
    for (i, p) in constant_paths.iter().enumerate() {
        if p.values().iter().any(|&x| x != p.values()[0]) {
            return domain(format!("corpus path {i} is not constant"));
        }
    }
    for process in library {
        for (index, path) in constant_paths.iter().enumerate() {
            let trace = process.evaluate(path)?;
            let initial = process.initial_capital();
            if let Some((&time, &value)) = trace.times.iter().zip(&trace.capital).find(|(_, &k)| k != initial) {
                return Ok(CoherenceVerdict {
                    pass: false,
                    processes: library.len(),
                    paths: constant_paths.len(),
                    counterexample: Some(Counterexample {
                        process: process.name(),
                        path: index,
                        time,
                        value,
                    }),
                });
            }
        }
    }
    Ok(CoherenceVerdict {
        pass: true,
        processes: library.len(),
        paths: constant_paths.len(),
        counterexample: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NullEvidence {
    pub index: usize,
    /// Members that ended at 1 or more.
    pub covering: usize,
    pub composite_final: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NullClaim {
    pub event: String,
    /// `Σ 2⁻ⁿ`.
    pub initial_capital: f64,
    pub evidence: Vec<NullEvidence>,
    pub verdict: Verdict,
}

/// Sums members `n = 1, 2, …` with initial capitals `2⁻ⁿ` into one process
/// starting from at most 1. On an event path covered by `j` members it ends
/// at `j` or more, so adding members makes it grow without bound.
pub fn null_witness_form(
    event: &dyn EventPredicate,
    members: &[&dyn CapitalProcess],
    corpus: &[Path],
) -> Result<NullClaim> {
    let mut initial = 0.0;
    for (k, m) in members.iter().enumerate() {
        let want = 0.5f64.powi(k as i32 + 1);
        let got = m.initial_capital();
        if (got - want).abs() > 1e-15 * want {
            return domain(format!("member {} starts from {got}, expected 2^-{}", k + 1, k + 1));
        }
        initial += got;
    }
    let mut evidence = Vec::new();
    for (index, path) in corpus.iter().enumerate() {
        if event.evaluate(path) != Verdict::Holds {
            continue;
        }
        let mut covering = 0;
        let mut total = 0.0;
        for m in members {
            let trace = m.evaluate(path)?;
            if let Some((time, value)) = first_negative(&trace) {
                return domain(format!(
                    "member {} is negative ({value}) at time {time} on path {index}",
                    m.name()
                ));
            }
            if trace.final_value >= 1.0 - POSITIVITY_TOL {
                covering += 1;
            }
            total += trace.final_value;
        }
        evidence.push(NullEvidence {
            index,
            covering,
            composite_final: total,
        });
    }
    let verdict = if evidence.is_empty() {
        Verdict::Undetermined
    } else {
        Verdict::from_bool(evidence.iter().all(|e| e.covering == members.len()))
    };
    Ok(NullClaim {
        event: event.name(),
        initial_capital: initial,
        evidence,
        verdict,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SideDemo {
    pub family: String,
    pub paths: usize,
    /// Paths on which this side of the pair is realised.
    pub realised: usize,
    /// No piecewise-linear path can realise this side.
    pub out_of_path_class: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub event: String,
    pub event_side: SideDemo,
    pub complement_side: SideDemo,
}

fn side(family: &str, paths: &[Path], event: &Event, want: Verdict) -> SideDemo {
    SideDemo {
        family: family.to_string(),
        paths: paths.len(),
        realised: paths.iter().filter(|p| event.evaluate(p) == want).count(),
        out_of_path_class: false,
    }
}

/// Exhibits martingale paths on both sides of a completely uncertain event.
pub fn uncertainty_demo(event: Event, seed: u64, samples: usize) -> Result<DemoReport> {
    let samples = samples.max(1);
    let walks = |stop: Option<f64>| -> Result<Vec<Path>> {
        (0..samples as u64)
            .map(|i| {
                let s = seed.wrapping_add(i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                match stop {
                    Some(level) => gen_stopped_random_walk(s, 4096, 1.0, 0.125, 0.0, level),
                    None => gen_random_walk(s, 256, 1.0, 0.125, 0.0),
                }
            })
            .collect()
    };
    let (event_side, complement_side) = match event {
        Event::LevelSetNull { b } => (
            side(
                "constant at b+1",
                &[gen_constant(b + 1.0, 1.0)?],
                &event,
                Verdict::Holds,
            ),
            side("constant at b", &[gen_constant(b, 1.0)?], &event, Verdict::Fails),
        ),
        Event::LevelSetUnbounded { b } => (
            side("constant at b", &[gen_constant(b, 1.0)?], &event, Verdict::Holds),
            side(
                "constant at b+1",
                &[gen_constant(b + 1.0, 1.0)?],
                &event,
                Verdict::Fails,
            ),
        ),
        Event::Constant => (
            side("constant at 0", &[gen_constant(0.0, 1.0)?], &event, Verdict::Holds),
            side("random walk", &walks(None)?, &event, Verdict::Fails),
        ),
        Event::RayOfLocalExtremum { .. } => (
            side("random walk stopped at ±1", &walks(Some(1.0))?, &event, Verdict::Holds),
            side("constant at 0", &[gen_constant(0.0, 1.0)?], &event, Verdict::Fails),
        ),
        Event::NowhereDifferentiable => (
            SideDemo {
                family: "none: piecewise-linear paths are differentiable almost everywhere".into(),
                paths: 0,
                realised: 0,
                out_of_path_class: true,
            },
            side("constant at 0", &[gen_constant(0.0, 1.0)?], &event, Verdict::Fails),
        ),
        other => {
            return domain(format!(
                "{} is not a catalogued completely uncertain event",
                other.name()
            ))
        }
    };
    Ok(DemoReport {
        event: event.name(),
        event_side,
        complement_side,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::{isolated_point_witness, EventParams};
    use crate::path::{gen_violation, Violation};
    use crate::trading::buy_and_hold;

    fn line(points: &[(f64, f64)]) -> Path {
        Path::new(
            points.iter().map(|p| p.0).collect(),
            points.iter().map(|p| p.1).collect(),
        )
        .unwrap()
    }

    #[test]
    fn trivial_bounds() {
        let corpus = vec![gen_constant(0.0, 1.0).unwrap(), line(&[(0.0, 0.0), (1.0, 3.0)])];
        let zero = buy_and_hold(0.0, 0.0, 0.0);
        let r = witness_upper_bound(&Event::Nothing, &zero, &corpus).unwrap();
        assert_eq!(r.bound(), Some(0.0));
        let one = buy_and_hold(1.0, 0.0, 0.0);
        let r = witness_upper_bound(&Event::Everything, &one, &corpus).unwrap();
        assert_eq!(r.bound(), Some(1.0));
        assert_eq!(r.event_paths, 2);
        assert!(witness_upper_bound(&Event::Everything, &one, &[]).is_err());
    }

    #[test]
    fn isolated_point_witness_bound() {
        let corpus: Vec<Path> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&touch| {
                gen_violation(Violation::IsolatedLevelPoint {
                    b: 0.0,
                    d: 1.0,
                    touch_at: touch,
                })
                .unwrap()
            })
            .collect();
        let event = Event::LeavesLevel { b: 0.0, a: 0.0, d: 1.0 };
        let w = isolated_point_witness(EventParams::new(0.0, 0.0, 1.0, 0.01).unwrap());
        let r = witness_upper_bound(&event, &w, &corpus).unwrap();
        assert_eq!(r.event_paths, 3);
        assert_eq!(r.bound(), Some(0.01));
    }

    #[test]
    fn negative_witness_is_invalid() {
        let short = buy_and_hold(0.5, 0.0, -1.0);
        let up = line(&[(0.0, 0.0), (1.0, 2.0)]);
        let r = witness_upper_bound(&Event::Everything, &short, &[up]).unwrap();
        assert!(matches!(r.status, WitnessStatus::Invalid { path: 0, .. }));
    }

    #[test]
    fn predicates_on_simple_paths() {
        let up = line(&[(0.0, 0.0), (2.0, 2.0)]);
        assert_eq!(
            Event::SemiStrictIncrease { c: 2.0, d: 1.0 }.evaluate(&up),
            Verdict::Holds
        );
        assert_eq!(
            Event::SemiStrictIncrease { c: 0.5, d: 1.0 }.evaluate(&up),
            Verdict::Holds
        );
        assert_eq!(
            Event::SemiStrictIncrease { c: 2.0, d: 3.0 }.evaluate(&up),
            Verdict::Fails
        );
        let tent = line(&[(0.0, 0.0), (1.0, 0.5), (2.0, -1.0)]);
        assert_eq!(
            Event::SemiStrictIncrease { c: 2.0, d: 1.0 }.evaluate(&tent),
            Verdict::Fails
        );
        let flat = gen_constant(3.0, 1.0).unwrap();
        assert_eq!(Event::Constant.evaluate(&flat), Verdict::Holds);
        assert_eq!(Event::LevelSetUnbounded { b: 3.0 }.evaluate(&flat), Verdict::Holds);
        assert_eq!(Event::LevelSetNull { b: 3.0 }.evaluate(&flat), Verdict::Fails);
        assert_eq!(Event::IsolatedLevelPoint { b: 1.0 }.evaluate(&up), Verdict::Holds);
        assert_eq!(Event::IsolatedLevelPoint { b: 3.0 }.evaluate(&flat), Verdict::Fails);
        let ray = line(&[(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)]);
        assert_eq!(
            Event::RayOfLocalExtremum {
                kind: Extremum::Maximum
            }
            .evaluate(&ray),
            Verdict::Holds
        );
        assert_eq!(
            Event::RayOfLocalExtremum {
                kind: Extremum::Minimum
            }
            .evaluate(&ray),
            Verdict::Fails
        );
        assert_eq!(
            Event::RayOfLocalExtremum { kind: Extremum::Either }.evaluate(&flat),
            Verdict::Fails
        );
    }

    #[test]
    fn coherence_on_constant_paths() {
        let corpus = vec![gen_constant(0.0, 3.0).unwrap(), gen_constant(5.0, 3.0).unwrap()];
        let a = buy_and_hold(1.0, 0.0, 2.0);
        let b = isolated_point_witness(EventParams::new(0.0, 0.0, 1.0, 0.1).unwrap());
        let v = coherence_check(&[&a, &b], &corpus).unwrap();
        assert!(v.pass);
        assert!(coherence_check(&[&a], &[line(&[(0.0, 0.0), (1.0, 1.0)])]).is_err());
    }

    #[test]
    fn null_form_grows_with_members() {
        let path = gen_violation(Violation::IsolatedLevelPoint {
            b: 0.0,
            d: 1.0,
            touch_at: 1.0,
        })
        .unwrap();
        let event = Event::LeavesLevel { b: 0.0, a: 0.0, d: 1.0 };
        let members: Vec<_> = (1..=10)
            .map(|n| isolated_point_witness(EventParams::new(0.0, 0.0, 1.0, 0.5f64.powi(n)).unwrap()))
            .collect();
        let refs: Vec<&dyn CapitalProcess> = members.iter().map(|m| m as &dyn CapitalProcess).collect();
        let claim = null_witness_form(&event, &refs, std::slice::from_ref(&path)).unwrap();
        assert!(claim.initial_capital <= 1.0);
        assert_eq!(claim.evidence[0].covering, 10);
        assert!(claim.evidence[0].composite_final >= 10.0);
        let none = null_witness_form(&event, &refs, &[gen_constant(0.5, 1.0).unwrap()]).unwrap();
        assert_eq!(none.verdict, Verdict::Undetermined);
        assert!(null_witness_form(&event, &refs[1..], &[path]).is_err());
    }

    #[test]
    fn demos() {
        let r = uncertainty_demo(Event::LevelSetUnbounded { b: 0.0 }, 1, 1).unwrap();
        assert_eq!(r.event_side.realised, 1);
        assert_eq!(r.complement_side.realised, 1);
        let r = uncertainty_demo(Event::Constant, 7, 20).unwrap();
        assert_eq!(r.complement_side.realised, 20);
        let r = uncertainty_demo(Event::RayOfLocalExtremum { kind: Extremum::Either }, 3, 20).unwrap();
        assert!(r.event_side.realised >= 18);
        assert!(uncertainty_demo(Event::MonotoneNonConstant, 0, 1).is_err());
    }
}
