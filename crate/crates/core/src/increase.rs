//! Witness that a path has no point of semi-strict increase.
//!
//! The path is cut into cycles. Cycle `n` starts at `U_{n-1}`, when the
//! running maximum `M_{n-1}` is revisited, and ends at `T_{n-1}`, the first
//! later time the price is at `M_{n-1} − ε` or `M_{n-1} + D`. Two processes
//! split the event between them:
//!
//! - the second process holds one share during every cycle and wins `D` as
//!   soon as a cycle ends on the upper level;
//! - the first process bets against a bundle of `M` layers per cycle. Layer
//!   `m` pays `δ` if the price rises `mδ` and `0` if it falls `ε`, so the
//!   bundle costs `L` and pays at most the truncated increment `X̃_n`. The
//!   stakes follow the one-sided weak-law strategy with `c = √ε`, fed with
//!   the moves `x_n = L − X̃_n`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::path::{Path, Tail, TimeOrNever, LEVEL_TOL};
use crate::trading::{
    Anchor, CapitalProcess, CapitalTrace, ElementaryStrategy, Level, PortfolioRule, Schedule, StoppingRule, Trade,
};
use crate::wlln::{sceptic_stake, GameConfig};

/// Largest layer count tried by [`choose_delta`].
pub const MAX_LAYERS: usize = 1 << 30;

/// Largest cycle count a schedule may ask for.
pub const MAX_CYCLES: usize = 1 << 24;

/// Tolerance for the layer and bundle identities, which hold exactly in real
/// arithmetic but go through a subtraction of nearby prices in floats.
pub const LAYER_TOL: f64 = 1e-12;

/// `N = ⌊1/(ε√k)⌋` for `ε = e^{-k}`, as a float.
pub fn cycle_count(k: f64) -> f64 {
    let epsilon = (-k).exp();
    (1.0 / (epsilon * k.sqrt())).floor()
}

/// Lower and upper Darboux sums of `x ↦ ε/(x + ε)` on `[0, √ε − ε]` with `M`
/// equal cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DarbouxSums {
    pub lower: f64,
    pub upper: f64,
    pub layers: usize,
}

/// `L = Σ_{m=1}^{M} εδ/(mδ+ε)` and `Upper = Σ_{m=0}^{M-1} εδ/(mδ+ε)`.
pub fn darboux_sums(epsilon: f64, delta: f64) -> Result<DarbouxSums> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return domain(format!("delta must be positive, got {delta}"));
    }
    let ratio = (epsilon.sqrt() - epsilon) / delta;
    let layers = ratio.round();
    if layers < 1.0 || (ratio - layers).abs() > 1e-9 * layers.max(1.0) {
        return domain(format!("(√ε − ε)/δ = {ratio} is not a positive integer"));
    }
    Ok(darboux_for_layers(epsilon, delta, layers as usize))
}

fn darboux_for_layers(epsilon: f64, delta: f64, layers: usize) -> DarbouxSums {
    let term = |m: usize| epsilon * delta / (m as f64 * delta + epsilon);
    let inner: f64 = (1..layers).map(term).sum();
    DarbouxSums {
        lower: inner + term(layers),
        upper: inner + term(0),
        layers,
    }
}

/// `δ = (√ε − ε)/M` with `M` doubled from 1 until `L ≥ (ε/3)·ln(1/ε)`.
pub fn choose_delta(epsilon: f64) -> Result<(f64, usize)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    let width = epsilon.sqrt() - epsilon;
    let target = epsilon / 3.0 * (1.0 / epsilon).ln();
    let mut layers = 1usize;
    while layers <= MAX_LAYERS {
        let delta = width / layers as f64;
        if darboux_for_layers(epsilon, delta, layers).lower >= target {
            return Ok((delta, layers));
        }
        layers *= 2;
    }
    Err(Error::Schedule(format!(
        "no δ with M ≤ 2^30 reaches L ≥ (ε/3)ln(1/ε) for ε = {epsilon}"
    )))
}

/// Every constant of the construction for `ε = e^{-k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncreaseSchedule {
    #[serde(rename = "epsilon_exponent")]
    pub k: u32,
    pub epsilon: f64,
    pub sqrt_epsilon: f64,
    pub delta: f64,
    #[serde(rename = "M")]
    pub layers: usize,
    #[serde(rename = "N")]
    pub cycles: usize,
    #[serde(rename = "L")]
    pub lower_sum: f64,
    pub upper_sum: f64,
    /// `√ε·ln(1/ε)`, added to the first process's initial capital.
    pub margin: f64,
    #[serde(rename = "C")]
    pub cap: f64,
    #[serde(rename = "D")]
    pub rise: f64,
}

impl IncreaseSchedule {
    pub fn new(k: u32, cap: f64, rise: f64) -> Result<Self> {
        if k == 0 {
            return domain("epsilon exponent k must be at least 1");
        }
        if !(cap > 0.0 && cap.is_finite() && rise > 0.0 && rise.is_finite()) {
            return domain(format!("C and D must be positive, got C={cap}, D={rise}"));
        }
        let kf = f64::from(k);
        let epsilon = (-kf).exp();
        let sqrt_epsilon = (-kf / 2.0).exp();
        if sqrt_epsilon - epsilon > rise {
            return domain(format!(
                "√ε − ε = {} exceeds D = {rise}; take a larger k",
                sqrt_epsilon - epsilon
            ));
        }
        let n = cycle_count(kf);
        if n > MAX_CYCLES as f64 {
            return Err(Error::Schedule(format!("k = {k} needs {n:e} cycles")));
        }
        let (delta, layers) = choose_delta(epsilon)?;
        let sums = darboux_for_layers(epsilon, delta, layers);
        let schedule = IncreaseSchedule {
            k,
            epsilon,
            sqrt_epsilon,
            delta,
            layers,
            cycles: n as usize,
            lower_sum: sums.lower,
            upper_sum: sums.upper,
            margin: sqrt_epsilon * kf,
            cap,
            rise,
        };
        let worst = schedule.lower_sum.max(schedule.truncation() - schedule.lower_sum);
        if worst > sqrt_epsilon {
            return Err(Error::Schedule(format!(
                "moves L − X̃ can reach {worst} > √ε = {sqrt_epsilon}"
            )));
        }
        Ok(schedule)
    }

    /// `√ε − ε`, the truncation level of the increments.
    pub fn truncation(&self) -> f64 {
        self.sqrt_epsilon - self.epsilon
    }

    /// `ln(1/ε) = k`.
    pub fn log_inv_epsilon(&self) -> f64 {
        f64::from(self.k)
    }

    /// `εN`, the second process's initial capital.
    pub fn second_initial(&self) -> f64 {
        self.epsilon * self.cycles as f64
    }

    /// `1 + √ε·ln(1/ε)`, the first process's initial capital.
    pub fn first_initial(&self) -> f64 {
        1.0 + self.margin
    }

    /// `εδ/(mδ+ε)` and `δ/(mδ+ε)` for layer `m`.
    pub fn layer(&self, m: usize) -> (f64, f64) {
        let denom = m as f64 * self.delta + self.epsilon;
        (self.epsilon * self.delta / denom, self.delta / denom)
    }

    fn game(&self) -> GameConfig {
        GameConfig {
            rounds: self.cycles,
            move_bound: self.sqrt_epsilon,
        }
    }
}

/// How a cycle ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exit {
    /// At `M_{n-1} − ε`.
    Lower,
    /// At `M_{n-1} + D`.
    Upper,
    /// Neither level is reached on the available path.
    Unresolved,
}

/// Cycle `n` (1-based) on `[U_{n-1}, T_{n-1}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cycle {
    pub n: usize,
    /// `M_{n-1}`.
    pub level: f64,
    /// `U_{n-1}`.
    pub start: f64,
    /// `T_{n-1}`.
    pub end: TimeOrNever,
    pub exit: Exit,
    /// `X_n = M_n − M_{n-1}`; `None` while unresolved.
    pub increment: Option<f64>,
    /// `X̃_n = min(X_n, √ε − ε)`.
    pub truncated: Option<f64>,
    /// Rise of the price above `M_{n-1}` inside `[U_{n-1}, T_{n-1})`. Equals
    /// `X_n` unless the previous cycle ended on the upper level and the price
    /// kept climbing before `U_{n-1}`.
    pub rise_in_cycle: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// `T_{N-1}` is finite.
    AllResolved,
    /// Some `U_n` or `T_n` is `inf ∅` on a path that is constant after its
    /// last breakpoint.
    Never,
    /// The available prefix ends before the next stopping time.
    Horizon,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleDecomposition {
    /// `M_0, M_1, …` for every resolved `T`.
    pub maxima: Vec<f64>,
    pub u_times: Vec<TimeOrNever>,
    pub t_times: Vec<TimeOrNever>,
    pub cycles: Vec<Cycle>,
    pub termination: Termination,
    /// First cycle that ended on the upper level.
    pub upper_exit: Option<usize>,
    /// First time the price reaches `C`.
    pub cap_hit: TimeOrNever,
    /// The path was shifted to start from 0.
    pub rebased: bool,
}

impl CycleDecomposition {
    pub fn resolved(&self) -> usize {
        self.cycles.iter().filter(|c| c.exit != Exit::Unresolved).count()
    }

    /// `X̃_1, X̃_2, …` of the resolved cycles.
    pub fn truncated_increments(&self) -> Vec<f64> {
        self.cycles.iter().filter_map(|c| c.truncated).collect()
    }

    /// Whether `C` is attained before `T_{N-1}` (before the horizon if that
    /// time was not reached).
    pub fn cap_before_last_exit(&self) -> bool {
        match (self.cap_hit, self.t_times.last()) {
            (TimeOrNever::Never, _) => false,
            (TimeOrNever::At(c), Some(&TimeOrNever::At(t))) if self.termination == Termination::AllResolved => c < t,
            _ => true,
        }
    }
}

fn start_at_zero(path: &Path, rebase: bool) -> Result<(Path, bool)> {
    let v0 = path.values()[0];
    if v0 == 0.0 {
        Ok((path.clone(), false))
    } else if rebase {
        Ok((path.rebased_to_zero(), true))
    } else {
        domain(format!("the path starts at {v0}, not 0"))
    }
}

pub fn decompose_cycles(path: &Path, schedule: &IncreaseSchedule, rebase: bool) -> Result<CycleDecomposition> {
    let (path, rebased) = start_at_zero(path, rebase)?;
    let tail_never = if path.tail() == Tail::Constant {
        Termination::Never
    } else {
        Termination::Horizon
    };
    let eps = schedule.epsilon;
    let d = schedule.rise;
    let mut maxima = vec![0.0];
    let mut u_times = vec![TimeOrNever::At(0.0)];
    let mut t_times = Vec::new();
    let mut cycles = Vec::new();
    let mut upper_exit = None;
    let mut termination = Termination::AllResolved;
    let mut after_lower = true;

    for n in 1..=schedule.cycles {
        let level = maxima[n - 1];
        let Some(start) = u_times[n - 1].finite() else {
            termination = tail_never;
            break;
        };
        let hit = path.first_hit(start, &[level - eps, level + d], true)?;
        let Some(hit) = hit else {
            t_times.push(TimeOrNever::Never);
            cycles.push(Cycle {
                n,
                level,
                start,
                end: TimeOrNever::Never,
                exit: Exit::Unresolved,
                increment: None,
                truncated: None,
                rise_in_cycle: None,
            });
            termination = tail_never;
            break;
        };
        let end = hit.time;
        let exit = if hit.index == 0 { Exit::Lower } else { Exit::Upper };
        if exit == Exit::Upper && upper_exit.is_none() {
            upper_exit = Some(n);
        }
        let next_max = path.running_max(end, true)?.max(level);
        let increment = next_max - level;
        let rise = if after_lower {
            increment
        } else {
            (path.max_on(start, end) - level).max(0.0)
        };
        cycles.push(Cycle {
            n,
            level,
            start,
            end: TimeOrNever::At(end),
            exit,
            increment: Some(increment),
            truncated: Some(increment.min(schedule.truncation())),
            rise_in_cycle: Some(rise),
        });
        t_times.push(TimeOrNever::At(end));
        maxima.push(next_max);
        after_lower = exit == Exit::Lower;
        if n < schedule.cycles {
            u_times.push(path.hitting_time(end, &[next_max], true)?);
        }
    }
    let cap_hit = path.hitting_time(0.0, &[schedule.cap], false)?;
    Ok(CycleDecomposition {
        maxima,
        u_times,
        t_times,
        cycles,
        termination,
        upper_exit,
        cap_hit,
        rebased,
    })
}

/// Layer `m` of a cycle starting at `start_time` from `start_level`: buy
/// `δ/(mδ+ε)` shares with capital `εδ/(mδ+ε)`, sell at the first of
/// `start_level + mδ` or `start_level − ε`.
pub fn layer_strategy(
    start_time: f64,
    start_level: f64,
    m: usize,
    schedule: &IncreaseSchedule,
) -> Result<ElementaryStrategy> {
    if m == 0 || m > schedule.layers {
        return domain(format!("layer index {m} outside 1..={}", schedule.layers));
    }
    layer_program(start_time, start_level, m, schedule.epsilon, schedule.delta)
}

/// [`layer_strategy`] for arbitrary `ε` and `δ`.
pub fn layer_program(
    start_time: f64,
    start_level: f64,
    m: usize,
    epsilon: f64,
    delta: f64,
) -> Result<ElementaryStrategy> {
    if m == 0 {
        return domain("layer index starts at 1");
    }
    if !(epsilon > 0.0 && delta > 0.0) {
        return domain(format!("epsilon and delta must be positive, got {epsilon}, {delta}"));
    }
    let denom = m as f64 * delta + epsilon;
    ElementaryStrategy::new(
        format!("layer(m={m},U={start_time})"),
        epsilon * delta / denom,
        vec![
            (
                StoppingRule::FixedTime(start_time),
                PortfolioRule::constant(delta / denom),
            ),
            (
                StoppingRule::hit(
                    vec![
                        Level::Absolute(start_level + m as f64 * delta),
                        Level::Absolute(start_level - epsilon),
                    ],
                    Anchor::Previous,
                ),
                PortfolioRule::flat(),
            ),
        ],
    )
}

/// The layer bundle of one cycle as trades: all layers bought at `U`, each
/// sold at its own exit. `scale` multiplies every position.
fn bundle_trades(path: &Path, cycle: &Cycle, schedule: &IncreaseSchedule, scale: f64) -> Result<Vec<Trade>> {
    let mut exits: Vec<(f64, f64, f64)> = Vec::with_capacity(schedule.layers);
    let mut total = 0.0;
    for m in 1..=schedule.layers {
        let (_, shares) = schedule.layer(m);
        total += shares;
        let up = cycle.level + m as f64 * schedule.delta;
        if let Some(hit) = path.first_hit(cycle.start, &[up, cycle.level - schedule.epsilon], false)? {
            exits.push((hit.time, hit.level, shares));
        }
    }
    exits.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut trades = vec![Trade {
        time: cycle.start,
        price: cycle.level,
        position: scale * total,
    }];
    let mut held = total;
    for (time, price, shares) in exits {
        held -= shares;
        if held < 0.5 * schedule.layer(schedule.layers).1 {
            held = 0.0;
        }
        match trades.last_mut() {
            Some(last) if last.time == time => last.position = scale * held,
            _ => trades.push(Trade {
                time,
                price,
                position: scale * held,
            }),
        }
    }
    Ok(trades)
}

/// Realised bundle value `S_n` over one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CyclePayoff {
    pub n: usize,
    /// `S_n(T_{n-1})`.
    pub payoff: f64,
    /// `max_t S_n(t)` on the cycle.
    pub bundle_max: f64,
}

/// Sum of the realised layer payoffs of cycle `n`; equals `δ⌊X̃_n/δ⌋` when
/// the cycle's rise equals its increment.
pub fn cycle_payoff(
    path: &Path,
    decomposition: &CycleDecomposition,
    n: usize,
    schedule: &IncreaseSchedule,
) -> Result<CyclePayoff> {
    let path = if decomposition.rebased {
        path.rebased_to_zero()
    } else {
        path.clone()
    };
    let cycle = decomposition
        .cycles
        .get(n.wrapping_sub(1))
        .ok_or_else(|| Error::Domain(format!("no cycle {n}")))?;
    if cycle.exit == Exit::Unresolved {
        return domain(format!("cycle {n} is unresolved"));
    }
    bundle_payoff(&path, cycle, schedule)
}

fn bundle_payoff(path: &Path, cycle: &Cycle, schedule: &IncreaseSchedule) -> Result<CyclePayoff> {
    let trace = Schedule {
        initial: schedule.lower_sum,
        trades: bundle_trades(path, cycle, schedule, 1.0)?,
    }
    .evaluate(path);
    let end = cycle.end.finite().unwrap_or(path.horizon());
    Ok(CyclePayoff {
        n: cycle.n,
        payoff: trace.value_at(end),
        bundle_max: trace.max_value(),
    })
}

/// One-share trend follower over the cycles, started from `εN`.
#[derive(Debug, Clone, Copy)]
pub struct SecondProcess {
    pub schedule: IncreaseSchedule,
}

impl SecondProcess {
    pub fn run(&self, path: &Path, decomposition: &CycleDecomposition) -> CapitalTrace {
        let mut trades = Vec::with_capacity(2 * decomposition.cycles.len());
        for cycle in &decomposition.cycles {
            trades.push(Trade {
                time: cycle.start,
                price: cycle.level,
                position: 1.0,
            });
            if let TimeOrNever::At(t) = cycle.end {
                let price = match cycle.exit {
                    Exit::Upper => cycle.level + self.schedule.rise,
                    _ => cycle.level - self.schedule.epsilon,
                };
                trades.push(Trade {
                    time: t,
                    price,
                    position: 0.0,
                });
            }
        }
        Schedule {
            initial: self.schedule.second_initial(),
            trades,
        }
        .evaluate(path)
    }
}

impl CapitalProcess for SecondProcess {
    fn name(&self) -> String {
        format!("increase-second(k={})", self.schedule.k)
    }

    fn initial_capital(&self) -> f64 {
        self.schedule.second_initial()
    }

    fn evaluate(&self, path: &Path) -> Result<CapitalTrace> {
        let decomposition = decompose_cycles(path, &self.schedule, true)?;
        Ok(self.run(&working_path(path, &decomposition), &decomposition))
    }
}

fn working_path(path: &Path, decomposition: &CycleDecomposition) -> Path {
    if decomposition.rebased {
        path.rebased_to_zero()
    } else {
        path.clone()
    }
}

/// The first process on one path with its per-cycle bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct FirstRun {
    pub trace: CapitalTrace,
    /// `s_n`.
    pub stakes: Vec<f64>,
    /// `x_n = L − X̃_n` for resolved cycles.
    pub moves: Vec<f64>,
    pub payoffs: Vec<CyclePayoff>,
    /// `L − S_n(T_{n-1})`, which is at least `x_n`.
    pub gains: Vec<f64>,
}

impl FirstRun {
    pub fn max_stake(&self) -> f64 {
        self.stakes.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_bundle(&self) -> f64 {
        self.payoffs.iter().map(|p| p.bundle_max).fold(0.0, f64::max)
    }
}

/// Weak-law stakes on the negated layer bundle, started from `1 + √ε ln(1/ε)`.
#[derive(Debug, Clone, Copy)]
pub struct FirstProcess {
    pub schedule: IncreaseSchedule,
}

impl FirstProcess {
    pub fn run(&self, path: &Path, decomposition: &CycleDecomposition) -> Result<FirstRun> {
        let s = &self.schedule;
        let game = s.game();
        let mut trades = Vec::new();
        let mut stakes = Vec::new();
        let mut moves = Vec::new();
        let mut payoffs = Vec::new();
        let mut gains = Vec::new();
        let mut prefix = 0.0;
        for cycle in &decomposition.cycles {
            let stake = sceptic_stake(&game, prefix);
            stakes.push(stake);
            trades.extend(bundle_trades(path, cycle, s, -stake)?);
            let payoff = bundle_payoff(path, cycle, s)?;
            payoffs.push(payoff);
            if let Some(xt) = cycle.truncated {
                let x = s.lower_sum - xt;
                if x.abs() > s.sqrt_epsilon {
                    return Err(Error::Schedule(format!(
                        "cycle {}: move {x} exceeds √ε = {}",
                        cycle.n, s.sqrt_epsilon
                    )));
                }
                moves.push(x);
                gains.push(s.lower_sum - payoff.payoff);
                prefix += x;
            }
        }
        let trace = Schedule {
            initial: s.first_initial(),
            trades,
        }
        .evaluate(path);
        Ok(FirstRun {
            trace,
            stakes,
            moves,
            payoffs,
            gains,
        })
    }
}

impl CapitalProcess for FirstProcess {
    fn name(&self) -> String {
        format!("increase-first(k={})", self.schedule.k)
    }

    fn initial_capital(&self) -> f64 {
        self.schedule.first_initial()
    }

    fn evaluate(&self, path: &Path) -> Result<CapitalTrace> {
        let decomposition = decompose_cycles(path, &self.schedule, true)?;
        Ok(self.run(&working_path(path, &decomposition), &decomposition)?.trace)
    }
}

/// Follows the cycle structure of a growing value sequence and lists the
/// levels at which either process can trade next. Used as the level oracle of
/// [`crate::path::gen_adapted_walk`].
#[derive(Debug, Clone)]
pub struct CycleTracker {
    schedule: IncreaseSchedule,
    seen: usize,
    running_max: f64,
    phase: Phase,
}

#[derive(Debug, Clone, Copy)]
enum Phase {
    InCycle(f64),
    Waiting(f64),
}

impl CycleTracker {
    /// The sequence must start at 0.
    pub fn new(schedule: IncreaseSchedule) -> Self {
        CycleTracker {
            schedule,
            seen: 0,
            running_max: f64::NEG_INFINITY,
            phase: Phase::InCycle(0.0),
        }
    }

    pub fn levels(&mut self, values: &[f64]) -> Vec<f64> {
        let s = &self.schedule;
        for (i, &v) in values.iter().enumerate().skip(self.seen) {
            self.running_max = self.running_max.max(v);
            if i == 0 {
                continue;
            }
            self.phase = match self.phase {
                Phase::InCycle(level)
                    if (v - (level - s.epsilon)).abs() <= LEVEL_TOL || (v - (level + s.rise)).abs() <= LEVEL_TOL =>
                {
                    Phase::Waiting(self.running_max)
                }
                Phase::Waiting(level) if (v - level).abs() <= LEVEL_TOL => Phase::InCycle(level),
                p => p,
            };
        }
        self.seen = values.len();
        match self.phase {
            Phase::Waiting(level) => vec![level],
            Phase::InCycle(level) => {
                let mut out = Vec::with_capacity(s.layers + 2);
                out.push(level - s.epsilon);
                out.push(level + s.rise);
                out.extend((1..=s.layers).map(|m| level + m as f64 * s.delta));
                out
            }
        }
    }
}

/// Which process the event dichotomy assigns to a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `T_{N-1} < ∞` and `C` not attained before it.
    First,
    /// `T_{N-1} = ∞` or `C` attained before it.
    Second,
    Undetermined,
}

pub fn branch_of(decomposition: &CycleDecomposition) -> Branch {
    if decomposition.cap_before_last_exit() {
        return Branch::Second;
    }
    match decomposition.termination {
        Termination::AllResolved => Branch::First,
        Termination::Never => Branch::Second,
        Termination::Horizon => Branch::Undetermined,
    }
}

/// The pair of processes for `E_{C,D}`, or for its mirror image (points of
/// semi-strict decrease) when `decrease` is set.
#[derive(Debug, Clone, Copy)]
pub struct IncreaseWitness {
    pub schedule: IncreaseSchedule,
    pub target_factor: f64,
    pub decrease: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Factors {
    pub first: f64,
    pub second: f64,
}

/// Per-path summary in the exported report format.
#[derive(Debug, Clone, Serialize)]
pub struct EcdReport {
    pub epsilon_exponent: u32,
    pub delta: f64,
    #[serde(rename = "M")]
    pub layers: usize,
    #[serde(rename = "N")]
    pub cycles: usize,
    #[serde(rename = "L")]
    pub lower_sum: f64,
    pub margin: f64,
    pub branch: Branch,
    pub factors: Factors,
    pub cycles_resolved: usize,
    /// `final − initial` of the first process, when all cycles resolved.
    pub bound_lhs: Option<f64>,
    /// `(Σ x_n)^{+,2}/(εN) − √ε ln(1/ε)`, when all cycles resolved.
    pub bound_rhs: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct EcdOutcome {
    pub decomposition: CycleDecomposition,
    pub first: FirstRun,
    pub second: CapitalTrace,
    pub report: EcdReport,
}

impl IncreaseWitness {
    pub fn first(&self) -> FirstProcess {
        FirstProcess {
            schedule: self.schedule,
        }
    }

    pub fn second(&self) -> SecondProcess {
        SecondProcess {
            schedule: self.schedule,
        }
    }

    pub fn evaluate(&self, path: &Path) -> Result<EcdOutcome> {
        let oriented = if self.decrease { path.negated() } else { path.clone() };
        let decomposition = decompose_cycles(&oriented, &self.schedule, true)?;
        let working = working_path(&oriented, &decomposition);
        let first = self.first().run(&working, &decomposition)?;
        let second = self.second().run(&working, &decomposition);
        let s = &self.schedule;
        let (bound_lhs, bound_rhs) = if decomposition.termination == Termination::AllResolved {
            let sum: f64 = first.moves.iter().sum();
            let pos = sum.max(0.0);
            (
                Some(first.trace.final_value - first.trace.initial),
                Some(pos * pos / s.second_initial() - s.margin),
            )
        } else {
            (None, None)
        };
        let report = EcdReport {
            epsilon_exponent: s.k,
            delta: s.delta,
            layers: s.layers,
            cycles: s.cycles,
            lower_sum: s.lower_sum,
            margin: s.margin,
            branch: branch_of(&decomposition),
            factors: Factors {
                first: first.trace.final_value / first.trace.initial,
                second: second.final_value / second.initial,
            },
            cycles_resolved: decomposition.resolved(),
            bound_lhs,
            bound_rhs,
        };
        Ok(EcdOutcome {
            decomposition,
            first,
            second,
            report,
        })
    }
}

/// Smallest `k` with `e^{-k}·N(k) ≤ D/K`.
pub fn minimal_exponent(rise: f64, target_factor: f64) -> Option<u32> {
    (1..=100_000u32).find(|&k| {
        let kf = f64::from(k);
        (-kf).exp() * cycle_count(kf) <= rise / target_factor
    })
}

pub fn e_cd_witness(cap: f64, rise: f64, k: u32, target_factor: f64) -> Result<IncreaseWitness> {
    if !(target_factor > 0.0 && target_factor.is_finite()) {
        return domain(format!("target factor must be positive, got {target_factor}"));
    }
    let kf = f64::from(k.max(1));
    let en = (-kf).exp() * cycle_count(kf);
    if en > rise / target_factor {
        let needed =
            minimal_exponent(rise, target_factor).map_or_else(|| "no k ≤ 100000".to_string(), |k| format!("k ≥ {k}"));
        return Err(Error::Schedule(format!(
            "εN = {en} exceeds D/K = {}; factor {target_factor} needs {needed}",
            rise / target_factor
        )));
    }
    Ok(IncreaseWitness {
        schedule: IncreaseSchedule::new(k, cap, rise)?,
        target_factor,
        decrease: false,
    })
}
