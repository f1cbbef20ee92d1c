//! Sceptic's side of the protocol.
//!
//! An [`ElementaryStrategy`] is a finite list of (stopping rule, portfolio)
//! pairs plus an initial capital. Evaluating it on a [`Path`] resolves the
//! stopping times in order and produces a [`CapitalTrace`]: the elementary
//! capital process
//!
//! ```text
//! K_t = c + Σ_n h_n · (ω(τ_{n+1} ∧ t) − ω(τ_n ∧ t))
//! ```
//!
//! sampled at every path breakpoint and every trading time. Capital is linear
//! in price between those times, so the trace is exact. Positive capital
//! processes are finite weighted sums of such traces.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::path::{Path, Tail, TimeOrNever};

/// Tolerance below zero tolerated by positivity checks (float rounding of
/// price differences at exactly hit levels).
pub const POSITIVITY_TOL: f64 = 1e-12;

/// A level of a [`StoppingRule::HitLevels`] rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Absolute(f64),
    /// Offset from the price at the time the search starts.
    Relative(f64),
}

/// Where a hitting-time search starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// At the given time, or at the previous stopping time if that is later.
    Time(f64),
    /// At the previously resolved stopping time.
    Previous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingRule {
    /// `max(t, τ_{n-1})`.
    FixedTime(f64),
    HitLevels {
        levels: Vec<Level>,
        from: Anchor,
        strict_after: bool,
    },
    Never,
}

impl StoppingRule {
    pub fn hit(levels: Vec<Level>, from: Anchor) -> Self {
        StoppingRule::HitLevels {
            levels,
            from,
            strict_after: false,
        }
    }
}

/// A view of the path restricted to `[0, until]`; portfolio functionals only
/// see this prefix.
#[derive(Clone, Copy)]
pub struct PathPrefix<'a> {
    path: &'a Path,
    until: f64,
    price: f64,
}

impl<'a> PathPrefix<'a> {
    pub fn until(&self) -> f64 {
        self.until
    }

    /// Price at the stopping time the portfolio is chosen at.
    pub fn current_price(&self) -> f64 {
        self.price
    }

    pub fn value_at(&self, t: f64) -> Option<f64> {
        (t >= 0.0 && t <= self.until).then(|| self.path.eval(t))
    }

    pub fn running_max(&self) -> f64 {
        self.path.max_on(0.0, self.until)
    }
}

type PrefixFn = Arc<dyn Fn(&PathPrefix<'_>) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Holding {
    Constant(f64),
    Prefix(PrefixFn),
}

/// Portfolio chosen at a stopping time, with its declared bound `B`.
#[derive(Clone)]
pub struct PortfolioRule {
    holding: Holding,
    scale: f64,
    bound: f64,
}

impl fmt::Debug for PortfolioRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.holding {
            Holding::Constant(h) => write!(f, "Constant({})", h * self.scale),
            Holding::Prefix(_) => write!(f, "Prefix(scale={})", self.scale),
        }?;
        write!(f, " |h| <= {}", self.bound)
    }
}

impl PortfolioRule {
    /// Constant holding, bound `|h|`.
    pub fn constant(h: f64) -> Self {
        PortfolioRule {
            holding: Holding::Constant(h),
            scale: 1.0,
            bound: h.abs(),
        }
    }

    pub fn flat() -> Self {
        Self::constant(0.0)
    }

    /// Holding computed from the path prefix up to the stopping time.
    pub fn from_prefix<F>(bound: f64, f: F) -> Self
    where
        F: Fn(&PathPrefix<'_>) -> f64 + Send + Sync + 'static,
    {
        PortfolioRule {
            holding: Holding::Prefix(Arc::new(f)),
            scale: 1.0,
            bound,
        }
    }

    pub fn bound(&self) -> f64 {
        self.bound * self.scale.abs()
    }

    pub(crate) fn scaled(&self, k: f64) -> Self {
        PortfolioRule {
            holding: self.holding.clone(),
            scale: self.scale * k,
            bound: self.bound,
        }
    }

    fn choose(&self, prefix: &PathPrefix<'_>) -> Result<f64> {
        let raw = match &self.holding {
            Holding::Constant(h) => *h,
            Holding::Prefix(f) => f(prefix),
        };
        if !raw.is_finite() || raw.abs() > self.bound * (1.0 + 1e-12) {
            return Err(Error::ContractViolation(format!(
                "portfolio {raw} at time {} exceeds declared bound {}",
                prefix.until, self.bound
            )));
        }
        Ok(raw * self.scale)
    }
}

/// Anything that yields a capital process on every path.
pub trait CapitalProcess: Send + Sync {
    fn name(&self) -> String;
    fn initial_capital(&self) -> f64;
    fn evaluate(&self, path: &Path) -> Result<CapitalTrace>;
}

impl<P: CapitalProcess + ?Sized> CapitalProcess for Box<P> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn initial_capital(&self) -> f64 {
        (**self).initial_capital()
    }
    fn evaluate(&self, path: &Path) -> Result<CapitalTrace> {
        (**self).evaluate(path)
    }
}

impl<P: CapitalProcess + ?Sized> CapitalProcess for Arc<P> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn initial_capital(&self) -> f64 {
        (**self).initial_capital()
    }
    fn evaluate(&self, path: &Path) -> Result<CapitalTrace> {
        (**self).evaluate(path)
    }
}

/// Sceptic's stopping-rule and portfolio program.
#[derive(Debug, Clone)]
pub struct ElementaryStrategy {
    name: String,
    initial_capital: f64,
    steps: Vec<(StoppingRule, PortfolioRule)>,
    liquidate_at: Option<f64>,
}

impl ElementaryStrategy {
    pub fn new(
        name: impl Into<String>,
        initial_capital: f64,
        steps: Vec<(StoppingRule, PortfolioRule)>,
    ) -> Result<Self> {
        if steps.is_empty() {
            return domain("strategy needs at least one stopping rule");
        }
        if !initial_capital.is_finite() {
            return domain("initial capital must be finite");
        }
        Ok(ElementaryStrategy {
            name: name.into(),
            initial_capital,
            steps,
            liquidate_at: None,
        })
    }

    pub fn steps(&self) -> &[(StoppingRule, PortfolioRule)] {
        &self.steps
    }

    /// Capital level at which the position is closed for good, if any.
    pub fn liquidation_threshold(&self) -> Option<f64> {
        self.liquidate_at
    }

    /// Resolves the stopping times on `path` into a trade list.
    pub fn schedule(&self, path: &Path) -> Result<Schedule> {
        let mut trades = Vec::with_capacity(self.steps.len());
        let mut prev: Option<(f64, f64)> = None;
        for (rule, portfolio) in &self.steps {
            let resolved = resolve(rule, path, prev)?;
            let Some((time, price)) = resolved else { break };
            let prefix = PathPrefix {
                path,
                until: time,
                price,
            };
            let position = portfolio.choose(&prefix)?;
            trades.push(Trade { time, price, position });
            prev = Some((time, price));
        }
        Ok(Schedule {
            initial: self.initial_capital,
            trades,
        })
    }
}

fn resolve(rule: &StoppingRule, path: &Path, prev: Option<(f64, f64)>) -> Result<Option<(f64, f64)>> {
    let prev_time = prev.map_or(0.0, |p| p.0);
    match rule {
        StoppingRule::Never => Ok(None),
        StoppingRule::FixedTime(t) => {
            if !(*t >= 0.0) {
                return domain(format!("negative fixed time {t}"));
            }
            match prev {
                Some((pt, price)) if pt >= *t => Ok(Some((pt, price))),
                _ => Ok(Some((*t, path.eval(*t)))),
            }
        }
        StoppingRule::HitLevels {
            levels,
            from,
            strict_after,
        } => {
            let (start, start_price) = match (from, prev) {
                (Anchor::Previous, Some(p)) => p,
                (Anchor::Previous, None) => (0.0, path.eval(0.0)),
                (Anchor::Time(t), Some((pt, price))) if pt >= *t => (pt, price),
                (Anchor::Time(t), _) => (*t, path.eval(*t)),
            };
            let start = start.max(prev_time);
            let absolute: Vec<f64> = levels
                .iter()
                .map(|l| match l {
                    Level::Absolute(x) => *x,
                    Level::Relative(dx) => start_price + dx,
                })
                .collect();
            Ok(path
                .first_hit(start, &absolute, *strict_after)?
                .map(|h| (h.time, h.level)))
        }
    }
}

impl CapitalProcess for ElementaryStrategy {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn initial_capital(&self) -> f64 {
        self.initial_capital
    }

    fn evaluate(&self, path: &Path) -> Result<CapitalTrace> {
        let trace = self.schedule(path)?.evaluate(path);
        Ok(match self.liquidate_at {
            Some(threshold) => trace.stopped_at(threshold),
            None => trace,
        })
    }
}

/// A position change: from `time` on Sceptic holds `position` shares,
/// traded at `price` (the exact path value at that time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trade {
    pub time: f64,
    pub price: f64,
    pub position: f64,
}

/// A strategy realised on one path: initial capital plus the resolved trades.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub initial: f64,
    pub trades: Vec<Trade>,
}

impl Schedule {
    /// Builds the capital trace on the union of path breakpoints and trade
    /// times up to the horizon. Capital at a trade time is settled exactly as
    /// `K + h·(p_new − p_old)`; a position still open at the horizon is marked
    /// to market and flagged `incomplete`.
    pub fn evaluate(&self, path: &Path) -> CapitalTrace {
        let horizon = path.horizon();
        let trades: Vec<&Trade> = self.trades.iter().filter(|t| t.time <= horizon).collect();
        let mut times = Vec::with_capacity(path.len() + trades.len());
        let mut capital = Vec::with_capacity(path.len() + trades.len());

        let mut settled = self.initial;
        let mut anchor_price = path.values()[0];
        let mut position = 0.0;
        let mut k = 0;
        for (&t, &v) in path.times().iter().zip(path.values()) {
            while k < trades.len() && trades[k].time <= t {
                let trade = trades[k];
                settled += position * (trade.price - anchor_price);
                anchor_price = trade.price;
                position = trade.position;
                if times.last() == Some(&trade.time) {
                    *capital.last_mut().unwrap() = settled;
                } else {
                    times.push(trade.time);
                    capital.push(settled);
                }
                k += 1;
            }
            if times.last() != Some(&t) {
                times.push(t);
                capital.push(settled + position * (v - anchor_price));
            }
        }
        let incomplete = position != 0.0 && !self.trades.iter().any(|t| t.time > horizon && t.position == 0.0);
        CapitalTrace::from_parts(
            times,
            capital,
            self.initial,
            incomplete,
            path.fingerprint(),
            path.tail(),
        )
    }
}

/// Capital as a function of time on one path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapitalTrace {
    pub times: Vec<f64>,
    pub capital: Vec<f64>,
    pub initial: f64,
    /// A position was still open at the horizon and was marked to market.
    pub incomplete: bool,
    pub ever_negative: bool,
    pub min_value: f64,
    pub final_value: f64,
    #[serde(skip)]
    path_fingerprint: u64,
    #[serde(skip)]
    tail: Tail,
}

/// Positivity verdict of [`check_positive`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Positivity {
    Positive,
    ViolatedAt { time: f64, value: f64 },
}

impl CapitalTrace {
    fn from_parts(
        times: Vec<f64>,
        capital: Vec<f64>,
        initial: f64,
        incomplete: bool,
        path_fingerprint: u64,
        tail: Tail,
    ) -> Self {
        let min_value = capital.iter().copied().fold(f64::INFINITY, f64::min);
        let final_value = *capital.last().expect("trace has a point at time 0");
        CapitalTrace {
            ever_negative: min_value < -POSITIVITY_TOL,
            times,
            capital,
            initial,
            incomplete,
            min_value,
            final_value,
            path_fingerprint,
            tail,
        }
    }

    /// The trace of a process that holds nothing.
    pub fn flat(path: &Path, capital: f64) -> Self {
        Schedule {
            initial: capital,
            trades: Vec::new(),
        }
        .evaluate(path)
    }

    pub fn path_fingerprint(&self) -> u64 {
        self.path_fingerprint
    }

    /// Whether the underlying path was a truncated sample.
    pub fn horizon_limited(&self) -> bool {
        self.tail == Tail::Truncated
    }

    pub fn max_value(&self) -> f64 {
        self.capital.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Capital at time `t` (linear between trace points, constant after).
    pub fn value_at(&self, t: f64) -> f64 {
        let i = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        if i + 1 >= self.times.len() || self.times[i] == t {
            return self.capital[i];
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let (c0, c1) = (self.capital[i], self.capital[i + 1]);
        c0 + (c1 - c0) * ((t - t0) / (t1 - t0))
    }

    /// First time the capital reaches `level` from below (exact on segments).
    pub fn first_time_at_least(&self, level: f64) -> TimeOrNever {
        if self.capital[0] >= level {
            return TimeOrNever::At(self.times[0]);
        }
        for i in 1..self.times.len() {
            let (c0, c1) = (self.capital[i - 1], self.capital[i]);
            if c1 >= level {
                let (t0, t1) = (self.times[i - 1], self.times[i]);
                let t = t0 + (level - c0) / (c1 - c0) * (t1 - t0);
                return TimeOrNever::At(t.clamp(t0, t1));
            }
        }
        TimeOrNever::Never
    }

    /// Pointwise multiple `w · K`.
    pub fn scaled(&self, w: f64) -> CapitalTrace {
        CapitalTrace::from_parts(
            self.times.clone(),
            self.capital.iter().map(|c| w * c).collect(),
            w * self.initial,
            self.incomplete && w != 0.0,
            self.path_fingerprint,
            self.tail,
        )
    }

    /// The trace frozen at the first time it reaches `threshold`.
    pub fn stopped_at(&self, threshold: f64) -> CapitalTrace {
        let Some(stop) = self.first_time_at_least(threshold).finite() else {
            return self.clone();
        };
        let mut times = Vec::new();
        let mut capital = Vec::new();
        for (&t, &c) in self.times.iter().zip(&self.capital) {
            if t < stop {
                times.push(t);
                capital.push(c);
            }
        }
        times.push(stop);
        capital.push(if self.capital[0] >= threshold && stop == self.times[0] {
            self.capital[0]
        } else {
            threshold
        });
        if let Some(&last) = self.times.last() {
            if last > stop {
                times.push(last);
                capital.push(*capital.last().unwrap());
            }
        }
        CapitalTrace::from_parts(times, capital, self.initial, false, self.path_fingerprint, self.tail)
    }

    /// Writes `time,capital` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,capital\n");
        for (t, c) in self.times.iter().zip(&self.capital) {
            out.push_str(&format!("{t:.16e},{c:.16e}\n"));
        }
        out
    }

    /// JSON sidecar `{initial, final, min, incomplete, ever_negative}`.
    pub fn sidecar(&self) -> TraceSummary {
        TraceSummary {
            initial: self.initial,
            final_value: self.final_value,
            min: self.min_value,
            incomplete: self.incomplete,
            ever_negative: self.ever_negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub initial: f64,
    #[serde(rename = "final")]
    pub final_value: f64,
    pub min: f64,
    pub incomplete: bool,
    pub ever_negative: bool,
}

/// Evaluates an elementary strategy (Sceptic's capital on `path`).
pub fn eval_elementary(strategy: &ElementaryStrategy, path: &Path) -> Result<CapitalTrace> {
    strategy.evaluate(path)
}

/// Pointwise sum of traces on the union of their breakpoints.
pub fn sum_processes(traces: &[CapitalTrace]) -> Result<CapitalTrace> {
    let Some(first) = traces.first() else {
        return domain("cannot sum an empty list of traces");
    };
    if traces.len() == 1 {
        return Ok(first.clone());
    }
    if let Some(bad) = traces.iter().find(|t| t.path_fingerprint != first.path_fingerprint) {
        return domain(format!(
            "traces come from different paths ({:x} vs {:x})",
            first.path_fingerprint, bad.path_fingerprint
        ));
    }
    let mut times: Vec<f64> = traces.iter().flat_map(|t| t.times.iter().copied()).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let capital = times
        .iter()
        .map(|&t| traces.iter().map(|tr| tr.value_at(t)).sum())
        .collect();
    Ok(CapitalTrace::from_parts(
        times,
        capital,
        traces.iter().map(|t| t.initial).sum(),
        traces.iter().any(|t| t.incomplete),
        first.path_fingerprint,
        first.tail,
    ))
}

/// Scans the trace for the first point below zero.
pub fn check_positive(trace: &CapitalTrace) -> Positivity {
    trace
        .times
        .iter()
        .zip(&trace.capital)
        .find(|(_, &c)| c < -POSITIVITY_TOL)
        .map_or(Positivity::Positive, |(&time, &value)| Positivity::ViolatedAt {
            time,
            value,
        })
}

/// Scales a strategy by `multiplier` and liquidates it the first time the
/// scaled capital reaches `threshold`.
pub fn stop_at_threshold(strategy: &ElementaryStrategy, multiplier: f64, threshold: f64) -> Result<ElementaryStrategy> {
    if !(multiplier > 1.0 && multiplier.is_finite()) {
        return domain(format!("multiplier must exceed 1, got {multiplier}"));
    }
    if !threshold.is_finite() {
        return domain("threshold must be finite");
    }
    Ok(ElementaryStrategy {
        name: format!("{}*{multiplier}|stop@{threshold}", strategy.name),
        initial_capital: strategy.initial_capital * multiplier,
        steps: strategy
            .steps
            .iter()
            .map(|(rule, p)| (rule.clone(), p.scaled(multiplier)))
            .collect(),
        liquidate_at: Some(match strategy.liquidate_at {
            Some(t) => t.min(threshold),
            None => threshold,
        }),
    })
}

/// The same transform for any capital process (e.g. a superposition, which
/// is itself an elementary process as a finite sum).
pub struct Stopped<P> {
    inner: P,
    multiplier: f64,
    threshold: f64,
}

impl<P: CapitalProcess> Stopped<P> {
    pub fn new(inner: P, multiplier: f64, threshold: f64) -> Result<Self> {
        if !(multiplier > 1.0 && multiplier.is_finite()) {
            return domain(format!("multiplier must exceed 1, got {multiplier}"));
        }
        Ok(Stopped {
            inner,
            multiplier,
            threshold,
        })
    }
}

impl<P: CapitalProcess> CapitalProcess for Stopped<P> {
    fn name(&self) -> String {
        format!("{}*{}|stop@{}", self.inner.name(), self.multiplier, self.threshold)
    }

    fn initial_capital(&self) -> f64 {
        self.inner.initial_capital() * self.multiplier
    }

    fn evaluate(&self, path: &Path) -> Result<CapitalTrace> {
        Ok(self
            .inner
            .evaluate(path)?
            .scaled(self.multiplier)
            .stopped_at(self.threshold))
    }
}

/// Weighted superposition `Σ w_n K^n` of capital processes.
pub struct Superposition {
    name: String,
    members: Vec<(f64, Box<dyn CapitalProcess>)>,
}

impl fmt::Debug for Superposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Superposition")
            .field("name", &self.name)
            .field("members", &self.members.len())
            .finish()
    }
}

/// Member traces together with their weighted sum.
#[derive(Debug, Clone)]
pub struct SuperpositionRun {
    pub members: Vec<CapitalTrace>,
    pub composite: CapitalTrace,
}

impl Superposition {
    pub fn members(&self) -> impl Iterator<Item = (f64, &dyn CapitalProcess)> {
        self.members.iter().map(|(w, p)| (*w, p.as_ref()))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.0).collect()
    }

    /// Evaluates every member (unweighted traces) and the weighted composite.
    pub fn run(&self, path: &Path) -> Result<SuperpositionRun> {
        let members = self
            .members
            .iter()
            .map(|(_, p)| p.evaluate(path))
            .collect::<Result<Vec<_>>>()?;
        let weighted: Vec<CapitalTrace> = members
            .iter()
            .zip(&self.members)
            .map(|(t, (w, _))| t.scaled(*w))
            .collect();
        let composite = sum_processes(&weighted)?;
        Ok(SuperpositionRun { members, composite })
    }
}

impl CapitalProcess for Superposition {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn initial_capital(&self) -> f64 {
        self.members.iter().map(|(w, p)| w * p.initial_capital()).sum()
    }

    fn evaluate(&self, path: &Path) -> Result<CapitalTrace> {
        Ok(self.run(path)?.composite)
    }
}

/// Builds `Σ w_n K^n`; weights must be positive with sum at most 1.
pub fn superpose_weighted(
    name: impl Into<String>,
    members: Vec<(f64, Box<dyn CapitalProcess>)>,
) -> Result<Superposition> {
    if members.is_empty() {
        return domain("superposition needs at least one member");
    }
    if let Some((w, _)) = members.iter().find(|(w, _)| !(*w > 0.0 && w.is_finite())) {
        return domain(format!("weights must be positive, got {w}"));
    }
    let total: f64 = members.iter().map(|m| m.0).sum();
    if total > 1.0 + 1e-12 {
        return domain(format!("weights sum to {total} > 1"));
    }
    Ok(Superposition {
        name: name.into(),
        members,
    })
}

/// Buy at `entry` and hold forever (a reference strategy that is not positive).
pub fn buy_and_hold(initial_capital: f64, entry: f64, shares: f64) -> ElementaryStrategy {
    ElementaryStrategy::new(
        format!("buy-and-hold({shares}@{entry})"),
        initial_capital,
        vec![(StoppingRule::FixedTime(entry), PortfolioRule::constant(shares))],
    )
    .expect("one step")
}
