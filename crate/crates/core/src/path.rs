//! Piecewise-linear price paths.
//!
//! A [`Path`] is Reality's move: a continuous function on `[0, ∞)` given by
//! its breakpoints, linearly interpolated between them and constant after the
//! last one. All stopping rules used by the strategies in this crate are
//! hitting times of finite level sets or fixed times, and both are solved
//! exactly on segments here.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Absolute tolerance for level comparisons on breakpoint values.
pub const LEVEL_TOL: f64 = 1e-12;

/// How the path behaves after its last breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// The path really is constant from the last breakpoint on.
    Constant,
    /// The breakpoints are a finite prefix of a longer trajectory (sampled or
    /// ingested data). Evaluation still extends the last value, but reports
    /// mark conclusions that depend on the tail as horizon-limited.
    Truncated,
}

/// A stopping time: either a finite time or `Never` (`inf ∅`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeOrNever {
    At(f64),
    Never,
}

impl TimeOrNever {
    pub fn is_never(self) -> bool {
        matches!(self, TimeOrNever::Never)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            TimeOrNever::At(t) => Some(t),
            TimeOrNever::Never => None,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<Option<f64>> for TimeOrNever {
    fn from(t: Option<f64>) -> Self {
        t.map_or(TimeOrNever::Never, TimeOrNever::At)
    }
}

impl PartialOrd for TimeOrNever {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (TimeOrNever::Never, TimeOrNever::Never) => Some(Ordering::Equal),
            (TimeOrNever::Never, TimeOrNever::At(_)) => Some(Ordering::Greater),
            (TimeOrNever::At(_), TimeOrNever::Never) => Some(Ordering::Less),
            (TimeOrNever::At(a), TimeOrNever::At(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for TimeOrNever {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeOrNever::At(t) => write!(f, "{t}"),
            TimeOrNever::Never => f.write_str("never"),
        }
    }
}

/// First attainment of a level set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub time: f64,
    /// The level that was attained. This is the exact price at `time`.
    pub level: f64,
    /// Index of `level` in the queried level slice.
    pub index: usize,
}

/// A continuous piecewise-linear price path.
#[derive(Debug, Clone)]
pub struct Path {
    times: Vec<f64>,
    values: Vec<f64>,
    tail: Tail,
    fingerprint: u64,
}

impl PartialEq for Path {
    fn eq(&self, other: &Self) -> bool {
        self.times == other.times && self.values == other.values
    }
}

impl Path {
    /// Builds a path with a constant tail.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::with_tail(times, values, Tail::Constant)
    }

    pub fn with_tail(times: Vec<f64>, values: Vec<f64>, tail: Tail) -> Result<Self> {
        if times.is_empty() {
            return domain("path needs at least one breakpoint");
        }
        if times.len() != values.len() {
            return domain(format!("{} times but {} values", times.len(), values.len()));
        }
        if times[0] != 0.0 {
            return domain(format!("path must start at time 0, got {}", times[0]));
        }
        if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return domain(format!("times not strictly increasing at {} -> {}", w[0], w[1]));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return domain(format!("non-finite price {v}"));
        }
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        for (t, v) in times.iter().zip(&values) {
            t.to_bits().hash(&mut hasher);
            v.to_bits().hash(&mut hasher);
        }
        let fingerprint = hasher.finish();
        Ok(Path {
            times,
            values,
            tail,
            fingerprint,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Time of the last breakpoint.
    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("non-empty")
    }

    /// Identity of the breakpoint data, used to refuse mixing traces of different paths.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// The path `-ω`.
    pub fn negated(&self) -> Path {
        let values = self.values.iter().map(|v| -v).collect();
        Path::with_tail(self.times.clone(), values, self.tail).expect("negation keeps invariants")
    }

    /// The path shifted so that it starts at price 0.
    pub fn rebased_to_zero(&self) -> Path {
        let v0 = self.values[0];
        let values = self.values.iter().map(|v| v - v0).collect();
        Path::with_tail(self.times.clone(), values, self.tail).expect("shift keeps invariants")
    }

    /// `ω(t)`. Linear on segments, constant after the horizon.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return domain(format!("negative time {t}"));
        }
        Ok(self.eval(t))
    }

    pub(crate) fn eval(&self, t: f64) -> f64 {
        let i = self.segment_index(t);
        if i + 1 >= self.times.len() {
            return self.final_value();
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        if t == t0 {
            return self.values[i];
        }
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        if v0 == v1 {
            return v0;
        }
        v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
    }

    /// Index `i` of the breakpoint with `times[i] <= t < times[i + 1]`
    /// (`len - 1` beyond the horizon).
    fn segment_index(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s <= t).saturating_sub(1)
    }

    /// First time at which the path attains one of `levels`.
    ///
    /// With `strict_after` the result is `inf{t > from : ω(t) ∈ levels}`,
    /// which equals `from` only when the path sits on a level and stays flat
    /// right after `from`. Crossings inside a segment are solved by linear
    /// interpolation; breakpoint values within [`LEVEL_TOL`] of a level count
    /// as hits.
    pub fn first_hit(&self, from: f64, levels: &[f64], strict_after: bool) -> Result<Option<Hit>> {
        if !(from >= 0.0) {
            return domain(format!("negative start time {from}"));
        }
        if levels.is_empty() {
            return domain("empty level set");
        }
        if let Some(l) = levels.iter().find(|l| !l.is_finite()) {
            return domain(format!("non-finite level {l}"));
        }
        let matching = |v: f64| {
            levels
                .iter()
                .enumerate()
                .filter(|(_, &l)| (v - l).abs() <= LEVEL_TOL)
                .map(|(i, &l)| (i, l))
                .next()
        };

        let n = self.times.len();
        let i = self.segment_index(from);
        let v_from = self.eval(from);
        let flat_after = i + 1 >= n || self.values[i] == self.values[i + 1];

        if let Some((index, level)) = matching(v_from) {
            if !strict_after || flat_after {
                return Ok(Some(Hit {
                    time: from,
                    level,
                    index,
                }));
            }
        }
        if i + 1 >= n {
            return Ok(None);
        }

        let (mut s0, mut u0) = (from, v_from);
        for j in i..n - 1 {
            let (s1, u1) = (self.times[j + 1], self.values[j + 1]);
            let mut best: Option<Hit> = None;
            for (index, &level) in levels.iter().enumerate() {
                let d0 = u0 - level;
                let d1 = u1 - level;
                let time = if d1.abs() <= LEVEL_TOL {
                    s1
                } else if d0.abs() > LEVEL_TOL && (d0 < 0.0) != (d1 < 0.0) {
                    let t = s0 + (level - u0) / (u1 - u0) * (s1 - s0);
                    t.clamp(s0, s1)
                } else {
                    continue;
                };
                if best.is_none_or(|b| time < b.time) {
                    best = Some(Hit { time, level, index });
                }
            }
            if best.is_some() {
                return Ok(best);
            }
            s0 = s1;
            u0 = u1;
        }
        Ok(None)
    }

    /// `hitting_time` as a stopping time.
    pub fn hitting_time(&self, from: f64, levels: &[f64], strict_after: bool) -> Result<TimeOrNever> {
        Ok(self
            .first_hit(from, levels, strict_after)?
            .map_or(TimeOrNever::Never, |h| TimeOrNever::At(h.time)))
    }

    /// `sup ω` over `[0, up_to)` (`half_open`) or `[0, up_to]`.
    ///
    /// By continuity both are the maximum over the breakpoints before
    /// `up_to` and the value at `up_to`; the half-open sup over the empty
    /// interval `[0, 0)` is `-∞`.
    pub fn running_max(&self, up_to: f64, half_open: bool) -> Result<f64> {
        if !(up_to >= 0.0) {
            return domain(format!("negative time {up_to}"));
        }
        if half_open && up_to == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(self.max_on(0.0, up_to))
    }

    /// Maximum of the path over the closed interval `[from, to]`.
    pub(crate) fn max_on(&self, from: f64, to: f64) -> f64 {
        let lo = self.times.partition_point(|&s| s <= from);
        let hi = self.times.partition_point(|&s| s < to);
        let inner = self.values[lo.min(hi)..hi]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        inner.max(self.eval(from)).max(self.eval(to))
    }
}

/// Symmetric ±`step_scale` random walk with `n_steps` steps spaced `dt`
/// apart. Its values sit on the lattice `start + step_scale·ℤ`.
pub fn gen_random_walk(seed: u64, n_steps: usize, dt: f64, step_scale: f64, start: f64) -> Result<Path> {
    check_walk_params(dt, step_scale, start)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: i64 = 0;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut values = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    values.push(start);
    for k in 1..=n_steps {
        pos += if rng.gen::<bool>() { 1 } else { -1 };
        times.push(k as f64 * dt);
        values.push(start + step_scale * pos as f64);
    }
    Path::with_tail(times, values, Tail::Truncated)
}

/// Random walk frozen at the first breakpoint where it reaches `start + stop_at`
/// or `start - stop_at`; the path is then genuinely constant afterwards.
/// If neither level is reached within `n_steps`, the tail is [`Tail::Truncated`].
pub fn gen_stopped_random_walk(
    seed: u64,
    n_steps: usize,
    dt: f64,
    step_scale: f64,
    start: f64,
    stop_at: f64,
) -> Result<Path> {
    check_walk_params(dt, step_scale, start)?;
    if !(stop_at > 0.0) {
        return domain(format!("stop distance must be positive, got {stop_at}"));
    }
    let walk = gen_random_walk(seed, n_steps, dt, step_scale, start)?;
    let stop = walk
        .values
        .iter()
        .position(|v| (v - start).abs() >= stop_at - LEVEL_TOL);
    match stop {
        Some(k) => {
            let mut times = walk.times[..=k].to_vec();
            let mut values = walk.values[..=k].to_vec();
            if k == 0 {
                times.push(dt);
                values.push(values[0]);
            }
            Path::with_tail(times, values, Tail::Constant)
        }
        None => Ok(walk),
    }
}

/// Random walk whose steps stop short at critical levels.
///
/// Before each step `levels` is called with the values so far and returns the
/// levels a strategy may stop at next. From `v` the walk moves to
/// `up = min(v + max_step, next level above)` or
/// `down = max(v − max_step, next level below)` with probabilities that keep
/// the mean at `v`. Every critical level is therefore attained at a
/// breakpoint, and a strategy that trades only at those levels sees a
/// discrete martingale.
pub fn gen_adapted_walk<F>(seed: u64, n_steps: usize, dt: f64, max_step: f64, start: f64, mut levels: F) -> Result<Path>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    check_walk_params(dt, max_step, start)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut values = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    values.push(start);
    for k in 1..=n_steps {
        let v = *values.last().unwrap();
        let mut up = v + max_step;
        let mut down = v - max_step;
        for l in levels(&values) {
            if l > v + LEVEL_TOL && l < up + LEVEL_TOL {
                up = up.min(l);
            } else if l < v - LEVEL_TOL && l > down - LEVEL_TOL {
                down = down.max(l);
            }
        }
        let p_up = (v - down) / (up - down);
        times.push(k as f64 * dt);
        values.push(if rng.gen::<f64>() < p_up { up } else { down });
    }
    Path::with_tail(times, values, Tail::Truncated)
}

fn check_walk_params(dt: f64, step_scale: f64, start: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return domain(format!("dt must be positive, got {dt}"));
    }
    if !(step_scale > 0.0 && step_scale.is_finite()) {
        return domain(format!("step scale must be positive, got {step_scale}"));
    }
    if !start.is_finite() {
        return domain("start must be finite");
    }
    Ok(())
}

/// Two-breakpoint constant path.
pub fn gen_constant(level: f64, horizon: f64) -> Result<Path> {
    if !(horizon > 0.0) {
        return domain(format!("horizon must be positive, got {horizon}"));
    }
    Path::new(vec![0.0, horizon], vec![level, level])
}

/// Deterministic paths realising the events the witness strategies bet on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Starts at `b + d/2`, touches `b` at `touch_at`, then moves to `b + d`
    /// without returning to `b`.
    IsolatedLevelPoint { b: f64, d: f64, touch_at: f64 },
    /// Flat at 0 until `a`, then strictly rising by `d` over one time unit.
    MonotoneRun { a: f64, d: f64 },
    /// Straight line from 0 to `2d` over `[0, 2d]`: every time is a point of
    /// semi-strict increase and the rise `d` happens well before any return.
    SemiStrictIncrease { c: f64, d: f64 },
}

pub fn gen_violation(kind: Violation) -> Result<Path> {
    match kind {
        Violation::IsolatedLevelPoint { b, d, touch_at } => {
            if !(d != 0.0 && d.is_finite() && b.is_finite()) {
                return domain(format!(
                    "isolated level point needs finite b and D != 0, got b={b}, D={d}"
                ));
            }
            if !(touch_at > 0.0 && touch_at.is_finite()) {
                return domain(format!("touch time must be positive, got {touch_at}"));
            }
            Path::new(vec![0.0, touch_at, touch_at + 1.0], vec![b + d / 2.0, b, b + d])
        }
        Violation::MonotoneRun { a, d } => {
            if !(d > 0.0 && d.is_finite()) {
                return domain(format!("monotone run needs D > 0, got {d}"));
            }
            if !(a >= 0.0 && a.is_finite()) {
                return domain(format!("monotone run needs a >= 0, got {a}"));
            }
            if a == 0.0 {
                Path::new(vec![0.0, 1.0], vec![0.0, d])
            } else {
                Path::new(vec![0.0, a, a + 1.0], vec![0.0, 0.0, d])
            }
        }
        Violation::SemiStrictIncrease { c, d } => {
            if !(d > 0.0 && d.is_finite() && c > 0.0 && c.is_finite()) {
                return domain(format!("semi-strict increase needs C, D > 0, got C={c}, D={d}"));
            }
            Path::new(vec![0.0, 2.0 * d], vec![0.0, 2.0 * d])
        }
    }
}

/// Ratchet path: from the current running maximum `m` it rises by `rises[n]`,
/// falls to `m - drop`, and climbs back to the new maximum before the next
/// rise. Each leg takes `dt`. Levels are placed exactly, so the cycle
/// decomposition of the increase detector sees every drop as an exit at
/// `M − ε` when `drop = ε` and `rises[n] < D`.
pub fn gen_ratchet(rises: &[f64], drop: f64, dt: f64) -> Result<Path> {
    if !(drop > 0.0 && dt > 0.0) {
        return domain(format!("ratchet needs drop > 0 and dt > 0, got {drop}, {dt}"));
    }
    if let Some(r) = rises.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return domain(format!("rises must be non-negative, got {r}"));
    }
    let mut times = vec![0.0];
    let mut values = vec![0.0];
    let push = |v: f64, times: &mut Vec<f64>, values: &mut Vec<f64>| {
        let t = *times.last().unwrap() + dt;
        times.push(t);
        values.push(v);
    };
    let mut max = 0.0;
    for (n, &rise) in rises.iter().enumerate() {
        if n > 0 {
            push(max, &mut times, &mut values);
        }
        let start = max;
        if rise > 0.0 {
            max += rise;
            push(max, &mut times, &mut values);
        }
        push(start - drop, &mut times, &mut values);
    }
    if times.len() == 1 {
        push(0.0, &mut times, &mut values);
    }
    Path::new(times, values)
}

/// Serialises a path as `time,price` CSV with a header line and 17
/// significant digits per number.
pub fn path_to_csv(path: &Path) -> String {
    let mut out = String::from("time,price\n");
    for (t, v) in path.times.iter().zip(&path.values) {
        out.push_str(&format!("{t:.16e},{v:.16e}\n"));
    }
    out
}

/// Parses `time,price` CSV (header optional). Times are rebased so the path
/// starts at 0. The result carries a [`Tail::Truncated`] tail.
pub fn load_path_csv(bytes: &[u8]) -> Result<Path> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(bytes);
    let mut times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if k == 0 && record.len() == 2 && &record[0] == "time" && &record[1] == "price" {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 columns, found {}", record.len()),
            });
        }
        let cell = |i: usize, name: &str| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("{name} {:?} is not a finite number", &record[i]),
                })
        };
        let t = cell(0, "time")?;
        let v = cell(1, "price")?;
        if let Some(&prev) = times.last() {
            if !(t > prev) {
                return Err(Error::Parse {
                    line,
                    message: format!("time {t} does not increase (previous {prev})"),
                });
            }
        }
        times.push(t);
        values.push(v);
    }
    if times.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no data rows".into(),
        });
    }
    let t0 = times[0];
    if t0 != 0.0 {
        for t in &mut times {
            *t -= t0;
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parse {
                line: 0,
                message: "times collapse after rebasing to 0".into(),
            });
        }
    }
    Path::with_tail(times, values, Tail::Truncated)
}
