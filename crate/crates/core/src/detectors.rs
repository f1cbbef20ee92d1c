//! Stop-loss witnesses for isolated level points and monotone runs, and the
//! weighted families that combine countably many of them.
//!
//! Each witness starts from a small capital `ε`, buys one share when the
//! watched level is reached and closes the position at the first of
//! `level − ε` (capital 0) or `level + D` (capital `D + ε`). A family
//! enumerates the `(a, D)` grid diagonally and weights member `n` by `2⁻ⁿ`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::path::Path;
use crate::trading::{
    superpose_weighted, Anchor, CapitalProcess, CapitalTrace, ElementaryStrategy, Level, PortfolioRule, StoppingRule,
    Superposition,
};

/// Default alarm factor for detection reports.
pub const DEFAULT_ALARM_FACTOR: f64 = 100.0;

/// Default base stop-loss width.
pub const DEFAULT_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventParams {
    pub b: f64,
    pub a: f64,
    pub d: f64,
    pub epsilon: f64,
}

impl EventParams {
    pub fn new(b: f64, a: f64, d: f64, epsilon: f64) -> Result<Self> {
        if !(d != 0.0 && d.is_finite()) {
            return domain(format!("D must be a non-zero finite number, got {d}"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return domain(format!("epsilon must be positive, got {epsilon}"));
        }
        if !(a >= 0.0 && a.is_finite()) {
            return domain(format!("a must be non-negative, got {a}"));
        }
        if !b.is_finite() {
            return domain("b must be finite");
        }
        Ok(EventParams { b, a, d, epsilon })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

/// Witness for "after the first visit to `b` at or after `a`, the path
/// reaches `b + D` before returning to `b`". Negative `D` uses a short
/// position with the mirrored levels.
pub fn isolated_point_witness(params: EventParams) -> ElementaryStrategy {
    let EventParams { b, a, d, epsilon } = params;
    let (side, stop) = if d > 0.0 {
        (1.0, b - epsilon)
    } else {
        (-1.0, b + epsilon)
    };
    ElementaryStrategy::new(
        format!("isolated-point(b={b},a={a},D={d},eps={epsilon})"),
        epsilon,
        vec![
            (
                StoppingRule::hit(vec![Level::Absolute(b)], Anchor::Time(a)),
                PortfolioRule::constant(side),
            ),
            (
                StoppingRule::hit(vec![Level::Absolute(stop), Level::Absolute(b + d)], Anchor::Previous),
                PortfolioRule::flat(),
            ),
        ],
    )
    .expect("two steps")
}

/// Witness for "from time `a` the path moves `D` in `direction` before
/// moving `ε` against it".
pub fn monotone_witness(a: f64, d: f64, epsilon: f64, direction: Direction) -> Result<ElementaryStrategy> {
    if !(d > 0.0 && d.is_finite()) {
        return domain(format!("D must be positive, got {d}"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return domain(format!("epsilon must be positive, got {epsilon}"));
    }
    if !(a >= 0.0 && a.is_finite()) {
        return domain(format!("a must be non-negative, got {a}"));
    }
    let (side, levels) = match direction {
        Direction::Up => (1.0, vec![Level::Relative(-epsilon), Level::Relative(d)]),
        Direction::Down => (-1.0, vec![Level::Relative(epsilon), Level::Relative(-d)]),
    };
    ElementaryStrategy::new(
        format!("monotone-{direction:?}(a={a},D={d},eps={epsilon})").to_lowercase(),
        epsilon,
        vec![
            (StoppingRule::FixedTime(a), PortfolioRule::constant(side)),
            (StoppingRule::hit(levels, Anchor::Previous), PortfolioRule::flat()),
        ],
    )
}

/// Which witness a family enumerates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetectorKind {
    IsolatedPoint { b: f64 },
    Monotone { direction: Direction },
}

/// Member weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// `2⁻ⁿ` for the n-th member (1-based).
    Geometric,
    /// `1/k` for each of `k` members.
    Uniform,
}

/// Stop-loss width per member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopLossWidth {
    Constant(f64),
    /// `2⁻ⁿ · ε₀`.
    Geometric(f64),
}

impl StopLossWidth {
    fn at(self, n: usize) -> f64 {
        match self {
            StopLossWidth::Constant(e) => e,
            StopLossWidth::Geometric(e0) => e0 * 0.5f64.powi(n as i32),
        }
    }
}

impl Default for StopLossWidth {
    fn default() -> Self {
        StopLossWidth::Geometric(DEFAULT_EPSILON)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemberParams {
    pub a: f64,
    pub d: f64,
    pub epsilon: f64,
    pub weight: f64,
}

/// A weighted family of witnesses over an `(a, D)` grid.
#[derive(Debug)]
pub struct WitnessFamily {
    pub kind: DetectorKind,
    pub params: Vec<MemberParams>,
    pub superposition: Superposition,
}

impl WitnessFamily {
    /// `Σ w_n ε_n`.
    pub fn initial_capital(&self) -> f64 {
        self.superposition.initial_capital()
    }
}

/// Cantor-diagonal order of an `rows × cols` grid: by `i + j`, then by `i`.
pub fn diagonal_order(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(rows * cols);
    for s in 0..rows + cols {
        for i in 0..rows {
            if s >= i && s - i < cols {
                out.push((i, s - i));
            }
        }
    }
    out
}

pub fn enumerate_events(
    kind: DetectorKind,
    a_grid: &[f64],
    d_grid: &[f64],
    weighting: Weighting,
    widths: StopLossWidth,
) -> Result<WitnessFamily> {
    if a_grid.is_empty() || d_grid.is_empty() {
        return domain("a and D grids must be non-empty");
    }
    let order = diagonal_order(a_grid.len(), d_grid.len());
    let count = order.len();
    let mut params = Vec::with_capacity(count);
    let mut members: Vec<(f64, Box<dyn CapitalProcess>)> = Vec::with_capacity(count);
    for (k, (i, j)) in order.into_iter().enumerate() {
        let n = k + 1;
        let (a, d) = (a_grid[i], d_grid[j]);
        let epsilon = widths.at(n);
        let weight = match weighting {
            Weighting::Geometric => 0.5f64.powi(n as i32),
            Weighting::Uniform => 1.0 / count as f64,
        };
        let strategy = match kind {
            DetectorKind::IsolatedPoint { b } => isolated_point_witness(EventParams::new(b, a, d, epsilon)?),
            DetectorKind::Monotone { direction } => monotone_witness(a, d, epsilon, direction)?,
        };
        params.push(MemberParams { a, d, epsilon, weight });
        members.push((weight, Box::new(strategy)));
    }
    let name = match kind {
        DetectorKind::IsolatedPoint { b } => format!("isolated-point-family(b={b})"),
        DetectorKind::Monotone { direction } => format!("monotone-family({direction:?})").to_lowercase(),
    };
    Ok(WitnessFamily {
        kind,
        params,
        superposition: superpose_weighted(name, members)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberResult {
    pub a: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub epsilon: f64,
    #[serde(rename = "final")]
    pub final_value: f64,
    pub min: f64,
    pub factor: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompositeResult {
    pub initial: f64,
    #[serde(rename = "final")]
    pub final_value: f64,
    pub min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Trigger {
    pub a: f64,
    #[serde(rename = "D")]
    pub d: f64,
    /// First time the member's capital reached `alarm_factor × initial`.
    pub time: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectionReport {
    pub members: Vec<MemberResult>,
    pub composite: CompositeResult,
    pub max_factor: f64,
    pub alarm: bool,
    pub trigger: Option<Trigger>,
    #[serde(skip)]
    pub composite_trace: CapitalTrace,
}

pub fn run_detector(family: &WitnessFamily, path: &Path, alarm_factor: f64) -> Result<DetectionReport> {
    let run = family.superposition.run(path)?;
    let mut members = Vec::with_capacity(run.members.len());
    let mut trigger = None;
    let mut max_factor = f64::NEG_INFINITY;
    for (trace, p) in run.members.iter().zip(&family.params) {
        let factor = trace.final_value / trace.initial;
        max_factor = max_factor.max(factor);
        if trigger.is_none() && factor >= alarm_factor {
            let time = trace
                .first_time_at_least(alarm_factor * trace.initial)
                .finite()
                .unwrap_or(path.horizon());
            trigger = Some(Trigger { a: p.a, d: p.d, time });
        }
        members.push(MemberResult {
            a: p.a,
            d: p.d,
            epsilon: p.epsilon,
            final_value: trace.final_value,
            min: trace.min_value,
            factor,
        });
    }
    Ok(DetectionReport {
        members,
        composite: CompositeResult {
            initial: run.composite.initial,
            final_value: run.composite.final_value,
            min: run.composite.min_value,
        },
        max_factor,
        alarm: trigger.is_some(),
        trigger,
        composite_trace: run.composite,
    })
}
