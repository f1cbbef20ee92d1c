//! Pathwise game-theoretic probability for continuous price paths.
//!
//! Paths are piecewise linear, strategies are elementary capital processes
//! evaluated exactly at hitting times, and upper probabilities are bounded by
//! exhibiting positive capital processes that reach 1 on an event.

pub mod detectors;
pub mod error;
pub mod increase;
pub mod path;
pub mod trading;
pub mod upper_prob;
pub mod wlln;

pub use error::{Error, Result};
pub use path::{Hit, Path, Tail, TimeOrNever};
pub use trading::{CapitalProcess, CapitalTrace, ElementaryStrategy, Positivity};
