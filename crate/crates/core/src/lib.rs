//! Minimum-cost sensor channel selection.
//!
//! Given `n` channels with normalized costs and a performance function `f`
//! over channel subsets, find the cheapest subset whose performance meets a
//! lower bound. Two searches are provided:
//!
//! - [`search::branch_and_bound`] descends the subset lattice from the full
//!   set and prunes below any subset that misses the bound. It is exact
//!   when `f` is monotone (removing channels never helps) and also returns
//!   every feasible subset it met.
//! - [`search::greedy_select`] walks down one channel at a time, choosing the
//!   feasible child with the lowest α-balanced score, in `O(n²)` evaluations.
//!
//! [`search::exhaustive_search`] enumerates everything and serves as ground
//! truth for small `n`.
//!
//! Performance functions implement [`evaluators::PerformanceFunction`]. The
//! crate ships a closed-form monotone function, a replay table, a
//! nearest-centroid classifier over windowed time-series features, and a
//! subprocess adapter speaking a JSON-lines protocol.

pub mod cli;
pub mod evaluators;
pub mod ingest;
pub mod model;
pub mod reference;
pub mod search;

pub use evaluators::{EvalError, PerformanceFunction};
pub use model::{
    children, normalize_costs, score, ChannelNames, ChannelSet, CostModel, Direction,
    EvaluatedSubset, ModelError, ScoreParams,
};
pub use search::SearchError;
