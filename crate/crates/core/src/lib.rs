//! Sound interval bounds for conditional probabilities between classes.
//!
//! A [`Network`] stores an interval for `P(A|B)` on every ordered pair of
//! atoms. [`saturate`] shrinks those intervals with the quantified
//! syllogism and generalized Bayes rules until nothing moves;
//! [`query`] answers atomic, conjunctive and disjunctive queries; the
//! [`oracle`] module computes exact bounds by linear programming over
//! possible worlds.
//!
//! ```
//! use probsyl::{parse_kb, query_str, saturate, SaturationOptions};
//!
//! let mut net = parse_kb("cond b | a = [0.9, 0.9]\ncond a | b = [0.8, 0.8]\ncond c | b = [0.5, 0.6]").unwrap();
//! let opts = SaturationOptions::default();
//! assert!(saturate(&mut net, &opts).is_saturated());
//! let ans = query_str(&net, "c | a", &opts).unwrap();
//! assert!(ans.interval.lo() >= 0.3375 - 1e-9);
//! ```

pub mod error;
pub mod intervals;
pub mod kb;
pub mod network;
pub mod oracle;
pub mod query;
pub mod rules;
pub mod saturation;

pub use error::{Error, Inconsistency, Result};
pub use intervals::{EmptyIntersection, IntervalError, ProbInterval};
pub use kb::{format_bounds, parse_kb, parse_kb_with, serialize_kb, ParseOptions};
pub use network::{Atom, AtomId, AtomKind, DerivationTrace, IndepDecl, IndepKind, Network, Rule, TraceStep, MAX_ATOMS};
pub use oracle::{check_consistency, exact_bounds, ConstraintId, OracleOptions, Verdict};
pub use query::{query, query_str, QueryAnswer, QueryExpr, Side};
pub use saturation::{saturate, SaturationOptions, SaturationReport, Status};
