use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::intervals::ProbInterval;
use crate::network::{AtomId, Rule};
use crate::oracle::ConstraintId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: syntax error: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: bad bounds: {reason}")]
    Bounds { line: usize, reason: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("invalid atom name `{0}`")]
    InvalidName(String),
    #[error("atom `{0}` is not a base atom")]
    NotBaseAtom(String),
    #[error("auxiliary node needs two distinct atoms, got `{0}` twice")]
    SameAtom(String),
    #[error("{count} atoms exceed the limit of {limit}")]
    TooManyAtoms { count: usize, limit: usize },
    #[error("membership in the union is undefined: both P(A|B) and P(B|A) are zero")]
    UndefinedMembership,
    #[error("malformed query `{query}`: {reason}")]
    Query { query: String, reason: String },
    #[error("inconsistent knowledge base: {0}")]
    Inconsistent(Box<Inconsistency>),
    #[error("knowledge base is infeasible ({} constraints in certificate)", .0.len())]
    InfeasibleKb(Vec<ConstraintId>),
    #[error("conditioning event has zero probability in every model of the knowledge base")]
    DegenerateDenominator,
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn inconsistent(why: Inconsistency) -> Self {
        Error::Inconsistent(Box::new(why))
    }
}

/// Proof that the bounds of a network admit no probability distribution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Inconsistency {
    /// A rule produced a candidate interval disjoint from the stored one.
    EmptyIntersection {
        rule: Rule,
        operands: Vec<AtomId>,
        /// `(target, given)`
        arc: (AtomId, AtomId),
        stored: ProbInterval,
        candidate: ProbInterval,
    },
    /// A circuit of positive log-weight.
    PositiveCircuit { circuit: Vec<AtomId>, excess: f64 },
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inconsistency::EmptyIntersection {
                rule,
                operands,
                arc,
                stored,
                candidate,
            } => write!(
                f,
                "{rule} on {:?} derived {candidate} for arc ({}|{}), disjoint from {stored}",
                operands.iter().map(|a| a.0).collect::<Vec<_>>(),
                arc.0 .0,
                arc.1 .0
            ),
            Inconsistency::PositiveCircuit { circuit, excess } => write!(
                f,
                "circuit {:?} has positive log-weight {excess:.3e}",
                circuit.iter().map(|a| a.0).collect::<Vec<_>>()
            ),
        }
    }
}
