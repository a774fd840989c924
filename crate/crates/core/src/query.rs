//! Conditional queries `T | G` where each side is an atom, a conjunction
//! `a & b` or a disjunction `a + b`.

use std::fmt;

use crate::error::{Error, Result};
use crate::intervals::ProbInterval;
use crate::network::{AtomId, Network, Rule, TraceStep};
use crate::rules::{
    a_or_b_given_c_closed_form, ab_given_c_closed_form, c_given_a_or_b_closed_form, c_given_ab_closed_form,
};
use crate::saturation::{saturate, SaturationOptions, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Atom(AtomId),
    And(AtomId, AtomId),
    Or(AtomId, AtomId),
}

impl Side {
    /// Base atoms mentioned by this side.
    pub fn atoms(&self) -> Vec<AtomId> {
        match *self {
            Side::Atom(a) => vec![a],
            Side::And(a, b) | Side::Or(a, b) => vec![a, b],
        }
    }

    fn parse(net: &Network, text: &str, query: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Query {
            query: query.to_string(),
            reason: reason.to_string(),
        };
        let text = text.trim();
        let has_and = text.contains('&');
        let has_or = text.contains('+');
        if has_and && has_or {
            return Err(bad("cannot mix '&' and '+' on one side"));
        }
        if !has_and && !has_or {
            if text.is_empty() {
                return Err(bad("empty side"));
            }
            return Ok(Side::Atom(net.lookup(text)?));
        }
        let sep = if has_and { '&' } else { '+' };
        let parts: Vec<&str> = text.split(sep).map(str::trim).collect();
        if parts.len() != 2 || parts.iter().any(|p| p.is_empty()) {
            return Err(bad("a compound side joins exactly two atoms"));
        }
        let (a, b) = (net.lookup(parts[0])?, net.lookup(parts[1])?);
        if a == b {
            return Err(Error::SameAtom(parts[0].to_string()));
        }
        Ok(if has_and { Side::And(a, b) } else { Side::Or(a, b) })
    }

    fn write(&self, net: &Network, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Side::Atom(a) => write!(f, "{}", net.name(a)),
            Side::And(a, b) => write!(f, "{}&{}", net.name(a), net.name(b)),
            Side::Or(a, b) => write!(f, "{}+{}", net.name(a), net.name(b)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QueryExpr {
    pub target: Side,
    pub given: Side,
}

impl QueryExpr {
    pub fn atomic(target: AtomId, given: AtomId) -> Self {
        Self {
            target: Side::Atom(target),
            given: Side::Atom(given),
        }
    }

    /// Parses `T | G`; whitespace is ignored around names and operators.
    pub fn parse(net: &Network, text: &str) -> Result<Self> {
        let mut halves = text.split('|');
        let (Some(t), Some(g), None) = (halves.next(), halves.next(), halves.next()) else {
            return Err(Error::Query {
                query: text.to_string(),
                reason: "expected exactly one '|'".to_string(),
            });
        };
        Ok(Self {
            target: Side::parse(net, t, text)?,
            given: Side::parse(net, g, text)?,
        })
    }

    /// Renders as `P(t|g)` with names from `net`.
    pub fn display<'a>(&'a self, net: &'a Network) -> impl fmt::Display + 'a {
        struct Shown<'a>(&'a QueryExpr, &'a Network);
        impl fmt::Display for Shown<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("P(")?;
                self.0.target.write(self.1, f)?;
                f.write_str("|")?;
                self.0.given.write(self.1, f)?;
                f.write_str(")")
            }
        }
        Shown(self, net)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryAnswer {
    pub interval: ProbInterval,
    /// Steps that moved the queried arc.
    pub trace: Vec<TraceStep>,
    /// Names of the atoms the trace refers to, auxiliary nodes included.
    pub names: Vec<String>,
}

fn atom_names(net: &Network) -> Vec<String> {
    net.atoms().iter().map(|a| a.name.clone()).collect()
}

fn resolve(net: &mut Network, side: Side) -> Result<AtomId> {
    match side {
        Side::Atom(a) => Ok(a),
        Side::And(a, b) => net.add_conjunction_node(a, b),
        Side::Or(a, b) => net.add_disjunction_node(a, b),
    }
}

/// Answers `q` against `net`.
///
/// Atomic queries read the stored interval, so `net` should be saturated
/// first. Compound queries extend a copy of `net` with the needed auxiliary
/// nodes, saturate it, and intersect with the closed forms.
pub fn query(net: &Network, q: &QueryExpr, opts: &SaturationOptions) -> Result<QueryAnswer> {
    if q.target == q.given {
        return Ok(QueryAnswer {
            interval: ProbInterval::certain(),
            trace: Vec::new(),
            names: atom_names(net),
        });
    }
    if let (Side::Atom(t), Side::Atom(g)) = (q.target, q.given) {
        return Ok(QueryAnswer {
            interval: net.bound(t, g),
            trace: net.trace().for_arc((t, g)).cloned().collect(),
            names: atom_names(net),
        });
    }

    let mut ext = net.clone();
    let first_step = ext.trace().len();
    let t = resolve(&mut ext, q.target)?;
    let g = resolve(&mut ext, q.given)?;
    let report = saturate(&mut ext, opts);
    if let Status::Inconsistent(why) = report.status {
        return Err(Error::Inconsistent(Box::new(why)));
    }

    let closed = match (q.target, q.given) {
        (Side::Atom(c), Side::And(a, b)) if c != a && c != b => {
            Some((Rule::Conj, c_given_ab_closed_form(&ext, a, b, c), [a, b, c]))
        }
        (Side::And(a, b), Side::Atom(c)) if c != a && c != b => {
            Some((Rule::Conj, ab_given_c_closed_form(&ext, a, b, c), [a, b, c]))
        }
        (Side::Atom(c), Side::Or(a, b)) if c != a && c != b => {
            Some((Rule::Disj, c_given_a_or_b_closed_form(&ext, a, b, c), [a, b, c]))
        }
        (Side::Or(a, b), Side::Atom(c)) if c != a && c != b => {
            Some((Rule::Disj, a_or_b_given_c_closed_form(&ext, a, b, c), [a, b, c]))
        }
        _ => None,
    };
    if let Some((rule, candidate, operands)) = closed {
        if !candidate.is_vacuous() {
            let iteration = report.iterations + 1;
            ext.tighten(t, g, candidate, rule, &operands, iteration, opts.tol)?;
        }
    }

    let trace = ext.trace().steps()[first_step..]
        .iter()
        .filter(|s| s.arc == (t, g))
        .cloned()
        .collect();
    Ok(QueryAnswer {
        interval: ext.bound(t, g),
        trace,
        names: atom_names(&ext),
    })
}

/// Parses and answers `text` against `net`.
pub fn query_str(net: &Network, text: &str, opts: &SaturationOptions) -> Result<QueryAnswer> {
    let q = QueryExpr::parse(net, text)?;
    query(net, &q, opts)
}
