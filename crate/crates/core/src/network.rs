//! The knowledge base: atoms, the conditional-probability interval table,
//! independence declarations and auxiliary conjunction/disjunction nodes.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Inconsistency, Result};
use crate::intervals::ProbInterval;
use crate::rules::disj_membership;

/// Largest network (auxiliary nodes included) the propagation engine accepts.
pub const MAX_ATOMS: usize = 256;

/// Characters that may not appear in an atom name.
pub const RESERVED: &[char] = &['|', '&', '+', ';', '=', '[', ']', ',', '#'];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AtomId(pub usize);

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomKind {
    Base,
    /// Operands are stored with the smaller id first.
    Conjunction(AtomId, AtomId),
    Disjunction(AtomId, AtomId),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub id: AtomId,
    pub name: String,
    pub kind: AtomKind,
}

impl Atom {
    pub fn is_base(&self) -> bool {
        self.kind == AtomKind::Base
    }
}

/// The three conditional independence relations on an ordered triple
/// `(A, B, C)`:
/// - `I`: `P(B∩C|A) = P(B|A)·P(C|A)`
/// - `Ii`: `P(A∩C|B) = P(A|B)·P(C|B)`
/// - `Iii`: `P(A∩B|C) = P(A|C)·P(B|C)`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndepKind {
    I,
    Ii,
    Iii,
}

impl IndepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            IndepKind::I => "i",
            IndepKind::Ii => "ii",
            IndepKind::Iii => "iii",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndepDecl {
    pub kind: IndepKind,
    pub a: AtomId,
    pub b: AtomId,
    pub c: AtomId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    Qs,
    Bg,
    Indep,
    Conj,
    Disj,
    Intersect,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Qs => "QS",
            Rule::Bg => "BG",
            Rule::Indep => "INDEP",
            Rule::Conj => "CONJ",
            Rule::Disj => "DISJ",
            Rule::Intersect => "INTERSECT",
        })
    }
}

/// One tightening of one arc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: Rule,
    pub operands: Vec<AtomId>,
    /// `(target, given)`
    pub arc: (AtomId, AtomId),
    pub before: ProbInterval,
    pub after: ProbInterval,
    pub iteration: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DerivationTrace {
    steps: Vec<TraceStep>,
}

impl DerivationTrace {
    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, step: TraceStep) {
        self.steps.push(step);
    }

    /// Steps that touched `arc`, in order.
    pub fn for_arc(&self, arc: (AtomId, AtomId)) -> impl Iterator<Item = &TraceStep> {
        self.steps.iter().filter(move |s| s.arc == arc)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Network {
    atoms: Vec<Atom>,
    names: HashMap<String, AtomId>,
    /// `bounds[i][j]` constrains `P(A_i | A_j)`.
    bounds: Vec<Vec<ProbInterval>>,
    indeps: Vec<IndepDecl>,
    aux: HashMap<AtomKind, AtomId>,
    trace: DerivationTrace,
}

pub fn validate_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c)) {
        return Err(Error::InvalidName(name.to_string()));
    }
    Ok(())
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, id: AtomId) -> &Atom {
        &self.atoms[id.0]
    }

    pub fn name(&self, id: AtomId) -> &str {
        &self.atoms[id.0].name
    }

    pub fn ids(&self) -> impl Iterator<Item = AtomId> {
        (0..self.atoms.len()).map(AtomId)
    }

    pub fn base_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().filter(|a| a.is_base())
    }

    pub fn base_count(&self) -> usize {
        self.base_atoms().count()
    }

    pub fn atom_id(&self, name: &str) -> Option<AtomId> {
        self.names.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<AtomId> {
        self.atom_id(name).ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }

    /// Declares a base atom, returning the existing id if the name is taken.
    pub fn add_atom(&mut self, name: &str) -> Result<AtomId> {
        validate_name(name)?;
        if let Some(id) = self.atom_id(name) {
            return Ok(id);
        }
        self.push_atom(name.to_string(), AtomKind::Base)
    }

    fn push_atom(&mut self, name: String, kind: AtomKind) -> Result<AtomId> {
        if self.atoms.len() >= MAX_ATOMS {
            return Err(Error::TooManyAtoms {
                count: self.atoms.len() + 1,
                limit: MAX_ATOMS,
            });
        }
        let id = AtomId(self.atoms.len());
        for row in &mut self.bounds {
            row.push(ProbInterval::vacuous());
        }
        let mut row = vec![ProbInterval::vacuous(); id.0 + 1];
        row[id.0] = ProbInterval::certain();
        self.bounds.push(row);
        self.names.insert(name.clone(), id);
        self.atoms.push(Atom { id, name, kind });
        Ok(id)
    }

    /// Bounds on `P(target | given)`.
    #[inline]
    pub fn bound(&self, target: AtomId, given: AtomId) -> ProbInterval {
        self.bounds[target.0][given.0]
    }

    pub(crate) fn set_bound(&mut self, target: AtomId, given: AtomId, iv: ProbInterval) {
        debug_assert!(target != given || iv == ProbInterval::certain());
        self.bounds[target.0][given.0] = iv;
    }

    /// Adds a constraint on `P(target | given)`, intersecting it with what is
    /// already known.
    pub fn constrain(&mut self, target: AtomId, given: AtomId, iv: ProbInterval) -> Result<bool> {
        self.tighten(target, given, iv, Rule::Intersect, &[target, given], 0, 0.0)
    }

    /// Intersects `candidate` into the stored bounds of `(target, given)`.
    /// Returns whether an endpoint moved by more than `tol`; any movement is
    /// stored and traced.
    pub(crate) fn tighten(
        &mut self,
        target: AtomId,
        given: AtomId,
        candidate: ProbInterval,
        rule: Rule,
        operands: &[AtomId],
        iteration: usize,
        tol: f64,
    ) -> Result<bool> {
        let before = self.bound(target, given);
        let after = before.intersect(&candidate).map_err(|_| {
            Error::inconsistent(Inconsistency::EmptyIntersection {
                rule,
                operands: operands.to_vec(),
                arc: (target, given),
                stored: before,
                candidate,
            })
        })?;
        if target == given {
            return Ok(false);
        }
        if after == before {
            return Ok(false);
        }
        self.set_bound(target, given, after);
        let moved = before.distance(&after);
        if moved > tol {
            self.trace.push(TraceStep {
                rule,
                operands: operands.to_vec(),
                arc: (target, given),
                before,
                after,
                iteration,
            });
            Ok(true)
        } else {
            Ok(false)
        }
    }

    pub fn indeps(&self) -> &[IndepDecl] {
        &self.indeps
    }

    pub fn declare_indep(&mut self, kind: IndepKind, a: AtomId, b: AtomId, c: AtomId) -> Result<()> {
        for id in [a, b, c] {
            if !self.atom(id).is_base() {
                return Err(Error::NotBaseAtom(self.name(id).to_string()));
            }
        }
        if a == b || b == c || a == c {
            let dup = if a == b || a == c { a } else { b };
            return Err(Error::SameAtom(self.name(dup).to_string()));
        }
        let decl = IndepDecl { kind, a, b, c };
        if !self.indeps.contains(&decl) {
            self.indeps.push(decl);
        }
        Ok(())
    }

    pub fn trace(&self) -> &DerivationTrace {
        &self.trace
    }

    pub fn take_trace(&mut self) -> DerivationTrace {
        std::mem::take(&mut self.trace)
    }

    pub fn auxiliary(&self, kind: AtomKind) -> Option<AtomId> {
        let key = match kind {
            AtomKind::Base => return None,
            AtomKind::Conjunction(a, b) => AtomKind::Conjunction(a.min(b), a.max(b)),
            AtomKind::Disjunction(a, b) => AtomKind::Disjunction(a.min(b), a.max(b)),
        };
        self.aux.get(&key).copied()
    }

    fn check_aux_operands(&self, a: AtomId, b: AtomId) -> Result<()> {
        for id in [a, b] {
            if !self.atom(id).is_base() {
                return Err(Error::NotBaseAtom(self.name(id).to_string()));
            }
        }
        if a == b {
            return Err(Error::SameAtom(self.name(a).to_string()));
        }
        Ok(())
    }

    /// Adds (or finds) the node standing for `A ∩ B`.
    ///
    /// The new arcs copy bounds: `P(A|A∩B) = P(B|A∩B) = 1`,
    /// `P(A∩B|A) ∈ bounds of P(B|A)` and `P(A∩B|B) ∈ bounds of P(A|B)`.
    pub fn add_conjunction_node(&mut self, a: AtomId, b: AtomId) -> Result<AtomId> {
        self.check_aux_operands(a, b)?;
        let (a, b) = (a.min(b), a.max(b));
        let kind = AtomKind::Conjunction(a, b);
        if let Some(id) = self.aux.get(&kind) {
            return Ok(*id);
        }
        let name = format!("{}&{}", self.name(a), self.name(b));
        let ab = self.push_atom(name, kind)?;
        self.aux.insert(kind, ab);
        self.set_bound(a, ab, ProbInterval::certain());
        self.set_bound(b, ab, ProbInterval::certain());
        self.set_bound(ab, a, self.bound(b, a));
        self.set_bound(ab, b, self.bound(a, b));
        Ok(ab)
    }

    /// Adds (or finds) the node standing for `A ∪ B`.
    ///
    /// `P(A∪B|A) = P(A∪B|B) = 1`; `P(A|A∪B)` and `P(B|A∪B)` come from
    /// [`disj_membership`] and stay vacuous when it is undefined.
    pub fn add_disjunction_node(&mut self, a: AtomId, b: AtomId) -> Result<AtomId> {
        self.check_aux_operands(a, b)?;
        let (a, b) = (a.min(b), a.max(b));
        let kind = AtomKind::Disjunction(a, b);
        if let Some(id) = self.aux.get(&kind) {
            return Ok(*id);
        }
        let name = format!("{}+{}", self.name(a), self.name(b));
        let ab = self.push_atom(name, kind)?;
        self.aux.insert(kind, ab);
        self.set_bound(ab, a, ProbInterval::certain());
        self.set_bound(ab, b, ProbInterval::certain());
        let (a_given_b, b_given_a) = (self.bound(a, b), self.bound(b, a));
        if let Ok(m) = disj_membership(a_given_b, b_given_a) {
            self.set_bound(a, ab, m);
        }
        if let Ok(m) = disj_membership(b_given_a, a_given_b) {
            self.set_bound(b, ab, m);
        }
        Ok(ab)
    }

    /// Sum of interval widths over all off-diagonal arcs.
    pub fn total_width(&self) -> f64 {
        let mut w = 0.0;
        for (i, row) in self.bounds.iter().enumerate() {
            for (j, iv) in row.iter().enumerate() {
                if i != j {
                    w += iv.width();
                }
            }
        }
        w
    }
}
