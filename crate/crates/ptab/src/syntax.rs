//! Atoms, literals, formulas, and the annotation map recording which atoms
//! presuppose which literals.
//!
//! Annotations are global: one presupposition per atom, shared by every
//! occurrence of the atom in a discourse, and unchanged under negation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A propositional atom, identified by name.
///
/// Names are ASCII identifiers: a letter followed by letters, digits or
/// underscores. Atoms order lexicographically so every set of them has a
/// stable iteration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid atom name {0:?}: expected a letter followed by letters, digits or '_'")]
pub struct InvalidAtomName(pub String);

impl AtomId {
    pub fn new(name: impl Into<String>) -> Result<Self, InvalidAtomName> {
        let name = name.into();
        let mut chars = name.chars();
        let valid = match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {
                chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            }
            _ => false,
        };
        if valid {
            Ok(AtomId(name))
        } else {
            Err(InvalidAtomName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for AtomId {
    type Err = InvalidAtomName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AtomId::new(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

/// A signed atom: `a` or `~a`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: AtomId,
    pub sign: Sign,
}

impl Literal {
    pub fn positive(atom: AtomId) -> Self {
        Literal { atom, sign: Sign::Positive }
    }

    pub fn negative(atom: AtomId) -> Self {
        Literal { atom, sign: Sign::Negative }
    }

    pub fn is_positive(&self) -> bool {
        self.sign == Sign::Positive
    }

    /// Same atom, flipped sign. An involution.
    pub fn complement(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            sign: match self.sign {
                Sign::Positive => Sign::Negative,
                Sign::Negative => Sign::Positive,
            },
        }
    }

    pub fn to_formula(&self) -> Formula {
        let atom = Formula::Atom(self.atom.clone());
        match self.sign {
            Sign::Positive => atom,
            Sign::Negative => atom.negate(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Positive => write!(f, "{}", self.atom),
            Sign::Negative => write!(f, "~{}", self.atom),
        }
    }
}

impl FromStr for Literal {
    type Err = InvalidAtomName;

    /// Accepts `a` or `~a` (optionally with spaces after the tilde).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('~') {
            Ok(Literal::negative(AtomId::new(rest.trim_start())?))
        } else {
            Ok(Literal::positive(AtomId::new(s)?))
        }
    }
}

/// A propositional formula over negation, conjunction, disjunction and the
/// material conditional.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(AtomId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn negate(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, rhs: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(rhs))
    }

    /// The set of atoms occurring syntactically in the formula.
    pub fn atoms(&self) -> BTreeSet<AtomId> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<AtomId>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(inner) => inner.collect_atoms(out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// `Some` when the formula is an atom or a negated atom.
    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            Formula::Atom(a) => Some(Literal::positive(a.clone())),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => Some(Literal::negative(a.clone())),
                _ => None,
            },
            _ => None,
        }
    }
}

/// Requested two different presuppositions for the same atom.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("atom '{atom}' annotated with both '{existing}' and '{requested}'")]
pub struct AnnotationConflict {
    pub atom: AtomId,
    pub existing: Literal,
    pub requested: Literal,
}

/// A structural defect in a [`PresupMap`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum MapViolation {
    /// `atom` is an annotation target and carries an annotation itself.
    /// Self-annotation is the degenerate case.
    ChainedAnnotation { atom: AtomId },
}

impl fmt::Display for MapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapViolation::ChainedAnnotation { atom } => {
                write!(f, "chained annotation at '{atom}': a presupposition target may not itself be annotated")
            }
        }
    }
}

/// Which atoms presuppose which literals.
///
/// At most one presupposition per atom; the map is shared by a whole
/// discourse, so the same atom can never carry different annotations in
/// different branches of a tableau.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PresupMap {
    entries: BTreeMap<AtomId, Literal>,
}

impl PresupMap {
    pub fn new() -> Self {
        PresupMap::default()
    }

    /// Records that `atom` presupposes `presup`. Re-recording the same
    /// annotation is fine; a different one is a conflict.
    pub fn annotate(&mut self, atom: AtomId, presup: Literal) -> Result<(), AnnotationConflict> {
        match self.entries.get(&atom) {
            Some(existing) if *existing != presup => Err(AnnotationConflict {
                atom,
                existing: existing.clone(),
                requested: presup,
            }),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(atom, presup);
                Ok(())
            }
        }
    }

    pub fn presupposition_of(&self, atom: &AtomId) -> Option<&Literal> {
        self.entries.get(atom)
    }

    pub fn is_annotated(&self, atom: &AtomId) -> bool {
        self.entries.contains_key(atom)
    }

    /// Folds `other` into `self`, failing on the first conflicting atom.
    pub fn merge(&mut self, other: &PresupMap) -> Result<(), AnnotationConflict> {
        for (atom, presup) in &other.entries {
            self.annotate(atom.clone(), presup.clone())?;
        }
        Ok(())
    }

    /// Checks the no-chain invariant: no annotation target is itself
    /// annotated (which also rules out self-annotation). An empty result
    /// means the map is valid.
    pub fn validate(&self) -> Vec<MapViolation> {
        let mut violations = BTreeSet::new();
        for target in self.entries.values() {
            if self.entries.contains_key(&target.atom) {
                violations.insert(MapViolation::ChainedAnnotation { atom: target.atom.clone() });
            }
        }
        violations.into_iter().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AtomId, &Literal)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The literals appearing as presupposition targets.
    pub fn targets(&self) -> BTreeSet<Literal> {
        self.entries.values().cloned().collect()
    }
}

impl FromIterator<(AtomId, Literal)> for PresupMap {
    /// Panics on conflicting annotations; intended for literals-known-good
    /// construction in tests and examples.
    fn from_iter<T: IntoIterator<Item = (AtomId, Literal)>>(iter: T) -> Self {
        let mut map = PresupMap::new();
        for (atom, presup) in iter {
            map.annotate(atom, presup).expect("conflicting annotations");
        }
        map
    }
}

/// A literal paired with the presupposition its atom carries, if any.
///
/// The lookup ignores the sign: an atom and its negation presuppose the
/// same thing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedAnnotatedAtom {
    pub literal: Literal,
    pub presup: Option<Literal>,
}

impl SignedAnnotatedAtom {
    pub fn lookup(literal: Literal, map: &PresupMap) -> Self {
        let presup = map.presupposition_of(&literal.atom).cloned();
        SignedAnnotatedAtom { literal, presup }
    }
}

impl fmt::Display for SignedAnnotatedAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.literal)?;
        if let Some(p) = &self.presup {
            write!(f, "[{p}]")?;
        }
        Ok(())
    }
}
