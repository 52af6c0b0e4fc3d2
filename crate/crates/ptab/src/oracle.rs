//! Brute-force classical semantics: model enumeration over an explicit
//! universe, validity, and cross-checks against both tableau rule sets.
//!
//! Deliberately naive so it can serve as an independent correctness
//! reference for the tableau engine.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{AtomId, Formula, Literal};
use crate::tableau::{Branch, RuleSet, Tableau, TableauError};

/// Default bound on enumeration universes (65536 rows).
pub const DEFAULT_ATOM_CAP: usize = 16;

/// A total truth-value assignment over a declared universe.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment {
    values: BTreeMap<AtomId, bool>,
}

impl Assignment {
    pub fn new(values: BTreeMap<AtomId, bool>) -> Self {
        Assignment { values }
    }

    pub fn get(&self, atom: &AtomId) -> Option<bool> {
        self.values.get(atom).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AtomId, bool)> {
        self.values.iter().map(|(a, v)| (a, *v))
    }

    /// Reads an open branch as an assignment over `universe`. `None` when
    /// the branch leaves some universe atom unsigned.
    pub fn from_branch(branch: &Branch, universe: &BTreeSet<AtomId>) -> Option<Assignment> {
        let mut values = BTreeMap::new();
        for lit in branch.literals() {
            values.insert(lit.atom.clone(), lit.is_positive());
        }
        if universe.iter().all(|a| values.contains_key(a)) {
            values.retain(|a, _| universe.contains(a));
            Some(Assignment { values })
        } else {
            None
        }
    }
}

/// Classical evaluation; `None` when the formula mentions an atom the
/// assignment does not bind.
pub fn evaluate(f: &Formula, assignment: &Assignment) -> Option<bool> {
    match f {
        Formula::Atom(a) => assignment.get(a),
        Formula::Not(inner) => evaluate(inner, assignment).map(|v| !v),
        Formula::And(l, r) => Some(evaluate(l, assignment)? && evaluate(r, assignment)?),
        Formula::Or(l, r) => Some(evaluate(l, assignment)? || evaluate(r, assignment)?),
        Formula::Implies(l, r) => Some(!evaluate(l, assignment)? || evaluate(r, assignment)?),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("universe of {size} atoms exceeds the enumeration cap of {cap}")]
    UniverseTooLarge { size: usize, cap: usize },
    #[error("atom '{0}' does not occur in the declared universe")]
    AtomOutsideUniverse(AtomId),
}

/// Enumerates exactly the assignments over `universe` that make every
/// formula true. The universe is explicit so that discourse-level
/// comparisons share one atom set.
pub fn enumerate_models(
    formulas: &[Formula],
    universe: &BTreeSet<AtomId>,
    cap: usize,
) -> Result<BTreeSet<Assignment>, OracleError> {
    let effective_cap = cap.min(63);
    if universe.len() > effective_cap {
        return Err(OracleError::UniverseTooLarge { size: universe.len(), cap: effective_cap });
    }
    for f in formulas {
        for atom in f.atoms() {
            if !universe.contains(&atom) {
                return Err(OracleError::AtomOutsideUniverse(atom));
            }
        }
    }
    let atoms: Vec<&AtomId> = universe.iter().collect();
    let mut models = BTreeSet::new();
    for bits in 0u64..(1u64 << atoms.len()) {
        let values: BTreeMap<AtomId, bool> = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| ((*a).clone(), bits >> i & 1 == 1))
            .collect();
        let assignment = Assignment { values };
        let satisfied = formulas
            .iter()
            .all(|f| evaluate(f, &assignment).expect("universe covers all atoms"));
        if satisfied {
            models.insert(assignment);
        }
    }
    Ok(models)
}

pub fn is_satisfiable(formulas: &[Formula], cap: usize) -> Result<bool, OracleError> {
    let universe: BTreeSet<AtomId> = formulas.iter().flat_map(|f| f.atoms()).collect();
    Ok(!enumerate_models(formulas, &universe, cap)?.is_empty())
}

/// True iff the negation has no models over the formula's own atoms.
pub fn is_valid(f: &Formula, cap: usize) -> Result<bool, OracleError> {
    let universe = f.atoms();
    Ok(enumerate_models(&[f.clone().negate()], &universe, cap)?.is_empty())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrossCheckError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
}

/// Outcome of running a formula set through both tableau rule sets and the
/// truth tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub pt_closed: bool,
    pub st_closed: bool,
    pub oracle_unsat: bool,
    pub models: BTreeSet<Assignment>,
    pub pt_open_assignments: BTreeSet<Assignment>,
    /// Open full-coverage branches that failed to sign every universe atom.
    /// Always zero when the engine honors its coverage guarantee.
    pub partial_open_branches: usize,
}

impl EquivalenceReport {
    pub fn decisions_agree(&self) -> bool {
        self.pt_closed == self.st_closed && self.st_closed == self.oracle_unsat
    }

    pub fn models_agree(&self) -> bool {
        self.partial_open_branches == 0 && self.models == self.pt_open_assignments
    }

    pub fn all_agree(&self) -> bool {
        self.decisions_agree() && self.models_agree()
    }
}

/// Builds the full-coverage and traditional tableaux for `formulas`,
/// enumerates its models, and reports whether the three decisions and the
/// two model sets line up.
pub fn check_equivalence(
    formulas: &[Formula],
    cap: usize,
) -> Result<EquivalenceReport, CrossCheckError> {
    let universe: BTreeSet<AtomId> = formulas.iter().flat_map(|f| f.atoms()).collect();
    let models = enumerate_models(formulas, &universe, cap)?;

    let mut pt = Tableau::new(RuleSet::Pt, Default::default())?;
    let mut st = Tableau::new(RuleSet::St, Default::default())?;
    for f in formulas {
        pt.add_sentence(f)?;
        st.add_sentence(f)?;
    }

    let mut pt_open_assignments = BTreeSet::new();
    let mut partial = 0usize;
    for branch in pt.open_branches() {
        match Assignment::from_branch(branch, &universe) {
            Some(a) => {
                pt_open_assignments.insert(a);
            }
            None => partial += 1,
        }
    }

    Ok(EquivalenceReport {
        pt_closed: pt.is_closed(),
        st_closed: st.is_closed(),
        oracle_unsat: models.is_empty(),
        models,
        pt_open_assignments,
        partial_open_branches: partial,
    })
}

/// Convenience for tests and display: the positive/negative literal view of
/// an assignment.
pub fn assignment_literals(a: &Assignment) -> Vec<Literal> {
    a.iter()
        .map(|(atom, v)| {
            if v {
                Literal::positive(atom.clone())
            } else {
                Literal::negative(atom.clone())
            }
        })
        .collect()
}
