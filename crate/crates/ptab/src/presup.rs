//! Presupposition projection over tableaux.
//!
//! A presupposition is weaker than an assertion: it survives in a branch
//! only where it neither overlaps nor clashes with other information. For
//! an open branch holding an occurrence of an atom annotated with the
//! presupposition `p`, `p` survives unless
//!
//!   1. the branch asserts `~p` (contradicted),
//!   2. the branch asserts `p` itself (already said, nothing left to take
//!      for granted), or
//!   3. some other atom in the branch is annotated with `~p` (two
//!      presuppositions in conflict cancel each other).
//!
//! The sign of the carrying occurrence is irrelevant throughout.
//!
//! A tableau with at least one open branch presupposes whatever its open
//! branches presuppose. Because open full-coverage branches assign the same
//! atoms and the annotation map is global, all open branches agree; the
//! report carries the per-branch evidence and an agreement flag so the
//! claim stays checkable.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

use crate::parser::Discourse;
use crate::syntax::{AtomId, Literal, PresupMap, SignedAnnotatedAtom};
use crate::tableau::{Branch, RuleSet, Tableau, TableauError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresupError {
    #[error("presuppositions of a closed branch are undefined")]
    ClosedBranch,
    #[error("status of a presupposition against a closed tableau is undefined")]
    ClosedTableau,
    #[error(transparent)]
    Tableau(#[from] TableauError),
}

/// Why a candidate presupposition did not survive in a branch; one case per
/// "unless" clause of the branch rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockReason {
    /// The branch asserts the complement of the presupposition.
    ContradictedByBranch,
    /// The branch asserts the presupposition itself.
    AlreadyAsserted,
    /// Another atom in the branch presupposes the complement.
    ConflictingPresup { source: AtomId },
}

impl BlockReason {
    pub fn name(&self) -> &'static str {
        match self {
            BlockReason::ContradictedByBranch => "contradicted-by-branch",
            BlockReason::AlreadyAsserted => "already-asserted",
            BlockReason::ConflictingPresup { .. } => "conflicting-presup",
        }
    }
}

impl fmt::Display for BlockReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockReason::ConflictingPresup { source } => {
                write!(f, "conflicting-presup (via '{source}')")
            }
            other => f.write_str(other.name()),
        }
    }
}

/// A presupposition that was carried into a branch but did not survive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockedPresup {
    /// The annotated atom whose presupposition this was.
    pub origin: AtomId,
    /// The presupposition that was blocked.
    pub target: Literal,
    pub reason: BlockReason,
}

/// The branch rule's verdict for one open branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchReport {
    pub literals: BTreeSet<Literal>,
    pub surviving: BTreeSet<Literal>,
    pub blocked: Vec<BlockedPresup>,
}

/// Applies the branch rule: collects the presuppositions of all annotated
/// atoms occurring in the branch (under either sign), keeps the survivors,
/// and records a reason for every one blocked. Duplicated survivors merge.
pub fn branch_presuppositions(
    branch: &Branch,
    map: &PresupMap,
) -> Result<BranchReport, PresupError> {
    if branch.is_closed() {
        return Err(PresupError::ClosedBranch);
    }
    let literals = branch.literals();
    let annotated: Vec<(AtomId, Literal)> = literals
        .iter()
        .map(|lit| SignedAnnotatedAtom::lookup(lit.clone(), map))
        .filter_map(|saa| saa.presup.map(|p| (saa.literal.atom, p)))
        .collect();

    let mut surviving = BTreeSet::new();
    let mut blocked = Vec::new();
    for (origin, presup) in &annotated {
        if literals.contains(&presup.complement()) {
            blocked.push(BlockedPresup {
                origin: origin.clone(),
                target: presup.clone(),
                reason: BlockReason::ContradictedByBranch,
            });
        } else if literals.contains(presup) {
            blocked.push(BlockedPresup {
                origin: origin.clone(),
                target: presup.clone(),
                reason: BlockReason::AlreadyAsserted,
            });
        } else if let Some((source, _)) = annotated
            .iter()
            .find(|(other, p)| other != origin && *p == presup.complement())
        {
            blocked.push(BlockedPresup {
                origin: origin.clone(),
                target: presup.clone(),
                reason: BlockReason::ConflictingPresup { source: source.clone() },
            });
        } else {
            surviving.insert(presup.clone());
        }
    }
    Ok(BranchReport { literals: literals.clone(), surviving, blocked })
}

/// Presuppositions of a whole tableau with the per-branch evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresupReport {
    /// The surviving set of the leftmost open branch; empty when the
    /// tableau is closed.
    pub presuppositions: BTreeSet<Literal>,
    /// False iff the tableau is closed (no open branch to read).
    pub consistent: bool,
    /// Whether every open branch produced the same surviving set. Expected
    /// to hold for full-coverage tableaux; reported rather than assumed.
    pub agreement: bool,
    pub branches: Vec<BranchReport>,
}

impl PresupReport {
    /// The "every open branch" reading: presuppositions surviving in all
    /// branches. Coincides with `presuppositions` whenever `agreement`.
    pub fn intersection_presuppositions(&self) -> BTreeSet<Literal> {
        let mut iter = self.branches.iter();
        let first = match iter.next() {
            Some(b) => b.surviving.clone(),
            None => return BTreeSet::new(),
        };
        iter.fold(first, |acc, b| acc.intersection(&b.surviving).cloned().collect())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "presuppositions": self.presuppositions.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "consistent": self.consistent,
            "agreement": self.agreement,
            "branches": self.branches.iter().map(|b| json!({
                "literals": b.literals.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                "surviving": b.surviving.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                "blocked": b.blocked.iter().map(|blocked| json!({
                    "target": blocked.target.to_string(),
                    "origin": blocked.origin.to_string(),
                    "reason": blocked.reason.name(),
                    "source": match &blocked.reason {
                        BlockReason::ConflictingPresup { source } => Some(source.to_string()),
                        _ => None,
                    },
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Reads the presuppositions off a fully expanded tableau. A closed tableau
/// yields the distinguished inconsistent report rather than an empty set,
/// so callers can tell "no presuppositions" from "no models".
pub fn tableau_presuppositions(tableau: &Tableau) -> PresupReport {
    let open = tableau.open_branches();
    if open.is_empty() {
        return PresupReport {
            presuppositions: BTreeSet::new(),
            consistent: false,
            agreement: true,
            branches: Vec::new(),
        };
    }
    let branches: Vec<BranchReport> = open
        .into_iter()
        .map(|b| branch_presuppositions(b, tableau.presup_map()).expect("branch is open"))
        .collect();
    let presuppositions = branches[0].surviving.clone();
    let agreement = branches.iter().all(|b| b.surviving == presuppositions);
    PresupReport { presuppositions, consistent: true, agreement, branches }
}

/// Expands the discourse into one cumulative tableau and reads its
/// presuppositions.
pub fn discourse_presuppositions(
    discourse: &Discourse,
    rules: RuleSet,
) -> Result<PresupReport, TableauError> {
    let tableau = Tableau::from_discourse(discourse, rules)?;
    Ok(tableau_presuppositions(&tableau))
}

/// How a candidate presupposition relates to what a tableau asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresupStatus {
    /// Adding its negation closes the tableau: the context entails it.
    Satisfied,
    /// Adding it closes the tableau: the context rules it out.
    Canceled,
    /// Some open branches assert it and others its negation.
    Hybrid,
    /// No open branch mentions its atom.
    Independent,
}

impl PresupStatus {
    pub fn name(self) -> &'static str {
        match self {
            PresupStatus::Satisfied => "satisfied",
            PresupStatus::Canceled => "canceled",
            PresupStatus::Hybrid => "hybrid",
            PresupStatus::Independent => "independent",
        }
    }
}

impl fmt::Display for PresupStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PresupStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "satisfied" => Ok(PresupStatus::Satisfied),
            "canceled" => Ok(PresupStatus::Canceled),
            "hybrid" => Ok(PresupStatus::Hybrid),
            "independent" => Ok(PresupStatus::Independent),
            other => Err(format!(
                "unknown status {other:?}: expected satisfied, canceled, hybrid or independent"
            )),
        }
    }
}

/// The classification plus both views it rests on: the literal closure
/// tests and the branch-membership counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatusReport {
    pub target: Literal,
    pub status: PresupStatus,
    /// The tableau extended with the target's negation closes.
    pub negation_closes: bool,
    /// The tableau extended with the target itself closes.
    pub assertion_closes: bool,
    /// Open branches containing the target.
    pub asserting_branches: usize,
    /// Open branches containing its complement.
    pub denying_branches: usize,
}

impl StatusReport {
    pub fn to_json(&self) -> Value {
        json!({
            "target": self.target.to_string(),
            "status": self.status.name(),
            "negation_closes": self.negation_closes,
            "assertion_closes": self.assertion_closes,
            "asserting_branches": self.asserting_branches,
            "denying_branches": self.denying_branches,
        })
    }
}

/// Classifies `target` against an open tableau by running the two closure
/// tests literally, then falling back on branch membership for the mixed
/// and absent cases.
pub fn presup_status(tableau: &Tableau, target: &Literal) -> Result<StatusReport, PresupError> {
    if tableau.is_closed() {
        return Err(PresupError::ClosedTableau);
    }
    let mut with_negation = tableau.clone();
    with_negation.add_sentence(&target.complement().to_formula())?;
    let negation_closes = with_negation.is_closed();

    let mut with_assertion = tableau.clone();
    with_assertion.add_sentence(&target.to_formula())?;
    let assertion_closes = with_assertion.is_closed();

    let open = tableau.open_branches();
    let asserting_branches = open.iter().filter(|b| b.contains(target)).count();
    let denying_branches = open.iter().filter(|b| b.contains(&target.complement())).count();

    let status = if negation_closes {
        PresupStatus::Satisfied
    } else if assertion_closes {
        PresupStatus::Canceled
    } else if asserting_branches > 0 && denying_branches > 0 {
        PresupStatus::Hybrid
    } else {
        PresupStatus::Independent
    };
    Ok(StatusReport {
        target: target.clone(),
        status,
        negation_closes,
        assertion_closes,
        asserting_branches,
        denying_branches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_discourse, parse_formula};

    fn atom(name: &str) -> AtomId {
        AtomId::new(name).unwrap()
    }

    fn pos(name: &str) -> Literal {
        Literal::positive(atom(name))
    }

    fn neg(name: &str) -> Literal {
        Literal::negative(atom(name))
    }

    fn pt(text: &str) -> Tableau {
        let (f, map) = parse_formula(text).unwrap();
        Tableau::expand(&f, map, RuleSet::Pt).unwrap()
    }

    fn presups_of(text: &str) -> BTreeSet<Literal> {
        let report = tableau_presuppositions(&pt(text));
        assert!(report.consistent, "{text} should have an open tableau");
        assert!(report.agreement, "branches of {text} disagreed");
        report.presuppositions
    }

    #[test]
    fn survives_in_a_branch_with_no_interference() {
        let map: PresupMap = [(atom("a"), pos("b"))].into_iter().collect();
        let branch = Branch::from_literals([pos("a"), pos("c")]);
        let report = branch_presuppositions(&branch, &map).unwrap();
        assert_eq!(report.surviving, [pos("b")].into());
        assert!(report.blocked.is_empty());
    }

    #[test]
    fn blocked_when_branch_contradicts_it() {
        let map: PresupMap = [(atom("a"), pos("b"))].into_iter().collect();
        let branch = Branch::from_literals([neg("b"), pos("a")]);
        let report = branch_presuppositions(&branch, &map).unwrap();
        assert!(report.surviving.is_empty());
        assert_eq!(report.blocked.len(), 1);
        assert_eq!(report.blocked[0].reason, BlockReason::ContradictedByBranch);
        assert_eq!(report.blocked[0].target, pos("b"));
    }

    #[test]
    fn blocked_when_branch_already_asserts_it() {
        let map: PresupMap = [(atom("a"), pos("b"))].into_iter().collect();
        let branch = Branch::from_literals([pos("b"), pos("a")]);
        let report = branch_presuppositions(&branch, &map).unwrap();
        assert!(report.surviving.is_empty());
        assert_eq!(report.blocked[0].reason, BlockReason::AlreadyAsserted);
    }

    #[test]
    fn conflicting_presuppositions_cancel_each_other() {
        let map: PresupMap =
            [(atom("d"), neg("b")), (atom("a"), pos("b"))].into_iter().collect();
        let branch = Branch::from_literals([pos("d"), pos("a")]);
        let report = branch_presuppositions(&branch, &map).unwrap();
        assert!(report.surviving.is_empty());
        assert_eq!(report.blocked.len(), 2);
        assert!(report
            .blocked
            .iter()
            .all(|b| matches!(b.reason, BlockReason::ConflictingPresup { .. })));
        // each names the other as the source
        assert_eq!(
            report.blocked.iter().map(|b| (&b.origin, &b.reason)).collect::<Vec<_>>(),
            vec![
                (&atom("a"), &BlockReason::ConflictingPresup { source: atom("d") }),
                (&atom("d"), &BlockReason::ConflictingPresup { source: atom("a") }),
            ]
        );
    }

    #[test]
    fn negated_occurrence_still_presupposes() {
        let map: PresupMap = [(atom("a"), pos("b"))].into_iter().collect();
        let branch = Branch::from_literals([neg("a"), pos("c")]);
        let report = branch_presuppositions(&branch, &map).unwrap();
        assert_eq!(report.surviving, [pos("b")].into());
    }

    #[test]
    fn shared_targets_merge_instead_of_clashing() {
        let map: PresupMap =
            [(atom("a"), pos("b")), (atom("d"), pos("b"))].into_iter().collect();
        let branch = Branch::from_literals([pos("a"), pos("d")]);
        let report = branch_presuppositions(&branch, &map).unwrap();
        assert_eq!(report.surviving, [pos("b")].into());
        assert!(report.blocked.is_empty());
    }

    #[test]
    fn closed_branch_is_an_error() {
        let map = PresupMap::new();
        let branch = Branch::from_literals([pos("a"), neg("a")]);
        assert_eq!(
            branch_presuppositions(&branch, &map).unwrap_err(),
            PresupError::ClosedBranch
        );
    }

    #[test]
    fn antecedent_annotation_projects() {
        assert_eq!(presups_of("a[b] -> c"), [pos("b")].into());
    }

    #[test]
    fn antecedent_matching_the_presupposition_filters_it() {
        assert_eq!(presups_of("b -> a[b]"), BTreeSet::new());
    }

    #[test]
    fn conjunctive_antecedent_filters_consequent_presupposition() {
        assert_eq!(presups_of("(a & b) -> d[b]"), BTreeSet::new());
    }

    #[test]
    fn symmetric_disjunction_filters_too() {
        assert_eq!(presups_of("~b | a[b]"), BTreeSet::new());
        assert_eq!(presups_of("a[b] | ~b"), BTreeSet::new());
    }

    #[test]
    fn discourse_context_absorbs_presupposition() {
        let d = parse_discourse("a -> b ; a -> d[b]").unwrap();
        let report = discourse_presuppositions(&d, RuleSet::Pt).unwrap();
        assert!(report.consistent && report.agreement);
        assert!(report.presuppositions.is_empty());

        let alone = parse_discourse("a -> d[b]").unwrap();
        let report = discourse_presuppositions(&alone, RuleSet::Pt).unwrap();
        assert_eq!(report.presuppositions, [pos("b")].into());
    }

    #[test]
    fn unrelated_context_leaves_presupposition_alone() {
        let d = parse_discourse("c ; a -> d[b]").unwrap();
        let report = discourse_presuppositions(&d, RuleSet::Pt).unwrap();
        assert_eq!(report.presuppositions, [pos("b")].into());
    }

    #[test]
    fn closed_tableau_reports_inconsistent() {
        let d = parse_discourse("a ; ~a").unwrap();
        let report = discourse_presuppositions(&d, RuleSet::Pt).unwrap();
        assert!(!report.consistent);
        assert!(report.presuppositions.is_empty());
        assert!(report.branches.is_empty());
    }

    #[test]
    fn some_and_every_branch_readings_coincide() {
        for text in ["a[b] -> c", "b -> a[b]", "d[~b] | a[b]", "(a & b) -> d[b]"] {
            let report = tableau_presuppositions(&pt(text));
            assert!(report.agreement, "{text}");
            assert_eq!(report.presuppositions, report.intersection_presuppositions(), "{text}");
        }
    }

    #[test]
    fn traditional_rules_can_break_agreement() {
        // Without coverage one branch never sees the annotated atom; the
        // report records the disagreement instead of asserting it away.
        let (f, map) = parse_formula("a[x] | c").unwrap();
        let t = Tableau::expand(&f, map, RuleSet::St).unwrap();
        let report = tableau_presuppositions(&t);
        assert!(report.consistent);
        assert!(!report.agreement);
    }

    #[test]
    fn status_satisfied_when_negation_closes() {
        let t = pt("b");
        let report = presup_status(&t, &pos("b")).unwrap();
        assert_eq!(report.status, PresupStatus::Satisfied);
        assert!(report.negation_closes && !report.assertion_closes);
    }

    #[test]
    fn status_canceled_when_assertion_closes() {
        let t = pt("~b");
        let report = presup_status(&t, &pos("b")).unwrap();
        assert_eq!(report.status, PresupStatus::Canceled);
        assert!(!report.negation_closes && report.assertion_closes);
    }

    #[test]
    fn status_hybrid_when_branches_split_over_it() {
        let t = pt("b -> a[b]");
        let report = presup_status(&t, &pos("b")).unwrap();
        assert_eq!(report.status, PresupStatus::Hybrid);
        assert!(report.asserting_branches > 0 && report.denying_branches > 0);
    }

    #[test]
    fn status_independent_when_atom_absent() {
        let t = pt("c | d");
        let report = presup_status(&t, &pos("b")).unwrap();
        assert_eq!(report.status, PresupStatus::Independent);
        assert_eq!(report.asserting_branches, 0);
        assert_eq!(report.denying_branches, 0);
    }

    #[test]
    fn status_on_closed_tableau_is_an_error() {
        let t = pt("b & ~b");
        assert_eq!(
            presup_status(&t, &pos("b")).unwrap_err(),
            PresupError::ClosedTableau
        );
    }

    #[test]
    fn report_json_shape() {
        let (f, map) = parse_formula("d[~b] | a[b]").unwrap();
        let t = Tableau::expand(&f, map, RuleSet::Pt).unwrap();
        let value = tableau_presuppositions(&t).to_json();
        assert_eq!(value["presuppositions"], json!([]));
        assert_eq!(value["consistent"], true);
        assert_eq!(value["agreement"], true);
        let first = &value["branches"][0];
        assert_eq!(first["literals"], json!(["a", "d"]));
        assert_eq!(first["blocked"][0]["reason"], "conflicting-presup");
        assert_eq!(first["blocked"][0]["source"], "d");
        assert_eq!(first["blocked"][0]["target"], "b");
    }
}
