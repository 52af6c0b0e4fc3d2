//! Propositional tableaux with full-coverage branching and presupposition
//! projection.
//!
//! The engine expands formulas and discourses into tableaux whose branching
//! rules enumerate every truth-table row that makes a compound true, so
//! each open branch of a fully expanded tableau is a complete assignment
//! over the atoms seen so far. Over that structure the crate computes the
//! presuppositions of compound statements compositionally, classifies them
//! as satisfied, canceled, hybrid or independent, and decides
//! satisfiability and validity — cross-checkable against traditional
//! two-way tableaux and a brute-force truth-table oracle.
//!
//! Entry points:
//! - [`parser::parse_formula`] / [`parser::parse_discourse`] for the text
//!   syntax (`a[b] -> c` reads "a, which presupposes b, implies c"),
//! - [`tableau::Tableau`] for expansion, closure and coverage,
//! - [`presup::tableau_presuppositions`] and friends for projection,
//! - [`oracle`] for the truth-table reference semantics,
//! - [`corpus`] for golden-test files.

pub mod corpus;
pub mod oracle;
pub mod parser;
pub mod presup;
pub mod syntax;
pub mod tableau;

pub use parser::{parse_discourse, parse_formula, render, render_discourse, Discourse, ParseError};
pub use presup::{
    branch_presuppositions, discourse_presuppositions, presup_status, tableau_presuppositions,
    BlockReason, BlockedPresup, BranchReport, PresupError, PresupReport, PresupStatus,
    StatusReport,
};
pub use syntax::{AtomId, Formula, Literal, PresupMap, Sign, SignedAnnotatedAtom};
pub use tableau::{
    Branch, CoverageViolation, ExpansionOrder, RuleSet, Tableau, TableauError,
    DEFAULT_BRANCH_LIMIT,
};
