//! Tableau expansion with full-coverage branching.
//!
//! The `Pt` rule set splits every branching connective three ways, one
//! branch per row of the connective's truth table that makes it true:
//!
//! ```text
//! p | q   =>  {p, q}   | {~p, q}  | {p, ~q}
//! p -> q  =>  {~p, q}  | {~p, ~q} | {p, q}
//! ~(p&q)  =>  {~p, ~q} | {~p, q}  | {p, ~q}
//! ```
//!
//! so every open branch of a fully expanded tableau assigns a sign to every
//! atom it has ever seen (the coverage guarantee). The `St` rule set is the
//! traditional two-way split (`p | q => {p} | {q}` and so on), kept for
//! cross-checking decisions; it does not provide coverage.
//!
//! Non-branching rules are shared by both rule sets:
//!
//! ```text
//! ~~p => p        p & q => p, q      ~(p -> q) => p, ~q     ~(p | q) => ~p, ~q
//! ```

use std::collections::{BTreeSet, VecDeque};

use serde_json::{json, Value};
use thiserror::Error;

use crate::parser::{render, Discourse};
use crate::syntax::{AtomId, Formula, Literal, MapViolation, PresupMap, SignedAnnotatedAtom};

/// Default bound on the number of leaves a tableau may grow.
pub const DEFAULT_BRANCH_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSet {
    /// Three-way branching; open branches are total assignments.
    Pt,
    /// Traditional two-way branching.
    St,
}

impl RuleSet {
    pub fn name(self) -> &'static str {
        match self {
            RuleSet::Pt => "pt",
            RuleSet::St => "st",
        }
    }
}

/// Which pending formula a branch expands next. `AlphaFirst` exhausts
/// non-branching rules before any split and is the canonical order;
/// `QueueOrder` takes formulas as they arrived. The deduplicated open-branch
/// literal sets are the same either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpansionOrder {
    #[default]
    AlphaFirst,
    QueueOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    DoubleNegation,
    AlphaAnd,
    AlphaNotImplies,
    AlphaNotOr,
    BetaOr,
    BetaImplies,
    BetaNotAnd,
}

impl RuleKind {
    pub fn name(self) -> &'static str {
        match self {
            RuleKind::DoubleNegation => "not-not",
            RuleKind::AlphaAnd => "alpha-and",
            RuleKind::AlphaNotImplies => "alpha-not-implies",
            RuleKind::AlphaNotOr => "alpha-not-or",
            RuleKind::BetaOr => "beta-or",
            RuleKind::BetaImplies => "beta-implies",
            RuleKind::BetaNotAnd => "beta-not-and",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("invalid presupposition map: {}", format_violations(.0))]
    InvalidPresupMap(Vec<MapViolation>),
    #[error("tableau exceeded the branch limit of {limit}")]
    BranchLimit { limit: usize },
}

fn format_violations(violations: &[MapViolation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// One path through the tableau: the signed atoms collected so far, the
/// compound formulas still waiting for expansion, and the closure flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    literals: BTreeSet<Literal>,
    pending: VecDeque<Formula>,
    closed: bool,
}

impl Branch {
    fn new() -> Self {
        Branch { literals: BTreeSet::new(), pending: VecDeque::new(), closed: false }
    }

    /// A branch holding the given literals, closed iff they contain a
    /// complementary pair. Handy for driving the projection rules directly.
    pub fn from_literals(literals: impl IntoIterator<Item = Literal>) -> Self {
        let mut branch = Branch::new();
        for lit in literals {
            branch.insert_literal(lit);
        }
        branch
    }

    pub fn literals(&self) -> &BTreeSet<Literal> {
        &self.literals
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.literals.contains(lit)
    }

    fn insert_literal(&mut self, lit: Literal) {
        if self.closed {
            return;
        }
        if self.literals.contains(&lit.complement()) {
            self.literals.insert(lit);
            self.closed = true;
            self.pending.clear();
        } else {
            self.literals.insert(lit);
        }
    }

    fn absorb(&mut self, f: &Formula) {
        if self.closed {
            return;
        }
        match f.as_literal() {
            Some(lit) => self.insert_literal(lit),
            None => self.pending.push_back(f.clone()),
        }
    }

    fn next_pending(&self, order: ExpansionOrder) -> Option<usize> {
        if self.pending.is_empty() {
            return None;
        }
        match order {
            ExpansionOrder::QueueOrder => Some(0),
            ExpansionOrder::AlphaFirst => Some(
                self.pending
                    .iter()
                    .position(is_non_branching)
                    .unwrap_or(0),
            ),
        }
    }
}

fn is_non_branching(f: &Formula) -> bool {
    match f {
        Formula::And(..) => true,
        Formula::Not(inner) => matches!(
            inner.as_ref(),
            Formula::Not(..) | Formula::Or(..) | Formula::Implies(..)
        ),
        _ => false,
    }
}

/// The columns a compound formula expands into; `None` for literals.
fn expansion_columns(f: &Formula, rules: RuleSet) -> Option<(RuleKind, Vec<Vec<Formula>>)> {
    let neg = |g: &Formula| g.clone().negate();
    match f {
        Formula::Atom(_) => None,
        Formula::And(l, r) => {
            Some((RuleKind::AlphaAnd, vec![vec![(**l).clone(), (**r).clone()]]))
        }
        Formula::Or(l, r) => {
            let (l, r) = (l.as_ref(), r.as_ref());
            let columns = match rules {
                RuleSet::Pt => vec![
                    vec![l.clone(), r.clone()],
                    vec![neg(l), r.clone()],
                    vec![l.clone(), neg(r)],
                ],
                RuleSet::St => vec![vec![l.clone()], vec![r.clone()]],
            };
            Some((RuleKind::BetaOr, columns))
        }
        Formula::Implies(l, r) => {
            let (l, r) = (l.as_ref(), r.as_ref());
            let columns = match rules {
                RuleSet::Pt => vec![
                    vec![neg(l), r.clone()],
                    vec![neg(l), neg(r)],
                    vec![l.clone(), r.clone()],
                ],
                RuleSet::St => vec![vec![neg(l)], vec![r.clone()]],
            };
            Some((RuleKind::BetaImplies, columns))
        }
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(_) => None,
            Formula::Not(g) => Some((RuleKind::DoubleNegation, vec![vec![(**g).clone()]])),
            Formula::Or(l, r) => Some((
                RuleKind::AlphaNotOr,
                vec![vec![neg(l), neg(r)]],
            )),
            Formula::Implies(l, r) => Some((
                RuleKind::AlphaNotImplies,
                vec![vec![(**l).clone(), neg(r)]],
            )),
            Formula::And(l, r) => {
                let (l, r) = (l.as_ref(), r.as_ref());
                let columns = match rules {
                    RuleSet::Pt => vec![
                        vec![neg(l), neg(r)],
                        vec![neg(l), r.clone()],
                        vec![l.clone(), neg(r)],
                    ],
                    RuleSet::St => vec![vec![neg(l)], vec![neg(r)]],
                };
                Some((RuleKind::BetaNotAnd, columns))
            }
        },
    }
}

#[derive(Debug, Clone)]
struct Node {
    /// Formulas written at this node, in arrival order.
    formulas: Vec<Formula>,
    /// The rule application that produced this node's children.
    expansion: Option<(RuleKind, Formula)>,
    children: Vec<usize>,
    /// Present exactly at leaves.
    branch: Option<Branch>,
}

impl Node {
    fn leaf(formulas: Vec<Formula>, branch: Branch) -> Self {
        Node { formulas, expansion: None, children: Vec::new(), branch: Some(branch) }
    }
}

/// A fully expanded tableau for a growing set of sentences.
///
/// Sentences share one presupposition map, fixed at construction. Every
/// mutation keeps the tableau fully expanded, so branch inspection never
/// sees pending work on an open leaf.
#[derive(Debug, Clone)]
pub struct Tableau {
    rules: RuleSet,
    presup_map: PresupMap,
    universe: BTreeSet<AtomId>,
    nodes: Vec<Node>,
    leaf_count: usize,
    max_branches: usize,
    order: ExpansionOrder,
}

impl Tableau {
    /// An empty tableau: one open branch with nothing in it. Fails when the
    /// presupposition map breaks the no-chain invariant.
    pub fn new(rules: RuleSet, presup_map: PresupMap) -> Result<Self, TableauError> {
        let violations = presup_map.validate();
        if !violations.is_empty() {
            return Err(TableauError::InvalidPresupMap(violations));
        }
        Ok(Tableau {
            rules,
            presup_map,
            universe: BTreeSet::new(),
            nodes: vec![Node::leaf(Vec::new(), Branch::new())],
            leaf_count: 1,
            max_branches: DEFAULT_BRANCH_LIMIT,
            order: ExpansionOrder::default(),
        })
    }

    pub fn with_branch_limit(mut self, max_branches: usize) -> Self {
        self.max_branches = max_branches;
        self
    }

    pub fn with_expansion_order(mut self, order: ExpansionOrder) -> Self {
        self.order = order;
        self
    }

    /// Builds and fully expands the tableau for a single formula.
    pub fn expand(f: &Formula, presup_map: PresupMap, rules: RuleSet) -> Result<Self, TableauError> {
        let mut tableau = Tableau::new(rules, presup_map)?;
        tableau.add_sentence(f)?;
        Ok(tableau)
    }

    /// Expands the discourse's formulas in order into one tableau.
    pub fn from_discourse(d: &Discourse, rules: RuleSet) -> Result<Self, TableauError> {
        let mut tableau = Tableau::new(rules, d.presup_map.clone())?;
        for f in &d.formulas {
            tableau.add_sentence(f)?;
        }
        Ok(tableau)
    }

    pub fn rules(&self) -> RuleSet {
        self.rules
    }

    pub fn presup_map(&self) -> &PresupMap {
        &self.presup_map
    }

    /// Atoms of every sentence ever added, open or closed.
    pub fn universe(&self) -> &BTreeSet<AtomId> {
        &self.universe
    }

    /// Appends `f` to every open branch and re-expands. Closed branches are
    /// never touched; the universe grows either way.
    pub fn add_sentence(&mut self, f: &Formula) -> Result<(), TableauError> {
        self.universe.extend(f.atoms());
        let open_leaves: Vec<usize> = self
            .leaf_ids()
            .into_iter()
            .filter(|&id| !self.nodes[id].branch.as_ref().expect("leaf").closed)
            .collect();
        for id in open_leaves {
            let node = &mut self.nodes[id];
            node.formulas.push(f.clone());
            node.branch.as_mut().expect("leaf").absorb(f);
            self.expand_from(id)?;
        }
        Ok(())
    }

    /// Runs expansion to fixpoint below `start`, depth first.
    fn expand_from(&mut self, start: usize) -> Result<(), TableauError> {
        let mut stack = vec![start];
        while let Some(id) = stack.pop() {
            let formula = {
                let branch = self.nodes[id].branch.as_mut().expect("expansion visits leaves");
                if branch.closed {
                    continue;
                }
                match branch.next_pending(self.order) {
                    Some(idx) => branch.pending.remove(idx).expect("index from next_pending"),
                    None => continue,
                }
            };
            let (rule, columns) =
                expansion_columns(&formula, self.rules).expect("pending holds only compounds");
            let grown = self.leaf_count - 1 + columns.len();
            if grown > self.max_branches {
                return Err(TableauError::BranchLimit { limit: self.max_branches });
            }
            let parent_branch = self.nodes[id].branch.take().expect("leaf");
            self.nodes[id].expansion = Some((rule, formula));
            let mut child_ids = Vec::with_capacity(columns.len());
            for column in columns {
                let mut branch = parent_branch.clone();
                for g in &column {
                    branch.absorb(g);
                }
                child_ids.push(self.nodes.len());
                self.nodes.push(Node::leaf(column, branch));
            }
            self.leaf_count = grown;
            self.nodes[id].children.clone_from(&child_ids);
            for &child in child_ids.iter().rev() {
                stack.push(child);
            }
        }
        Ok(())
    }

    /// Leaf node ids in left-to-right order.
    fn leaf_ids(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if node.children.is_empty() {
                out.push(id);
            } else {
                for &child in node.children.iter().rev() {
                    stack.push(child);
                }
            }
        }
        out
    }

    /// All branches, left to right.
    pub fn branches(&self) -> Vec<&Branch> {
        self.leaf_ids()
            .into_iter()
            .map(|id| self.nodes[id].branch.as_ref().expect("leaf"))
            .collect()
    }

    /// Exactly the non-closed branches, left to right.
    pub fn open_branches(&self) -> Vec<&Branch> {
        self.branches().into_iter().filter(|b| !b.closed).collect()
    }

    pub fn branch_count(&self) -> usize {
        self.leaf_count
    }

    /// Open branches with identical literal sets counted once; duplicates
    /// stay in the tree but carry no extra information.
    pub fn distinct_open_branches(&self) -> usize {
        self.open_branches()
            .into_iter()
            .map(|b| &b.literals)
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Closed iff every branch is closed. The empty tableau is open.
    pub fn is_closed(&self) -> bool {
        self.branches().iter().all(|b| b.closed)
    }

    /// Verifies that every open branch signs every universe atom, reporting
    /// the first branch that does not.
    pub fn check_coverage(&self) -> Result<(), CoverageViolation> {
        for (index, branch) in self.open_branches().into_iter().enumerate() {
            let signed: BTreeSet<&AtomId> = branch.literals.iter().map(|l| &l.atom).collect();
            if let Some(missing) = self.universe.iter().find(|a| !signed.contains(a)) {
                return Err(CoverageViolation {
                    branch_index: index,
                    missing_atom: missing.clone(),
                    literals: branch.literals.clone(),
                });
            }
        }
        Ok(())
    }

    fn annotated(&self, lit: &Literal) -> SignedAnnotatedAtom {
        SignedAnnotatedAtom::lookup(lit.clone(), &self.presup_map)
    }

    /// Indented text rendering. Non-branching steps continue at the same
    /// indent; each branch of a split becomes a `-` item.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        self.render_node(0, "", &mut out);
        out
    }

    fn render_node(&self, id: usize, prefix: &str, out: &mut String) {
        let node = &self.nodes[id];
        let mut first_line_prefix: Option<&str> = if prefix.ends_with("- ") { Some(prefix) } else { None };
        let plain: String = prefix.replace("- ", "  ");
        for f in &node.formulas {
            let p = first_line_prefix.take().map(str::to_owned).unwrap_or_else(|| plain.clone());
            out.push_str(&p);
            out.push_str(&render(f, &self.presup_map));
            out.push('\n');
        }
        if let Some(branch) = &node.branch {
            let p = first_line_prefix.take().map(str::to_owned).unwrap_or_else(|| plain.clone());
            out.push_str(&p);
            if branch.closed {
                out.push_str("=> closed\n");
            } else {
                let lits = branch
                    .literals
                    .iter()
                    .map(|l| self.annotated(l).to_string())
                    .collect::<Vec<_>>()
                    .join(", ");
                out.push_str(&format!("=> open {{{lits}}}\n"));
            }
        }
        if let Some((rule, consumed)) = &node.expansion {
            let p = first_line_prefix.take().map(str::to_owned).unwrap_or_else(|| plain.clone());
            out.push_str(&format!("{p}[{}: {}]\n", rule.name(), render(consumed, &self.presup_map)));
            if node.children.len() == 1 {
                self.render_node(node.children[0], &plain, out);
            } else {
                let child_prefix = format!("{plain}- ");
                for &child in &node.children {
                    self.render_node(child, &child_prefix, out);
                }
            }
        }
    }

    /// Machine-readable tree: per node the formulas written there, the rule
    /// applied, the formula it consumed, the cumulative literal set, the
    /// closure flag, and the children.
    pub fn to_json(&self) -> Value {
        let (tree, _) = self.node_json(0, &BTreeSet::new());
        json!({
            "rules": self.rules.name(),
            "closed": self.is_closed(),
            "branches": self.branch_count(),
            "open_branches": self.open_branches().len(),
            "distinct_open_branches": self.distinct_open_branches(),
            "universe": self.universe.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "tree": tree,
        })
    }

    fn node_json(&self, id: usize, inherited: &BTreeSet<Literal>) -> (Value, bool) {
        let node = &self.nodes[id];
        let literals: BTreeSet<Literal> = match &node.branch {
            Some(branch) => branch.literals.clone(),
            None => {
                let mut acc = inherited.clone();
                acc.extend(node.formulas.iter().filter_map(Formula::as_literal));
                acc
            }
        };
        let mut children = Vec::new();
        let closed = match &node.branch {
            Some(branch) => branch.closed,
            None => {
                let mut all_closed = true;
                for &child in &node.children {
                    let (value, child_closed) = self.node_json(child, &literals);
                    children.push(value);
                    all_closed &= child_closed;
                }
                all_closed
            }
        };
        let value = json!({
            "formulas": node.formulas.iter().map(|f| render(f, &self.presup_map)).collect::<Vec<_>>(),
            "rule": node.expansion.as_ref().map(|(rule, _)| rule.name()),
            "consumed": node.expansion.as_ref().map(|(_, f)| render(f, &self.presup_map)),
            "literals": literals.iter().map(|l| self.annotated(l).to_string()).collect::<Vec<_>>(),
            "closed": closed,
            "children": children,
        });
        (value, closed)
    }
}

/// An open branch that misses an atom of the universe; disproves coverage
/// for the rule set that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageViolation {
    /// Index into the open branches, left to right.
    pub branch_index: usize,
    pub missing_atom: AtomId,
    pub literals: BTreeSet<Literal>,
}
