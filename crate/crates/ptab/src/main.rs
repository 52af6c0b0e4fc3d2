//! Command-line front end: parse, expand, decide, project presuppositions,
//! classify their status, enumerate models, and run golden corpora.
//!
//! Exit codes are a contract:
//!   0  ok / open / positive verdict
//!   1  closed / unsatisfiable / not valid / no models
//!   2  usage, syntax or file errors
//!   3  resource caps exceeded
//!   4  inconsistent input (closed tableau where an open one is required)
//!   5  corpus expectation failures
//! Internal cross-check disagreements exit with 70.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ptab::corpus::{evaluate_entry, parse_corpus, EntryOutcome};
use ptab::oracle::{self, assignment_literals};
use ptab::presup::{presup_status, tableau_presuppositions, BlockReason, PresupReport};
use ptab::{
    parse_discourse, render, Discourse, Literal, RuleSet, SignedAnnotatedAtom, Tableau,
    TableauError, DEFAULT_BRANCH_LIMIT,
};

const DEFAULT_MAX_ATOMS: usize = 12;
const DEFAULT_ORACLE_ATOMS: usize = 16;

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_INCONSISTENT: u8 = 4;
const EXIT_CORPUS: u8 = 5;
const EXIT_INTERNAL: u8 = 70;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RulesArg {
    Pt,
    St,
}

impl From<RulesArg> for RuleSet {
    fn from(value: RulesArg) -> Self {
        match value {
            RulesArg::Pt => RuleSet::Pt,
            RulesArg::St => RuleSet::St,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ptab",
    version,
    about = "Full-coverage propositional tableaux with presupposition projection"
)]
struct Cli {
    /// Output format; overrides the PTAB_FORMAT environment variable.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula or discourse and echo its canonical form
    Parse {
        /// Formula or `;`/newline-separated discourse, e.g. "a[b] -> c"
        input: String,
    },
    /// Expand input into a tableau and print the tree
    Tableau {
        /// Rule set: pt = three-way coverage branching, st = traditional
        #[arg(long, value_enum, default_value = "pt")]
        rules: RulesArg,
        #[arg(long)]
        max_atoms: Option<usize>,
        #[arg(long)]
        max_branches: Option<usize>,
        input: String,
    },
    /// Compute the presuppositions of a formula or discourse
    Presup {
        #[arg(long)]
        max_atoms: Option<usize>,
        #[arg(long)]
        max_branches: Option<usize>,
        input: String,
    },
    /// Decide validity or satisfiability via the tableau
    #[command(group(ArgGroup::new("mode").required(true).args(["valid", "sat"])))]
    Decide {
        /// Decide whether the formula is valid
        #[arg(long)]
        valid: bool,
        /// Decide whether the formula is satisfiable
        #[arg(long)]
        sat: bool,
        /// Also run the traditional rules and the truth-table oracle
        #[arg(long)]
        cross_check: bool,
        #[arg(long)]
        max_atoms: Option<usize>,
        #[arg(long)]
        max_branches: Option<usize>,
        formula: String,
    },
    /// Classify a presupposition against a discourse
    Status {
        #[arg(long)]
        max_atoms: Option<usize>,
        #[arg(long)]
        max_branches: Option<usize>,
        discourse: String,
        /// The presupposition to classify, e.g. "b" or "~b"
        target: String,
    },
    /// Run a corpus file of golden cases
    Corpus { path: PathBuf },
    /// Enumerate classical models by brute force
    Oracle {
        #[arg(long)]
        max_atoms: Option<usize>,
        input: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match resolve_format(cli.format) {
        Ok(format) => format,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let code = match cli.command {
        Command::Parse { input } => cmd_parse(&input, format),
        Command::Tableau { rules, max_atoms, max_branches, input } => {
            cmd_tableau(&input, rules.into(), max_atoms, max_branches, format)
        }
        Command::Presup { max_atoms, max_branches, input } => {
            cmd_presup(&input, max_atoms, max_branches, format)
        }
        Command::Decide { valid, sat: _, cross_check, max_atoms, max_branches, formula } => {
            cmd_decide(&formula, valid, cross_check, max_atoms, max_branches, format)
        }
        Command::Status { max_atoms, max_branches, discourse, target } => {
            cmd_status(&discourse, &target, max_atoms, max_branches, format)
        }
        Command::Corpus { path } => cmd_corpus(&path, format),
        Command::Oracle { max_atoms, input } => cmd_oracle(&input, max_atoms, format),
    };
    ExitCode::from(code)
}

fn resolve_format(flag: Option<OutputFormat>) -> Result<OutputFormat, String> {
    if let Some(format) = flag {
        return Ok(format);
    }
    match std::env::var("PTAB_FORMAT") {
        Ok(value) => match value.to_ascii_lowercase().as_str() {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("PTAB_FORMAT must be 'text' or 'json', not {other:?}")),
        },
        Err(_) => Ok(OutputFormat::Text),
    }
}

fn emit_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable value"));
}

/// Parses the input and enforces the atom cap; errors are printed and
/// mapped to the exit-code contract.
fn load_discourse(input: &str, max_atoms: usize) -> Result<Discourse, u8> {
    let discourse = parse_discourse(input).map_err(|e| {
        eprintln!("parse error: {e}");
        EXIT_USAGE
    })?;
    let atoms = discourse.atoms().len();
    if atoms > max_atoms {
        eprintln!("resource limit: input has {atoms} atoms, --max-atoms is {max_atoms}");
        return Err(EXIT_RESOURCE);
    }
    Ok(discourse)
}

fn build_tableau(discourse: &Discourse, rules: RuleSet, max_branches: usize) -> Result<Tableau, u8> {
    let mut tableau = Tableau::new(rules, discourse.presup_map.clone())
        .map_err(|e| {
            eprintln!("error: {e}");
            EXIT_USAGE
        })?
        .with_branch_limit(max_branches);
    for formula in &discourse.formulas {
        tableau.add_sentence(formula).map_err(|e| match e {
            TableauError::BranchLimit { .. } => {
                eprintln!("resource limit: {e}");
                EXIT_RESOURCE
            }
            other => {
                eprintln!("error: {other}");
                EXIT_USAGE
            }
        })?;
    }
    Ok(tableau)
}

fn cmd_parse(input: &str, format: OutputFormat) -> u8 {
    let discourse = match parse_discourse(input) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("parse error: {e}");
            return EXIT_USAGE;
        }
    };
    match format {
        OutputFormat::Text => {
            for formula in &discourse.formulas {
                println!("{}", render(formula, &discourse.presup_map));
            }
            let atoms: Vec<String> =
                discourse.atoms().iter().map(ToString::to_string).collect();
            println!("atoms: {}", if atoms.is_empty() { "(none)".into() } else { atoms.join(", ") });
            for (atom, target) in discourse.presup_map.iter() {
                println!("annotation: {atom} presupposes {target}");
            }
        }
        OutputFormat::Json => {
            emit_json(&json!({
                "formulas": discourse.formulas.iter()
                    .map(|f| render(f, &discourse.presup_map)).collect::<Vec<_>>(),
                "atoms": discourse.atoms().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "annotations": discourse.presup_map.iter()
                    .map(|(a, t)| (a.to_string(), t.to_string()))
                    .collect::<std::collections::BTreeMap<_, _>>(),
            }));
        }
    }
    EXIT_OK
}

fn cmd_tableau(
    input: &str,
    rules: RuleSet,
    max_atoms: Option<usize>,
    max_branches: Option<usize>,
    format: OutputFormat,
) -> u8 {
    let discourse = match load_discourse(input, max_atoms.unwrap_or(DEFAULT_MAX_ATOMS)) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let tableau =
        match build_tableau(&discourse, rules, max_branches.unwrap_or(DEFAULT_BRANCH_LIMIT)) {
            Ok(t) => t,
            Err(code) => return code,
        };
    match format {
        OutputFormat::Text => {
            print!("{}", tableau.render_text());
            let open = tableau.open_branches().len();
            let distinct = tableau.distinct_open_branches();
            if distinct == open {
                println!("{} branches, {open} open", tableau.branch_count());
            } else {
                println!("{} branches, {open} open ({distinct} distinct)", tableau.branch_count());
            }
        }
        OutputFormat::Json => emit_json(&tableau.to_json()),
    }
    if tableau.is_closed() {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    }
}

fn render_presup_text(report: &PresupReport, tableau: &Tableau) {
    let set = |lits: &BTreeSet<Literal>| {
        if lits.is_empty() {
            "(none)".to_string()
        } else {
            lits.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        }
    };
    if !report.consistent {
        println!("inconsistent: every branch of the tableau is closed");
        return;
    }
    println!("presuppositions: {}", set(&report.presuppositions));
    println!("branches:");
    for (i, branch) in report.branches.iter().enumerate() {
        let literals = branch
            .literals
            .iter()
            .map(|l| SignedAnnotatedAtom::lookup(l.clone(), tableau.presup_map()).to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let mut line = format!("  {}) {{{literals}}}  surviving: {}", i + 1, set(&branch.surviving));
        for blocked in &branch.blocked {
            let source = match &blocked.reason {
                BlockReason::ConflictingPresup { source } => format!(" via {source}"),
                _ => String::new(),
            };
            line.push_str(&format!(
                "  blocked: {} (from {}: {}{source})",
                blocked.target,
                blocked.origin,
                blocked.reason.name()
            ));
        }
        println!("{line}");
    }
}

fn cmd_presup(
    input: &str,
    max_atoms: Option<usize>,
    max_branches: Option<usize>,
    format: OutputFormat,
) -> u8 {
    let discourse = match load_discourse(input, max_atoms.unwrap_or(DEFAULT_MAX_ATOMS)) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let tableau = match build_tableau(
        &discourse,
        RuleSet::Pt,
        max_branches.unwrap_or(DEFAULT_BRANCH_LIMIT),
    ) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let report = tableau_presuppositions(&tableau);
    match format {
        OutputFormat::Text => render_presup_text(&report, &tableau),
        OutputFormat::Json => emit_json(&report.to_json()),
    }
    if !report.agreement {
        eprintln!("internal error: open branches disagree on their presuppositions");
        return EXIT_INTERNAL;
    }
    if report.consistent {
        EXIT_OK
    } else {
        EXIT_INCONSISTENT
    }
}

fn cmd_decide(
    input: &str,
    valid_mode: bool,
    cross_check: bool,
    max_atoms: Option<usize>,
    max_branches: Option<usize>,
    format: OutputFormat,
) -> u8 {
    let discourse = match load_discourse(input, max_atoms.unwrap_or(DEFAULT_MAX_ATOMS)) {
        Ok(d) => d,
        Err(code) => return code,
    };
    if discourse.formulas.len() != 1 {
        eprintln!("error: decide expects exactly one formula, got {}", discourse.formulas.len());
        return EXIT_USAGE;
    }
    let formula = discourse.formulas[0].clone();
    // deciding validity refutes the negation; satisfiability expands the
    // formula itself
    let goal = if valid_mode { formula.clone().negate() } else { formula.clone() };
    let goal_discourse = Discourse { formulas: vec![goal.clone()], presup_map: discourse.presup_map.clone() };
    let max_branches = max_branches.unwrap_or(DEFAULT_BRANCH_LIMIT);
    let pt = match build_tableau(&goal_discourse, RuleSet::Pt, max_branches) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let verdict = if valid_mode { pt.is_closed() } else { !pt.is_closed() };

    let mut cross = None;
    if cross_check {
        let st = match build_tableau(&goal_discourse, RuleSet::St, max_branches) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let cap = max_atoms.unwrap_or(DEFAULT_ORACLE_ATOMS.max(DEFAULT_MAX_ATOMS));
        let oracle_unsat = match oracle::enumerate_models(std::slice::from_ref(&goal), &goal.atoms(), cap) {
            Ok(models) => models.is_empty(),
            Err(e) => {
                eprintln!("resource limit: {e}");
                return EXIT_RESOURCE;
            }
        };
        cross = Some((pt.is_closed(), st.is_closed(), oracle_unsat));
    }

    let mode = if valid_mode { "valid" } else { "sat" };
    let verdict_word = match (valid_mode, verdict) {
        (true, true) => "valid",
        (true, false) => "not valid",
        (false, true) => "satisfiable",
        (false, false) => "unsatisfiable",
    };
    match format {
        OutputFormat::Text => {
            println!("{verdict_word}");
            if let Some((pt_closed, st_closed, oracle_unsat)) = cross {
                println!(
                    "cross-check: pt={} st={} oracle={}",
                    if pt_closed { "closed" } else { "open" },
                    if st_closed { "closed" } else { "open" },
                    if oracle_unsat { "unsat" } else { "sat" },
                );
            }
        }
        OutputFormat::Json => {
            emit_json(&json!({
                "mode": mode,
                "verdict": verdict,
                "answer": verdict_word,
                "cross_check": cross.map(|(pt_closed, st_closed, oracle_unsat)| json!({
                    "pt_closed": pt_closed,
                    "st_closed": st_closed,
                    "oracle_unsat": oracle_unsat,
                })),
            }));
        }
    }
    if let Some((pt_closed, st_closed, oracle_unsat)) = cross {
        if pt_closed != st_closed || st_closed != oracle_unsat {
            eprintln!("internal error: cross-check disagreement (pt={pt_closed}, st={st_closed}, oracle_unsat={oracle_unsat})");
            return EXIT_INTERNAL;
        }
    }
    if verdict {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn cmd_status(
    input: &str,
    target: &str,
    max_atoms: Option<usize>,
    max_branches: Option<usize>,
    format: OutputFormat,
) -> u8 {
    let target: Literal = match target.parse() {
        Ok(lit) => lit,
        Err(e) => {
            eprintln!("error: bad target literal: {e}");
            return EXIT_USAGE;
        }
    };
    let discourse = match load_discourse(input, max_atoms.unwrap_or(DEFAULT_MAX_ATOMS)) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let tableau = match build_tableau(
        &discourse,
        RuleSet::Pt,
        max_branches.unwrap_or(DEFAULT_BRANCH_LIMIT),
    ) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let report = match presup_status(&tableau, &target) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("inconsistent input: {e}");
            return EXIT_INCONSISTENT;
        }
    };
    match format {
        OutputFormat::Text => println!("{}", report.status),
        OutputFormat::Json => emit_json(&report.to_json()),
    }
    EXIT_OK
}

fn render_outcome_text(outcome: &EntryOutcome) {
    let set = |lits: &BTreeSet<Literal>| {
        if lits.is_empty() {
            "(none)".to_string()
        } else {
            let joined = lits.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
            format!("{{{joined}}}")
        }
    };
    let mark = if outcome.passed { "PASS" } else { "FAIL" };
    let mut line = format!(
        "{mark}  {}  expected {} got {}",
        outcome.label,
        set(&outcome.expected),
        set(&outcome.actual)
    );
    for check in &outcome.status_checks {
        let actual = check.actual.map_or("(closed)".to_string(), |s| s.to_string());
        line.push_str(&format!("  status[{}] expected {} got {}", check.target, check.expected, actual));
    }
    if let Some(error) = &outcome.error {
        line.push_str(&format!("  error: {error}"));
    }
    println!("{line}");
}

fn cmd_corpus(path: &PathBuf, format: OutputFormat) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let entries = match parse_corpus(&text) {
        Ok(entries) => entries,
        Err(e) => {
            eprintln!("corpus error: {e}");
            return EXIT_USAGE;
        }
    };
    let outcomes: Vec<EntryOutcome> = entries.iter().map(evaluate_entry).collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let failed = outcomes.len() - passed;
    match format {
        OutputFormat::Text => {
            for outcome in &outcomes {
                render_outcome_text(outcome);
            }
            println!("{passed} passed, {failed} failed");
        }
        OutputFormat::Json => {
            emit_json(&json!({
                "entries": outcomes.iter().map(|o| json!({
                    "label": o.label,
                    "input": o.source,
                    "passed": o.passed,
                    "expected": o.expected.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "actual": o.actual.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "consistent": o.consistent,
                    "status_checks": o.status_checks.iter().map(|c| json!({
                        "target": c.target.to_string(),
                        "expected": c.expected.name(),
                        "actual": c.actual.map(|s| s.name()),
                        "passed": c.passed,
                    })).collect::<Vec<_>>(),
                    "error": o.error,
                })).collect::<Vec<_>>(),
                "passed": passed,
                "failed": failed,
            }));
        }
    }
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_CORPUS
    }
}

fn cmd_oracle(input: &str, max_atoms: Option<usize>, format: OutputFormat) -> u8 {
    let cap = max_atoms.unwrap_or(DEFAULT_ORACLE_ATOMS);
    let discourse = match parse_discourse(input) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("parse error: {e}");
            return EXIT_USAGE;
        }
    };
    let universe = discourse.atoms();
    let models = match oracle::enumerate_models(&discourse.formulas, &universe, cap) {
        Ok(models) => models,
        Err(e) => {
            eprintln!("resource limit: {e}");
            return EXIT_RESOURCE;
        }
    };
    match format {
        OutputFormat::Text => {
            for model in &models {
                let row = assignment_literals(model)
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ");
                println!("{row}");
            }
            println!("models: {}", models.len());
        }
        OutputFormat::Json => {
            emit_json(&json!({
                "universe": universe.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "models": models.iter().map(|m| {
                    m.iter().map(|(a, v)| (a.to_string(), v)).collect::<std::collections::BTreeMap<_, _>>()
                }).collect::<Vec<_>>(),
                "count": models.len(),
            }));
        }
    }
    if models.is_empty() {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    }
}
