//! Golden-test corpora: a small line format pairing inputs with the
//! presuppositions (and optionally statuses) they should produce.
//!
//! Entries are separated by a line containing `---`. Each entry has a
//! `label:`, exactly one of `formula:` or `discourse:`, an `expect-presup:`
//! line (comma-separated literals, or `(none)`), and any number of
//! `expect-status: <literal> = <status>` lines. `#` comments and blank
//! lines are ignored.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::parser::{parse_discourse, Discourse, ParseError};
use crate::presup::{presup_status, tableau_presuppositions, PresupStatus};
use crate::syntax::Literal;
use crate::tableau::{RuleSet, Tableau};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub label: String,
    pub input: Discourse,
    /// The raw formula/discourse text, kept for display.
    pub source: String,
    pub expected_presups: BTreeSet<Literal>,
    pub expected_status: Vec<(Literal, PresupStatus)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusErrorKind {
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("duplicate key '{0}'")]
    DuplicateKey(&'static str),
    #[error("missing key '{0}'")]
    MissingKey(&'static str),
    #[error("an entry may carry either 'formula:' or 'discourse:', not both")]
    BothFormulaAndDiscourse,
    #[error("bad literal {0:?}")]
    BadLiteral(String),
    #[error("bad status line {0:?}: expected '<literal> = <status>'")]
    BadStatusLine(String),
    #[error("{0}")]
    BadStatus(String),
    #[error(transparent)]
    Parse(Box<ParseError>),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("corpus line {line}{}: {kind}", .label.as_ref().map(|l| format!(" (entry '{l}')")).unwrap_or_default())]
pub struct CorpusError {
    pub line: usize,
    pub label: Option<String>,
    pub kind: CorpusErrorKind,
}

struct EntryBuilder {
    start_line: usize,
    label: Option<String>,
    source: Option<(String, usize)>,
    source_key: Option<&'static str>,
    expected_presups: Option<BTreeSet<Literal>>,
    expected_status: Vec<(Literal, PresupStatus)>,
    seen_any: bool,
}

impl EntryBuilder {
    fn new(start_line: usize) -> Self {
        EntryBuilder {
            start_line,
            label: None,
            source: None,
            source_key: None,
            expected_presups: None,
            expected_status: Vec::new(),
            seen_any: false,
        }
    }

    fn error(&self, line: usize, kind: CorpusErrorKind) -> CorpusError {
        CorpusError { line, label: self.label.clone(), kind }
    }

    fn finish(self) -> Result<Option<CorpusEntry>, CorpusError> {
        if !self.seen_any {
            return Ok(None);
        }
        let label = self
            .label
            .clone()
            .ok_or_else(|| self.error(self.start_line, CorpusErrorKind::MissingKey("label")))?;
        let (source, source_line) = self
            .source
            .clone()
            .ok_or_else(|| self.error(self.start_line, CorpusErrorKind::MissingKey("formula")))?;
        let expected_presups = self
            .expected_presups
            .clone()
            .ok_or_else(|| self.error(self.start_line, CorpusErrorKind::MissingKey("expect-presup")))?;
        let input = parse_discourse(&source)
            .map_err(|e| self.error(source_line, CorpusErrorKind::Parse(Box::new(e))))?;
        Ok(Some(CorpusEntry {
            label,
            input,
            source,
            expected_presups,
            expected_status: self.expected_status,
        }))
    }
}

fn parse_expected_presups(value: &str) -> Result<BTreeSet<Literal>, CorpusErrorKind> {
    let value = value.trim();
    if value == "(none)" {
        return Ok(BTreeSet::new());
    }
    value
        .split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<Literal>()
                .map_err(|_| CorpusErrorKind::BadLiteral(piece.trim().to_string()))
        })
        .collect()
}

fn parse_expected_status(value: &str) -> Result<(Literal, PresupStatus), CorpusErrorKind> {
    let (lit, status) = value
        .split_once('=')
        .ok_or_else(|| CorpusErrorKind::BadStatusLine(value.trim().to_string()))?;
    let literal = lit
        .trim()
        .parse::<Literal>()
        .map_err(|_| CorpusErrorKind::BadLiteral(lit.trim().to_string()))?;
    let status = status.trim().parse::<PresupStatus>().map_err(CorpusErrorKind::BadStatus)?;
    Ok((literal, status))
}

/// Parses a corpus file; entries come back in file order.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut entries = Vec::new();
    let mut builder = EntryBuilder::new(1);
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "---" {
            if let Some(entry) = builder.finish()? {
                entries.push(entry);
            }
            builder = EntryBuilder::new(line_no + 1);
            continue;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => {
                return Err(builder.error(line_no, CorpusErrorKind::UnknownKey(line.to_string())))
            }
        };
        builder.seen_any = true;
        match key {
            "label" => {
                if builder.label.is_some() {
                    return Err(builder.error(line_no, CorpusErrorKind::DuplicateKey("label")));
                }
                builder.label = Some(value.to_string());
            }
            "formula" | "discourse" => {
                if let Some(previous) = builder.source_key {
                    let kind = if previous == key {
                        CorpusErrorKind::DuplicateKey(previous)
                    } else {
                        CorpusErrorKind::BothFormulaAndDiscourse
                    };
                    return Err(builder.error(line_no, kind));
                }
                builder.source_key = Some(if key == "formula" { "formula" } else { "discourse" });
                builder.source = Some((value.to_string(), line_no));
            }
            "expect-presup" => {
                if builder.expected_presups.is_some() {
                    return Err(
                        builder.error(line_no, CorpusErrorKind::DuplicateKey("expect-presup"))
                    );
                }
                builder.expected_presups = Some(
                    parse_expected_presups(value).map_err(|kind| builder.error(line_no, kind))?,
                );
            }
            "expect-status" => {
                let pair =
                    parse_expected_status(value).map_err(|kind| builder.error(line_no, kind))?;
                builder.expected_status.push(pair);
            }
            other => {
                return Err(
                    builder.error(line_no, CorpusErrorKind::UnknownKey(other.to_string()))
                )
            }
        }
    }
    if let Some(entry) = builder.finish()? {
        entries.push(entry);
    }
    Ok(entries)
}

/// One status expectation checked against the engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatusCheck {
    pub target: Literal,
    pub expected: PresupStatus,
    pub actual: Option<PresupStatus>,
    pub passed: bool,
}

/// The engine's verdict on one corpus entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryOutcome {
    pub label: String,
    pub source: String,
    pub passed: bool,
    pub expected: BTreeSet<Literal>,
    pub actual: BTreeSet<Literal>,
    pub consistent: bool,
    pub status_checks: Vec<StatusCheck>,
    /// Set when the entry could not be evaluated at all.
    pub error: Option<String>,
}

/// Runs one entry through the full-coverage engine and compares.
pub fn evaluate_entry(entry: &CorpusEntry) -> EntryOutcome {
    let tableau = match Tableau::from_discourse(&entry.input, RuleSet::Pt) {
        Ok(t) => t,
        Err(e) => {
            return EntryOutcome {
                label: entry.label.clone(),
                source: entry.source.clone(),
                passed: false,
                expected: entry.expected_presups.clone(),
                actual: BTreeSet::new(),
                consistent: false,
                status_checks: Vec::new(),
                error: Some(e.to_string()),
            }
        }
    };
    let report = tableau_presuppositions(&tableau);
    let mut passed = report.presuppositions == entry.expected_presups && report.agreement;
    let mut status_checks = Vec::new();
    for (target, expected) in &entry.expected_status {
        let actual = presup_status(&tableau, target).ok().map(|r| r.status);
        let ok = actual == Some(*expected);
        passed &= ok;
        status_checks.push(StatusCheck {
            target: target.clone(),
            expected: *expected,
            actual,
            passed: ok,
        });
    }
    EntryOutcome {
        label: entry.label.clone(),
        source: entry.source.clone(),
        passed,
        expected: entry.expected_presups.clone(),
        actual: report.presuppositions,
        consistent: report.consistent,
        status_checks,
        error: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::AtomId;

    fn pos(name: &str) -> Literal {
        Literal::positive(AtomId::new(name).unwrap())
    }

    #[test]
    fn parses_a_two_entry_corpus() {
        let text = "\
# a comment
label: first
formula: a[b] -> c
expect-presup: b
---
label: second
discourse: a -> b ; a -> d[b]
expect-presup: (none)
";
        let entries = parse_corpus(text).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].label, "first");
        assert_eq!(entries[0].expected_presups, [pos("b")].into());
        assert_eq!(entries[1].input.formulas.len(), 2);
        assert!(entries[1].expected_presups.is_empty());
    }

    #[test]
    fn parses_status_expectations() {
        let text = "\
label: filtered
formula: b -> a[b]
expect-presup: (none)
expect-status: b = hybrid
";
        let entries = parse_corpus(text).unwrap();
        assert_eq!(entries[0].expected_status, vec![(pos("b"), PresupStatus::Hybrid)]);
    }

    #[test]
    fn empty_corpus_is_fine() {
        assert!(parse_corpus("").unwrap().is_empty());
        assert!(parse_corpus("# only comments\n\n---\n").unwrap().is_empty());
    }

    #[test]
    fn missing_input_is_reported_with_label() {
        let err = parse_corpus("label: broken\nexpect-presup: b\n").unwrap_err();
        assert_eq!(err.kind, CorpusErrorKind::MissingKey("formula"));
        assert_eq!(err.label.as_deref(), Some("broken"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_corpus("label: x\nformula: a\nexpect-presup: (none)\nfrobnicate: yes\n")
            .unwrap_err();
        assert_eq!(err.kind, CorpusErrorKind::UnknownKey("frobnicate".into()));
        assert_eq!(err.line, 4);
    }

    #[test]
    fn formula_and_discourse_conflict() {
        let err = parse_corpus("label: x\nformula: a\ndiscourse: b\nexpect-presup: (none)\n")
            .unwrap_err();
        assert_eq!(err.kind, CorpusErrorKind::BothFormulaAndDiscourse);
    }

    #[test]
    fn parse_errors_surface_with_the_entry_line() {
        let err = parse_corpus("label: x\nformula: a |\nexpect-presup: (none)\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(err.kind, CorpusErrorKind::Parse(_)));
    }

    #[test]
    fn evaluation_checks_presups_and_status() {
        let text = "\
label: filtered
formula: b -> a[b]
expect-presup: (none)
expect-status: b = hybrid
";
        let outcome = evaluate_entry(&parse_corpus(text).unwrap()[0]);
        assert!(outcome.passed, "{outcome:?}");
        assert!(outcome.status_checks[0].passed);
    }

    #[test]
    fn wrong_expectation_fails_the_entry() {
        let text = "label: wrong\nformula: a[b] -> c\nexpect-presup: (none)\n";
        let outcome = evaluate_entry(&parse_corpus(text).unwrap()[0]);
        assert!(!outcome.passed);
        assert_eq!(outcome.actual, [pos("b")].into());
    }
}
