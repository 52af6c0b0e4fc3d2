//! Concrete syntax for formulas and discourses, and the matching
//! pretty-printer.
//!
//! Grammar (ASCII connectives, loosest to tightest: `->`, `|`, `&`, `~`):
//!
//! ```text
//! formula := impl
//! impl    := disj ( "->" impl )?          // right-associative
//! disj    := conj ( "|" conj )*
//! conj    := neg ( "&" neg )*
//! neg     := "~" neg | prim
//! prim    := atom | "(" formula ")"
//! atom    := IDENT ( "[" "~"? IDENT "]" )?
//! ```
//!
//! `a[b]` reads "a presupposes b", `a[~b]` "a presupposes not-b". The
//! unicode spellings `¬ ∧ ∨ →` are accepted on input and never emitted.
//! Discourses are formulas separated by `;` or newlines; `#` starts a
//! comment running to the end of the line.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{AnnotationConflict, AtomId, Formula, Literal, PresupMap};

/// An ordered sequence of asserted formulas with the annotations collected
/// from all of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discourse {
    pub formulas: Vec<Formula>,
    pub presup_map: PresupMap,
}

impl Discourse {
    pub fn atoms(&self) -> BTreeSet<AtomId> {
        self.formulas.iter().flat_map(|f| f.atoms()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error(transparent)]
    AnnotationConflict(AnnotationConflict),
    #[error("annotation chain at '{atom}': a presupposition target may not itself be annotated")]
    AnnotationChain { atom: AtomId },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Sep,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Not => f.write_str("'~'"),
            Tok::And => f.write_str("'&'"),
            Tok::Or => f.write_str("'|'"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBracket => f.write_str("'['"),
            Tok::RBracket => f.write_str("']'"),
            Tok::Sep => f.write_str("';'"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1usize;
    let mut col = 1usize;

    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' => {
                bump(&mut chars);
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
            }
            '\n' | ';' => {
                bump(&mut chars);
                tokens.push(Token { tok: Tok::Sep, line: tline, col: tcol });
            }
            '~' | '¬' => {
                bump(&mut chars);
                tokens.push(Token { tok: Tok::Not, line: tline, col: tcol });
            }
            '&' | '∧' => {
                bump(&mut chars);
                tokens.push(Token { tok: Tok::And, line: tline, col: tcol });
            }
            '|' | '∨' => {
                bump(&mut chars);
                tokens.push(Token { tok: Tok::Or, line: tline, col: tcol });
            }
            '→' => {
                bump(&mut chars);
                tokens.push(Token { tok: Tok::Arrow, line: tline, col: tcol });
            }
            '-' => {
                bump(&mut chars);
                match chars.peek() {
                    Some('>') => {
                        bump(&mut chars);
                        tokens.push(Token { tok: Tok::Arrow, line: tline, col: tcol });
                    }
                    _ => {
                        return Err(ParseError {
                            line: tline,
                            col: tcol,
                            kind: ParseErrorKind::UnexpectedChar('-'),
                        })
                    }
                }
            }
            '(' => {
                bump(&mut chars);
                tokens.push(Token { tok: Tok::LParen, line: tline, col: tcol });
            }
            ')' => {
                bump(&mut chars);
                tokens.push(Token { tok: Tok::RParen, line: tline, col: tcol });
            }
            '[' => {
                bump(&mut chars);
                tokens.push(Token { tok: Tok::LBracket, line: tline, col: tcol });
            }
            ']' => {
                bump(&mut chars);
                tokens.push(Token { tok: Tok::RBracket, line: tline, col: tcol });
            }
            c if c.is_ascii_alphabetic() => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                tokens.push(Token { tok: Tok::Ident(ident), line: tline, col: tcol });
            }
            c => {
                return Err(ParseError {
                    line: tline,
                    col: tcol,
                    kind: ParseErrorKind::UnexpectedChar(c),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    map: &'a mut PresupMap,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error_at_current(&self, expected: &'static str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError {
                line: t.line,
                col: t.col,
                kind: ParseErrorKind::Unexpected { expected, found: t.tok.to_string() },
            },
            None => ParseError {
                line: self.end.0,
                col: self.end.1,
                kind: ParseErrorKind::UnexpectedEnd,
            },
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t.tok == tok => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error_at_current(expected)),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if matches!(self.peek(), Some(t) if t.tok == Tok::Arrow) {
            self.pos += 1;
            let right = self.implication()?;
            Ok(left.implies(right))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conjunction()?;
        while matches!(self.peek(), Some(t) if t.tok == Tok::Or) {
            self.pos += 1;
            let right = self.conjunction()?;
            left = left.or(right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.negation()?;
        while matches!(self.peek(), Some(t) if t.tok == Tok::And) {
            self.pos += 1;
            let right = self.negation()?;
            left = left.and(right);
        }
        Ok(left)
    }

    fn negation(&mut self) -> Result<Formula, ParseError> {
        if matches!(self.peek(), Some(t) if t.tok == Tok::Not) {
            self.pos += 1;
            let inner = self.negation()?;
            Ok(inner.negate())
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(t) if t.tok == Tok::LParen => {
                self.pos += 1;
                let inner = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(t) if matches!(t.tok, Tok::Ident(_)) => self.atom(),
            _ => Err(self.error_at_current("an atom, '~' or '('")),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let (name, line, col) = match self.advance() {
            Some(Token { tok: Tok::Ident(name), line, col }) => (name.clone(), *line, *col),
            _ => unreachable!("atom() called without lookahead"),
        };
        let atom = AtomId::new(name).expect("lexer produces valid identifiers");
        if matches!(self.peek(), Some(t) if t.tok == Tok::LBracket) {
            self.pos += 1;
            let negated = if matches!(self.peek(), Some(t) if t.tok == Tok::Not) {
                self.pos += 1;
                true
            } else {
                false
            };
            let target = match self.peek() {
                Some(Token { tok: Tok::Ident(name), .. }) => {
                    let name = name.clone();
                    self.pos += 1;
                    AtomId::new(name).expect("lexer produces valid identifiers")
                }
                _ => return Err(self.error_at_current("an atom name inside '[...]'")),
            };
            self.expect(Tok::RBracket, "']'")?;
            let presup = if negated {
                Literal::negative(target)
            } else {
                Literal::positive(target)
            };
            self.record_annotation(atom.clone(), presup, line, col)?;
        }
        Ok(Formula::Atom(atom))
    }

    fn record_annotation(
        &mut self,
        atom: AtomId,
        presup: Literal,
        line: usize,
        col: usize,
    ) -> Result<(), ParseError> {
        // Chain checks first: a target with its own annotation would leave
        // the projection rules without a meaning for the cascade.
        if presup.atom == atom {
            return Err(ParseError {
                line,
                col,
                kind: ParseErrorKind::AnnotationChain { atom },
            });
        }
        if self.map.is_annotated(&presup.atom) {
            return Err(ParseError {
                line,
                col,
                kind: ParseErrorKind::AnnotationChain { atom: presup.atom },
            });
        }
        if self.map.iter().any(|(_, target)| target.atom == atom) {
            return Err(ParseError {
                line,
                col,
                kind: ParseErrorKind::AnnotationChain { atom },
            });
        }
        self.map
            .annotate(atom, presup)
            .map_err(|conflict| ParseError {
                line,
                col,
                kind: ParseErrorKind::AnnotationConflict(conflict),
            })
    }
}

fn end_position(text: &str) -> (usize, usize) {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map_or(1, |l| l.chars().count() + 1);
    (line, col)
}

/// Parses a single formula, collecting its annotations.
pub fn parse_formula(text: &str) -> Result<(Formula, PresupMap), ParseError> {
    let tokens = lex(text)?;
    let mut map = PresupMap::new();
    let mut parser = Parser { tokens: &tokens, pos: 0, map: &mut map, end: end_position(text) };
    let formula = parser.formula()?;
    if parser.peek().is_some() {
        return Err(parser.error_at_current("end of input"));
    }
    Ok((formula, map))
}

/// Parses a `;`- or newline-separated sequence of formulas sharing one
/// annotation map. Blank segments are skipped, so trailing separators and
/// empty lines are harmless; empty input is the empty discourse.
pub fn parse_discourse(text: &str) -> Result<Discourse, ParseError> {
    let tokens = lex(text)?;
    let end = end_position(text);
    let mut map = PresupMap::new();
    let mut formulas = Vec::new();
    for segment in tokens.split(|t| t.tok == Tok::Sep) {
        if segment.is_empty() {
            continue;
        }
        let mut parser = Parser { tokens: segment, pos: 0, map: &mut map, end };
        let formula = parser.formula()?;
        if parser.peek().is_some() {
            return Err(parser.error_at_current("end of formula"));
        }
        formulas.push(formula);
    }
    Ok(Discourse { formulas, presup_map: map })
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(..) => 4,
        Formula::Atom(..) => 5,
    }
}

fn render_into(f: &Formula, map: &PresupMap, out: &mut String) {
    match f {
        Formula::Atom(atom) => {
            out.push_str(atom.as_str());
            if let Some(presup) = map.presupposition_of(atom) {
                out.push('[');
                out.push_str(&presup.to_string());
                out.push(']');
            }
        }
        Formula::Not(inner) => {
            out.push('~');
            render_child_min(inner, map, precedence(f), out);
        }
        Formula::And(l, r) => {
            // left-associative: a same-precedence right child needs parens
            render_child_min(l, map, 3, out);
            out.push_str(" & ");
            render_child(r, map, 3, out);
        }
        Formula::Or(l, r) => {
            render_child_min(l, map, 2, out);
            out.push_str(" | ");
            render_child(r, map, 2, out);
        }
        Formula::Implies(l, r) => {
            // right-associative: a same-precedence left child needs parens
            render_child(l, map, 1, out);
            out.push_str(" -> ");
            render_child_min(r, map, 1, out);
        }
    }
}

/// Parenthesizes when the child binds strictly looser *or equally loose*.
fn render_child(f: &Formula, map: &PresupMap, parent: u8, out: &mut String) {
    if precedence(f) <= parent {
        out.push('(');
        render_into(f, map, out);
        out.push(')');
    } else {
        render_into(f, map, out);
    }
}

/// Parenthesizes only when the child binds strictly looser.
fn render_child_min(f: &Formula, map: &PresupMap, parent: u8, out: &mut String) {
    if precedence(f) < parent {
        out.push('(');
        render_into(f, map, out);
        out.push(')');
    } else {
        render_into(f, map, out);
    }
}

/// Pretty-prints with minimal parentheses; every occurrence of an annotated
/// atom carries its annotation, so the text round-trips to the same formula
/// and map.
pub fn render(f: &Formula, map: &PresupMap) -> String {
    let mut out = String::new();
    render_into(f, map, &mut out);
    out
}

/// Renders a discourse as `;`-separated formulas.
pub fn render_discourse(d: &Discourse) -> String {
    d.formulas
        .iter()
        .map(|f| render(f, &d.presup_map))
        .collect::<Vec<_>>()
        .join(" ; ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(name: &str) -> AtomId {
        AtomId::new(name).unwrap()
    }

    fn var(name: &str) -> Formula {
        Formula::Atom(atom(name))
    }

    fn pos(name: &str) -> Literal {
        Literal::positive(atom(name))
    }

    fn neg(name: &str) -> Literal {
        Literal::negative(atom(name))
    }

    #[test]
    fn parses_annotated_conditional() {
        let (f, map) = parse_formula("a[b] -> c").unwrap();
        assert_eq!(f, var("a").implies(var("c")));
        assert_eq!(map, [(atom("a"), pos("b"))].into_iter().collect());
    }

    #[test]
    fn parses_negated_annotation_target() {
        let (f, map) = parse_formula("d[~b] | a[b]").unwrap();
        assert_eq!(f, var("d").or(var("a")));
        assert_eq!(
            map,
            [(atom("d"), neg("b")), (atom("a"), pos("b"))].into_iter().collect()
        );
    }

    #[test]
    fn conflicting_annotations_rejected() {
        let err = parse_formula("a[b] & a[c]").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::AnnotationConflict(_)));
        assert_eq!((err.line, err.col), (1, 8));
        // the same annotation twice is not a conflict
        assert!(parse_formula("a[b] & a[b]").is_ok());
        // nor is one bare occurrence next to an annotated one
        assert!(parse_formula("a[b] & a").is_ok());
    }

    #[test]
    fn chained_annotations_rejected() {
        assert!(matches!(
            parse_formula("a[b] & b[c]").unwrap_err().kind,
            ParseErrorKind::AnnotationChain { .. }
        ));
        assert!(matches!(
            parse_formula("b[c] & a[b]").unwrap_err().kind,
            ParseErrorKind::AnnotationChain { .. }
        ));
        assert!(matches!(
            parse_formula("a[a]").unwrap_err().kind,
            ParseErrorKind::AnnotationChain { .. }
        ));
    }

    #[test]
    fn implication_is_right_associative() {
        let (f, _) = parse_formula("a -> b -> c").unwrap();
        assert_eq!(f, var("a").implies(var("b").implies(var("c"))));
    }

    #[test]
    fn negation_binds_tighter_than_and() {
        let (f, _) = parse_formula("~a & b").unwrap();
        assert_eq!(f, var("a").negate().and(var("b")));
    }

    #[test]
    fn and_binds_tighter_than_or() {
        let (f, _) = parse_formula("a | b & c").unwrap();
        assert_eq!(f, var("a").or(var("b").and(var("c"))));
        let (g, _) = parse_formula("(a | b) & c").unwrap();
        assert_eq!(g, var("a").or(var("b")).and(var("c")));
    }

    #[test]
    fn unicode_aliases_accepted() {
        let (f, _) = parse_formula("¬a ∧ b → c ∨ d").unwrap();
        let (g, _) = parse_formula("~a & b -> c | d").unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_formula("a |").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!((err.line, err.col), (1, 4));

        let err = parse_formula("(a").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);

        let err = parse_formula("a b").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Unexpected { .. }));
        assert_eq!((err.line, err.col), (1, 3));

        let err = parse_formula("a ? b").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('?'));
    }

    #[test]
    fn discourse_splits_on_semicolons_and_newlines() {
        let d = parse_discourse("a -> b ; a -> d[b]").unwrap();
        assert_eq!(d.formulas.len(), 2);
        assert_eq!(d.presup_map, [(atom("d"), pos("b"))].into_iter().collect());

        let d = parse_discourse("a -> b\n# context\na -> d[b]\n").unwrap();
        assert_eq!(d.formulas.len(), 2);
    }

    #[test]
    fn empty_discourse_is_fine() {
        let d = parse_discourse("").unwrap();
        assert!(d.is_empty());
        assert!(d.presup_map.is_empty());
        assert!(parse_discourse("  \n # nothing \n").unwrap().is_empty());
    }

    #[test]
    fn cross_formula_annotation_conflicts_rejected() {
        let err = parse_discourse("a[x] ; a[y]").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::AnnotationConflict(_)));
        let err = parse_discourse("a[b]\nb[c]").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::AnnotationChain { .. }));
    }

    #[test]
    fn formulas_do_not_span_separators() {
        assert!(parse_formula("a ; b").is_err());
        assert!(parse_discourse("a |\nb").is_err());
    }

    #[test]
    fn render_reproduces_annotations() {
        let map: PresupMap = [(atom("a"), pos("b"))].into_iter().collect();
        assert_eq!(render(&var("a").implies(var("c")), &map), "a[b] -> c");

        let map: PresupMap =
            [(atom("d"), neg("b")), (atom("a"), pos("b"))].into_iter().collect();
        assert_eq!(render(&var("d").or(var("a")), &map), "d[~b] | a[b]");
    }

    #[test]
    fn render_uses_minimal_parentheses() {
        let empty = PresupMap::new();
        assert_eq!(render(&var("a").or(var("b")).negate(), &empty), "~(a | b)");
        assert_eq!(render(&var("a").negate().negate(), &empty), "~~a");
        assert_eq!(
            render(&var("a").implies(var("b").implies(var("c"))), &empty),
            "a -> b -> c"
        );
        assert_eq!(
            render(&var("a").implies(var("b")).implies(var("c")), &empty),
            "(a -> b) -> c"
        );
        assert_eq!(render(&var("a").or(var("b")).or(var("c")), &empty), "a | b | c");
        assert_eq!(render(&var("a").or(var("b").or(var("c"))), &empty), "a | (b | c)");
        assert_eq!(render(&var("a").or(var("b").and(var("c"))), &empty), "a | b & c");
        assert_eq!(render(&var("a").or(var("b")).and(var("c")), &empty), "(a | b) & c");
    }

    #[test]
    fn render_round_trips() {
        for text in [
            "a[b] -> c",
            "d[~b] | a[b]",
            "~(a & (b | ~c)) -> d -> e",
            "(a -> b) & ~c | d",
        ] {
            let (f, m) = parse_formula(text).unwrap();
            let printed = render(&f, &m);
            let (f2, m2) = parse_formula(&printed).unwrap();
            assert_eq!((f, m), (f2, m2), "round-trip through {printed:?}");
        }
    }
}
