//! Concrete text syntax for formulas.
//!
//! ```text
//! formula  := iff
//! iff      := imp ( "<->" iff )?
//! imp      := or ( "->" imp )?
//! or       := and ( "|" and )*
//! and      := unary ( "&" unary )*
//! unary    := "~" unary | "B" unary | ("A" | "E") ident "." formula | primary
//! primary  := "(" formula ")"
//!           | reason ( ":" unary | "=" reason | "!=" reason )?
//!           | letter
//! reason   := ratom ( "*" ratom )*
//! ratom    := ident | "sigma" | "(" reason ")"
//! ```
//!
//! Whether an identifier names a letter or a reason is decided by the
//! [`Signature`]; a quantifier makes its variable a reason inside its scope.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{Formula, ReasonTerm, Symbol};

/// Identifiers that cannot be used as letter or reason names.
pub const RESERVED: [&str; 4] = ["A", "B", "E", "sigma"];

/// Half-open character range `[start, end)` into the parsed input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {}: expected {expected}, found {found}", span.start)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

/// Symbol classification used while parsing.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    pub reasons: BTreeSet<Symbol>,
    /// `None` accepts any non-reason identifier as a letter.
    pub letters: Option<BTreeSet<Symbol>>,
}

impl Signature {
    pub fn new<R, L>(reasons: R, letters: L) -> Self
    where
        R: IntoIterator,
        R::Item: AsRef<str>,
        L: IntoIterator,
        L::Item: AsRef<str>,
    {
        Signature {
            reasons: reasons.into_iter().map(|s| Symbol::new(s.as_ref())).collect(),
            letters: Some(letters.into_iter().map(|s| Symbol::new(s.as_ref())).collect()),
        }
    }

    /// Declared reasons; every other identifier is a letter.
    pub fn open<R>(reasons: R) -> Self
    where
        R: IntoIterator,
        R::Item: AsRef<str>,
    {
        Signature {
            reasons: reasons.into_iter().map(|s| Symbol::new(s.as_ref())).collect(),
            letters: None,
        }
    }
}

pub fn parse(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        sig,
        bound: Vec::new(),
        input_len: text.chars().count(),
    };
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

/// Parses a standalone reason term such as `s * r` or `sigma`.
pub fn parse_reason(text: &str) -> Result<ReasonTerm, ParseError> {
    let tokens = lex(text)?;
    let sig = Signature::default();
    let mut p = Parser {
        tokens,
        pos: 0,
        sig: &sig,
        bound: Vec::new(),
        input_len: text.chars().count(),
    };
    let t = p.reason_term()?;
    p.expect_end()?;
    Ok(t)
}

// ----------------------------------------------------------------------
// Lexer
// ----------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Imp,
    Iff,
    Colon,
    Eq,
    Neq,
    Star,
    Dot,
    LParen,
    RParen,
    All,
    Ex,
    Bel,
    Sigma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::Not => "`~`",
            Tok::And => "`&`",
            Tok::Or => "`|`",
            Tok::Imp => "`->`",
            Tok::Iff => "`<->`",
            Tok::Colon => "`:`",
            Tok::Eq => "`=`",
            Tok::Neq => "`!=`",
            Tok::Star => "`*`",
            Tok::Dot => "`.`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::All => "`A`",
            Tok::Ex => "`E`",
            Tok::Bel => "`B`",
            Tok::Sigma => "`sigma`",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = |tok| Some((tok, 1));
        let next = chars.get(i + 1).copied();
        let matched: Option<(Tok, usize)> = match c {
            '~' | '¬' => single(Tok::Not),
            '&' | '∧' => single(Tok::And),
            '|' | '∨' => single(Tok::Or),
            '→' => single(Tok::Imp),
            '↔' => single(Tok::Iff),
            ':' => single(Tok::Colon),
            '=' => single(Tok::Eq),
            '≠' => single(Tok::Neq),
            '*' | '·' => single(Tok::Star),
            '.' => single(Tok::Dot),
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '∀' => single(Tok::All),
            '∃' => single(Tok::Ex),
            'σ' => single(Tok::Sigma),
            '-' if next == Some('>') => Some((Tok::Imp, 2)),
            '!' if next == Some('=') => Some((Tok::Neq, 2)),
            '<' if next == Some('-') && chars.get(i + 2) == Some(&'>') => Some((Tok::Iff, 3)),
            _ => None,
        };
        if let Some((tok, len)) = matched {
            out.push(Token {
                tok,
                span: SourceSpan {
                    start,
                    end: start + len,
                },
            });
            i += len;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match word.as_str() {
                "A" => Tok::All,
                "E" => Tok::Ex,
                "B" => Tok::Bel,
                "sigma" => Tok::Sigma,
                _ => Tok::Ident(word),
            };
            out.push(Token {
                tok,
                span: SourceSpan { start, end: i },
            });
            continue;
        }
        return Err(ParseError {
            span: SourceSpan {
                start,
                end: start + 1,
            },
            expected: "a token".into(),
            found: format!("`{c}`"),
        });
    }
    Ok(out)
}

// ----------------------------------------------------------------------
// Recursive descent
// ----------------------------------------------------------------------

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    sig: &'a Signature,
    bound: Vec<Symbol>,
    input_len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + offset).map(|t| &t.tok)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> ParseError {
        match self.tokens.get(self.pos) {
            Some(t) => ParseError {
                span: t.span,
                expected: expected.into(),
                found: t.tok.to_string(),
            },
            None => ParseError {
                span: SourceSpan {
                    start: self.input_len,
                    end: self.input_len,
                },
                expected: expected.into(),
                found: "end of input".into(),
            },
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&tok.to_string()))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let left = self.implication()?;
        if self.eat(&Tok::Iff) {
            let right = self.formula()?;
            Ok(Formula::iff(left, right))
        } else {
            Ok(left)
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if self.eat(&Tok::Imp) {
            let right = self.implication()?;
            Ok(Formula::implies(left, right))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let right = self.conjunction()?;
            acc = Formula::or(acc, right);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::And) {
            let right = self.unary()?;
            acc = Formula::and(acc, right);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Bel) => {
                self.pos += 1;
                Ok(Formula::believes(self.unary()?))
            }
            Some(Tok::All) | Some(Tok::Ex) => {
                let universal = self.peek() == Some(&Tok::All);
                self.pos += 1;
                let var = match self.peek() {
                    Some(Tok::Ident(name)) => Symbol::new(name),
                    _ => return Err(self.error("a quantifier variable")),
                };
                self.pos += 1;
                self.expect(Tok::Dot)?;
                self.bound.push(var.clone());
                let body = self.formula();
                self.bound.pop();
                let body = body?;
                Ok(if universal {
                    Formula::forall(var, body)
                } else {
                    Formula::exists(var, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn is_reason_name(&self, name: &str) -> bool {
        let sym = Symbol::new(name);
        if self.bound.contains(&sym) {
            return true;
        }
        if !self.sig.reasons.contains(&sym) {
            return false;
        }
        // a name declared as both letter and reason reads as a letter when bare
        match &self.sig.letters {
            Some(letters) if letters.contains(&sym) => !matches!(
                self.peek_at(1),
                None | Some(Tok::And)
                    | Some(Tok::Or)
                    | Some(Tok::Imp)
                    | Some(Tok::Iff)
                    | Some(Tok::RParen)
            ),
            _ => true,
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                // a parenthesised reason term may open a support or equality
                let save = self.pos;
                if let Ok(term) = self.reason_term() {
                    if matches!(self.peek(), Some(Tok::Colon) | Some(Tok::Eq) | Some(Tok::Neq)) {
                        return self.after_reason(term);
                    }
                }
                self.pos = save;
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Sigma) => {
                let term = self.reason_term()?;
                self.after_reason(term)
            }
            Some(Tok::Ident(name)) => {
                if self.is_reason_name(&name) {
                    let term = self.reason_term()?;
                    self.after_reason(term)
                } else {
                    let known = match &self.sig.letters {
                        None => true,
                        Some(letters) => letters.contains(&Symbol::new(&name)),
                    };
                    if !known {
                        return Err(self.error("a declared letter or reason"));
                    }
                    self.pos += 1;
                    if self.peek() == Some(&Tok::Colon) {
                        return Err(self.error("a connective (a letter cannot support a formula)"));
                    }
                    Ok(Formula::Letter(Symbol::new(&name)))
                }
            }
            _ => Err(self.error("a formula")),
        }
    }

    fn after_reason(&mut self, term: ReasonTerm) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Colon) => {
                self.pos += 1;
                let body = self.unary()?;
                Ok(Formula::supports(term, body))
            }
            Some(Tok::Eq) => {
                self.pos += 1;
                let other = self.reason_term()?;
                Ok(Formula::eq(term, other))
            }
            Some(Tok::Neq) => {
                self.pos += 1;
                let other = self.reason_term()?;
                Ok(Formula::neq(term, other))
            }
            _ => Ok(Formula::adequate(term)),
        }
    }

    fn reason_term(&mut self) -> Result<ReasonTerm, ParseError> {
        let mut acc = self.reason_atom()?;
        while self.eat(&Tok::Star) {
            let right = self.reason_atom()?;
            acc = ReasonTerm::app(acc, right);
        }
        Ok(acc)
    }

    fn reason_atom(&mut self) -> Result<ReasonTerm, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Sigma) => {
                self.pos += 1;
                Ok(ReasonTerm::Sigma)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(ReasonTerm::Basic(Symbol::new(&name)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.reason_term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => Err(self.error("a reason")),
        }
    }
}

// ----------------------------------------------------------------------
// Printer
// ----------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Notation {
    #[default]
    Ascii,
    Unicode,
}

struct Glyphs {
    not: &'static str,
    and: &'static str,
    or: &'static str,
    imp: &'static str,
    iff: &'static str,
    neq: &'static str,
    star: &'static str,
    all: &'static str,
    ex: &'static str,
    sigma: &'static str,
}

const ASCII: Glyphs = Glyphs {
    not: "~",
    and: " & ",
    or: " | ",
    imp: " -> ",
    iff: " <-> ",
    neq: " != ",
    star: " * ",
    all: "A ",
    ex: "E ",
    sigma: "sigma",
};

const UNICODE: Glyphs = Glyphs {
    not: "¬",
    and: " ∧ ",
    or: " ∨ ",
    imp: " → ",
    iff: " ↔ ",
    neq: " ≠ ",
    star: "·",
    all: "∀",
    ex: "∃",
    sigma: "σ",
};

// binding strength, loosest first
const QUANT: u8 = 0;
const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const PREFIX: u8 = 5;
const ATOM: u8 = 6;

/// Canonical ASCII text with minimal parentheses.
pub fn print(f: &Formula) -> String {
    print_with(f, Notation::Ascii)
}

pub fn print_with(f: &Formula, notation: Notation) -> String {
    let glyphs = match notation {
        Notation::Ascii => &ASCII,
        Notation::Unicode => &UNICODE,
    };
    let mut out = String::new();
    write_formula(&mut out, f, 0, true, glyphs);
    out
}

pub fn print_reason(t: &ReasonTerm, notation: Notation) -> String {
    let glyphs = match notation {
        Notation::Ascii => &ASCII,
        Notation::Unicode => &UNICODE,
    };
    let mut out = String::new();
    write_reason(&mut out, t, glyphs);
    out
}

fn write_reason(out: &mut String, t: &ReasonTerm, g: &Glyphs) {
    match t {
        ReasonTerm::Basic(s) => out.push_str(s.as_str()),
        ReasonTerm::Sigma => out.push_str(g.sigma),
        ReasonTerm::App(l, r) => {
            write_reason(out, l, g);
            out.push_str(g.star);
            if r.has_app() {
                out.push('(');
                write_reason(out, r, g);
                out.push(')');
            } else {
                write_reason(out, r, g);
            }
        }
    }
}

/// `min` is the loosest operator allowed without parentheses; `open_right`
/// says nothing follows this subterm, so a quantifier may extend to the end.
fn write_formula(out: &mut String, f: &Formula, min: u8, open_right: bool, g: &Glyphs) {
    let level = level_of(f);
    // a quantifier reaches to the end, so it only needs parentheses when
    // something follows it
    let needs_parens = if level == QUANT { !open_right } else { level < min };
    if needs_parens {
        out.push('(');
        write_bare(out, f, true, g);
        out.push(')');
    } else {
        write_bare(out, f, open_right, g);
    }
}

fn level_of(f: &Formula) -> u8 {
    if f.as_iff().is_some() {
        IFF
    } else if f.as_and().is_some() {
        AND
    } else if f.as_exists().is_some() {
        QUANT
    } else if f.as_neq().is_some() {
        ATOM
    } else if f.as_implies().is_some() {
        IMP
    } else {
        match f {
            Formula::Or(..) => OR,
            Formula::Not(_) | Formula::Believes(_) => PREFIX,
            Formula::ForAll(..) => QUANT,
            Formula::Supports(..) | Formula::Letter(_) | Formula::Adequate(_) | Formula::Eq(..) => ATOM,
        }
    }
}

fn write_bare(out: &mut String, f: &Formula, open_right: bool, g: &Glyphs) {
    if let Some((a, b)) = f.as_iff() {
        write_formula(out, a, IFF + 1, false, g);
        out.push_str(g.iff);
        write_formula(out, b, IFF, open_right, g);
        return;
    }
    if let Some((a, b)) = f.as_and() {
        write_formula(out, a, AND, false, g);
        out.push_str(g.and);
        write_formula(out, b, AND + 1, open_right, g);
        return;
    }
    if let Some((v, body)) = f.as_exists() {
        out.push_str(g.ex);
        out.push_str(v.as_str());
        out.push_str(". ");
        write_formula(out, body, QUANT, true, g);
        return;
    }
    if let Some((a, b)) = f.as_neq() {
        write_reason(out, a, g);
        out.push_str(g.neq);
        write_reason(out, b, g);
        return;
    }
    if let Some((a, b)) = f.as_implies() {
        write_formula(out, a, IMP + 1, false, g);
        out.push_str(g.imp);
        write_formula(out, b, IMP, open_right, g);
        return;
    }
    match f {
        Formula::Letter(p) => out.push_str(p.as_str()),
        Formula::Adequate(r) => write_reason(out, r, g),
        Formula::Eq(a, b) => {
            write_reason(out, a, g);
            out.push_str(" = ");
            write_reason(out, b, g);
        }
        Formula::Not(a) => {
            out.push_str(g.not);
            write_formula(out, a, PREFIX, open_right, g);
        }
        Formula::Believes(a) => {
            out.push_str("B ");
            write_formula(out, a, PREFIX, open_right, g);
        }
        Formula::Supports(r, a) => {
            write_reason(out, r, g);
            out.push(':');
            write_formula(out, a, PREFIX, open_right, g);
        }
        Formula::Or(a, b) => {
            write_formula(out, a, OR, false, g);
            out.push_str(g.or);
            write_formula(out, b, OR + 1, open_right, g);
        }
        Formula::ForAll(v, body) => {
            out.push_str(g.all);
            out.push_str(v.as_str());
            out.push_str(". ");
            write_formula(out, body, QUANT, true, g);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(["r", "s", "t"], ["p", "q"])
    }

    fn p(text: &str) -> Formula {
        parse(text, &sig()).unwrap()
    }

    fn r(name: &str) -> ReasonTerm {
        ReasonTerm::basic(name)
    }

    #[test]
    fn colon_binds_tighter_than_implication() {
        let f = p("r:p -> q");
        assert_eq!(
            f,
            Formula::implies(Formula::supports(r("r"), Formula::letter("p")), Formula::letter("q"))
        );
        assert_ne!(
            f,
            Formula::supports(r("r"), Formula::implies(Formula::letter("p"), Formula::letter("q")))
        );
    }

    #[test]
    fn quantified_inequality() {
        let f = p("A t. (t != r)");
        assert_eq!(f, Formula::forall(Symbol::new("t"), Formula::not(Formula::eq(r("t"), r("r")))));
    }

    #[test]
    fn unbalanced_parenthesis_reports_end_offset() {
        let err = parse("(p |", &sig()).unwrap_err();
        assert_eq!(err.span, SourceSpan { start: 4, end: 4 });
        assert!(err.to_string().contains("offset 4"));
    }

    #[test]
    fn printer_examples() {
        let f = Formula::implies(Formula::supports(r("r"), Formula::letter("p")), Formula::letter("q"));
        assert_eq!(print(&f), "r:p -> q");
        let g = Formula::supports(r("r"), Formula::or(Formula::letter("p"), Formula::letter("q")));
        assert_eq!(print(&g), "r:(p | q)");
        let h = Formula::adequate(ReasonTerm::app(r("s"), r("r")));
        assert_eq!(print(&h), "s * r");
        assert_eq!(parse(&print(&h), &sig()).unwrap(), h);
    }

    #[test]
    fn belief_binds_like_negation() {
        assert_eq!(
            p("B p & q"),
            Formula::and(Formula::believes(Formula::letter("p")), Formula::letter("q"))
        );
        assert_eq!(p("B r"), Formula::believes(Formula::adequate(r("r"))));
    }

    #[test]
    fn right_associative_implication() {
        assert_eq!(
            p("p -> q -> p"),
            Formula::implies(
                Formula::letter("p"),
                Formula::implies(Formula::letter("q"), Formula::letter("p"))
            )
        );
    }

    #[test]
    fn quantifier_extends_right() {
        let f = p("p & A t. q | t");
        let body = Formula::or(Formula::letter("q"), Formula::adequate(r("t")));
        assert_eq!(f, Formula::and(Formula::letter("p"), Formula::forall(Symbol::new("t"), body)));
        // printed form keeps the quantifier last
        assert_eq!(print(&f), "p & A t. q | t");
        let g = Formula::and(
            Formula::or(Formula::letter("p"), Formula::forall(Symbol::new("t"), Formula::letter("q"))),
            Formula::letter("q"),
        );
        assert_eq!(print(&g), "(p | A t. q) & q");
        assert_eq!(parse(&print(&g), &sig()).unwrap(), g);
    }

    #[test]
    fn app_terms_parse_in_reason_position() {
        let f = p("s * r:q");
        assert_eq!(f, Formula::supports(ReasonTerm::app(r("s"), r("r")), Formula::letter("q")));
        let g = p("(s * r):q");
        assert_eq!(g, f);
        let h = p("s * (r * t)");
        assert_eq!(h, Formula::adequate(ReasonTerm::app(r("s"), ReasonTerm::app(r("r"), r("t")))));
        assert_eq!(print(&h), "s * (r * t)");
    }

    #[test]
    fn sigma_keyword() {
        assert_eq!(p("B sigma"), Formula::believes(Formula::adequate(ReasonTerm::Sigma)));
        assert_eq!(p("sigma:p"), Formula::supports(ReasonTerm::Sigma, Formula::letter("p")));
    }

    #[test]
    fn undeclared_identifier_is_rejected() {
        let err = parse("p & zz", &sig()).unwrap_err();
        assert_eq!(err.span.start, 4);
    }

    #[test]
    fn letter_cannot_support() {
        assert!(parse("p:q", &sig()).is_err());
    }

    #[test]
    fn unicode_display() {
        let f = p("E t. t:p & B t");
        assert_eq!(print_with(&f, Notation::Unicode), "∃t. t:p ∧ B t");
        assert_eq!(parse(&print_with(&f, Notation::Unicode), &sig()).unwrap(), f);
    }

    #[test]
    fn derived_connectives_print_back() {
        for text in ["p <-> q", "r != s", "E t. t", "~(p & q)", "B (p -> q)", "r:~p", "~r:p"] {
            let f = p(text);
            assert_eq!(print(&f), text, "{text}");
        }
    }
}
