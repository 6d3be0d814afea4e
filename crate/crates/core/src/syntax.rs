//! Formula and reason-term data model.
//!
//! Only the primitive connectives are stored: letters, `~`, `|`, support
//! `r:φ`, adequacy atoms, `B`, reason equality and `(∀r)`. Every derived
//! connective is expanded by its constructor, so two formulas are the same
//! formula exactly when they are structurally equal.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// An interned name for a propositional letter or a basic reason.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl serde::Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> serde::Deserialize<'de> for Symbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Symbol::new(&s))
    }
}

/// A reason: a basic symbol, the master reason σ, or an application `s·t`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ReasonTerm {
    Basic(Symbol),
    Sigma,
    App(Box<ReasonTerm>, Box<ReasonTerm>),
}

impl ReasonTerm {
    pub fn basic(name: &str) -> Self {
        ReasonTerm::Basic(Symbol::new(name))
    }

    pub fn app(left: ReasonTerm, right: ReasonTerm) -> Self {
        ReasonTerm::App(Box::new(left), Box::new(right))
    }

    /// Basic, or σ.
    pub fn is_atomic(&self) -> bool {
        !matches!(self, ReasonTerm::App(..))
    }

    pub fn as_basic(&self) -> Option<&Symbol> {
        match self {
            ReasonTerm::Basic(s) => Some(s),
            _ => None,
        }
    }

    pub fn mentions_sigma(&self) -> bool {
        match self {
            ReasonTerm::Basic(_) => false,
            ReasonTerm::Sigma => true,
            ReasonTerm::App(l, r) => l.mentions_sigma() || r.mentions_sigma(),
        }
    }

    pub fn has_app(&self) -> bool {
        matches!(self, ReasonTerm::App(..))
    }

    /// Basic symbols occurring in the term.
    pub fn symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            ReasonTerm::Basic(s) => {
                out.insert(s.clone());
            }
            ReasonTerm::Sigma => {}
            ReasonTerm::App(l, r) => {
                l.symbols(out);
                r.symbols(out);
            }
        }
    }

    fn contains_symbol(&self, sym: &Symbol) -> bool {
        match self {
            ReasonTerm::Basic(s) => s == sym,
            ReasonTerm::Sigma => false,
            ReasonTerm::App(l, r) => l.contains_symbol(sym) || r.contains_symbol(sym),
        }
    }

    fn replace(&self, from: &Symbol, to: &ReasonTerm) -> ReasonTerm {
        match self {
            ReasonTerm::Basic(s) if s == from => to.clone(),
            ReasonTerm::Basic(_) | ReasonTerm::Sigma => self.clone(),
            ReasonTerm::App(l, r) => ReasonTerm::app(l.replace(from, to), r.replace(from, to)),
        }
    }
}

/// A formula over the primitive connectives.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Letter(Symbol),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `r:φ`
    Supports(ReasonTerm, Box<Formula>),
    /// The adequacy atom `r`.
    Adequate(ReasonTerm),
    /// `Bφ`
    Believes(Box<Formula>),
    Eq(ReasonTerm, ReasonTerm),
    ForAll(Symbol, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("substituting {replacement:?} for {var} would capture it under a quantifier")]
pub struct CaptureError {
    pub var: Symbol,
    pub replacement: ReasonTerm,
}

impl Formula {
    pub fn letter(name: &str) -> Self {
        Formula::Letter(Symbol::new(name))
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// `a ∧ b := ¬(¬a ∨ ¬b)`
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::or(Formula::not(a), Formula::not(b)))
    }

    /// `a → b := ¬a ∨ b`
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::not(a), b)
    }

    /// `a ↔ b := (a → b) ∧ (b → a)`
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn supports(r: ReasonTerm, f: Formula) -> Self {
        Formula::Supports(r, Box::new(f))
    }

    pub fn adequate(r: ReasonTerm) -> Self {
        Formula::Adequate(r)
    }

    pub fn believes(f: Formula) -> Self {
        Formula::Believes(Box::new(f))
    }

    pub fn eq(a: ReasonTerm, b: ReasonTerm) -> Self {
        Formula::Eq(a, b)
    }

    pub fn neq(a: ReasonTerm, b: ReasonTerm) -> Self {
        Formula::not(Formula::Eq(a, b))
    }

    pub fn forall(var: Symbol, f: Formula) -> Self {
        Formula::ForAll(var, Box::new(f))
    }

    /// `(∃r)φ := ¬(∀r)¬φ`
    pub fn exists(var: Symbol, f: Formula) -> Self {
        Formula::not(Formula::forall(var, Formula::not(f)))
    }

    /// `(∀r≠s)φ := (∀r)(r≠s → φ)`
    pub fn forall_neq(var: Symbol, other: ReasonTerm, f: Formula) -> Self {
        let guard = Formula::neq(ReasonTerm::Basic(var.clone()), other);
        Formula::forall(var, Formula::implies(guard, f))
    }

    /// `(∃r≠s)φ := (∃r)(r≠s ∧ φ)`
    pub fn exists_neq(var: Symbol, other: ReasonTerm, f: Formula) -> Self {
        let guard = Formula::neq(ReasonTerm::Basic(var.clone()), other);
        Formula::exists(var, Formula::and(guard, f))
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    // ------------------------------------------------------------------
    // Views onto abbreviations
    // ------------------------------------------------------------------

    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Or(a, b) => match a.as_ref() {
                Formula::Not(a) => Some((a, b)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Or(a, b) => match (a.as_ref(), b.as_ref()) {
                    (Formula::Not(a), Formula::Not(b)) => Some((a, b)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    pub fn as_iff(&self) -> Option<(&Formula, &Formula)> {
        let (left, right) = self.as_and()?;
        let (a, b) = left.as_implies()?;
        let (b2, a2) = right.as_implies()?;
        (a == a2 && b == b2).then_some((a, b))
    }

    pub fn as_exists(&self) -> Option<(&Symbol, &Formula)> {
        match self {
            Formula::Not(inner) => match inner.as_ref() {
                Formula::ForAll(v, body) => match body.as_ref() {
                    Formula::Not(b) => Some((v, b)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    pub fn as_neq(&self) -> Option<(&ReasonTerm, &ReasonTerm)> {
        match self {
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Eq(a, b) => Some((a, b)),
                _ => None,
            },
            _ => None,
        }
    }

    // ------------------------------------------------------------------
    // Occurrence analysis
    // ------------------------------------------------------------------

    /// Symbols with at least one free occurrence.
    pub fn free_reasons(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Symbol>, out: &mut BTreeSet<Symbol>) {
        let add_term = |t: &ReasonTerm, bound: &Vec<Symbol>, out: &mut BTreeSet<Symbol>| {
            let mut syms = BTreeSet::new();
            t.symbols(&mut syms);
            out.extend(syms.into_iter().filter(|s| !bound.contains(s)));
        };
        match self {
            Formula::Letter(_) => {}
            Formula::Not(a) | Formula::Believes(a) => a.collect_free(bound, out),
            Formula::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Supports(r, a) => {
                add_term(r, bound, out);
                a.collect_free(bound, out);
            }
            Formula::Adequate(r) => add_term(r, bound, out),
            Formula::Eq(a, b) => {
                add_term(a, bound, out);
                add_term(b, bound, out);
            }
            Formula::ForAll(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_free(&self, sym: &Symbol) -> bool {
        match self {
            Formula::Letter(_) => false,
            Formula::Not(a) | Formula::Believes(a) => a.is_free(sym),
            Formula::Or(a, b) => a.is_free(sym) || b.is_free(sym),
            Formula::Supports(r, a) => r.contains_symbol(sym) || a.is_free(sym),
            Formula::Adequate(r) => r.contains_symbol(sym),
            Formula::Eq(a, b) => a.contains_symbol(sym) || b.contains_symbol(sym),
            Formula::ForAll(v, body) => v != sym && body.is_free(sym),
        }
    }

    /// Every reason symbol occurring anywhere, binders included.
    pub fn all_reason_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Supports(r, _) | Formula::Adequate(r) => r.symbols(&mut out),
            Formula::Eq(a, b) => {
                a.symbols(&mut out);
                b.symbols(&mut out);
            }
            Formula::ForAll(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    pub fn letters(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Letter(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn mentions_sigma(&self) -> bool {
        self.any(&|f| match f {
            Formula::Supports(r, _) | Formula::Adequate(r) => r.mentions_sigma(),
            Formula::Eq(a, b) => a.mentions_sigma() || b.mentions_sigma(),
            _ => false,
        })
    }

    pub fn has_app(&self) -> bool {
        self.any(&|f| match f {
            Formula::Supports(r, _) | Formula::Adequate(r) => r.has_app(),
            Formula::Eq(a, b) => a.has_app() || b.has_app(),
            _ => false,
        })
    }

    pub fn has_quantifier(&self) -> bool {
        self.any(&|f| matches!(f, Formula::ForAll(..)))
    }

    pub fn has_equality(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Eq(..)))
    }

    /// Pre-order traversal.
    pub fn walk<F: FnMut(&Formula)>(&self, visit: &mut F) {
        visit(self);
        match self {
            Formula::Not(a) | Formula::Believes(a) | Formula::Supports(_, a) | Formula::ForAll(_, a) => {
                a.walk(visit)
            }
            Formula::Or(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
            Formula::Letter(_) | Formula::Adequate(_) | Formula::Eq(..) => {}
        }
    }

    fn any(&self, pred: &dyn Fn(&Formula) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Formula::Not(a) | Formula::Believes(a) | Formula::Supports(_, a) | Formula::ForAll(_, a) => {
                a.any(pred)
            }
            Formula::Or(a, b) => a.any(pred) || b.any(pred),
            Formula::Letter(_) | Formula::Adequate(_) | Formula::Eq(..) => false,
        }
    }

    /// Number of nodes in the primitive syntax tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    // ------------------------------------------------------------------
    // Substitution
    // ------------------------------------------------------------------

    /// True iff `var` has no free occurrence inside the scope of a
    /// quantifier binding a symbol of `replacement`.
    pub fn is_free_for(&self, replacement: &ReasonTerm, var: &Symbol) -> bool {
        let mut syms = BTreeSet::new();
        replacement.symbols(&mut syms);
        if syms.len() == 1 && syms.contains(var) && matches!(replacement, ReasonTerm::Basic(_)) {
            return true;
        }
        self.free_for_inner(&syms, var, false)
    }

    fn free_for_inner(&self, syms: &BTreeSet<Symbol>, var: &Symbol, captured: bool) -> bool {
        match self {
            Formula::Letter(_) => true,
            Formula::Not(a) | Formula::Believes(a) => a.free_for_inner(syms, var, captured),
            Formula::Or(a, b) => {
                a.free_for_inner(syms, var, captured) && b.free_for_inner(syms, var, captured)
            }
            Formula::Supports(r, a) => {
                !(captured && r.contains_symbol(var)) && a.free_for_inner(syms, var, captured)
            }
            Formula::Adequate(r) => !(captured && r.contains_symbol(var)),
            Formula::Eq(a, b) => !(captured && (a.contains_symbol(var) || b.contains_symbol(var))),
            Formula::ForAll(v, body) => {
                if v == var {
                    // no free occurrence of `var` below this binder
                    true
                } else {
                    body.free_for_inner(syms, var, captured || syms.contains(v))
                }
            }
        }
    }

    /// `φ[s/r]`: replace every free occurrence of `var` by `replacement`.
    pub fn substitute(&self, var: &Symbol, replacement: &ReasonTerm) -> Result<Formula, CaptureError> {
        if !self.is_free_for(replacement, var) {
            return Err(CaptureError {
                var: var.clone(),
                replacement: replacement.clone(),
            });
        }
        Ok(self.substitute_unchecked(var, replacement))
    }

    /// Substitution without the capture check. Callers must have
    /// established `is_free_for` themselves.
    pub(crate) fn substitute_unchecked(&self, var: &Symbol, replacement: &ReasonTerm) -> Formula {
        match self {
            Formula::Letter(_) => self.clone(),
            Formula::Not(a) => Formula::not(a.substitute_unchecked(var, replacement)),
            Formula::Believes(a) => Formula::believes(a.substitute_unchecked(var, replacement)),
            Formula::Or(a, b) => Formula::or(
                a.substitute_unchecked(var, replacement),
                b.substitute_unchecked(var, replacement),
            ),
            Formula::Supports(r, a) => Formula::supports(
                r.replace(var, replacement),
                a.substitute_unchecked(var, replacement),
            ),
            Formula::Adequate(r) => Formula::Adequate(r.replace(var, replacement)),
            Formula::Eq(a, b) => Formula::Eq(a.replace(var, replacement), b.replace(var, replacement)),
            Formula::ForAll(v, body) => {
                if v == var {
                    self.clone()
                } else {
                    Formula::forall(v.clone(), body.substitute_unchecked(var, replacement))
                }
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print(self))
    }
}

impl fmt::Display for ReasonTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_reason(self, crate::parser::Notation::Ascii))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Symbol {
        Symbol::new(s)
    }

    fn r(s: &str) -> ReasonTerm {
        ReasonTerm::basic(s)
    }

    fn set(items: &[&str]) -> BTreeSet<Symbol> {
        items.iter().map(|s| sym(s)).collect()
    }

    #[test]
    fn free_reasons_examples() {
        let bound = Formula::forall(sym("r"), Formula::supports(r("r"), Formula::letter("p")));
        assert!(bound.free_reasons().is_empty());

        let f = Formula::and(
            Formula::supports(r("r"), Formula::letter("p")),
            Formula::believes(Formula::adequate(r("s"))),
        );
        assert_eq!(f.free_reasons(), set(&["r", "s"]));

        let g = Formula::forall(sym("t"), Formula::neq(r("t"), r("r")));
        assert_eq!(g.free_reasons(), set(&["r"]));
    }

    #[test]
    fn free_for_examples() {
        let g = Formula::forall(sym("t"), Formula::neq(r("t"), r("r")));
        assert!(g.is_free_for(&r("s"), &sym("r")));
        let h = Formula::forall(sym("s"), Formula::neq(r("s"), r("r")));
        assert!(!h.is_free_for(&r("s"), &sym("r")));
        assert!(h.is_free_for(&r("r"), &sym("r")));
        // sigma can never be captured
        assert!(h.is_free_for(&ReasonTerm::Sigma, &sym("r")));
    }

    #[test]
    fn substitution_examples() {
        let g = Formula::forall(sym("t"), Formula::neq(r("t"), r("r")));
        assert_eq!(
            g.substitute(&sym("r"), &r("s")).unwrap(),
            Formula::forall(sym("t"), Formula::neq(r("t"), r("s")))
        );

        let all_kinds = Formula::and(
            Formula::and(
                Formula::supports(r("r"), Formula::letter("p")),
                Formula::believes(Formula::adequate(r("r"))),
            ),
            Formula::adequate(r("r")),
        );
        let expected = Formula::and(
            Formula::and(
                Formula::supports(r("s"), Formula::letter("p")),
                Formula::believes(Formula::adequate(r("s"))),
            ),
            Formula::adequate(r("s")),
        );
        assert_eq!(all_kinds.substitute(&sym("r"), &r("s")).unwrap(), expected);

        let bound = Formula::forall(sym("r"), Formula::supports(r("r"), Formula::letter("p")));
        assert_eq!(bound.substitute(&sym("r"), &r("s")).unwrap(), bound);
    }

    #[test]
    fn capture_is_an_error() {
        let h = Formula::forall(sym("s"), Formula::neq(r("s"), r("r")));
        let err = h.substitute(&sym("r"), &r("s")).unwrap_err();
        assert_eq!(err.var, sym("r"));
    }

    #[test]
    fn substitution_reaches_inside_app_terms() {
        let f = Formula::adequate(ReasonTerm::app(r("s"), r("r")));
        assert_eq!(
            f.substitute(&sym("r"), &r("t")).unwrap(),
            Formula::adequate(ReasonTerm::app(r("s"), r("t")))
        );
    }

    #[test]
    fn abbreviation_views_round_trip() {
        let a = Formula::letter("a");
        let b = Formula::letter("b");
        let imp = Formula::implies(a.clone(), b.clone());
        assert_eq!(imp.as_implies(), Some((&a, &b)));
        let conj = Formula::and(a.clone(), b.clone());
        assert_eq!(conj.as_and(), Some((&a, &b)));
        let bi = Formula::iff(a.clone(), b.clone());
        assert_eq!(bi.as_iff(), Some((&a, &b)));
        let ex = Formula::exists(sym("r"), a.clone());
        assert_eq!(ex.as_exists(), Some((&sym("r"), &a)));
    }
}
