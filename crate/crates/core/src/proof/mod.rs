//! Hilbert-style proofs and their checker.
//!
//! A proof is a numbered list of formulas, each justified by an axiom
//! scheme, a rule applied to earlier steps, or a citation of a theorem from
//! a [`Library`]. Checking is purely syntactic and deterministic.

mod format;
mod library;
pub mod templates;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::parser::ParseError;
use crate::syntax::{Formula, ReasonTerm, Symbol};
use crate::theory::{check_tautology, is_instance, is_tautology_instance, SchemeId, TheoryConfig, TheoryError};

pub use format::{proof_from_json, proof_to_json};
pub use library::{derived_library, fixture_sources, Library, LibraryEntry};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom(SchemeId),
    /// `Mp(i, j)`: step `j` is `step_i -> current`.
    Mp(usize, usize),
    Rn(usize, ReasonTerm),
    E(usize),
    Gen(usize, Symbol),
    Cite(String),
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Axiom(s) => write!(f, "({s})"),
            Justification::Mp(i, j) => write!(f, "MP {i}, {j}"),
            Justification::Rn(i, r) => write!(f, "RN {i}, {r}"),
            Justification::E(i) => write!(f, "E {i}"),
            Justification::Gen(i, v) => write!(f, "Gen {i}, {v}"),
            Justification::Cite(name) => write!(f, "cite {name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub index: usize,
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub theory: TheoryConfig,
    pub name: String,
    pub goal: Formula,
    pub steps: Vec<ProofStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected { step: usize, diagnostic: String },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => f.write_str("Accepted"),
            Verdict::Rejected { step, diagnostic } => write!(f, "Rejected at step {step}: {diagnostic}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ProofError {
    #[error("step {step} cites unknown theorem `{name}`")]
    UnknownCitation { step: usize, name: String },
    #[error("step {step} cites `{name}`, proved in {cited}, which {theory} does not extend")]
    TheoryMismatch {
        step: usize,
        name: String,
        cited: String,
        theory: String,
    },
    #[error("proof `{0}` has no steps")]
    EmptyProof(String),
    #[error("bundled proof `{name}` failed its own check: {reason}")]
    FixtureCorrupt { name: String, reason: String },
    #[error("malformed proof file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed formula in {location}: {source}")]
    Parse {
        location: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

/// Checks every step of `pf` in order and reports the first failure.
pub fn check_proof(pf: &Proof, library: &Library) -> Result<Verdict, ProofError> {
    if pf.steps.is_empty() {
        return Err(ProofError::EmptyProof(pf.name.clone()));
    }
    let cfg = &pf.theory;
    for (k, step) in pf.steps.iter().enumerate() {
        let n = k + 1;
        let reject = |diagnostic: String| Ok(Verdict::Rejected { step: n, diagnostic });
        if step.index != n {
            return reject(format!("expected step number {n}, found {}", step.index));
        }
        if let Err(e) = cfg.check_formula(&step.formula) {
            return reject(e.to_string());
        }
        let earlier = |i: usize| -> Result<&Formula, String> {
            if i == 0 || i >= n {
                Err(format!("step {n} refers to step {i}, which is not an earlier step"))
            } else {
                Ok(&pf.steps[i - 1].formula)
            }
        };
        let outcome: Result<(), String> = match &step.justification {
            Justification::Axiom(scheme) => check_axiom(&step.formula, *scheme, cfg),
            Justification::Mp(i, j) => (|| {
                let a = earlier(*i)?;
                let imp = earlier(*j)?;
                match imp.as_implies() {
                    Some((ante, cons)) if ante == a && cons == &step.formula => Ok(()),
                    Some((ante, _)) if ante != a => Err(format!("step {j} is not an implication from step {i}")),
                    Some(_) => Err(format!("step {j} does not conclude this formula")),
                    None => Err(format!("step {j} is not an implication")),
                }
            })(),
            Justification::Rn(i, r) => (|| {
                let a = earlier(*i)?;
                if cfg.flags().app && !matches!(r, ReasonTerm::Basic(b) if cfg.basic_reasons().contains(b)) {
                    return Err(format!("(RN) is restricted to basic reasons in {}", cfg.kind()));
                }
                cfg.check_reason(r).map_err(|e| e.to_string())?;
                match &step.formula {
                    Formula::Supports(t, body) if t == r && body.as_ref() == a => Ok(()),
                    _ => Err(format!("(RN) from step {i} with {r} does not yield this formula")),
                }
            })(),
            Justification::E(i) => (|| {
                let a = earlier(*i)?;
                let (phi, psi) = a.as_iff().ok_or_else(|| format!("step {i} is not a biconditional"))?;
                let expected = Formula::iff(Formula::believes(phi.clone()), Formula::believes(psi.clone()));
                if step.formula == expected {
                    Ok(())
                } else {
                    Err(format!("(E) from step {i} does not yield this formula"))
                }
            })(),
            Justification::Gen(i, v) => (|| {
                if !cfg.flags().quantified {
                    return Err(format!("(Gen) is not available in {}", cfg.kind()));
                }
                let a = earlier(*i)?;
                match &step.formula {
                    Formula::ForAll(w, body) if w == v && body.as_ref() == a => Ok(()),
                    _ => Err(format!("(Gen) from step {i} over {v} does not yield this formula")),
                }
            })(),
            Justification::Cite(name) => {
                let entry = library.get(name).ok_or_else(|| ProofError::UnknownCitation {
                    step: n,
                    name: name.clone(),
                })?;
                if !cfg.extends(&entry.proof.theory) {
                    return Err(ProofError::TheoryMismatch {
                        step: n,
                        name: name.clone(),
                        cited: entry.proof.theory.kind().to_string(),
                        theory: cfg.kind().to_string(),
                    });
                }
                if !entry.verdict.is_accepted() {
                    Err(format!("cited theorem `{name}` was not accepted"))
                } else if entry.proof.goal != step.formula {
                    Err(format!("this formula is not the theorem `{name}`"))
                } else {
                    Ok(())
                }
            }
        };
        if let Err(diagnostic) = outcome {
            return reject(diagnostic);
        }
    }
    let last = pf.steps.last().expect("non-empty");
    if last.formula != pf.goal {
        return Ok(Verdict::Rejected {
            step: last.index,
            diagnostic: "the last step is not the goal".into(),
        });
    }
    Ok(Verdict::Accepted)
}

fn check_axiom(f: &Formula, scheme: SchemeId, cfg: &TheoryConfig) -> Result<(), String> {
    if !cfg.scheme_enabled(scheme) {
        return Err(format!("scheme ({scheme}) is not available in {}", cfg.kind()));
    }
    if scheme == SchemeId::Cl {
        return match check_tautology(f) {
            Ok(true) => Ok(()),
            Ok(false) => Err("not an instance of (CL)".into()),
            Err(e) => Err(e.to_string()),
        };
    }
    if is_instance(f, scheme) {
        Ok(())
    } else {
        Err(format!("not an instance of ({scheme})"))
    }
}

/// Every single-step corruption of `pf`: each step's formula negated, and
/// each justification replaced by a nearby wrong one. Used to confirm that
/// the checker notices any local change.
pub fn single_step_mutants(pf: &Proof) -> Vec<(String, Proof)> {
    let mut out = Vec::new();
    let schemes = pf.theory.enabled_schemes();
    let reasons: Vec<ReasonTerm> = pf.theory.atomic_reasons();
    for (k, step) in pf.steps.iter().enumerate() {
        let n = k + 1;
        let mut with = |label: String, edit: &dyn Fn(&mut ProofStep)| {
            let mut m = pf.clone();
            edit(&mut m.steps[k]);
            out.push((format!("step {n}: {label}"), m));
        };
        with("formula negated".into(), &|s| s.formula = Formula::not(s.formula.clone()));

        let mut alternatives: Vec<Justification> = Vec::new();
        for s in &schemes {
            if step.justification != Justification::Axiom(*s) {
                alternatives.push(Justification::Axiom(*s));
            }
        }
        match &step.justification {
            Justification::Axiom(_) => {
                if n > 2 {
                    alternatives.push(Justification::Mp(n - 2, n - 1));
                }
            }
            Justification::Mp(i, j) => {
                alternatives.push(Justification::Mp(*j, *i));
                if *i > 1 {
                    alternatives.push(Justification::Mp(i - 1, *j));
                }
                if *j > 1 && j - 1 != *i {
                    alternatives.push(Justification::Mp(*i, j - 1));
                }
            }
            Justification::Rn(i, r) => {
                for t in &reasons {
                    if t != r {
                        alternatives.push(Justification::Rn(*i, t.clone()));
                    }
                }
                if *i > 1 {
                    alternatives.push(Justification::Rn(i - 1, r.clone()));
                }
            }
            Justification::E(i) => {
                if *i > 1 {
                    alternatives.push(Justification::E(i - 1));
                }
            }
            Justification::Gen(i, v) => {
                for t in pf.theory.basic_reasons() {
                    if t != v {
                        alternatives.push(Justification::Gen(*i, t.clone()));
                    }
                }
                if *i > 1 {
                    alternatives.push(Justification::Gen(i - 1, v.clone()));
                }
            }
            Justification::Cite(_) => {}
        }
        for alt in alternatives {
            let label = format!("justification {} -> {}", step.justification, alt);
            with(label, &|s| s.justification = alt.clone());
        }
    }
    out
}

/// Builds proofs step by step; rule helpers compute the conclusion.
#[derive(Debug, Default)]
pub struct ProofBuilder {
    steps: Vec<ProofStep>,
}

impl ProofBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, formula: Formula, justification: Justification) -> usize {
        let index = self.steps.len() + 1;
        self.steps.push(ProofStep {
            index,
            formula,
            justification,
        });
        index
    }

    pub fn axiom(&mut self, scheme: SchemeId, formula: Formula) -> usize {
        self.push(formula, Justification::Axiom(scheme))
    }

    pub fn formula(&self, i: usize) -> &Formula {
        &self.steps[i - 1].formula
    }

    /// Modus ponens from `i` and the implication `j`.
    ///
    /// Panics when step `j` is not `step_i -> _`; templates call this only
    /// on steps they built themselves.
    pub fn mp(&mut self, i: usize, j: usize) -> usize {
        let (ante, cons) = self.formula(j).as_implies().expect("MP needs an implication");
        assert_eq!(ante, self.formula(i), "MP antecedent mismatch");
        let cons = cons.clone();
        self.push(cons, Justification::Mp(i, j))
    }

    /// A tautology `s1 -> (s2 -> ... -> goal)` over the given steps,
    /// discharged by repeated MP. Returns the index of `goal`.
    ///
    /// Premises the tautology does not need are left out, so that no MP
    /// step concludes something (CL) would give directly.
    pub fn combine(&mut self, premises: &[usize], goal: Formula) -> usize {
        let chain = |ps: &[usize]| {
            ps.iter()
                .rev()
                .fold(goal.clone(), |acc, &i| Formula::implies(self.formula(i).clone(), acc))
        };
        let mut used: Vec<usize> = premises.to_vec();
        let mut k = 0;
        while k < used.len() {
            let mut without = used.clone();
            without.remove(k);
            if is_tautology_instance(&chain(&without)) {
                used = without;
            } else {
                k += 1;
            }
        }
        // a suffix that is already a tautology makes its prefix redundant
        if let Some(cut) = (1..=used.len()).find(|&n| is_tautology_instance(&chain(&used[n..]))) {
            used.drain(..cut);
        }
        let mut at = self.axiom(SchemeId::Cl, chain(&used));
        for &i in &used {
            at = self.mp(i, at);
        }
        at
    }

    pub fn rn(&mut self, i: usize, r: ReasonTerm) -> usize {
        let f = Formula::supports(r.clone(), self.formula(i).clone());
        self.push(f, Justification::Rn(i, r))
    }

    pub fn gen(&mut self, i: usize, v: Symbol) -> usize {
        let f = Formula::forall(v.clone(), self.formula(i).clone());
        self.push(f, Justification::Gen(i, v))
    }

    pub fn e(&mut self, i: usize) -> usize {
        let (a, b) = self.formula(i).as_iff().expect("E needs a biconditional");
        let f = Formula::iff(Formula::believes(a.clone()), Formula::believes(b.clone()));
        self.push(f, Justification::E(i))
    }

    /// Appends the steps of `other`, renumbered. Returns the index of its
    /// last step.
    pub fn splice(&mut self, other: &[ProofStep]) -> usize {
        let offset = self.steps.len();
        for step in other {
            let justification = match &step.justification {
                Justification::Mp(i, j) => Justification::Mp(i + offset, j + offset),
                Justification::Rn(i, r) => Justification::Rn(i + offset, r.clone()),
                Justification::E(i) => Justification::E(i + offset),
                Justification::Gen(i, v) => Justification::Gen(i + offset, v.clone()),
                other => other.clone(),
            };
            self.push(step.formula.clone(), justification);
        }
        self.steps.len()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Finishes the proof with the last step as its goal.
    pub fn finish(self, name: &str, theory: TheoryConfig) -> Proof {
        let goal = self.steps.last().expect("proof has steps").formula.clone();
        Proof {
            theory,
            name: name.to_string(),
            goal,
            steps: self.steps,
        }
    }
}

/// A library with no entries, for checking proofs that cite nothing.
pub fn empty_library() -> Library {
    Library::from_entries(BTreeMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::TheoryKind;

    fn cfg(kind: TheoryKind) -> TheoryConfig {
        TheoryConfig::new(kind, ["r", "s"], ["p", "q"]).unwrap()
    }

    fn step(index: usize, c: &TheoryConfig, text: &str, justification: Justification) -> ProofStep {
        ProofStep {
            index,
            formula: c.parse(text).unwrap(),
            justification,
        }
    }

    fn closure_proof(c: &TheoryConfig) -> Proof {
        let r = ReasonTerm::basic("r");
        let steps = vec![
            step(1, c, "p -> p | q", Justification::Axiom(SchemeId::Cl)),
            step(2, c, "r:(p -> p | q)", Justification::Rn(1, r)),
            step(3, c, "r:(p -> p | q) -> (r:p -> r:(p | q))", Justification::Axiom(SchemeId::Rk)),
            step(4, c, "r:p -> r:(p | q)", Justification::Mp(2, 3)),
        ];
        Proof {
            theory: c.clone(),
            name: "closure".into(),
            goal: c.parse("r:p -> r:(p | q)").unwrap(),
            steps,
        }
    }

    #[test]
    fn closure_under_implication_is_accepted() {
        let c = cfg(TheoryKind::Rbb);
        assert_eq!(check_proof(&closure_proof(&c), &empty_library()).unwrap(), Verdict::Accepted);
    }

    #[test]
    fn wrong_scheme_is_named() {
        let c = cfg(TheoryKind::Rbb);
        let pf = Proof {
            theory: c.clone(),
            name: "bad".into(),
            goal: c.parse("B p").unwrap(),
            steps: vec![step(1, &c, "B p", Justification::Axiom(SchemeId::D))],
        };
        assert_eq!(
            check_proof(&pf, &empty_library()).unwrap(),
            Verdict::Rejected {
                step: 1,
                diagnostic: "not an instance of (D)".into()
            }
        );
    }

    #[test]
    fn monotone_in_sigma_theories() {
        let c = cfg(TheoryKind::Rbb);
        let pf = closure_proof(&c);
        for kind in [TheoryKind::RbbSigma, TheoryKind::RbbSigmaPlus, TheoryKind::Qrbb] {
            let mut lifted = pf.clone();
            lifted.theory = c.with_kind(kind);
            assert!(check_proof(&lifted, &empty_library()).unwrap().is_accepted(), "{kind}");
        }
    }

    #[test]
    fn rk_is_unavailable_with_application() {
        let c = cfg(TheoryKind::RbbApp);
        let verdict = check_proof(&closure_proof(&c), &empty_library()).unwrap();
        assert!(matches!(verdict, Verdict::Rejected { step: 3, .. }), "{verdict}");
    }

    #[test]
    fn rn_restricted_to_basic_reasons_with_application() {
        let c = cfg(TheoryKind::RbbApp);
        let sr = ReasonTerm::app(ReasonTerm::basic("s"), ReasonTerm::basic("r"));
        let pf = Proof {
            theory: c.clone(),
            name: "rn".into(),
            goal: c.parse("(s * r):(p | ~p)").unwrap(),
            steps: vec![
                step(1, &c, "p | ~p", Justification::Axiom(SchemeId::Cl)),
                step(2, &c, "(s * r):(p | ~p)", Justification::Rn(1, sr)),
            ],
        };
        let verdict = check_proof(&pf, &empty_library()).unwrap();
        assert!(matches!(verdict, Verdict::Rejected { step: 2, .. }), "{verdict}");
    }

    #[test]
    fn forward_references_are_rejected() {
        let c = cfg(TheoryKind::Rbb);
        let mut pf = closure_proof(&c);
        pf.steps[3].justification = Justification::Mp(4, 3);
        let verdict = check_proof(&pf, &empty_library()).unwrap();
        assert!(matches!(verdict, Verdict::Rejected { step: 4, .. }));
    }

    #[test]
    fn earliest_failure_is_reported() {
        let c = cfg(TheoryKind::Rbb);
        let mut pf = closure_proof(&c);
        pf.steps[1].justification = Justification::Rn(1, ReasonTerm::basic("s"));
        pf.steps[3].justification = Justification::E(1);
        let verdict = check_proof(&pf, &empty_library()).unwrap();
        assert!(matches!(verdict, Verdict::Rejected { step: 2, .. }));
    }

    #[test]
    fn gen_needs_quantified_theory() {
        let c = cfg(TheoryKind::Rbb);
        let q = cfg(TheoryKind::Qrbb);
        let mut b = ProofBuilder::new();
        let i = b.axiom(SchemeId::Cl, q.parse("p | ~p").unwrap());
        b.gen(i, Symbol::new("r"));
        let pf = b.finish("g", q.clone());
        assert!(check_proof(&pf, &empty_library()).unwrap().is_accepted());
        let mut base = pf.clone();
        base.theory = c;
        assert!(!check_proof(&base, &empty_library()).unwrap().is_accepted());
    }

    #[test]
    fn e_rule() {
        let c = cfg(TheoryKind::Rbb);
        let mut b = ProofBuilder::new();
        let i = b.axiom(SchemeId::Cl, c.parse("p & q <-> q & p").unwrap());
        b.e(i);
        let pf = b.finish("e", c.clone());
        assert_eq!(print_goal(&pf), "B (p & q) <-> B (q & p)");
        assert!(check_proof(&pf, &empty_library()).unwrap().is_accepted());
    }

    fn print_goal(pf: &Proof) -> String {
        crate::parser::print(&pf.goal)
    }

    #[test]
    fn empty_proof_is_an_error() {
        let c = cfg(TheoryKind::Rbb);
        let pf = Proof {
            theory: c.clone(),
            name: "empty".into(),
            goal: c.parse("p").unwrap(),
            steps: vec![],
        };
        assert!(matches!(check_proof(&pf, &empty_library()), Err(ProofError::EmptyProof(_))));
    }

    #[test]
    fn mutants_of_closure_proof_are_rejected() {
        let c = cfg(TheoryKind::Rbb);
        let pf = closure_proof(&c);
        let mutants = single_step_mutants(&pf);
        assert!(mutants.len() > 10);
        for (label, m) in mutants {
            assert!(!check_proof(&m, &empty_library()).unwrap().is_accepted(), "{label}");
        }
    }

    #[test]
    fn undeclared_symbols_are_rejected() {
        let c = cfg(TheoryKind::Rbb);
        let wide = TheoryConfig::new(TheoryKind::Rbb, ["r", "s"], ["p", "q", "x"]).unwrap();
        let pf = Proof {
            theory: c,
            name: "x".into(),
            goal: wide.parse("x | ~x").unwrap(),
            steps: vec![step(1, &wide, "x | ~x", Justification::Axiom(SchemeId::Cl))],
        };
        assert!(!check_proof(&pf, &empty_library()).unwrap().is_accepted());
    }
}
