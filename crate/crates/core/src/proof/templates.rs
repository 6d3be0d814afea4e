//! Proof generators for the derived principles.
//!
//! Each function returns a complete proof for the given instantiation;
//! the bundled library stores their output at fixed small formulas, and
//! callers can re-instantiate them at their own.

use thiserror::Error;

use super::{Proof, ProofBuilder};
use crate::parser::print;
use crate::syntax::{Formula, ReasonTerm, Symbol};
use crate::theory::{SchemeId, TheoryConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("premise `{0}` is not an implication")]
    NotImplication(String),
    #[error("premise `{0}` is not a biconditional")]
    NotBiconditional(String),
    #[error("`{var}` occurs in `{formula}`")]
    Occurs { var: Symbol, formula: String },
    #[error("`{var}` is free in `{formula}`")]
    FreeIn { var: Symbol, formula: String },
}

fn b(f: Formula) -> Formula {
    Formula::believes(f)
}

fn ad(r: &ReasonTerm) -> Formula {
    Formula::adequate(r.clone())
}

fn sup(r: &ReasonTerm, f: &Formula) -> Formula {
    Formula::supports(r.clone(), f.clone())
}

fn imp(a: Formula, c: Formula) -> Formula {
    Formula::implies(a, c)
}

/// `(Br ∧ Bs) → (r:φ → ¬s:¬φ)`: accepted reasons never support
/// contradictory claims.
pub fn reason_consistency(cfg: &TheoryConfig, r: &ReasonTerm, s: &ReasonTerm, phi: &Formula) -> Proof {
    let not_phi = Formula::not(phi.clone());
    let mut pb = ProofBuilder::new();
    let a = pb.axiom(SchemeId::Rb, imp(sup(r, phi), imp(b(ad(r)), b(phi.clone()))));
    let c = pb.axiom(SchemeId::Rb, imp(sup(s, &not_phi), imp(b(ad(s)), b(not_phi.clone()))));
    let d = pb.axiom(SchemeId::D, imp(b(phi.clone()), Formula::not(b(not_phi.clone()))));
    let goal = imp(
        Formula::and(b(ad(r)), b(ad(s))),
        imp(sup(r, phi), Formula::not(sup(s, &not_phi))),
    );
    pb.combine(&[a, c, d], goal);
    pb.finish("RC", cfg.clone())
}

/// `Br → (r:φ → ¬r:¬φ)`.
pub fn internal_consistency(cfg: &TheoryConfig, r: &ReasonTerm, phi: &Formula) -> Proof {
    let not_phi = Formula::not(phi.clone());
    let mut pb = ProofBuilder::new();
    let a = pb.axiom(SchemeId::Rb, imp(sup(r, phi), imp(b(ad(r)), b(phi.clone()))));
    let c = pb.axiom(SchemeId::Rb, imp(sup(r, &not_phi), imp(b(ad(r)), b(not_phi.clone()))));
    let d = pb.axiom(SchemeId::D, imp(b(phi.clone()), Formula::not(b(not_phi.clone()))));
    let goal = imp(b(ad(r)), imp(sup(r, phi), Formula::not(sup(r, &not_phi))));
    pb.combine(&[a, c, d], goal);
    pb.finish("IC", cfg.clone())
}

/// `r:φ → (r → ¬r:¬φ)`.
pub fn adequate_internal_consistency(cfg: &TheoryConfig, r: &ReasonTerm, phi: &Formula) -> Proof {
    let not_phi = Formula::not(phi.clone());
    let mut pb = ProofBuilder::new();
    let a = pb.axiom(SchemeId::A, imp(sup(r, phi), imp(ad(r), phi.clone())));
    let c = pb.axiom(SchemeId::A, imp(sup(r, &not_phi), imp(ad(r), not_phi.clone())));
    let goal = imp(sup(r, phi), imp(ad(r), Formula::not(sup(r, &not_phi))));
    pb.combine(&[a, c], goal);
    pb.finish("AIC", cfg.clone())
}

/// From a proof of `φ → ψ`, a proof of `r:φ → r:ψ`.
pub fn closure_under_consequence(name: &str, premise: &Proof, r: &ReasonTerm) -> Result<Proof, TemplateError> {
    let (phi, psi) = premise
        .goal
        .as_implies()
        .ok_or_else(|| TemplateError::NotImplication(print(&premise.goal)))?;
    let (phi, psi) = (phi.clone(), psi.clone());
    let mut pb = ProofBuilder::new();
    let k = pb.splice(&premise.steps);
    let n = pb.rn(k, r.clone());
    let rk = pb.axiom(
        SchemeId::Rk,
        imp(pb.formula(n).clone(), imp(sup(r, &phi), sup(r, &psi))),
    );
    pb.mp(n, rk);
    Ok(pb.finish(name, premise.theory.clone()))
}

/// `(Bs ∧ Br ∧ s:(φ → ψ) ∧ r:φ) → Bψ`, via the master reason.
pub fn master_closure(cfg: &TheoryConfig, r: &ReasonTerm, s: &ReasonTerm, phi: &Formula, psi: &Formula) -> Proof {
    let sigma = ReasonTerm::Sigma;
    let phi_psi = imp(phi.clone(), psi.clone());
    let mut pb = ProofBuilder::new();
    let m1 = pb.axiom(SchemeId::Mr, imp(sup(s, &phi_psi), imp(b(ad(s)), sup(&sigma, &phi_psi))));
    let m2 = pb.axiom(SchemeId::Mr, imp(sup(r, phi), imp(b(ad(r)), sup(&sigma, phi))));
    let k = pb.axiom(
        SchemeId::Rk,
        imp(sup(&sigma, &phi_psi), imp(sup(&sigma, phi), sup(&sigma, psi))),
    );
    let rb = pb.axiom(SchemeId::Rb, imp(sup(&sigma, psi), imp(b(ad(&sigma)), b(psi.clone()))));
    let mb = pb.axiom(SchemeId::Mb, b(ad(&sigma)));
    let hyp = Formula::conjunction([b(ad(s)), b(ad(r)), sup(s, &phi_psi), sup(r, phi)]).expect("non-empty");
    pb.combine(&[m1, m2, k, rb, mb], imp(hyp, b(psi.clone())));
    pb.finish("RCL2", cfg.clone())
}

/// `Bφ ↔ σ:φ` with (MT).
pub fn belief_is_master_support(cfg: &TheoryConfig, phi: &Formula) -> Proof {
    let sigma = ReasonTerm::Sigma;
    let mut pb = ProofBuilder::new();
    let mt = pb.axiom(SchemeId::Mt, imp(b(phi.clone()), sup(&sigma, phi)));
    let rb = pb.axiom(SchemeId::Rb, imp(sup(&sigma, phi), imp(b(ad(&sigma)), b(phi.clone()))));
    let mb = pb.axiom(SchemeId::Mb, b(ad(&sigma)));
    pb.combine(&[mt, rb, mb], Formula::iff(b(phi.clone()), sup(&sigma, phi)));
    pb.finish("B-iff-sigma", cfg.clone())
}

/// Given step `i` proving `φ → ψ`, appends steps proving
/// `(∀r)φ → (∀r)ψ` and returns its index.
fn distribute(pb: &mut ProofBuilder, i: usize, r: &Symbol) -> usize {
    let (phi, psi) = pb.formula(i).as_implies().expect("implication");
    let (phi, psi) = (phi.clone(), psi.clone());
    let all_phi = Formula::forall(r.clone(), phi.clone());
    let ui = pb.axiom(SchemeId::Ui, imp(all_phi.clone(), phi));
    let c = pb.combine(&[i, ui], imp(all_phi.clone(), psi.clone()));
    let g = pb.gen(c, r.clone());
    let ud = pb.axiom(
        SchemeId::Ud,
        imp(pb.formula(g).clone(), imp(all_phi, Formula::forall(r.clone(), psi))),
    );
    pb.mp(g, ud)
}

/// `(∀r)(φ → ψ) → ((∀r)φ → (∀r)ψ)`.
pub fn distributivity(cfg: &TheoryConfig, r: &Symbol, phi: &Formula, psi: &Formula) -> Proof {
    let all = |f: Formula| Formula::forall(r.clone(), f);
    let all_imp = all(imp(phi.clone(), psi.clone()));
    let all_phi = all(phi.clone());
    let both = Formula::and(all_imp.clone(), all_phi.clone());
    let mut pb = ProofBuilder::new();
    let u1 = pb.axiom(SchemeId::Ui, imp(all_imp.clone(), imp(phi.clone(), psi.clone())));
    let u2 = pb.axiom(SchemeId::Ui, imp(all_phi.clone(), phi.clone()));
    let c = pb.combine(&[u1, u2], imp(both.clone(), psi.clone()));
    let g = pb.gen(c, r.clone());
    let ud = pb.axiom(
        SchemeId::Ud,
        imp(pb.formula(g).clone(), imp(both, all(psi.clone()))),
    );
    let m = pb.mp(g, ud);
    pb.combine(&[m], imp(all_imp, imp(all_phi, all(psi.clone()))));
    pb.finish("Distributivity", cfg.clone())
}

/// From a proof of `φ → ψ`, a proof of `(∀r)φ → (∀r)ψ`.
pub fn distribution_rule(name: &str, premise: &Proof, r: &Symbol) -> Result<Proof, TemplateError> {
    if premise.goal.as_implies().is_none() {
        return Err(TemplateError::NotImplication(print(&premise.goal)));
    }
    let mut pb = ProofBuilder::new();
    let k = pb.splice(&premise.steps);
    distribute(&mut pb, k, r);
    Ok(pb.finish(name, premise.theory.clone()))
}

/// Appends a proof of `(∀r)φ ↔ (∀s)φ[s/r]`.
fn rename(pb: &mut ProofBuilder, r: &Symbol, s: &Symbol, phi: &Formula) -> usize {
    let renamed = phi
        .substitute(r, &ReasonTerm::Basic(s.clone()))
        .expect("fresh variable is free for r");
    let all_r = Formula::forall(r.clone(), phi.clone());
    let all_s = Formula::forall(s.clone(), renamed.clone());
    let u1 = pb.axiom(SchemeId::Ui, imp(all_r.clone(), renamed));
    let g1 = pb.gen(u1, s.clone());
    let d1 = pb.axiom(SchemeId::Ud, imp(pb.formula(g1).clone(), imp(all_r.clone(), all_s.clone())));
    let there = pb.mp(g1, d1);
    let u2 = pb.axiom(SchemeId::Ui, imp(all_s.clone(), phi.clone()));
    let g2 = pb.gen(u2, r.clone());
    let d2 = pb.axiom(SchemeId::Ud, imp(pb.formula(g2).clone(), imp(all_s.clone(), all_r.clone())));
    let back = pb.mp(g2, d2);
    pb.combine(&[there, back], Formula::iff(all_r, all_s))
}

/// `((∀r)φ ↔ (∀s)φ[s/r]) ∧ ((∃r)φ ↔ (∃s)φ[s/r])` for `s` not occurring in `φ`.
pub fn renaming(cfg: &TheoryConfig, r: &Symbol, s: &Symbol, phi: &Formula) -> Result<Proof, TemplateError> {
    if r == s || phi.all_reason_symbols().contains(s) {
        return Err(TemplateError::Occurs {
            var: s.clone(),
            formula: print(phi),
        });
    }
    let mut pb = ProofBuilder::new();
    let univ = rename(&mut pb, r, s, phi);
    let neg = rename(&mut pb, r, s, &Formula::not(phi.clone()));
    let (all_r, all_s) = pb.formula(univ).as_iff().expect("iff");
    let (all_r, all_s) = (all_r.clone(), all_s.clone());
    let renamed = phi.substitute(r, &ReasonTerm::Basic(s.clone())).expect("free");
    let exists = Formula::iff(Formula::exists(r.clone(), phi.clone()), Formula::exists(s.clone(), renamed));
    pb.combine(&[univ, neg], Formula::and(Formula::iff(all_r, all_s), exists));
    Ok(pb.finish("Renaming", cfg.clone()))
}

/// From a proof of `φ ↔ φ'`, a proof of
/// `((∀r)φ ↔ (∀r)φ') ∧ ((∃r)φ ↔ (∃r)φ')`.
pub fn equivalence_rule(name: &str, premise: &Proof, r: &Symbol) -> Result<Proof, TemplateError> {
    let (phi, phi2) = premise
        .goal
        .as_iff()
        .ok_or_else(|| TemplateError::NotBiconditional(print(&premise.goal)))?;
    let (phi, phi2) = (phi.clone(), phi2.clone());
    let (n1, n2) = (Formula::not(phi.clone()), Formula::not(phi2.clone()));
    let mut pb = ProofBuilder::new();
    let k = pb.splice(&premise.steps);
    let mut distributed = Vec::new();
    for (a, c) in [(&phi, &phi2), (&phi2, &phi), (&n1, &n2), (&n2, &n1)] {
        let half = pb.combine(&[k], imp(a.clone(), c.clone()));
        distributed.push(distribute(&mut pb, half, r));
    }
    let all = |f: &Formula| Formula::forall(r.clone(), f.clone());
    let ex = |f: &Formula| Formula::exists(r.clone(), f.clone());
    let goal = Formula::and(Formula::iff(all(&phi), all(&phi2)), Formula::iff(ex(&phi), ex(&phi2)));
    pb.combine(&distributed, goal);
    Ok(pb.finish(name, premise.theory.clone()))
}

fn require_not_free(r: &Symbol, psi: &Formula) -> Result<(), TemplateError> {
    if psi.is_free(r) {
        Err(TemplateError::FreeIn {
            var: r.clone(),
            formula: print(psi),
        })
    } else {
        Ok(())
    }
}

/// `(∀r)(φ → ψ) → ((∃r)φ → ψ)` for `r` not free in `ψ`.
pub fn quantifier_a(cfg: &TheoryConfig, r: &Symbol, phi: &Formula, psi: &Formula) -> Result<Proof, TemplateError> {
    require_not_free(r, psi)?;
    let (not_phi, not_psi) = (Formula::not(phi.clone()), Formula::not(psi.clone()));
    let mut pb = ProofBuilder::new();
    let contra = pb.axiom(
        SchemeId::Cl,
        imp(imp(phi.clone(), psi.clone()), imp(not_psi.clone(), not_phi.clone())),
    );
    let d = distribute(&mut pb, contra, r);
    let ud = pb.axiom(
        SchemeId::Ud,
        imp(
            Formula::forall(r.clone(), imp(not_psi.clone(), not_phi.clone())),
            imp(not_psi, Formula::forall(r.clone(), not_phi)),
        ),
    );
    let goal = imp(
        Formula::forall(r.clone(), imp(phi.clone(), psi.clone())),
        imp(Formula::exists(r.clone(), phi.clone()), psi.clone()),
    );
    pb.combine(&[d, ud], goal);
    Ok(pb.finish("Quantifier-a", cfg.clone()))
}

/// `(∃r)(ψ → φ) → (ψ → (∃r)φ)` for `r` not free in `ψ`.
pub fn quantifier_b(cfg: &TheoryConfig, r: &Symbol, phi: &Formula, psi: &Formula) -> Result<Proof, TemplateError> {
    require_not_free(r, psi)?;
    let all_not_phi = Formula::forall(r.clone(), Formula::not(phi.clone()));
    let psi_phi = imp(psi.clone(), phi.clone());
    let hyp = Formula::and(all_not_phi.clone(), psi.clone());
    let mut pb = ProofBuilder::new();
    let ui = pb.axiom(SchemeId::Ui, imp(all_not_phi, Formula::not(phi.clone())));
    let c = pb.combine(&[ui], imp(hyp.clone(), Formula::not(psi_phi.clone())));
    let g = pb.gen(c, r.clone());
    let ud = pb.axiom(
        SchemeId::Ud,
        imp(
            pb.formula(g).clone(),
            imp(hyp, Formula::forall(r.clone(), Formula::not(psi_phi.clone()))),
        ),
    );
    let m = pb.mp(g, ud);
    let goal = imp(
        Formula::exists(r.clone(), psi_phi),
        imp(psi.clone(), Formula::exists(r.clone(), phi.clone())),
    );
    pb.combine(&[m], goal);
    Ok(pb.finish("Quantifier-b", cfg.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::{check_proof, empty_library};
    use crate::theory::TheoryKind;

    fn accepted(pf: &Proof) {
        let verdict = check_proof(pf, &empty_library()).unwrap();
        assert!(verdict.is_accepted(), "{}: {verdict}", pf.name);
    }

    #[test]
    fn templates_at_other_instantiations() {
        let c = TheoryConfig::new(TheoryKind::QrbbSigmaPlus, ["r", "s", "t"], ["p", "q"]).unwrap();
        let f = |t: &str| c.parse(t).unwrap();
        let r = ReasonTerm::basic("r");
        let s = ReasonTerm::basic("s");
        let (vr, vs, vt) = (Symbol::new("r"), Symbol::new("s"), Symbol::new("t"));
        accepted(&reason_consistency(&c, &r, &s, &f("B q | p")));
        accepted(&internal_consistency(&c, &s, &f("s:p")));
        accepted(&adequate_internal_consistency(&c, &ReasonTerm::Sigma, &f("q")));
        accepted(&master_closure(&c, &s, &r, &f("~q"), &f("p & q")));
        accepted(&belief_is_master_support(&c, &f("r")));
        accepted(&distributivity(&c, &vr, &f("r:p"), &f("s:q")));
        accepted(&renaming(&c, &vr, &vt, &f("r:p -> A s. s:p & r")).unwrap());
        accepted(&quantifier_a(&c, &vr, &f("r & r:q"), &f("B s")).unwrap());
        accepted(&quantifier_b(&c, &vt, &f("t:p"), &f("B (r:q)")).unwrap());

        let mut pb = ProofBuilder::new();
        pb.axiom(SchemeId::A, f("s:q -> (s -> q)"));
        let premise = pb.finish("premise", c.clone());
        accepted(&closure_under_consequence("c", &premise, &r).unwrap());
        accepted(&distribution_rule("d", &premise, &vs).unwrap());

        let mut pb = ProofBuilder::new();
        pb.axiom(SchemeId::Cl, f("(p | q) <-> (q | p)"));
        let premise = pb.finish("premise", c.clone());
        accepted(&equivalence_rule("e", &premise, &vr).unwrap());
    }

    #[test]
    fn side_conditions() {
        let c = TheoryConfig::new(TheoryKind::Qrbb, ["r", "s"], ["p"]).unwrap();
        let f = |t: &str| c.parse(t).unwrap();
        let (r, s) = (Symbol::new("r"), Symbol::new("s"));
        assert!(matches!(renaming(&c, &r, &s, &f("s:p")), Err(TemplateError::Occurs { .. })));
        assert!(matches!(quantifier_a(&c, &r, &f("p"), &f("r")), Err(TemplateError::FreeIn { .. })));
        let mut pb = ProofBuilder::new();
        pb.axiom(SchemeId::Cl, f("p | ~p"));
        let premise = pb.finish("premise", c.clone());
        assert!(matches!(
            distribution_rule("d", &premise, &r),
            Err(TemplateError::NotImplication(_))
        ));
        assert!(matches!(
            equivalence_rule("e", &premise, &r),
            Err(TemplateError::NotBiconditional(_))
        ));
    }
}
