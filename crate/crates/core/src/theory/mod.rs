//! Theory configurations and axiom-scheme recognition.

mod config;
pub mod tautology;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use config::{TheoryConfig, TheoryFlags, TheoryKind};
pub use tautology::{check_tautology, is_tautology_instance, MAX_SKELETON_ATOMS};

use crate::syntax::{Formula, ReasonTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("unknown theory `{0}`")]
    UnknownTheory(String),
    #[error("invalid theory configuration: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Undeclared(String),
    #[error("propositional skeleton has {atoms} atoms, more than the limit of {limit}")]
    SkeletonTooLarge { atoms: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemeId {
    Cl,
    Rk,
    A,
    Rb,
    D,
    Ud,
    Ui,
    Ep,
    En,
    Ma,
    Mb,
    Mr,
    Mt,
    App,
}

impl SchemeId {
    /// Matching order used by [`match_axiom`].
    pub const PRIORITY: [SchemeId; 14] = [
        SchemeId::Cl,
        SchemeId::Rk,
        SchemeId::A,
        SchemeId::Rb,
        SchemeId::D,
        SchemeId::Ud,
        SchemeId::Ui,
        SchemeId::Ep,
        SchemeId::En,
        SchemeId::Ma,
        SchemeId::Mb,
        SchemeId::Mr,
        SchemeId::Mt,
        SchemeId::App,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Cl => "CL",
            SchemeId::Rk => "RK",
            SchemeId::A => "A",
            SchemeId::Rb => "RB",
            SchemeId::D => "D",
            SchemeId::Ud => "UD",
            SchemeId::Ui => "UI",
            SchemeId::Ep => "EP",
            SchemeId::En => "EN",
            SchemeId::Ma => "MA",
            SchemeId::Mb => "MB",
            SchemeId::Mr => "MR",
            SchemeId::Mt => "MT",
            SchemeId::App => "APP",
        }
    }

    /// Pattern, written with metavariables.
    pub fn pattern(self) -> &'static str {
        match self {
            SchemeId::Cl => "any instance of a propositional tautology",
            SchemeId::Rk => "r:(φ → ψ) → (r:φ → r:ψ)",
            SchemeId::A => "r:φ → (r → φ)",
            SchemeId::Rb => "r:φ → (Br → Bφ)",
            SchemeId::D => "Bφ → ¬B¬φ",
            SchemeId::Ud => "(∀r)(φ → ψ) → (φ → (∀r)ψ), r not free in φ",
            SchemeId::Ui => "(∀r)φ → φ[s/r], s free for r in φ",
            SchemeId::Ep => "r = r",
            SchemeId::En => "¬(r = s), r and s syntactically different",
            SchemeId::Ma => "σ → (Br → r)",
            SchemeId::Mb => "Bσ",
            SchemeId::Mr => "r:φ → (Br → σ:φ)",
            SchemeId::Mt => "Bφ → σ:φ",
            SchemeId::App => "s:(φ → ψ) → (r:φ → (s·r):ψ)",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemeId::PRIORITY
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| TheoryError::InvalidConfig(format!("unknown axiom scheme `{s}`")))
    }
}

/// The first enabled scheme (in [`SchemeId::PRIORITY`] order) that `f`
/// instantiates, or `None` when `f` is not an axiom of `cfg`.
pub fn match_axiom(f: &Formula, cfg: &TheoryConfig) -> Option<SchemeId> {
    SchemeId::PRIORITY
        .into_iter()
        .filter(|s| cfg.scheme_enabled(*s))
        .find(|s| is_instance(f, *s))
}

/// Whether `f` is an instance of `scheme`, ignoring which schemes a theory
/// enables.
pub fn is_instance(f: &Formula, scheme: SchemeId) -> bool {
    match scheme {
        SchemeId::Cl => is_tautology_instance(f),
        SchemeId::Rk => match_rk(f),
        SchemeId::A => match_a(f),
        SchemeId::Rb => match_rb(f),
        SchemeId::D => match_d(f),
        SchemeId::Ud => match_ud(f),
        SchemeId::Ui => match_ui(f),
        SchemeId::Ep => matches!(f, Formula::Eq(a, b) if a == b),
        SchemeId::En => matches!(f.as_neq(), Some((a, b)) if a != b),
        SchemeId::Ma => match_ma(f),
        SchemeId::Mb => matches!(f, Formula::Believes(a) if **a == Formula::Adequate(ReasonTerm::Sigma)),
        SchemeId::Mr => match_mr(f),
        SchemeId::Mt => match_mt(f),
        SchemeId::App => match_app(f),
    }
}

fn supports(f: &Formula) -> Option<(&ReasonTerm, &Formula)> {
    match f {
        Formula::Supports(r, a) => Some((r, a)),
        _ => None,
    }
}

fn believes(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Believes(a) => Some(a),
        _ => None,
    }
}

fn adequate(f: &Formula) -> Option<&ReasonTerm> {
    match f {
        Formula::Adequate(r) => Some(r),
        _ => None,
    }
}

// r:(φ → ψ) → (r:φ → r:ψ)
fn match_rk(f: &Formula) -> bool {
    (|| {
        let (prem, concl) = f.as_implies()?;
        let (r, imp) = supports(prem)?;
        let (phi, psi) = imp.as_implies()?;
        let (left, right) = concl.as_implies()?;
        let (r1, phi1) = supports(left)?;
        let (r2, psi1) = supports(right)?;
        Some(r == r1 && r == r2 && phi == phi1 && psi == psi1)
    })()
    .unwrap_or(false)
}

// r:φ → (r → φ)
fn match_a(f: &Formula) -> bool {
    (|| {
        let (prem, concl) = f.as_implies()?;
        let (r, phi) = supports(prem)?;
        let (ad, phi1) = concl.as_implies()?;
        Some(adequate(ad)? == r && phi == phi1)
    })()
    .unwrap_or(false)
}

// r:φ → (Br → Bφ)
fn match_rb(f: &Formula) -> bool {
    (|| {
        let (prem, concl) = f.as_implies()?;
        let (r, phi) = supports(prem)?;
        let (br, bphi) = concl.as_implies()?;
        Some(adequate(believes(br)?)? == r && believes(bphi)? == phi)
    })()
    .unwrap_or(false)
}

// Bφ → ¬B¬φ
fn match_d(f: &Formula) -> bool {
    (|| {
        let (prem, concl) = f.as_implies()?;
        let phi = believes(prem)?;
        let Formula::Not(inner) = concl else { return None };
        let Formula::Not(phi1) = believes(inner)? else { return None };
        Some(phi == phi1.as_ref())
    })()
    .unwrap_or(false)
}

// (∀r)(φ → ψ) → (φ → (∀r)ψ), r not free in φ
fn match_ud(f: &Formula) -> bool {
    (|| {
        let (prem, concl) = f.as_implies()?;
        let Formula::ForAll(r, body) = prem else { return None };
        let (phi, psi) = body.as_implies()?;
        let (phi1, all_psi) = concl.as_implies()?;
        let Formula::ForAll(r1, psi1) = all_psi else { return None };
        Some(r == r1 && phi == phi1 && psi == psi1.as_ref() && !phi.is_free(r))
    })()
    .unwrap_or(false)
}

// (∀r)φ → φ[s/r], s free for r in φ
fn match_ui(f: &Formula) -> bool {
    (|| {
        let (prem, concl) = f.as_implies()?;
        let Formula::ForAll(r, phi) = prem else { return None };
        if !phi.is_free(r) {
            return Some(phi.as_ref() == concl);
        }
        // the substituent is some atomic reason occurring in the conclusion
        let mut candidates = std::collections::BTreeSet::new();
        concl.walk(&mut |g| match g {
            Formula::Supports(t, _) | Formula::Adequate(t) => {
                candidates.insert(t.clone());
            }
            Formula::Eq(a, b) => {
                candidates.insert(a.clone());
                candidates.insert(b.clone());
            }
            _ => {}
        });
        let mut atomic = std::collections::BTreeSet::new();
        for t in &candidates {
            collect_atomic(t, &mut atomic);
        }
        Some(atomic.iter().any(|s| {
            phi.is_free_for(s, r) && phi.substitute_unchecked(r, s) == *concl
        }))
    })()
    .unwrap_or(false)
}

fn collect_atomic(t: &ReasonTerm, out: &mut std::collections::BTreeSet<ReasonTerm>) {
    match t {
        ReasonTerm::App(l, r) => {
            collect_atomic(l, out);
            collect_atomic(r, out);
        }
        other => {
            out.insert(other.clone());
        }
    }
}

// σ → (Br → r)
fn match_ma(f: &Formula) -> bool {
    (|| {
        let (sigma, concl) = f.as_implies()?;
        if adequate(sigma)? != &ReasonTerm::Sigma {
            return None;
        }
        let (br, r) = concl.as_implies()?;
        Some(adequate(believes(br)?)? == adequate(r)?)
    })()
    .unwrap_or(false)
}

// r:φ → (Br → σ:φ)
fn match_mr(f: &Formula) -> bool {
    (|| {
        let (prem, concl) = f.as_implies()?;
        let (r, phi) = supports(prem)?;
        let (br, sphi) = concl.as_implies()?;
        let (sigma, phi1) = supports(sphi)?;
        Some(adequate(believes(br)?)? == r && *sigma == ReasonTerm::Sigma && phi == phi1)
    })()
    .unwrap_or(false)
}

// Bφ → σ:φ
fn match_mt(f: &Formula) -> bool {
    (|| {
        let (prem, concl) = f.as_implies()?;
        let phi = believes(prem)?;
        let (sigma, phi1) = supports(concl)?;
        Some(*sigma == ReasonTerm::Sigma && phi == phi1)
    })()
    .unwrap_or(false)
}

// s:(φ → ψ) → (r:φ → (s·r):ψ)
fn match_app(f: &Formula) -> bool {
    (|| {
        let (prem, concl) = f.as_implies()?;
        let (s, imp) = supports(prem)?;
        let (phi, psi) = imp.as_implies()?;
        let (left, right) = concl.as_implies()?;
        let (r, phi1) = supports(left)?;
        let (sr, psi1) = supports(right)?;
        let expected = ReasonTerm::app(s.clone(), r.clone());
        Some(*sr == expected && phi == phi1 && psi == psi1)
    })()
    .unwrap_or(false)
}
