//! Justified true belief: external and internal variants, with and without
//! a named reason, the no-inadequate-lemmas condition, and a library of
//! scenarios analysed by model search.

mod scenario;

pub use scenario::{
    analyze_scenario, analyze_scenario_with, scenario, scenario_from_json, scenario_names, scenario_to_json,
    ConsistencyReport, QueryReport, QueryStatus, Scenario, ScenarioReport, SearchVerdict, DEFAULT_WITNESS_CAP,
};

use thiserror::Error;

use crate::parser::ParseError;
use crate::search::SearchError;
use crate::syntax::{Formula, ReasonTerm, Symbol};
use crate::theory::{TheoryConfig, TheoryError};

#[derive(Debug, Error)]
pub enum JtbError {
    #[error("no reason symbol is free to bind in `{0}`")]
    NoFreshVariable(String),
    #[error("{0} has no quantifiers")]
    NotQuantified(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("malformed scenario: {0}")]
    Malformed(String),
    #[error("{location}: {source}")]
    Parse { location: String, source: ParseError },
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// `r:φ ∧ Br ∧ r`
pub fn jtb_e_r(r: &ReasonTerm, phi: &Formula) -> Formula {
    Formula::and(
        Formula::and(Formula::supports(r.clone(), phi.clone()), Formula::believes(Formula::adequate(r.clone()))),
        Formula::adequate(r.clone()),
    )
}

/// `r:φ ∧ Br ∧ φ`
pub fn jtb_i_r(r: &ReasonTerm, phi: &Formula) -> Formula {
    Formula::and(
        Formula::and(Formula::supports(r.clone(), phi.clone()), Formula::believes(Formula::adequate(r.clone()))),
        phi.clone(),
    )
}

/// The first declared reason not free in `phi`.
pub fn fresh_binder(cfg: &TheoryConfig, phi: &Formula) -> Result<Symbol, JtbError> {
    if !cfg.flags().quantified {
        return Err(JtbError::NotQuantified(cfg.kind().to_string()));
    }
    let free = phi.free_reasons();
    cfg.basic_reasons()
        .iter()
        .find(|r| !free.contains(*r))
        .cloned()
        .ok_or_else(|| JtbError::NoFreshVariable(phi.to_string()))
}

/// `(∃v)JTBᵉ_v(φ)`
pub fn jtb_e(cfg: &TheoryConfig, phi: &Formula) -> Result<Formula, JtbError> {
    let v = fresh_binder(cfg, phi)?;
    Ok(Formula::exists(v.clone(), jtb_e_r(&ReasonTerm::Basic(v), phi)))
}

/// `(∃v)JTBⁱ_v(φ)`
pub fn jtb_i(cfg: &TheoryConfig, phi: &Formula) -> Result<Formula, JtbError> {
    let v = fresh_binder(cfg, phi)?;
    Ok(Formula::exists(v.clone(), jtb_i_r(&ReasonTerm::Basic(v), phi)))
}

/// `(∀v)(JTBⁱ_v(φ) → v)` with the given binder, which must not be free in
/// `phi`.
pub fn nil_with(v: &Symbol, phi: &Formula) -> Result<Formula, JtbError> {
    if phi.is_free(v) {
        return Err(JtbError::NoFreshVariable(phi.to_string()));
    }
    let r = ReasonTerm::Basic(v.clone());
    Ok(Formula::forall(v.clone(), Formula::implies(jtb_i_r(&r, phi), Formula::adequate(r))))
}

pub fn nil(cfg: &TheoryConfig, phi: &Formula) -> Result<Formula, JtbError> {
    nil_with(&fresh_binder(cfg, phi)?, phi)
}

/// `JTBⁱ(φ) ∧ NIL(φ)`
pub fn jtb_nil(cfg: &TheoryConfig, phi: &Formula) -> Result<Formula, JtbError> {
    Ok(Formula::and(jtb_i(cfg, phi)?, nil(cfg, phi)?))
}
