//! The satisfaction relation, computed as extensions.

use super::{Model, SemanticsError, WorldSet};
use crate::syntax::{Formula, ReasonTerm};
use crate::theory::TheoryConfig;

/// Evaluates formulas of one theory in one model.
///
/// Reasons declared by the theory but absent from the model have the empty
/// relation. The quantifier ranges over the theory's atomic reasons.
pub struct Evaluator<'a> {
    model: &'a Model,
    domain: Vec<ReasonTerm>,
    empty: Vec<WorldSet>,
}

impl<'a> Evaluator<'a> {
    pub fn new(model: &'a Model, cfg: &TheoryConfig) -> Self {
        Evaluator {
            model,
            domain: cfg.atomic_reasons(),
            empty: vec![WorldSet::EMPTY; model.len()],
        }
    }

    fn relation(&self, r: &ReasonTerm) -> Result<&[WorldSet], SemanticsError> {
        if let Some(succ) = self.model.access.get(r) {
            return Ok(succ);
        }
        match r {
            ReasonTerm::App(..) => Err(SemanticsError::AppSemanticsUndefined(r.to_string())),
            _ if self.domain.contains(r) => Ok(&self.empty),
            _ => Err(SemanticsError::UnknownReason(r.to_string())),
        }
    }

    /// `⟦φ⟧`, the set of worlds where `φ` holds.
    pub fn extension(&self, f: &Formula) -> Result<WorldSet, SemanticsError> {
        let m = self.model;
        let n = m.len();
        Ok(match f {
            Formula::Letter(p) => (0..n).filter(|&w| m.valuation[w].contains(p)).collect(),
            Formula::Not(a) => self.extension(a)?.complement(n),
            Formula::Or(a, b) => self.extension(a)?.union(self.extension(b)?),
            Formula::Supports(r, a) => {
                let succ = self.relation(r)?;
                let ext = self.extension(a)?;
                (0..n).filter(|&w| succ[w].is_subset(ext)).collect()
            }
            Formula::Adequate(r) => {
                let succ = self.relation(r)?;
                (0..n).filter(|&w| succ[w].contains(w)).collect()
            }
            Formula::Believes(a) => {
                let ext = self.extension(a)?;
                (0..n).filter(|&w| m.neighborhoods[w].contains(&ext)).collect()
            }
            Formula::Eq(a, b) => {
                if a.has_app() || b.has_app() {
                    return Err(SemanticsError::AppSemanticsUndefined(f.to_string()));
                }
                if a == b {
                    m.all()
                } else {
                    WorldSet::EMPTY
                }
            }
            Formula::ForAll(v, body) => {
                if !body.is_free(v) {
                    return self.extension(body);
                }
                let mut acc = m.all();
                for s in &self.domain {
                    if body.is_free_for(s, v) {
                        acc = acc.intersection(self.extension(&body.substitute_unchecked(v, s))?);
                    }
                }
                acc
            }
        })
    }

    pub fn satisfies(&self, w: usize, f: &Formula) -> Result<bool, SemanticsError> {
        self.model.check_world(w)?;
        Ok(self.extension(f)?.contains(w))
    }
}

/// `⟦φ⟧_M` under the theory `cfg`.
pub fn extension(m: &Model, f: &Formula, cfg: &TheoryConfig) -> Result<WorldSet, SemanticsError> {
    Evaluator::new(m, cfg).extension(f)
}

/// `M, w ⊨ φ` under the theory `cfg`.
pub fn satisfies(m: &Model, w: usize, f: &Formula, cfg: &TheoryConfig) -> Result<bool, SemanticsError> {
    Evaluator::new(m, cfg).satisfies(w, f)
}
