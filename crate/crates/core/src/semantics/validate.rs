//! Frame properties.

use std::fmt;

use serde::Serialize;

use super::{Model, SemanticsError, WorldSet};
use crate::syntax::{ReasonTerm, Symbol};
use crate::theory::TheoryConfig;

/// Validation quantifies over all subsets of W, so it is capped.
pub const MAX_VALIDATED_WORLDS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Property {
    #[serde(rename = "pr")]
    Pr,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "rb")]
    Rb,
    #[serde(rename = "rc")]
    Rc,
    #[serde(rename = "ma")]
    Ma,
    #[serde(rename = "mb")]
    Mb,
    #[serde(rename = "mr")]
    Mr,
    #[serde(rename = "mt")]
    Mt,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Property::Pr => "pr",
            Property::D => "d",
            Property::Rb => "rb",
            Property::Rc => "rc",
            Property::Ma => "ma",
            Property::Mb => "mb",
            Property::Mr => "mr",
            Property::Mt => "mt",
        };
        write!(f, "({name})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub property: Property,
    pub world: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reasons: Vec<String>,
    /// Witness sets, each listed in world order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sets: Vec<Vec<String>>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.property, self.world, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub violations: Vec<Violation>,
}

impl PropertyReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, property: Property) -> bool {
        self.violations.iter().any(|v| v.property == property)
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

struct Reporter<'a> {
    model: &'a Model,
    out: Vec<Violation>,
}

impl Reporter<'_> {
    fn push(&mut self, property: Property, w: usize, reasons: &[&ReasonTerm], sets: &[WorldSet], detail: String) {
        self.out.push(Violation {
            property,
            world: self.model.world_name(w).to_string(),
            reasons: reasons.iter().map(|r| r.to_string()).collect(),
            sets: sets.iter().map(|x| self.model.names_of(*x)).collect(),
            detail,
        });
    }
}

fn relation(m: &Model, r: &ReasonTerm) -> Vec<WorldSet> {
    m.access
        .get(r)
        .cloned()
        .unwrap_or_else(|| vec![WorldSet::EMPTY; m.len()])
}

/// Supersets of `base` within `all`, smallest first.
fn supersets(base: WorldSet, all: WorldSet) -> impl Iterator<Item = WorldSet> {
    let free = all.0 & !base.0;
    let mut subs: Vec<WorldSet> = Vec::new();
    let mut sub = free;
    loop {
        subs.push(WorldSet(base.0 | sub));
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    subs.sort();
    subs.into_iter()
}

/// Checks the frame properties required by `cfg`'s theory class. Each
/// failure is reported once per (property, world, reason) with the
/// smallest witness set.
pub fn validate_model(m: &Model, cfg: &TheoryConfig) -> Result<PropertyReport, SemanticsError> {
    if m.len() > MAX_VALIDATED_WORLDS {
        return Err(SemanticsError::ModelTooLarge {
            worlds: m.len(),
            limit: MAX_VALIDATED_WORLDS,
        });
    }
    for r in m.access.keys() {
        if !r.is_atomic() {
            return Err(SemanticsError::AppSemanticsUndefined(r.to_string()));
        }
    }
    let n = m.len();
    let all = m.all();
    let flags = cfg.flags();
    let reasons = cfg.atomic_reasons();
    let rels: Vec<(ReasonTerm, Vec<WorldSet>)> = reasons.iter().map(|r| (r.clone(), relation(m, r))).collect();
    let refl = |succ: &[WorldSet]| -> WorldSet { (0..n).filter(|&w| succ[w].contains(w)).collect() };
    let sigma = ReasonTerm::Sigma;
    let sigma_rel = relation(m, &sigma);
    let mut rep = Reporter { model: m, out: Vec::new() };

    for w in 0..n {
        let nw = &m.neighborhoods[w];

        if cfg.allow_overlap() {
            let shared: Vec<&Symbol> = cfg.letters().intersection(cfg.basic_reasons()).collect();
            for x in shared {
                let term = ReasonTerm::Basic(x.clone());
                let in_v = m.valuation[w].contains(x);
                let reflexive = relation(m, &term)[w].contains(w);
                if in_v != reflexive {
                    rep.push(
                        Property::Pr,
                        w,
                        &[&term],
                        &[],
                        format!("{x} is {} but {x}-reflexivity is {reflexive}", if in_v { "true" } else { "false" }),
                    );
                }
            }
        }

        if let Some(x) = nw.iter().find(|x| nw.contains(&x.complement(n))) {
            rep.push(
                Property::D,
                w,
                &[],
                &[*x, x.complement(n)],
                format!("both {} and its complement are believed", m.format_set(*x)),
            );
        }

        for (r, succ) in &rels {
            let r_circ = refl(succ);
            if !nw.contains(&r_circ) {
                continue;
            }
            if let Some(x) = supersets(succ[w], all).find(|x| !nw.contains(x)) {
                rep.push(
                    Property::Rb,
                    w,
                    &[r],
                    &[succ[w], x],
                    format!(
                        "{r}° is believed and {} contains {r}({}) but is not believed",
                        m.format_set(x),
                        m.world_name(w)
                    ),
                );
            }
        }

        if flags.sigma {
            let sigma_w = sigma_rel[w];
            if sigma_w.contains(w) {
                for (r, succ) in &rels {
                    if nw.contains(&refl(succ)) && !succ[w].contains(w) {
                        rep.push(
                            Property::Ma,
                            w,
                            &[&sigma, r],
                            &[],
                            format!("sigma is adequate and {r} accepted, but {r} is not adequate"),
                        );
                    }
                }
            }
            if !nw.contains(&refl(&sigma_rel)) {
                rep.push(
                    Property::Mb,
                    w,
                    &[&sigma],
                    &[refl(&sigma_rel)],
                    "sigma° is not believed".into(),
                );
            }
            for (r, succ) in &rels {
                // the smallest X with r(w) ⊆ X is r(w) itself
                if nw.contains(&refl(succ)) && !sigma_w.is_subset(succ[w]) {
                    rep.push(
                        Property::Mr,
                        w,
                        &[r],
                        &[succ[w]],
                        format!("{r} is accepted but sigma({0}) is not inside {r}({0})", m.world_name(w)),
                    );
                }
            }
            if flags.sigma_plus {
                if let Some(x) = nw.iter().find(|x| !sigma_w.is_subset(**x)) {
                    rep.push(
                        Property::Mt,
                        w,
                        &[&sigma],
                        &[*x],
                        format!("{} is believed but does not contain sigma({})", m.format_set(*x), m.world_name(w)),
                    );
                }
            }
        }
    }
    Ok(PropertyReport { violations: rep.out })
}

/// Reports every world where two accepted reasons (possibly the same one)
/// have disjoint successor sets.
pub fn check_rc(m: &Model) -> PropertyReport {
    let n = m.len();
    let rels: Vec<(&ReasonTerm, &Vec<WorldSet>)> = m.access.iter().collect();
    let mut rep = Reporter { model: m, out: Vec::new() };
    for w in 0..n {
        let accepted: Vec<&(&ReasonTerm, &Vec<WorldSet>)> = rels
            .iter()
            .filter(|(_, succ)| {
                let circ: WorldSet = (0..n).filter(|&v| succ[v].contains(v)).collect();
                m.neighborhoods[w].contains(&circ)
            })
            .collect();
        for (i, (r, rs)) in accepted.iter().enumerate() {
            for (s, ss) in &accepted[i..] {
                if rs[w].intersection(ss[w]).is_empty() {
                    rep.push(
                        Property::Rc,
                        w,
                        &[r, s],
                        &[rs[w], ss[w]],
                        format!("{r} and {s} are accepted but {r}({0}) and {s}({0}) are disjoint", m.world_name(w)),
                    );
                }
            }
        }
    }
    PropertyReport { violations: rep.out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::TheoryKind;

    fn rbb() -> TheoryConfig {
        TheoryConfig::new(TheoryKind::Rbb, ["r", "s"], ["p"]).unwrap()
    }

    #[test]
    fn complement_pair_violates_d() {
        let mut m = Model::new(["w"]).unwrap();
        m.add_neighborhood(0, WorldSet::singleton(0)).unwrap();
        m.add_neighborhood(0, WorldSet::EMPTY).unwrap();
        let report = validate_model(&m, &rbb()).unwrap();
        assert!(report.has(Property::D));
        assert_eq!(report.violations[0].sets[0], Vec::<String>::new());
    }

    #[test]
    fn shared_letter_reason_needs_agreement() {
        let c = TheoryConfig::with_overlap(TheoryKind::Rbb, ["x"], ["x"]).unwrap();
        let mut m = Model::new(["w"]).unwrap();
        m.set_letter(0, Symbol::new("x"), true).unwrap();
        assert!(validate_model(&m, &c).unwrap().has(Property::Pr));
        m.add_access(&ReasonTerm::basic("x"), 0, 0).unwrap();
        assert!(validate_model(&m, &c).unwrap().is_empty());
    }

    #[test]
    fn rb_requires_upward_closure() {
        let r = ReasonTerm::basic("r");
        let mut m = Model::new(["w", "v"]).unwrap();
        m.add_access(&r, 0, 0).unwrap();
        m.add_neighborhood(0, WorldSet::singleton(0)).unwrap();
        let report = validate_model(&m, &rbb()).unwrap();
        assert!(report.has(Property::Rb));
        m.add_neighborhood(0, WorldSet::full(2)).unwrap();
        assert!(validate_model(&m, &rbb()).unwrap().is_empty());
    }

    #[test]
    fn disjoint_accepted_reasons() {
        let (r, s) = (ReasonTerm::basic("r"), ReasonTerm::basic("s"));
        let mut m = Model::new(["w", "v"]).unwrap();
        m.add_access(&r, 0, 0).unwrap();
        m.add_access(&s, 0, 1).unwrap();
        m.add_access(&s, 1, 1).unwrap();
        m.add_neighborhood(0, WorldSet::singleton(0)).unwrap();
        m.add_neighborhood(0, WorldSet::singleton(1)).unwrap();
        let rc = check_rc(&m);
        assert!(rc.has(Property::Rc));
        let report = validate_model(&m, &rbb()).unwrap();
        assert!(report.has(Property::D) || report.has(Property::Rb));
    }

    #[test]
    fn no_beliefs_no_rc() {
        let r = ReasonTerm::basic("r");
        let mut m = Model::new(["w", "v"]).unwrap();
        m.declare_reason(r).unwrap();
        assert!(check_rc(&m).is_empty());
        assert!(validate_model(&m, &rbb()).unwrap().is_empty());
    }

    #[test]
    fn master_reason_properties() {
        let c = TheoryConfig::new(TheoryKind::RbbSigmaPlus, ["r"], ["p"]).unwrap();
        let m = Model::new(["w"]).unwrap();
        let report = validate_model(&m, &c).unwrap();
        // sigma° = ∅ must be believed
        assert!(report.has(Property::Mb));
        let mut m = Model::new(["w"]).unwrap();
        m.add_access(&ReasonTerm::Sigma, 0, 0).unwrap();
        m.add_neighborhood(0, WorldSet::singleton(0)).unwrap();
        assert!(validate_model(&m, &c).unwrap().is_empty());
        // r° = ∅ believed would break (d) via (rb); instead believe a set missing sigma(w)
        m.add_neighborhood(0, WorldSet::EMPTY).unwrap();
        let report = validate_model(&m, &c).unwrap();
        assert!(report.has(Property::Mt) && report.has(Property::D));
    }

    #[test]
    fn refuses_large_models() {
        let m = Model::with_size(17).unwrap();
        assert!(matches!(validate_model(&m, &rbb()), Err(SemanticsError::ModelTooLarge { .. })));
    }
}
