//! The bundled theorem library.

use std::collections::BTreeMap;

use super::{check_proof, proof_from_json, Proof, ProofError, Verdict};

const FIXTURES: &[(&str, &str)] = &[
    ("RC", include_str!("../../fixtures/rc.json")),
    ("IC", include_str!("../../fixtures/ic.json")),
    ("AIC", include_str!("../../fixtures/aic.json")),
    ("RCLC-1", include_str!("../../fixtures/rclc-1.json")),
    ("RCLC-2", include_str!("../../fixtures/rclc-2.json")),
    ("RCLC-3", include_str!("../../fixtures/rclc-3.json")),
    ("RCL2", include_str!("../../fixtures/rcl2.json")),
    ("B-iff-sigma", include_str!("../../fixtures/b-iff-sigma.json")),
    ("Distributivity", include_str!("../../fixtures/distributivity.json")),
    ("Distribution", include_str!("../../fixtures/distribution.json")),
    ("Renaming", include_str!("../../fixtures/renaming.json")),
    ("Equivalence", include_str!("../../fixtures/equivalence.json")),
    ("Quantifier-a", include_str!("../../fixtures/quantifier-a.json")),
    ("Quantifier-b", include_str!("../../fixtures/quantifier-b.json")),
];

/// The raw JSON of every bundled proof, in load order.
pub fn fixture_sources() -> &'static [(&'static str, &'static str)] {
    FIXTURES
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LibraryEntry {
    pub proof: Proof,
    pub verdict: Verdict,
}

/// Named theorems available to `Cite` steps.
#[derive(Debug, Clone, Default)]
pub struct Library {
    entries: BTreeMap<String, LibraryEntry>,
}

impl Library {
    pub fn from_entries(entries: BTreeMap<String, LibraryEntry>) -> Self {
        Library { entries }
    }

    pub fn get(&self, name: &str) -> Option<&LibraryEntry> {
        self.entries.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &LibraryEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks `proof` against this library and, when accepted, adds it.
    pub fn admit(&mut self, proof: Proof) -> Result<Verdict, ProofError> {
        let verdict = check_proof(&proof, self)?;
        if verdict.is_accepted() {
            self.entries.insert(
                proof.name.clone(),
                LibraryEntry {
                    proof,
                    verdict: verdict.clone(),
                },
            );
        }
        Ok(verdict)
    }
}

/// Loads and checks every bundled proof. Later fixtures may cite earlier
/// ones.
pub fn derived_library() -> Result<Library, ProofError> {
    let mut lib = Library::default();
    for (name, text) in FIXTURES {
        let corrupt = |reason: String| ProofError::FixtureCorrupt {
            name: name.to_string(),
            reason,
        };
        let proof = proof_from_json(text).map_err(|e| corrupt(e.to_string()))?;
        if proof.name != *name {
            return Err(corrupt(format!("file declares name `{}`", proof.name)));
        }
        match lib.admit(proof).map_err(|e| corrupt(e.to_string()))? {
            Verdict::Accepted => {}
            rejected => return Err(corrupt(rejected.to_string())),
        }
    }
    Ok(lib)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::print;
    use crate::proof::templates::*;
    use crate::proof::{proof_to_json, ProofBuilder};
    use crate::syntax::{Formula, ReasonTerm, Symbol};
    use crate::theory::{SchemeId, TheoryConfig, TheoryKind};

    fn cfg(kind: TheoryKind) -> TheoryConfig {
        TheoryConfig::new(kind, ["r", "s"], ["p", "q"]).unwrap()
    }

    fn single_axiom(c: &TheoryConfig, scheme: SchemeId, text: &str) -> Proof {
        let mut pb = ProofBuilder::new();
        pb.axiom(scheme, c.parse(text).unwrap());
        pb.finish("premise", c.clone())
    }

    // r:p & r <-> r:p & r & p, which is not a tautology
    fn adequacy_equivalence(c: &TheoryConfig) -> Proof {
        let mut pb = ProofBuilder::new();
        let a = pb.axiom(SchemeId::A, c.parse("r:p -> (r -> p)").unwrap());
        pb.combine(&[a], c.parse("r:p & r <-> r:p & r & p").unwrap());
        pb.finish("premise", c.clone())
    }

    /// The bundled proofs, regenerated from the templates.
    fn expected() -> Vec<(&'static str, Proof)> {
        let rbb = cfg(TheoryKind::Rbb);
        let q = cfg(TheoryKind::Qrbb);
        let f = |c: &TheoryConfig, t: &str| c.parse(t).unwrap();
        let (r, s) = (ReasonTerm::basic("r"), ReasonTerm::basic("s"));
        let (vr, vs) = (Symbol::new("r"), Symbol::new("s"));
        let p = Formula::letter("p");
        vec![
            ("rc", reason_consistency(&rbb, &r, &s, &p)),
            ("ic", internal_consistency(&rbb, &r, &p)),
            ("aic", adequate_internal_consistency(&rbb, &r, &p)),
            (
                "rclc-1",
                closure_under_consequence("RCLC-1", &single_axiom(&rbb, SchemeId::Cl, "p -> p | q"), &r).unwrap(),
            ),
            (
                "rclc-2",
                closure_under_consequence("RCLC-2", &single_axiom(&rbb, SchemeId::Cl, "p & q -> p"), &r).unwrap(),
            ),
            (
                "rclc-3",
                closure_under_consequence("RCLC-3", &single_axiom(&rbb, SchemeId::D, "B p -> ~B ~p"), &s).unwrap(),
            ),
            (
                "rcl2",
                master_closure(&cfg(TheoryKind::RbbSigma), &r, &s, &p, &Formula::letter("q")),
            ),
            ("b-iff-sigma", belief_is_master_support(&cfg(TheoryKind::RbbSigmaPlus), &p)),
            ("distributivity", distributivity(&q, &vr, &f(&q, "r:p"), &f(&q, "B r"))),
            (
                "distribution",
                distribution_rule("Distribution", &single_axiom(&q, SchemeId::Rb, "r:p -> (B r -> B p)"), &vr).unwrap(),
            ),
            ("renaming", renaming(&q, &vr, &vs, &f(&q, "r:p & B r")).unwrap()),
            (
                "equivalence",
                equivalence_rule("Equivalence", &adequacy_equivalence(&q), &vr).unwrap(),
            ),
            ("quantifier-a", quantifier_a(&q, &vr, &f(&q, "r:p"), &f(&q, "B q")).unwrap()),
            ("quantifier-b", quantifier_b(&q, &vr, &f(&q, "r:p"), &f(&q, "B q")).unwrap()),
        ]
    }

    /// Set RBB_BLESS_FIXTURES=1 to rewrite the fixture files from the
    /// templates instead of comparing.
    #[test]
    fn fixtures_match_templates() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        let bless = std::env::var_os("RBB_BLESS_FIXTURES").is_some();
        let expected = expected();
        assert_eq!(expected.len(), FIXTURES.len());
        for ((file, proof), (name, text)) in expected.iter().zip(FIXTURES) {
            assert_eq!(proof.name, *name);
            let json = proof_to_json(proof);
            if bless {
                std::fs::write(dir.join(format!("{file}.json")), &json).unwrap();
            } else {
                assert_eq!(&json, text, "{file}.json is stale");
            }
        }
    }

    #[test]
    fn library_loads() {
        let lib = derived_library().unwrap();
        assert_eq!(lib.len(), FIXTURES.len());
        for (_, entry) in lib.iter() {
            assert!(entry.verdict.is_accepted());
        }
        assert!(lib.get("NoSuch").is_none());
    }

    #[test]
    fn every_single_step_mutant_is_rejected() {
        let lib = derived_library().unwrap();
        let empty = crate::proof::empty_library();
        let mut survivors = Vec::new();
        for (name, entry) in lib.iter() {
            for (label, m) in crate::proof::single_step_mutants(&entry.proof) {
                if check_proof(&m, &empty).unwrap().is_accepted() {
                    survivors.push(format!("{name} {label}"));
                }
            }
        }
        assert!(survivors.is_empty(), "{survivors:#?}");
    }

    #[test]
    fn named_goals() {
        let lib = derived_library().unwrap();
        let goal = |n: &str| print(&lib.get(n).unwrap().proof.goal);
        assert_eq!(goal("RC"), "B r & B s -> r:p -> ~s:~p");
        assert_eq!(goal("RCL2"), "B s & B r & s:(p -> q) & r:p -> B q");
        assert_eq!(goal("B-iff-sigma"), "B p <-> sigma:p");
        assert_eq!(goal("Distributivity"), "(A r. r:p -> B r) -> (A r. r:p) -> A r. B r");
        assert_eq!(lib.get("RCL2").unwrap().proof.theory.kind(), TheoryKind::RbbSigma);
    }

    #[test]
    fn citations() {
        let lib = derived_library().unwrap();
        let c = cfg(TheoryKind::RbbSigma);
        let mut pb = ProofBuilder::new();
        let rc = pb.push(lib.get("RC").unwrap().proof.goal.clone(), crate::proof::Justification::Cite("RC".into()));
        pb.rn(rc, ReasonTerm::Sigma);
        let pf = pb.finish("cited", c.clone());
        assert!(check_proof(&pf, &lib).unwrap().is_accepted());

        // a σ theorem cannot be cited from the base theory
        let mut pb = ProofBuilder::new();
        pb.push(lib.get("RCL2").unwrap().proof.goal.clone(), crate::proof::Justification::Cite("RCL2".into()));
        let pf = pb.finish("down", cfg(TheoryKind::Rbb));
        assert!(matches!(check_proof(&pf, &lib), Err(ProofError::TheoryMismatch { .. })));

        let mut pb = ProofBuilder::new();
        pb.push(Formula::letter("p"), crate::proof::Justification::Cite("Nope".into()));
        let pf = pb.finish("missing", c);
        assert!(matches!(check_proof(&pf, &lib), Err(ProofError::UnknownCitation { .. })));
    }
}
