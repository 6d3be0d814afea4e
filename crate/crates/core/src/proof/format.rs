//! JSON proof files.
//!
//! ```json
//! {"name": "IC", "theory": {"theory": "RBB", "reasons": ["r"], "letters": ["p"]},
//!  "goal": "B r -> (r:p -> ~r:~p)",
//!  "steps": [{"i": 1, "f": "r:p -> (B r -> B p)", "by": {"axiom": "RB"}}, ...]}
//! ```

use serde::{Deserialize, Serialize};

use super::{Justification, Proof, ProofError, ProofStep};
use crate::parser::{parse_reason, print};
use crate::syntax::{ReasonTerm, Symbol};
use crate::theory::{SchemeId, TheoryConfig};

#[derive(Serialize, Deserialize)]
struct ProofDoc {
    name: String,
    theory: serde_json::Value,
    goal: String,
    steps: Vec<StepDoc>,
}

#[derive(Serialize, Deserialize)]
struct StepDoc {
    i: usize,
    f: String,
    by: ByDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ByDoc {
    Axiom(String),
    Mp(usize, usize),
    Rn(usize, String),
    E(usize),
    Gen(usize, String),
    Cite(String),
}

pub fn proof_from_json(text: &str) -> Result<Proof, ProofError> {
    let doc: ProofDoc = serde_json::from_str(text)?;
    let theory = TheoryConfig::from_value(&doc.theory)?;
    let parse = |location: String, text: &str| {
        theory
            .parse(text)
            .map_err(|source| ProofError::Parse { location, source })
    };
    let goal = parse("goal".into(), &doc.goal)?;
    let mut steps = Vec::with_capacity(doc.steps.len());
    for s in doc.steps {
        let formula = parse(format!("step {}", s.i), &s.f)?;
        let justification = match s.by {
            ByDoc::Axiom(name) => Justification::Axiom(name.parse::<SchemeId>()?),
            ByDoc::Mp(i, j) => Justification::Mp(i, j),
            ByDoc::Rn(i, r) => {
                let term = parse_reason(&r).map_err(|source| ProofError::Parse {
                    location: format!("step {} reason", s.i),
                    source,
                })?;
                Justification::Rn(i, term)
            }
            ByDoc::E(i) => Justification::E(i),
            ByDoc::Gen(i, v) => Justification::Gen(i, Symbol::new(&v)),
            ByDoc::Cite(name) => Justification::Cite(name),
        };
        steps.push(ProofStep {
            index: s.i,
            formula,
            justification,
        });
    }
    Ok(Proof {
        theory,
        name: doc.name,
        goal,
        steps,
    })
}

pub fn proof_to_json(pf: &Proof) -> String {
    let steps = pf
        .steps
        .iter()
        .map(|s| StepDoc {
            i: s.index,
            f: print(&s.formula),
            by: match &s.justification {
                Justification::Axiom(id) => ByDoc::Axiom(id.name().to_string()),
                Justification::Mp(i, j) => ByDoc::Mp(*i, *j),
                Justification::Rn(i, r) => ByDoc::Rn(*i, reason_text(r)),
                Justification::E(i) => ByDoc::E(*i),
                Justification::Gen(i, v) => ByDoc::Gen(*i, v.to_string()),
                Justification::Cite(name) => ByDoc::Cite(name.clone()),
            },
        })
        .collect();
    let doc = ProofDoc {
        name: pf.name.clone(),
        theory: pf.theory.to_json_value(),
        goal: print(&pf.goal),
        steps,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("proof serializes");
    text.push('\n');
    text
}

fn reason_text(r: &ReasonTerm) -> String {
    crate::parser::print_reason(r, crate::parser::Notation::Ascii)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::{check_proof, empty_library, Verdict};

    const CLOSURE: &str = r#"{
        "name": "closure",
        "theory": {"theory": "RBB", "reasons": ["r"], "letters": ["p", "q"]},
        "goal": "r:p -> r:(p | q)",
        "steps": [
            {"i": 1, "f": "p -> p | q", "by": {"axiom": "CL"}},
            {"i": 2, "f": "r:(p -> p | q)", "by": {"rn": [1, "r"]}},
            {"i": 3, "f": "r:(p -> p | q) -> (r:p -> r:(p | q))", "by": {"axiom": "RK"}},
            {"i": 4, "f": "r:p -> r:(p | q)", "by": {"mp": [2, 3]}}
        ]
    }"#;

    #[test]
    fn reads_and_checks() {
        let pf = proof_from_json(CLOSURE).unwrap();
        assert_eq!(pf.steps.len(), 4);
        assert_eq!(check_proof(&pf, &empty_library()).unwrap(), Verdict::Accepted);
    }

    #[test]
    fn round_trips() {
        let pf = proof_from_json(CLOSURE).unwrap();
        let text = proof_to_json(&pf);
        assert_eq!(proof_from_json(&text).unwrap(), pf);
        assert_eq!(proof_to_json(&proof_from_json(&text).unwrap()), text);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(proof_from_json("{"), Err(ProofError::Json(_))));
        let bad_formula = CLOSURE.replace("\"p -> p | q\"", "\"p -> \"");
        assert!(matches!(proof_from_json(&bad_formula), Err(ProofError::Parse { .. })));
        let bad_scheme = CLOSURE.replace("\"RK\"", "\"K4\"");
        assert!(matches!(proof_from_json(&bad_scheme), Err(ProofError::Theory(_))));
    }
}
