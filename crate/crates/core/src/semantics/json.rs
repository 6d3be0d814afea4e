//! Model files.
//!
//! ```json
//! {"worlds": ["w", "v"],
//!  "access": {"r": [["w", "v"]], "sigma": []},
//!  "neighborhoods": {"w": [["v"], ["w", "v"]]},
//!  "valuation": {"v": ["p"]},
//!  "point": "w"}
//! ```
//!
//! Output lists worlds in declaration order and families in [`WorldSet`]
//! order, so serialization is byte-stable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Model, SemanticsError, WorldSet};
use crate::parser::parse_reason;
use crate::syntax::{ReasonTerm, Symbol};

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    worlds: Vec<String>,
    #[serde(default)]
    access: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    neighborhoods: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    point: Option<String>,
}

pub fn model_from_json(text: &str) -> Result<Model, SemanticsError> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| SemanticsError::Malformed(e.to_string()))?;
    let mut m = Model::new(doc.worlds)?;
    for (name, pairs) in &doc.access {
        let r = parse_reason(name).map_err(|e| SemanticsError::Malformed(format!("reason `{name}`: {e}")))?;
        m.declare_reason(r.clone())?;
        for (a, b) in pairs {
            let (a, b) = (m.world(a)?, m.world(b)?);
            m.add_access(&r, a, b)?;
        }
    }
    for (w, family) in &doc.neighborhoods {
        let w = m.world(w)?;
        for set in family {
            let x = set.iter().map(|v| m.world(v)).collect::<Result<WorldSet, _>>()?;
            m.add_neighborhood(w, x)?;
        }
    }
    for (w, letters) in &doc.valuation {
        let w = m.world(w)?;
        for p in letters {
            m.set_letter(w, Symbol::new(p), true)?;
        }
    }
    if let Some(p) = &doc.point {
        let p = m.world(p)?;
        m.set_point(p)?;
    }
    Ok(m)
}

fn to_doc(m: &Model) -> ModelDoc {
    let access = m
        .access
        .iter()
        .map(|(r, succ)| {
            let pairs = (0..m.len())
                .flat_map(|w| succ[w].iter().map(move |v| (w, v)))
                .map(|(w, v)| (m.world_name(w).to_string(), m.world_name(v).to_string()))
                .collect();
            (reason_key(r), pairs)
        })
        .collect();
    let neighborhoods = (0..m.len())
        .filter(|&w| !m.neighborhoods[w].is_empty())
        .map(|w| {
            let family = m.neighborhoods[w].iter().map(|x| m.names_of(*x)).collect();
            (m.world_name(w).to_string(), family)
        })
        .collect();
    let valuation = (0..m.len())
        .filter(|&w| !m.valuation[w].is_empty())
        .map(|w| {
            let letters = m.valuation[w].iter().map(|p| p.to_string()).collect();
            (m.world_name(w).to_string(), letters)
        })
        .collect();
    ModelDoc {
        worlds: m.worlds.clone(),
        access,
        neighborhoods,
        valuation,
        point: m.point.map(|p| m.world_name(p).to_string()),
    }
}

fn reason_key(r: &ReasonTerm) -> String {
    match r {
        ReasonTerm::Sigma => "sigma".to_string(),
        other => other.to_string(),
    }
}

pub fn model_to_value(m: &Model) -> serde_json::Value {
    serde_json::to_value(to_doc(m)).expect("model serializes")
}

pub fn model_to_json(m: &Model) -> String {
    serde_json::to_string_pretty(&to_doc(m)).expect("model serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "worlds": ["w", "c", "x"],
        "access": {"r": [["w","c"],["w","x"],["c","c"],["x","x"]], "s": [["w","w"],["w","c"],["c","c"]]},
        "neighborhoods": {"w": [["c","x"],["w","c","x"],["w","c"]]},
        "valuation": {"c": ["p","q"], "x": ["p"]},
        "point": "w"
    }"#;

    #[test]
    fn reads_and_round_trips() {
        let m = model_from_json(DOC).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.point(), Some(0));
        assert_eq!(m.successors(&ReasonTerm::basic("r"), 0).unwrap(), [1, 2].into_iter().collect());
        let text = model_to_json(&m);
        let back = model_from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(model_to_json(&back), text);
    }

    #[test]
    fn unknown_world_is_reported() {
        let bad = DOC.replace("[\"c\",\"x\"],", "[\"c\",\"z\"],");
        assert_eq!(model_from_json(&bad), Err(SemanticsError::UnknownWorld("z".into())));
    }
}
