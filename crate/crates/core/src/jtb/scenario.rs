//! Named scenarios, scenario files and epistemic-status reports.
//!
//! ```json
//! {"name": "G2",
//!  "theory": {"theory": "QRBB", "reasons": ["r"], "letters": ["p", "q"]},
//!  "assumptions": ["r:p & B r & (~p & q)"],
//!  "queries": [["jtb_i_r(r, p | q)", "r:(p | q) & B r & (p | q)"]]}
//! ```

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{jtb_e, jtb_e_r, jtb_i_r, jtb_nil, JtbError};
use crate::parser::print;
use crate::search::{check_nonvalidity, find_models, Completion, SearchBounds, SearchOutcome};
use crate::semantics::{model_to_value, satisfies, Model};
use crate::syntax::{Formula, ReasonTerm};
use crate::theory::{TheoryConfig, TheoryKind};

pub const DEFAULT_WITNESS_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub theory: TheoryConfig,
    pub assumptions: Vec<Formula>,
    pub queries: Vec<(String, Formula)>,
}

impl Scenario {
    pub fn new(
        name: &str,
        theory: TheoryConfig,
        assumptions: Vec<Formula>,
        queries: Vec<(String, Formula)>,
    ) -> Result<Self, JtbError> {
        for f in assumptions.iter().chain(queries.iter().map(|(_, f)| f)) {
            theory.check_formula(f)?;
        }
        Ok(Scenario {
            name: name.to_string(),
            theory,
            assumptions,
            queries,
        })
    }
}

const NAMES: [&str; 10] = [
    "G2",
    "G2prime",
    "Barn",
    "BarnPrime",
    "BarnAdequate",
    "BarnInadequate",
    "TDTD",
    "TDTD+NoR",
    "noRCL",
    "MixedMersenne",
];

pub fn scenario_names() -> &'static [&'static str] {
    &NAMES
}

const TDTD: [&str; 8] = ["s:(p | q)", "~s:p", "~s:q", "r:p", "B s", "B r", "s", "~p & q"];
const NOR: &str = "A t. t != s & t != r -> ~B t";

pub fn scenario(name: &str) -> Result<Scenario, JtbError> {
    let (reasons, letters): (&[&str], &[&str]) = match name {
        "G2" | "G2prime" => (&["r"], &["p", "q"]),
        "Barn" | "BarnPrime" | "BarnAdequate" | "BarnInadequate" => (&["r"], &["p"]),
        "TDTD" | "noRCL" => (&["r", "s"], &["p", "q"]),
        "TDTD+NoR" => (&["r", "s", "t0"], &["p", "q"]),
        "MixedMersenne" => (&["r", "s"], &["m"]),
        other => return Err(JtbError::UnknownScenario(other.to_string())),
    };
    let cfg = TheoryConfig::new(TheoryKind::Qrbb, reasons, letters)?;
    let parse = |text: &str| {
        cfg.parse(text).map_err(|source| JtbError::Parse {
            location: format!("scenario {name}"),
            source,
        })
    };
    let r = ReasonTerm::basic("r");
    let s = ReasonTerm::basic("s");
    let (assumptions, queries): (Vec<&str>, Vec<(String, Formula)>) = match name {
        "G2" => {
            let pq = parse("p | q")?;
            (
                vec!["r:p & B r & (~p & q)"],
                vec![
                    ("jtb_i_r(r, p | q)".into(), jtb_i_r(&r, &pq)),
                    ("jtb_e_r(r, p | q)".into(), jtb_e_r(&r, &pq)),
                    ("B (p | q)".into(), parse("B (p | q)")?),
                    ("r".into(), parse("r")?),
                ],
            )
        }
        "G2prime" => {
            let pq = parse("p | q")?;
            (
                vec!["r:p & B r & r"],
                vec![
                    ("jtb_e_r(r, p | q)".into(), jtb_e_r(&r, &pq)),
                    ("p | q".into(), pq.clone()),
                    ("B (p | q)".into(), parse("B (p | q)")?),
                ],
            )
        }
        "Barn" | "BarnAdequate" | "BarnInadequate" | "BarnPrime" => {
            let p = parse("p")?;
            let base = match name {
                "BarnPrime" => vec!["r:p & B r & ~p"],
                "BarnAdequate" => vec!["r:p & B r & p", "r"],
                "BarnInadequate" => vec!["r:p & B r & p", "~r"],
                _ => vec!["r:p & B r & p"],
            };
            (
                base,
                vec![
                    ("jtb_i_r(r, p)".into(), jtb_i_r(&r, &p)),
                    ("jtb_e_r(r, p)".into(), jtb_e_r(&r, &p)),
                    ("r".into(), parse("r")?),
                ],
            )
        }
        "TDTD" | "TDTD+NoR" => {
            let pq = parse("p | q")?;
            let mut base = TDTD.to_vec();
            let mut queries = vec![
                ("jtb_e_r(s, p | q)".into(), jtb_e_r(&s, &pq)),
                ("jtb_i_r(r, p | q)".into(), jtb_i_r(&r, &pq)),
                ("jtb_e_r(r, p | q)".into(), jtb_e_r(&r, &pq)),
                ("jtb_e(p | q)".into(), jtb_e(&cfg, &pq)?),
                ("jtb_nil(p | q)".into(), jtb_nil(&cfg, &pq)?),
            ];
            if name == "TDTD+NoR" {
                base.push(NOR);
            } else {
                queries.truncate(4);
            }
            (base, queries)
        }
        "noRCL" => (
            vec!["B s", "B r", "s:(p -> q)", "r:p", "~B q"],
            vec![
                ("B p".into(), parse("B p")?),
                ("B (p -> q)".into(), parse("B (p -> q)")?),
                ("B q".into(), parse("B q")?),
            ],
        ),
        _ => {
            let m = parse("m")?;
            (
                vec!["s:m", "r:m", "B s", "B r", "s", "~r"],
                vec![
                    ("jtb_e_r(s, m)".into(), jtb_e_r(&s, &m)),
                    ("jtb_e_r(r, m)".into(), jtb_e_r(&r, &m)),
                    ("jtb_i_r(r, m)".into(), jtb_i_r(&r, &m)),
                    ("jtb_e(m)".into(), jtb_e(&cfg, &m)?),
                ],
            )
        }
    };
    let assumptions = assumptions.into_iter().map(parse).collect::<Result<Vec<_>, _>>()?;
    Scenario::new(name, cfg, assumptions, queries)
}

#[derive(Serialize, Deserialize)]
struct ScenarioDoc {
    name: String,
    theory: serde_json::Value,
    assumptions: Vec<String>,
    #[serde(default)]
    queries: Vec<(String, String)>,
}

pub fn scenario_from_json(text: &str) -> Result<Scenario, JtbError> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| JtbError::Malformed(e.to_string()))?;
    let cfg = TheoryConfig::from_value(&doc.theory)?;
    let parse = |location: String, text: &str| cfg.parse(text).map_err(|source| JtbError::Parse { location, source });
    let assumptions = doc
        .assumptions
        .iter()
        .enumerate()
        .map(|(i, t)| parse(format!("assumption {}", i + 1), t))
        .collect::<Result<Vec<_>, _>>()?;
    let queries = doc
        .queries
        .iter()
        .map(|(label, t)| Ok((label.clone(), parse(format!("query `{label}`"), t)?)))
        .collect::<Result<Vec<_>, JtbError>>()?;
    Scenario::new(&doc.name, cfg, assumptions, queries)
}

pub fn scenario_to_json(sc: &Scenario) -> String {
    let doc = ScenarioDoc {
        name: sc.name.clone(),
        theory: sc.theory.to_json_value(),
        assumptions: sc.assumptions.iter().map(print).collect(),
        queries: sc.queries.iter().map(|(l, f)| (l.clone(), print(f))).collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("scenario serializes");
    out.push('\n');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchVerdict {
    Witness,
    Exhausted,
    BudgetExceeded,
}

impl SearchVerdict {
    fn label(self) -> &'static str {
        match self {
            SearchVerdict::Witness => "witness",
            SearchVerdict::Exhausted => "exhausted",
            SearchVerdict::BudgetExceeded => "budget-exceeded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryStatus {
    HoldsInAllFoundWitnesses,
    FailsInSomeWitness,
    Inconclusive,
}

impl QueryStatus {
    fn label(self) -> &'static str {
        match self {
            QueryStatus::HoldsInAllFoundWitnesses => "holds-in-all-found-witnesses",
            QueryStatus::FailsInSomeWitness => "fails-in-some-witness",
            QueryStatus::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub verdict: SearchVerdict,
    /// Worlds of the first witness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smallest_witness: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub progress: Option<String>,
    pub witnesses: Vec<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QueryReport {
    pub label: String,
    pub formula: String,
    pub status: QueryStatus,
    /// Found witnesses where the query holds, out of `checked`.
    pub holds_in: usize,
    pub checked: usize,
    /// Index into the consistency witnesses.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_witness: Option<usize>,
    /// Search for a model of the assumptions where the query fails.
    pub countermodel_search: SearchVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub countermodel: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsDoc {
    pub max_worlds: usize,
    pub max_neighborhood_size: usize,
    pub budget_secs: f64,
    pub witness_cap: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub theory: serde_json::Value,
    pub bounds: BoundsDoc,
    pub assumptions: Vec<String>,
    pub consistency: ConsistencyReport,
    pub queries: Vec<QueryReport>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub witness_models: Vec<Model>,
}

impl ScenarioReport {
    pub fn query(&self, label: &str) -> Option<&QueryReport> {
        self.queries.iter().find(|q| q.label == label)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {} ({})", self.scenario, self.theory["theory"].as_str().unwrap_or("?"));
        for a in &self.assumptions {
            let _ = writeln!(out, "  assume {a}");
        }
        let c = &self.consistency;
        let _ = match (c.verdict, c.smallest_witness) {
            (SearchVerdict::Witness, Some(n)) => writeln!(
                out,
                "consistency: witness with {n} world(s); {} witness(es) checked",
                c.witnesses.len()
            ),
            (v, _) => writeln!(out, "consistency: {}", v.label()),
        };
        let width = self.queries.iter().map(|q| q.label.len()).max().unwrap_or(5).max(5);
        let _ = writeln!(out, "{:<width$}  {:<28}  {:>7}  countermodel", "query", "status", "holds");
        for q in &self.queries {
            let _ = writeln!(
                out,
                "{:<width$}  {:<28}  {:>7}  {}",
                q.label,
                q.status.label(),
                format!("{}/{}", q.holds_in, q.checked),
                match q.countermodel_search {
                    SearchVerdict::Witness => "found",
                    SearchVerdict::Exhausted => "none within bounds",
                    SearchVerdict::BudgetExceeded => "budget exceeded",
                }
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

pub fn analyze_scenario(sc: &Scenario, bounds: &SearchBounds) -> Result<ScenarioReport, JtbError> {
    analyze_scenario_with(sc, bounds, DEFAULT_WITNESS_CAP)
}

/// Checks the assumptions for consistency, evaluates each query at up to
/// `cap` witnesses, and looks for a model of the assumptions falsifying it.
pub fn analyze_scenario_with(sc: &Scenario, bounds: &SearchBounds, cap: usize) -> Result<ScenarioReport, JtbError> {
    let cfg = &sc.theory;
    let found = find_models(&sc.assumptions, cfg, bounds, cap)?;
    let verdict = match (&found.models.is_empty(), &found.completion) {
        (false, _) => SearchVerdict::Witness,
        (true, Completion::BudgetExceeded(_)) => SearchVerdict::BudgetExceeded,
        (true, _) => SearchVerdict::Exhausted,
    };
    let progress = match &found.completion {
        Completion::BudgetExceeded(p) => Some(p.to_string()),
        _ => None,
    };
    let premise = Formula::conjunction(sc.assumptions.iter().cloned());
    let queries = sc
        .queries
        .par_iter()
        .map(|(label, q)| -> Result<QueryReport, JtbError> {
            let mut holds_in = 0;
            let mut failing_witness = None;
            for (i, m) in found.models.iter().enumerate() {
                if satisfies(m, 0, q, cfg).map_err(crate::search::SearchError::from)? {
                    holds_in += 1;
                } else if failing_witness.is_none() {
                    failing_witness = Some(i);
                }
            }
            let target = match &premise {
                Some(p) => Formula::implies(p.clone(), q.clone()),
                None => q.clone(),
            };
            let (countermodel_search, countermodel) = match check_nonvalidity(&target, cfg, bounds)? {
                SearchOutcome::Witness(m) => (SearchVerdict::Witness, Some(model_to_value(&m))),
                SearchOutcome::Exhausted(_) => (SearchVerdict::Exhausted, None),
                SearchOutcome::BudgetExceeded(_) => (SearchVerdict::BudgetExceeded, None),
            };
            let status = if failing_witness.is_some() || countermodel.is_some() {
                QueryStatus::FailsInSomeWitness
            } else if holds_in > 0 {
                QueryStatus::HoldsInAllFoundWitnesses
            } else {
                QueryStatus::Inconclusive
            };
            Ok(QueryReport {
                label: label.clone(),
                formula: print(q),
                status,
                holds_in,
                checked: found.models.len(),
                failing_witness,
                countermodel_search,
                countermodel,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut notes = vec![format!(
        "holds-in-all-found-witnesses covers at most {cap} witnesses within the bounds and is weaker than validity"
    )];
    if cfg.flags().sigma {
        notes.push(
            "sigma theories force B sigma at every world, so assumptions denying belief in the adequacy of \
             every other reason are unsatisfiable"
                .to_string(),
        );
    }
    Ok(ScenarioReport {
        scenario: sc.name.clone(),
        theory: cfg.to_json_value(),
        bounds: BoundsDoc {
            max_worlds: bounds.max_worlds,
            max_neighborhood_size: bounds.max_neighborhood_size,
            budget_secs: bounds.budget.as_secs_f64(),
            witness_cap: cap,
        },
        assumptions: sc.assumptions.iter().map(print).collect(),
        consistency: ConsistencyReport {
            verdict,
            smallest_witness: found.models.first().map(Model::len),
            progress,
            witnesses: found.models.iter().map(model_to_value).collect(),
        },
        queries,
        notes,
        witness_models: found.models,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    fn bounds(worlds: usize) -> SearchBounds {
        SearchBounds::new(worlds, 4, Duration::from_secs(60)).unwrap()
    }

    #[test]
    fn displays() {
        let g2 = scenario("G2").unwrap();
        assert_eq!(g2.assumptions, vec![g2.theory.parse("r:p & B r & (~p & q)").unwrap()]);
        let barn = scenario("Barn").unwrap();
        assert_eq!(barn.assumptions, vec![barn.theory.parse("r:p & B r & p").unwrap()]);
        let t = scenario("TDTD").unwrap();
        let expected: Vec<Formula> = TDTD.iter().map(|x| t.theory.parse(x).unwrap()).collect();
        assert_eq!(t.assumptions, expected);
        assert_eq!(scenario("TDTD+NoR").unwrap().assumptions.len(), 9);
        assert!(matches!(scenario("Nope"), Err(JtbError::UnknownScenario(_))));
        for name in scenario_names() {
            scenario(name).unwrap();
        }
    }

    #[test]
    fn files_round_trip() {
        for name in scenario_names() {
            let sc = scenario(name).unwrap();
            let text = scenario_to_json(&sc);
            assert_eq!(scenario_from_json(&text).unwrap(), sc, "{name}");
        }
        assert!(matches!(scenario_from_json("{}"), Err(JtbError::Malformed(_))));
        let bad = r#"{"name":"x","theory":{"theory":"QRBB","reasons":["r"],"letters":["p"]},"assumptions":["r:q"]}"#;
        assert!(matches!(scenario_from_json(bad), Err(JtbError::Parse { .. })));
    }

    #[test]
    fn gettier_second_case() {
        let rep = analyze_scenario_with(&scenario("G2").unwrap(), &bounds(2), 8).unwrap();
        assert_eq!(rep.consistency.verdict, SearchVerdict::Witness);
        let i = rep.query("jtb_i_r(r, p | q)").unwrap();
        assert_eq!(i.status, QueryStatus::HoldsInAllFoundWitnesses);
        assert_eq!(i.holds_in, i.checked);
        let e = rep.query("jtb_e_r(r, p | q)").unwrap();
        assert_eq!(e.holds_in, 0);
        assert_eq!(e.status, QueryStatus::FailsInSomeWitness);
        assert!(rep.to_text().contains("holds-in-all-found-witnesses"));
    }

    #[test]
    fn tweedle_with_no_other_reasons() {
        let rep = analyze_scenario_with(&scenario("TDTD+NoR").unwrap(), &bounds(4), 8).unwrap();
        assert_eq!(rep.consistency.verdict, SearchVerdict::Witness);
        let e = rep.query("jtb_e(p | q)").unwrap();
        assert_eq!(e.status, QueryStatus::HoldsInAllFoundWitnesses);
        let nil = rep.query("jtb_nil(p | q)").unwrap();
        assert_eq!(nil.status, QueryStatus::FailsInSomeWitness);
        let json: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(json["queries"][4]["status"], "fails-in-some-witness");
    }

    #[test]
    fn sigma_interaction_is_flagged() {
        let mut sc = scenario("TDTD+NoR").unwrap();
        sc.theory = sc.theory.with_kind(TheoryKind::QrbbSigma);
        sc.queries.clear();
        let rep = analyze_scenario_with(&sc, &bounds(2), 1).unwrap();
        assert_eq!(rep.consistency.verdict, SearchVerdict::Exhausted);
        assert!(rep.notes.iter().any(|n| n.contains("sigma")));
    }
}
