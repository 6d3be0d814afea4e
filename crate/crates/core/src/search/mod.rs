//! Bounded model search: consistency and non-validity by finding a pointed
//! model within explicit bounds.
//!
//! Worlds are tried in increasing number. For each count the space is split
//! by valuation (the point first, the other worlds in sorted order, which
//! removes permutations of the non-point worlds) and the partitions are
//! walked in parallel. Results are merged in partition order, so the
//! witness returned for a given input never depends on scheduling. Every
//! witness is re-checked against the frame conditions and the goals before
//! it is returned.

mod enumerate;
mod ground;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::Ordering;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::semantics::{satisfies, validate_model, Model, SemanticsError, WorldSet};
use crate::syntax::{Formula, ReasonTerm, Symbol};
use crate::theory::{TheoryConfig, TheoryError};
use enumerate::{Control, Sink, Space, Walker};
use ground::{Grounded, Partial};

pub const MAX_SEARCH_WORLDS: usize = 6;
pub const MAX_NEIGHBORHOOD_SEEDS: usize = 8;
/// Letters beyond this make the valuation space unreasonable to walk.
pub const MAX_SEARCH_LETTERS: usize = 12;
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(60);
pub const BUDGET_ENV: &str = "RBB_BUDGET_SECS";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("unknown symbol: {0}")]
    UnknownSymbol(String),
    #[error("application terms have no semantics: {0}")]
    AppSemanticsUndefined(String),
    #[error("{letters} letters exceed the search limit of {limit}")]
    TooManyLetters { letters: usize, limit: usize },
    #[error("internal error: enumerated witness failed re-validation: {0}")]
    WitnessRejected(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_worlds: usize,
    /// Seeds per family, not counting σ° in σ theories.
    pub max_neighborhood_size: usize,
    pub budget: Duration,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_worlds: 4,
            max_neighborhood_size: 4,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl SearchBounds {
    pub fn new(max_worlds: usize, max_neighborhood_size: usize, budget: Duration) -> Result<Self, SearchError> {
        let b = SearchBounds {
            max_worlds,
            max_neighborhood_size,
            budget,
        };
        b.check()?;
        Ok(b)
    }

    /// Defaults, with the budget taken from `RBB_BUDGET_SECS` when set.
    pub fn from_env() -> Result<Self, SearchError> {
        let mut b = SearchBounds::default();
        if let Ok(text) = std::env::var(BUDGET_ENV) {
            let secs: f64 = text
                .trim()
                .parse()
                .map_err(|_| SearchError::InvalidBounds(format!("{BUDGET_ENV}={text}")))?;
            if !(secs.is_finite() && secs > 0.0) {
                return Err(SearchError::InvalidBounds(format!("{BUDGET_ENV}={text}")));
            }
            b.budget = Duration::from_secs_f64(secs);
        }
        Ok(b)
    }

    fn check(&self) -> Result<(), SearchError> {
        if self.max_worlds == 0 || self.max_worlds > MAX_SEARCH_WORLDS {
            return Err(SearchError::InvalidBounds(format!(
                "max_worlds must be in 1..={MAX_SEARCH_WORLDS}, got {}",
                self.max_worlds
            )));
        }
        if self.max_neighborhood_size > MAX_NEIGHBORHOOD_SEEDS {
            return Err(SearchError::InvalidBounds(format!(
                "max_neighborhood_size must be at most {MAX_NEIGHBORHOOD_SEEDS}, got {}",
                self.max_neighborhood_size
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SearchBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "worlds<={}, seeds<={}, budget={}s",
            self.max_worlds,
            self.max_neighborhood_size,
            self.budget.as_secs_f64()
        )
    }
}

/// How far a search got before its budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchProgress {
    /// Every world count up to this one was fully explored.
    pub worlds_exhausted: usize,
    pub nodes: u64,
    pub elapsed: Duration,
}

impl fmt::Display for SearchProgress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "explored all models up to {} world(s), {} nodes in {:.1}s",
            self.worlds_exhausted,
            self.nodes,
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    /// A validated model whose point satisfies every goal.
    Witness(Model),
    Exhausted(SearchBounds),
    BudgetExceeded(SearchProgress),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Completion {
    /// The bounded space was walked to the end.
    Exhausted,
    /// The requested number of witnesses was reached.
    Capped,
    BudgetExceeded(SearchProgress),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSet {
    pub models: Vec<Model>,
    pub completion: Completion,
}

/// Looks for a model of all `goals` at its point.
pub fn find_model(goals: &[Formula], cfg: &TheoryConfig, bounds: &SearchBounds) -> Result<SearchOutcome, SearchError> {
    let set = find_models(goals, cfg, bounds, 1)?;
    Ok(match (set.models.into_iter().next(), set.completion) {
        (Some(m), _) => SearchOutcome::Witness(m),
        (None, Completion::BudgetExceeded(p)) => SearchOutcome::BudgetExceeded(p),
        (None, _) => SearchOutcome::Exhausted(*bounds),
    })
}

/// Same as [`find_model`]; a witness shows the goals are jointly consistent.
pub fn check_consistency(goals: &[Formula], cfg: &TheoryConfig, bounds: &SearchBounds) -> Result<SearchOutcome, SearchError> {
    find_model(goals, cfg, bounds)
}

/// Looks for a countermodel to `f`.
pub fn check_nonvalidity(f: &Formula, cfg: &TheoryConfig, bounds: &SearchBounds) -> Result<SearchOutcome, SearchError> {
    find_model(&[Formula::not(f.clone())], cfg, bounds)
}

/// Collects up to `cap` witnesses in enumeration order.
pub fn find_models(goals: &[Formula], cfg: &TheoryConfig, bounds: &SearchBounds, cap: usize) -> Result<WitnessSet, SearchError> {
    bounds.check()?;
    for g in goals {
        if g.has_app() {
            return Err(SearchError::AppSemanticsUndefined(g.to_string()));
        }
        cfg.check_formula(g).map_err(|e| match e {
            TheoryError::Undeclared(s) => SearchError::UnknownSymbol(s),
            other => SearchError::UnknownSymbol(other.to_string()),
        })?;
    }
    let mut letters: BTreeSet<Symbol> = goals.iter().flat_map(|g| g.letters()).collect();
    if cfg.allow_overlap() {
        letters.extend(cfg.letters().intersection(cfg.basic_reasons()).cloned());
    }
    let g = Grounded::new(goals, letters.into_iter().collect(), cfg.atomic_reasons())?;
    let started = Instant::now();
    let ctl = Control::new(started + bounds.budget);
    let mut models = Vec::new();
    let mut exhausted = 0;
    for n in 1..=bounds.max_worlds {
        let sp = space(&g, cfg, n, bounds.max_neighborhood_size, false);
        let run = walk(&sp, &ctl, Mode::Collect(cap - models.len().min(cap)))?;
        for st in run.found {
            models.push(to_model(&st, &g, n, goals, cfg)?);
        }
        if models.len() >= cap && cap > 0 {
            return Ok(WitnessSet {
                models,
                completion: Completion::Capped,
            });
        }
        if run.aborted {
            let progress = SearchProgress {
                worlds_exhausted: exhausted,
                nodes: ctl.nodes.load(Ordering::Relaxed),
                elapsed: started.elapsed(),
            };
            return Ok(WitnessSet {
                models,
                completion: Completion::BudgetExceeded(progress),
            });
        }
        exhausted = n;
    }
    Ok(WitnessSet {
        models,
        completion: Completion::Exhausted,
    })
}

/// Number of candidate models with exactly `worlds` worlds over all of
/// `cfg`'s letters and reasons, as the enumerator generates them: families
/// are (rb)-closures of sets of `r°`, at most `max_seeds` at a time, and the
/// non-point worlds carry sorted valuations.
pub fn count_candidates(cfg: &TheoryConfig, worlds: usize, max_seeds: usize) -> Result<u64, SearchError> {
    let bounds = SearchBounds::new(worlds, max_seeds, Duration::from_secs(3600))?;
    let g = Grounded::new(&[], cfg.letters().iter().cloned().collect(), cfg.atomic_reasons())?;
    let sp = space(&g, cfg, worlds, bounds.max_neighborhood_size, true);
    let ctl = Control::new(Instant::now() + bounds.budget);
    let run = walk(&sp, &ctl, Mode::Count)?;
    Ok(run.count)
}

fn space<'a>(g: &'a Grounded, cfg: &TheoryConfig, n: usize, max_seeds: usize, everything: bool) -> Space<'a> {
    let flags = cfg.flags();
    let mut sp = Space::new(g, n);
    sp.max_seeds = max_seeds;
    sp.sigma_plus = flags.sigma_plus;
    sp.sigma = g.reasons.iter().position(|r| *r == ReasonTerm::Sigma);
    if cfg.allow_overlap() {
        for (p, sym) in g.letters.iter().enumerate() {
            if let Some(r) = g.reasons.iter().position(|r| r.as_basic() == Some(sym)) {
                sp.overlap.push((p, r));
            }
        }
    }
    sp.relevant = (0..g.reasons.len())
        .filter(|r| {
            everything
                || g.mentioned.contains(r)
                || Some(*r) == sp.sigma
                || sp.overlap.iter().any(|&(_, o)| o == *r)
        })
        .collect();
    if everything {
        sp.exhaustive = true;
    }
    if !sp.exhaustive {
        for r in 0..g.reasons.len() {
            sp.saturated[r] = Some(r) != sp.sigma && !g.positive_support.contains(&r);
        }
    }
    sp
}

enum Mode {
    Collect(usize),
    Count,
}

struct Run {
    found: Vec<Partial>,
    count: u64,
    aborted: bool,
}

/// Next non-decreasing sequence over `0..limit`, in lexicographic order.
fn next_sorted(seq: &mut [u64], limit: u64) -> bool {
    let mut i = seq.len();
    while i > 0 {
        i -= 1;
        if seq[i] + 1 < limit {
            let v = seq[i] + 1;
            for x in &mut seq[i..] {
                *x = v;
            }
            return true;
        }
    }
    false
}

fn walk(sp: &Space<'_>, ctl: &Control, mode: Mode) -> Result<Run, SearchError> {
    let letters = sp.g.letters.len();
    if letters > MAX_SEARCH_LETTERS {
        return Err(SearchError::TooManyLetters {
            letters,
            limit: MAX_SEARCH_LETTERS,
        });
    }
    let limit = 1u64 << letters;
    let chunk = rayon::current_num_threads().max(1) * 8;
    let mut run = Run {
        found: Vec::new(),
        count: 0,
        aborted: false,
    };
    let cap = match mode {
        Mode::Collect(c) => c,
        Mode::Count => usize::MAX,
    };
    if cap == 0 {
        return Ok(run);
    }
    let mut point = 0u64;
    let mut rest = vec![0u64; sp.n - 1];
    let mut more = true;
    while more {
        let mut batch = Vec::with_capacity(chunk);
        while more && batch.len() < chunk {
            let mut vals = Vec::with_capacity(sp.n);
            vals.push(point);
            vals.extend_from_slice(&rest);
            batch.push(vals);
            if !next_sorted(&mut rest, limit) {
                rest.iter_mut().for_each(|x| *x = 0);
                point += 1;
                more = point < limit;
            }
        }
        let results: Vec<(Sink, bool)> = batch
            .par_iter()
            .map(|vals| {
                let sink = match mode {
                    Mode::Collect(c) => Sink::Collect {
                        cap: c,
                        found: Vec::new(),
                    },
                    Mode::Count => Sink::Count(0),
                };
                let mut w = Walker::new(sp, ctl, sink);
                w.run(vals);
                (w.sink, w.aborted)
            })
            .collect();
        for (sink, aborted) in results {
            match sink {
                Sink::Count(c) => run.count += c,
                Sink::Collect { found, .. } => {
                    let room = cap - run.found.len();
                    run.found.extend(found.into_iter().take(room));
                }
            }
            if run.found.len() >= cap {
                return Ok(run);
            }
            if aborted {
                run.aborted = true;
                return Ok(run);
            }
        }
    }
    Ok(run)
}

fn to_model(st: &Partial, g: &Grounded, n: usize, goals: &[Formula], cfg: &TheoryConfig) -> Result<Model, SearchError> {
    let mut m = Model::with_size(n)?;
    for (i, r) in g.reasons.iter().enumerate() {
        m.declare_reason(r.clone())?;
        for w in 0..n {
            m.set_successors(r, w, WorldSet(st.succ[i][w]))?;
        }
    }
    for w in 0..n {
        let fam = st.fam[w].unwrap_or(0);
        let family = (0..1u64 << n).filter(|x| fam >> x & 1 == 1).map(WorldSet).collect();
        m.set_neighborhoods(w, family)?;
        for (p, sym) in g.letters.iter().enumerate() {
            if st.val[w] >> p & 1 == 1 {
                m.set_letter(w, sym.clone(), true)?;
            }
        }
    }
    m.set_point(0)?;
    let report = validate_model(&m, cfg)?;
    if !report.is_empty() {
        return Err(SearchError::WitnessRejected(format!("{report}\n{m}")));
    }
    for goal in goals {
        if !satisfies(&m, 0, goal, cfg)? {
            return Err(SearchError::WitnessRejected(format!("goal `{goal}` fails\n{m}")));
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::TheoryKind;

    fn cfg(kind: TheoryKind) -> TheoryConfig {
        TheoryConfig::new(kind, ["r", "s"], ["p", "q"]).unwrap()
    }

    fn goals(c: &TheoryConfig, texts: &[&str]) -> Vec<Formula> {
        texts.iter().map(|t| c.parse(t).unwrap()).collect()
    }

    fn bounds(worlds: usize) -> SearchBounds {
        SearchBounds::new(worlds, 4, Duration::from_secs(60)).unwrap()
    }

    fn witness(kind: TheoryKind, texts: &[&str], worlds: usize) -> Model {
        let c = cfg(kind);
        match find_model(&goals(&c, texts), &c, &bounds(worlds)).unwrap() {
            SearchOutcome::Witness(m) => m,
            other => panic!("{texts:?}: {other:?}"),
        }
    }

    #[test]
    fn support_for_both_sides_needs_no_belief() {
        let m = witness(TheoryKind::Rbb, &["~B r", "r:p", "r:~p"], 1);
        assert_eq!(m.len(), 1);
        assert!(m.successors(&ReasonTerm::basic("r"), 0).unwrap().is_empty());
    }

    #[test]
    fn contradictions_are_exhausted() {
        let c = cfg(TheoryKind::Rbb);
        let out = find_model(&goals(&c, &["p & ~p"]), &c, &bounds(3)).unwrap();
        assert_eq!(out, SearchOutcome::Exhausted(bounds(3)));
        let out = find_model(&goals(&c, &["B r", "r:p", "~r:p"]), &c, &bounds(3)).unwrap();
        assert!(matches!(out, SearchOutcome::Exhausted(_)));
        let out = check_nonvalidity(&c.parse("p | ~p").unwrap(), &c, &bounds(3)).unwrap();
        assert!(matches!(out, SearchOutcome::Exhausted(_)));
    }

    #[test]
    fn conflicting_accepted_reasons() {
        let m = witness(TheoryKind::Rbb, &["B r", "~B s", "r:p", "s:~p"], 3);
        assert!(m.len() <= 3);
    }

    #[test]
    fn no_closure_under_combined_reasons() {
        let m = witness(TheoryKind::Rbb, &["B s", "B r", "s:(p -> q)", "r:p", "~B q"], 3);
        assert!(m.len() <= 3);
    }

    #[test]
    fn belief_without_adequate_support() {
        let m = witness(TheoryKind::Rbb, &["B p", "r:p -> ~B r", "s:p -> ~B s"], 2);
        assert!(m.len() <= 2);
    }

    #[test]
    fn sigma_theories_force_the_master_reason() {
        for kind in [TheoryKind::RbbSigma, TheoryKind::RbbSigmaPlus] {
            let m = witness(kind, &["B r", "r:p"], 3);
            let c = cfg(kind);
            assert!(satisfies(&m, 0, &c.parse("B p & sigma:p").unwrap(), &c).unwrap());
        }
    }

    #[test]
    fn nested_modalities_use_the_full_walk() {
        let m = witness(TheoryKind::Rbb, &["r:s:p", "~s:p", "B B p"], 3);
        assert!(m.len() >= 2);
        let c = cfg(TheoryKind::Rbb);
        let out = find_model(&goals(&c, &["r:s:p", "r", "~s:p"]), &c, &bounds(2)).unwrap();
        assert!(matches!(out, SearchOutcome::Exhausted(_)));
    }

    #[test]
    fn quantified_goals() {
        let m = witness(TheoryKind::Qrbb, &["E t. B t", "A t. ~t:p"], 2);
        assert!(m.len() <= 2);
        let c = cfg(TheoryKind::Qrbb);
        let out = find_model(&goals(&c, &["A t. t", "~r"]), &c, &bounds(2)).unwrap();
        assert!(matches!(out, SearchOutcome::Exhausted(_)));
    }

    #[test]
    fn results_are_deterministic() {
        let c = cfg(TheoryKind::Rbb);
        let g = goals(&c, &["B s", "B r", "s:(p -> q)", "r:p", "~B q"]);
        let a = find_models(&g, &c, &bounds(3), 5).unwrap();
        let b = find_models(&g, &c, &bounds(3), 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.models.len(), 5);
    }

    #[test]
    fn single_world_count() {
        // 2^|P| valuations, and per relation choice two families, except
        // when no reason is adequate and only the empty family survives
        let c = cfg(TheoryKind::Rbb);
        assert_eq!(count_candidates(&c, 1, 8).unwrap(), 4 * (2 * 4 - 1));
        let one = TheoryConfig::new(TheoryKind::Rbb, ["r"], ["p"]).unwrap();
        assert_eq!(count_candidates(&one, 1, 8).unwrap(), 2 * (2 * 2 - 1));
    }

    #[test]
    fn errors() {
        let c = cfg(TheoryKind::Rbb);
        assert!(matches!(
            SearchBounds::new(7, 1, DEFAULT_BUDGET),
            Err(SearchError::InvalidBounds(_))
        ));
        let other = TheoryConfig::new(TheoryKind::Rbb, ["x"], ["z"]).unwrap();
        assert!(matches!(
            find_model(&[other.parse("x:z").unwrap()], &c, &bounds(1)),
            Err(SearchError::UnknownSymbol(_))
        ));
        let app = TheoryConfig::new(TheoryKind::RbbApp, ["r", "s"], ["p"]).unwrap();
        assert!(matches!(
            find_model(&[app.parse("(r * s):p").unwrap()], &app, &bounds(1)),
            Err(SearchError::AppSemanticsUndefined(_))
        ));
    }

    #[test]
    fn budget_is_respected() {
        let c = TheoryConfig::new(TheoryKind::Rbb, ["r", "s", "t"], ["p", "q"]).unwrap();
        // unsatisfiable, but only visible once families are chosen, which
        // comes after every nested relation has been enumerated
        let g = goals(&c, &["r:s:t:p", "B (r:q)", "~B (r:q | r:q)"]);
        let b = SearchBounds::new(6, 8, Duration::from_millis(300)).unwrap();
        let t = Instant::now();
        let out = find_model(&g, &c, &b).unwrap();
        assert!(t.elapsed() < Duration::from_secs(10));
        match out {
            SearchOutcome::BudgetExceeded(p) => assert!(p.worlds_exhausted < 6),
            other => panic!("{other:?}"),
        }
    }
}
