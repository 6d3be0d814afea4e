//! Finite neighborhood models: worlds, per-reason accessibility, belief
//! neighborhoods and valuations, with satisfaction and frame checks.

mod eval;
mod json;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{ReasonTerm, Symbol};

pub use eval::{extension, satisfies, Evaluator};
pub use json::{model_from_json, model_to_json, model_to_value};
pub use validate::{check_rc, validate_model, Property, PropertyReport, Violation, MAX_VALIDATED_WORLDS};

/// Worlds are interned as indices; a set of worlds is a bitmask.
pub const MAX_WORLDS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct WorldSet(pub u64);

impl WorldSet {
    pub const EMPTY: WorldSet = WorldSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            WorldSet(u64::MAX)
        } else {
            WorldSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(w: usize) -> Self {
        WorldSet(1 << w)
    }

    pub fn contains(self, w: usize) -> bool {
        self.0 >> w & 1 == 1
    }

    pub fn insert(&mut self, w: usize) {
        self.0 |= 1 << w;
    }

    pub fn union(self, other: WorldSet) -> Self {
        WorldSet(self.0 | other.0)
    }

    pub fn intersection(self, other: WorldSet) -> Self {
        WorldSet(self.0 & other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        WorldSet(!self.0 & WorldSet::full(n).0)
    }

    pub fn is_subset(self, other: WorldSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |w| self.contains(*w))
    }
}

impl FromIterator<usize> for WorldSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = WorldSet::EMPTY;
        for w in iter {
            s.insert(w);
        }
        s
    }
}

/// Sorts by size, then by the list of member indices.
impl Ord for WorldSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for WorldSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("unknown reason `{0}`")]
    UnknownReason(String),
    #[error("compound reasons have no semantics: `{0}`")]
    AppSemanticsUndefined(String),
    #[error("model has {worlds} worlds, more than the limit of {limit}")]
    ModelTooLarge { worlds: usize, limit: usize },
    #[error("malformed model: {0}")]
    Malformed(String),
}

/// A finite model `(W, [·], N, V)` with an optional evaluation point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    worlds: Vec<String>,
    /// Successor sets `r(w)` indexed by world, for each atomic reason.
    access: BTreeMap<ReasonTerm, Vec<WorldSet>>,
    neighborhoods: Vec<BTreeSet<WorldSet>>,
    valuation: Vec<BTreeSet<Symbol>>,
    point: Option<usize>,
}

impl Model {
    pub fn new<I, S>(worlds: I) -> Result<Self, SemanticsError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let worlds: Vec<String> = worlds.into_iter().map(Into::into).collect();
        if worlds.is_empty() {
            return Err(SemanticsError::Malformed("a model needs at least one world".into()));
        }
        if worlds.len() > MAX_WORLDS {
            return Err(SemanticsError::ModelTooLarge {
                worlds: worlds.len(),
                limit: MAX_WORLDS,
            });
        }
        let distinct: BTreeSet<&String> = worlds.iter().collect();
        if distinct.len() != worlds.len() {
            return Err(SemanticsError::Malformed("world names must be distinct".into()));
        }
        let n = worlds.len();
        Ok(Model {
            worlds,
            access: BTreeMap::new(),
            neighborhoods: vec![BTreeSet::new(); n],
            valuation: vec![BTreeSet::new(); n],
            point: None,
        })
    }

    /// A model over worlds named `w0, w1, ...`.
    pub fn with_size(n: usize) -> Result<Self, SemanticsError> {
        Model::new((0..n).map(|i| format!("w{i}")))
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn all(&self) -> WorldSet {
        WorldSet::full(self.len())
    }

    pub fn world_names(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_name(&self, w: usize) -> &str {
        &self.worlds[w]
    }

    pub fn world(&self, name: &str) -> Result<usize, SemanticsError> {
        self.worlds
            .iter()
            .position(|w| w == name)
            .ok_or_else(|| SemanticsError::UnknownWorld(name.to_string()))
    }

    fn check_world(&self, w: usize) -> Result<(), SemanticsError> {
        if w < self.len() {
            Ok(())
        } else {
            Err(SemanticsError::UnknownWorld(w.to_string()))
        }
    }

    fn check_reason_term(r: &ReasonTerm) -> Result<(), SemanticsError> {
        if r.is_atomic() {
            Ok(())
        } else {
            Err(SemanticsError::AppSemanticsUndefined(r.to_string()))
        }
    }

    /// Declares `r` with an empty relation if it has none yet.
    pub fn declare_reason(&mut self, r: ReasonTerm) -> Result<(), SemanticsError> {
        Self::check_reason_term(&r)?;
        let n = self.len();
        self.access.entry(r).or_insert_with(|| vec![WorldSet::EMPTY; n]);
        Ok(())
    }

    pub fn reasons(&self) -> impl Iterator<Item = &ReasonTerm> {
        self.access.keys()
    }

    pub fn add_access(&mut self, r: &ReasonTerm, from: usize, to: usize) -> Result<(), SemanticsError> {
        self.check_world(from)?;
        self.check_world(to)?;
        self.declare_reason(r.clone())?;
        self.access.get_mut(r).expect("declared")[from].insert(to);
        Ok(())
    }

    pub fn set_successors(&mut self, r: &ReasonTerm, w: usize, succ: WorldSet) -> Result<(), SemanticsError> {
        self.check_world(w)?;
        if !succ.is_subset(self.all()) {
            return Err(SemanticsError::Malformed(format!("successors of {} leave the model", self.worlds[w])));
        }
        self.declare_reason(r.clone())?;
        self.access.get_mut(r).expect("declared")[w] = succ;
        Ok(())
    }

    pub fn add_neighborhood(&mut self, w: usize, x: WorldSet) -> Result<(), SemanticsError> {
        self.check_world(w)?;
        if !x.is_subset(self.all()) {
            return Err(SemanticsError::Malformed("neighborhood leaves the model".into()));
        }
        self.neighborhoods[w].insert(x);
        Ok(())
    }

    pub fn set_neighborhoods(&mut self, w: usize, family: BTreeSet<WorldSet>) -> Result<(), SemanticsError> {
        self.check_world(w)?;
        if family.iter().any(|x| !x.is_subset(self.all())) {
            return Err(SemanticsError::Malformed("neighborhood leaves the model".into()));
        }
        self.neighborhoods[w] = family;
        Ok(())
    }

    pub fn neighborhoods(&self, w: usize) -> &BTreeSet<WorldSet> {
        &self.neighborhoods[w]
    }

    pub fn set_letter(&mut self, w: usize, p: Symbol, value: bool) -> Result<(), SemanticsError> {
        self.check_world(w)?;
        if value {
            self.valuation[w].insert(p);
        } else {
            self.valuation[w].remove(&p);
        }
        Ok(())
    }

    pub fn valuation(&self, w: usize) -> &BTreeSet<Symbol> {
        &self.valuation[w]
    }

    pub fn point(&self) -> Option<usize> {
        self.point
    }

    pub fn set_point(&mut self, w: usize) -> Result<(), SemanticsError> {
        self.check_world(w)?;
        self.point = Some(w);
        Ok(())
    }

    /// `r(w)`: the worlds `r`-accessible from `w`.
    pub fn successors(&self, r: &ReasonTerm, w: usize) -> Result<WorldSet, SemanticsError> {
        self.check_world(w)?;
        Self::check_reason_term(r)?;
        self.access
            .get(r)
            .map(|succ| succ[w])
            .ok_or_else(|| SemanticsError::UnknownReason(r.to_string()))
    }

    /// `r°`: the worlds `r`-accessible from themselves.
    pub fn reflexive_worlds(&self, r: &ReasonTerm) -> Result<WorldSet, SemanticsError> {
        Self::check_reason_term(r)?;
        let succ = self
            .access
            .get(r)
            .ok_or_else(|| SemanticsError::UnknownReason(r.to_string()))?;
        Ok((0..self.len()).filter(|&w| succ[w].contains(w)).collect())
    }

    /// Names of the worlds in `x`, in world order.
    pub fn names_of(&self, x: WorldSet) -> Vec<String> {
        x.iter().map(|w| self.worlds[w].clone()).collect()
    }

    pub fn format_set(&self, x: WorldSet) -> String {
        format!("{{{}}}", self.names_of(x).join(","))
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "W = {}", self.format_set(self.all()))?;
        for (r, succ) in &self.access {
            let pairs: Vec<String> = (0..self.len())
                .flat_map(|w| succ[w].iter().map(move |v| (w, v)))
                .map(|(w, v)| format!("({},{})", self.worlds[w], self.worlds[v]))
                .collect();
            writeln!(f, "[{r}] = {{{}}}", pairs.join(", "))?;
        }
        for w in 0..self.len() {
            let fam: Vec<String> = self.neighborhoods[w].iter().map(|x| self.format_set(*x)).collect();
            let val: Vec<&str> = self.valuation[w].iter().map(|p| p.as_str()).collect();
            writeln!(
                f,
                "{}: V = {{{}}}, N = {{{}}}",
                self.worlds[w],
                val.join(","),
                fam.join(", ")
            )?;
        }
        if let Some(p) = self.point {
            write!(f, "point = {}", self.worlds[p])?;
        }
        Ok(())
    }
}
