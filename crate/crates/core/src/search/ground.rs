//! Goals compiled to a quantifier-free DAG, with three-valued evaluation
//! over partially assigned models.

use std::collections::{BTreeSet, HashMap};

use super::SearchError;
use crate::syntax::{Formula, ReasonTerm, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Const(bool),
    Letter(usize),
    Adequate(usize),
    Not(u32),
    Or(u32, u32),
    All(Vec<u32>),
    Supports(usize, u32),
    Believes(u32),
}

/// Children always precede parents, so index order is a topological order.
#[derive(Debug, Clone)]
pub(crate) struct Grounded {
    pub nodes: Vec<Node>,
    pub goals: Vec<u32>,
    pub letters: Vec<Symbol>,
    pub reasons: Vec<ReasonTerm>,
    /// Reasons mentioned by some grounded goal.
    pub mentioned: BTreeSet<usize>,
    /// Reasons `r` with some `r:φ` in positive position. Making `r`'s
    /// successor sets larger can only falsify goals through these.
    pub positive_support: BTreeSet<usize>,
    /// Arguments of `B` nodes.
    pub belief_args: Vec<u32>,
    /// No `:` or `B` occurs inside the scope of another.
    pub flat: bool,
}

struct Builder<'a> {
    nodes: Vec<Node>,
    index: HashMap<Node, u32>,
    letters: &'a [Symbol],
    reasons: &'a [ReasonTerm],
}

impl Builder<'_> {
    fn intern(&mut self, node: Node) -> u32 {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    fn constant(&self, id: u32) -> Option<bool> {
        match self.nodes[id as usize] {
            Node::Const(b) => Some(b),
            _ => None,
        }
    }

    fn reason(&self, r: &ReasonTerm) -> Result<usize, SearchError> {
        if !r.is_atomic() {
            return Err(SearchError::AppSemanticsUndefined(r.to_string()));
        }
        self.reasons
            .iter()
            .position(|t| t == r)
            .ok_or_else(|| SearchError::UnknownSymbol(r.to_string()))
    }

    fn ground(&mut self, f: &Formula) -> Result<u32, SearchError> {
        let node = match f {
            Formula::Letter(p) => match self.letters.iter().position(|q| q == p) {
                Some(i) => Node::Letter(i),
                None => return Err(SearchError::UnknownSymbol(p.to_string())),
            },
            Formula::Adequate(r) => Node::Adequate(self.reason(r)?),
            Formula::Eq(a, b) => {
                if a.has_app() || b.has_app() {
                    return Err(SearchError::AppSemanticsUndefined(f.to_string()));
                }
                Node::Const(a == b)
            }
            Formula::Not(a) => {
                let a = self.ground(a)?;
                match self.constant(a) {
                    Some(b) => Node::Const(!b),
                    None => Node::Not(a),
                }
            }
            Formula::Or(a, b) => {
                let a = self.ground(a)?;
                let b = self.ground(b)?;
                match (self.constant(a), self.constant(b)) {
                    (Some(true), _) | (_, Some(true)) => Node::Const(true),
                    (Some(false), _) => return Ok(b),
                    (_, Some(false)) => return Ok(a),
                    _ => Node::Or(a, b),
                }
            }
            Formula::Supports(r, a) => {
                let r = self.reason(r)?;
                let a = self.ground(a)?;
                Node::Supports(r, a)
            }
            Formula::Believes(a) => Node::Believes(self.ground(a)?),
            Formula::ForAll(v, body) => {
                if !body.is_free(v) {
                    return self.ground(body);
                }
                let mut parts = Vec::new();
                for s in self.reasons {
                    if body.is_free_for(s, v) {
                        let part = self.ground(&body.substitute_unchecked(v, s))?;
                        match self.constant(part) {
                            Some(true) => {}
                            Some(false) => return Ok(self.intern(Node::Const(false))),
                            None => parts.push(part),
                        }
                    }
                }
                parts.sort_unstable();
                parts.dedup();
                match parts.len() {
                    0 => Node::Const(true),
                    1 => return Ok(parts[0]),
                    _ => Node::All(parts),
                }
            }
        };
        Ok(self.intern(node))
    }
}

impl Grounded {
    pub fn new(goals: &[Formula], letters: Vec<Symbol>, reasons: Vec<ReasonTerm>) -> Result<Self, SearchError> {
        let mut b = Builder {
            nodes: Vec::new(),
            index: HashMap::new(),
            letters: &letters,
            reasons: &reasons,
        };
        let mut ids = Vec::with_capacity(goals.len());
        for g in goals {
            ids.push(b.ground(g)?);
        }
        let nodes = b.nodes;
        let mut mentioned = BTreeSet::new();
        let mut belief_args = Vec::new();
        let mut depth = vec![0u32; nodes.len()];
        for (i, node) in nodes.iter().enumerate() {
            depth[i] = match node {
                Node::Const(_) | Node::Letter(_) => 0,
                Node::Adequate(r) => {
                    mentioned.insert(*r);
                    0
                }
                Node::Not(a) => depth[*a as usize],
                Node::Or(a, c) => depth[*a as usize].max(depth[*c as usize]),
                Node::All(parts) => parts.iter().map(|p| depth[*p as usize]).max().unwrap_or(0),
                Node::Supports(r, a) => {
                    mentioned.insert(*r);
                    depth[*a as usize] + 1
                }
                Node::Believes(a) => {
                    belief_args.push(*a);
                    depth[*a as usize] + 1
                }
            };
        }
        belief_args.sort_unstable();
        belief_args.dedup();
        let flat = ids.iter().all(|g| depth[*g as usize] <= 1);
        // polarity bits: 1 positive, 2 negative; parents have larger ids
        let mut polarity = vec![0u8; nodes.len()];
        for g in &ids {
            polarity[*g as usize] |= 1;
        }
        let mut positive_support = BTreeSet::new();
        for i in (0..nodes.len()).rev() {
            let p = polarity[i];
            if p == 0 {
                continue;
            }
            match &nodes[i] {
                Node::Not(a) => polarity[*a as usize] |= (p & 1) << 1 | (p & 2) >> 1,
                Node::Or(a, b) => {
                    polarity[*a as usize] |= p;
                    polarity[*b as usize] |= p;
                }
                Node::All(parts) => {
                    for x in parts {
                        polarity[*x as usize] |= p;
                    }
                }
                Node::Supports(r, a) => {
                    if p & 1 == 1 {
                        positive_support.insert(*r);
                    }
                    polarity[*a as usize] |= p;
                }
                Node::Believes(a) => polarity[*a as usize] |= 3,
                Node::Const(_) | Node::Letter(_) | Node::Adequate(_) => {}
            }
        }
        Ok(Grounded {
            nodes,
            goals: ids,
            letters,
            reasons,
            mentioned,
            positive_support,
            belief_args,
            flat,
        })
    }
}

/// A model under construction. Unassigned parts are marked unknown.
#[derive(Debug, Clone)]
pub(crate) struct Partial {
    pub n: usize,
    pub all: u64,
    pub val: Vec<u64>,
    pub val_known: u64,
    /// `succ[r][w]`, meaningful on the bits in `known[r][w]`.
    pub succ: Vec<Vec<u64>>,
    pub known: Vec<Vec<u64>>,
    /// Neighborhood families as bitsets over subsets of W.
    pub fam: Vec<Option<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    Violated,
    Open,
    Satisfied,
}

impl Partial {
    pub fn new(n: usize, reasons: usize) -> Self {
        Partial {
            n,
            all: if n == 64 { u64::MAX } else { (1 << n) - 1 },
            val: vec![0; n],
            val_known: 0,
            succ: vec![vec![0; n]; reasons],
            known: vec![vec![0; n]; reasons],
            fam: vec![None; n],
        }
    }

    /// Three-valued extensions `(definitely true, definitely false)` of
    /// every node.
    pub fn evaluate(&self, g: &Grounded, out: &mut Vec<(u64, u64)>) {
        out.clear();
        let n = self.n;
        let all = self.all;
        for node in &g.nodes {
            let ext = match node {
                Node::Const(true) => (all, 0),
                Node::Const(false) => (0, all),
                Node::Letter(i) => {
                    let mut t = 0;
                    for w in 0..n {
                        if self.val[w] >> i & 1 == 1 {
                            t |= 1 << w;
                        }
                    }
                    (t & self.val_known, !t & self.val_known)
                }
                Node::Adequate(r) => {
                    let (mut t, mut f) = (0, 0);
                    for w in 0..n {
                        if self.known[*r][w] >> w & 1 == 1 {
                            if self.succ[*r][w] >> w & 1 == 1 {
                                t |= 1 << w;
                            } else {
                                f |= 1 << w;
                            }
                        }
                    }
                    (t, f)
                }
                Node::Not(a) => {
                    let (t, f) = out[*a as usize];
                    (f, t)
                }
                Node::Or(a, b) => {
                    let (ta, fa) = out[*a as usize];
                    let (tb, fb) = out[*b as usize];
                    (ta | tb, fa & fb)
                }
                Node::All(parts) => parts.iter().fold((all, 0), |(t, f), p| {
                    let (tp, fp) = out[*p as usize];
                    (t & tp, f | fp)
                }),
                Node::Supports(r, a) => {
                    let (ta, fa) = out[*a as usize];
                    let (mut t, mut f) = (0, 0);
                    for w in 0..n {
                        let k = self.known[*r][w];
                        let s = self.succ[*r][w] & k;
                        let possible = (s | !k) & all;
                        if possible & !ta == 0 {
                            t |= 1 << w;
                        } else if s & fa != 0 {
                            f |= 1 << w;
                        }
                    }
                    (t, f)
                }
                Node::Believes(a) => {
                    let (ta, fa) = out[*a as usize];
                    let unknown = all & !(ta | fa);
                    let (mut t, mut f) = (0, 0);
                    for w in 0..n {
                        let Some(fam) = self.fam[w] else { continue };
                        if unknown == 0 {
                            if fam >> ta & 1 == 1 {
                                t |= 1 << w;
                            } else {
                                f |= 1 << w;
                            }
                            continue;
                        }
                        let (mut some_in, mut some_out) = (false, false);
                        let mut sub = unknown;
                        loop {
                            if fam >> (ta | sub) & 1 == 1 {
                                some_in = true;
                            } else {
                                some_out = true;
                            }
                            if sub == 0 || (some_in && some_out) {
                                break;
                            }
                            sub = (sub - 1) & unknown;
                        }
                        if !some_out {
                            t |= 1 << w;
                        } else if !some_in {
                            f |= 1 << w;
                        }
                    }
                    (t, f)
                }
            };
            out.push(ext);
        }
    }

    /// Status of the goals at world 0.
    pub fn status(&self, g: &Grounded, scratch: &mut Vec<(u64, u64)>) -> Status {
        self.evaluate(g, scratch);
        let mut open = false;
        for goal in &g.goals {
            let (t, f) = scratch[*goal as usize];
            if f & 1 == 1 {
                return Status::Violated;
            }
            if t & 1 == 0 {
                open = true;
            }
        }
        if open {
            Status::Open
        } else {
            Status::Satisfied
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{TheoryConfig, TheoryKind};

    fn grounded(texts: &[&str]) -> Grounded {
        let c = TheoryConfig::new(TheoryKind::Qrbb, ["r", "s"], ["p", "q"]).unwrap();
        let goals: Vec<Formula> = texts.iter().map(|t| c.parse(t).unwrap()).collect();
        Grounded::new(
            &goals,
            c.letters().iter().cloned().collect(),
            c.atomic_reasons(),
        )
        .unwrap()
    }

    #[test]
    fn quantifiers_expand_over_the_domain() {
        let g = grounded(&["A t. t"]);
        assert!(matches!(g.nodes[g.goals[0] as usize], Node::All(ref parts) if parts.len() == 2));
        assert_eq!(g.mentioned.len(), 2);
        let g = grounded(&["A t. t = t"]);
        assert_eq!(g.nodes[g.goals[0] as usize], Node::Const(true));
    }

    #[test]
    fn flatness() {
        assert!(grounded(&["r:p & B r & ~B (p | r)"]).flat);
        assert!(!grounded(&["r:s:p"]).flat);
        assert!(!grounded(&["B B p"]).flat);
        assert!(!grounded(&["B (r:p)"]).flat);
    }

    #[test]
    fn support_polarity() {
        let g = grounded(&["~r:p", "s:q -> B r", "~~s:p | r"]);
        let pos: Vec<usize> = g.positive_support.iter().copied().collect();
        assert_eq!(pos, vec![1]);
        assert!(grounded(&["~B ~r:p"]).positive_support.contains(&0));
    }

    #[test]
    fn partial_support_is_three_valued() {
        let g = grounded(&["r:p"]);
        let mut st = Partial::new(2, g.reasons.len());
        let mut scratch = Vec::new();
        st.val = vec![0b00, 0b00];
        st.val_known = 0b11;
        assert_eq!(st.status(&g, &mut scratch), Status::Open);
        // r(w0) ∋ w1, where p is false
        st.known[0][0] = 0b10;
        st.succ[0][0] = 0b10;
        assert_eq!(st.status(&g, &mut scratch), Status::Violated);
        st.succ[0][0] = 0b00;
        assert_eq!(st.status(&g, &mut scratch), Status::Open);
        st.known[0][0] = 0b11;
        assert_eq!(st.status(&g, &mut scratch), Status::Satisfied);
    }
}
