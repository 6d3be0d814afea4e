//! Depth-first enumeration of candidate models for one world count.
//!
//! Order of assignment: valuations (fixed per partition), the point's
//! successor sets, the reflexivity bits of the other worlds, then
//! neighborhood families. A family is the (rb)-closure of at most
//! `max_seeds` seed sets; seeds are the sets `r°` and the extensions of
//! belief arguments. When no modality is nested inside another, the
//! remaining parts of the non-point worlds cannot affect the goals and are
//! completed per world instead of enumerated, and a basic reason that
//! supports nothing in positive position only has its reflexivity bit
//! enumerated at the point: its other successors are fixed to every world,
//! which can only shrink the (rb)-closures and can only make goals true.
//!
//! Non-point worlds are kept sorted by valuation, then by membership in the
//! point's successor sets, then by reflexivity bits.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use super::ground::{Grounded, Partial, Status};

pub(crate) struct Control {
    pub deadline: Instant,
    pub stop: AtomicBool,
    pub nodes: AtomicU64,
}

impl Control {
    pub fn new(deadline: Instant) -> Self {
        Control {
            deadline,
            stop: AtomicBool::new(false),
            nodes: AtomicU64::new(0),
        }
    }
}

pub(crate) struct Space<'a> {
    pub g: &'a Grounded,
    pub n: usize,
    pub all: u64,
    /// `up[x]`: the family of all supersets of `x`.
    pub up: Vec<u64>,
    /// Reasons whose relations are enumerated; the rest are universal.
    pub relevant: Vec<usize>,
    pub sigma: Option<usize>,
    pub sigma_plus: bool,
    /// (letter, reason) pairs tied by (pr).
    pub overlap: Vec<(usize, usize)>,
    pub max_seeds: usize,
    /// Enumerate every part of every world instead of completing the
    /// non-point worlds.
    pub exhaustive: bool,
    /// Reasons whose point successors are fixed apart from reflexivity.
    pub saturated: Vec<bool>,
}

impl<'a> Space<'a> {
    pub fn new(g: &'a Grounded, n: usize) -> Self {
        let all = (1u64 << n) - 1;
        let subsets = 1usize << n;
        let mut up = vec![0u64; subsets];
        for (x, slot) in up.iter_mut().enumerate() {
            for y in 0..subsets {
                if x & !y == 0 {
                    *slot |= 1 << y;
                }
            }
        }
        Space {
            g,
            n,
            all,
            up,
            relevant: Vec::new(),
            sigma: None,
            sigma_plus: false,
            overlap: Vec::new(),
            max_seeds: 0,
            exhaustive: !g.flat,
            saturated: vec![false; g.reasons.len()],
        }
    }

    /// Ordering key of non-point world `v` among worlds with equal
    /// valuations: membership in the point's successor sets.
    fn point_key(&self, st: &Partial, v: usize) -> u64 {
        self.relevant
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &r)| acc | (st.succ[r][0] >> v & 1) << j)
    }

    fn diag_key(&self, st: &Partial, v: usize) -> u64 {
        self.relevant
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &r)| acc | (st.succ[r][v] >> v & 1) << j)
    }

    fn point_order_ok(&self, st: &Partial) -> bool {
        (2..self.n).all(|v| st.val[v - 1] != st.val[v] || self.point_key(st, v - 1) <= self.point_key(st, v))
    }

    fn reasons(&self) -> usize {
        self.g.reasons.len()
    }

    fn closure(&self, st: &Partial, w: usize, rcirc: &[u64], mut fam: u64) -> u64 {
        loop {
            let before = fam;
            for (r, &rc) in rcirc.iter().enumerate() {
                if fam >> rc & 1 == 1 {
                    fam |= self.up[st.succ[r][w] as usize];
                }
            }
            if fam == before {
                return fam;
            }
        }
    }

    /// Local frame conditions at `w`; needs every successor set at `w` and
    /// every reflexivity bit.
    fn valid_at(&self, st: &Partial, w: usize, rcirc: &[u64], fam: u64) -> bool {
        let mut rest = fam;
        while rest != 0 {
            let x = rest.trailing_zeros() as u64;
            rest &= rest - 1;
            if fam >> (self.all & !x) & 1 == 1 {
                return false;
            }
        }
        for (r, &rc) in rcirc.iter().enumerate() {
            if fam >> rc & 1 == 0 {
                continue;
            }
            let succ = st.succ[r][w];
            if self.up[succ as usize] & !fam != 0 {
                return false;
            }
            if let Some(s) = self.sigma {
                let ssucc = st.succ[s][w];
                if ssucc >> w & 1 == 1 && succ >> w & 1 == 0 {
                    return false;
                }
                if ssucc & !succ != 0 {
                    return false;
                }
            }
        }
        if let Some(s) = self.sigma {
            if fam >> rcirc[s] & 1 == 0 {
                return false;
            }
            if self.sigma_plus && fam & !self.up[st.succ[s][w] as usize] != 0 {
                return false;
            }
        }
        true
    }

    fn rcirc(&self, st: &Partial) -> Vec<u64> {
        (0..self.reasons())
            .map(|r| (0..self.n).filter(|&w| st.succ[r][w] >> w & 1 == 1).fold(0, |acc, w| acc | 1 << w))
            .collect()
    }

    fn pr_ok(&self, st: &Partial) -> bool {
        self.overlap.iter().all(|&(p, r)| {
            (0..self.n).all(|w| (st.val[w] >> p & 1) == (st.succ[r][w] >> w & 1))
        })
    }

    /// Submasks of `mask` in increasing order.
    fn submasks(&self, mask: u64) -> impl Iterator<Item = u64> {
        (0..=self.all).filter(move |x| x & !mask == 0)
    }
}

/// Lexicographic k-subsets of `0..m`, for k = 0, 1, ..., `max`.
struct Combos {
    m: usize,
    max: usize,
    idx: Vec<usize>,
    started: bool,
}

impl Combos {
    fn new(m: usize, max: usize) -> Self {
        Combos {
            m,
            max: max.min(m),
            idx: Vec::new(),
            started: false,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        if !self.started {
            self.started = true;
            return Some(&self.idx);
        }
        let k = self.idx.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.m - (k - i) {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(&self.idx);
            }
        }
        if k >= self.max {
            return None;
        }
        self.idx = (0..k + 1).collect();
        Some(&self.idx)
    }
}

pub(crate) enum Sink {
    Collect { cap: usize, found: Vec<Partial> },
    Count(u64),
}

pub(crate) struct Walker<'a> {
    sp: &'a Space<'a>,
    ctl: &'a Control,
    pub sink: Sink,
    pub aborted: bool,
    scratch: Vec<(u64, u64)>,
    ticks: u64,
}

impl<'a> Walker<'a> {
    pub fn new(sp: &'a Space<'a>, ctl: &'a Control, sink: Sink) -> Self {
        Walker {
            sp,
            ctl,
            sink,
            aborted: false,
            scratch: Vec::new(),
            ticks: 0,
        }
    }

    /// Counts a node; false once the budget is spent or another worker
    /// gave up.
    fn tick(&mut self) -> bool {
        self.ticks += 1;
        if self.ticks.is_multiple_of(1024) {
            self.ctl.nodes.fetch_add(1024, Ordering::Relaxed);
            if self.ctl.stop.load(Ordering::Relaxed) || Instant::now() >= self.ctl.deadline {
                self.ctl.stop.store(true, Ordering::Relaxed);
                self.aborted = true;
            }
        }
        !self.aborted
    }

    fn violated(&mut self, st: &Partial) -> bool {
        st.status(self.sp.g, &mut self.scratch) == Status::Violated
    }

    fn satisfied(&mut self, st: &Partial) -> bool {
        st.status(self.sp.g, &mut self.scratch) == Status::Satisfied
    }

    /// Emits a complete candidate; false when the sink is full.
    fn emit(&mut self, st: &Partial) -> bool {
        match &mut self.sink {
            Sink::Count(c) => {
                *c += 1;
                true
            }
            Sink::Collect { cap, found } => {
                found.push(st.clone());
                found.len() < *cap
            }
        }
    }

    /// Explores every model with the given valuations. Returns false when
    /// the walk stopped early.
    pub fn run(&mut self, vals: &[u64]) -> bool {
        let sp = self.sp;
        let mut st = Partial::new(sp.n, sp.reasons());
        // unmentioned reasons are universal: r° = W adds no constraint
        for r in 0..sp.reasons() {
            if !sp.relevant.contains(&r) {
                st.known[r] = vec![sp.all; sp.n];
                st.succ[r] = vec![sp.all; sp.n];
            }
        }
        st.val = vals.to_vec();
        st.val_known = sp.all;
        if self.violated(&st) {
            return true;
        }
        self.point(&mut st, 0)
    }

    fn point(&mut self, st: &mut Partial, i: usize) -> bool {
        let sp = self.sp;
        let Some(&r) = sp.relevant.get(i) else {
            if !sp.point_order_ok(st) {
                return true;
            }
            return self.diagonal(st, 0);
        };
        st.known[r][0] = sp.all;
        let masks: Vec<u64> = if sp.saturated[r] {
            vec![sp.all & !1, sp.all]
        } else {
            (0..=sp.all).collect()
        };
        for mask in masks {
            st.succ[r][0] = mask;
            if !self.tick() {
                return false;
            }
            if self.violated(st) {
                continue;
            }
            if !self.point(st, i + 1) {
                return false;
            }
        }
        st.known[r][0] = 0;
        st.succ[r][0] = 0;
        true
    }

    fn diagonal(&mut self, st: &mut Partial, slot: usize) -> bool {
        let sp = self.sp;
        let k = sp.relevant.len();
        if k == 0 || slot == (sp.n - 1) * k {
            return self.after_diagonal(st);
        }
        let v = 1 + slot / k;
        let r = sp.relevant[slot % k];
        st.known[r][v] |= 1 << v;
        for bit in [0u64, 1] {
            st.succ[r][v] = (st.succ[r][v] & !(1 << v)) | bit << v;
            if !self.tick() {
                return false;
            }
            if self.violated(st) {
                continue;
            }
            if slot % k == k - 1
                && v >= 2
                && st.val[v - 1] == st.val[v]
                && sp.point_key(st, v - 1) == sp.point_key(st, v)
                && sp.diag_key(st, v - 1) > sp.diag_key(st, v)
            {
                continue;
            }
            if !self.diagonal(st, slot + 1) {
                return false;
            }
        }
        st.known[r][v] &= !(1 << v);
        st.succ[r][v] &= !(1 << v);
        true
    }

    fn after_diagonal(&mut self, st: &mut Partial) -> bool {
        let sp = self.sp;
        if !sp.pr_ok(st) {
            return true;
        }
        let rcirc = sp.rcirc(st);
        if sp.exhaustive {
            return self.tail(st, 0, &rcirc);
        }
        let saved = st.clone();
        for v in 1..sp.n {
            if !self.complete_world(st, v, &rcirc) {
                let aborted = self.aborted;
                *st = saved;
                return !aborted;
            }
        }
        let keep_going = self.families(st, 0, &rcirc, true, |walker, st| {
            if walker.satisfied(st) {
                walker.emit(st)
            } else {
                true
            }
        });
        *st = saved;
        keep_going
    }

    /// Picks the first assignment of `v`'s off-diagonal bits and family that
    /// satisfies the local frame conditions.
    fn complete_world(&mut self, st: &mut Partial, v: usize, rcirc: &[u64]) -> bool {
        let sp = self.sp;
        let width = sp.n - 1;
        // σ varies fastest: it is the most constrained
        let mut order = sp.relevant.clone();
        if let Some(s) = sp.sigma {
            order.retain(|&r| r != s);
            order.insert(0, s);
        }
        let off: Vec<u64> = sp.submasks(sp.all & !(1 << v)).collect();
        let total = 1u64 << (width * order.len());
        for c in 0..total {
            if !self.tick() {
                return false;
            }
            for (j, &r) in order.iter().enumerate() {
                let pick = (c >> (j * width)) & ((1 << width) - 1);
                st.succ[r][v] = (st.succ[r][v] & 1 << v) | off[pick as usize];
                st.known[r][v] = sp.all;
            }
            let mut found = None;
            let ok = self.families(st, v, rcirc, false, |_, st| {
                found = st.fam[v];
                false
            });
            if let Some(f) = found {
                st.fam[v] = Some(f);
                return true;
            }
            if !ok && self.aborted {
                return false;
            }
        }
        false
    }

    /// Calls `each` with every distinct valid family at `w` in seed order;
    /// stops when `each` returns false.
    fn families<F>(&mut self, st: &mut Partial, w: usize, rcirc: &[u64], with_args: bool, mut each: F) -> bool
    where
        F: FnMut(&mut Self, &mut Partial) -> bool,
    {
        let sp = self.sp;
        let mut seeds: Vec<u64> = Vec::new();
        let push = |seeds: &mut Vec<u64>, x: u64| {
            if !seeds.contains(&x) {
                seeds.push(x);
            }
        };
        for &x in rcirc {
            push(&mut seeds, x);
        }
        if with_args {
            st.evaluate(sp.g, &mut self.scratch);
            let mut unknown = false;
            for &a in &sp.g.belief_args {
                let (t, f) = self.scratch[a as usize];
                if t | f == sp.all {
                    push(&mut seeds, t);
                } else {
                    unknown = true;
                }
            }
            if unknown {
                for x in 0..=sp.all {
                    push(&mut seeds, x);
                }
            }
        }
        let base = match sp.sigma {
            Some(s) => 1u64 << rcirc[s],
            None => 0,
        };
        let mut seen = HashSet::new();
        let mut combos = Combos::new(seeds.len(), sp.max_seeds);
        let previous = st.fam[w];
        let mut keep_going = true;
        while let Some(pick) = combos.next() {
            if !self.tick() {
                keep_going = false;
                break;
            }
            let chosen = pick.iter().fold(base, |acc, &i| acc | 1 << seeds[i]);
            let fam = sp.closure(st, w, rcirc, chosen);
            if !seen.insert(fam) || !sp.valid_at(st, w, rcirc, fam) {
                continue;
            }
            st.fam[w] = Some(fam);
            if !each(self, st) {
                keep_going = false;
                break;
            }
        }
        st.fam[w] = previous;
        keep_going
    }

    /// Enumerates the off-diagonal bits of the non-point worlds, then the
    /// families of every world.
    fn tail(&mut self, st: &mut Partial, slot: usize, rcirc: &[u64]) -> bool {
        let sp = self.sp;
        let k = sp.relevant.len();
        if k == 0 || slot == (sp.n - 1) * k {
            return self.all_families(st, 0, rcirc);
        }
        let v = 1 + slot / k;
        let r = sp.relevant[slot % k];
        let diag = st.succ[r][v] & 1 << v;
        st.known[r][v] = sp.all;
        let off: Vec<u64> = sp.submasks(sp.all & !(1 << v)).collect();
        for sub in off {
            st.succ[r][v] = diag | sub;
            if !self.tick() {
                return false;
            }
            if self.violated(st) {
                continue;
            }
            if !self.tail(st, slot + 1, rcirc) {
                return false;
            }
        }
        st.succ[r][v] = diag;
        st.known[r][v] = 1 << v;
        true
    }

    fn all_families(&mut self, st: &mut Partial, w: usize, rcirc: &[u64]) -> bool {
        if w == self.sp.n {
            let done = match self.sink {
                Sink::Count(_) => true,
                Sink::Collect { .. } => self.satisfied(st),
            };
            return if done { self.emit(st) } else { true };
        }
        self.families(st, w, rcirc, true, |walker, st| {
            if walker.violated(st) {
                return true;
            }
            walker.all_families(st, w + 1, rcirc)
        })
    }
}
