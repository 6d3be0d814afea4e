//! Seeded generators: random validated models, random formulas, axiom
//! instances per scheme, and exhaustive enumeration of small models.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use thiserror::Error;

use crate::semantics::{validate_model, Model, WorldSet};
use crate::syntax::{Formula, ReasonTerm, Symbol};
use crate::theory::{check_tautology, SchemeId, TheoryConfig, TheoryKind};

pub const DEFAULT_SEED: u64 = 0x5eed;

/// The theory classes with a semantics.
pub const MODEL_CLASSES: [TheoryKind; 6] = [
    TheoryKind::Rbb,
    TheoryKind::RbbSigma,
    TheoryKind::RbbSigmaPlus,
    TheoryKind::Qrbb,
    TheoryKind::QrbbSigma,
    TheoryKind::QrbbSigmaPlus,
];

const REASONS: [&str; 3] = ["r", "s", "t"];
const LETTERS: [&str; 3] = ["p", "q", "u"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("{0} has no semantics")]
    NoSemantics(String),
    #[error("model space of {0} candidates is too large to enumerate")]
    SpaceTooLarge(u128),
    #[error("scheme {scheme} has no instances over {reasons} atomic reason(s)")]
    NoInstances { scheme: SchemeId, reasons: usize },
    #[error("gave up generating a valid model after {0} attempts")]
    GaveUp(usize),
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The alphabet with the first `reasons` reasons and `letters` letters of
/// `r, s, t` and `p, q, u`.
pub fn alphabet(kind: TheoryKind, reasons: usize, letters: usize) -> TheoryConfig {
    TheoryConfig::new(kind, &REASONS[..reasons.min(3)], &LETTERS[..letters.min(3)]).expect("fixed alphabets are disjoint")
}

/// All nine alphabets with one to three reasons and letters.
pub fn alphabets(kind: TheoryKind) -> Vec<TheoryConfig> {
    let mut out = Vec::new();
    for r in 1..=3 {
        for p in 1..=3 {
            out.push(alphabet(kind, r, p));
        }
    }
    out
}

fn random_set<R: Rng>(rng: &mut R, n: usize, density: f64) -> WorldSet {
    (0..n).filter(|_| rng.gen_bool(density)).collect()
}

fn reflexive(succ: &[WorldSet]) -> WorldSet {
    (0..succ.len()).filter(|&w| succ[w].contains(w)).collect()
}

fn up_closure(family: &mut Vec<WorldSet>, base: WorldSet, n: usize) {
    let all = WorldSet::full(n);
    let free = all.0 & !base.0;
    let mut sub = free;
    loop {
        let x = WorldSet(base.0 | sub);
        if !family.contains(&x) {
            family.push(x);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
}

/// A random model with 1..=`max_worlds` worlds satisfying every frame
/// condition of `cfg`'s class.
///
/// Relations and seed sets are drawn at random, families are closed under
/// (rb), and the conditions linking σ to accepted reasons are repaired by
/// enlarging successor sets; the result is then checked by
/// [`validate_model`] and redrawn on failure.
pub fn random_model<R: Rng>(cfg: &TheoryConfig, max_worlds: usize, rng: &mut R) -> Result<Model, CorpusError> {
    if cfg.flags().app {
        return Err(CorpusError::NoSemantics(cfg.kind().to_string()));
    }
    const ATTEMPTS: usize = 10_000;
    let flags = cfg.flags();
    let reasons = cfg.atomic_reasons();
    let sigma = reasons.iter().position(|r| *r == ReasonTerm::Sigma);
    let letters: Vec<Symbol> = cfg.letters().iter().cloned().collect();
    for _ in 0..ATTEMPTS {
        let n = rng.gen_range(1..=max_worlds.max(1));
        let density = rng.gen_range(0.2..0.8);
        let mut rel: Vec<Vec<WorldSet>> = reasons
            .iter()
            .map(|_| (0..n).map(|_| random_set(rng, n, density)).collect())
            .collect();
        if let Some(s) = sigma {
            if flags.sigma_plus || rng.gen_bool(0.7) {
                // σ(w) ⊆ σ°, as (mt) requires once σ° is believed
                let mut d = random_set(rng, n, 0.6);
                if d.is_empty() {
                    d.insert(rng.gen_range(0..n));
                }
                for w in 0..n {
                    let mut x = random_set(rng, n, 0.5).intersection(d);
                    if d.contains(w) {
                        x.insert(w);
                    } else if x.is_empty() {
                        x.insert(d.iter().next().expect("nonempty"));
                    }
                    rel[s][w] = x;
                }
            }
        }
        // seeds per world: reasons whose r° is believed, and free sets
        let seeds: Vec<(Vec<usize>, Vec<WorldSet>)> = (0..n)
            .map(|w| {
                let picked = (0..reasons.len()).filter(|_| rng.gen_bool(0.35)).collect();
                let extra = (0..rng.gen_range(0..=2))
                    .map(|_| {
                        let x = random_set(rng, n, 0.5);
                        match sigma {
                            Some(s) if flags.sigma_plus => x.union(rel[s][w]),
                            _ => x,
                        }
                    })
                    .collect();
                (picked, extra)
            })
            .collect();
        let mut families: Vec<Vec<WorldSet>> = vec![Vec::new(); n];
        for _round in 0..8 {
            let circ: Vec<WorldSet> = rel.iter().map(|succ| reflexive(succ)).collect();
            let mut changed = false;
            for w in 0..n {
                let mut fam: Vec<WorldSet> = seeds[w].1.clone();
                for &r in &seeds[w].0 {
                    if !fam.contains(&circ[r]) {
                        fam.push(circ[r]);
                    }
                }
                if let Some(s) = sigma {
                    if !fam.contains(&circ[s]) {
                        fam.push(circ[s]);
                    }
                }
                loop {
                    let before = fam.len();
                    for (r, succ) in rel.iter().enumerate() {
                        if fam.contains(&circ[r]) {
                            up_closure(&mut fam, succ[w], n);
                        }
                    }
                    if fam.len() == before {
                        break;
                    }
                }
                if let Some(s) = sigma {
                    let sw = rel[s][w];
                    for r in 0..reasons.len() {
                        if !fam.contains(&circ[r]) {
                            continue;
                        }
                        let mut fixed = rel[r][w].union(sw);
                        if sw.contains(w) {
                            fixed.insert(w);
                        }
                        if fixed != rel[r][w] {
                            rel[r][w] = fixed;
                            changed = true;
                        }
                    }
                }
                families[w] = fam;
            }
            if !changed {
                break;
            }
        }
        let mut m = Model::with_size(n).expect("small model");
        for (r, succ) in reasons.iter().zip(&rel) {
            m.declare_reason(r.clone()).expect("atomic");
            for (w, x) in succ.iter().enumerate() {
                m.set_successors(r, w, *x).expect("in range");
            }
        }
        for (w, fam) in families.into_iter().enumerate() {
            m.set_neighborhoods(w, fam.into_iter().collect()).expect("in range");
            for p in &letters {
                if rng.gen_bool(0.5) {
                    m.set_letter(w, p.clone(), true).expect("in range");
                }
            }
        }
        m.set_point(0).expect("in range");
        if validate_model(&m, cfg).map(|rep| rep.is_empty()).unwrap_or(false) {
            return Ok(m);
        }
    }
    Err(CorpusError::GaveUp(ATTEMPTS))
}

/// `count` validated models of `kind`, spread over [`alphabets`].
pub fn model_corpus(kind: TheoryKind, count: usize, max_worlds: usize, seed: u64) -> Result<Vec<(TheoryConfig, Model)>, CorpusError> {
    let mut rng = rng(seed ^ kind as u64);
    let alphabets = alphabets(kind);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let cfg = &alphabets[i % alphabets.len()];
        out.push((cfg.clone(), random_model(cfg, max_worlds, &mut rng)?));
    }
    Ok(out)
}

/// Random formulas over a theory's alphabet.
pub struct FormulaGen<'a> {
    cfg: &'a TheoryConfig,
    atoms: Vec<ReasonTerm>,
    letters: Vec<Symbol>,
    binders: Vec<Symbol>,
}

impl<'a> FormulaGen<'a> {
    pub fn new(cfg: &'a TheoryConfig) -> Self {
        let mut binders: Vec<Symbol> = cfg.basic_reasons().iter().cloned().collect();
        binders.push(Symbol::new("v"));
        FormulaGen {
            cfg,
            atoms: cfg.atomic_reasons(),
            letters: cfg.letters().iter().cloned().collect(),
            binders,
        }
    }

    /// A reason term: declared, or bound by an enclosing quantifier.
    fn term<R: Rng>(&self, rng: &mut R, scope: &[Symbol]) -> ReasonTerm {
        if !scope.is_empty() && rng.gen_bool(0.5) {
            return ReasonTerm::Basic(scope.choose(rng).expect("nonempty").clone());
        }
        self.atoms.choose(rng).expect("at least one reason").clone()
    }

    pub fn formula<R: Rng>(&self, rng: &mut R, depth: usize) -> Formula {
        self.scoped(rng, depth, &mut Vec::new())
    }

    /// A formula in which the symbols of `scope` may occur free.
    pub fn scoped<R: Rng>(&self, rng: &mut R, depth: usize, scope: &mut Vec<Symbol>) -> Formula {
        let quantified = self.cfg.flags().quantified;
        if depth == 0 || rng.gen_bool(0.2) {
            return match rng.gen_range(0..10) {
                0..=5 => Formula::Letter(self.letters.choose(rng).expect("at least one letter").clone()),
                6..=8 => Formula::adequate(self.term(rng, scope)),
                _ if quantified => Formula::eq(self.term(rng, scope), self.term(rng, scope)),
                _ => Formula::adequate(self.term(rng, scope)),
            };
        }
        let d = depth - 1;
        match rng.gen_range(0..if quantified { 9 } else { 8 }) {
            0 => Formula::not(self.scoped(rng, d, scope)),
            1 => Formula::or(self.scoped(rng, d, scope), self.scoped(rng, d, scope)),
            2 => Formula::and(self.scoped(rng, d, scope), self.scoped(rng, d, scope)),
            3 => Formula::implies(self.scoped(rng, d, scope), self.scoped(rng, d, scope)),
            4 | 5 => Formula::supports(self.term(rng, scope), self.scoped(rng, d, scope)),
            6 | 7 => Formula::believes(self.scoped(rng, d, scope)),
            _ => {
                let v = self.binders.choose(rng).expect("nonempty").clone();
                scope.push(v.clone());
                let body = self.scoped(rng, d, scope);
                scope.pop();
                Formula::forall(v, body)
            }
        }
    }

    /// An instance of `scheme` built from random formulas of at most
    /// `depth`.
    pub fn axiom<R: Rng>(&self, scheme: SchemeId, rng: &mut R, depth: usize) -> Result<Formula, CorpusError> {
        let phi = self.formula(rng, depth);
        let psi = self.formula(rng, depth);
        let r = self.term(rng, &[]);
        Ok(match scheme {
            SchemeId::Cl => self.tautology(rng, depth),
            SchemeId::Rk => Formula::implies(
                Formula::supports(r.clone(), Formula::implies(phi.clone(), psi.clone())),
                Formula::implies(Formula::supports(r.clone(), phi), Formula::supports(r, psi)),
            ),
            SchemeId::A => Formula::implies(
                Formula::supports(r.clone(), phi.clone()),
                Formula::implies(Formula::adequate(r), phi),
            ),
            SchemeId::Rb => Formula::implies(
                Formula::supports(r.clone(), phi.clone()),
                Formula::implies(Formula::believes(Formula::adequate(r)), Formula::believes(phi)),
            ),
            SchemeId::D => Formula::implies(
                Formula::believes(phi.clone()),
                Formula::not(Formula::believes(Formula::not(phi))),
            ),
            SchemeId::Ud => {
                let v = self.binders.choose(rng).expect("nonempty").clone();
                let phi = if phi.is_free(&v) { Formula::forall(v.clone(), phi) } else { phi };
                let psi = self.scoped(rng, depth, &mut vec![v.clone()]);
                Formula::implies(
                    Formula::forall(v.clone(), Formula::implies(phi.clone(), psi.clone())),
                    Formula::implies(phi, Formula::forall(v, psi)),
                )
            }
            SchemeId::Ui => {
                let v = self.binders.choose(rng).expect("nonempty").clone();
                // redraw until some atom is free for `v`; a body without `v`
                // always admits one
                let (body, s) = (0..16)
                    .find_map(|_| {
                        let body = self.scoped(rng, depth, &mut vec![v.clone()]);
                        let candidates: Vec<&ReasonTerm> =
                            self.atoms.iter().filter(|s| body.is_free_for(s, &v)).collect();
                        candidates.choose(rng).map(|s| (body.clone(), (*s).clone()))
                    })
                    .unwrap_or_else(|| (phi.clone(), r.clone()));
                let inst = body.substitute(&v, &s).expect("free for");
                Formula::implies(Formula::forall(v, body), inst)
            }
            SchemeId::Ep => Formula::eq(r.clone(), r),
            SchemeId::En => {
                if self.atoms.len() < 2 {
                    return Err(CorpusError::NoInstances {
                        scheme,
                        reasons: self.atoms.len(),
                    });
                }
                let mut pair: Vec<&ReasonTerm> = self.atoms.choose_multiple(rng, 2).collect();
                pair.shuffle(rng);
                Formula::neq(pair[0].clone(), pair[1].clone())
            }
            SchemeId::Ma => Formula::implies(
                Formula::adequate(ReasonTerm::Sigma),
                Formula::implies(Formula::believes(Formula::adequate(r.clone())), Formula::adequate(r)),
            ),
            SchemeId::Mb => Formula::believes(Formula::adequate(ReasonTerm::Sigma)),
            SchemeId::Mr => Formula::implies(
                Formula::supports(r.clone(), phi.clone()),
                Formula::implies(
                    Formula::believes(Formula::adequate(r)),
                    Formula::supports(ReasonTerm::Sigma, phi),
                ),
            ),
            SchemeId::Mt => Formula::implies(Formula::believes(phi.clone()), Formula::supports(ReasonTerm::Sigma, phi)),
            SchemeId::App => return Err(CorpusError::NoSemantics("APP".to_string())),
        })
    }

    fn tautology<R: Rng>(&self, rng: &mut R, depth: usize) -> Formula {
        let a = self.formula(rng, depth);
        let b = self.formula(rng, depth);
        let c = self.formula(rng, depth);
        let (imp, or, and, not, iff) = (Formula::implies, Formula::or, Formula::and, Formula::not, Formula::iff);
        let f = match rng.gen_range(0..10) {
            0 => imp(a.clone(), imp(b, a)),
            1 => imp(
                imp(a.clone(), imp(b.clone(), c.clone())),
                imp(imp(a.clone(), b), imp(a, c)),
            ),
            2 => imp(imp(not(a.clone()), not(b.clone())), imp(b, a)),
            3 => or(a.clone(), not(a)),
            4 => imp(and(a.clone(), b.clone()), and(b, a)),
            5 => imp(imp(a.clone(), b.clone()), imp(not(b), not(a))),
            6 => imp(a.clone(), or(a, b)),
            7 => iff(not(not(a.clone())), a),
            8 => imp(iff(a.clone(), b.clone()), imp(a, b)),
            _ => iff(
                and(a.clone(), or(b.clone(), c.clone())),
                or(and(a.clone(), b), and(a, c)),
            ),
        };
        debug_assert_eq!(check_tautology(&f).ok(), Some(true));
        f
    }
}

/// `count` instances of `scheme` over `cfg`.
pub fn axiom_corpus(cfg: &TheoryConfig, scheme: SchemeId, count: usize, seed: u64) -> Result<Vec<Formula>, CorpusError> {
    let mut rng = rng(seed ^ (scheme as u64) << 8);
    let gen = FormulaGen::new(cfg);
    (0..count).map(|_| gen.axiom(scheme, &mut rng, 2)).collect()
}

/// Every model with exactly `worlds` worlds over `cfg`'s atomic reasons and
/// letters, addressed by index.
pub struct ModelSpace {
    n: usize,
    reasons: Vec<ReasonTerm>,
    letters: Vec<Symbol>,
    val_bits: u32,
    rel_bits: u32,
    fam_bits: u32,
}

impl ModelSpace {
    pub const LIMIT: u128 = 1 << 26;

    pub fn new(cfg: &TheoryConfig, worlds: usize) -> Result<Self, CorpusError> {
        let reasons = cfg.atomic_reasons();
        let letters: Vec<Symbol> = cfg.letters().iter().cloned().collect();
        let n = worlds;
        let val_bits = (letters.len() * n) as u32;
        let rel_bits = (reasons.len() * n * n) as u32;
        let fam_bits = ((1usize << n) * n) as u32;
        let total_bits = val_bits + rel_bits + fam_bits;
        if total_bits >= 127 || 1u128 << total_bits > Self::LIMIT {
            return Err(CorpusError::SpaceTooLarge(1u128.checked_shl(total_bits).unwrap_or(u128::MAX)));
        }
        Ok(ModelSpace {
            n,
            reasons,
            letters,
            val_bits,
            rel_bits,
            fam_bits,
        })
    }

    pub fn len(&self) -> u64 {
        1 << (self.val_bits + self.rel_bits + self.fam_bits)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn split(&self, index: u64) -> (u64, u64, u64) {
        let val = index & ((1 << self.val_bits) - 1);
        let rel = (index >> self.val_bits) & ((1 << self.rel_bits) - 1);
        let fam = index >> (self.val_bits + self.rel_bits);
        (val, rel, fam)
    }

    pub fn model(&self, index: u64) -> Model {
        let n = self.n;
        let (val, rel, fam) = self.split(index);
        let mut m = Model::with_size(n).expect("small model");
        for (i, r) in self.reasons.iter().enumerate() {
            m.declare_reason(r.clone()).expect("atomic");
            for w in 0..n {
                let shift = (i * n + w) * n;
                m.set_successors(r, w, WorldSet((rel >> shift) & ((1 << n) - 1))).expect("in range");
            }
        }
        let subsets = 1usize << n;
        for w in 0..n {
            let bits = (fam >> (w * subsets)) & ((1u64 << subsets) - 1);
            let family = (0..subsets as u64).filter(|x| bits >> x & 1 == 1).map(WorldSet).collect();
            m.set_neighborhoods(w, family).expect("in range");
            for (p, sym) in self.letters.iter().enumerate() {
                if val >> (w * self.letters.len() + p) & 1 == 1 {
                    m.set_letter(w, sym.clone(), true).expect("in range");
                }
            }
        }
        m.set_point(0).expect("in range");
        m
    }

    /// Index of the model obtained by renaming world `w` to `perm[w]`.
    fn permuted(&self, index: u64, perm: &[usize]) -> u64 {
        let n = self.n;
        let (val, rel, fam) = self.split(index);
        let lp = self.letters.len();
        let mut v2 = 0u64;
        for w in 0..n {
            let bits = (val >> (w * lp)) & ((1 << lp) - 1);
            v2 |= bits << (perm[w] * lp);
        }
        let map_set = |x: u64| -> u64 { (0..n).filter(|&v| x >> v & 1 == 1).fold(0, |acc, v| acc | 1 << perm[v]) };
        let mut r2 = 0u64;
        for i in 0..self.reasons.len() {
            for w in 0..n {
                let succ = (rel >> ((i * n + w) * n)) & ((1 << n) - 1);
                r2 |= map_set(succ) << ((i * n + perm[w]) * n);
            }
        }
        let subsets = 1usize << n;
        let mut f2 = 0u64;
        for w in 0..n {
            let bits = (fam >> (w * subsets)) & ((1u64 << subsets) - 1);
            let mut mapped = 0u64;
            for x in 0..subsets as u64 {
                if bits >> x & 1 == 1 {
                    mapped |= 1 << map_set(x);
                }
            }
            f2 |= mapped << (perm[w] * subsets);
        }
        v2 | r2 << self.val_bits | f2 << (self.val_bits + self.rel_bits)
    }

    /// Whether `index` is the least index among all renamings of its
    /// worlds. Every isomorphism class has exactly one canonical member.
    pub fn is_canonical(&self, index: u64) -> bool {
        let mut perm: Vec<usize> = (0..self.n).collect();
        loop {
            if !next_permutation(&mut perm) {
                return true;
            }
            if self.permuted(index, &perm) < index {
                return false;
            }
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::extension;
    use crate::theory::is_instance;

    #[test]
    fn random_models_are_valid_and_seeded() {
        for kind in MODEL_CLASSES {
            let a = model_corpus(kind, 30, 4, 7).unwrap();
            let b = model_corpus(kind, 30, 4, 7).unwrap();
            assert_eq!(a, b);
            for (cfg, m) in &a {
                assert!(validate_model(m, cfg).unwrap().is_empty());
            }
            // not all trivial
            assert!(a.iter().any(|(_, m)| (0..m.len()).any(|w| m.neighborhoods(w).len() > 1)));
        }
    }

    #[test]
    fn generated_axioms_match_their_scheme() {
        let cfg = alphabet(TheoryKind::QrbbSigmaPlus, 2, 2);
        for scheme in SchemeId::PRIORITY {
            if scheme == SchemeId::App {
                continue;
            }
            for f in axiom_corpus(&cfg, scheme, 200, 1).unwrap() {
                cfg.check_formula(&f).unwrap();
                assert!(f.free_reasons().is_subset(cfg.basic_reasons()), "{f}");
                if scheme == SchemeId::Cl {
                    assert_eq!(check_tautology(&f), Ok(true));
                } else {
                    assert!(is_instance(&f, scheme), "{scheme}: {f}");
                }
            }
        }
        let one = alphabet(TheoryKind::Qrbb, 1, 1);
        assert!(matches!(
            axiom_corpus(&one, SchemeId::En, 1, 1),
            Err(CorpusError::NoInstances { .. })
        ));
    }

    #[test]
    fn model_space_indexing() {
        let cfg = alphabet(TheoryKind::Rbb, 1, 1);
        let space = ModelSpace::new(&cfg, 2).unwrap();
        assert_eq!(space.len(), 1 << (2 + 4 + 8));
        // the two orderings of an asymmetric model: exactly one is canonical
        let i = 1 | 1 << 2 | 1 << (6 + 3);
        let j = space.permuted(i, &[1, 0]);
        assert_ne!(i, j);
        assert_eq!(space.permuted(j, &[1, 0]), i);
        assert!(space.is_canonical(i) != space.is_canonical(j));
        let (m, mj) = (space.model(i), space.model(j));
        let p = cfg.parse("p & ~B r").unwrap();
        assert_eq!(
            extension(&m, &p, &cfg).unwrap().len(),
            extension(&mj, &p, &cfg).unwrap().len()
        );
        assert!(matches!(
            ModelSpace::new(&alphabet(TheoryKind::Rbb, 3, 3), 3),
            Err(CorpusError::SpaceTooLarge(_))
        ));
    }

    #[test]
    fn frame_schemes_fail_off_frame() {
        // the instance corpus can tell validated models from arbitrary ones
        let cfg = alphabet(TheoryKind::QrbbSigmaPlus, 2, 1);
        let space = ModelSpace::new(&cfg, 2).unwrap();
        let mut rng = rng(3);
        let models: Vec<Model> = (0..200).map(|_| space.model(rng.gen_range(0..space.len()))).collect();
        for scheme in [SchemeId::D, SchemeId::Rb, SchemeId::Ma, SchemeId::Mb, SchemeId::Mr, SchemeId::Mt] {
            let fs = axiom_corpus(&cfg, scheme, 40, 1).unwrap();
            let caught = models
                .iter()
                .any(|m| fs.iter().any(|f| extension(m, f, &cfg).unwrap() != m.all()));
            assert!(caught, "{scheme}");
        }
    }
}
