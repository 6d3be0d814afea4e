use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{SchemeId, TheoryError};
use crate::parser::{self, ParseError, Signature, RESERVED};
use crate::syntax::{Formula, ReasonTerm, Symbol};

/// The named members of the theory family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoryKind {
    Rbb,
    RbbSigma,
    RbbSigmaPlus,
    Qrbb,
    QrbbSigma,
    QrbbSigmaPlus,
    RbbApp,
}

impl TheoryKind {
    pub const ALL: [TheoryKind; 7] = [
        TheoryKind::Rbb,
        TheoryKind::RbbSigma,
        TheoryKind::RbbSigmaPlus,
        TheoryKind::Qrbb,
        TheoryKind::QrbbSigma,
        TheoryKind::QrbbSigmaPlus,
        TheoryKind::RbbApp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoryKind::Rbb => "RBB",
            TheoryKind::RbbSigma => "RBBs",
            TheoryKind::RbbSigmaPlus => "RBBs+",
            TheoryKind::Qrbb => "QRBB",
            TheoryKind::QrbbSigma => "QRBBs",
            TheoryKind::QrbbSigmaPlus => "QRBBs+",
            TheoryKind::RbbApp => "RBB+App",
        }
    }

    pub fn flags(self) -> TheoryFlags {
        let (quantified, sigma, sigma_plus, app) = match self {
            TheoryKind::Rbb => (false, false, false, false),
            TheoryKind::RbbSigma => (false, true, false, false),
            TheoryKind::RbbSigmaPlus => (false, true, true, false),
            TheoryKind::Qrbb => (true, false, false, false),
            TheoryKind::QrbbSigma => (true, true, false, false),
            TheoryKind::QrbbSigmaPlus => (true, true, true, false),
            TheoryKind::RbbApp => (false, false, false, true),
        };
        TheoryFlags {
            quantified,
            sigma,
            sigma_plus,
            app,
        }
    }

    pub fn from_flags(flags: TheoryFlags) -> Result<Self, TheoryError> {
        TheoryKind::ALL
            .into_iter()
            .find(|k| k.flags() == flags)
            .ok_or_else(|| TheoryError::InvalidConfig(format!("no theory has flags {flags:?}")))
    }
}

impl fmt::Display for TheoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoryKind {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoryKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| TheoryError::UnknownTheory(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TheoryFlags {
    pub quantified: bool,
    pub sigma: bool,
    pub sigma_plus: bool,
    pub app: bool,
}

/// A theory together with its declared alphabets.
///
/// `reasons` holds the basic reasons (R₀); σ is implied by the sigma flag
/// and never stored here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryConfig {
    kind: TheoryKind,
    reasons: BTreeSet<Symbol>,
    letters: BTreeSet<Symbol>,
    allow_overlap: bool,
}

#[derive(Serialize, Deserialize)]
struct ConfigDoc {
    theory: String,
    #[serde(default)]
    reasons: Vec<String>,
    #[serde(default)]
    letters: Vec<String>,
    #[serde(default)]
    allow_overlap: bool,
}

impl TheoryConfig {
    pub fn new<R, L>(kind: TheoryKind, reasons: R, letters: L) -> Result<Self, TheoryError>
    where
        R: IntoIterator,
        R::Item: AsRef<str>,
        L: IntoIterator,
        L::Item: AsRef<str>,
    {
        Self::build(kind, reasons, letters, false)
    }

    pub fn with_overlap<R, L>(kind: TheoryKind, reasons: R, letters: L) -> Result<Self, TheoryError>
    where
        R: IntoIterator,
        R::Item: AsRef<str>,
        L: IntoIterator,
        L::Item: AsRef<str>,
    {
        Self::build(kind, reasons, letters, true)
    }

    fn build<R, L>(kind: TheoryKind, reasons: R, letters: L, allow_overlap: bool) -> Result<Self, TheoryError>
    where
        R: IntoIterator,
        R::Item: AsRef<str>,
        L: IntoIterator,
        L::Item: AsRef<str>,
    {
        let mut rs = BTreeSet::new();
        for r in reasons {
            let r = r.as_ref();
            // "sigma" in a reason list just acknowledges σ
            if r == "sigma" || r == "σ" {
                if !kind.flags().sigma {
                    return Err(TheoryError::InvalidConfig(format!(
                        "sigma declared but {kind} has no master reason"
                    )));
                }
                continue;
            }
            check_name(r)?;
            rs.insert(Symbol::new(r));
        }
        let mut ls = BTreeSet::new();
        for l in letters {
            check_name(l.as_ref())?;
            ls.insert(Symbol::new(l.as_ref()));
        }
        if !allow_overlap {
            if let Some(both) = rs.intersection(&ls).next() {
                return Err(TheoryError::InvalidConfig(format!(
                    "`{both}` is both a letter and a reason; set allow_overlap to permit this"
                )));
            }
        }
        Ok(TheoryConfig {
            kind,
            reasons: rs,
            letters: ls,
            allow_overlap,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, TheoryError> {
        let doc: ConfigDoc = serde_json::from_str(text).map_err(|e| TheoryError::InvalidConfig(e.to_string()))?;
        Self::from_value_parts(&doc.theory, &doc.reasons, &doc.letters, doc.allow_overlap)
    }

    pub fn from_value(value: &serde_json::Value) -> Result<Self, TheoryError> {
        let doc: ConfigDoc =
            serde_json::from_value(value.clone()).map_err(|e| TheoryError::InvalidConfig(e.to_string()))?;
        Self::from_value_parts(&doc.theory, &doc.reasons, &doc.letters, doc.allow_overlap)
    }

    fn from_value_parts(theory: &str, reasons: &[String], letters: &[String], overlap: bool) -> Result<Self, TheoryError> {
        let kind: TheoryKind = theory.parse()?;
        Self::build(kind, reasons, letters, overlap)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = ConfigDoc {
            theory: self.kind.name().to_string(),
            reasons: self.reasons.iter().map(|s| s.to_string()).collect(),
            letters: self.letters.iter().map(|s| s.to_string()).collect(),
            allow_overlap: self.allow_overlap,
        };
        serde_json::to_value(doc).expect("config serializes")
    }

    pub fn kind(&self) -> TheoryKind {
        self.kind
    }

    pub fn flags(&self) -> TheoryFlags {
        self.kind.flags()
    }

    pub fn basic_reasons(&self) -> &BTreeSet<Symbol> {
        &self.reasons
    }

    pub fn letters(&self) -> &BTreeSet<Symbol> {
        &self.letters
    }

    pub fn allow_overlap(&self) -> bool {
        self.allow_overlap
    }

    /// Same theory over different alphabets.
    pub fn with_alphabets<R, L>(&self, reasons: R, letters: L) -> Result<Self, TheoryError>
    where
        R: IntoIterator,
        R::Item: AsRef<str>,
        L: IntoIterator,
        L::Item: AsRef<str>,
    {
        Self::build(self.kind, reasons, letters, self.allow_overlap)
    }

    /// Same alphabets, different theory.
    pub fn with_kind(&self, kind: TheoryKind) -> Self {
        TheoryConfig {
            kind,
            ..self.clone()
        }
    }

    /// The atomic reasons of R: the basic reasons, plus σ in σ theories.
    /// This is also the range of the substitutional quantifier.
    pub fn atomic_reasons(&self) -> Vec<ReasonTerm> {
        let mut out: Vec<ReasonTerm> = self.reasons.iter().cloned().map(ReasonTerm::Basic).collect();
        if self.flags().sigma {
            out.push(ReasonTerm::Sigma);
        }
        out
    }

    pub fn signature(&self) -> Signature {
        Signature {
            reasons: self.reasons.clone(),
            letters: Some(self.letters.clone()),
        }
    }

    pub fn parse(&self, text: &str) -> Result<Formula, ParseError> {
        parser::parse(text, &self.signature())
    }

    pub fn enabled_schemes(&self) -> Vec<SchemeId> {
        SchemeId::PRIORITY
            .into_iter()
            .filter(|s| self.scheme_enabled(*s))
            .collect()
    }

    pub fn scheme_enabled(&self, scheme: SchemeId) -> bool {
        let f = self.flags();
        match scheme {
            SchemeId::Cl | SchemeId::A | SchemeId::Rb | SchemeId::D => true,
            SchemeId::Rk => !f.app,
            SchemeId::Ud | SchemeId::Ui | SchemeId::Ep | SchemeId::En => f.quantified,
            SchemeId::Ma | SchemeId::Mb | SchemeId::Mr => f.sigma,
            SchemeId::Mt => f.sigma_plus,
            SchemeId::App => f.app,
        }
    }

    /// True when every scheme and rule of `other` is available here, so a
    /// theorem of `other` is a theorem of `self`.
    pub fn extends(&self, other: &TheoryConfig) -> bool {
        let schemes_ok = SchemeId::PRIORITY
            .into_iter()
            .all(|s| !other.scheme_enabled(s) || self.scheme_enabled(s));
        let gen_ok = !other.flags().quantified || self.flags().quantified;
        // RBB+App restricts (RN); an unrestricted (RN) theorem may not be reused there
        let rn_ok = !self.flags().app || other.flags().app;
        schemes_ok && gen_ok && rn_ok
    }

    /// Checks that `f` only uses the declared alphabets and constructs
    /// available in this theory. Bound variables need not be declared.
    pub fn check_formula(&self, f: &Formula) -> Result<(), TheoryError> {
        let flags = self.flags();
        if f.mentions_sigma() && !flags.sigma {
            return Err(TheoryError::Undeclared(format!("sigma is not available in {}", self.kind)));
        }
        if f.has_app() && !flags.app {
            return Err(TheoryError::Undeclared(format!(
                "compound reasons are only available in RBB+App, not {}",
                self.kind
            )));
        }
        if !flags.quantified && (f.has_quantifier() || f.has_equality()) {
            return Err(TheoryError::Undeclared(format!(
                "quantifiers and reason equality need a quantified theory, not {}",
                self.kind
            )));
        }
        for r in f.free_reasons() {
            if !self.reasons.contains(&r) {
                return Err(TheoryError::Undeclared(format!("reason `{r}` is not declared")));
            }
        }
        for p in f.letters() {
            if !self.letters.contains(&p) {
                return Err(TheoryError::Undeclared(format!("letter `{p}` is not declared")));
            }
        }
        Ok(())
    }

    pub fn check_reason(&self, r: &ReasonTerm) -> Result<(), TheoryError> {
        self.check_formula(&Formula::adequate(r.clone()))
    }
}

fn check_name(name: &str) -> Result<(), TheoryError> {
    let valid = name
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
    if !valid || RESERVED.contains(&name) {
        return Err(TheoryError::InvalidConfig(format!("`{name}` is not a usable symbol name")));
    }
    Ok(())
}
