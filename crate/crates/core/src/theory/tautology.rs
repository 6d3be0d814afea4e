//! Propositional skeletons and truth-table validity.

use super::TheoryError;
use crate::syntax::Formula;

/// Truth tables are limited to this many skeleton atoms (65536 rows).
pub const MAX_SKELETON_ATOMS: usize = 16;

/// A formula's Boolean shape over opaque atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Skeleton {
    Atom(usize),
    Not(Box<Skeleton>),
    Or(Box<Skeleton>, Box<Skeleton>),
}

impl Skeleton {
    pub fn eval(&self, assignment: u32) -> bool {
        match self {
            Skeleton::Atom(i) => assignment >> i & 1 == 1,
            Skeleton::Not(a) => !a.eval(assignment),
            Skeleton::Or(a, b) => a.eval(assignment) || b.eval(assignment),
        }
    }
}

/// Builds the skeleton, collecting the distinct maximal non-Boolean
/// subformulas into `atoms` (structurally equal subformulas share one atom).
pub fn skeleton(f: &Formula, atoms: &mut Vec<Formula>) -> Skeleton {
    match f {
        Formula::Not(a) => Skeleton::Not(Box::new(skeleton(a, atoms))),
        Formula::Or(a, b) => Skeleton::Or(Box::new(skeleton(a, atoms)), Box::new(skeleton(b, atoms))),
        other => {
            let idx = match atoms.iter().position(|a| a == other) {
                Some(i) => i,
                None => {
                    atoms.push(other.clone());
                    atoms.len() - 1
                }
            };
            Skeleton::Atom(idx)
        }
    }
}

/// Decides whether the propositional skeleton of `f` is a tautology.
pub fn check_tautology(f: &Formula) -> Result<bool, TheoryError> {
    let mut atoms = Vec::new();
    let sk = skeleton(f, &mut atoms);
    if atoms.len() > MAX_SKELETON_ATOMS {
        return Err(TheoryError::SkeletonTooLarge {
            atoms: atoms.len(),
            limit: MAX_SKELETON_ATOMS,
        });
    }
    let rows = 1u32 << atoms.len();
    Ok((0..rows).all(|row| sk.eval(row)))
}

/// `true` iff `f` is a classical tautology instance; oversize skeletons
/// count as non-instances.
pub fn is_tautology_instance(f: &Formula) -> bool {
    check_tautology(f).unwrap_or(false)
}
