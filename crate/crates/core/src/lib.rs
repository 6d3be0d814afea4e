//! Reason-based belief: formulas over reasons and belief, Hilbert-style
//! proof checking, neighborhood-model semantics and bounded model search.

pub mod cli;
pub mod corpus;
pub mod jtb;
pub mod parser;
pub mod proof;
pub mod search;
pub mod semantics;
pub mod syntax;
pub mod theory;
