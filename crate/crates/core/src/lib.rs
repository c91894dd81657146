//! Deciding isomorphism of regular trees, regular linear orders and regular
//! words presented by finite automata, in polynomial time, together with
//! generators for the classic hardness gadgets used as end-to-end self-tests.

pub mod accept;
pub mod automata;
pub mod corpus;
pub mod cli;
pub mod treeiso;
pub mod gadgets;
pub mod heilbrunner;
pub mod isocore;
pub mod words;
pub mod error;
pub mod slp;

pub use error::{Error, Result};
