//! A natural-style theorem prover for first-order logic.
//!
//! Proofs are finite AND/OR trees of proof situations. The prover searches
//! them depth-first under a configurable rule set and resource limits, and the
//! resulting trees can be simplified and rendered as prose.

#[cfg(feature = "arbitrary")]
pub mod arbitrary;
pub mod corpus;
pub mod document;
pub mod formula;
pub mod kernel;
pub mod present;
pub mod search;
