//! HTTP service and command line for the prover.
//!
//! Prove requests become tasks on a FIFO worker pool. Finished proofs are
//! kept in an append-only store, one JSON-lines file per goal and selection,
//! with consecutive version numbers.

pub mod api;
pub mod cli;
pub mod library;
pub mod store;
pub mod tasks;
