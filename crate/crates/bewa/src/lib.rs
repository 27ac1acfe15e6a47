//! BEWA: a belief-graph engine for structured scientific claims.
//!
//! The engine ingests claims and typed evidence events, maintains per-claim
//! probabilistic belief states through weighted Bayesian updates with decay,
//! contradiction handling, and replication resets, propagates belief over a
//! typed claim graph, and anchors every state transition in a tamper-evident
//! hash-chained ledger with Merkle epoch roots.
//!
//! Start from [`engine::Engine`] for the orchestrated system, or use the
//! subsystem modules directly. The `examples/` directory holds one runnable
//! example per capability; `cargo run --example <name>`.

pub mod api;
pub mod claim;
pub mod config;
pub mod corpus;
pub mod credibility;
pub mod engine;
pub mod error;
pub mod graph;
pub mod hashing;
pub mod kernel;
pub mod keys;
pub mod ledger;
pub mod merkle;
pub mod sim;
pub mod utility;

pub use error::{BewaError, Result};
