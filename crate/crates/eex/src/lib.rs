//! File formats, checkpoints, run manifests, and the command-line front
//! end for the event-extraction toolkit.
//!
//! The core library (`eex_core`) holds the models and algorithms and does
//! no IO. This crate wraps it in:
//!
//! - on-disk formats: ontology JSON, corpus JSONL, query JSONL, score
//!   JSONL, report JSON, checkpoints, and run manifests ([`formats`]);
//! - encoder resolution by URI and the adapter directory layout
//!   ([`encoders`]);
//! - a vocabulary cache keyed by input content ([`cache`]);
//! - the `eex` binary's subcommands ([`commands`]).
//!
//! Every command is deterministic: the same inputs, flags, and seeds
//! produce byte-identical output files, and each run writes a manifest
//! recording the resolved configuration plus input and output hashes.

pub mod cache;
pub mod commands;
pub mod encoders;
pub mod error;
pub mod formats;
pub mod hashing;

pub use error::{Error, Result};
