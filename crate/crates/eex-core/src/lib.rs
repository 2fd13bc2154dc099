//! Event extraction recast as reading comprehension.
//!
//! The crate turns an event ontology into natural-language probes: event
//! detection becomes a textual-entailment judgment between a sentence and a
//! generated statement ("Hence, an event about Attack happened."), and
//! argument detection becomes extractive question answering over generated
//! questions ("Who is the attacker?"). On top of those primitives it provides
//! zero-shot probing with threshold calibration and distribution tests,
//! K-shot training with a small trainable encoder, and micro-averaged
//! evaluation for both tasks.
//!
//! Everything here is pure computation over `alloc` types; the crate builds
//! without `std` (disable default features). File formats and the command-line
//! front end live in the companion `eex` crate.
//!
//! Modules follow the pipeline order:
//!
//! * [`ontology`]: event types, argument roles, guide questions.
//! * [`corpus`]: sentence records with character-offset spans, plus a
//!   deterministic synthetic-corpus generator.
//! * [`querygen`]: statement and question templates, query expansion.
//! * [`encoding`]: tokenization with character alignment, the encoder
//!   interface, and the mock and tiny trainable encoders.
//! * [`heads`]: entailment, polar, span, and masked-token scoring heads with
//!   losses and gradients.
//! * [`probing`]: zero-shot scoring, threshold calibration, significance
//!   tests, baselines.
//! * [`training`]: K-shot sampling, the Adam loop, the K x seed protocol.
//! * [`evaluation`]: micro precision/recall/F1, argument span scoring,
//!   report assembly.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod corpus;
pub mod encoding;
pub mod evaluation;
pub mod heads;
pub mod ontology;
pub mod probing;
pub mod querygen;
pub mod training;

mod error;
mod math;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
