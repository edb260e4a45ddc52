//! Core engine for a lexicon-augmented maximum-entropy Markov model (MEMM)
//! part-of-speech tagger.
//!
//! The crate is organized around the training and tagging pipeline:
//!
//! * [`corpus`] — tokenized, tagged corpora and their statistics
//! * [`lexicon`] — external morphosyntactic lexicons and the `lex` lookup
//! * [`features`] — the feature templates turning a tagging decision into
//!   predicate strings
//! * [`maxent`] — the conditional log-linear classifier over
//!   (predicate, tag) conjunctions
//! * [`optimize`] — the L-BFGS minimizer used for training
//! * [`decoder`] — beam-search decoding plus exact decoders used as oracles
//! * [`eval`] — overall/OOV accuracy and lexical-variability diagnostics
//! * [`model`] — the frozen, taggable bundle of all of the above
//!
//! Everything here is deterministic: identical inputs produce bit-identical
//! weights, decodes, and reports. File formats and IO live in the companion
//! `lexmemm` crate; this crate only consumes and produces in-memory data and
//! is `no_std`-compatible (with `alloc`) when built with the `libm` feature
//! instead of `std`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("lexmemm-core requires either the `std` or the `libm` feature");

pub use hashbrown;

pub mod corpus;
pub mod decoder;
pub mod eval;
pub mod features;
pub mod lexicon;
mod math;
pub mod maxent;
pub mod model;
pub mod optimize;

pub use corpus::{Corpus, Sentence, TagId, TagSet, Token};
pub use decoder::{brute_force_decode, exact_decode, tag_sentence, DecodeConfig};
pub use eval::{evaluate, macro_average, EvalReport};
pub use features::{extract_predicates, template_count, DecisionContext, FeatureConfig};
pub use lexicon::{Lexicon, LexiconConfig};
pub use maxent::{build_events, nll_and_gradient, prob_dist, PredicateId, PredicateIndex, TrainConfig, WeightMatrix};
pub use model::{train_model, Tagger, TaggerModel};
