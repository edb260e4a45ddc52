//! IO companion to `lexmemm-core`: the versioned model file format, run
//! manifests, evaluation report files, and batch tagging over text formats.
//!
//! The `lexmemm` binary in this package wires everything into the
//! train / tag / eval / analyze pipeline.

pub mod manifest;
pub mod persistence;
pub mod reports;
pub mod tagging;

pub use lexmemm_core as core;
