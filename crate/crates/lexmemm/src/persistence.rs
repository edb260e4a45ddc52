//! The `LEXMEMM1` model file format.
//!
//! Layout (all integers and floats little-endian, strings length-prefixed
//! with a u32):
//!
//! ```text
//! magic            8 bytes, b"LEXMEMM1" (trailing byte is the version)
//! feature config   standard, lexical, case_fallback (u8 flags),
//!                  prefix_max, suffix_max, next_affix_max (u8)
//! lexicon config   separators (str), punct_tag (str)
//! train echo       l2_sigma2 (f64), cutoff (u32), tolerance (f64),
//!                  max_iterations (u32)
//! decode defaults  beam_width (u32), merge_states (u8)
//! tag set          boundary tag (str), count (u32), tags in id order
//! predicates       count (u32), predicate strings in id order
//! weights          declared count (u64), then count f64 values, row-major
//!                  by predicate
//! fingerprint      present flag (u8), then 32 bytes when present
//! lexicon          present flag (u8), then u64 byte count and canonical
//!                  TSV bytes when present
//! ```
//!
//! Serialization is a pure function of the model, so identical models
//! produce identical bytes and save→load→save round-trips exactly.

use std::io::{Read, Write};

use lexmemm_core::corpus::TagSet;
use lexmemm_core::decoder::DecodeConfig;
use lexmemm_core::features::FeatureConfig;
use lexmemm_core::lexicon::{load_lexicon, LexiconConfig};
use lexmemm_core::maxent::{PredicateIndex, TrainConfig, WeightMatrix};
use lexmemm_core::model::TaggerModel;
use thiserror::Error;

pub const MAGIC: &[u8; 8] = b"LEXMEMM1";

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a model file (bad magic)")]
    BadMagic,
    #[error("unsupported model format version {0:?}")]
    UnsupportedVersion(char),
    #[error("truncated model file")]
    Truncated,
    #[error("model file contains invalid UTF-8")]
    InvalidUtf8,
    #[error("declared weight count {declared} does not match {predicates} predicates x {tags} tags")]
    DimensionMismatch {
        declared: u64,
        predicates: usize,
        tags: usize,
    },
    #[error("trailing bytes after the model payload")]
    TrailingData,
    #[error("invalid flag byte {0}")]
    InvalidFlag(u8),
    #[error("embedded lexicon is malformed: {0}")]
    EmbeddedLexicon(#[from] lexmemm_core::lexicon::LexiconError),
    #[error("tag set is invalid: {0}")]
    TagSet(#[from] lexmemm_core::corpus::CorpusError),
    #[error("model fails validation: {0}")]
    Invalid(#[from] lexmemm_core::model::ModelError),
}

fn push_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

/// Serializes a model to its canonical byte representation.
pub fn model_to_bytes(model: &TaggerModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);

    let fc = &model.feature_config;
    out.extend_from_slice(&[
        fc.standard as u8,
        fc.lexical as u8,
        fc.case_fallback as u8,
        fc.prefix_max as u8,
        fc.suffix_max as u8,
        fc.next_affix_max as u8,
    ]);

    push_str(&mut out, &model.lexicon_config.separators);
    push_str(&mut out, &model.lexicon_config.punct_tag);

    let tc = &model.train_config;
    out.extend_from_slice(&tc.l2_sigma2.to_le_bytes());
    out.extend_from_slice(&tc.cutoff.to_le_bytes());
    out.extend_from_slice(&tc.tolerance.to_le_bytes());
    out.extend_from_slice(&tc.max_iterations.to_le_bytes());

    out.extend_from_slice(&(model.decode_config.beam_width as u32).to_le_bytes());
    out.push(model.decode_config.merge_states as u8);

    push_str(&mut out, model.tagset.boundary_tag());
    out.extend_from_slice(&(model.tagset.len() as u32).to_le_bytes());
    for tag in model.tagset.tags() {
        push_str(&mut out, tag);
    }

    out.extend_from_slice(&(model.predicates.len() as u32).to_le_bytes());
    for name in model.predicates.names() {
        push_str(&mut out, name);
    }

    let values = model.weights.values();
    out.extend_from_slice(&(values.len() as u64).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }

    match model.lexicon_fingerprint {
        Some(fp) => {
            out.push(1);
            out.extend_from_slice(&fp);
        }
        None => out.push(0),
    }
    match &model.embedded_lexicon {
        Some(lexicon) => {
            out.push(1);
            let tsv = lexicon.to_canonical_tsv();
            out.extend_from_slice(&(tsv.len() as u64).to_le_bytes());
            out.extend_from_slice(tsv.as_bytes());
        }
        None => out.push(0),
    }
    out
}

/// Writes the model to `sink` and returns the number of bytes written.
pub fn save_model<W: Write>(model: &TaggerModel, sink: &mut W) -> Result<usize, PersistError> {
    let bytes = model_to_bytes(model);
    sink.write_all(&bytes)?;
    Ok(bytes.len())
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], PersistError> {
        if self.pos + n > self.data.len() {
            return Err(PersistError::Truncated);
        }
        let slice = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, PersistError> {
        Ok(self.take(1)?[0])
    }

    fn flag(&mut self) -> Result<bool, PersistError> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(PersistError::InvalidFlag(other)),
        }
    }

    fn u32(&mut self) -> Result<u32, PersistError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, PersistError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, PersistError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn str(&mut self) -> Result<String, PersistError> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| PersistError::InvalidUtf8)
    }
}

/// Parses a model from its byte representation, revalidating every
/// structural invariant.
pub fn model_from_bytes(data: &[u8]) -> Result<TaggerModel, PersistError> {
    let mut cursor = Cursor { data, pos: 0 };
    let magic = cursor.take(MAGIC.len()).map_err(|_| PersistError::BadMagic)?;
    if magic != MAGIC {
        if magic[..7] == MAGIC[..7] {
            return Err(PersistError::UnsupportedVersion(magic[7] as char));
        }
        return Err(PersistError::BadMagic);
    }

    let feature_config = FeatureConfig {
        standard: cursor.flag()?,
        lexical: cursor.flag()?,
        case_fallback: cursor.flag()?,
        prefix_max: cursor.u8()? as usize,
        suffix_max: cursor.u8()? as usize,
        next_affix_max: cursor.u8()? as usize,
    };
    let lexicon_config = LexiconConfig {
        separators: cursor.str()?,
        punct_tag: cursor.str()?,
    };
    let train_config = TrainConfig {
        l2_sigma2: cursor.f64()?,
        cutoff: cursor.u32()?,
        tolerance: cursor.f64()?,
        max_iterations: cursor.u32()?,
    };
    let decode_config = DecodeConfig {
        beam_width: cursor.u32()? as usize,
        merge_states: cursor.flag()?,
    };

    let boundary = cursor.str()?;
    let n_tags = cursor.u32()? as usize;
    let mut tags = Vec::with_capacity(n_tags);
    for _ in 0..n_tags {
        tags.push(cursor.str()?);
    }
    let tagset = TagSet::new(tags.iter(), &boundary)?;

    let n_predicates = cursor.u32()? as usize;
    let mut names = Vec::with_capacity(n_predicates);
    for _ in 0..n_predicates {
        names.push(cursor.str()?);
    }
    let predicates = PredicateIndex::from_names(&names);

    let declared = cursor.u64()?;
    if declared as usize != n_predicates * n_tags {
        return Err(PersistError::DimensionMismatch {
            declared,
            predicates: n_predicates,
            tags: n_tags,
        });
    }
    let mut values = Vec::with_capacity(declared as usize);
    for _ in 0..declared {
        values.push(cursor.f64()?);
    }
    let weights = WeightMatrix::from_values(values, n_predicates, n_tags)
        .map_err(lexmemm_core::model::ModelError::Train)?;

    let lexicon_fingerprint = if cursor.flag()? {
        let mut fp = [0u8; 32];
        fp.copy_from_slice(cursor.take(32)?);
        Some(fp)
    } else {
        None
    };
    let embedded_lexicon = if cursor.flag()? {
        let len = cursor.u64()? as usize;
        let bytes = cursor.take(len)?;
        let text = std::str::from_utf8(bytes).map_err(|_| PersistError::InvalidUtf8)?;
        Some(load_lexicon(text)?)
    } else {
        None
    };

    if cursor.pos != data.len() {
        return Err(PersistError::TrailingData);
    }

    let model = TaggerModel {
        feature_config,
        lexicon_config,
        train_config,
        decode_config,
        tagset,
        predicates,
        weights,
        lexicon_fingerprint,
        embedded_lexicon,
    };
    model.validate()?;
    Ok(model)
}

/// Reads a model from `source`.
pub fn load_model<R: Read>(source: &mut R) -> Result<TaggerModel, PersistError> {
    let mut data = Vec::new();
    source.read_to_end(&mut data)?;
    model_from_bytes(&data)
}

/// Plain-text weight dump: one `predicate<TAB>tag<TAB>weight` line per
/// conjunction, in index order. Weights print in shortest round-trip form.
pub fn write_weight_dump<W: Write>(model: &TaggerModel, sink: &mut W) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(sink);
    for (p, name) in model.predicates.names().iter().enumerate() {
        for (t, tag) in model.tagset.tags().iter().enumerate() {
            let weight = model.weights.values()[p * model.tagset.len() + t];
            writeln!(out, "{name}\t{tag}\t{weight}")?;
        }
    }
    out.flush()
}
