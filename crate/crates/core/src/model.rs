//! The frozen, taggable model: configuration, tag set, predicate index,
//! weights, and the lexicon binding.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{Corpus, Sentence, TagId, TagSet};
use crate::decoder::{self, DecodeConfig};
use crate::features::FeatureConfig;
use crate::lexicon::{Lexicon, LexiconConfig};
use crate::maxent::{self, MaxentError, PredicateIndex, TrainConfig, WeightMatrix};

/// Everything needed to reproduce training-time feature extraction and tag
/// new text. A model trained with lexical features records the fingerprint
/// of its lexicon (and usually embeds it) so a silently swapped lexicon
/// cannot corrupt tagging.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    pub feature_config: FeatureConfig,
    pub lexicon_config: LexiconConfig,
    /// Echo of the training settings, for provenance.
    pub train_config: TrainConfig,
    /// Default decoding settings, overridable per call.
    pub decode_config: DecodeConfig,
    pub tagset: TagSet,
    pub predicates: PredicateIndex,
    pub weights: WeightMatrix,
    pub lexicon_fingerprint: Option<[u8; 32]>,
    pub embedded_lexicon: Option<Lexicon>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// The model uses lexical features but no usable lexicon was provided.
    LexiconRequired,
    /// The provided lexicon's fingerprint differs from the one recorded at
    /// training time.
    FingerprintMismatch,
    /// Weight dimensions disagree with the predicate index or tag set.
    DimensionMismatch {
        predicates: usize,
        tags: usize,
        rows: usize,
        cols: usize,
    },
    /// The predicate index must be frozen before tagging.
    IndexNotFrozen,
    /// A lexical model must record a lexicon fingerprint.
    MissingFingerprint,
    /// The embedded lexicon does not match the recorded fingerprint.
    EmbeddedLexiconCorrupt,
    EmptyTagSet,
    Train(MaxentError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::LexiconRequired => {
                write!(f, "model uses lexical features; supply the matching lexicon")
            }
            ModelError::FingerprintMismatch => {
                write!(f, "lexicon fingerprint does not match the one recorded in the model")
            }
            ModelError::DimensionMismatch {
                predicates,
                tags,
                rows,
                cols,
            } => write!(
                f,
                "weight matrix is {rows}x{cols} but the model declares {predicates} predicates and {tags} tags"
            ),
            ModelError::IndexNotFrozen => write!(f, "predicate index is not frozen"),
            ModelError::MissingFingerprint => {
                write!(f, "lexical model lacks a lexicon fingerprint")
            }
            ModelError::EmbeddedLexiconCorrupt => {
                write!(f, "embedded lexicon does not match the recorded fingerprint")
            }
            ModelError::EmptyTagSet => write!(f, "tag set is empty"),
            ModelError::Train(e) => write!(f, "training failed: {e}"),
        }
    }
}

impl core::error::Error for ModelError {}

impl From<MaxentError> for ModelError {
    fn from(e: MaxentError) -> Self {
        ModelError::Train(e)
    }
}

impl TaggerModel {
    /// Checks all structural invariants. Called after training and after
    /// loading from disk.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.tagset.is_empty() {
            return Err(ModelError::EmptyTagSet);
        }
        if !self.predicates.is_frozen() {
            return Err(ModelError::IndexNotFrozen);
        }
        if self.weights.n_predicates() != self.predicates.len()
            || self.weights.n_tags() != self.tagset.len()
        {
            return Err(ModelError::DimensionMismatch {
                predicates: self.predicates.len(),
                tags: self.tagset.len(),
                rows: self.weights.n_predicates(),
                cols: self.weights.n_tags(),
            });
        }
        if self.feature_config.lexical {
            let Some(fingerprint) = self.lexicon_fingerprint else {
                return Err(ModelError::MissingFingerprint);
            };
            if let Some(embedded) = &self.embedded_lexicon {
                if embedded.fingerprint() != fingerprint {
                    return Err(ModelError::EmbeddedLexiconCorrupt);
                }
            }
        }
        Ok(())
    }

    /// Binds the model to a lexicon for tagging.
    ///
    /// Standard models need no lexicon. Lexical models use `external` when
    /// given (its fingerprint must match unless `allow_mismatch`), otherwise
    /// their embedded lexicon.
    pub fn tagger<'a>(
        &'a self,
        external: Option<&'a Lexicon>,
        allow_mismatch: bool,
    ) -> Result<Tagger<'a>, ModelError> {
        self.validate()?;
        let lexicon = if !self.feature_config.lexical {
            LexiconSource::Empty(Lexicon::new())
        } else if let Some(external) = external {
            let matches = self
                .lexicon_fingerprint
                .map(|fp| fp == external.fingerprint())
                .unwrap_or(false);
            if !matches && !allow_mismatch {
                return Err(ModelError::FingerprintMismatch);
            }
            LexiconSource::Borrowed(external)
        } else if let Some(embedded) = &self.embedded_lexicon {
            LexiconSource::Borrowed(embedded)
        } else {
            return Err(ModelError::LexiconRequired);
        };
        Ok(Tagger {
            model: self,
            lexicon,
        })
    }
}

enum LexiconSource<'a> {
    Borrowed(&'a Lexicon),
    Empty(Lexicon),
}

impl LexiconSource<'_> {
    fn get(&self) -> &Lexicon {
        match self {
            LexiconSource::Borrowed(lexicon) => lexicon,
            LexiconSource::Empty(lexicon) => lexicon,
        }
    }
}

/// A model bound to the lexicon it will tag with.
pub struct Tagger<'a> {
    model: &'a TaggerModel,
    lexicon: LexiconSource<'a>,
}

impl Tagger<'_> {
    pub fn model(&self) -> &TaggerModel {
        self.model
    }

    pub fn lexicon(&self) -> &Lexicon {
        self.lexicon.get()
    }

    /// Tags one sentence with the model's default decode settings.
    pub fn tag_sentence(&self, sentence: &Sentence) -> Vec<TagId> {
        self.tag_sentence_with(sentence, &self.model.decode_config)
    }

    pub fn tag_sentence_with(&self, sentence: &Sentence, cfg: &DecodeConfig) -> Vec<TagId> {
        decoder::tag_sentence(self.model, self.lexicon.get(), sentence, cfg)
    }

    /// Tag strings instead of ids, in sentence order.
    pub fn tag_sentence_strings(&self, sentence: &Sentence) -> Vec<String> {
        self.tag_sentence(sentence)
            .into_iter()
            .map(|t| alloc::string::ToString::to_string(self.model.tagset.tag(t)))
            .collect()
    }
}

/// Trains a complete model on a gold corpus.
///
/// `lexicon` is required iff `feature_config.lexical`; when `embed_lexicon`
/// is set the lexicon is stored inside the model, making the model file
/// self-contained.
pub fn train_model(
    corpus: &Corpus,
    lexicon: Option<&Lexicon>,
    feature_config: FeatureConfig,
    lexicon_config: LexiconConfig,
    train_config: TrainConfig,
    decode_config: DecodeConfig,
    embed_lexicon: bool,
) -> Result<(TaggerModel, maxent::TrainOutcome), ModelError> {
    feature_config.validate().map_err(MaxentError::from)?;
    train_config.validate()?;
    let empty;
    let lexicon_ref = if feature_config.lexical {
        match lexicon {
            Some(lexicon) => lexicon,
            None => return Err(ModelError::LexiconRequired),
        }
    } else {
        empty = Lexicon::new();
        &empty
    };

    let (index, events) = maxent::build_events(corpus, lexicon_ref, &feature_config, train_config.cutoff)?;
    let outcome = maxent::train(&events, &index, corpus.tagset.len(), &train_config)?;

    let (fingerprint, embedded) = if feature_config.lexical {
        (
            Some(lexicon_ref.fingerprint()),
            embed_lexicon.then(|| lexicon_ref.clone()),
        )
    } else {
        (None, None)
    };

    let model = TaggerModel {
        feature_config,
        lexicon_config,
        train_config,
        decode_config,
        tagset: corpus.tagset.clone(),
        predicates: index,
        weights: outcome.weights.clone(),
        lexicon_fingerprint: fingerprint,
        embedded_lexicon: embedded,
    };
    model.validate()?;
    Ok((model, outcome))
}
