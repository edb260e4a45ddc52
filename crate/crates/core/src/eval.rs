//! Evaluation measures: overall and out-of-vocabulary accuracy, macro
//! averages across corpora, and the lexical-variability table pairing
//! type/token ratios with accuracy deltas.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashSet;

use crate::corpus::{Corpus, TypeTokenRatio};

/// Token-level accuracy counts for one evaluated corpus.
///
/// A token is out-of-vocabulary (OOV) iff its exact surface form does not
/// occur in the training corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalReport {
    pub corpus_label: String,
    pub total_tokens: u64,
    pub correct_tokens: u64,
    pub oov_tokens: u64,
    pub correct_oov_tokens: u64,
}

impl EvalReport {
    /// Percentage of correctly tagged tokens.
    pub fn overall_accuracy(&self) -> f64 {
        100.0 * self.correct_tokens as f64 / self.total_tokens as f64
    }

    /// Percentage of correctly tagged OOV tokens; `None` when the corpus has
    /// no OOV tokens.
    pub fn oov_accuracy(&self) -> Option<f64> {
        if self.oov_tokens == 0 {
            None
        } else {
            Some(100.0 * self.correct_oov_tokens as f64 / self.oov_tokens as f64)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    /// Predictions and gold differ in sentence count.
    SentenceCountMismatch { gold: usize, predicted: usize },
    /// A sentence's prediction has the wrong number of tags.
    LengthMismatch {
        sentence: usize,
        gold: usize,
        predicted: usize,
    },
    /// Macro average of zero reports.
    NoReports,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::SentenceCountMismatch { gold, predicted } => {
                write!(f, "{gold} gold sentences but {predicted} predictions")
            }
            EvalError::LengthMismatch {
                sentence,
                gold,
                predicted,
            } => write!(
                f,
                "sentence {sentence}: {gold} gold tokens but {predicted} predicted tags"
            ),
            EvalError::NoReports => write!(f, "no reports to average"),
        }
    }
}

impl core::error::Error for EvalError {}

/// Scores predicted tag strings against a gold corpus. `train_vocab` decides
/// OOV membership. Tokens without a gold tag are skipped (they cannot be
/// scored).
pub fn evaluate(
    gold: &Corpus,
    predicted: &[Vec<String>],
    train_vocab: &HashSet<String>,
    corpus_label: &str,
) -> Result<EvalReport, EvalError> {
    if gold.sentences.len() != predicted.len() {
        return Err(EvalError::SentenceCountMismatch {
            gold: gold.sentences.len(),
            predicted: predicted.len(),
        });
    }
    let mut report = EvalReport {
        corpus_label: corpus_label.to_string(),
        total_tokens: 0,
        correct_tokens: 0,
        oov_tokens: 0,
        correct_oov_tokens: 0,
    };
    for (s_idx, (sentence, tags)) in gold.sentences.iter().zip(predicted).enumerate() {
        if sentence.len() != tags.len() {
            return Err(EvalError::LengthMismatch {
                sentence: s_idx,
                gold: sentence.len(),
                predicted: tags.len(),
            });
        }
        for (token, predicted_tag) in sentence.tokens.iter().zip(tags) {
            let Some(gold_tag) = token.gold_tag else {
                continue;
            };
            let correct = gold.tagset.tag(gold_tag) == predicted_tag;
            let oov = !train_vocab.contains(token.form.as_str());
            report.total_tokens += 1;
            report.correct_tokens += u64::from(correct);
            if oov {
                report.oov_tokens += 1;
                report.correct_oov_tokens += u64::from(correct);
            }
        }
    }
    Ok(report)
}

/// Unweighted arithmetic mean of per-corpus accuracies. The OOV mean skips
/// corpora without OOV tokens and is `None` when every report lacks them.
pub fn macro_average(reports: &[EvalReport]) -> Result<(f64, Option<f64>), EvalError> {
    if reports.is_empty() {
        return Err(EvalError::NoReports);
    }
    let overall =
        reports.iter().map(EvalReport::overall_accuracy).sum::<f64>() / reports.len() as f64;
    let oov_values: Vec<f64> = reports.iter().filter_map(EvalReport::oov_accuracy).collect();
    let oov = if oov_values.is_empty() {
        None
    } else {
        Some(oov_values.iter().sum::<f64>() / oov_values.len() as f64)
    };
    Ok((overall, oov))
}

/// One row of the lexical-variability table.
#[derive(Debug, Clone, PartialEq)]
pub struct VariabilityRow {
    pub label: String,
    pub ratio: TypeTokenRatio,
    /// Paired accuracy difference, when the caller supplies one.
    pub delta: Option<f64>,
}

/// Sorts (label, normalized type/token ratio, optional accuracy delta)
/// entries by ascending ratio, ready for plotting or tabulation.
pub fn lexical_variability_table(
    entries: Vec<(String, TypeTokenRatio, Option<f64>)>,
) -> Vec<VariabilityRow> {
    let mut rows: Vec<VariabilityRow> = entries
        .into_iter()
        .map(|(label, ratio, delta)| VariabilityRow { label, ratio, delta })
        .collect();
    rows.sort_by(|a, b| {
        a.ratio
            .ratio
            .total_cmp(&b.ratio.ratio)
            .then_with(|| a.label.cmp(&b.label))
    });
    rows
}
