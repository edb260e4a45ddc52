//! Left-to-right decoding: beam search over tag sequences, plus an exact
//! dynamic-programming decoder and a brute-force enumerator used as test
//! oracles.
//!
//! All decoders share one scoring path and one tie-break rule (the
//! lexicographically smallest tag-id sequence), so they are comparable down
//! to floating-point bit patterns: a beam wide enough to hold every
//! (t_{i-1}, t_{i-2}) state is exact.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{Sentence, TagId};
use crate::features::{extract_static, push_dynamic_predicates};
use crate::lexicon::Lexicon;
use crate::maxent::{log_prob_into, PredicateId};
use crate::model::TaggerModel;

/// Beam-search settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeConfig {
    pub beam_width: usize,
    /// Keep only the best hypothesis per (t_{i-1}, t_{i-2}) state. Makes the
    /// beam exact once `beam_width` covers all states.
    pub merge_states: bool,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            beam_width: 3,
            merge_states: true,
        }
    }
}

/// A partial tag sequence and its accumulated log-probability.
#[derive(Debug, Clone)]
pub struct Hypothesis {
    pub tags: Vec<TagId>,
    pub log_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeError {
    /// Brute-force enumeration would visit more than the allowed number of
    /// sequences.
    InstanceTooLarge { tags: usize, length: usize },
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeError::InstanceTooLarge { tags, length } => {
                write!(f, "brute force refused: {tags} tags over {length} tokens")
            }
        }
    }
}

impl core::error::Error for DecodeError {}

const BOUNDARY_STATE: u32 = u32::MAX;

/// Per-sentence scoring context: static predicate ids are resolved once per
/// position, then completed per hypothesis with the tag-history predicates.
struct SentenceScorer<'a> {
    model: &'a TaggerModel,
    static_ids: Vec<Vec<PredicateId>>,
    next_lex_disj: Vec<Option<String>>,
    combined: Vec<PredicateId>,
    dynamic: Vec<String>,
}

impl<'a> SentenceScorer<'a> {
    fn new(model: &'a TaggerModel, lexicon: &Lexicon, sentence: &Sentence) -> Self {
        let n = sentence.len();
        let mut static_ids = Vec::with_capacity(n);
        let mut next_lex_disj = Vec::with_capacity(n);
        for position in 1..=n {
            let stat = extract_static(sentence, position, lexicon, &model.feature_config);
            static_ids.push(
                stat.predicates
                    .iter()
                    .filter_map(|p| model.predicates.lookup(p))
                    .collect(),
            );
            next_lex_disj.push(stat.next_lex_disj);
        }
        SentenceScorer {
            model,
            static_ids,
            next_lex_disj,
            combined: Vec::new(),
            dynamic: Vec::new(),
        }
    }

    /// Writes log p(tag | context) for every tag into `out`. `position` is
    /// 1-based; the previous tags are strings so the boundary tag needs no
    /// special casing.
    fn log_probs(&mut self, position: usize, prev: &str, prev_prev: &str, out: &mut [f64]) {
        self.dynamic.clear();
        push_dynamic_predicates(
            &mut self.dynamic,
            prev,
            prev_prev,
            self.next_lex_disj[position - 1].as_deref(),
        );
        self.combined.clear();
        self.combined.extend_from_slice(&self.static_ids[position - 1]);
        self.combined.extend(
            self.dynamic
                .iter()
                .filter_map(|p| self.model.predicates.lookup(p)),
        );
        log_prob_into(&self.model.weights, &self.combined, out);
    }

    fn prev_tags(&self, tags: &[TagId]) -> (&'a str, &'a str) {
        let boundary = self.model.tagset.boundary_tag();
        let prev = tags
            .last()
            .map(|t| self.model.tagset.tag(*t))
            .unwrap_or(boundary);
        let prev_prev = if tags.len() >= 2 {
            self.model.tagset.tag(tags[tags.len() - 2])
        } else {
            boundary
        };
        (prev, prev_prev)
    }
}

fn state_of(tags: &[TagId]) -> (u32, u32) {
    let last = tags.last().map(|t| t.0).unwrap_or(BOUNDARY_STATE);
    let second = if tags.len() >= 2 {
        tags[tags.len() - 2].0
    } else {
        BOUNDARY_STATE
    };
    (second, last)
}

/// Decodes with beam search and returns the best surviving tag sequence.
/// Ties are broken toward the lexicographically smallest tag-id sequence.
pub fn tag_sentence(
    model: &TaggerModel,
    lexicon: &Lexicon,
    sentence: &Sentence,
    cfg: &DecodeConfig,
) -> Vec<TagId> {
    assert!(cfg.beam_width >= 1);
    assert!(!sentence.is_empty());
    let n_tags = model.tagset.len();
    let mut scorer = SentenceScorer::new(model, lexicon, sentence);
    let mut scores = vec![0.0; n_tags];

    let mut beam = vec![Hypothesis {
        tags: Vec::new(),
        log_prob: 0.0,
    }];
    let mut candidates: Vec<Hypothesis> = Vec::new();

    for position in 1..=sentence.len() {
        candidates.clear();
        for hyp in &beam {
            let (prev, prev_prev) = scorer.prev_tags(&hyp.tags);
            scorer.log_probs(position, prev, prev_prev, &mut scores);
            for (t, &lp) in scores.iter().enumerate() {
                let mut tags = Vec::with_capacity(hyp.tags.len() + 1);
                tags.extend_from_slice(&hyp.tags);
                tags.push(TagId(t as u32));
                candidates.push(Hypothesis {
                    tags,
                    log_prob: hyp.log_prob + lp,
                });
            }
        }
        if cfg.merge_states {
            candidates.sort_by(|a, b| {
                state_of(&a.tags)
                    .cmp(&state_of(&b.tags))
                    .then_with(|| b.log_prob.total_cmp(&a.log_prob))
                    .then_with(|| a.tags.cmp(&b.tags))
            });
            candidates.dedup_by(|next, kept| state_of(&next.tags) == state_of(&kept.tags));
        }
        candidates.sort_by(|a, b| {
            b.log_prob
                .total_cmp(&a.log_prob)
                .then_with(|| a.tags.cmp(&b.tags))
        });
        candidates.truncate(cfg.beam_width);
        core::mem::swap(&mut beam, &mut candidates);
    }

    beam.into_iter().next().expect("beam is never empty").tags
}

/// Exact argmax over all tag sequences via dynamic programming over
/// (t_{i-1}, t_{i-2}) states. Shares scoring and tie-breaking with
/// [`tag_sentence`].
pub fn exact_decode(model: &TaggerModel, lexicon: &Lexicon, sentence: &Sentence) -> Vec<TagId> {
    assert!(!sentence.is_empty());
    let n_tags = model.tagset.len();
    let mut scorer = SentenceScorer::new(model, lexicon, sentence);
    let mut scores = vec![0.0; n_tags];

    // State after position i: (t_{i-1}, t_i), boundary-padded.
    let mut states: BTreeMap<(u32, u32), (f64, Vec<TagId>)> = BTreeMap::new();
    states.insert((BOUNDARY_STATE, BOUNDARY_STATE), (0.0, Vec::new()));

    for position in 1..=sentence.len() {
        let mut next: BTreeMap<(u32, u32), (f64, Vec<TagId>)> = BTreeMap::new();
        for (&(older, last), (score, prefix)) in &states {
            let (prev, prev_prev) = (tag_str(model, last), tag_str(model, older));
            scorer.log_probs(position, prev, prev_prev, &mut scores);
            for (t, &lp) in scores.iter().enumerate() {
                let cand_score = score + lp;
                let key = (last, t as u32);
                let better = match next.get(&key) {
                    None => true,
                    Some((best, best_prefix)) => {
                        cand_score > *best
                            || (cand_score == *best && prefix_less(prefix, t as u32, best_prefix))
                    }
                };
                if better {
                    let mut tags = Vec::with_capacity(prefix.len() + 1);
                    tags.extend_from_slice(prefix);
                    tags.push(TagId(t as u32));
                    next.insert(key, (cand_score, tags));
                }
            }
        }
        states = next;
    }

    let mut best: Option<(f64, Vec<TagId>)> = None;
    for (_, (score, tags)) in states {
        let take = match &best {
            None => true,
            Some((best_score, best_tags)) => {
                score > *best_score || (score == *best_score && tags < *best_tags)
            }
        };
        if take {
            best = Some((score, tags));
        }
    }
    best.expect("at least one state").1
}

fn tag_str(model: &TaggerModel, id: u32) -> &str {
    if id == BOUNDARY_STATE {
        model.tagset.boundary_tag()
    } else {
        model.tagset.tag(TagId(id))
    }
}

/// Compares `prefix + [tag]` against `full` lexicographically without
/// materializing the concatenation.
fn prefix_less(prefix: &[TagId], tag: u32, full: &[TagId]) -> bool {
    debug_assert_eq!(prefix.len() + 1, full.len());
    for (a, b) in prefix.iter().zip(full) {
        match a.cmp(b) {
            core::cmp::Ordering::Less => return true,
            core::cmp::Ordering::Greater => return false,
            core::cmp::Ordering::Equal => {}
        }
    }
    tag < full[full.len() - 1].0
}

/// Total log-probability of a complete tag sequence for `sentence`.
pub fn score_sequence(
    model: &TaggerModel,
    lexicon: &Lexicon,
    sentence: &Sentence,
    tags: &[TagId],
) -> f64 {
    assert_eq!(tags.len(), sentence.len());
    let n_tags = model.tagset.len();
    let mut scorer = SentenceScorer::new(model, lexicon, sentence);
    let mut scores = vec![0.0; n_tags];
    let mut total = 0.0;
    for position in 1..=sentence.len() {
        let (prev, prev_prev) = scorer.prev_tags(&tags[..position - 1]);
        scorer.log_probs(position, prev, prev_prev, &mut scores);
        total += scores[tags[position - 1].index()];
    }
    total
}

/// Maximum number of sequences [`brute_force_decode`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

/// Exhaustive argmax over all |tags|^n sequences, enumerated in
/// lexicographic order so that keeping the first strict maximum reproduces
/// the shared tie-break.
pub fn brute_force_decode(
    model: &TaggerModel,
    lexicon: &Lexicon,
    sentence: &Sentence,
) -> Result<Vec<TagId>, DecodeError> {
    assert!(!sentence.is_empty());
    let n_tags = model.tagset.len();
    let n = sentence.len();
    let total = (n_tags as u128).checked_pow(n as u32);
    if total.is_none() || total.unwrap() > BRUTE_FORCE_LIMIT {
        return Err(DecodeError::InstanceTooLarge {
            tags: n_tags,
            length: n,
        });
    }

    let mut assignment = vec![TagId(0); n];
    let mut best: Option<(f64, Vec<TagId>)> = None;
    loop {
        let score = score_sequence(model, lexicon, sentence, &assignment);
        let take = match &best {
            None => true,
            Some((best_score, _)) => score > *best_score,
        };
        if take {
            best = Some((score, assignment.clone()));
        }
        // Advance the odometer (most significant digit first keeps the
        // enumeration in lexicographic order).
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(best.expect("at least one sequence").1);
            }
            pos -= 1;
            if assignment[pos].0 as usize + 1 < n_tags {
                assignment[pos] = TagId(assignment[pos].0 + 1);
                for later in assignment.iter_mut().skip(pos + 1) {
                    *later = TagId(0);
                }
                break;
            }
        }
    }
}
