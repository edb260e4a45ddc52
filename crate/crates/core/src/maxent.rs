//! The conditional log-linear classifier at the heart of the tagger.
//!
//! Every feature is a conjunction of a tag-independent predicate with a
//! candidate tag, so the parameters form one weight per (predicate, tag)
//! pair. Training maximizes the L2-regularized conditional log-likelihood of
//! the events extracted from a gold corpus; each event conditions on the
//! gold tags of the two preceding words.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::corpus::{Corpus, TagId};
use crate::features::{extract_predicates, DecisionContext, FeatureConfig, FeatureConfigError};
use crate::lexicon::Lexicon;
use crate::math;
use crate::optimize::{self, OptimizeError, OptimizeParams};

/// Identifier of a predicate inside a [`PredicateIndex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredicateId(pub u32);

impl PredicateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Predicate string → contiguous id map. Once frozen, lookups of unseen
/// predicates return `None` and the index never mutates again.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PredicateIndex {
    by_name: HashMap<String, PredicateId>,
    names: Vec<String>,
    frozen: bool,
}

impl PredicateIndex {
    pub fn new() -> Self {
        PredicateIndex::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn lookup(&self, predicate: &str) -> Option<PredicateId> {
        self.by_name.get(predicate).copied()
    }

    /// Predicate strings in id order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, id: PredicateId) -> &str {
        &self.names[id.index()]
    }

    /// Returns the id for `predicate`, assigning the next one if new.
    /// Panics when called on a frozen index.
    pub fn intern(&mut self, predicate: &str) -> PredicateId {
        assert!(!self.frozen, "cannot intern into a frozen predicate index");
        if let Some(&id) = self.by_name.get(predicate) {
            return id;
        }
        let id = PredicateId(self.names.len() as u32);
        self.names.push(predicate.to_owned());
        self.by_name.insert(predicate.to_owned(), id);
        id
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    /// Rebuilds an index from names in id order (used when loading models).
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut index = PredicateIndex::new();
        for name in names {
            index.intern(name.as_ref());
        }
        index.freeze();
        index
    }
}

/// Dense weights, one per (predicate, tag) conjunction, stored row-major by
/// predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    values: Vec<f64>,
    n_predicates: usize,
    n_tags: usize,
}

impl WeightMatrix {
    pub fn zeros(n_predicates: usize, n_tags: usize) -> Self {
        WeightMatrix {
            values: vec![0.0; n_predicates * n_tags],
            n_predicates,
            n_tags,
        }
    }

    /// Wraps flat row-major values; fails on a size mismatch or non-finite
    /// entries.
    pub fn from_values(
        values: Vec<f64>,
        n_predicates: usize,
        n_tags: usize,
    ) -> Result<Self, MaxentError> {
        if values.len() != n_predicates * n_tags {
            return Err(MaxentError::DimensionMismatch {
                expected: n_predicates * n_tags,
                actual: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(MaxentError::NonFiniteWeight);
        }
        Ok(WeightMatrix {
            values,
            n_predicates,
            n_tags,
        })
    }

    pub fn n_predicates(&self) -> usize {
        self.n_predicates
    }

    pub fn n_tags(&self) -> usize {
        self.n_tags
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn row(&self, predicate: PredicateId) -> &[f64] {
        let start = predicate.index() * self.n_tags;
        &self.values[start..start + self.n_tags]
    }

    pub fn get(&self, predicate: PredicateId, tag: TagId) -> f64 {
        self.values[predicate.index() * self.n_tags + tag.index()]
    }

    pub fn set(&mut self, predicate: PredicateId, tag: TagId, value: f64) {
        self.values[predicate.index() * self.n_tags + tag.index()] = value;
    }
}

/// One token's training observation: its active predicates (extracted with
/// the gold tag history) and its gold tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingEvent {
    /// Sorted, deduplicated, within index bounds.
    pub predicates: Vec<PredicateId>,
    pub gold: TagId,
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Variance of the Gaussian prior; the penalty is Σλ²/(2σ²).
    pub l2_sigma2: f64,
    /// Predicates occurring in fewer events than this are dropped.
    pub cutoff: u32,
    /// Stop when the gradient max-norm falls to this value.
    pub tolerance: f64,
    pub max_iterations: u32,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2_sigma2: 1.0,
            cutoff: 1,
            tolerance: 1e-5,
            max_iterations: 200,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), MaxentError> {
        if self.l2_sigma2 > 0.0 && self.tolerance > 0.0 && self.cutoff >= 1 && self.max_iterations >= 1
        {
            Ok(())
        } else {
            Err(MaxentError::InvalidConfig)
        }
    }
}

/// What [`train`] produced and why it stopped.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub weights: WeightMatrix,
    /// True when the gradient tolerance was reached before the iteration cap.
    pub converged: bool,
    pub iterations: usize,
    /// Final regularized negative log-likelihood.
    pub objective: f64,
    pub gradient_max_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaxentError {
    /// A token without a gold tag was encountered while building events.
    MissingGoldTag { sentence: usize, token: usize },
    /// No events to train on.
    NoEvents,
    InvalidConfig,
    InvalidFeatureConfig(FeatureConfigError),
    DimensionMismatch { expected: usize, actual: usize },
    NonFiniteWeight,
    /// The objective or gradient became NaN/infinite during optimization.
    NonFinite { iteration: usize },
}

impl fmt::Display for MaxentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxentError::MissingGoldTag { sentence, token } => {
                write!(f, "sentence {sentence}, token {token}: missing gold tag")
            }
            MaxentError::NoEvents => write!(f, "no training events"),
            MaxentError::InvalidConfig => write!(f, "training configuration values must be positive"),
            MaxentError::InvalidFeatureConfig(e) => write!(f, "invalid feature configuration: {e}"),
            MaxentError::DimensionMismatch { expected, actual } => {
                write!(f, "weight matrix size {actual} does not match {expected}")
            }
            MaxentError::NonFiniteWeight => write!(f, "weight matrix contains non-finite values"),
            MaxentError::NonFinite { iteration } => {
                write!(f, "non-finite objective or gradient at iteration {iteration}")
            }
        }
    }
}

impl core::error::Error for MaxentError {}

impl From<FeatureConfigError> for MaxentError {
    fn from(e: FeatureConfigError) -> Self {
        MaxentError::InvalidFeatureConfig(e)
    }
}

/// Extracts one event per token, conditioning on the gold tags of the two
/// preceding words, then drops predicates seen in fewer than `cutoff` events
/// and freezes the index.
pub fn build_events(
    corpus: &Corpus,
    lexicon: &Lexicon,
    feature_cfg: &FeatureConfig,
    cutoff: u32,
) -> Result<(PredicateIndex, Vec<TrainingEvent>), MaxentError> {
    feature_cfg.validate()?;
    let boundary = corpus.tagset.boundary_tag().to_owned();
    let mut provisional = PredicateIndex::new();
    let mut raw_events: Vec<(Vec<PredicateId>, TagId)> = Vec::new();

    for (s_idx, sentence) in corpus.sentences.iter().enumerate() {
        let mut prev = boundary.as_str();
        let mut prev_prev = boundary.as_str();
        for (t_idx, token) in sentence.tokens.iter().enumerate() {
            let gold = token.gold_tag.ok_or(MaxentError::MissingGoldTag {
                sentence: s_idx,
                token: t_idx,
            })?;
            let ctx = DecisionContext {
                sentence,
                position: t_idx + 1,
                prev_tag: prev,
                prev_prev_tag: prev_prev,
            };
            let predicates = extract_predicates(&ctx, lexicon, feature_cfg);
            let ids = predicates
                .as_slice()
                .iter()
                .map(|p| provisional.intern(p))
                .collect();
            raw_events.push((ids, gold));
            prev_prev = prev;
            prev = corpus.tagset.tag(gold);
        }
    }

    let mut counts = vec![0u32; provisional.len()];
    for (ids, _) in &raw_events {
        for id in ids {
            counts[id.index()] += 1;
        }
    }

    let (index, events) = if cutoff <= 1 {
        let events = raw_events
            .into_iter()
            .map(|(mut ids, gold)| {
                ids.sort_unstable();
                TrainingEvent { predicates: ids, gold }
            })
            .collect();
        (provisional, events)
    } else {
        let mut kept = PredicateIndex::new();
        let mut remap: Vec<Option<PredicateId>> = Vec::with_capacity(provisional.len());
        for (name, &count) in provisional.names().iter().zip(&counts) {
            remap.push(if count >= cutoff {
                Some(kept.intern(name))
            } else {
                None
            });
        }
        let events = raw_events
            .into_iter()
            .map(|(ids, gold)| {
                let mut kept_ids: Vec<PredicateId> =
                    ids.into_iter().filter_map(|id| remap[id.index()]).collect();
                kept_ids.sort_unstable();
                TrainingEvent {
                    predicates: kept_ids,
                    gold,
                }
            })
            .collect();
        (kept, events)
    };

    let mut index = index;
    index.freeze();
    Ok((index, events))
}

#[inline]
fn accumulate_scores(values: &[f64], n_tags: usize, predicates: &[PredicateId], scores: &mut [f64]) {
    scores.fill(0.0);
    for p in predicates {
        let start = p.index() * n_tags;
        let row = &values[start..start + n_tags];
        for (s, w) in scores.iter_mut().zip(row) {
            *s += w;
        }
    }
}

/// Turns raw scores into probabilities in place, returning log Σ exp(scores)
/// (the normalizer) computed with a max shift.
fn softmax_in_place(scores: &mut [f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for &s in scores.iter() {
        max = max.max(s);
    }
    let mut sum = 0.0;
    for s in scores.iter_mut() {
        *s = math::exp(*s - max);
        sum += *s;
    }
    for s in scores.iter_mut() {
        *s /= sum;
    }
    math::ln(sum) + max
}

/// Conditional distribution over tags given the active predicates.
pub fn prob_dist(weights: &WeightMatrix, predicates: &[PredicateId]) -> Vec<f64> {
    let mut scores = vec![0.0; weights.n_tags()];
    accumulate_scores(weights.values(), weights.n_tags(), predicates, &mut scores);
    softmax_in_place(&mut scores);
    scores
}

/// Log-probability of `tag` given the active predicates; used by decoders so
/// every path accumulates identical floating-point values.
pub(crate) fn log_prob_into(
    weights: &WeightMatrix,
    predicates: &[PredicateId],
    scores: &mut [f64],
) {
    accumulate_scores(weights.values(), weights.n_tags(), predicates, scores);
    let mut max = f64::NEG_INFINITY;
    for &s in scores.iter() {
        max = max.max(s);
    }
    let mut sum = 0.0;
    for &s in scores.iter() {
        sum += math::exp(s - max);
    }
    let log_z = math::ln(sum) + max;
    for s in scores.iter_mut() {
        *s -= log_z;
    }
}

fn nll_and_gradient_flat(
    values: &[f64],
    n_tags: usize,
    events: &[TrainingEvent],
    l2_sigma2: f64,
    gradient: &mut [f64],
) -> f64 {
    debug_assert_eq!(values.len(), gradient.len());
    gradient.fill(0.0);
    let mut scores = vec![0.0; n_tags];
    let mut nll = 0.0;
    for event in events {
        accumulate_scores(values, n_tags, &event.predicates, &mut scores);
        let gold_score = scores[event.gold.index()];
        let log_z = softmax_in_place(&mut scores);
        nll += log_z - gold_score;
        for p in &event.predicates {
            let start = p.index() * n_tags;
            let row = &mut gradient[start..start + n_tags];
            for (g, d) in row.iter_mut().zip(&scores) {
                *g += d;
            }
            row[event.gold.index()] -= 1.0;
        }
    }
    // Gaussian prior.
    let inv_sigma2 = 1.0 / l2_sigma2;
    for (g, &w) in gradient.iter_mut().zip(values) {
        *g += w * inv_sigma2;
        nll += w * w * (0.5 * inv_sigma2);
    }
    nll
}

/// Regularized negative log-likelihood of the events and its gradient.
pub fn nll_and_gradient(
    weights: &WeightMatrix,
    events: &[TrainingEvent],
    l2_sigma2: f64,
) -> (f64, Vec<f64>) {
    let mut gradient = vec![0.0; weights.values().len()];
    let value = nll_and_gradient_flat(
        weights.values(),
        weights.n_tags(),
        events,
        l2_sigma2,
        &mut gradient,
    );
    (value, gradient)
}

/// Trains weights from zero with L-BFGS until the gradient max-norm reaches
/// `config.tolerance` or `config.max_iterations` passes.
pub fn train(
    events: &[TrainingEvent],
    index: &PredicateIndex,
    n_tags: usize,
    config: &TrainConfig,
) -> Result<TrainOutcome, MaxentError> {
    config.validate()?;
    if events.is_empty() {
        return Err(MaxentError::NoEvents);
    }
    let dim = index.len() * n_tags;
    let sigma2 = config.l2_sigma2;
    let outcome = optimize::minimize(
        vec![0.0; dim],
        OptimizeParams {
            tolerance: config.tolerance,
            max_iterations: config.max_iterations as usize,
        },
        |x, grad| nll_and_gradient_flat(x, n_tags, events, sigma2, grad),
    )
    .map_err(|OptimizeError::NonFinite { iteration }| MaxentError::NonFinite { iteration })?;

    Ok(TrainOutcome {
        weights: WeightMatrix::from_values(outcome.position, index.len(), n_tags)?,
        converged: outcome.converged,
        iterations: outcome.iterations,
        objective: outcome.value,
        gradient_max_norm: outcome.gradient_max_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_conllu;
    use crate::lexicon::load_lexicon;

    fn corpus_from(lines: &[&[(&str, &str)]]) -> Corpus {
        let mut text = String::new();
        for sentence in lines {
            for (i, (form, tag)) in sentence.iter().enumerate() {
                text.push_str(&alloc::format!(
                    "{}\t{form}\t_\t{tag}\t_\t_\t_\t_\t_\t_\n",
                    i + 1
                ));
            }
            text.push('\n');
        }
        parse_conllu(&text).unwrap()
    }

    #[test]
    fn one_event_per_token() {
        let corpus = corpus_from(&[&[("the", "DET"), ("cat", "NOUN"), ("sleeps", "VERB")]]);
        let (index, events) =
            build_events(&corpus, &Lexicon::new(), &FeatureConfig::default(), 1).unwrap();
        assert_eq!(events.len(), 3);
        assert!(index.is_frozen());
        assert!(index.lookup("wd=cat").is_some());
        // Gold history: third token sees ptag-1=NOUN, ptag-2=DET.
        let third = &events[2];
        let ptag1 = index.lookup("ptag-1=NOUN").unwrap();
        assert!(third.predicates.contains(&ptag1));
    }

    #[test]
    fn cutoff_drops_rare_predicates() {
        let corpus = corpus_from(&[&[("foo", "X"), ("bar", "X"), ("bar", "X")]]);
        let (index, events) =
            build_events(&corpus, &Lexicon::new(), &FeatureConfig::default(), 2).unwrap();
        assert!(index.lookup("wd=foo").is_none());
        assert!(index.lookup("wd=bar").is_some());
        for event in &events {
            for p in &event.predicates {
                assert!(p.index() < index.len());
            }
        }
    }

    #[test]
    fn missing_gold_tag_is_an_error() {
        let corpus = parse_conllu("1\tw\t_\t_\t_\t_\t_\t_\t_\t_\n1\tv\t_\tX\t_\t_\t_\t_\t_\t_\n").unwrap();
        let result = build_events(&corpus, &Lexicon::new(), &FeatureConfig::default(), 1);
        assert_eq!(
            result.unwrap_err(),
            MaxentError::MissingGoldTag { sentence: 0, token: 0 }
        );
    }

    #[test]
    fn lexical_toggle_changes_only_lexical_predicates() {
        let corpus = corpus_from(&[&[("the", "DET"), ("walk", "NOUN")]]);
        let lexicon = load_lexicon("walk\tNOUN\nwalk\tVERB\nthe\tDET\n").unwrap();
        let (std_index, _) =
            build_events(&corpus, &lexicon, &FeatureConfig::default(), 1).unwrap();
        let (lex_index, _) =
            build_events(&corpus, &lexicon, &FeatureConfig::with_lexical(true), 1).unwrap();
        let std_names: hashbrown::HashSet<&String> = std_index.names().iter().collect();
        let lex_names: hashbrown::HashSet<&String> = lex_index.names().iter().collect();
        assert!(std_names.is_subset(&lex_names));
        for extra in lex_names.difference(&std_names) {
            assert!(
                extra.starts_with("lex") || extra.starts_with("ptag-1.lex"),
                "unexpected non-lexical difference: {extra}"
            );
        }
    }

    #[test]
    fn zero_weights_give_uniform_distribution() {
        let weights = WeightMatrix::zeros(4, 5);
        let dist = prob_dist(&weights, &[PredicateId(0), PredicateId(3)]);
        for p in &dist {
            assert!((p - 0.2).abs() < 1e-12);
        }
        let empty = prob_dist(&weights, &[]);
        for p in &empty {
            assert!((p - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn single_predicate_closed_form() {
        let mut weights = WeightMatrix::zeros(1, 2);
        weights.set(PredicateId(0), TagId(0), core::f64::consts::LN_2);
        let dist = prob_dist(&weights, &[PredicateId(0)]);
        assert!((dist[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((dist[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn distribution_sums_to_one_with_positive_entries() {
        let mut weights = WeightMatrix::zeros(3, 4);
        let values = [2.5, -1.0, 0.3, 4.0, -2.0, 0.0, 1.0, -0.5, 3.3, 2.2, -4.0, 0.7];
        for (i, v) in values.iter().enumerate() {
            weights.set(PredicateId((i / 4) as u32), TagId((i % 4) as u32), *v);
        }
        let dist = prob_dist(&weights, &[PredicateId(0), PredicateId(2)]);
        let sum: f64 = dist.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!(dist.iter().all(|&p| p > 0.0 && p < 1.0));
    }

    #[test]
    fn shift_invariance_of_prob_dist() {
        let mut weights = WeightMatrix::zeros(2, 3);
        for p in 0..2 {
            for t in 0..3 {
                weights.set(PredicateId(p), TagId(t), (p as f64) - 0.7 * (t as f64));
            }
        }
        let before = prob_dist(&weights, &[PredicateId(0), PredicateId(1)]);
        for t in 0..3 {
            let w = weights.get(PredicateId(1), TagId(t));
            weights.set(PredicateId(1), TagId(t), w + 5.25);
        }
        let after = prob_dist(&weights, &[PredicateId(0), PredicateId(1)]);
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_nll_is_log_tag_count() {
        let weights = WeightMatrix::zeros(2, 2);
        let events = [TrainingEvent {
            predicates: alloc::vec![PredicateId(0)],
            gold: TagId(0),
        }];
        let (value, _) = nll_and_gradient(&weights, &events, 1.0);
        assert!((value - core::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn huge_sigma_reduces_to_likelihood_gradient() {
        let mut weights = WeightMatrix::zeros(2, 2);
        weights.set(PredicateId(0), TagId(0), 0.4);
        weights.set(PredicateId(1), TagId(1), -0.3);
        let events = [
            TrainingEvent {
                predicates: alloc::vec![PredicateId(0), PredicateId(1)],
                gold: TagId(0),
            },
            TrainingEvent {
                predicates: alloc::vec![PredicateId(1)],
                gold: TagId(1),
            },
        ];
        let (_, with_prior) = nll_and_gradient(&weights, &events, 1e18);
        // Pure likelihood gradient: expected minus empirical counts.
        let mut expected = alloc::vec![0.0; 4];
        for event in &events {
            let dist = prob_dist(&weights, &event.predicates);
            for p in &event.predicates {
                for t in 0..2 {
                    expected[p.index() * 2 + t] += dist[t];
                }
                expected[p.index() * 2 + event.gold.index()] -= 1.0;
            }
        }
        for (a, b) in with_prior.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences_small() {
        let mut weights = WeightMatrix::zeros(3, 2);
        let seed_values = [0.3, -0.2, 0.15, 0.4, -0.35, 0.05];
        for (i, v) in seed_values.iter().enumerate() {
            weights.set(PredicateId((i / 2) as u32), TagId((i % 2) as u32), *v);
        }
        let events = [
            TrainingEvent {
                predicates: alloc::vec![PredicateId(0), PredicateId(2)],
                gold: TagId(1),
            },
            TrainingEvent {
                predicates: alloc::vec![PredicateId(1)],
                gold: TagId(0),
            },
        ];
        let sigma2 = 2.0;
        let (_, analytic) = nll_and_gradient(&weights, &events, sigma2);
        let step = 1e-6;
        for (i, &analytic_i) in analytic.iter().enumerate() {
            let mut plus = weights.clone();
            plus.values_mut()[i] += step;
            let mut minus = weights.clone();
            minus.values_mut()[i] -= step;
            let (f_plus, _) = nll_and_gradient(&plus, &events, sigma2);
            let (f_minus, _) = nll_and_gradient(&minus, &events, sigma2);
            let numeric = (f_plus - f_minus) / (2.0 * step);
            assert!(
                (analytic_i - numeric).abs() < 1e-6 * (1.0 + numeric.abs()),
                "component {i}: {analytic_i} vs {numeric}"
            );
        }
    }

    #[test]
    fn separable_events_reach_full_training_accuracy() {
        // Predicate 0 marks tag 0, predicate 1 marks tag 1.
        let mut events = Vec::new();
        for _ in 0..10 {
            events.push(TrainingEvent {
                predicates: alloc::vec![PredicateId(0)],
                gold: TagId(0),
            });
            events.push(TrainingEvent {
                predicates: alloc::vec![PredicateId(1)],
                gold: TagId(1),
            });
        }
        let index = PredicateIndex::from_names(["a=1", "b=1"]);
        let outcome = train(&events, &index, 2, &TrainConfig::default()).unwrap();
        for event in &events {
            let dist = prob_dist(&outcome.weights, &event.predicates);
            let best = if dist[0] > dist[1] { TagId(0) } else { TagId(1) };
            assert_eq!(best, event.gold);
        }
    }

    #[test]
    fn training_objective_descends_from_uniform() {
        let corpus = corpus_from(&[
            &[("the", "DET"), ("cat", "NOUN"), ("sleeps", "VERB")],
            &[("a", "DET"), ("dog", "NOUN"), ("barks", "VERB")],
            &[("the", "DET"), ("dog", "NOUN"), ("sleeps", "VERB")],
        ]);
        let (index, events) =
            build_events(&corpus, &Lexicon::new(), &FeatureConfig::default(), 1).unwrap();
        let n_tags = corpus.tagset.len();
        let outcome = train(&events, &index, n_tags, &TrainConfig::default()).unwrap();
        let initial = events.len() as f64 * math::ln(n_tags as f64);
        assert!(outcome.objective <= initial);
    }

    #[test]
    fn duplicated_events_with_halved_sigma_share_the_optimum() {
        let index = PredicateIndex::from_names(["a=1", "b=1", "c=1"]);
        let events = [
            TrainingEvent {
                predicates: alloc::vec![PredicateId(0), PredicateId(2)],
                gold: TagId(0),
            },
            TrainingEvent {
                predicates: alloc::vec![PredicateId(1)],
                gold: TagId(1),
            },
            TrainingEvent {
                predicates: alloc::vec![PredicateId(1), PredicateId(2)],
                gold: TagId(0),
            },
        ];
        let mut doubled = events.to_vec();
        doubled.extend(events.iter().cloned());

        // Doubling every event doubles the likelihood term, so halving the
        // prior variance doubles the penalty and the whole objective scales
        // by two, preserving the optimum.
        let base_cfg = TrainConfig {
            tolerance: 1e-9,
            ..TrainConfig::default()
        };
        let halved_cfg = TrainConfig {
            l2_sigma2: base_cfg.l2_sigma2 / 2.0,
            ..base_cfg.clone()
        };
        let w1 = train(&events, &index, 2, &base_cfg).unwrap().weights;
        let w2 = train(&doubled, &index, 2, &halved_cfg).unwrap().weights;
        for (a, b) in w1.values().iter().zip(w2.values()) {
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }

        // Scaling oracle: likelihood parts are exactly proportional.
        let probe = WeightMatrix::from_values(
            alloc::vec![0.3, -0.1, 0.2, 0.05, -0.4, 0.6],
            3,
            2,
        )
        .unwrap();
        let prior: f64 = probe.values().iter().map(|w| w * w / 2.0).sum();
        let (single, _) = nll_and_gradient(&probe, &events, 1.0);
        let (double, _) = nll_and_gradient(&probe, &doubled, 1.0);
        assert!(((double - prior) - 2.0 * (single - prior)).abs() < 1e-9);
    }

    #[test]
    fn training_is_bit_reproducible() {
        let corpus = corpus_from(&[
            &[("a", "X"), ("b", "Y")],
            &[("b", "Y"), ("a", "X"), ("c", "X")],
        ]);
        let (index, events) =
            build_events(&corpus, &Lexicon::new(), &FeatureConfig::default(), 1).unwrap();
        let cfg = TrainConfig::default();
        let w1 = train(&events, &index, 2, &cfg).unwrap().weights;
        let w2 = train(&events, &index, 2, &cfg).unwrap().weights;
        assert_eq!(w1.values().len(), w2.values().len());
        for (a, b) in w1.values().iter().zip(w2.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn empty_event_list_is_rejected() {
        let index = PredicateIndex::from_names(["a=1"]);
        assert_eq!(
            train(&[], &index, 2, &TrainConfig::default()).unwrap_err(),
            MaxentError::NoEvents
        );
    }
}
