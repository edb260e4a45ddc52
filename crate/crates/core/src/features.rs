//! Feature templates: turns one tagging decision (a position in a sentence
//! plus the two previously assigned tags) into a set of predicate strings.
//!
//! Predicates are encoded as `name=value`. Values that concatenate several
//! fields (`swds`, `ptags`, `lex+1.2`, the hybrid feature) use a reserved
//! non-printing joiner, since surface forms may contain any printable
//! character. Tag disjunctions use `|` between tags, in the lexicon's
//! canonical (sorted) order.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::Sentence;
use crate::lexicon::Lexicon;

/// Joiner between fields of a concatenated predicate value (U+001F, the unit
/// separator).
pub const VALUE_JOINER: char = '\u{1f}';

/// Joiner between tags of a lexicon disjunction value.
pub const DISJUNCTION_JOINER: char = '|';

/// Which templates are active and with which affix-length ranges. Persisted
/// in the model header so tagging reproduces training-time extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureConfig {
    /// The corpus-based baseline templates. Required; lexical features only
    /// extend the baseline.
    pub standard: bool,
    /// The lexicon-based templates (local, contextual, hybrid).
    pub lexical: bool,
    /// Fall back to the lowercased form on lexicon lookup misses.
    pub case_fallback: bool,
    /// Longest prefix of the current word used as a feature.
    pub prefix_max: usize,
    /// Longest suffix of the current word used as a feature.
    pub suffix_max: usize,
    /// Longest prefix/suffix of the following word used as a feature.
    pub next_affix_max: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            standard: true,
            lexical: false,
            case_fallback: true,
            prefix_max: 4,
            suffix_max: 5,
            next_affix_max: 3,
        }
    }
}

impl FeatureConfig {
    pub fn with_lexical(lexical: bool) -> Self {
        FeatureConfig {
            lexical,
            ..FeatureConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), FeatureConfigError> {
        if !self.standard {
            return Err(FeatureConfigError::StandardRequired);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureConfigError {
    /// Lexical features extend the standard baseline; a configuration
    /// without the baseline is invalid.
    StandardRequired,
}

impl fmt::Display for FeatureConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureConfigError::StandardRequired => {
                write!(f, "the standard feature baseline cannot be disabled")
            }
        }
    }
}

impl core::error::Error for FeatureConfigError {}

/// Number of feature templates a configuration activates.
///
/// Affix templates count once per length `k`. The three uppercase indicators
/// (`uc`, `niuc`, `auc`) count as one case template; `nb` and `hyph` count
/// one each. With the default ranges this gives 13 local + 14 contextual
/// standard templates, and 7 more (3 local + 3 contextual + 1 hybrid) with
/// lexical features on.
pub fn template_count(cfg: &FeatureConfig) -> Result<usize, FeatureConfigError> {
    cfg.validate()?;
    let local_standard = 1 + cfg.prefix_max + cfg.suffix_max + 3;
    let contextual_standard = 4 + 1 + 2 * cfg.next_affix_max + 3;
    let lexical = if cfg.lexical { 3 + 3 + 1 } else { 0 };
    Ok(local_standard + contextual_standard + lexical)
}

/// Everything one tagging decision may look at: the sentence, the 1-based
/// position, and the two previously assigned tags (the reserved boundary tag
/// before the sentence start).
#[derive(Debug, Clone, Copy)]
pub struct DecisionContext<'a> {
    pub sentence: &'a Sentence,
    pub position: usize,
    pub prev_tag: &'a str,
    pub prev_prev_tag: &'a str,
}

/// The set of active predicates for one decision. Emission order is fixed
/// (it determines summation order downstream), equality is order-independent.
#[derive(Debug, Clone, Eq)]
pub struct PredicateVector {
    predicates: Vec<String>,
}

impl PredicateVector {
    pub fn as_slice(&self) -> &[String] {
        &self.predicates
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn contains(&self, predicate: &str) -> bool {
        self.predicates.iter().any(|p| p == predicate)
    }

    pub fn into_vec(self) -> Vec<String> {
        self.predicates
    }
}

impl PartialEq for PredicateVector {
    fn eq(&self, other: &Self) -> bool {
        if self.predicates.len() != other.predicates.len() {
            return false;
        }
        let mut left: Vec<&str> = self.predicates.iter().map(String::as_str).collect();
        let mut right: Vec<&str> = other.predicates.iter().map(String::as_str).collect();
        left.sort_unstable();
        right.sort_unstable();
        left == right
    }
}

/// The tag-history-independent part of a decision at one position: all
/// static predicates plus the cached disjunction for the following word
/// (needed by the hybrid feature). Decoders compute this once per position
/// and complete it per hypothesis with [`push_dynamic_predicates`].
#[derive(Debug, Clone)]
pub struct StaticPredicates {
    pub predicates: Vec<String>,
    pub next_lex_disj: Option<String>,
}

fn disjunction(tags: &[String]) -> String {
    let mut out = String::new();
    for (i, tag) in tags.iter().enumerate() {
        if i > 0 {
            out.push(DISJUNCTION_JOINER);
        }
        out.push_str(tag);
    }
    out
}

fn lex_at<'a>(
    sentence: &Sentence,
    position: isize,
    lexicon: &'a Lexicon,
    case_fallback: bool,
) -> &'a [String] {
    if position < 1 || position as usize > sentence.len() {
        // Boundary pseudo-words are unknown to the lexicon by definition.
        lexicon.unknown()
    } else {
        lexicon.lex(&sentence.tokens[position as usize - 1].form, case_fallback)
    }
}

fn join2(a: &str, b: &str) -> String {
    let mut out = String::with_capacity(a.len() + b.len() + 3);
    out.push_str(a);
    out.push(VALUE_JOINER);
    out.push_str(b);
    out
}

/// Extracts the static predicates for 1-based `position`.
pub fn extract_static(
    sentence: &Sentence,
    position: usize,
    lexicon: &Lexicon,
    cfg: &FeatureConfig,
) -> StaticPredicates {
    debug_assert!(position >= 1 && position <= sentence.len());
    let i = position as isize;
    let word = sentence.word_at(i);
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    let mut preds: Vec<String> = Vec::with_capacity(40);

    // Local standard.
    preds.push(format!("wd={word}"));
    let mut prefix = String::new();
    for k in 1..=cfg.prefix_max.min(n) {
        prefix.push(chars[k - 1]);
        preds.push(format!("pref{k}={prefix}"));
    }
    for k in 1..=cfg.suffix_max.min(n) {
        let suffix: String = chars[n - k..].iter().collect();
        preds.push(format!("suff{k}={suffix}"));
    }
    if chars.iter().any(|c| c.is_numeric()) {
        preds.push("nb=1".to_string());
    }
    if chars.contains(&'-') {
        preds.push("hyph=1".to_string());
    }
    let has_uppercase = chars.iter().any(|c| c.is_uppercase());
    if has_uppercase {
        preds.push("uc=1".to_string());
        if position > 1 {
            preds.push("niuc=1".to_string());
        }
    }
    let has_letter = chars.iter().any(|c| c.is_alphabetic());
    let all_cased_upper = chars
        .iter()
        .filter(|c| c.is_uppercase() || c.is_lowercase())
        .all(|c| c.is_uppercase());
    if has_letter && all_cased_upper {
        preds.push("auc=1".to_string());
    }

    // Contextual standard (word part).
    let prev2 = sentence.word_at(i - 2);
    let prev1 = sentence.word_at(i - 1);
    let next1 = sentence.word_at(i + 1);
    let next2 = sentence.word_at(i + 2);
    preds.push(format!("wd-2={prev2}"));
    preds.push(format!("wd-1={prev1}"));
    preds.push(format!("wd+1={next1}"));
    preds.push(format!("wd+2={next2}"));
    preds.push(format!("swds={}", join2(prev1, next1)));
    if position < sentence.len() {
        let next_chars: Vec<char> = next1.chars().collect();
        let m = next_chars.len();
        let mut next_prefix = String::new();
        for k in 1..=cfg.next_affix_max.min(m) {
            next_prefix.push(next_chars[k - 1]);
            preds.push(format!("pref+1_{k}={next_prefix}"));
        }
        for k in 1..=cfg.next_affix_max.min(m) {
            let suffix: String = next_chars[m - k..].iter().collect();
            preds.push(format!("suff+1_{k}={suffix}"));
        }
    }

    // Lexical (local and contextual; the hybrid part is dynamic).
    let mut next_lex_disj = None;
    if cfg.lexical {
        let current = lex_at(sentence, i, lexicon, cfg.case_fallback);
        if current.len() == 1 {
            preds.push(format!("lexu={}", current[0]));
        } else {
            for tag in current {
                preds.push(format!("lexin={tag}"));
            }
            preds.push(format!("lexdisj={}", disjunction(current)));
        }
        let disj1 = disjunction(lex_at(sentence, i + 1, lexicon, cfg.case_fallback));
        let disj2 = disjunction(lex_at(sentence, i + 2, lexicon, cfg.case_fallback));
        preds.push(format!("lex+1={disj1}"));
        preds.push(format!("lex+2={disj2}"));
        preds.push(format!("lex+1.2={}", join2(&disj1, &disj2)));
        next_lex_disj = Some(disj1);
    }

    StaticPredicates {
        predicates: preds,
        next_lex_disj,
    }
}

/// Appends the tag-history-dependent predicates for one hypothesis.
pub fn push_dynamic_predicates(
    out: &mut Vec<String>,
    prev_tag: &str,
    prev_prev_tag: &str,
    next_lex_disj: Option<&str>,
) {
    out.push(format!("ptag-2={prev_prev_tag}"));
    out.push(format!("ptag-1={prev_tag}"));
    out.push(format!("ptags={}", join2(prev_prev_tag, prev_tag)));
    if let Some(disj) = next_lex_disj {
        out.push(format!("ptag-1.lex+1={}", join2(prev_tag, disj)));
    }
}

/// Extracts every active predicate for one decision.
pub fn extract_predicates(
    ctx: &DecisionContext<'_>,
    lexicon: &Lexicon,
    cfg: &FeatureConfig,
) -> PredicateVector {
    let mut stat = extract_static(ctx.sentence, ctx.position, lexicon, cfg);
    push_dynamic_predicates(
        &mut stat.predicates,
        ctx.prev_tag,
        ctx.prev_prev_tag,
        stat.next_lex_disj.as_deref(),
    );
    PredicateVector {
        predicates: stat.predicates,
    }
}
