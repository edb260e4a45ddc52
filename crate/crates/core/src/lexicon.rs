//! External morphosyntactic lexicons: loading, coarse-tag projection,
//! punctuation coverage, and the `lex` lookup used by the lexical features.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use sha2::{Digest, Sha256};

/// Tag returned for words unknown to the lexicon.
pub const UNK_TAG: &str = "_unk_";

/// Separators stripped by default when projecting tags to their coarsest
/// category.
pub const DEFAULT_SEPARATORS: &[char] = &[':', '+', '.', '-'];

/// Symbols guaranteed an entry by [`Lexicon::ensure_punctuation`].
pub const PUNCTUATION_FORMS: &[&str] = &[
    ".", ",", ";", ":", "!", "?", "…", "(", ")", "[", "]", "{", "}", "\"", "'",
    "«", "»", "—", "–", "-", "/",
];

/// How a raw lexicon file is turned into the lexicon a model uses. Recorded
/// in the model header so tagging can reproduce it exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconConfig {
    /// Characters that end the coarse prefix of a raw tag. Empty disables
    /// projection.
    pub separators: String,
    /// Tag assigned to punctuation symbols missing from the source lexicon.
    pub punct_tag: String,
}

impl Default for LexiconConfig {
    fn default() -> Self {
        LexiconConfig {
            separators: DEFAULT_SEPARATORS.iter().collect(),
            punct_tag: "PUNCT".to_string(),
        }
    }
}

/// A form → tag-set map with its own tag inventory, independent of the
/// corpus tag set.
///
/// Tag sets are non-empty, deduplicated, and stored sorted so every derived
/// string (disjunction features, serialization, fingerprint) is canonical.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Lexicon {
    entries: HashMap<String, Vec<String>>,
    unk: [String; 1],
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon {
            entries: HashMap::new(),
            unk: [UNK_TAG.to_string()],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, form: &str) -> bool {
        self.entries.contains_key(form)
    }

    /// All tags occurring in entries, sorted.
    pub fn tag_inventory(&self) -> BTreeSet<&str> {
        self.entries
            .values()
            .flat_map(|tags| tags.iter().map(String::as_str))
            .collect()
    }

    fn insert(&mut self, form: &str, tag: &str) {
        let tags = self.entries.entry_ref(form).or_default();
        if let Err(pos) = tags.binary_search_by(|t| t.as_str().cmp(tag)) {
            tags.insert(pos, tag.to_owned());
        }
    }

    /// The `{_unk_}` singleton returned for unknown and boundary words.
    pub fn unknown(&self) -> &[String] {
        &self.unk
    }

    /// The set of tags known for `form`, or the `{_unk_}` singleton.
    ///
    /// With `case_fallback`, a form absent from the lexicon falls back to its
    /// lowercased variant, so sentence-initial capitalization does not turn
    /// known words into lexicon-unknowns.
    pub fn lex(&self, form: &str, case_fallback: bool) -> &[String] {
        if let Some(tags) = self.entries.get(form) {
            return tags;
        }
        if case_fallback {
            let lower = form.to_lowercase();
            if lower != form {
                if let Some(tags) = self.entries.get(lower.as_str()) {
                    return tags;
                }
            }
        }
        &self.unk
    }

    /// Applies [`project_coarse`] to every tag, merging entries that collapse
    /// onto the same coarse tag. Tags whose projection would be empty or the
    /// reserved unknown marker are kept unprojected.
    pub fn project(&self, separators: &[char]) -> Lexicon {
        let mut out = Lexicon::new();
        for (form, tags) in &self.entries {
            for tag in tags {
                let coarse = project_coarse(tag, separators);
                let coarse = if coarse.is_empty() || coarse == UNK_TAG {
                    tag
                } else {
                    coarse
                };
                out.insert(form, coarse);
            }
        }
        out
    }

    /// Adds `form → {punct_tag}` for every symbol of [`PUNCTUATION_FORMS`]
    /// that has no entry. Existing entries are left untouched.
    pub fn ensure_punctuation(&self, punct_tag: &str) -> Lexicon {
        let mut out = self.clone();
        for &symbol in PUNCTUATION_FORMS {
            if !out.entries.contains_key(symbol) {
                out.insert(symbol, punct_tag);
            }
        }
        out
    }

    /// Canonical TSV serialization: forms in byte order, one `form<TAB>tag`
    /// line per pair, tags in their stored (sorted) order.
    pub fn to_canonical_tsv(&self) -> String {
        let mut forms: Vec<&String> = self.entries.keys().collect();
        forms.sort_unstable();
        let mut out = String::new();
        for form in forms {
            for tag in &self.entries[form] {
                out.push_str(form);
                out.push('\t');
                out.push_str(tag);
                out.push('\n');
            }
        }
        out
    }

    /// Content hash of the canonical serialization. Two lexicons fingerprint
    /// equal iff they hold the same entries.
    pub fn fingerprint(&self) -> [u8; 32] {
        Sha256::digest(self.to_canonical_tsv().as_bytes()).into()
    }
}

/// Errors raised while loading lexicon files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconError {
    /// A line has no tab separator.
    MissingTab { line: usize },
    /// A line has an empty form or tag field.
    EmptyField { line: usize },
    /// An entry uses the reserved `_unk_` tag.
    ReservedTag { line: usize },
}

impl fmt::Display for LexiconError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexiconError::MissingTab { line } => write!(f, "line {line}: no tab separator"),
            LexiconError::EmptyField { line } => write!(f, "line {line}: empty form or tag"),
            LexiconError::ReservedTag { line } => {
                write!(f, "line {line}: tag {UNK_TAG:?} is reserved")
            }
        }
    }
}

impl core::error::Error for LexiconError {}

/// Loads a `form<TAB>tag` lexicon. Extra trailing columns are ignored and
/// duplicate pairs merge silently; an empty input yields an empty lexicon.
pub fn load_lexicon(text: &str) -> Result<Lexicon, LexiconError> {
    let mut lexicon = Lexicon::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        let mut columns = line.split('\t');
        let form = columns.next().unwrap_or("");
        let Some(tag) = columns.next() else {
            return Err(LexiconError::MissingTab { line: line_no });
        };
        if form.is_empty() || tag.is_empty() {
            return Err(LexiconError::EmptyField { line: line_no });
        }
        if tag == UNK_TAG {
            return Err(LexiconError::ReservedTag { line: line_no });
        }
        lexicon.insert(form, tag);
    }
    Ok(lexicon)
}

/// The prefix of `raw_tag` before the first separator character; the whole
/// tag when no separator occurs.
pub fn project_coarse<'a>(raw_tag: &'a str, separators: &[char]) -> &'a str {
    match raw_tag.find(|c| separators.contains(&c)) {
        Some(pos) => &raw_tag[..pos],
        None => raw_tag,
    }
}

/// Full preparation pipeline: load, project every tag to its coarse
/// category, and guarantee punctuation coverage.
pub fn prepare_lexicon(text: &str, config: &LexiconConfig) -> Result<Lexicon, LexiconError> {
    let separators: Vec<char> = config.separators.chars().collect();
    let lexicon = load_lexicon(text)?;
    let projected = if separators.is_empty() {
        lexicon
    } else {
        lexicon.project(&separators)
    };
    Ok(projected.ensure_punctuation(&config.punct_tag))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_pairs_merge_sorted() {
        let lexicon = load_lexicon("walk\tNOUN\nwalk\tVERB\nwalk\tVERB\n").unwrap();
        assert_eq!(lexicon.lex("walk", false), &["NOUN", "VERB"]);
        assert_eq!(lexicon.len(), 1);
    }

    #[test]
    fn empty_file_yields_empty_lexicon() {
        let lexicon = load_lexicon("").unwrap();
        assert!(lexicon.is_empty());
        assert_eq!(lexicon.lex("anything", true), &[UNK_TAG]);
    }

    #[test]
    fn missing_tab_reports_line() {
        assert_eq!(load_lexicon("a\tX\nnotab\n"), Err(LexiconError::MissingTab { line: 2 }));
    }

    #[test]
    fn extra_columns_are_ignored() {
        let lexicon = load_lexicon("chat\tNOUN\tlemma=chat\tfreq=10\n").unwrap();
        assert_eq!(lexicon.lex("chat", false), &["NOUN"]);
    }

    #[test]
    fn reserved_tag_is_rejected_on_load() {
        assert_eq!(load_lexicon("w\t_unk_\n"), Err(LexiconError::ReservedTag { line: 1 }));
    }

    #[test]
    fn degenerate_projection_keeps_raw_tag() {
        let raw = load_lexicon("w\t:odd\n").unwrap();
        let projected = raw.project(DEFAULT_SEPARATORS);
        assert_eq!(projected.lex("w", false), &[":odd"]);
    }

    #[test]
    fn projection_takes_prefix_before_separator() {
        assert_eq!(project_coarse("NOUN:sg:fem", DEFAULT_SEPARATORS), "NOUN");
        assert_eq!(project_coarse("VERB", DEFAULT_SEPARATORS), "VERB");
        assert_eq!(project_coarse("adj+qual", DEFAULT_SEPARATORS), "adj");
    }

    #[test]
    fn projection_is_idempotent() {
        for tag in ["NOUN:sg:fem", "VERB", "a-b-c", "x.y+z"] {
            let once = project_coarse(tag, DEFAULT_SEPARATORS);
            assert_eq!(project_coarse(once, DEFAULT_SEPARATORS), once);
        }
    }

    #[test]
    fn projected_inventory_shrinks() {
        let raw = load_lexicon("a\tNOUN:sg\nb\tNOUN:pl\nc\tVERB:fin\nd\tVERB:inf\n").unwrap();
        let projected = raw.project(DEFAULT_SEPARATORS);
        assert_eq!(raw.tag_inventory().len(), 4);
        assert_eq!(projected.tag_inventory().len(), 2);
    }

    #[test]
    fn ensure_punctuation_adds_missing_only() {
        let lexicon = load_lexicon(".\tPONCT\n").unwrap();
        let ensured = lexicon.ensure_punctuation("PUNCT");
        assert_eq!(ensured.lex(".", false), &["PONCT"]);
        assert_eq!(ensured.lex(",", false), &["PUNCT"]);
    }

    #[test]
    fn empty_lexicon_gets_exactly_the_punctuation_list() {
        let ensured = Lexicon::new().ensure_punctuation("PUNCT");
        assert_eq!(ensured.len(), PUNCTUATION_FORMS.len());
    }

    #[test]
    fn lex_unknown_form_is_unk_singleton() {
        let lexicon = load_lexicon("chat\tNOUN\n").unwrap();
        assert_eq!(lexicon.lex("zzqq", true), &[UNK_TAG]);
    }

    #[test]
    fn lex_case_fallback() {
        let lexicon = load_lexicon("walk\tNOUN\nwalk\tVERB\n").unwrap();
        assert_eq!(lexicon.lex("Walk", true), &["NOUN", "VERB"]);
        assert_eq!(lexicon.lex("Walk", false), &[UNK_TAG]);
    }

    #[test]
    fn lex_exact_match_wins_over_fallback() {
        let lexicon = load_lexicon("Paris\tPROPN\nparis\tNOUN\n").unwrap();
        assert_eq!(lexicon.lex("Paris", true), &["PROPN"]);
    }

    #[test]
    fn lex_never_returns_empty() {
        let lexicon = load_lexicon("a\tX\n").unwrap();
        for form in ["a", "b", "", "A"] {
            assert!(!lexicon.lex(form, true).is_empty());
        }
    }

    #[test]
    fn canonical_tsv_roundtrips() {
        let lexicon = load_lexicon("b\tZ\na\tY\na\tX\n.\tPONCT\n").unwrap();
        let reloaded = load_lexicon(&lexicon.to_canonical_tsv()).unwrap();
        assert_eq!(lexicon, reloaded);
    }

    #[test]
    fn fingerprint_ignores_line_order_and_duplicates() {
        let a = load_lexicon("x\tN\ny\tV\n").unwrap();
        let b = load_lexicon("y\tV\nx\tN\nx\tN\n").unwrap();
        let c = load_lexicon("y\tV\nx\tV\n").unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn prepare_projects_and_covers_punctuation() {
        let config = LexiconConfig::default();
        let lexicon = prepare_lexicon("manger\tVERB-inf\nmanger\tVERB-fin\n", &config).unwrap();
        assert_eq!(lexicon.lex("manger", false), &["VERB"]);
        assert_eq!(lexicon.lex("…", false), &["PUNCT"]);
        // Re-preparing the canonical output changes nothing.
        let again = prepare_lexicon(&lexicon.to_canonical_tsv(), &config).unwrap();
        assert_eq!(lexicon, again);
    }
}
