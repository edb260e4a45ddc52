//! Tagged corpora: CoNLL-U parsing, raw-text parsing, and corpus statistics.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use hashbrown::{HashMap, HashSet};

/// Default window for [`normalized_type_token_ratio`].
pub const DEFAULT_TTR_WINDOW: usize = 60_000;

/// Word used for positions before the first token of a sentence.
pub const BOUNDARY_WORD_LEFT: &str = "<s>";
/// Word used for positions after the last token of a sentence.
pub const BOUNDARY_WORD_RIGHT: &str = "</s>";
/// Default tag string reserved for pre-sentence positions.
pub const DEFAULT_BOUNDARY_TAG: &str = "<s>";

/// Identifier of a tag inside a [`TagSet`] (contiguous, starting at 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TagId(pub u32);

impl TagId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One surface token, optionally carrying a gold tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub form: String,
    pub gold_tag: Option<TagId>,
}

/// A non-empty token sequence. Feature formulas index it 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Surface form at 1-based position `i`, with boundary words outside 1..=n.
    pub fn word_at(&self, i: isize) -> &str {
        if i < 1 {
            BOUNDARY_WORD_LEFT
        } else if i as usize > self.tokens.len() {
            BOUNDARY_WORD_RIGHT
        } else {
            &self.tokens[i as usize - 1].form
        }
    }
}

/// Bijection between tag strings and contiguous [`TagId`]s, plus the reserved
/// boundary tag used as `t_{-1}`/`t_{-2}` before the sentence start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSet {
    tags: Vec<String>,
    by_name: HashMap<String, TagId>,
    boundary: String,
}

impl TagSet {
    /// Builds a tag set from tag strings. Tags are sorted so that ids are
    /// independent of sentence order; the boundary tag must not occur.
    pub fn new<I, S>(tags: I, boundary: &str) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let sorted: BTreeSet<String> = tags.into_iter().map(|t| t.as_ref().to_owned()).collect();
        if sorted.contains(boundary) {
            return Err(CorpusError::BoundaryTagInData {
                tag: boundary.to_owned(),
            });
        }
        let tags: Vec<String> = sorted.into_iter().collect();
        let by_name = tags
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), TagId(i as u32)))
            .collect();
        Ok(TagSet {
            tags,
            by_name,
            boundary: boundary.to_owned(),
        })
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn id(&self, tag: &str) -> Option<TagId> {
        self.by_name.get(tag).copied()
    }

    /// Panics if `id` is out of range; ids come from this tag set.
    pub fn tag(&self, id: TagId) -> &str {
        &self.tags[id.index()]
    }

    pub fn boundary_tag(&self) -> &str {
        &self.boundary
    }

    /// Tag strings in id order.
    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn ids(&self) -> impl Iterator<Item = TagId> {
        (0..self.tags.len() as u32).map(TagId)
    }
}

/// An in-memory treebank: sentences, their tag inventory, and the exact
/// (case-sensitive) set of surface forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
    pub tagset: TagSet,
    vocabulary: HashSet<String>,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>, tagset: TagSet) -> Self {
        let vocabulary = sentences
            .iter()
            .flat_map(|s| s.tokens.iter().map(|t| t.form.clone()))
            .collect();
        Corpus {
            sentences,
            tagset,
            vocabulary,
        }
    }

    /// The exact set of surface forms occurring in the corpus.
    pub fn vocabulary(&self) -> &HashSet<String> {
        &self.vocabulary
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    /// Serializes back to CoNLL-U (only the columns this engine reads carry
    /// data; the rest are `_`).
    pub fn to_conllu_string(&self) -> String {
        let mut out = String::new();
        for sentence in &self.sentences {
            for (i, token) in sentence.tokens.iter().enumerate() {
                let tag = token
                    .gold_tag
                    .map(|t| self.tagset.tag(t))
                    .unwrap_or("_");
                out.push_str(&alloc::format!(
                    "{}\t{}\t_\t{}\t_\t_\t_\t_\t_\t_\n",
                    i + 1,
                    token.form,
                    tag
                ));
            }
            out.push('\n');
        }
        out
    }
}

/// Errors raised while building corpora.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusError {
    /// A token line does not have exactly 10 tab-separated columns.
    MalformedLine { line: usize, columns: usize },
    /// A surface form is empty or contains a tab or newline.
    InvalidForm { line: usize },
    /// The input contains no sentences.
    Empty,
    /// The reserved boundary tag occurs as a real tag in the data.
    BoundaryTagInData { tag: String },
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::MalformedLine { line, columns } => {
                write!(f, "line {line}: expected 10 tab-separated columns, found {columns}")
            }
            CorpusError::InvalidForm { line } => {
                write!(f, "line {line}: empty or tab/newline-containing surface form")
            }
            CorpusError::Empty => write!(f, "input contains no sentences"),
            CorpusError::BoundaryTagInData { tag } => {
                write!(f, "reserved boundary tag {tag:?} occurs in the data")
            }
        }
    }
}

impl core::error::Error for CorpusError {}

fn valid_form(form: &str) -> bool {
    !form.is_empty() && !form.contains(['\t', '\n', '\r'])
}

/// Parses CoNLL-U text into a [`Corpus`].
///
/// Comment lines (`#`) are skipped, a blank line ends a sentence, multiword
/// range lines (ID containing `-`) and empty nodes (ID containing `.`) are
/// skipped. The form is column 2 and the gold tag column 4 (UPOS); a `_` tag
/// yields a token without a gold tag. The tag set is built from all observed
/// gold tags.
pub fn parse_conllu(text: &str) -> Result<Corpus, CorpusError> {
    let mut sentences: Vec<Vec<(String, Option<String>)>> = Vec::new();
    let mut current: Vec<(String, Option<String>)> = Vec::new();
    let mut observed_tags: BTreeSet<String> = BTreeSet::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.is_empty() {
            if !current.is_empty() {
                sentences.push(core::mem::take(&mut current));
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let columns: Vec<&str> = line.split('\t').collect();
        if columns.len() != 10 {
            return Err(CorpusError::MalformedLine {
                line: line_no,
                columns: columns.len(),
            });
        }
        let id = columns[0];
        if id.contains('-') || id.contains('.') {
            // Multiword token ranges and empty nodes are not syntactic words.
            continue;
        }
        let form = columns[1];
        if !valid_form(form) {
            return Err(CorpusError::InvalidForm { line: line_no });
        }
        let upos = columns[3];
        let tag = if upos == "_" {
            None
        } else {
            observed_tags.insert(upos.to_owned());
            Some(upos.to_owned())
        };
        current.push((form.to_owned(), tag));
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    if sentences.is_empty() {
        return Err(CorpusError::Empty);
    }

    let tagset = TagSet::new(observed_tags.iter(), DEFAULT_BOUNDARY_TAG)?;
    let sentences = sentences
        .into_iter()
        .map(|tokens| Sentence {
            tokens: tokens
                .into_iter()
                .map(|(form, tag)| Token {
                    form,
                    gold_tag: tag.map(|t| tagset.id(&t).expect("tag was observed")),
                })
                .collect(),
        })
        .collect();
    Ok(Corpus::new(sentences, tagset))
}

/// Parses raw tagging input: one sentence per line, tokens separated by
/// single spaces. Blank lines are skipped.
pub fn parse_raw(text: &str) -> Result<Vec<Sentence>, CorpusError> {
    let mut sentences = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.is_empty() {
            continue;
        }
        let mut tokens = Vec::new();
        for form in line.split(' ') {
            if !valid_form(form) {
                return Err(CorpusError::InvalidForm { line: idx + 1 });
            }
            tokens.push(Token {
                form: form.to_string(),
                gold_tag: None,
            });
        }
        sentences.push(Sentence { tokens });
    }
    Ok(sentences)
}

/// Result of [`normalized_type_token_ratio`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeTokenRatio {
    /// Distinct forms among the counted tokens, divided by their number.
    pub ratio: f64,
    /// How many tokens were actually counted (`min(window, total)`).
    pub tokens_counted: usize,
    /// True when the corpus ran out before filling the window.
    pub truncated: bool,
}

/// Type/token ratio over the first `window` tokens, reading sentences in
/// order. Normalizing to a fixed window makes the ratio comparable across
/// corpora of different sizes.
pub fn normalized_type_token_ratio(corpus: &Corpus, window: usize) -> TypeTokenRatio {
    assert!(window > 0, "window must be positive");
    let mut seen: HashSet<&str> = HashSet::new();
    let mut counted = 0usize;
    for sentence in &corpus.sentences {
        for token in &sentence.tokens {
            if counted == window {
                break;
            }
            seen.insert(token.form.as_str());
            counted += 1;
        }
        if counted == window {
            break;
        }
    }
    assert!(counted > 0, "corpus must be non-empty");
    TypeTokenRatio {
        ratio: seen.len() as f64 / counted as f64,
        tokens_counted: counted,
        truncated: counted < window,
    }
}
