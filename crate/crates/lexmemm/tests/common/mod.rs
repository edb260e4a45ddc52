//! Seeded generator for a synthetic morphologically rich language.
//!
//! Tag identity is suffix-driven but deliberately ambiguous: nouns and verbs
//! share one suffix pool, adjectives and adverbs another, so a surface form
//! alone narrows the tag to a pair and only lexical knowledge (or word
//! identity) resolves it. Types are sampled Zipfian, so held-out text
//! contains plenty of out-of-vocabulary tokens.

use std::collections::{BTreeMap, BTreeSet};

use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Zipf;

const NOUN_VERB_SUFFIXES: &[&str] = &["an", "en", "in", "on", "un", "ar"];
const ADJ_ADV_SUFFIXES: &[&str] = &["os", "us", "is", "es"];
const CONSONANTS: &[char] = &['p', 't', 'k', 'b', 'd', 'g', 'm', 'n', 'l', 'r', 's', 'z'];
const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u'];

const DETERMINERS: &[&str] = &["ba", "bi", "bu", "be"];
const PRONOUNS: &[&str] = &["mo", "mi", "ma", "mu", "me"];
const ADPOSITIONS: &[&str] = &["ko", "ku", "ke", "ki"];
const MID_PUNCT: &[&str] = &[",", ";"];
const FINAL_PUNCT: &[&str] = &[".", "!", "?"];

const OPEN_TAGS: &[(&str, usize)] = &[
    ("NOUN", 2400),
    ("VERB", 1800),
    ("ADJ", 1000),
    ("ADV", 800),
];

// Follower weights are nearly independent of the previous tag, so the tag of
// an unknown word is genuinely uncertain between its suffix pool's two
// members and the context cannot give it away.
const FOLLOWERS: &[(&str, f64)] = &[
    ("NOUN", 0.24),
    ("VERB", 0.24),
    ("ADJ", 0.13),
    ("ADV", 0.13),
    ("DET", 0.10),
    ("PRON", 0.07),
    ("ADP", 0.06),
    ("PUNCT", 0.03),
];

pub struct SynthData {
    pub train_conllu: String,
    pub test_conllu: String,
    /// Full-coverage lexicon: every generated type, closed classes included.
    pub lexicon_tsv: String,
}

fn sample_follower(rng: &mut ChaCha8Rng, previous: &str) -> &'static str {
    loop {
        let mut roll = rng.random_range(0.0..1.0);
        for (tag, weight) in FOLLOWERS {
            if roll < *weight {
                // No punctuation runs.
                if *tag == "PUNCT" && previous == "PUNCT" {
                    break;
                }
                return tag;
            }
            roll -= weight;
        }
    }
}

fn stem(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.random_range(2..=3usize);
    let mut out = String::new();
    for _ in 0..syllables {
        out.push(CONSONANTS[rng.random_range(0..CONSONANTS.len())]);
        out.push(VOWELS[rng.random_range(0..VOWELS.len())]);
    }
    out
}

struct TypeInventory {
    /// tag → surfaces ordered by Zipf rank.
    by_tag: BTreeMap<&'static str, Vec<String>>,
    /// tag → Zipf distribution over its surface ranks.
    zipf: BTreeMap<&'static str, Zipf<f64>>,
    /// surface → every tag it was generated with.
    lexicon: BTreeMap<String, BTreeSet<&'static str>>,
}

fn build_types(rng: &mut ChaCha8Rng) -> TypeInventory {
    let mut by_tag = BTreeMap::new();
    let mut zipf = BTreeMap::new();
    let mut lexicon: BTreeMap<String, BTreeSet<&'static str>> = BTreeMap::new();
    for &(tag, count) in OPEN_TAGS {
        let suffixes = if tag == "NOUN" || tag == "VERB" {
            NOUN_VERB_SUFFIXES
        } else {
            ADJ_ADV_SUFFIXES
        };
        let mut surfaces = Vec::with_capacity(count);
        let mut seen = BTreeSet::new();
        while surfaces.len() < count {
            let surface = format!("{}{}", stem(rng), suffixes[rng.random_range(0..suffixes.len())]);
            if seen.insert(surface.clone()) {
                lexicon.entry(surface.clone()).or_default().insert(tag);
                surfaces.push(surface);
            }
        }
        by_tag.insert(tag, surfaces);
        zipf.insert(tag, Zipf::new(count as f64, 1.15).expect("valid Zipf parameters"));
    }
    for (list, tag) in [
        (DETERMINERS, "DET"),
        (PRONOUNS, "PRON"),
        (ADPOSITIONS, "ADP"),
        (MID_PUNCT, "PUNCT"),
        (FINAL_PUNCT, "PUNCT"),
    ] {
        for surface in list {
            lexicon.entry(surface.to_string()).or_default().insert(tag);
        }
    }
    TypeInventory {
        by_tag,
        zipf,
        lexicon,
    }
}

fn word_for<'a>(rng: &mut ChaCha8Rng, types: &'a TypeInventory, tag: &str) -> &'a str {
    match tag {
        "DET" => DETERMINERS[rng.random_range(0..DETERMINERS.len())],
        "PRON" => PRONOUNS[rng.random_range(0..PRONOUNS.len())],
        "ADP" => ADPOSITIONS[rng.random_range(0..ADPOSITIONS.len())],
        "PUNCT" => MID_PUNCT[rng.random_range(0..MID_PUNCT.len())],
        open => {
            let surfaces = &types.by_tag[open];
            let rank = (types.zipf[open].sample(rng) as usize - 1).min(surfaces.len() - 1);
            &surfaces[rank]
        }
    }
}

fn render_sentence(out: &mut String, tokens: &[(String, &str)]) {
    for (i, (form, tag)) in tokens.iter().enumerate() {
        out.push_str(&format!("{}\t{form}\t_\t{tag}\t_\t_\t_\t_\t_\t_\n", i + 1));
    }
    out.push('\n');
}

fn generate_split(rng: &mut ChaCha8Rng, types: &TypeInventory, sentences: usize) -> String {
    let mut out = String::new();
    for _ in 0..sentences {
        let length = rng.random_range(5..=11usize);
        let mut tokens: Vec<(String, &str)> = Vec::with_capacity(length + 1);
        let mut previous = "START";
        for _ in 0..length {
            let tag = sample_follower(rng, previous);
            let form = word_for(rng, types, tag).to_string();
            tokens.push((form, tag));
            previous = tag;
        }
        let form = FINAL_PUNCT[rng.random_range(0..FINAL_PUNCT.len())].to_string();
        tokens.push((form, "PUNCT"));
        render_sentence(&mut out, &tokens);
    }
    out
}

/// Generates the corpus pair and full-coverage lexicon for `seed`.
pub fn generate(seed: u64, train_sentences: usize, test_sentences: usize) -> SynthData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let types = build_types(&mut rng);

    let train_conllu = generate_split(&mut rng, &types, train_sentences);
    let test_conllu = generate_split(&mut rng, &types, test_sentences);

    let mut lexicon_tsv = String::new();
    for (surface, tags) in &types.lexicon {
        for tag in tags {
            lexicon_tsv.push_str(surface);
            lexicon_tsv.push('\t');
            lexicon_tsv.push_str(tag);
            lexicon_tsv.push('\n');
        }
    }

    SynthData {
        train_conllu,
        test_conllu,
        lexicon_tsv,
    }
}
