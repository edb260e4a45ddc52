//! Batch tagging over the two text formats: raw one-sentence-per-line input
//! and CoNLL-U (rewriting only the UPOS column). Sentences are decoded
//! independently, so tagging parallelizes across sentences without changing
//! a single output byte.

use lexmemm_core::corpus::{CorpusError, Sentence, Token};
use lexmemm_core::decoder::DecodeConfig;
use lexmemm_core::model::Tagger;
use rayon::prelude::*;

/// Escapes the raw-output joiner so `form_TAG` stays unambiguous.
pub fn escape_form(form: &str) -> String {
    let mut out = String::with_capacity(form.len());
    for c in form.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '_' => out.push_str("\\_"),
            other => out.push(other),
        }
    }
    out
}

fn run_parallel<T: Send>(threads: usize, op: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if threads > 0 {
        builder = builder.num_threads(threads);
    }
    builder.build().expect("thread pool").install(op)
}

/// Tags sentences in input order, in parallel when `threads != 1`. Output is
/// independent of the thread count.
pub fn tag_all(
    tagger: &Tagger<'_>,
    sentences: &[Sentence],
    decode: &DecodeConfig,
    threads: usize,
) -> Vec<Vec<String>> {
    run_parallel(threads, || {
        sentences
            .par_iter()
            .map(|sentence| {
                tagger
                    .tag_sentence_with(sentence, decode)
                    .into_iter()
                    .map(|t| tagger.model().tagset.tag(t).to_string())
                    .collect()
            })
            .collect()
    })
}

fn valid_form(form: &str) -> bool {
    !form.is_empty() && !form.contains(['\t', '\n', '\r'])
}

/// Tags raw text (one sentence per line, single-space separated) and renders
/// `form_TAG` tokens. Blank lines pass through unchanged.
pub fn tag_raw(
    text: &str,
    tagger: &Tagger<'_>,
    decode: &DecodeConfig,
    threads: usize,
) -> Result<String, CorpusError> {
    let mut lines: Vec<Option<Sentence>> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.is_empty() {
            lines.push(None);
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
        lines.push(Some(Sentence { tokens }));
    }

    let sentences: Vec<Sentence> = lines.iter().flatten().cloned().collect();
    let tagged = tag_all(tagger, &sentences, decode, threads);

    let mut out = String::new();
    let mut next = 0;
    for line in &lines {
        match line {
            None => out.push('\n'),
            Some(sentence) => {
                let tags = &tagged[next];
                next += 1;
                for (i, (token, tag)) in sentence.tokens.iter().zip(tags).enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    out.push_str(&escape_form(&token.form));
                    out.push('_');
                    out.push_str(tag);
                }
                out.push('\n');
            }
        }
    }
    Ok(out)
}

enum ConlluLine {
    Passthrough(String),
    /// Token line split into its 10 columns; the sentence and token position
    /// it belongs to are tracked separately.
    Token(Vec<String>),
}

/// Tags CoNLL-U text, rewriting only column 4 (UPOS) of single-token lines.
/// Comments, multiword ranges, and empty nodes pass through untouched; CRLF
/// input is normalized to LF.
pub fn tag_conllu(
    text: &str,
    tagger: &Tagger<'_>,
    decode: &DecodeConfig,
    threads: usize,
) -> Result<String, CorpusError> {
    let mut lines: Vec<ConlluLine> = Vec::new();
    let mut sentences: Vec<Sentence> = Vec::new();
    // (line index, token index within sentence) → sentence index resolved below.
    let mut token_lines: Vec<Vec<usize>> = Vec::new();
    let mut current_tokens: Vec<Token> = Vec::new();
    let mut current_lines: Vec<usize> = Vec::new();

    let mut flush =
        |tokens: &mut Vec<Token>, line_ids: &mut Vec<usize>| {
            if !tokens.is_empty() {
                sentences.push(Sentence {
                    tokens: std::mem::take(tokens),
                });
                token_lines.push(std::mem::take(line_ids));
            }
        };

    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.is_empty() || line.starts_with('#') {
            if line.is_empty() {
                flush(&mut current_tokens, &mut current_lines);
            }
            lines.push(ConlluLine::Passthrough(line.to_string()));
            continue;
        }
        let columns: Vec<String> = line.split('\t').map(str::to_string).collect();
        if columns.len() != 10 {
            return Err(CorpusError::MalformedLine {
                line: idx + 1,
                columns: columns.len(),
            });
        }
        if columns[0].contains('-') || columns[0].contains('.') {
            lines.push(ConlluLine::Passthrough(line.to_string()));
            continue;
        }
        if !valid_form(&columns[1]) {
            return Err(CorpusError::InvalidForm { line: idx + 1 });
        }
        current_tokens.push(Token {
            form: columns[1].clone(),
            gold_tag: None,
        });
        current_lines.push(lines.len());
        lines.push(ConlluLine::Token(columns));
    }
    flush(&mut current_tokens, &mut current_lines);

    let tagged = tag_all(tagger, &sentences, decode, threads);

    for (sentence_lines, tags) in token_lines.iter().zip(&tagged) {
        for (&line_id, tag) in sentence_lines.iter().zip(tags) {
            if let ConlluLine::Token(columns) = &mut lines[line_id] {
                columns[3] = tag.clone();
            }
        }
    }

    let mut out = String::new();
    for line in lines {
        match line {
            ConlluLine::Passthrough(text) => out.push_str(&text),
            ConlluLine::Token(columns) => out.push_str(&columns.join("\t")),
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lexmemm_core::corpus::parse_conllu;
    use lexmemm_core::features::FeatureConfig;
    use lexmemm_core::lexicon::LexiconConfig;
    use lexmemm_core::maxent::TrainConfig;
    use lexmemm_core::model::{train_model, TaggerModel};

    fn model() -> TaggerModel {
        let corpus = parse_conllu(
            "1\tthe\t_\tDET\t_\t_\t_\t_\t_\t_\n\
             2\tcat\t_\tNOUN\t_\t_\t_\t_\t_\t_\n\
             3\tsleeps\t_\tVERB\t_\t_\t_\t_\t_\t_\n\n\
             1\tthe\t_\tDET\t_\t_\t_\t_\t_\t_\n\
             2\tdog\t_\tNOUN\t_\t_\t_\t_\t_\t_\n\
             3\tsleeps\t_\tVERB\t_\t_\t_\t_\t_\t_\n\n",
        )
        .unwrap();
        train_model(
            &corpus,
            None,
            FeatureConfig::default(),
            LexiconConfig::default(),
            TrainConfig {
                max_iterations: 60,
                ..TrainConfig::default()
            },
            DecodeConfig::default(),
            false,
        )
        .unwrap()
        .0
    }

    #[test]
    fn raw_output_joins_with_underscore() {
        let model = model();
        let tagger = model.tagger(None, false).unwrap();
        let out = tag_raw("the cat sleeps\n", &tagger, &DecodeConfig::default(), 1).unwrap();
        assert_eq!(out, "the_DET cat_NOUN sleeps_VERB\n");
    }

    #[test]
    fn raw_output_escapes_joiner() {
        let model = model();
        let tagger = model.tagger(None, false).unwrap();
        let out = tag_raw("a_b c\\d\n", &tagger, &DecodeConfig::default(), 1).unwrap();
        let first = out.split(' ').next().unwrap();
        assert!(first.starts_with("a\\_b_"));
        assert!(out.contains("c\\\\d_"));
    }

    #[test]
    fn raw_blank_lines_pass_through() {
        let model = model();
        let tagger = model.tagger(None, false).unwrap();
        let out = tag_raw("the cat\n\nthe dog\n", &tagger, &DecodeConfig::default(), 1).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "");
    }

    #[test]
    fn conllu_rewrites_only_upos() {
        let model = model();
        let tagger = model.tagger(None, false).unwrap();
        let input = "# sent_id = 1\n\
                     1\tthe\tthe\tX\tDT\t_\t2\tdet\t_\tSpaceAfter=No\n\
                     2-3\tcatdog\t_\t_\t_\t_\t_\t_\t_\t_\n\
                     2\tcat\tcat\tX\tNN\t_\t0\troot\t_\t_\n\
                     3\tsleeps\tsleep\tX\tVBZ\t_\t2\tdep\t_\t_\n\n";
        let out = tag_conllu(input, &tagger, &DecodeConfig::default(), 1).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "# sent_id = 1");
        assert_eq!(lines[2], "2-3\tcatdog\t_\t_\t_\t_\t_\t_\t_\t_");
        let first: Vec<&str> = lines[1].split('\t').collect();
        assert_eq!(first[3], "DET");
        assert_eq!(first[4], "DT"); // XPOS untouched
        assert_eq!(first[9], "SpaceAfter=No");
        let third: Vec<&str> = lines[4].split('\t').collect();
        assert_eq!(third[3], "VERB");
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let model = model();
        let tagger = model.tagger(None, false).unwrap();
        let text = "the cat sleeps\nthe dog sleeps\nthe cat\n".repeat(20);
        let single = tag_raw(&text, &tagger, &DecodeConfig::default(), 1).unwrap();
        let many = tag_raw(&text, &tagger, &DecodeConfig::default(), 8).unwrap();
        assert_eq!(single, many);
    }
}
