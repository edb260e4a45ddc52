//! Evaluation report files (`key<TAB>value` lines, one file per corpus) and
//! the merged macro-average table.

use std::io::Write;

use lexmemm_core::corpus::TypeTokenRatio;
use lexmemm_core::eval::{macro_average, EvalReport};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("line {line}: expected key<TAB>value")]
    MalformedLine { line: usize },
    #[error("missing key {0:?}")]
    MissingKey(&'static str),
    #[error("key {key:?} has unparseable value {value:?}")]
    BadValue { key: String, value: String },
    #[error("no reports to merge")]
    Empty,
}

/// Writes one report. `ratio` is the training set's normalized type/token
/// ratio when the caller computed it.
pub fn write_report<W: Write>(
    report: &EvalReport,
    ratio: Option<TypeTokenRatio>,
    sink: &mut W,
) -> std::io::Result<()> {
    writeln!(sink, "corpus\t{}", report.corpus_label)?;
    writeln!(sink, "total\t{}", report.total_tokens)?;
    writeln!(sink, "correct\t{}", report.correct_tokens)?;
    writeln!(sink, "overall_acc\t{:.2}", report.overall_accuracy())?;
    writeln!(sink, "oov_total\t{}", report.oov_tokens)?;
    writeln!(sink, "oov_correct\t{}", report.correct_oov_tokens)?;
    match report.oov_accuracy() {
        Some(acc) => writeln!(sink, "oov_acc\t{acc:.2}")?,
        None => writeln!(sink, "oov_acc\tn/a")?,
    }
    if let Some(ratio) = ratio {
        writeln!(sink, "ratio_norm\t{:.4}", ratio.ratio)?;
    }
    Ok(())
}

/// Reads a report file back into counts.
pub fn read_report(text: &str) -> Result<EvalReport, ReportError> {
    let mut corpus = None;
    let mut total = None;
    let mut correct = None;
    let mut oov_total = None;
    let mut oov_correct = None;
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('\t') else {
            return Err(ReportError::MalformedLine { line: idx + 1 });
        };
        let parse_count = |key: &str, value: &str| -> Result<u64, ReportError> {
            value.parse().map_err(|_| ReportError::BadValue {
                key: key.to_string(),
                value: value.to_string(),
            })
        };
        match key {
            "corpus" => corpus = Some(value.to_string()),
            "total" => total = Some(parse_count(key, value)?),
            "correct" => correct = Some(parse_count(key, value)?),
            "oov_total" => oov_total = Some(parse_count(key, value)?),
            "oov_correct" => oov_correct = Some(parse_count(key, value)?),
            _ => {} // derived or informational keys
        }
    }
    Ok(EvalReport {
        corpus_label: corpus.ok_or(ReportError::MissingKey("corpus"))?,
        total_tokens: total.ok_or(ReportError::MissingKey("total"))?,
        correct_tokens: correct.ok_or(ReportError::MissingKey("correct"))?,
        oov_tokens: oov_total.ok_or(ReportError::MissingKey("oov_total"))?,
        correct_oov_tokens: oov_correct.ok_or(ReportError::MissingKey("oov_correct"))?,
    })
}

/// Renders per-corpus rows plus the macro-average row.
pub fn render_macro_table(reports: &[EvalReport]) -> Result<String, ReportError> {
    let (overall, oov) = macro_average(reports).map_err(|_| ReportError::Empty)?;
    let mut out = String::from("corpus\toverall\toov\n");
    for report in reports {
        let oov_cell = report
            .oov_accuracy()
            .map(|a| format!("{a:.2}"))
            .unwrap_or_else(|| "n/a".to_string());
        out.push_str(&format!(
            "{}\t{:.2}\t{}\n",
            report.corpus_label,
            report.overall_accuracy(),
            oov_cell
        ));
    }
    let oov_cell = oov.map(|a| format!("{a:.2}")).unwrap_or_else(|| "n/a".to_string());
    out.push_str(&format!("macro-avg\t{overall:.2}\t{oov_cell}\n"));
    Ok(out)
}
