//! Command-line surface: train, tag, eval, analyze, merge, dump.
//!
//! Every run appends one JSON manifest line recording the command, resolved
//! configuration, input hashes, and duration. Exit codes: 0 success,
//! 2 configuration errors, 3 input parse errors, 4 I/O errors, 5 internal
//! errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lexmemm::manifest::{append_manifest, fingerprint_hex, RunManifest};
use lexmemm::persistence::{save_model, write_weight_dump, PersistError};
use lexmemm::reports::{read_report, render_macro_table, write_report, ReportError};
use lexmemm::tagging::{tag_all, tag_conllu, tag_raw};
use lexmemm_core::corpus::{
    normalized_type_token_ratio, parse_conllu, Corpus, CorpusError, DEFAULT_TTR_WINDOW,
};
use lexmemm_core::decoder::DecodeConfig;
use lexmemm_core::eval::{evaluate, lexical_variability_table};
use lexmemm_core::features::FeatureConfig;
use lexmemm_core::lexicon::{prepare_lexicon, Lexicon, LexiconConfig, LexiconError};
use lexmemm_core::maxent::{MaxentError, TrainConfig};
use lexmemm_core::model::{train_model, ModelError, TaggerModel};

const EXIT_CONFIG: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_INTERNAL: u8 = 5;

#[derive(Debug, Clone, Copy)]
enum ErrorKind {
    Config,
    Parse,
    Io,
    Internal,
}

struct CliError {
    kind: ErrorKind,
    message: String,
}

impl CliError {
    fn config(message: impl ToString) -> Self {
        CliError {
            kind: ErrorKind::Config,
            message: message.to_string(),
        }
    }

    fn parse(message: impl ToString) -> Self {
        CliError {
            kind: ErrorKind::Parse,
            message: message.to_string(),
        }
    }

    fn io(message: impl ToString) -> Self {
        CliError {
            kind: ErrorKind::Io,
            message: message.to_string(),
        }
    }

    fn code(&self) -> u8 {
        match self.kind {
            ErrorKind::Config => EXIT_CONFIG,
            ErrorKind::Parse => EXIT_PARSE,
            ErrorKind::Io => EXIT_IO,
            ErrorKind::Internal => EXIT_INTERNAL,
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::parse(e)
    }
}

impl From<LexiconError> for CliError {
    fn from(e: LexiconError) -> Self {
        CliError::parse(e)
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError::parse(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::LexiconRequired | ModelError::FingerprintMismatch => CliError::config(e),
            ModelError::Train(inner) => inner.into(),
            other => CliError {
                kind: ErrorKind::Internal,
                message: other.to_string(),
            },
        }
    }
}

impl From<MaxentError> for CliError {
    fn from(e: MaxentError) -> Self {
        match e {
            MaxentError::InvalidConfig | MaxentError::InvalidFeatureConfig(_) => CliError::config(e),
            MaxentError::MissingGoldTag { .. } => CliError::parse(e),
            other => CliError {
                kind: ErrorKind::Internal,
                message: other.to_string(),
            },
        }
    }
}

impl From<PersistError> for CliError {
    fn from(e: PersistError) -> Self {
        match e {
            PersistError::Io(io) => CliError::io(io),
            other => CliError::parse(other),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "lexmemm",
    version,
    about = "Lexicon-augmented maximum-entropy Markov model part-of-speech tagger"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Manifest file that every run appends one JSON line to.
    #[arg(long, global = true, default_value = "lexmemm-runs.jsonl")]
    manifest: PathBuf,

    /// Recorded in the manifest for provenance; every operation is
    /// deterministic regardless.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Train a tagger on a CoNLL-U corpus, optionally with an external
    /// lexicon.
    Train(TrainArgs),
    /// Tag raw text or CoNLL-U with a trained model.
    Tag(TagArgs),
    /// Tag a gold corpus and score overall and OOV accuracy.
    Eval(EvalArgs),
    /// Compute normalized type/token ratios for training corpora.
    Analyze(AnalyzeArgs),
    /// Merge evaluation reports into a macro-averaged table.
    Merge(MergeArgs),
    /// Dump model weights as predicate<TAB>tag<TAB>weight lines.
    Dump(DumpArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Training corpus (CoNLL-U).
    train: PathBuf,

    /// Output model file.
    #[arg(short, long)]
    output: PathBuf,

    /// External lexicon (UTF-8 TSV, form<TAB>tag per line). Enables the
    /// lexical feature templates.
    #[arg(long)]
    lexicon: Option<PathBuf>,

    /// Minimum number of events a predicate must occur in.
    #[arg(long, default_value_t = 1)]
    cutoff: u32,

    /// Variance of the Gaussian prior on weights.
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,

    /// Gradient max-norm at which training stops.
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,

    #[arg(long, default_value_t = 200)]
    max_iter: u32,

    /// Disable the lowercase fallback on lexicon lookups.
    #[arg(long)]
    no_case_fallback: bool,

    /// Characters that end the coarse category prefix of a lexicon tag;
    /// empty disables projection.
    #[arg(long, default_value = ":+.-", allow_hyphen_values = true)]
    separators: String,

    /// Tag for punctuation entries added when the lexicon lacks them.
    #[arg(long, default_value = "PUNCT")]
    punct_tag: String,

    /// Default beam width recorded in the model.
    #[arg(long, default_value_t = 3)]
    beam: usize,

    /// Do not store the prepared lexicon inside the model file.
    #[arg(long)]
    no_embed_lexicon: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TextFormat {
    /// One sentence per line, tokens separated by single spaces.
    Raw,
    /// CoNLL-U; only the UPOS column is rewritten.
    Conllu,
}

#[derive(Args)]
struct TagArgs {
    /// Input text file.
    input: PathBuf,

    /// Trained model file.
    #[arg(short, long)]
    model: PathBuf,

    #[arg(long, value_enum, default_value_t = TextFormat::Raw)]
    format: TextFormat,

    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,

    /// External lexicon; must match the fingerprint recorded in the model.
    #[arg(long)]
    lexicon: Option<PathBuf>,

    /// Tag even if the lexicon fingerprint differs from the model's.
    #[arg(long)]
    allow_lexicon_mismatch: bool,

    /// Beam width override; the model default applies when omitted.
    #[arg(long)]
    beam: Option<usize>,

    /// Worker threads for decoding; 0 uses all cores. The output is
    /// identical for any value.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct EvalArgs {
    /// Trained model file.
    #[arg(short, long)]
    model: PathBuf,

    /// Gold corpus to tag and score (CoNLL-U).
    #[arg(long)]
    gold: PathBuf,

    /// Training corpus defining the vocabulary for OOV status.
    #[arg(long)]
    train: PathBuf,

    /// Report file (key<TAB>value lines); the report always prints to
    /// stdout as well.
    #[arg(long)]
    report: Option<PathBuf>,

    #[arg(long)]
    lexicon: Option<PathBuf>,

    #[arg(long)]
    allow_lexicon_mismatch: bool,

    #[arg(long)]
    beam: Option<usize>,

    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Window for the normalized type/token ratio of the training corpus.
    #[arg(long, default_value_t = DEFAULT_TTR_WINDOW)]
    window: usize,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Training corpora (CoNLL-U), one table row each.
    #[arg(required = true)]
    corpora: Vec<PathBuf>,

    /// Window for the normalized type/token ratio.
    #[arg(long, default_value_t = DEFAULT_TTR_WINDOW)]
    window: usize,

    /// TSV of label<TAB>accuracy_a<TAB>accuracy_b rows; the table's delta
    /// column reports a − b for matching labels.
    #[arg(long)]
    paired_accuracies: Option<PathBuf>,
}

#[derive(Args)]
struct MergeArgs {
    /// Evaluation report files produced by `eval`.
    #[arg(required = true)]
    reports: Vec<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    /// Trained model file.
    model: PathBuf,

    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let command_name = match &cli.command {
        Command::Train(_) => "train",
        Command::Tag(_) => "tag",
        Command::Eval(_) => "eval",
        Command::Analyze(_) => "analyze",
        Command::Merge(_) => "merge",
        Command::Dump(_) => "dump",
    };
    let mut manifest = RunManifest::new(command_name);
    if let Some(seed) = cli.seed {
        manifest.record_arg("seed", seed);
    }

    let result = run(&cli.command, &mut manifest);
    manifest.duration_ms = started.elapsed().as_millis();
    if let Err(e) = &result {
        manifest.status = "error".to_string();
        manifest.error = Some(e.message.clone());
    }
    if let Err(e) = append_manifest(&cli.manifest, &manifest) {
        eprintln!("warning: could not append manifest to {}: {e}", cli.manifest.display());
    }

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code())
        }
    }
}

fn run(command: &Command, manifest: &mut RunManifest) -> Result<(), CliError> {
    match command {
        Command::Train(args) => cmd_train(args, manifest),
        Command::Tag(args) => cmd_tag(args, manifest),
        Command::Eval(args) => cmd_eval(args, manifest),
        Command::Analyze(args) => cmd_analyze(args, manifest),
        Command::Merge(args) => cmd_merge(args, manifest),
        Command::Dump(args) => cmd_dump(args, manifest),
    }
}

fn read_input(path: &Path, manifest: &mut RunManifest) -> Result<String, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    manifest.record_input(path, &bytes);
    String::from_utf8(bytes)
        .map_err(|_| CliError::parse(format!("{} is not valid UTF-8", path.display())))
}

fn read_corpus(path: &Path, manifest: &mut RunManifest) -> Result<Corpus, CliError> {
    let text = read_input(path, manifest)?;
    parse_conllu(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn read_prepared_lexicon(
    path: &Path,
    config: &LexiconConfig,
    manifest: &mut RunManifest,
) -> Result<Lexicon, CliError> {
    let text = read_input(path, manifest)?;
    prepare_lexicon(&text, config).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn load_model_file(path: &Path, manifest: &mut RunManifest) -> Result<TaggerModel, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    manifest.record_input(path, &bytes);
    lexmemm::persistence::model_from_bytes(&bytes)
        .map_err(CliError::from)
        .map_err(|mut e| {
            e.message = format!("{}: {}", path.display(), e.message);
            e
        })
}

fn ignore_broken_pipe(result: std::io::Result<()>) -> std::io::Result<()> {
    match result {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            ignore_broken_pipe(stdout.write_all(content.as_bytes()))?;
            Ok(())
        }
    }
}

fn file_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn require_positive(value: usize, flag: &str) -> Result<(), CliError> {
    if value == 0 {
        return Err(CliError::config(format!("--{flag} must be at least 1")));
    }
    Ok(())
}

fn cmd_train(args: &TrainArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    require_positive(args.beam, "beam")?;
    let lexical = args.lexicon.is_some();
    manifest.record_arg("train", args.train.display());
    manifest.record_arg("output", args.output.display());
    manifest.record_arg("lexical", lexical);
    manifest.record_arg("cutoff", args.cutoff);
    manifest.record_arg("sigma2", args.sigma2);
    manifest.record_arg("tol", args.tol);
    manifest.record_arg("max_iter", args.max_iter);
    manifest.record_arg("case_fallback", !args.no_case_fallback);
    manifest.record_arg("separators", &args.separators);
    manifest.record_arg("punct_tag", &args.punct_tag);
    manifest.record_arg("beam", args.beam);
    manifest.record_arg("embed_lexicon", !args.no_embed_lexicon);

    let corpus = read_corpus(&args.train, manifest)?;
    let lexicon_config = LexiconConfig {
        separators: args.separators.clone(),
        punct_tag: args.punct_tag.clone(),
    };
    let lexicon = match &args.lexicon {
        Some(path) => {
            manifest.record_arg("lexicon", path.display());
            Some(read_prepared_lexicon(path, &lexicon_config, manifest)?)
        }
        None => None,
    };

    let feature_config = FeatureConfig {
        lexical,
        case_fallback: !args.no_case_fallback,
        ..FeatureConfig::default()
    };
    let train_config = TrainConfig {
        l2_sigma2: args.sigma2,
        cutoff: args.cutoff,
        tolerance: args.tol,
        max_iterations: args.max_iter,
    };
    let decode_config = DecodeConfig {
        beam_width: args.beam,
        merge_states: true,
    };

    let (model, outcome) = train_model(
        &corpus,
        lexicon.as_ref(),
        feature_config,
        lexicon_config,
        train_config,
        decode_config,
        !args.no_embed_lexicon,
    )?;

    let mut file = fs::File::create(&args.output)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", args.output.display())))?;
    let bytes = save_model(&model, &mut file)?;

    println!("sentences\t{}", corpus.sentences.len());
    println!("tokens\t{}", corpus.token_count());
    println!("tags\t{}", model.tagset.len());
    println!("predicates\t{}", model.predicates.len());
    println!("lexical\t{}", model.feature_config.lexical);
    if let Some(fp) = &model.lexicon_fingerprint {
        println!("lexicon_fingerprint\t{}", fingerprint_hex(fp));
    }
    println!("iterations\t{}", outcome.iterations);
    println!("converged\t{}", outcome.converged);
    println!("objective\t{:.6}", outcome.objective);
    println!("gradient_max_norm\t{:.3e}", outcome.gradient_max_norm);
    println!("model_bytes\t{bytes}");
    Ok(())
}

fn bind_lexicon<'a>(
    model: &'a TaggerModel,
    external: Option<&'a Lexicon>,
    allow_mismatch: bool,
) -> Result<lexmemm_core::model::Tagger<'a>, CliError> {
    model.tagger(external, allow_mismatch).map_err(CliError::from)
}

fn cmd_tag(args: &TagArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    manifest.record_arg("input", args.input.display());
    manifest.record_arg("model", args.model.display());
    manifest.record_arg("format", format!("{:?}", args.format).to_lowercase());
    manifest.record_arg("threads", args.threads);
    manifest.record_arg("allow_lexicon_mismatch", args.allow_lexicon_mismatch);

    let model = load_model_file(&args.model, manifest)?;
    let lexicon = match &args.lexicon {
        Some(path) => {
            manifest.record_arg("lexicon", path.display());
            Some(read_prepared_lexicon(path, &model.lexicon_config, manifest)?)
        }
        None => None,
    };
    let tagger = bind_lexicon(&model, lexicon.as_ref(), args.allow_lexicon_mismatch)?;

    let decode = DecodeConfig {
        beam_width: args.beam.unwrap_or(model.decode_config.beam_width),
        merge_states: model.decode_config.merge_states,
    };
    require_positive(decode.beam_width, "beam")?;
    manifest.record_arg("beam", decode.beam_width);

    let text = read_input(&args.input, manifest)?;
    let output = match args.format {
        TextFormat::Raw => tag_raw(&text, &tagger, &decode, args.threads)?,
        TextFormat::Conllu => tag_conllu(&text, &tagger, &decode, args.threads)?,
    };
    write_output(args.output.as_deref(), &output)
}

fn cmd_eval(args: &EvalArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    require_positive(args.window, "window")?;
    manifest.record_arg("model", args.model.display());
    manifest.record_arg("gold", args.gold.display());
    manifest.record_arg("train", args.train.display());
    manifest.record_arg("threads", args.threads);
    manifest.record_arg("window", args.window);

    let model = load_model_file(&args.model, manifest)?;
    let lexicon = match &args.lexicon {
        Some(path) => {
            manifest.record_arg("lexicon", path.display());
            Some(read_prepared_lexicon(path, &model.lexicon_config, manifest)?)
        }
        None => None,
    };
    let tagger = bind_lexicon(&model, lexicon.as_ref(), args.allow_lexicon_mismatch)?;

    let gold = read_corpus(&args.gold, manifest)?;
    let train = read_corpus(&args.train, manifest)?;

    let decode = DecodeConfig {
        beam_width: args.beam.unwrap_or(model.decode_config.beam_width),
        merge_states: model.decode_config.merge_states,
    };
    require_positive(decode.beam_width, "beam")?;
    manifest.record_arg("beam", decode.beam_width);

    let predicted = tag_all(&tagger, &gold.sentences, &decode, args.threads);
    let report = evaluate(&gold, &predicted, train.vocabulary(), &file_label(&args.gold))
        .map_err(CliError::parse)?;
    let ratio = normalized_type_token_ratio(&train, args.window);

    let mut rendered = Vec::new();
    write_report(&report, Some(ratio), &mut rendered)?;
    let rendered = String::from_utf8(rendered).expect("report is UTF-8");
    if let Some(path) = &args.report {
        fs::write(path, &rendered)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
    }
    print!("{rendered}");
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    require_positive(args.window, "window")?;
    manifest.record_arg("window", args.window);

    let deltas: std::collections::BTreeMap<String, f64> = match &args.paired_accuracies {
        Some(path) => {
            manifest.record_arg("paired_accuracies", path.display());
            let text = read_input(path, manifest)?;
            let mut map = std::collections::BTreeMap::new();
            for (idx, line) in text.lines().enumerate() {
                if line.is_empty() {
                    continue;
                }
                let columns: Vec<&str> = line.split('\t').collect();
                let parsed = (columns.len() == 3)
                    .then(|| {
                        Some((
                            columns[1].parse::<f64>().ok()?,
                            columns[2].parse::<f64>().ok()?,
                        ))
                    })
                    .flatten();
                let Some((a, b)) = parsed else {
                    return Err(CliError::parse(format!(
                        "{}: line {}: expected label<TAB>number<TAB>number",
                        path.display(),
                        idx + 1
                    )));
                };
                map.insert(columns[0].to_string(), a - b);
            }
            map
        }
        None => Default::default(),
    };

    let mut entries = Vec::new();
    for path in &args.corpora {
        let corpus = read_corpus(path, manifest)?;
        let label = file_label(path);
        let ratio = normalized_type_token_ratio(&corpus, args.window);
        let delta = deltas.get(&label).copied();
        entries.push((label, ratio, delta));
    }

    let mut out = String::from("corpus\tratio_norm\tdelta\tnote\n");
    for row in lexical_variability_table(entries) {
        let delta = row
            .delta
            .map(|d| format!("{d:.2}"))
            .unwrap_or_else(|| "n/a".to_string());
        let note = if row.ratio.truncated {
            format!("truncated@{}", row.ratio.tokens_counted)
        } else {
            String::new()
        };
        out.push_str(&format!(
            "{}\t{:.4}\t{}\t{}\n",
            row.label, row.ratio.ratio, delta, note
        ));
    }
    print!("{out}");
    Ok(())
}

fn cmd_merge(args: &MergeArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    let mut reports = Vec::new();
    for path in &args.reports {
        let text = read_input(path, manifest)?;
        reports.push(
            read_report(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?,
        );
    }
    let table = render_macro_table(&reports)?;
    print!("{table}");
    Ok(())
}

fn cmd_dump(args: &DumpArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    let model = load_model_file(&args.model, manifest)?;
    match &args.output {
        Some(path) => {
            manifest.record_arg("output", path.display());
            let mut file = fs::File::create(path)
                .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
            write_weight_dump(&model, &mut file)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            ignore_broken_pipe(write_weight_dump(&model, &mut stdout))?;
        }
    }
    Ok(())
}
