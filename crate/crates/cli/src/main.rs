//! fidel-eval: score Ethiopic-script ASR output against reference
//! transcriptions, with optional homophone normalization.

use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use fidel_eval::diagnostics::{diagnose_corpus, DiagnosticThresholds};
use fidel_eval::evaluator::{
    compare_models, score_condition_detailed, EvalCondition, ScoreOptions,
};
use fidel_eval::report::{
    render_comparison, render_diagnostics, render_validation, OutputFormat, ScoreReport,
};
use fidel_eval::{
    corpus, Aggregation, Manifest, ManifestFormat, NormalizationStats, NormalizationTable,
    TextOptions,
};

#[derive(Parser)]
#[command(
    name = "fidel-eval",
    version,
    about = "Evaluate Ethiopic-script ASR output"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply homophone normalization to text (stdin/file) or to a manifest.
    Normalize(NormalizeArgs),
    /// Score one manifest with WER, CER, corpus BLEU, and average BLEU.
    Score(ScoreArgs),
    /// Score several models against shared references, raw and normalized.
    Compare(CompareArgs),
    /// Inspect a manifest without scoring it.
    Validate(ValidateArgs),
    /// Flag degenerate hypotheses (non-Ethiopic, repetitive, empty).
    Diag(DiagArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Jsonl,
    Tsv,
}

impl From<FormatArg> for ManifestFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Jsonl => ManifestFormat::Jsonl,
            FormatArg::Tsv => ManifestFormat::Tsv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputArg {
    Json,
    Markdown,
    Csv,
}

impl From<OutputArg> for OutputFormat {
    fn from(f: OutputArg) -> Self {
        match f {
            OutputArg::Json => OutputFormat::Json,
            OutputArg::Markdown => OutputFormat::Markdown,
            OutputArg::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Args)]
struct TableArg {
    /// Homophone table override file; falls back to FIDEL_EVAL_TABLE.
    #[arg(long, value_name = "PATH", env = "FIDEL_EVAL_TABLE")]
    table: Option<PathBuf>,
}

impl TableArg {
    fn resolve(&self) -> Result<NormalizationTable, CliError> {
        match &self.table {
            None => Ok(NormalizationTable::default()),
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("table override {}: {e}", path.display()))
                })?;
                NormalizationTable::parse(&text)
                    .map_err(|e| CliError::Usage(format!("table override {}: {e}", path.display())))
            }
        }
    }
}

#[derive(Args)]
struct NormalizeArgs {
    /// Input file; reads standard input when omitted.
    input: Option<PathBuf>,
    /// Treat the input as a manifest instead of plain text.
    #[arg(long)]
    manifest: bool,
    /// Manifest format (manifest mode only).
    #[arg(long, value_enum, default_value = "jsonl")]
    format: FormatArg,
    #[command(flatten)]
    table: TableArg,
    /// Write output here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Manifest to score.
    manifest: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: FormatArg,
    /// Output format for the report.
    #[arg(long, value_enum, default_value = "json")]
    output: OutputArg,
    /// Normalize references and hypotheses before scoring.
    #[arg(long)]
    normalize: bool,
    #[command(flatten)]
    table: TableArg,
    /// Report mean of per-utterance WER/CER instead of pooled rates.
    #[arg(long)]
    per_utterance_mean: bool,
    /// Strip Ethiopic wordspace/full stop/comma and ASCII punctuation.
    #[arg(long)]
    strip_punct: bool,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Include a generated_at timestamp (unix seconds) in JSON reports.
    #[arg(long)]
    timestamps: bool,
    /// Write output here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Reference manifest; its id → ref mapping is the gold standard.
    refs: PathBuf,
    /// One manifest per model; refs must match the gold manifest exactly.
    #[arg(required = true)]
    models: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: FormatArg,
    #[arg(long, value_enum, default_value = "json")]
    output: OutputArg,
    #[command(flatten)]
    table: TableArg,
    #[arg(long)]
    per_utterance_mean: bool,
    #[arg(long)]
    strip_punct: bool,
    #[arg(long)]
    timestamps: bool,
    /// Write output here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    manifest: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: FormatArg,
    #[arg(long, value_enum, default_value = "json")]
    output: OutputArg,
    /// Write output here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagArgs {
    manifest: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: FormatArg,
    #[arg(long, value_enum, default_value = "json")]
    output: OutputArg,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Write output here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Hypotheses below this Ethiopic codepoint ratio are flagged.
    #[arg(long, value_name = "R", default_value_t = 0.5)]
    min_ethiopic_ratio: f64,
    /// Identical-codepoint run length that counts as repetitive.
    #[arg(long, value_name = "N", default_value_t = 10)]
    max_char_run: usize,
    /// Identical-token run length that counts as repetitive.
    #[arg(long, value_name = "N", default_value_t = 5)]
    max_token_run: usize,
}

impl From<&ThresholdArgs> for DiagnosticThresholds {
    fn from(args: &ThresholdArgs) -> Self {
        Self {
            min_ethiopic_ratio: args.min_ethiopic_ratio,
            max_char_run: args.max_char_run,
            max_token_run: args.max_token_run,
        }
    }
}

/// Exit codes: 0 success, 1 data/validation failure, 2 usage error.
enum CliError {
    Data(String),
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Data(_) => 1,
            CliError::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Data(m) | CliError::Usage(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("fidel-eval: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Normalize(args) => cmd_normalize(args),
        Command::Score(args) => cmd_score(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Diag(args) => cmd_diag(args),
    }
}

fn load_manifest(path: &Path, format: ManifestFormat) -> Result<Manifest, CliError> {
    Manifest::load(path, format).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        None => io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Data(format!("stdout: {e}"))),
        Some(path) => {
            fs::write(path, content).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
        }
    }
}

fn timestamp(enabled: bool) -> Option<u64> {
    if !enabled {
        return None;
    }
    Some(
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    )
}

fn cmd_normalize(args: NormalizeArgs) -> Result<(), CliError> {
    let table = args.table.resolve()?;

    if args.manifest {
        let path = args
            .input
            .as_deref()
            .ok_or_else(|| CliError::Usage("manifest mode requires an input path".to_owned()))?;
        let manifest = load_manifest(path, args.format.into())?;
        let mut stats = NormalizationStats::default();
        let pairs = manifest
            .pairs()
            .iter()
            .map(|pair| {
                let (reference, s1) = table.normalize(&pair.reference);
                let (hypothesis, s2) = table.normalize(&pair.hypothesis);
                stats.merge(&s1);
                stats.merge(&s2);
                corpus::EvalPair {
                    id: pair.id.clone(),
                    reference,
                    hypothesis,
                }
            })
            .collect();
        let normalized = Manifest::from_pairs(pairs, manifest.source_label())
            .map_err(|e| CliError::Data(e.to_string()))?;
        let content = normalized
            .to_string_in(args.format.into())
            .map_err(|e| CliError::Data(e.to_string()))?;
        write_output(args.out.as_deref(), &content)?;
        eprintln!("normalization: {stats}");
        return Ok(());
    }

    // Text mode: stream line by line so arbitrarily large inputs run in
    // constant memory.
    let mut stats = NormalizationStats::default();
    let reader: Box<dyn Read> = match &args.input {
        None => Box::new(io::stdin()),
        Some(path) => Box::new(
            fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?,
        ),
    };
    let reader = io::BufReader::new(reader);
    let mut writer: Box<dyn Write> = match &args.out {
        None => Box::new(io::BufWriter::new(io::stdout())),
        Some(path) => {
            Box::new(io::BufWriter::new(fs::File::create(path).map_err(|e| {
                CliError::Data(format!("{}: {e}", path.display()))
            })?))
        }
    };
    for line in reader.lines() {
        let line = line.map_err(|e| CliError::Data(format!("read: {e}")))?;
        let (normalized, line_stats) = table.normalize(&line);
        stats.merge(&line_stats);
        writeln!(writer, "{normalized}").map_err(|e| CliError::Data(format!("write: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| CliError::Data(format!("write: {e}")))?;
    eprintln!("normalization: {stats}");
    Ok(())
}

fn score_options(per_utterance_mean: bool, strip_punct: bool) -> ScoreOptions {
    ScoreOptions {
        aggregation: if per_utterance_mean {
            Aggregation::UtteranceMean
        } else {
            Aggregation::Pooled
        },
        text: TextOptions {
            strip_punct,
            case_fold: false,
        },
    }
}

fn cmd_score(args: ScoreArgs) -> Result<(), CliError> {
    let manifest = load_manifest(&args.manifest, args.format.into())?;
    let table = args.table.resolve()?;
    let options = score_options(args.per_utterance_mean, args.strip_punct);
    let condition = if args.normalize {
        EvalCondition::Normalized(&table)
    } else {
        EvalCondition::Raw
    };
    let (scores, stats) = score_condition_detailed(&manifest, &condition, &options)
        .map_err(|e| CliError::Data(e.to_string()))?;
    let diagnostics = diagnose_corpus(&manifest, &(&args.thresholds).into());
    let report = ScoreReport {
        test_set: manifest.source_label(),
        pair_count: manifest.pairs().len(),
        condition: condition.label(),
        scores: &scores,
        normalization: stats.as_ref(),
        diagnostics: &diagnostics,
        generated_at: timestamp(args.timestamps),
    };
    write_output(args.out.as_deref(), &report.render(args.output.into()))
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let format: ManifestFormat = args.format.into();
    let gold = load_manifest(&args.refs, format)?;
    let table = args.table.resolve()?;
    let options = score_options(args.per_utterance_mean, args.strip_punct);

    let mut models = std::collections::BTreeMap::new();
    for path in &args.models {
        let mut manifest = load_manifest(path, format)?;
        let name = manifest.source_label().to_owned();
        for pair in gold.pairs() {
            match manifest.get(&pair.id) {
                None => {
                    return Err(CliError::Data(format!(
                        "model \"{name}\": missing pair \"{}\" from the reference manifest",
                        pair.id
                    )))
                }
                Some(found) if found.reference != pair.reference => {
                    return Err(CliError::Data(format!(
                        "model \"{name}\": reference for pair \"{}\" differs from the gold manifest",
                        pair.id
                    )))
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = manifest.pairs().iter().find(|p| gold.get(&p.id).is_none()) {
            return Err(CliError::Data(format!(
                "model \"{name}\": pair \"{}\" is not in the reference manifest",
                extra.id
            )));
        }
        manifest.set_source_label(gold.source_label());
        if models.insert(name.clone(), manifest).is_some() {
            return Err(CliError::Usage(format!(
                "two model manifests share the name \"{name}\""
            )));
        }
    }

    let report =
        compare_models(&models, &table, &options).map_err(|e| CliError::Data(e.to_string()))?;
    write_output(
        args.out.as_deref(),
        &render_comparison(&report, args.output.into(), timestamp(args.timestamps)),
    )
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let manifest = load_manifest(&args.manifest, args.format.into())?;
    let report = corpus::validate_manifest(&manifest);
    write_output(
        args.out.as_deref(),
        &render_validation(&report, manifest.source_label(), args.output.into()),
    )
}

fn cmd_diag(args: DiagArgs) -> Result<(), CliError> {
    let manifest = load_manifest(&args.manifest, args.format.into())?;
    let thresholds: DiagnosticThresholds = (&args.thresholds).into();
    let summary = diagnose_corpus(&manifest, &thresholds);
    write_output(
        args.out.as_deref(),
        &render_diagnostics(
            &summary,
            manifest.source_label(),
            &thresholds,
            args.output.into(),
        ),
    )
}
