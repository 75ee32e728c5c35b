//! Deterministic report rendering. Scores are computed in double precision
//! and rounded to two decimals here, at the edge; identical inputs always
//! produce byte-identical output.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::ValidationReport;
use crate::diagnostics::{DiagnosticSummary, DiagnosticThresholds, Verdict};
use crate::ethiopic::NormalizationStats;
use crate::evaluator::ComparisonReport;
use crate::metrics::MetricScores;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Markdown,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Self::Json),
            "markdown" => Ok(Self::Markdown),
            "csv" => Ok(Self::Csv),
            other => Err(format!(
                "unknown output format `{other}` (expected json, markdown, or csv)"
            )),
        }
    }
}

/// Round to two decimals, the reporting precision used throughout.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

#[derive(Serialize)]
struct ScoresDto {
    wer: f64,
    cer: f64,
    corpus_bleu: f64,
    avg_bleu: f64,
}

impl From<&MetricScores> for ScoresDto {
    fn from(s: &MetricScores) -> Self {
        Self {
            wer: round2(s.wer),
            cer: round2(s.cer),
            corpus_bleu: round2(s.corpus_bleu),
            avg_bleu: round2(s.avg_bleu),
        }
    }
}

#[derive(Serialize)]
struct DiagnosticsDto {
    flagged_count: usize,
    flagged_fraction: f64,
    flagged: Vec<FlaggedDto>,
}

#[derive(Serialize)]
struct FlaggedDto {
    id: String,
    verdicts: Vec<Verdict>,
    ethiopic_ratio: f64,
    max_char_run: usize,
    max_token_run: usize,
}

impl From<&DiagnosticSummary> for DiagnosticsDto {
    fn from(summary: &DiagnosticSummary) -> Self {
        Self {
            flagged_count: summary.flagged_count,
            flagged_fraction: round4(summary.flagged_fraction),
            flagged: summary
                .flagged
                .iter()
                .map(|p| FlaggedDto {
                    id: p.id.clone(),
                    verdicts: p.flags.verdicts.iter().copied().collect(),
                    ethiopic_ratio: round4(p.flags.ethiopic_ratio),
                    max_char_run: p.flags.max_char_run,
                    max_token_run: p.flags.max_token_run,
                })
                .collect(),
        }
    }
}

/// One scored corpus under one condition, ready to render.
pub struct ScoreReport<'a> {
    pub test_set: &'a str,
    pub pair_count: usize,
    pub condition: &'a str,
    pub scores: &'a MetricScores,
    pub normalization: Option<&'a NormalizationStats>,
    pub diagnostics: &'a DiagnosticSummary,
    /// Unix seconds; present only when timestamps were requested.
    pub generated_at: Option<u64>,
}

impl ScoreReport<'_> {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.render_json(),
            OutputFormat::Markdown => self.render_markdown(),
            OutputFormat::Csv => self.render_csv(),
        }
    }

    fn render_json(&self) -> String {
        #[derive(Serialize)]
        struct Dto<'a> {
            test_set: &'a str,
            pair_count: usize,
            condition: &'a str,
            scores: ScoresDto,
            #[serde(skip_serializing_if = "Option::is_none")]
            normalization: Option<&'a NormalizationStats>,
            diagnostics: DiagnosticsDto,
            #[serde(skip_serializing_if = "Option::is_none")]
            generated_at: Option<u64>,
        }
        let dto = Dto {
            test_set: self.test_set,
            pair_count: self.pair_count,
            condition: self.condition,
            scores: self.scores.into(),
            normalization: self.normalization,
            diagnostics: self.diagnostics.into(),
            generated_at: self.generated_at,
        };
        pretty_json(&dto)
    }

    fn render_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {} — {} condition", self.test_set, self.condition);
        let _ = writeln!(out);
        let _ = writeln!(out, "Pairs: {}", self.pair_count);
        let _ = writeln!(out);
        let _ = writeln!(out, "| WER(%) | CER(%) | corpusBLEU(%) | avg.BLEU |");
        let _ = writeln!(out, "|-------:|-------:|--------------:|---------:|");
        let s = self.scores;
        let _ = writeln!(
            out,
            "| {:.2} | {:.2} | {:.2} | {:.2} |",
            s.wer, s.cer, s.corpus_bleu, s.avg_bleu
        );
        if let Some(stats) = self.normalization {
            let _ = writeln!(out);
            let _ = writeln!(out, "Normalization: {stats}");
        }
        if self.diagnostics.flagged_count > 0 {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "Flagged hypotheses: {} of {}",
                self.diagnostics.flagged_count, self.pair_count
            );
        }
        out
    }

    fn render_csv(&self) -> String {
        let s = self.scores;
        let mut out = String::from("test_set,condition,pair_count,wer,cer,corpus_bleu,avg_bleu\n");
        let _ = writeln!(
            out,
            "{},{},{},{:.2},{:.2},{:.2},{:.2}",
            csv_field(self.test_set),
            self.condition,
            self.pair_count,
            s.wer,
            s.cer,
            s.corpus_bleu,
            s.avg_bleu
        );
        out
    }
}

/// Render a multi-model comparison in the requested format. The Markdown
/// table follows the column order WER(%) CER(%) corpusBLEU(%) avg.BLEU, with
/// the best model per metric in bold.
pub fn render_comparison(
    report: &ComparisonReport,
    format: OutputFormat,
    generated_at: Option<u64>,
) -> String {
    match format {
        OutputFormat::Json => comparison_json(report, generated_at),
        OutputFormat::Markdown => comparison_markdown(report),
        OutputFormat::Csv => comparison_csv(report),
    }
}

fn comparison_json(report: &ComparisonReport, generated_at: Option<u64>) -> String {
    #[derive(Serialize)]
    struct BestDto {
        wer: bool,
        cer: bool,
        corpus_bleu: bool,
        avg_bleu: bool,
    }
    #[derive(Serialize)]
    struct RowDto<'a> {
        model: &'a str,
        raw: ScoresDto,
        normalized: ScoresDto,
        delta: ScoresDto,
        best: BestDto,
        normalization: &'a NormalizationStats,
    }
    #[derive(Serialize)]
    struct Dto<'a> {
        test_set: &'a str,
        pair_count: usize,
        rows: Vec<RowDto<'a>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        generated_at: Option<u64>,
    }
    let rows = report
        .rows
        .iter()
        .map(|row| RowDto {
            model: &row.model,
            raw: (&row.raw).into(),
            normalized: (&row.normalized).into(),
            delta: ScoresDto {
                wer: round2(row.delta.wer),
                cer: round2(row.delta.cer),
                corpus_bleu: round2(row.delta.corpus_bleu),
                avg_bleu: round2(row.delta.avg_bleu),
            },
            best: BestDto {
                wer: row.best.wer,
                cer: row.best.cer,
                corpus_bleu: row.best.corpus_bleu,
                avg_bleu: row.best.avg_bleu,
            },
            normalization: &row.normalization,
        })
        .collect();
    pretty_json(&Dto {
        test_set: &report.test_set,
        pair_count: report.pair_count,
        rows,
        generated_at,
    })
}

fn comparison_markdown(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Evaluation — {}", report.test_set);
    let _ = writeln!(out);
    let _ = writeln!(out, "Pairs: {}", report.pair_count);

    let cell = |value: f64, bold: bool| {
        if bold {
            format!("**{value:.2}**")
        } else {
            format!("{value:.2}")
        }
    };
    // Each table half bolds its own best value per column, judged at
    // reporting precision with lexicographic tie-breaks, mirroring how the
    // winning row is marked in published result tables.
    let winner = |values: Vec<(&str, f64)>, lower: bool| -> String {
        let mut best: Option<(&str, f64)> = None;
        for (name, value) in values {
            let value = round2(value);
            let take = match best {
                None => true,
                Some((champ_name, champ)) => {
                    let wins = if lower { value < champ } else { value > champ };
                    wins || (value == champ && name < champ_name)
                }
            };
            if take {
                best = Some((name, value));
            }
        }
        best.map(|(name, _)| name.to_owned()).unwrap_or_default()
    };
    for (title, normalized) in [
        ("Raw", false),
        ("Normalized references and predictions", true),
    ] {
        let scores_of = |row: &'_ crate::evaluator::ModelRow| {
            if normalized {
                row.normalized
            } else {
                row.raw
            }
        };
        let column = |key: fn(&MetricScores) -> f64| -> Vec<(&str, f64)> {
            report
                .rows
                .iter()
                .map(|row| (row.model.as_str(), key(&scores_of(row))))
                .collect()
        };
        let best_wer = winner(column(|s| s.wer), true);
        let best_cer = winner(column(|s| s.cer), true);
        let best_corpus = winner(column(|s| s.corpus_bleu), false);
        let best_avg = winner(column(|s| s.avg_bleu), false);

        let _ = writeln!(out);
        let _ = writeln!(out, "## {title}");
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "| Model | WER(%) | CER(%) | corpusBLEU(%) | avg.BLEU |"
        );
        let _ = writeln!(
            out,
            "|-------|-------:|-------:|--------------:|---------:|"
        );
        for row in &report.rows {
            let s = scores_of(row);
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                row.model,
                cell(s.wer, row.model == best_wer),
                cell(s.cer, row.model == best_cer),
                cell(s.corpus_bleu, row.model == best_corpus),
                cell(s.avg_bleu, row.model == best_avg),
            );
        }
    }

    let _ = writeln!(out);
    let _ = writeln!(out, "## Delta (normalized − raw)");
    let _ = writeln!(out);
    let _ = writeln!(out, "| Model | ΔWER | ΔCER | ΔcorpusBLEU | Δavg.BLEU |");
    let _ = writeln!(out, "|-------|-----:|-----:|------------:|----------:|");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "| {} | {:+.2} | {:+.2} | {:+.2} | {:+.2} |",
            row.model, row.delta.wer, row.delta.cer, row.delta.corpus_bleu, row.delta.avg_bleu
        );
    }
    out
}

fn comparison_csv(report: &ComparisonReport) -> String {
    let mut out = String::from(
        "model,wer_raw,cer_raw,corpus_bleu_raw,avg_bleu_raw,\
         wer_normalized,cer_normalized,corpus_bleu_normalized,avg_bleu_normalized,\
         wer_delta,cer_delta,corpus_bleu_delta,avg_bleu_delta\n",
    );
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2}",
            csv_field(&row.model),
            row.raw.wer,
            row.raw.cer,
            row.raw.corpus_bleu,
            row.raw.avg_bleu,
            row.normalized.wer,
            row.normalized.cer,
            row.normalized.corpus_bleu,
            row.normalized.avg_bleu,
            row.delta.wer,
            row.delta.cer,
            row.delta.corpus_bleu,
            row.delta.avg_bleu,
        );
    }
    out
}

/// Render a manifest validation report.
pub fn render_validation(
    report: &ValidationReport,
    test_set: &str,
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Dto<'a> {
                test_set: &'a str,
                pair_count: usize,
                empty_hyp_count: usize,
                non_ethiopic_ref_count: usize,
                pairs: &'a [crate::corpus::PairValidation],
            }
            pretty_json(&Dto {
                test_set,
                pair_count: report.pairs.len(),
                empty_hyp_count: report.empty_hyp_count(),
                non_ethiopic_ref_count: report.non_ethiopic_ref_count(),
                pairs: &report.pairs,
            })
        }
        OutputFormat::Markdown => {
            let mut out = String::new();
            let _ = writeln!(out, "# Validation — {test_set}");
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "Pairs: {} (empty hyp: {}, non-Ethiopic ref: {})",
                report.pairs.len(),
                report.empty_hyp_count(),
                report.non_ethiopic_ref_count()
            );
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "| Id | Ref codepoints | Hyp codepoints | Empty hyp | Non-Ethiopic ref |"
            );
            let _ = writeln!(
                out,
                "|----|---------------:|---------------:|-----------|------------------|"
            );
            for p in &report.pairs {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    p.id, p.ref_codepoints, p.hyp_codepoints, p.empty_hyp, p.non_ethiopic_ref
                );
            }
            out
        }
        OutputFormat::Csv => {
            let mut out =
                String::from("id,ref_codepoints,hyp_codepoints,empty_hyp,non_ethiopic_ref\n");
            for p in &report.pairs {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    csv_field(&p.id),
                    p.ref_codepoints,
                    p.hyp_codepoints,
                    p.empty_hyp,
                    p.non_ethiopic_ref
                );
            }
            out
        }
    }
}

/// Render a standalone diagnostics report listing flagged pair ids.
pub fn render_diagnostics(
    summary: &DiagnosticSummary,
    test_set: &str,
    thresholds: &DiagnosticThresholds,
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct ThresholdsDto {
                min_ethiopic_ratio: f64,
                max_char_run: usize,
                max_token_run: usize,
            }
            #[derive(Serialize)]
            struct Dto<'a> {
                test_set: &'a str,
                pair_count: usize,
                thresholds: ThresholdsDto,
                diagnostics: DiagnosticsDto,
            }
            pretty_json(&Dto {
                test_set,
                pair_count: summary.pair_count,
                thresholds: ThresholdsDto {
                    min_ethiopic_ratio: thresholds.min_ethiopic_ratio,
                    max_char_run: thresholds.max_char_run,
                    max_token_run: thresholds.max_token_run,
                },
                diagnostics: summary.into(),
            })
        }
        OutputFormat::Markdown => {
            let mut out = String::new();
            let _ = writeln!(out, "# Diagnostics — {test_set}");
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "Flagged: {} of {} pairs",
                summary.flagged_count, summary.pair_count
            );
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "| Id | Verdicts | Ethiopic ratio | Char run | Token run |"
            );
            let _ = writeln!(
                out,
                "|----|----------|---------------:|---------:|----------:|"
            );
            for p in &summary.flagged {
                let verdicts: Vec<&str> = p
                    .flags
                    .verdicts
                    .iter()
                    .map(|v| match v {
                        Verdict::Empty => "empty",
                        Verdict::NonEthiopic => "non_ethiopic",
                        Verdict::Repetitive => "repetitive",
                    })
                    .collect();
                let _ = writeln!(
                    out,
                    "| {} | {} | {:.4} | {} | {} |",
                    p.id,
                    verdicts.join(" "),
                    p.flags.ethiopic_ratio,
                    p.flags.max_char_run,
                    p.flags.max_token_run
                );
            }
            out
        }
        OutputFormat::Csv => {
            let mut out = String::from("id,verdicts,ethiopic_ratio,max_char_run,max_token_run\n");
            for p in &summary.flagged {
                let verdicts: Vec<&str> = p
                    .flags
                    .verdicts
                    .iter()
                    .map(|v| match v {
                        Verdict::Empty => "empty",
                        Verdict::NonEthiopic => "non_ethiopic",
                        Verdict::Repetitive => "repetitive",
                    })
                    .collect();
                let _ = writeln!(
                    out,
                    "{},{},{:.4},{},{}",
                    csv_field(&p.id),
                    verdicts.join(" "),
                    p.flags.ethiopic_ratio,
                    p.flags.max_char_run,
                    p.flags.max_token_run
                );
            }
            out
        }
    }
}

fn pretty_json(value: &impl Serialize) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report serializes");
    out.push('\n');
    out
}

fn csv_field(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}
