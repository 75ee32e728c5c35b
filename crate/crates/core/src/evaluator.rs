//! Scoring orchestration: runs a manifest through the metric suite under the
//! raw and normalized text conditions and assembles per-model comparison
//! reports with signed deltas.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::corpus::Manifest;
use crate::ethiopic::{NormalizationStats, NormalizationTable};
use crate::metrics::{self, Aggregation, MetricError, MetricScores, TextOptions};
use crate::report::round2;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot score an empty corpus")]
    EmptyCorpus,
    #[error("pair \"{id}\" has an empty reference")]
    EmptyReference { id: String },
    #[error("pair \"{id}\" is present in model \"{present}\" but missing from \"{missing}\"")]
    IdSetMismatch {
        id: String,
        present: String,
        missing: String,
    },
    #[error("reference for pair \"{id}\" differs between models \"{a}\" and \"{b}\"")]
    RefMismatch { id: String, a: String, b: String },
    #[error("no models to compare")]
    NoModels,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// The text condition a corpus is scored under: hypothesis and reference
/// either as-is, or both passed through a homophone normalization table
/// before any tokenization.
#[derive(Debug, Clone, Copy)]
pub enum EvalCondition<'t> {
    Raw,
    Normalized(&'t NormalizationTable),
}

impl EvalCondition<'_> {
    pub fn label(&self) -> &'static str {
        match self {
            EvalCondition::Raw => "raw",
            EvalCondition::Normalized(_) => "normalized",
        }
    }
}

/// Per-pair scoring and reporting knobs shared by `score` and `compare`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScoreOptions {
    pub aggregation: Aggregation,
    pub text: TextOptions,
}

/// Score one manifest under one condition.
pub fn score_condition(
    manifest: &Manifest,
    condition: &EvalCondition<'_>,
    options: &ScoreOptions,
) -> Result<MetricScores, EvalError> {
    score_condition_detailed(manifest, condition, options).map(|(scores, _)| scores)
}

/// Like [`score_condition`], also returning the normalization replacement
/// statistics accumulated over references and hypotheses (when normalizing).
pub fn score_condition_detailed(
    manifest: &Manifest,
    condition: &EvalCondition<'_>,
    options: &ScoreOptions,
) -> Result<(MetricScores, Option<NormalizationStats>), EvalError> {
    if manifest.pairs().is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let mut stats = NormalizationStats::default();
    let mut prepared: Vec<(String, String)> = Vec::with_capacity(manifest.pairs().len());
    for pair in manifest.pairs() {
        if pair.reference.trim().is_empty() {
            return Err(EvalError::EmptyReference {
                id: pair.id.clone(),
            });
        }
        let (reference, hypothesis) = match condition {
            EvalCondition::Raw => (pair.reference.clone(), pair.hypothesis.clone()),
            EvalCondition::Normalized(table) => {
                let (r, s1) = table.normalize(&pair.reference);
                let (h, s2) = table.normalize(&pair.hypothesis);
                stats.merge(&s1);
                stats.merge(&s2);
                (r, h)
            }
        };
        prepared.push((
            options.text.apply(&reference).into_owned(),
            options.text.apply(&hypothesis).into_owned(),
        ));
    }
    let scores = metrics::score_pairs(&prepared, options.aggregation).map_err(|e| match e {
        MetricError::EmptyReferenceAt(idx) => EvalError::EmptyReference {
            id: manifest.pairs()[idx].id.clone(),
        },
        other => EvalError::Metric(other),
    })?;
    let stats = match condition {
        EvalCondition::Raw => None,
        EvalCondition::Normalized(_) => Some(stats),
    };
    Ok((scores, stats))
}

/// Signed per-metric differences: normalized minus raw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricDelta {
    pub wer: f64,
    pub cer: f64,
    pub corpus_bleu: f64,
    pub avg_bleu: f64,
}

impl MetricDelta {
    fn between(normalized: &MetricScores, raw: &MetricScores) -> Self {
        Self {
            wer: normalized.wer - raw.wer,
            cer: normalized.cer - raw.cer,
            corpus_bleu: normalized.corpus_bleu - raw.corpus_bleu,
            avg_bleu: normalized.avg_bleu - raw.avg_bleu,
        }
    }
}

/// Which metrics this model is best at, judged on the normalized condition
/// at two-decimal reporting precision; ties go to the lexicographically
/// smallest model name.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BestFlags {
    pub wer: bool,
    pub cer: bool,
    pub corpus_bleu: bool,
    pub avg_bleu: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelRow {
    pub model: String,
    pub raw: MetricScores,
    pub normalized: MetricScores,
    pub delta: MetricDelta,
    pub best: BestFlags,
    pub normalization: NormalizationStats,
}

/// One row per model, raw and normalized scores side by side, sorted by
/// normalized WER ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub test_set: String,
    pub pair_count: usize,
    pub rows: Vec<ModelRow>,
}

/// Score every model manifest under both conditions. All manifests must
/// share the same id set with byte-identical references per id.
pub fn compare_models(
    models: &BTreeMap<String, Manifest>,
    table: &NormalizationTable,
    options: &ScoreOptions,
) -> Result<ComparisonReport, EvalError> {
    let mut names = models.keys();
    let Some(first_name) = names.next() else {
        return Err(EvalError::NoModels);
    };
    let first = &models[first_name];
    for name in names {
        check_alignment(first_name, first, name, &models[name])?;
    }

    let mut rows = Vec::with_capacity(models.len());
    for (name, manifest) in models {
        let (raw, _) = score_condition_detailed(manifest, &EvalCondition::Raw, options)?;
        let (normalized, stats) =
            score_condition_detailed(manifest, &EvalCondition::Normalized(table), options)?;
        rows.push(ModelRow {
            model: name.clone(),
            raw,
            normalized,
            delta: MetricDelta::between(&normalized, &raw),
            best: BestFlags::default(),
            normalization: stats.unwrap_or_default(),
        });
    }

    assign_best_flags(&mut rows);
    rows.sort_by(|a, b| {
        a.normalized
            .wer
            .total_cmp(&b.normalized.wer)
            .then_with(|| a.model.cmp(&b.model))
    });

    Ok(ComparisonReport {
        test_set: first.source_label().to_owned(),
        pair_count: first.pairs().len(),
        rows,
    })
}

fn check_alignment(
    base_name: &str,
    base: &Manifest,
    name: &str,
    manifest: &Manifest,
) -> Result<(), EvalError> {
    for pair in base.pairs() {
        match manifest.get(&pair.id) {
            None => {
                return Err(EvalError::IdSetMismatch {
                    id: pair.id.clone(),
                    present: base_name.to_owned(),
                    missing: name.to_owned(),
                })
            }
            Some(other) if other.reference != pair.reference => {
                return Err(EvalError::RefMismatch {
                    id: pair.id.clone(),
                    a: base_name.to_owned(),
                    b: name.to_owned(),
                })
            }
            Some(_) => {}
        }
    }
    if let Some(extra) = manifest.pairs().iter().find(|p| base.get(&p.id).is_none()) {
        return Err(EvalError::IdSetMismatch {
            id: extra.id.clone(),
            present: name.to_owned(),
            missing: base_name.to_owned(),
        });
    }
    Ok(())
}

fn assign_best_flags(rows: &mut [ModelRow]) {
    // Lower is better for error rates, higher for BLEU; compare at reporting
    // precision so cosmetic float dust cannot decide a winner.
    let pick = |rows: &[ModelRow], key: fn(&MetricScores) -> f64, lower: bool| -> usize {
        let mut best = 0usize;
        for i in 1..rows.len() {
            let (cur, champ) = (
                round2(key(&rows[i].normalized)),
                round2(key(&rows[best].normalized)),
            );
            let wins = if lower { cur < champ } else { cur > champ };
            let ties = cur == champ && rows[i].model < rows[best].model;
            if wins || ties {
                best = i;
            }
        }
        best
    };
    if rows.is_empty() {
        return;
    }
    let wer = pick(rows, |s| s.wer, true);
    let cer = pick(rows, |s| s.cer, true);
    let corpus = pick(rows, |s| s.corpus_bleu, false);
    let avg = pick(rows, |s| s.avg_bleu, false);
    rows[wer].best.wer = true;
    rows[cer].best.cer = true;
    rows[corpus].best.corpus_bleu = true;
    rows[avg].best.avg_bleu = true;
}
