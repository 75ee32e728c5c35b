//! # fidel-eval
//!
//! Corpus-level evaluation for Ethiopic-script ASR output.
//!
//! The crate scores reference/hypothesis manifests with WER, CER, corpus
//! BLEU, and average sentence BLEU; applies Amharic homophone normalization
//! to both sides at evaluation time; produces paired raw-vs-normalized
//! comparison reports; and flags degenerate hypotheses (non-Ethiopic text,
//! repetition, empty output).
//!
//! ```
//! use fidel_eval::{EvalCondition, Manifest, NormalizationTable};
//! use fidel_eval::corpus::EvalPair;
//! use fidel_eval::evaluator::{score_condition, ScoreOptions};
//!
//! let manifest = Manifest::from_pairs(
//!     vec![EvalPair::new("u1", "ሰላም ሀገር", "ሰላም ሐገር")],
//!     "demo",
//! )?;
//! let table = NormalizationTable::default();
//! let raw = score_condition(&manifest, &EvalCondition::Raw, &ScoreOptions::default())?;
//! let norm = score_condition(
//!     &manifest,
//!     &EvalCondition::Normalized(&table),
//!     &ScoreOptions::default(),
//! )?;
//! assert!(raw.wer > 0.0);
//! assert_eq!(norm.wer, 0.0);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod corpus;
pub mod diagnostics;
pub mod ethiopic;
pub mod evaluator;
pub mod metrics;
pub mod report;

pub use corpus::{CorpusError, EvalPair, Manifest, ManifestFormat, ValidationReport};
pub use diagnostics::{DiagnosticFlags, DiagnosticSummary, DiagnosticThresholds, Verdict};
pub use ethiopic::{
    EthiopicSyllable, HomophoneFamily, NormalizationStats, NormalizationTable, TableError,
};
pub use evaluator::{ComparisonReport, EvalCondition, EvalError, ModelRow, ScoreOptions};
pub use metrics::{Aggregation, BleuBreakdown, MetricError, MetricScores, TextOptions};
pub use report::OutputFormat;
