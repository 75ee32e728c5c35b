//! Automated detection of degenerate hypotheses: non-Ethiopic output,
//! repetitive characters or tokens, and empty transcriptions — the failure
//! modes zero-shot decoding is known to produce on Amharic audio.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::corpus::Manifest;
use crate::ethiopic::is_ethiopic;

/// Configurable cutoffs for [`diagnose`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticThresholds {
    /// Hypotheses with a lower share of Ethiopic codepoints are flagged.
    pub min_ethiopic_ratio: f64,
    /// A run of this many identical consecutive codepoints flags the text.
    pub max_char_run: usize,
    /// A run of this many identical consecutive word tokens flags the text.
    pub max_token_run: usize,
}

impl Default for DiagnosticThresholds {
    fn default() -> Self {
        Self {
            min_ethiopic_ratio: 0.5,
            max_char_run: 10,
            max_token_run: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Empty,
    NonEthiopic,
    Repetitive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticFlags {
    pub ethiopic_ratio: f64,
    pub max_char_run: usize,
    pub max_token_run: usize,
    pub verdicts: BTreeSet<Verdict>,
}

impl DiagnosticFlags {
    pub fn is_flagged(&self) -> bool {
        !self.verdicts.is_empty()
    }
}

/// Fraction of non-whitespace codepoints that are Ethiopic; 0 for empty or
/// whitespace-only text.
pub fn ethiopic_ratio(text: &str) -> f64 {
    let mut ethiopic = 0u64;
    let mut total = 0u64;
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        total += 1;
        if is_ethiopic(c) {
            ethiopic += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        ethiopic as f64 / total as f64
    }
}

/// Longest run of identical consecutive codepoints (whitespace breaks runs
/// and is not counted) and of identical consecutive word tokens.
pub fn max_repetition_runs(text: &str) -> (usize, usize) {
    let mut max_char = 0usize;
    let mut run = 0usize;
    let mut prev: Option<char> = None;
    for c in text.chars() {
        if c.is_whitespace() {
            prev = None;
            run = 0;
            continue;
        }
        run = if prev == Some(c) { run + 1 } else { 1 };
        max_char = max_char.max(run);
        prev = Some(c);
    }

    let mut max_token = 0usize;
    let mut run = 0usize;
    let mut prev: Option<&str> = None;
    for token in text.split_whitespace() {
        run = if prev == Some(token) { run + 1 } else { 1 };
        max_token = max_token.max(run);
        prev = Some(token);
    }

    (max_char, max_token)
}

/// Classify one hypothesis. Empty text gets the `empty` verdict alone; for
/// non-empty text, `non_ethiopic` and `repetitive` apply independently.
pub fn diagnose(hypothesis: &str, thresholds: &DiagnosticThresholds) -> DiagnosticFlags {
    let ratio = ethiopic_ratio(hypothesis);
    let (max_char_run, max_token_run) = max_repetition_runs(hypothesis);
    let mut verdicts = BTreeSet::new();
    if hypothesis.chars().all(char::is_whitespace) {
        verdicts.insert(Verdict::Empty);
    } else {
        if ratio < thresholds.min_ethiopic_ratio {
            verdicts.insert(Verdict::NonEthiopic);
        }
        if max_char_run >= thresholds.max_char_run || max_token_run >= thresholds.max_token_run {
            verdicts.insert(Verdict::Repetitive);
        }
    }
    DiagnosticFlags {
        ethiopic_ratio: ratio,
        max_char_run,
        max_token_run,
        verdicts,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDiagnostic {
    pub id: String,
    #[serde(flatten)]
    pub flags: DiagnosticFlags,
}

/// Per-corpus roll-up of flagged hypotheses, in manifest order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticSummary {
    pub pair_count: usize,
    pub flagged_count: usize,
    pub flagged_fraction: f64,
    pub flagged: Vec<PairDiagnostic>,
}

pub fn diagnose_corpus(
    manifest: &Manifest,
    thresholds: &DiagnosticThresholds,
) -> DiagnosticSummary {
    let mut flagged = Vec::new();
    for pair in manifest.pairs() {
        let flags = diagnose(&pair.hypothesis, thresholds);
        if flags.is_flagged() {
            flagged.push(PairDiagnostic {
                id: pair.id.clone(),
                flags,
            });
        }
    }
    let pair_count = manifest.pairs().len();
    DiagnosticSummary {
        pair_count,
        flagged_count: flagged.len(),
        flagged_fraction: if pair_count == 0 {
            0.0
        } else {
            flagged.len() as f64 / pair_count as f64
        },
        flagged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_examples() {
        assert_eq!(ethiopic_ratio("ሀገር"), 1.0);
        assert_eq!(ethiopic_ratio("hello"), 0.0);
        // Four Ethiopic codepoints out of six non-whitespace ones.
        assert!((ethiopic_ratio("ሀገሮች ok") - 4.0 / 6.0).abs() < 1e-12);
        assert_eq!(ethiopic_ratio(""), 0.0);
        assert_eq!(ethiopic_ratio("   "), 0.0);
    }

    #[test]
    fn repetition_runs() {
        assert_eq!(max_repetition_runs("ሀሀሀሀሀ"), (5, 1));
        assert_eq!(max_repetition_runs("ሰላም ሰላም ሰላም"), (1, 3));
        assert_eq!(max_repetition_runs(""), (0, 0));
        // Whitespace breaks character runs.
        assert_eq!(max_repetition_runs("ሀሀ ሀሀ").0, 2);
    }

    #[test]
    fn diagnose_verdicts() {
        let t = DiagnosticThresholds::default();
        let french = diagnose("bonjour tout le monde", &t);
        assert_eq!(
            french.verdicts.into_iter().collect::<Vec<_>>(),
            vec![Verdict::NonEthiopic]
        );

        let repeated = diagnose(&"ሀ".repeat(50), &t);
        assert_eq!(
            repeated.verdicts.into_iter().collect::<Vec<_>>(),
            vec![Verdict::Repetitive]
        );

        let clean = diagnose("ሰላም ለሁሉም ሰው ይሁን", &t);
        assert!(clean.verdicts.is_empty());

        let empty = diagnose("  ", &t);
        assert_eq!(
            empty.verdicts.into_iter().collect::<Vec<_>>(),
            vec![Verdict::Empty]
        );
        assert_eq!(empty.ethiopic_ratio, 0.0);
    }

    #[test]
    fn diagnose_token_run_threshold() {
        let t = DiagnosticThresholds::default();
        let spaced = diagnose("ነው ነው ነው ነው ነው", &t);
        assert!(spaced.verdicts.contains(&Verdict::Repetitive));
        let below = diagnose("ነው ነው ነው ነው", &t);
        assert!(!below.verdicts.contains(&Verdict::Repetitive));
    }

    #[test]
    fn permissive_thresholds_remove_verdicts() {
        let strict = DiagnosticThresholds::default();
        let lax = DiagnosticThresholds {
            min_ethiopic_ratio: 0.0,
            max_char_run: usize::MAX,
            max_token_run: usize::MAX,
        };
        for text in ["bonjour", "ሀሀሀሀሀሀሀሀሀሀሀሀ", "ነው ነው ነው ነው ነው ነው", "ok ሰላም"]
        {
            let flagged = diagnose(text, &strict);
            let relaxed = diagnose(text, &lax);
            assert!(relaxed.verdicts.is_subset(&flagged.verdicts));
        }
    }
}
