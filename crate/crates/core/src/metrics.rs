//! Word- and character-level edit-distance metrics plus corpus and sentence
//! BLEU, the metric suite reported per test set.
//!
//! All percentages are computed in double precision; rounding to two decimals
//! happens only at the reporting layer.

use std::borrow::Cow;
use std::collections::HashMap;

use thiserror::Error;
use unicode_normalization::{is_nfc_quick, IsNormalized, UnicodeNormalization};

/// Highest n-gram order used by the BLEU variants.
pub const BLEU_ORDER: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    /// The reference has no tokens; the metric denominator would be zero.
    #[error("reference text has no tokens")]
    EmptyReference,
    /// Corpus variant, pointing at the offending pair by 0-based position.
    #[error("reference text of pair {0} has no tokens")]
    EmptyReferenceAt(usize),
    #[error("cannot score an empty corpus")]
    EmptyCorpus,
}

fn nfc(text: &str) -> Cow<'_, str> {
    match is_nfc_quick(text.chars()) {
        IsNormalized::Yes => Cow::Borrowed(text),
        _ => Cow::Owned(text.nfc().collect()),
    }
}

/// Split NFC-composed text on Unicode whitespace runs.
pub fn tokenize_words(text: &str) -> Vec<String> {
    nfc(text).split_whitespace().map(str::to_owned).collect()
}

/// Codepoint sequence for character-level scoring: NFC-composed, trimmed,
/// with whitespace runs collapsed to a single space so formatting noise does
/// not count as errors while word boundaries still do.
pub fn char_sequence(text: &str) -> Vec<char> {
    let text = nfc(text);
    let mut out = Vec::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.trim().chars() {
        if c.is_whitespace() {
            pending_space = true;
        } else {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        }
    }
    out
}

/// Levenshtein distance with unit costs, two-row dynamic program.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = (up + 1).min(row[j] + 1).min(diag + usize::from(ca != cb));
            diag = up;
        }
    }
    row[b.len()]
}

/// Word error rate as a percentage of the reference word count. Can exceed
/// 100 when the hypothesis is much longer than the reference.
pub fn wer(reference: &str, hypothesis: &str) -> Result<f64, MetricError> {
    let r = tokenize_words(reference);
    if r.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let h = tokenize_words(hypothesis);
    Ok(100.0 * edit_distance(&r, &h) as f64 / r.len() as f64)
}

/// Character error rate as a percentage of the reference codepoint count.
pub fn cer(reference: &str, hypothesis: &str) -> Result<f64, MetricError> {
    let r = char_sequence(reference);
    if r.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let h = char_sequence(hypothesis);
    Ok(100.0 * edit_distance(&r, &h) as f64 / r.len() as f64)
}

/// How corpus-level WER/CER fold per-pair counts together.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Aggregation {
    /// Total edits over total reference tokens, the standard ASR convention.
    #[default]
    Pooled,
    /// Arithmetic mean of per-utterance rates, for sensitivity analysis.
    UtteranceMean,
}

/// Corpus word error rate, pooled: total word edits over total reference
/// words, times 100.
pub fn corpus_wer<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<f64, MetricError> {
    corpus_wer_with(pairs, Aggregation::Pooled)
}

pub fn corpus_wer_with<S: AsRef<str>>(
    pairs: &[(S, S)],
    aggregation: Aggregation,
) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mut edits = 0u64;
    let mut ref_len = 0u64;
    let mut rate_sum = 0.0f64;
    for (idx, (r, h)) in pairs.iter().enumerate() {
        let r = tokenize_words(r.as_ref());
        if r.is_empty() {
            return Err(MetricError::EmptyReferenceAt(idx));
        }
        let h = tokenize_words(h.as_ref());
        let d = edit_distance(&r, &h) as u64;
        edits += d;
        ref_len += r.len() as u64;
        rate_sum += 100.0 * d as f64 / r.len() as f64;
    }
    Ok(match aggregation {
        Aggregation::Pooled => 100.0 * edits as f64 / ref_len as f64,
        Aggregation::UtteranceMean => rate_sum / pairs.len() as f64,
    })
}

/// Corpus character error rate, pooled over codepoints.
pub fn corpus_cer<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<f64, MetricError> {
    corpus_cer_with(pairs, Aggregation::Pooled)
}

pub fn corpus_cer_with<S: AsRef<str>>(
    pairs: &[(S, S)],
    aggregation: Aggregation,
) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mut edits = 0u64;
    let mut ref_len = 0u64;
    let mut rate_sum = 0.0f64;
    for (idx, (r, h)) in pairs.iter().enumerate() {
        let r = char_sequence(r.as_ref());
        if r.is_empty() {
            return Err(MetricError::EmptyReferenceAt(idx));
        }
        let h = char_sequence(h.as_ref());
        let d = edit_distance(&r, &h) as u64;
        edits += d;
        ref_len += r.len() as u64;
        rate_sum += 100.0 * d as f64 / r.len() as f64;
    }
    Ok(match aggregation {
        Aggregation::Pooled => 100.0 * edits as f64 / ref_len as f64,
        Aggregation::UtteranceMean => rate_sum / pairs.len() as f64,
    })
}

/// Per-order detail behind a corpus BLEU score.
#[derive(Debug, Clone, PartialEq)]
pub struct BleuBreakdown {
    /// Modified n-gram precisions for n = 1..=max_n.
    pub precisions: Vec<f64>,
    /// 1 when the pooled hypothesis is at least as long as the pooled
    /// reference, exp(1 - ref/hyp) when shorter, 0 when the hypothesis side
    /// is empty.
    pub brevity_penalty: f64,
    pub hyp_length: usize,
    pub ref_length: usize,
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts: HashMap<&[String], u64> = HashMap::new();
    if n > 0 && tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped n-gram matches between hypothesis and reference, plus the number
/// of candidate n-grams in the hypothesis.
fn clipped_matches(hyp: &[String], reference: &[String], n: usize) -> (u64, u64) {
    let candidates = (hyp.len() + 1).saturating_sub(n) as u64;
    if candidates == 0 {
        return (0, 0);
    }
    let ref_counts = ngram_counts(reference, n);
    let mut matches = 0;
    for (ngram, count) in ngram_counts(hyp, n) {
        if let Some(&available) = ref_counts.get(ngram) {
            matches += count.min(available);
        }
    }
    (matches, candidates)
}

fn brevity_penalty(hyp_len: usize, ref_len: usize) -> f64 {
    if hyp_len == 0 {
        0.0
    } else if hyp_len >= ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    }
}

/// Corpus BLEU with uniform weights over n = 1..=max_n: clipped matches and
/// candidate counts are summed over the whole corpus before any precision is
/// taken; the score is 0 when any pooled precision is 0.
pub fn corpus_bleu<S: AsRef<str>>(
    pairs: &[(S, S)],
    max_n: usize,
) -> Result<(f64, BleuBreakdown), MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mut matches = vec![0u64; max_n];
    let mut candidates = vec![0u64; max_n];
    let mut hyp_length = 0usize;
    let mut ref_length = 0usize;
    for (r, h) in pairs {
        let r = tokenize_words(r.as_ref());
        let h = tokenize_words(h.as_ref());
        hyp_length += h.len();
        ref_length += r.len();
        for n in 1..=max_n {
            let (m, c) = clipped_matches(&h, &r, n);
            matches[n - 1] += m;
            candidates[n - 1] += c;
        }
    }

    let precisions: Vec<f64> = matches
        .iter()
        .zip(&candidates)
        .map(|(&m, &c)| if c == 0 { 0.0 } else { m as f64 / c as f64 })
        .collect();
    let bp = brevity_penalty(hyp_length, ref_length);
    let breakdown = BleuBreakdown {
        precisions,
        brevity_penalty: bp,
        hyp_length,
        ref_length,
    };

    if breakdown.precisions.contains(&0.0) {
        return Ok((0.0, breakdown));
    }
    let product: f64 = breakdown.precisions.iter().product();
    let score = 100.0 * bp * product.powf(1.0 / max_n as f64);
    Ok((score, breakdown))
}

/// Smoothed single-sentence BLEU.
///
/// Orders with zero candidate n-grams (hypothesis shorter than n) are dropped
/// from the geometric mean, with weights renormalized over the remaining
/// orders; an order n >= 2 with zero matches uses (matches+1)/(candidates+1).
/// Exact matches therefore score 100 regardless of sentence length.
pub fn sentence_bleu(reference: &str, hypothesis: &str, max_n: usize) -> Result<f64, MetricError> {
    let r = tokenize_words(reference);
    if r.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let h = tokenize_words(hypothesis);
    if h.is_empty() {
        return Ok(0.0);
    }

    let mut log_sum = 0.0f64;
    let mut orders = 0usize;
    for n in 1..=max_n {
        let (m, c) = clipped_matches(&h, &r, n);
        if c == 0 {
            continue;
        }
        let p = if m == 0 {
            if n == 1 {
                return Ok(0.0); // no word overlap at all
            }
            1.0 / (c + 1) as f64
        } else {
            m as f64 / c as f64
        };
        log_sum += p.ln();
        orders += 1;
    }
    debug_assert!(orders > 0, "non-empty hypothesis always has unigrams");
    let gm = (log_sum / orders as f64).exp();
    Ok(100.0 * brevity_penalty(h.len(), r.len()) * gm)
}

/// Arithmetic mean of smoothed sentence BLEU over all pairs.
pub fn avg_bleu<S: AsRef<str>>(pairs: &[(S, S)], max_n: usize) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mut sum = 0.0;
    for (idx, (r, h)) in pairs.iter().enumerate() {
        sum += sentence_bleu(r.as_ref(), h.as_ref(), max_n).map_err(|e| match e {
            MetricError::EmptyReference => MetricError::EmptyReferenceAt(idx),
            other => other,
        })?;
    }
    Ok(sum / pairs.len() as f64)
}

/// The four headline metrics for one corpus under one text condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricScores {
    pub wer: f64,
    pub cer: f64,
    pub corpus_bleu: f64,
    pub avg_bleu: f64,
    pub pair_count: usize,
}

/// Compute all four metrics over prepared (reference, hypothesis) pairs.
pub fn score_pairs<S: AsRef<str>>(
    pairs: &[(S, S)],
    aggregation: Aggregation,
) -> Result<MetricScores, MetricError> {
    Ok(MetricScores {
        wer: corpus_wer_with(pairs, aggregation)?,
        cer: corpus_cer_with(pairs, aggregation)?,
        corpus_bleu: corpus_bleu(pairs, BLEU_ORDER)?.0,
        avg_bleu: avg_bleu(pairs, BLEU_ORDER)?,
        pair_count: pairs.len(),
    })
}

/// Opt-in text tweaks applied before tokenization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TextOptions {
    /// Replace Ethiopic wordspace (፡), full stop (።), comma (፣), and ASCII
    /// punctuation with spaces.
    pub strip_punct: bool,
    /// Lowercase text; a no-op for Ethiopic, which has no case.
    pub case_fold: bool,
}

impl TextOptions {
    pub fn apply<'a>(&self, text: &'a str) -> Cow<'a, str> {
        let mut out = Cow::Borrowed(text);
        if self.strip_punct {
            out = Cow::Owned(
                out.chars()
                    .map(|c| {
                        if matches!(c, '፡' | '።' | '፣') || c.is_ascii_punctuation() {
                            ' '
                        } else {
                            c
                        }
                    })
                    .collect(),
            );
        }
        if self.case_fold {
            out = Cow::Owned(out.to_lowercase());
        }
        out
    }
}
