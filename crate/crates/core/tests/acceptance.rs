//! Acceptance suite: one test per release criterion, each printing its own
//! pass/fail line through the harness.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use common::{random_corpus, swap_homophone, SplitMix64, VOCAB};
use fidel_eval::corpus::{EvalPair, Manifest, ManifestFormat};
use fidel_eval::diagnostics::{diagnose_corpus, DiagnosticThresholds};
use fidel_eval::ethiopic::{decompose, NormalizationTable};
use fidel_eval::evaluator::{compare_models, score_condition, EvalCondition, ScoreOptions};
use fidel_eval::metrics::{corpus_bleu, corpus_cer, corpus_wer, edit_distance, BLEU_ORDER};
use fidel_eval::report::{render_comparison, OutputFormat, ScoreReport};

/// Independent oracle: exponential recursion over the trailing symbols.
fn naive_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    match (a.split_last(), b.split_last()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((la, ra)), Some((lb, rb))) => {
            let sub = naive_distance(ra, rb) + usize::from(la != lb);
            let del = naive_distance(ra, b) + 1;
            let ins = naive_distance(a, rb) + 1;
            sub.min(del).min(ins)
        }
    }
}

/// Criterion 1: the DP edit distance agrees exactly with the naive recursive
/// oracle on >= 1000 random pairs of length <= 8, in under 10 seconds.
#[test]
fn c1_edit_distance_matches_naive_oracle() {
    let started = Instant::now();
    let mut rng = SplitMix64(0x0001);
    for case in 0..1500u32 {
        let la = rng.below(9);
        let lb = rng.below(9);
        let a: Vec<u8> = (0..la).map(|_| rng.below(4) as u8).collect();
        let b: Vec<u8> = (0..lb).map(|_| rng.below(4) as u8).collect();
        assert_eq!(
            edit_distance(&a, &b),
            naive_distance(&a, &b),
            "case {case}: {a:?} vs {b:?}"
        );
    }
    let elapsed = started.elapsed();
    eprintln!("c1: 1500 oracle cases in {elapsed:?}");
    assert!(elapsed.as_secs_f64() < 10.0, "oracle run took {elapsed:?}");
}

fn random_mixed_string(rng: &mut SplitMix64, pure_latin: bool) -> String {
    let len = rng.below(60);
    (0..len)
        .map(|_| {
            if pure_latin {
                match rng.below(4) {
                    0 => b' ' as char,
                    1 => char::from(b'A' + rng.below(26) as u8),
                    2 => char::from(b'0' + rng.below(10) as u8),
                    _ => char::from(b'a' + rng.below(26) as u8),
                }
            } else {
                match rng.below(6) {
                    0 => char::from(b'a' + rng.below(26) as u8),
                    1 => ' ',
                    2 => ['.', ',', '!', '፡', '።', '፣'][rng.below(6)],
                    // Whole core block, assigned or not.
                    _ => char::from_u32(0x1200 + rng.below(0x180) as u32).unwrap(),
                }
            }
        })
        .collect()
}

/// Criterion 2: idempotence, codepoint-length preservation, vowel-order
/// preservation, and non-Ethiopic transparency over >= 10,000 random strings.
#[test]
fn c2_normalization_invariants_hold_on_random_strings() {
    let table = NormalizationTable::default();
    let mut rng = SplitMix64(0x0002);
    let mut violations = 0usize;
    for i in 0..10_000usize {
        let pure_latin = i % 5 == 0;
        let text = random_mixed_string(&mut rng, pure_latin);
        let (once, stats) = table.normalize(&text);
        let (twice, restats) = table.normalize(&once);

        if once != twice || restats.replacements != 0 {
            violations += 1; // idempotence
        }
        if once.chars().count() != text.chars().count() {
            violations += 1; // length preservation
        }
        for (from, to) in text.chars().zip(once.chars()) {
            if from != to {
                match (decompose(from), decompose(to)) {
                    (Some(f), Some(t)) if f.order_index == t.order_index => {}
                    _ => violations += 1, // order preservation
                }
            }
        }
        if pure_latin && (once != text || stats.replacements != 0) {
            violations += 1; // non-Ethiopic transparency
        }
    }
    assert_eq!(violations, 0, "normalization invariant violations");
}

/// Criterion 3: on the shipped 50-pair homophone/real-error fixture the
/// normalized condition strictly improves WER, CER, and corpus BLEU; on 200
/// random corpora the improvement is never reversed.
#[test]
fn c3_normalization_direction_of_effect() {
    let table = NormalizationTable::default();
    let opts = ScoreOptions::default();

    let manifest = Manifest::load(
        common::fixture_path("homophone_mix_50.jsonl"),
        ManifestFormat::Jsonl,
    )
    .expect("fixture loads");
    assert_eq!(manifest.pairs().len(), 50);
    let raw = score_condition(&manifest, &EvalCondition::Raw, &opts).unwrap();
    let norm = score_condition(&manifest, &EvalCondition::Normalized(&table), &opts).unwrap();
    eprintln!(
        "c3 fixture: WER {:.2} -> {:.2}, CER {:.2} -> {:.2}, corpusBLEU {:.2} -> {:.2}",
        raw.wer, norm.wer, raw.cer, norm.cer, raw.corpus_bleu, norm.corpus_bleu
    );
    assert!(norm.wer < raw.wer, "WER must strictly improve");
    assert!(norm.cer < raw.cer, "CER must strictly improve");
    assert!(
        norm.corpus_bleu > raw.corpus_bleu,
        "corpus BLEU must strictly improve"
    );
    // Real errors persist: normalization is no free lunch.
    assert!(norm.wer > 0.0);

    let mut rng = SplitMix64(0x0003);
    for corpus in 0..200u32 {
        let size = 1 + rng.below(30);
        let manifest = random_corpus(&mut rng, size, 10);
        let raw = score_condition(&manifest, &EvalCondition::Raw, &opts).unwrap();
        let norm = score_condition(&manifest, &EvalCondition::Normalized(&table), &opts).unwrap();
        assert!(norm.wer <= raw.wer, "corpus {corpus}: WER regressed");
        assert!(norm.cer <= raw.cer, "corpus {corpus}: CER regressed");
        assert!(
            norm.corpus_bleu >= raw.corpus_bleu,
            "corpus {corpus}: corpus BLEU regressed"
        );
    }
}

/// Criterion 4: hand-derived pooled metrics on a 5-pair corpus match to
/// 1e-9 before rounding, and the report rounds to two decimals.
#[test]
fn c4_hand_computed_golden_corpus() {
    let pairs = [
        ("a b c d", "a b c d e"),
        ("a b c d", "a b c d"),
        ("a b c d", "a x c d"),
        ("e f g", "e f g"),
        ("a b", "b a"),
    ];

    // Word edits 1+0+1+0+2 = 4 over 4+4+4+3+2 = 17 reference words.
    let expected_wer = 100.0 * 4.0 / 17.0;
    assert!((corpus_wer(&pairs).unwrap() - expected_wer).abs() < 1e-9);

    // Character edits 2+0+1+0+2 = 5 over 7+7+7+5+3 = 29 reference codepoints.
    let expected_cer = 100.0 * 5.0 / 29.0;
    assert!((corpus_cer(&pairs).unwrap() - expected_cer).abs() < 1e-9);

    // Pooled n-gram counts: 16/18, 9/13, 5/8, 2/4; pooled lengths 18 vs 17
    // so the brevity penalty is 1.
    let (bleu, breakdown) = corpus_bleu(&pairs, BLEU_ORDER).unwrap();
    let expected_bleu =
        100.0 * (16.0f64 / 18.0 * (9.0 / 13.0) * (5.0 / 8.0) * (2.0 / 4.0)).powf(0.25);
    assert!(
        (bleu - expected_bleu).abs() < 1e-9,
        "bleu {bleu} != {expected_bleu}"
    );
    assert_eq!(breakdown.brevity_penalty, 1.0);
    assert_eq!((breakdown.hyp_length, breakdown.ref_length), (18, 17));

    // The single-pair worked example embedded as pair 1.
    let (worked, _) = corpus_bleu(&pairs[..1], BLEU_ORDER).unwrap();
    assert!(
        (worked - 66.87).abs() < 0.01,
        "worked example scored {worked}"
    );

    // Per-sentence smoothed scores, hand-derived per pair.
    let manifest = Manifest::from_pairs(
        pairs
            .iter()
            .enumerate()
            .map(|(i, (r, h))| EvalPair::new(format!("g{i}"), *r, *h))
            .collect(),
        "golden",
    )
    .unwrap();
    let scores = score_condition(&manifest, &EvalCondition::Raw, &ScoreOptions::default()).unwrap();
    let s1 = 100.0 * (0.8f64 * 0.75 * (2.0 / 3.0) * 0.5).powf(0.25);
    let s3 = 100.0 * (0.75f64 * (1.0 / 3.0) * (1.0 / 3.0) * 0.5).powf(0.25);
    let s5 = 100.0 * (1.0f64 * 0.5).powf(0.5);
    let expected_avg = (s1 + 100.0 + s3 + 100.0 + s5) / 5.0;
    assert!((scores.avg_bleu - expected_avg).abs() < 1e-9);

    // Reporting rounds to two decimals.
    let thresholds = DiagnosticThresholds::default();
    let diagnostics = diagnose_corpus(&manifest, &thresholds);
    let report = ScoreReport {
        test_set: "golden",
        pair_count: 5,
        condition: "raw",
        scores: &scores,
        normalization: None,
        diagnostics: &diagnostics,
        generated_at: None,
    };
    let json = report.render(OutputFormat::Json);
    assert!(
        json.contains("\"wer\": 23.53"),
        "rounded WER missing:\n{json}"
    );
    assert!(
        json.contains("\"cer\": 17.24"),
        "rounded CER missing:\n{json}"
    );
    assert!(
        json.contains("\"corpus_bleu\": 66.22"),
        "rounded BLEU missing:\n{json}"
    );
}

/// Criterion 5: hypotheses much longer than their references push WER past
/// 100% and the toolkit reports it without error.
#[test]
fn c5_wer_beyond_one_hundred_percent() {
    let pairs: Vec<EvalPair> = (0..5)
        .map(|i| {
            EvalPair::new(
                format!("long{i}"),
                "ሰላም ቤት",
                "ተማሪ መምህር ከተማ ዛሬ ነገ ጠዋት ማታ ልጅ እናት አባት",
            )
        })
        .collect();
    let manifest = Manifest::from_pairs(pairs, "overlong").unwrap();
    let scores = score_condition(&manifest, &EvalCondition::Raw, &ScoreOptions::default()).unwrap();
    eprintln!("c5: WER {:.1}%", scores.wer);
    assert!(scores.wer > 100.0);
    assert!(scores.wer.is_finite() && scores.cer.is_finite());

    let thresholds = DiagnosticThresholds::default();
    let diagnostics = diagnose_corpus(&manifest, &thresholds);
    let report = ScoreReport {
        test_set: "overlong",
        pair_count: manifest.pairs().len(),
        condition: "raw",
        scores: &scores,
        normalization: None,
        diagnostics: &diagnostics,
        generated_at: None,
    };
    let json = report.render(OutputFormat::Json);
    assert!(
        json.contains("\"wer\": 500"),
        "report should carry WER > 100:\n{json}"
    );
}

/// Criterion 6: every degenerate hypothesis is flagged under default
/// thresholds and no clean Amharic hypothesis is.
#[test]
fn c6_degenerate_output_detection() {
    let thresholds = DiagnosticThresholds::default();

    let degenerate = Manifest::load(
        common::fixture_path("degenerate.jsonl"),
        ManifestFormat::Jsonl,
    )
    .expect("degenerate fixture loads");
    let summary = diagnose_corpus(&degenerate, &thresholds);
    assert_eq!(
        summary.flagged_count,
        degenerate.pairs().len(),
        "flagged ids: {:?}",
        summary
            .flagged
            .iter()
            .map(|p| p.id.as_str())
            .collect::<Vec<_>>()
    );
    assert_eq!(summary.flagged_fraction, 1.0);

    let clean = Manifest::load(common::fixture_path("clean.jsonl"), ManifestFormat::Jsonl)
        .expect("clean fixture loads");
    let summary = diagnose_corpus(&clean, &thresholds);
    assert_eq!(
        summary.flagged_count,
        0,
        "false positives: {:?}",
        summary
            .flagged
            .iter()
            .map(|p| p.id.as_str())
            .collect::<Vec<_>>()
    );
}

/// Criterion 7: byte-identical reports on repeated scoring, and manifest
/// load -> write -> load is pairwise identical.
#[test]
fn c7_determinism_and_round_trip() {
    let table = NormalizationTable::default();
    let opts = ScoreOptions::default();
    let manifest = Manifest::load(
        common::fixture_path("homophone_mix_50.jsonl"),
        ManifestFormat::Jsonl,
    )
    .unwrap();

    let render = || {
        let mut models = BTreeMap::new();
        models.insert("model".to_owned(), manifest.clone());
        let report = compare_models(&models, &table, &opts).unwrap();
        render_comparison(&report, OutputFormat::Json, None)
    };
    let first = render();
    let second = render();
    assert_eq!(first, second, "repeated scoring must be byte-identical");

    let written = manifest.to_string_in(ManifestFormat::Jsonl).unwrap();
    let reloaded = Manifest::read(written.as_bytes(), ManifestFormat::Jsonl, "roundtrip").unwrap();
    assert_eq!(manifest.pairs(), reloaded.pairs());
    let rewritten = reloaded.to_string_in(ManifestFormat::Jsonl).unwrap();
    assert_eq!(written, rewritten);
}

/// Criterion 8: 10,000 pairs of ~15 words, both conditions, all four
/// metrics, in under 10 seconds.
#[test]
fn c8_throughput_ten_thousand_pairs() {
    let mut rng = SplitMix64(0x0008);
    let mut pairs = Vec::with_capacity(10_000);
    for i in 0..10_000usize {
        let len = 13 + rng.below(5);
        let reference: Vec<&str> = (0..len).map(|_| VOCAB[rng.below(VOCAB.len())]).collect();
        let hypothesis: Vec<String> = reference
            .iter()
            .map(|w| match rng.below(10) {
                0 => swap_homophone(w, &mut rng),
                1 => VOCAB[rng.below(VOCAB.len())].to_owned(),
                _ => (*w).to_owned(),
            })
            .collect();
        pairs.push(EvalPair::new(
            format!("t{i:05}"),
            reference.join(" "),
            hypothesis.join(" "),
        ));
    }
    let manifest = Manifest::from_pairs(pairs, "throughput").unwrap();
    let table = NormalizationTable::default();
    let opts = ScoreOptions::default();

    let started = Instant::now();
    let raw = score_condition(&manifest, &EvalCondition::Raw, &opts).unwrap();
    let norm = score_condition(&manifest, &EvalCondition::Normalized(&table), &opts).unwrap();
    let elapsed = started.elapsed();
    eprintln!(
        "c8: scored 10,000 pairs twice in {elapsed:?} (raw WER {:.2}, normalized WER {:.2})",
        raw.wer, norm.wer
    );
    assert!(norm.wer <= raw.wer);
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "both-condition scoring took {elapsed:?}"
    );
}
