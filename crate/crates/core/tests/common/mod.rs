//! Helpers shared by the integration and acceptance suites.
#![allow(dead_code)]

use std::path::PathBuf;

use fidel_eval::corpus::{EvalPair, Manifest};

/// Deterministic splitmix64 so randomized suites are reproducible without an
/// RNG dependency.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    pub fn chance(&mut self, num: usize, den: usize) -> bool {
        self.below(den) < num
    }
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub const VOCAB: &[&str] = &[
    "ሰላም",
    "ሀገር",
    "ውሃ",
    "ቤት",
    "ሰው",
    "ተማሪ",
    "መምህር",
    "ከተማ",
    "ዛሬ",
    "ነገ",
    "ጠዋት",
    "ማታ",
    "ልጅ",
    "እናት",
    "አባት",
    "ወንድም",
    "እህት",
    "ቋንቋ",
    "ስራ",
    "ሀሳብ",
    "ጸሀይ",
    "ጨረቃ",
    "ዝናብ",
    "ነፋስ",
    "መንገድ",
    "ገበያ",
    "ትምህርት",
    "መጽሀፍ",
    "ወረቀት",
    "ብርሃን",
    "ሰዓት",
    "አበባ",
    "ዘፈን",
    "ታሪክ",
    "ጤና",
    "ህዝብ",
    "አመት",
    "ጽሁፍ",
    "እለት",
    "ሙዚቃ",
];

/// Order-preserving homophone swap pairs drawn from the default families.
pub const HOMOPHONE_SWAPS: &[(char, char)] = &[
    ('ሀ', 'ሐ'),
    ('ሀ', 'ኀ'),
    ('ሃ', 'ሓ'),
    ('ሃ', 'ኃ'),
    ('ህ', 'ሕ'),
    ('ህ', 'ኅ'),
    ('ሰ', 'ሠ'),
    ('ስ', 'ሥ'),
    ('ሳ', 'ሣ'),
    ('አ', 'ዐ'),
    ('እ', 'ዕ'),
    ('ኣ', 'ዓ'),
    ('ጸ', 'ፀ'),
    ('ጽ', 'ፅ'),
    ('ጻ', 'ፃ'),
];

/// Swap one homophone character somewhere in the word, if any exists.
pub fn swap_homophone(word: &str, rng: &mut SplitMix64) -> String {
    let positions: Vec<usize> = word
        .chars()
        .enumerate()
        .filter(|(_, c)| HOMOPHONE_SWAPS.iter().any(|&(a, b)| *c == a || *c == b))
        .map(|(i, _)| i)
        .collect();
    if positions.is_empty() {
        return word.to_owned();
    }
    let target = positions[rng.below(positions.len())];
    word.chars()
        .enumerate()
        .map(|(i, c)| {
            if i != target {
                return c;
            }
            for &(a, b) in HOMOPHONE_SWAPS {
                if c == a {
                    return b;
                }
                if c == b {
                    return a;
                }
            }
            c
        })
        .collect()
}

/// A random corpus whose hypotheses mix homophone swaps, word substitutions,
/// deletions, insertions, and occasional empty output.
pub fn random_corpus(rng: &mut SplitMix64, pairs: usize, max_words: usize) -> Manifest {
    let mut out = Vec::with_capacity(pairs);
    for i in 0..pairs {
        let len = 1 + rng.below(max_words);
        let reference: Vec<&str> = (0..len).map(|_| VOCAB[rng.below(VOCAB.len())]).collect();
        let mut hypothesis: Vec<String> = Vec::new();
        if !rng.chance(1, 20) {
            for word in &reference {
                match rng.below(12) {
                    0 => hypothesis.push(swap_homophone(word, rng)),
                    1 => hypothesis.push(VOCAB[rng.below(VOCAB.len())].to_owned()),
                    2 => {} // deletion
                    3 => {
                        hypothesis.push((*word).to_owned());
                        hypothesis.push(VOCAB[rng.below(VOCAB.len())].to_owned());
                    }
                    _ => hypothesis.push((*word).to_owned()),
                }
            }
        }
        out.push(EvalPair::new(
            format!("r{i:04}"),
            reference.join(" "),
            hypothesis.join(" "),
        ));
    }
    Manifest::from_pairs(out, "random").expect("generated corpus is valid")
}
