//! Synthetic corpus generation shared by the benchmarks.

use fidel_eval::corpus::{EvalPair, Manifest};

/// Deterministic 64-bit generator (splitmix64) so benchmark inputs are
/// reproducible across runs without pulling in an RNG dependency.
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
}

const VOCAB: &[&str] = &[
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
];

// Order-preserving homophone swaps used to perturb hypotheses.
const SWAPS: &[(char, char)] = &[
    ('ሀ', 'ሐ'),
    ('ሀ', 'ኀ'),
    ('ሃ', 'ሓ'),
    ('ህ', 'ሕ'),
    ('ሰ', 'ሠ'),
    ('ስ', 'ሥ'),
    ('ሳ', 'ሣ'),
    ('አ', 'ዐ'),
    ('እ', 'ዕ'),
    ('ጸ', 'ፀ'),
    ('ጽ', 'ፅ'),
];

fn swap_homophone(word: &str, rng: &mut SplitMix64) -> String {
    let swappable: Vec<usize> = word
        .chars()
        .enumerate()
        .filter(|(_, c)| SWAPS.iter().any(|&(a, b)| *c == a || *c == b))
        .map(|(i, _)| i)
        .collect();
    if swappable.is_empty() {
        return word.to_owned();
    }
    let target = swappable[rng.below(swappable.len())];
    word.chars()
        .enumerate()
        .map(|(i, c)| {
            if i != target {
                return c;
            }
            for &(a, b) in SWAPS {
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

/// Build a manifest of `pairs` utterances of roughly `words_per_pair` words,
/// with a mix of homophone swaps and genuine word errors in the hypotheses.
pub fn synthetic_manifest(pairs: usize, words_per_pair: usize, seed: u64) -> Manifest {
    let mut rng = SplitMix64(seed);
    let mut out = Vec::with_capacity(pairs);
    for i in 0..pairs {
        let ref_words: Vec<&str> = (0..words_per_pair)
            .map(|_| VOCAB[rng.below(VOCAB.len())])
            .collect();
        let hyp_words: Vec<String> = ref_words
            .iter()
            .map(|w| match rng.below(10) {
                0 => swap_homophone(w, &mut rng),
                1 => VOCAB[rng.below(VOCAB.len())].to_owned(),
                _ => (*w).to_owned(),
            })
            .collect();
        out.push(EvalPair::new(
            format!("pair-{i:05}"),
            ref_words.join(" "),
            hyp_words.join(" "),
        ));
    }
    Manifest::from_pairs(out, "synthetic").expect("generated pairs are valid")
}
