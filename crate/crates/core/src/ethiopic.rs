//! Ethiopic script model: codepoint classification, syllable decomposition,
//! and homophone normalization.
//!
//! An Ethiopic syllable (fidel) encodes a consonant plus a vowel. Unicode lays
//! the script out in runs of eight codepoints per consonant series: the first
//! codepoint of a series is its base, and the offset within the run is the
//! vowel order. Several distinct series are pronounced identically in modern
//! Amharic (homophones); [`NormalizationTable`] maps every member of such a
//! family onto one canonical series, slot by slot, so that purely orthographic
//! variation stops counting as a transcription error.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// First codepoint of the core Ethiopic block (ሀ).
const BLOCK_START: u32 = 0x1200;
/// Last assigned syllable of the core block (ፚ, ETHIOPIC SYLLABLE FYA).
const SYLLABLE_END: u32 = 0x135A;
/// Unicode reserves eight vowel-order slots per consonant series.
pub const SERIES_LEN: u32 = 8;

/// Codepoints inside `U+1200..=U+135A` that Unicode leaves unassigned
/// (seven-form series and gaps in the labiovelar runs).
const UNASSIGNED: &[u32] = &[
    0x1249, 0x124E, 0x124F, 0x1257, 0x1259, 0x125E, 0x125F, 0x1289, 0x128E, 0x128F, 0x12B1, 0x12B6,
    0x12B7, 0x12BF, 0x12C1, 0x12C6, 0x12C7, 0x12D7, 0x1311, 0x1316, 0x1317,
];

/// Labiovelar extension series that phonetically belong to a base series but
/// live outside its eight-slot run (e.g. ኈ extends ኀ). The table builder
/// leaves these untouched and reports them as skipped.
const LABIOVELAR_EXTENSIONS: &[(u32, u32)] = &[
    (0x1240, 0x1248), // ቀ → ቈ
    (0x1250, 0x1258), // ቐ → ቘ
    (0x1280, 0x1288), // ኀ → ኈ
    (0x12A8, 0x12B0), // ከ → ኰ
    (0x12B8, 0x12C0), // ኸ → ዀ
    (0x1308, 0x1310), // ገ → ጐ
];

/// True when the codepoint belongs to one of the Ethiopic Unicode blocks
/// (core, Supplement, or Extended), assigned or not.
pub fn is_ethiopic(c: char) -> bool {
    matches!(u32::from(c), 0x1200..=0x137F | 0x1380..=0x139F | 0x2D80..=0x2DDF)
}

/// True when the codepoint is an assigned syllable of the core block.
/// Punctuation, digits, and combining marks are not syllables.
pub fn is_ethiopic_syllable(c: char) -> bool {
    let cp = u32::from(c);
    (BLOCK_START..=SYLLABLE_END).contains(&cp) && !UNASSIGNED.contains(&cp)
}

/// A decomposed Ethiopic syllable: the base of its consonant series plus its
/// vowel-order slot (1..=8) within that series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EthiopicSyllable {
    pub codepoint: char,
    /// First codepoint of the eight-slot series containing `codepoint`.
    pub family_base: char,
    /// Vowel order within the series, counted from 1.
    pub order_index: u8,
}

/// Decompose a codepoint into series base and vowel order.
///
/// Returns `None` for anything that is not an assigned syllable of the core
/// Ethiopic block, including Ethiopic punctuation and digits.
pub fn decompose(c: char) -> Option<EthiopicSyllable> {
    if !is_ethiopic_syllable(c) {
        return None;
    }
    let cp = u32::from(c);
    let slot = (cp - BLOCK_START) % SERIES_LEN;
    let base = cp - slot;
    Some(EthiopicSyllable {
        codepoint: c,
        // Base of an assigned syllable's run is itself in-range.
        family_base: char::from_u32(base).expect("series base is a valid scalar"),
        order_index: (slot + 1) as u8,
    })
}

/// Errors from constructing a [`HomophoneFamily`] or [`NormalizationTable`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("U+{0:04X} is not an Ethiopic series base")]
    NotSeriesBase(u32),
    #[error("series base U+{0:04X} appears more than once across families")]
    DuplicateBase(u32),
    #[error("family with canonical U+{0:04X} has no variant series to map")]
    EmptyFamily(u32),
}

/// A set of consonant series that share one sound, with one member chosen as
/// the normalization target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomophoneFamily {
    canonical_base: char,
    member_bases: Vec<char>,
}

impl HomophoneFamily {
    /// Build a family from its canonical series base and the variant bases
    /// that should fold onto it. Every base must start an assigned series.
    pub fn new(canonical: char, variants: &[char]) -> Result<Self, TableError> {
        let mut member_bases = Vec::with_capacity(variants.len() + 1);
        for &base in std::iter::once(&canonical).chain(variants) {
            let cp = u32::from(base);
            if !is_ethiopic_syllable(base) || !(cp - BLOCK_START).is_multiple_of(SERIES_LEN) {
                return Err(TableError::NotSeriesBase(cp));
            }
            if member_bases.contains(&base) {
                return Err(TableError::DuplicateBase(cp));
            }
            member_bases.push(base);
        }
        if variants.is_empty() {
            return Err(TableError::EmptyFamily(u32::from(canonical)));
        }
        Ok(Self {
            canonical_base: canonical,
            member_bases,
        })
    }

    pub fn canonical_base(&self) -> char {
        self.canonical_base
    }

    /// All member bases, canonical first.
    pub fn member_bases(&self) -> &[char] {
        &self.member_bases
    }

    /// Member bases excluding the canonical one.
    pub fn variant_bases(&self) -> impl Iterator<Item = char> + '_ {
        self.member_bases
            .iter()
            .copied()
            .filter(move |&b| b != self.canonical_base)
    }
}

/// The four Amharic homophone families, each normalized onto the variant most
/// common in modern orthography: the ha sounds (ሐ, ኀ → ሀ), the a sounds
/// (ዐ → አ), the sa sounds (ሠ → ሰ), and the tsa sounds (ፀ → ጸ).
pub fn default_families() -> Vec<HomophoneFamily> {
    vec![
        HomophoneFamily::new('ሀ', &['ሐ', 'ኀ']).expect("ha family"),
        HomophoneFamily::new('አ', &['ዐ']).expect("a family"),
        HomophoneFamily::new('ሰ', &['ሠ']).expect("sa family"),
        HomophoneFamily::new('ጸ', &['ፀ']).expect("tsa family"),
    ]
}

#[derive(Debug, Clone, Copy)]
struct Mapping {
    target: char,
    /// Canonical base of the family this source codepoint belongs to.
    family: char,
}

/// Immutable codepoint-to-codepoint mapping realizing a set of homophone
/// families. Identity outside the mapped set; idempotent; order-preserving;
/// never touches non-Ethiopic codepoints or whitespace.
#[derive(Debug, Clone)]
pub struct NormalizationTable {
    entries: HashMap<char, Mapping>,
    families: Vec<HomophoneFamily>,
    /// Assigned codepoints associated with a variant series that the table
    /// intentionally leaves identity: labiovelar extension slots, and base
    /// slots whose counterpart in the canonical series is unassigned.
    skipped: usize,
}

impl Default for NormalizationTable {
    fn default() -> Self {
        Self::from_families(default_families()).expect("default families are valid")
    }
}

impl NormalizationTable {
    /// Build a table from explicit families, which also lets callers override
    /// the canonical choice per family.
    pub fn from_families(families: Vec<HomophoneFamily>) -> Result<Self, TableError> {
        let mut seen = Vec::new();
        for family in &families {
            for &base in family.member_bases() {
                if seen.contains(&base) {
                    return Err(TableError::DuplicateBase(u32::from(base)));
                }
                seen.push(base);
            }
        }

        let mut entries = HashMap::new();
        let mut skipped = 0usize;
        for family in &families {
            let canonical = u32::from(family.canonical_base());
            for variant in family.variant_bases() {
                let variant = u32::from(variant);
                for slot in 0..SERIES_LEN {
                    let (src, dst) = (variant + slot, canonical + slot);
                    let src_ok = char::from_u32(src).is_some_and(is_ethiopic_syllable);
                    let dst_ok = char::from_u32(dst).is_some_and(is_ethiopic_syllable);
                    match (src_ok, dst_ok) {
                        (true, true) => {
                            entries.insert(
                                char::from_u32(src).unwrap(),
                                Mapping {
                                    target: char::from_u32(dst).unwrap(),
                                    family: family.canonical_base(),
                                },
                            );
                        }
                        (true, false) => skipped += 1,
                        (false, _) => {}
                    }
                }
                if let Some(&(_, ext)) = LABIOVELAR_EXTENSIONS
                    .iter()
                    .find(|&&(base, _)| base == variant)
                {
                    skipped += (ext..ext + SERIES_LEN)
                        .filter(|&cp| char::from_u32(cp).is_some_and(is_ethiopic_syllable))
                        .count();
                }
            }
        }
        Ok(Self {
            entries,
            families,
            skipped,
        })
    }

    /// Parse the table override format: one family per line,
    /// `canonical_base_hex: member_base_hex,member_base_hex,...`.
    /// Lines beginning `#` are comments.
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut families = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (canonical, members) =
                trimmed.split_once(':').ok_or_else(|| TableError::Parse {
                    line,
                    message: "expected `canonical_hex: member_hex,...`".into(),
                })?;
            let canonical = parse_hex_char(canonical.trim(), line)?;
            let variants = members
                .split(',')
                .map(|m| parse_hex_char(m.trim(), line))
                .collect::<Result<Vec<_>, _>>()?;
            if variants.is_empty() || members.trim().is_empty() {
                return Err(TableError::Parse {
                    line,
                    message: "family lists no member bases".into(),
                });
            }
            let family =
                HomophoneFamily::new(canonical, &variants).map_err(|e| TableError::Parse {
                    line,
                    message: e.to_string(),
                })?;
            if let Some(&base) = family.member_bases().iter().find(|b| {
                families
                    .iter()
                    .any(|f: &HomophoneFamily| f.member_bases().contains(b))
            }) {
                return Err(TableError::Parse {
                    line,
                    message: TableError::DuplicateBase(u32::from(base)).to_string(),
                });
            }
            families.push(family);
        }
        Self::from_families(families).map_err(|e| match e {
            TableError::Parse { .. } => e,
            other => TableError::Parse {
                line: 0,
                message: other.to_string(),
            },
        })
    }

    /// Total mapping: the normalization target of `c`, or `c` itself.
    pub fn map(&self, c: char) -> char {
        self.entries.get(&c).map_or(c, |m| m.target)
    }

    /// Number of non-identity entries.
    pub fn mapped_count(&self) -> usize {
        self.entries.len()
    }

    /// Number of variant-associated codepoints intentionally left identity.
    pub fn skipped_count(&self) -> usize {
        self.skipped
    }

    pub fn families(&self) -> &[HomophoneFamily] {
        &self.families
    }

    /// Apply the table codepoint-wise. The output has the same codepoint
    /// length as the input; stats count the non-identity applications.
    pub fn normalize(&self, text: &str) -> (String, NormalizationStats) {
        let mut stats = NormalizationStats::default();
        let out = text
            .chars()
            .map(|c| match self.entries.get(&c) {
                Some(m) => {
                    stats.replacements += 1;
                    *stats.by_family.entry(m.family.to_string()).or_insert(0) += 1;
                    m.target
                }
                None => c,
            })
            .collect();
        (out, stats)
    }
}

fn parse_hex_char(token: &str, line: usize) -> Result<char, TableError> {
    let cp = u32::from_str_radix(token, 16).map_err(|_| TableError::Parse {
        line,
        message: format!("`{token}` is not a hexadecimal codepoint"),
    })?;
    char::from_u32(cp).ok_or(TableError::Parse {
        line,
        message: format!("U+{cp:04X} is not a Unicode scalar value"),
    })
}

/// Replacement counts from one or more [`NormalizationTable::normalize`]
/// applications, keyed by the canonical base of each family.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct NormalizationStats {
    pub replacements: u64,
    pub by_family: BTreeMap<String, u64>,
}

impl NormalizationStats {
    /// Fold another stats record into this one.
    pub fn merge(&mut self, other: &NormalizationStats) {
        self.replacements += other.replacements;
        for (family, count) in &other.by_family {
            *self.by_family.entry(family.clone()).or_insert(0) += count;
        }
    }
}

impl fmt::Display for NormalizationStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} replacement(s)", self.replacements)?;
        if !self.by_family.is_empty() {
            let parts: Vec<String> = self
                .by_family
                .iter()
                .map(|(k, v)| format!("{k}: {v}"))
                .collect();
            write!(f, " ({})", parts.join(", "))?;
        }
        Ok(())
    }
}
