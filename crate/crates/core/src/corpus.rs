//! Manifest ingestion and validation. A manifest pairs utterance ids with a
//! reference transcription and a model hypothesis, one record per line, in
//! JSONL (`{"id": ..., "ref": ..., "hyp": ...}`) or headerless three-column
//! TSV. All text is NFC-composed on load.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::{is_nfc_quick, IsNormalized, UnicodeNormalization};

use crate::diagnostics::ethiopic_ratio;

/// Lines longer than this are rejected as binary garbage.
pub const MAX_LINE_LEN: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: invalid UTF-8")]
    Encoding { line: usize },
    #[error("line {line}: line exceeds 1 MiB")]
    LineTooLong { line: usize },
    #[error("line {line}: duplicate id \"{id}\"")]
    DuplicateId { id: String, line: usize },
    #[error("line {line}: pair \"{id}\" has an empty reference")]
    EmptyReference { id: String, line: usize },
    #[error("line {line}: pair has an empty id")]
    EmptyId { line: usize },
    #[error("manifest contains no pairs")]
    Empty,
    #[error("pair \"{id}\" contains a tab or newline and cannot be written as TSV")]
    TsvUnrepresentable { id: String },
}

/// One utterance: identifier, reference transcription, hypothesis.
/// The hypothesis may be empty; models can emit nothing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalPair {
    pub id: String,
    #[serde(rename = "ref")]
    pub reference: String,
    #[serde(rename = "hyp")]
    pub hypothesis: String,
}

impl EvalPair {
    pub fn new(
        id: impl Into<String>,
        reference: impl Into<String>,
        hypothesis: impl Into<String>,
    ) -> Self {
        Self {
            id: id.into(),
            reference: reference.into(),
            hypothesis: hypothesis.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifestFormat {
    Jsonl,
    Tsv,
}

impl FromStr for ManifestFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(Self::Jsonl),
            "tsv" => Ok(Self::Tsv),
            other => Err(format!(
                "unknown manifest format `{other}` (expected jsonl or tsv)"
            )),
        }
    }
}

/// An ordered, validated set of [`EvalPair`]s. Immutable after construction
/// and safe to share across concurrent scorers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pairs: Vec<EvalPair>,
    source_label: String,
}

fn nfc_owned(text: &str) -> String {
    match is_nfc_quick(text.chars()) {
        IsNormalized::Yes => text.to_owned(),
        _ => text.nfc().collect(),
    }
}

impl Manifest {
    /// Validate and NFC-compose pairs built in memory. The `line` reported in
    /// errors is the 1-based record position.
    pub fn from_pairs(
        pairs: Vec<EvalPair>,
        source_label: impl Into<String>,
    ) -> Result<Self, CorpusError> {
        if pairs.is_empty() {
            return Err(CorpusError::Empty);
        }
        let mut seen = HashSet::new();
        let mut composed = Vec::with_capacity(pairs.len());
        for (idx, pair) in pairs.into_iter().enumerate() {
            let line = idx + 1;
            if pair.id.is_empty() {
                return Err(CorpusError::EmptyId { line });
            }
            if pair.reference.trim().is_empty() {
                return Err(CorpusError::EmptyReference { id: pair.id, line });
            }
            if !seen.insert(pair.id.clone()) {
                return Err(CorpusError::DuplicateId { id: pair.id, line });
            }
            composed.push(EvalPair {
                id: nfc_owned(&pair.id),
                reference: nfc_owned(&pair.reference),
                hypothesis: nfc_owned(&pair.hypothesis),
            });
        }
        Ok(Self {
            pairs: composed,
            source_label: source_label.into(),
        })
    }

    /// Load a manifest from a file; the source label defaults to the file
    /// stem.
    pub fn load(path: impl AsRef<Path>, format: ManifestFormat) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let file = File::open(path)?;
        Self::read(BufReader::new(file), format, label)
    }

    /// Load a manifest from any reader.
    pub fn read(
        reader: impl Read,
        format: ManifestFormat,
        source_label: impl Into<String>,
    ) -> Result<Self, CorpusError> {
        let mut reader = BufReader::new(reader);
        let mut pairs = Vec::new();
        let mut buf = Vec::new();
        let mut line_no = 0usize;
        loop {
            buf.clear();
            let read = reader
                .by_ref()
                .take(MAX_LINE_LEN as u64 + 1)
                .read_until(b'\n', &mut buf)?;
            if read == 0 {
                break;
            }
            line_no += 1;
            if buf.last() == Some(&b'\n') {
                buf.pop();
            }
            if buf.last() == Some(&b'\r') {
                buf.pop();
            }
            if buf.len() > MAX_LINE_LEN {
                return Err(CorpusError::LineTooLong { line: line_no });
            }
            let line =
                std::str::from_utf8(&buf).map_err(|_| CorpusError::Encoding { line: line_no })?;
            if line.trim().is_empty() {
                continue;
            }
            let pair = match format {
                ManifestFormat::Jsonl => {
                    serde_json::from_str::<EvalPair>(line).map_err(|e| CorpusError::Parse {
                        line: line_no,
                        message: e.to_string(),
                    })?
                }
                ManifestFormat::Tsv => parse_tsv_line(line, line_no)?,
            };
            pairs.push((line_no, pair));
        }

        // Validate with real line numbers, then NFC through from_pairs.
        if pairs.is_empty() {
            return Err(CorpusError::Empty);
        }
        let mut seen = HashSet::new();
        for (line, pair) in &pairs {
            if pair.id.is_empty() {
                return Err(CorpusError::EmptyId { line: *line });
            }
            if pair.reference.trim().is_empty() {
                return Err(CorpusError::EmptyReference {
                    id: pair.id.clone(),
                    line: *line,
                });
            }
            if !seen.insert(pair.id.clone()) {
                return Err(CorpusError::DuplicateId {
                    id: pair.id.clone(),
                    line: *line,
                });
            }
        }
        Self::from_pairs(pairs.into_iter().map(|(_, p)| p).collect(), source_label)
    }

    pub fn pairs(&self) -> &[EvalPair] {
        &self.pairs
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn set_source_label(&mut self, label: impl Into<String>) {
        self.source_label = label.into();
    }

    pub fn get(&self, id: &str) -> Option<&EvalPair> {
        self.pairs.iter().find(|p| p.id == id)
    }

    /// Write as JSONL: UTF-8, LF line endings, one
    /// `{"id": ..., "ref": ..., "hyp": ...}` object per line.
    pub fn write_jsonl(&self, mut writer: impl Write) -> io::Result<()> {
        for pair in &self.pairs {
            let line = serde_json::to_string(pair).expect("pair serializes");
            writer.write_all(line.as_bytes())?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Write as headerless `id<TAB>ref<TAB>hyp` lines. Fields containing tabs
    /// or newlines are unrepresentable and rejected.
    pub fn write_tsv(&self, mut writer: impl Write) -> Result<(), CorpusError> {
        for pair in &self.pairs {
            let fields = [&pair.id, &pair.reference, &pair.hypothesis];
            if fields.iter().any(|f| f.contains(['\t', '\n', '\r'])) {
                return Err(CorpusError::TsvUnrepresentable {
                    id: pair.id.clone(),
                });
            }
            writeln!(
                writer,
                "{}\t{}\t{}",
                pair.id, pair.reference, pair.hypothesis
            )
            .map_err(CorpusError::Io)?;
        }
        Ok(())
    }

    pub fn to_string_in(&self, format: ManifestFormat) -> Result<String, CorpusError> {
        let mut out = Vec::new();
        match format {
            ManifestFormat::Jsonl => self.write_jsonl(&mut out)?,
            ManifestFormat::Tsv => self.write_tsv(&mut out)?,
        }
        Ok(String::from_utf8(out).expect("writers emit UTF-8"))
    }
}

fn parse_tsv_line(line: &str, line_no: usize) -> Result<EvalPair, CorpusError> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 3 {
        return Err(CorpusError::Parse {
            line: line_no,
            message: format!("expected 3 tab-separated fields, found {}", fields.len()),
        });
    }
    Ok(EvalPair::new(fields[0], fields[1], fields[2]))
}

/// Per-pair observations from [`validate_manifest`]; informational, never a
/// failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairValidation {
    pub id: String,
    pub ref_codepoints: usize,
    pub hyp_codepoints: usize,
    pub empty_hyp: bool,
    pub non_ethiopic_ref: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub pairs: Vec<PairValidation>,
}

impl ValidationReport {
    pub fn empty_hyp_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.empty_hyp).count()
    }

    pub fn non_ethiopic_ref_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.non_ethiopic_ref).count()
    }

    pub fn is_clean(&self) -> bool {
        self.pairs
            .iter()
            .all(|p| !p.empty_hyp && !p.non_ethiopic_ref)
    }
}

/// Inspect every pair without mutating anything: flags empty hypotheses and
/// references that are not Ethiopic-dominant (ratio below 0.5).
pub fn validate_manifest(manifest: &Manifest) -> ValidationReport {
    let pairs = manifest
        .pairs()
        .iter()
        .map(|pair| PairValidation {
            id: pair.id.clone(),
            ref_codepoints: pair.reference.chars().count(),
            hyp_codepoints: pair.hypothesis.chars().count(),
            empty_hyp: pair.hypothesis.trim().is_empty(),
            non_ethiopic_ref: ethiopic_ratio(&pair.reference) < 0.5,
        })
        .collect();
    ValidationReport { pairs }
}
