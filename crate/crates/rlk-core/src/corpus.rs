//! Canonical dataset model and ERASER-style ingestion.
//!
//! A dataset is a manifest (name, label vocabulary, rationale granularity,
//! split paths) plus one JSONL file per split. Each record becomes a
//! [`Quadruple`]: question, passage, annotated rationale sentence indices,
//! and gold label.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader};
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::textproc::{split_sentences, TextprocError};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path} line {line}: {source}")]
    ParseLine {
        path: String,
        line: usize,
        source: serde_json::Error,
    },
    #[error("manifest {path}: {message}")]
    InvalidManifest { path: String, message: String },
    #[error("unknown split '{split}'; declared splits: {declared}")]
    UnknownSplit { split: String, declared: String },
    #[error("duplicate record id '{id}'")]
    DuplicateId { id: String },
    #[error("record '{id}': label '{label}' is not in the label vocabulary")]
    UnknownLabel { id: String, label: String },
    #[error("record '{id}': rationale index {index} out of range for a {sentence_count}-sentence passage")]
    RationaleIndexOutOfRange {
        id: String,
        index: usize,
        sentence_count: usize,
    },
    #[error("record '{id}': rationale_sentences is present but empty; omit the field for unannotated records")]
    EmptyRationale { id: String },
    #[error("record '{id}': {source}")]
    InvalidPassage { id: String, source: TextprocError },
    #[error("passage is not segmentable: {0}")]
    UnsegmentablePassage(TextprocError),
    #[error("phrase span {start}..{end} invalid for a {passage_chars}-char passage")]
    SpanOutOfBounds {
        start: usize,
        end: usize,
        passage_chars: usize,
    },
    #[error("annotation fraction must be in (0, 1], got {0}")]
    InvalidFraction(f64),
}

/// One supervised example: claim/question, passage, annotated rationale
/// (0-based sentence indices into the passage's canonical segmentation),
/// and gold label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadruple {
    pub id: String,
    pub question: String,
    pub passage: String,
    pub rationale_sentences: BTreeSet<usize>,
    /// False for semi-supervised records whose rationale was withheld.
    pub annotated: bool,
    pub label: String,
    /// Dataset name from the manifest this record was loaded under.
    pub dataset: String,
}

impl Quadruple {
    /// The annotated rationale rendered as text: sentence texts in passage
    /// order joined by single spaces.
    pub fn rationale_text(&self) -> Result<String, TextprocError> {
        let sentences = split_sentences(&self.passage)?;
        Ok(self
            .rationale_sentences
            .iter()
            .filter_map(|&i| sentences.get(i))
            .map(|s| s.text.as_str())
            .collect::<Vec<_>>()
            .join(" "))
    }
}

/// Whether a dataset annotates rationales per sentence or per phrase.
/// Phrase-level annotations are converted upstream (see
/// [`phrase_to_sentence`]); canonical records are always sentence-indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RationaleGranularity {
    Sentence,
    Phrase,
}

/// Dataset manifest: one JSON document naming the label vocabulary, the
/// rationale granularity, and one JSONL file per split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub label_vocabulary: Vec<String>,
    pub rationale_granularity: RationaleGranularity,
    /// Split name -> file path. Relative paths are resolved against the
    /// manifest's directory by [`DatasetManifest::load`].
    pub splits: BTreeMap<String, PathBuf>,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let raw = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut manifest: DatasetManifest =
            serde_json::from_str(&raw).map_err(|e| CorpusError::InvalidManifest {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        manifest.validate().map_err(|message| CorpusError::InvalidManifest {
            path: path.display().to_string(),
            message,
        })?;
        if let Some(dir) = path.parent() {
            for split_path in manifest.splits.values_mut() {
                if split_path.is_relative() {
                    *split_path = dir.join(&*split_path);
                }
            }
        }
        Ok(manifest)
    }

    fn validate(&self) -> Result<(), String> {
        if self.label_vocabulary.is_empty() {
            return Err("label_vocabulary must not be empty".to_owned());
        }
        let distinct: BTreeSet<&String> = self.label_vocabulary.iter().collect();
        if distinct.len() != self.label_vocabulary.len() {
            return Err("label_vocabulary contains duplicate labels".to_owned());
        }
        Ok(())
    }

    pub fn split_path(&self, split: &str) -> Result<&Path, CorpusError> {
        self.splits
            .get(split)
            .map(PathBuf::as_path)
            .ok_or_else(|| CorpusError::UnknownSplit {
                split: split.to_owned(),
                declared: self.splits.keys().cloned().collect::<Vec<_>>().join(", "),
            })
    }
}

/// Wire form of one dataset record: one JSON object per line.
/// `rationale_sentences` absent means the record is unannotated.
#[derive(Debug, Serialize, Deserialize)]
struct RawRecord {
    id: String,
    question: String,
    passage: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rationale_sentences: Option<Vec<usize>>,
    label: String,
}

/// Loads and validates one split into quadruples, in file order.
pub fn load_dataset(
    manifest: &DatasetManifest,
    split: &str,
) -> Result<Vec<Quadruple>, CorpusError> {
    let path = manifest.split_path(split)?;
    let file = std::fs::File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut examples = Vec::new();
    let mut seen_ids = BTreeSet::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord =
            serde_json::from_str(&line).map_err(|source| CorpusError::ParseLine {
                path: path.display().to_string(),
                line: lineno + 1,
                source,
            })?;
        let quadruple = validate_record(raw, manifest)?;
        if !seen_ids.insert(quadruple.id.clone()) {
            return Err(CorpusError::DuplicateId { id: quadruple.id });
        }
        examples.push(quadruple);
    }
    Ok(examples)
}

fn validate_record(raw: RawRecord, manifest: &DatasetManifest) -> Result<Quadruple, CorpusError> {
    if !manifest.label_vocabulary.contains(&raw.label) {
        return Err(CorpusError::UnknownLabel {
            id: raw.id,
            label: raw.label,
        });
    }
    let sentences = split_sentences(&raw.passage).map_err(|source| CorpusError::InvalidPassage {
        id: raw.id.clone(),
        source,
    })?;
    let (rationale_sentences, annotated) = match raw.rationale_sentences {
        Some(indices) => {
            if indices.is_empty() {
                return Err(CorpusError::EmptyRationale { id: raw.id });
            }
            let set: BTreeSet<usize> = indices.into_iter().collect();
            if let Some(&bad) = set.iter().find(|&&i| i >= sentences.len()) {
                return Err(CorpusError::RationaleIndexOutOfRange {
                    id: raw.id,
                    index: bad,
                    sentence_count: sentences.len(),
                });
            }
            (set, true)
        }
        None => (BTreeSet::new(), false),
    };
    Ok(Quadruple {
        id: raw.id,
        question: raw.question,
        passage: raw.passage,
        rationale_sentences,
        annotated,
        label: raw.label,
        dataset: manifest.name.clone(),
    })
}

/// Serializes quadruples back to the canonical JSONL record format.
pub fn dataset_to_jsonl(examples: &[Quadruple]) -> String {
    let mut out = String::new();
    for example in examples {
        let raw = RawRecord {
            id: example.id.clone(),
            question: example.question.clone(),
            passage: example.passage.clone(),
            rationale_sentences: example
                .annotated
                .then(|| example.rationale_sentences.iter().copied().collect()),
            label: example.label.clone(),
        };
        out.push_str(&serde_json::to_string(&raw).expect("record serializes"));
        out.push('\n');
    }
    out
}

/// Maps phrase-level character spans to the set of sentence indices they
/// overlap by at least one character. Spans are half-open `char` ranges.
pub fn phrase_to_sentence(
    passage: &str,
    phrase_spans: &[Range<usize>],
) -> Result<BTreeSet<usize>, CorpusError> {
    let passage_chars = passage.chars().count();
    for span in phrase_spans {
        if span.start >= span.end || span.end > passage_chars {
            return Err(CorpusError::SpanOutOfBounds {
                start: span.start,
                end: span.end,
                passage_chars,
            });
        }
    }
    if phrase_spans.is_empty() {
        return Ok(BTreeSet::new());
    }
    let sentences = split_sentences(passage).map_err(CorpusError::UnsegmentablePassage)?;
    let mut indices = BTreeSet::new();
    for sentence in sentences.sentences() {
        let r = &sentence.char_range;
        if phrase_spans
            .iter()
            .any(|span| span.start < r.end && r.start < span.end)
        {
            indices.insert(sentence.index);
        }
    }
    Ok(indices)
}

/// Keeps annotations on a seeded, uniformly chosen `floor(n * fraction)` of
/// the annotated examples (`n` = count of annotated inputs) and clears the
/// rest. Output order follows input order; the selection depends only on
/// record ids and the seed, never on input order.
pub fn subsample_annotations(
    examples: &[Quadruple],
    fraction: f64,
    seed: u64,
) -> Result<Vec<Quadruple>, CorpusError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(CorpusError::InvalidFraction(fraction));
    }
    let mut ranked: Vec<(u64, &str)> = examples
        .iter()
        .filter(|e| e.annotated)
        .map(|e| (annotation_rank(seed, &e.id), e.id.as_str()))
        .collect();
    ranked.sort();
    let keep_count = (ranked.len() as f64 * fraction).floor() as usize;
    let keep: BTreeSet<&str> = ranked[..keep_count].iter().map(|(_, id)| *id).collect();

    Ok(examples
        .iter()
        .map(|example| {
            if example.annotated && !keep.contains(example.id.as_str()) {
                let mut cleared = example.clone();
                cleared.rationale_sentences.clear();
                cleared.annotated = false;
                cleared
            } else {
                example.clone()
            }
        })
        .collect())
}

fn annotation_rank(seed: u64, id: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(id.as_bytes());
    let digest = hasher.finalize();
    u64::from_be_bytes(digest[..8].try_into().expect("8 bytes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn manifest() -> DatasetManifest {
        DatasetManifest {
            name: "demo".into(),
            label_vocabulary: vec!["True".into(), "False".into()],
            rationale_granularity: RationaleGranularity::Sentence,
            splits: BTreeMap::new(),
        }
    }

    fn manifest_with_file(lines: &str) -> (DatasetManifest, tempfile::TempDir) {
        let dir = tempfile::tempdir().unwrap();
        let data_path = dir.path().join("train.jsonl");
        let mut f = std::fs::File::create(&data_path).unwrap();
        f.write_all(lines.as_bytes()).unwrap();
        let mut m = manifest();
        m.splits.insert("train".into(), data_path);
        (m, dir)
    }

    #[test]
    fn loads_empty_file_to_empty_list() {
        let (m, _dir) = manifest_with_file("");
        assert!(load_dataset(&m, "train").unwrap().is_empty());
    }

    #[test]
    fn loads_a_well_formed_record() {
        let (m, _dir) = manifest_with_file(
            r#"{"id":"a","question":"Q","passage":"S one. S two.","rationale_sentences":[1],"label":"True"}
"#,
        );
        let examples = load_dataset(&m, "train").unwrap();
        assert_eq!(examples.len(), 1);
        assert_eq!(examples[0].rationale_sentences, BTreeSet::from([1]));
        assert!(examples[0].annotated);
        assert_eq!(examples[0].dataset, "demo");
    }

    #[test]
    fn rejects_out_of_range_rationale_index() {
        let (m, _dir) = manifest_with_file(
            r#"{"id":"a","question":"Q","passage":"S one. S two.","rationale_sentences":[5],"label":"True"}
"#,
        );
        let err = load_dataset(&m, "train").unwrap_err();
        assert!(matches!(
            err,
            CorpusError::RationaleIndexOutOfRange { index: 5, sentence_count: 2, .. }
        ));
    }

    #[test]
    fn rejects_unknown_label() {
        let (m, _dir) = manifest_with_file(
            r#"{"id":"a","question":"Q","passage":"One.","rationale_sentences":[0],"label":"Maybe"}
"#,
        );
        assert!(matches!(
            load_dataset(&m, "train").unwrap_err(),
            CorpusError::UnknownLabel { .. }
        ));
    }

    #[test]
    fn parse_error_carries_line_number() {
        let (m, _dir) = manifest_with_file(
            "{\"id\":\"a\",\"question\":\"Q\",\"passage\":\"One.\",\"rationale_sentences\":[0],\"label\":\"True\"}\nnot json\n",
        );
        assert!(matches!(
            load_dataset(&m, "train").unwrap_err(),
            CorpusError::ParseLine { line: 2, .. }
        ));
    }

    #[test]
    fn missing_rationale_means_unannotated() {
        let (m, _dir) = manifest_with_file(
            r#"{"id":"a","question":"Q","passage":"One.","label":"True"}
"#,
        );
        let examples = load_dataset(&m, "train").unwrap();
        assert!(!examples[0].annotated);
        assert!(examples[0].rationale_sentences.is_empty());
    }

    #[test]
    fn present_but_empty_rationale_is_rejected() {
        let (m, _dir) = manifest_with_file(
            r#"{"id":"a","question":"Q","passage":"One.","rationale_sentences":[],"label":"True"}
"#,
        );
        assert!(matches!(
            load_dataset(&m, "train").unwrap_err(),
            CorpusError::EmptyRationale { .. }
        ));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let (m, _dir) = manifest_with_file(
            r#"{"id":"a","question":"Q","passage":"One.","rationale_sentences":[0],"label":"True"}
{"id":"a","question":"Q","passage":"One.","rationale_sentences":[0],"label":"True"}
"#,
        );
        assert!(matches!(
            load_dataset(&m, "train").unwrap_err(),
            CorpusError::DuplicateId { .. }
        ));
    }

    #[test]
    fn round_trips_through_jsonl() {
        let (m, _dir) = manifest_with_file(
            r#"{"id":"a","question":"Q1","passage":"One. Two.","rationale_sentences":[0,1],"label":"True"}
{"id":"b","question":"Q2","passage":"Three.","label":"False"}
"#,
        );
        let examples = load_dataset(&m, "train").unwrap();
        let serialized = dataset_to_jsonl(&examples);
        let (m2, _dir2) = manifest_with_file(&serialized);
        let reloaded = load_dataset(&m2, "train").unwrap();
        assert_eq!(examples, reloaded);
    }

    #[test]
    fn phrase_spans_map_to_overlapping_sentences() {
        // "Good film. Bad plot." -- "Bad" occupies chars 11..14.
        let passage = "Good film. Bad plot.";
        let set = phrase_to_sentence(passage, &[11..14]).unwrap();
        assert_eq!(set, BTreeSet::from([1]));
    }

    #[test]
    fn empty_spans_give_empty_set() {
        assert!(phrase_to_sentence("Good film.", &[]).unwrap().is_empty());
    }

    #[test]
    fn span_straddling_boundary_maps_to_both_sentences() {
        let passage = "Good film. Bad plot.";
        // chars 5..14 covers "film. Bad".
        let set = phrase_to_sentence(passage, &[5..14]).unwrap();
        assert_eq!(set, BTreeSet::from([0, 1]));
    }

    #[test]
    fn out_of_bounds_span_is_rejected() {
        assert!(matches!(
            phrase_to_sentence("Good.", &[2..99]),
            Err(CorpusError::SpanOutOfBounds { .. })
        ));
        assert!(matches!(
            phrase_to_sentence("Good.", &[3..3]),
            Err(CorpusError::SpanOutOfBounds { .. })
        ));
    }

    fn synthetic_examples(n: usize) -> Vec<Quadruple> {
        (0..n)
            .map(|i| Quadruple {
                id: format!("ex{i}"),
                question: "Q".into(),
                passage: "One. Two.".into(),
                rationale_sentences: BTreeSet::from([0]),
                annotated: true,
                label: "True".into(),
                dataset: "demo".into(),
            })
            .collect()
    }

    #[test]
    fn subsample_identity_at_fraction_one() {
        let examples = synthetic_examples(10);
        assert_eq!(subsample_annotations(&examples, 1.0, 7).unwrap(), examples);
    }

    #[test]
    fn subsample_keeps_exactly_floor_n_fraction() {
        let examples = synthetic_examples(100);
        let out = subsample_annotations(&examples, 0.25, 7).unwrap();
        assert_eq!(out.iter().filter(|e| e.annotated).count(), 25);
        assert_eq!(out.len(), 100);
        for (a, b) in examples.iter().zip(&out) {
            assert_eq!(a.id, b.id, "order preserved");
        }
    }

    #[test]
    fn subsample_is_deterministic_per_seed() {
        let examples = synthetic_examples(40);
        let a = subsample_annotations(&examples, 0.5, 11).unwrap();
        let b = subsample_annotations(&examples, 0.5, 11).unwrap();
        assert_eq!(a, b);
        let c = subsample_annotations(&examples, 0.5, 12).unwrap();
        let kept = |v: &[Quadruple]| {
            v.iter()
                .filter(|e| e.annotated)
                .map(|e| e.id.clone())
                .collect::<Vec<_>>()
        };
        assert_ne!(kept(&a), kept(&c), "different seeds pick different subsets");
    }

    #[test]
    fn subsample_selection_is_order_invariant() {
        let examples = synthetic_examples(30);
        let mut reversed = examples.clone();
        reversed.reverse();
        let kept = |v: &[Quadruple]| {
            v.iter()
                .filter(|e| e.annotated)
                .map(|e| e.id.clone())
                .collect::<BTreeSet<_>>()
        };
        assert_eq!(
            kept(&subsample_annotations(&examples, 0.3, 5).unwrap()),
            kept(&subsample_annotations(&reversed, 0.3, 5).unwrap())
        );
    }

    #[test]
    fn subsample_rejects_bad_fraction() {
        let examples = synthetic_examples(2);
        assert!(subsample_annotations(&examples, 0.0, 1).is_err());
        assert!(subsample_annotations(&examples, 1.5, 1).is_err());
    }
}
