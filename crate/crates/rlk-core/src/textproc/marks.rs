//! Sentence marks: rendering, stripping, parsing, and index resolution.
//!
//! Sentence `i` (0-based) carries the mark `S{i+1}:` in rendered text and
//! the bare label `S{i+1}` in generation targets and generator output.

use std::collections::BTreeSet;

use super::sentence::SentenceList;

/// A passage rendered with 1-based sentence marks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedPassage {
    source: SentenceList,
    rendered: String,
}

impl MarkedPassage {
    pub fn source(&self) -> &SentenceList {
        &self.source
    }

    /// The marked text: sentences prefixed `S1:`, `S2:`, ... joined by
    /// single spaces.
    pub fn rendered(&self) -> &str {
        &self.rendered
    }

    /// Sentence `index` (0-based) rendered with its mark, e.g. `S3:text`.
    pub fn marked_sentence(&self, index: usize) -> Option<String> {
        self.source
            .get(index)
            .map(|s| format!("S{}:{}", index + 1, s.text))
    }
}

/// Prefixes each sentence with its 1-based mark.
pub fn mark_sentences(source: SentenceList) -> MarkedPassage {
    let rendered = source
        .sentences()
        .iter()
        .map(|s| format!("S{}:{}", s.index + 1, s.text))
        .collect::<Vec<_>>()
        .join(" ");
    MarkedPassage { source, rendered }
}

/// Renders a set of 0-based sentence indices as space-joined 1-based mark
/// labels in ascending order, e.g. `{0, 2}` -> `"S1 S3"`.
pub fn mark_labels(indices: &BTreeSet<usize>) -> String {
    indices
        .iter()
        .map(|i| format!("S{}", i + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Removes `S<digits>:` marks that sit at the start of the text or right
/// after whitespace. Inverse of [`mark_sentences`] on rendered passages.
pub fn strip_marks(rendered: &str) -> String {
    let chars: Vec<char> = rendered.chars().collect();
    let n = chars.len();
    let mut out = String::with_capacity(rendered.len());
    let mut i = 0usize;
    let mut at_boundary = true;
    while i < n {
        if at_boundary && chars[i] == 'S' {
            let mut j = i + 1;
            while j < n && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j > i + 1 && j < n && chars[j] == ':' {
                i = j + 1;
                at_boundary = false;
                continue;
            }
        }
        at_boundary = chars[i].is_whitespace();
        out.push(chars[i]);
        i += 1;
    }
    out
}

/// Extracts 1-based sentence indices from generator output.
///
/// A mark is an `S` followed by one or more digits, delimited by
/// non-alphanumeric characters on both sides. Results are deduplicated and
/// sorted ascending; values that overflow are ignored.
pub fn parse_sentence_marks(output: &str) -> Vec<usize> {
    scan_marks(output)
        .into_iter()
        .map(|(_, value)| value)
        .collect::<BTreeSet<usize>>()
        .into_iter()
        .collect()
}

/// Byte offset of the first mark in the output, if any.
pub(crate) fn first_mark_offset(output: &str) -> Option<usize> {
    scan_marks(output).first().map(|(offset, _)| *offset)
}

/// All `(byte_offset, 1-based index)` marks in order of appearance.
fn scan_marks(output: &str) -> Vec<(usize, usize)> {
    let mut marks = Vec::new();
    let mut prev_alnum = false;
    let mut iter = output.char_indices().peekable();
    while let Some((offset, c)) = iter.next() {
        if c == 'S' && !prev_alnum {
            let mut digits = String::new();
            let mut lookahead = iter.clone();
            while let Some((_, d)) = lookahead.peek() {
                if d.is_ascii_digit() {
                    digits.push(*d);
                    lookahead.next();
                } else {
                    break;
                }
            }
            let delimited = match lookahead.peek() {
                None => true,
                Some((_, next)) => !next.is_alphanumeric(),
            };
            if !digits.is_empty() && delimited {
                if let Ok(value) = digits.parse::<usize>() {
                    marks.push((offset, value));
                }
                iter = lookahead;
                prev_alnum = true; // digits end the token
                continue;
            }
        }
        prev_alnum = c.is_alphanumeric();
    }
    marks
}

/// Rationale text and sentence set recovered from generated indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResolvedRationale {
    /// Sentence texts joined in passage order with single spaces.
    pub text: String,
    /// 0-based indices of the resolved sentences.
    pub sentence_indices: BTreeSet<usize>,
    /// Count of generated index occurrences that were out of range.
    pub dropped: usize,
}

/// Maps 1-based generated indices back onto passage sentences.
///
/// Valid indices are deduplicated and resolved in passage order; 0 and
/// out-of-range values are dropped and counted, never errors.
pub fn resolve_indices(marked: &MarkedPassage, indices: &[usize]) -> ResolvedRationale {
    let count = marked.source().len();
    let mut resolved = BTreeSet::new();
    let mut dropped = 0usize;
    for &idx in indices {
        if idx >= 1 && idx <= count {
            resolved.insert(idx - 1);
        } else {
            dropped += 1;
        }
    }
    let text = resolved
        .iter()
        .filter_map(|&i| marked.source().get(i))
        .map(|s| s.text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    ResolvedRationale {
        text,
        sentence_indices: resolved,
        dropped,
    }
}
