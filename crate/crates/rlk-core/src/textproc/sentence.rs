//! Rule-based sentence segmentation with stable character ranges.
//!
//! A sentence ends at a run of terminator characters (`.` `!` `?`) followed
//! by whitespace or end of input. A single `.` does not end a sentence when
//! the word it closes is on the abbreviation guard list.

use std::ops::Range;

use super::TextprocError;

/// Lowercased abbreviations whose trailing period never ends a sentence.
const ABBREVIATIONS: &[&str] = &[
    "dr.", "mr.", "mrs.", "ms.", "prof.", "sr.", "jr.", "st.", "no.", "vs.", "etc.", "e.g.",
    "i.e.", "cf.", "al.", "fig.", "eq.", "approx.", "dept.", "inc.", "ltd.", "co.",
];

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// One sentence with its half-open `char` range into the source passage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    /// 0-based position in the passage.
    pub index: usize,
    /// Sentence text with surrounding whitespace trimmed.
    pub text: String,
    /// Half-open range of `char` offsets into the source passage.
    pub char_range: Range<usize>,
}

/// An ordered sentence segmentation of a passage.
///
/// Character ranges are measured in `char`s, are non-overlapping, ordered,
/// and jointly cover every non-whitespace character of the source; indices
/// are consecutive from 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceList {
    sentences: Vec<Sentence>,
}

impl SentenceList {
    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Sentence> {
        self.sentences.get(index)
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.sentences.iter().map(|s| s.text.as_str())
    }
}

/// Splits a passage into sentences.
///
/// Deterministic and rule-based; returns an error when the passage has no
/// non-whitespace content.
pub fn split_sentences(passage: &str) -> Result<SentenceList, TextprocError> {
    let chars: Vec<char> = passage.chars().collect();
    let n = chars.len();
    let mut sentences = Vec::new();
    let mut cursor = 0usize;

    while cursor < n {
        while cursor < n && chars[cursor].is_whitespace() {
            cursor += 1;
        }
        if cursor >= n {
            break;
        }
        let start = cursor;
        let end = find_sentence_end(&chars, start);

        // Trim trailing whitespace (only possible when the sentence runs to
        // end of input without a terminator).
        let mut trimmed_end = end;
        while trimmed_end > start && chars[trimmed_end - 1].is_whitespace() {
            trimmed_end -= 1;
        }
        if trimmed_end > start {
            sentences.push(Sentence {
                index: sentences.len(),
                text: chars[start..trimmed_end].iter().collect(),
                char_range: start..trimmed_end,
            });
        }
        cursor = end;
    }

    if sentences.is_empty() {
        return Err(TextprocError::EmptyPassage);
    }
    Ok(SentenceList { sentences })
}

/// Returns the exclusive char index one past the terminator run that ends
/// the sentence starting at `start`, or the end of input.
fn find_sentence_end(chars: &[char], start: usize) -> usize {
    let n = chars.len();
    let mut i = start;
    while i < n {
        if !is_terminator(chars[i]) {
            i += 1;
            continue;
        }
        let run_start = i;
        let mut run_end = i;
        while run_end + 1 < n && is_terminator(chars[run_end + 1]) {
            run_end += 1;
        }
        let at_input_end = run_end + 1 >= n;
        let followed_by_ws = !at_input_end && chars[run_end + 1].is_whitespace();
        if (at_input_end || followed_by_ws) && !guards_abbreviation(chars, run_start, run_end) {
            return run_end + 1;
        }
        i = run_end + 1;
    }
    n
}

/// True when the terminator run is a lone `.` closing a guarded abbreviation.
fn guards_abbreviation(chars: &[char], run_start: usize, run_end: usize) -> bool {
    if run_start != run_end || chars[run_start] != '.' {
        return false;
    }
    let mut token_start = run_start;
    while token_start > 0 {
        let prev = chars[token_start - 1];
        if prev.is_alphanumeric() || prev == '.' {
            token_start -= 1;
        } else {
            break;
        }
    }
    if token_start == run_start {
        return false; // bare period, no word attached
    }
    let token: String = chars[token_start..=run_start]
        .iter()
        .collect::<String>()
        .to_lowercase();
    ABBREVIATIONS.contains(&token.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(passage: &str) -> Vec<String> {
        split_sentences(passage)
            .unwrap()
            .texts()
            .map(str::to_owned)
            .collect()
    }

    #[test]
    fn two_terminated_sentences() {
        assert_eq!(texts("One. Two."), vec!["One.", "Two."]);
    }

    #[test]
    fn no_terminator_is_one_sentence() {
        assert_eq!(texts("No terminator"), vec!["No terminator"]);
    }

    #[test]
    fn abbreviation_guard_keeps_title_attached() {
        assert_eq!(texts("Dr. Smith won. He smiled."), vec!["Dr. Smith won.", "He smiled."]);
    }

    #[test]
    fn empty_passage_is_an_error() {
        assert!(matches!(split_sentences(""), Err(TextprocError::EmptyPassage)));
        assert!(matches!(split_sentences("   \n "), Err(TextprocError::EmptyPassage)));
    }

    #[test]
    fn exclamation_and_question_terminate() {
        assert_eq!(texts("Really?! Yes. Fine"), vec!["Really?!", "Yes.", "Fine"]);
    }

    #[test]
    fn decimal_point_does_not_split() {
        assert_eq!(texts("Pi is 3.14 roughly. True."), vec!["Pi is 3.14 roughly.", "True."]);
    }

    #[test]
    fn ranges_cover_non_whitespace() {
        let passage = "  One.   Two here.  ";
        let list = split_sentences(passage).unwrap();
        let chars: Vec<char> = passage.chars().collect();
        let mut covered = vec![false; chars.len()];
        for s in list.sentences() {
            for i in s.char_range.clone() {
                assert!(!covered[i], "overlapping ranges at {i}");
                covered[i] = true;
            }
        }
        for (i, c) in chars.iter().enumerate() {
            if !c.is_whitespace() {
                assert!(covered[i], "char {i} ({c:?}) not covered");
            }
        }
    }

    #[test]
    fn indices_are_consecutive() {
        let list = split_sentences("A one. B two. C three.").unwrap();
        let indices: Vec<usize> = list.sentences().iter().map(|s| s.index).collect();
        assert_eq!(indices, vec![0, 1, 2]);
    }

    #[test]
    fn range_text_matches_sentence_text() {
        let passage = "Alpha beta. Gamma delta!  Tail";
        let chars: Vec<char> = passage.chars().collect();
        for s in split_sentences(passage).unwrap().sentences() {
            let from_range: String = chars[s.char_range.clone()].iter().collect();
            assert_eq!(from_range, s.text);
        }
    }
}
