//! Greedy packing of marked sentences into token-budgeted segments.
//!
//! Long passages are split into at most `segment_count` segments, each
//! carrying the question prefix; every segment input must fit the token
//! budget under the configured tokenizer.

use std::ops::Range;

use super::marks::MarkedPassage;
use super::tokenizer::Tokenizer;
use super::TextprocError;

/// Marked-sentence segments produced by [`build_fid_segments`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FidSegments {
    /// Segment bodies: consecutive marked sentences joined by single spaces.
    pub segments: Vec<String>,
    /// 0-based sentence index range packed into each segment.
    pub sentence_ranges: Vec<Range<usize>>,
    /// Prefix (template + question) combined with each segment.
    pub question_prefix: String,
    /// Configured segment cap `C`; `segments.len() <= max_segments`.
    pub max_segments: usize,
    /// Token budget per segment, prefix included.
    pub max_tokens_per_segment: usize,
    /// Set iff any passage content was dropped or cut mid-sentence.
    pub truncated: bool,
    /// Number of sentences with at least some text retained.
    pub sentences_retained: usize,
}

impl FidSegments {
    /// Full per-segment inputs: `prefix\nbody` (or just the body when the
    /// prefix is empty). These are the strings the token budget applies to.
    pub fn segment_inputs(&self) -> Vec<String> {
        self.segments
            .iter()
            .map(|body| compose(&self.question_prefix, body))
            .collect()
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }
}

fn compose(prefix: &str, body: &str) -> String {
    if prefix.is_empty() {
        body.to_owned()
    } else {
        format!("{prefix}\n{body}")
    }
}

/// Packs marked sentences greedily, in order, into at most `segment_count`
/// segments of at most `max_tokens` tokens each (prefix included).
///
/// Sentences are never split across segments; a sentence that alone exceeds
/// the budget is token-truncated inside its own segment. Content beyond
/// `segment_count` budgets is dropped. Any cut or drop sets `truncated`.
pub fn build_fid_segments(
    question_prefix: &str,
    marked: &MarkedPassage,
    tokenizer: &dyn Tokenizer,
    max_tokens: usize,
    segment_count: usize,
) -> Result<FidSegments, TextprocError> {
    if segment_count == 0 {
        return Err(TextprocError::ZeroSegments);
    }
    let prefix_tokens = tokenizer.token_count(question_prefix);
    if prefix_tokens >= max_tokens {
        return Err(TextprocError::BudgetTooSmall {
            prefix_tokens,
            max_tokens,
        });
    }

    let fits = |body: &str| tokenizer.token_count(&compose(question_prefix, body)) <= max_tokens;

    let total = marked.source().len();
    let mut bodies: Vec<String> = Vec::new();
    let mut ranges: Vec<Range<usize>> = Vec::new();
    let mut current = String::new();
    let mut current_range = 0..0;
    let mut truncated = false;
    let mut i = 0usize;

    while i < total {
        let sentence = marked.marked_sentence(i).expect("index within source");
        let candidate = if current.is_empty() {
            sentence.clone()
        } else {
            format!("{current} {sentence}")
        };
        if fits(&candidate) {
            current = candidate;
            current_range.end = i + 1;
            i += 1;
            continue;
        }
        if current.is_empty() {
            // A single sentence over budget: cut it to the longest token
            // prefix that fits and give it the whole segment.
            match longest_fitting_prefix(&sentence, &fits, tokenizer) {
                Some(cut) => {
                    truncated = true;
                    bodies.push(cut);
                    ranges.push(i..i + 1);
                }
                None => {
                    // Not even one token fits next to the prefix; stop here.
                    truncated = true;
                    break;
                }
            }
            i += 1;
            current_range = i..i;
            if bodies.len() == segment_count {
                break;
            }
        } else {
            bodies.push(std::mem::take(&mut current));
            ranges.push(current_range.clone());
            current_range = i..i;
            if bodies.len() == segment_count {
                break;
            }
        }
    }
    if !current.is_empty() {
        bodies.push(current);
        ranges.push(current_range);
    }

    let retained = ranges.last().map(|r| r.end).unwrap_or(0);
    if retained < total {
        truncated = true;
    }

    Ok(FidSegments {
        segments: bodies,
        sentence_ranges: ranges,
        question_prefix: question_prefix.to_owned(),
        max_segments: segment_count,
        max_tokens_per_segment: max_tokens,
        truncated,
        sentences_retained: retained,
    })
}

/// Longest prefix of `sentence`, cut at a token boundary, whose composed
/// segment input fits the budget. `None` when not even one token fits.
fn longest_fitting_prefix(
    sentence: &str,
    fits: &dyn Fn(&str) -> bool,
    tokenizer: &dyn Tokenizer,
) -> Option<String> {
    let tokens = tokenizer.tokenize(sentence);
    let chars: Vec<char> = sentence.chars().collect();
    let cut_at = |token_count: usize| -> String {
        let end = tokens[token_count - 1].char_range.end;
        chars[..end].iter().collect()
    };
    // Token-prefix length vs. fitting is monotone for any sane tokenizer.
    let (mut lo, mut hi) = (0usize, tokens.len());
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if fits(&cut_at(mid)) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    (lo > 0).then(|| cut_at(lo))
}
