//! Deterministic text processing: sentence segmentation, tokenization,
//! sentence marks, and token-budgeted segment packing.
//!
//! Everything in this module is a pure function over immutable inputs;
//! equal inputs give byte-equal outputs.

mod fid;
mod marks;
mod sentence;
mod tokenizer;

pub use fid::{build_fid_segments, FidSegments};
pub use marks::{
    mark_labels, mark_sentences, parse_sentence_marks, resolve_indices, strip_marks,
    MarkedPassage, ResolvedRationale,
};
pub use sentence::{split_sentences, Sentence, SentenceList};
pub use tokenizer::{tokenizer_from_spec, Token, Tokenizer, VocabTokenizer, WhitespaceTokenizer};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextprocError {
    #[error("passage contains no sentence content")]
    EmptyPassage,
    #[error("segment count must be at least 1")]
    ZeroSegments,
    #[error("token budget {max_tokens} cannot hold the question prefix ({prefix_tokens} tokens)")]
    BudgetTooSmall {
        prefix_tokens: usize,
        max_tokens: usize,
    },
    #[error("unknown tokenizer spec '{0}'; expected \"whitespace\" or \"vocab:<path>\"")]
    UnknownTokenizer(String),
    #[error("failed to read vocabulary {path}: {source}")]
    VocabIo {
        path: String,
        source: std::io::Error,
    },
    #[error("vocabulary {path} line {line}: token contains whitespace")]
    VocabEntry { path: String, line: usize },
}
