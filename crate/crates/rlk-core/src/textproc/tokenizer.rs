//! Pluggable deterministic tokenizers.
//!
//! The default splits on whitespace and punctuation. A vocabulary-driven
//! subword tokenizer (one token per line, longest-match-first greedy
//! segmentation) can be selected with `--tokenizer vocab:<path>`.

use std::collections::HashSet;
use std::ops::Range;
use std::path::Path;

use super::TextprocError;

/// A token with its half-open `char` range into the source string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub char_range: Range<usize>,
}

/// Deterministic mapping from a string to an ordered token list with
/// character offsets. Offsets are within the source and non-overlapping.
pub trait Tokenizer: Send + Sync {
    fn id(&self) -> &str;

    fn tokenize(&self, text: &str) -> Vec<Token>;

    fn token_count(&self, text: &str) -> usize {
        self.tokenize(text).len()
    }

    fn token_texts(&self, text: &str) -> Vec<String> {
        self.tokenize(text).into_iter().map(|t| t.text).collect()
    }
}

/// Whitespace + punctuation tokenizer: alphanumeric runs are tokens and
/// every other non-whitespace character is a token of its own.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceTokenizer;

impl Tokenizer for WhitespaceTokenizer {
    fn id(&self) -> &str {
        "whitespace"
    }

    fn tokenize(&self, text: &str) -> Vec<Token> {
        let mut tokens = Vec::new();
        let mut run_start: Option<usize> = None;
        let mut buf = String::new();

        for (i, c) in text.chars().enumerate() {
            if c.is_alphanumeric() {
                if run_start.is_none() {
                    run_start = Some(i);
                }
                buf.push(c);
                continue;
            }
            if let Some(start) = run_start.take() {
                tokens.push(Token {
                    text: std::mem::take(&mut buf),
                    char_range: start..i,
                });
            }
            if !c.is_whitespace() {
                tokens.push(Token {
                    text: c.to_string(),
                    char_range: i..i + 1,
                });
            }
        }
        if let Some(start) = run_start {
            let end = start + buf.chars().count();
            tokens.push(Token {
                text: buf,
                char_range: start..end,
            });
        }
        tokens
    }
}

/// Greedy longest-match-first segmentation against a fixed vocabulary.
///
/// Whitespace separates tokens and is never part of one; characters not
/// covered by any vocabulary entry become single-character tokens.
#[derive(Debug, Clone)]
pub struct VocabTokenizer {
    id: String,
    entries: HashSet<String>,
    max_entry_chars: usize,
}

impl VocabTokenizer {
    /// Loads a vocabulary file: UTF-8, one token per line, blank lines
    /// ignored. Entries containing whitespace are rejected.
    pub fn from_path(path: &Path) -> Result<Self, TextprocError> {
        let raw = std::fs::read_to_string(path).map_err(|source| TextprocError::VocabIo {
            path: path.display().to_string(),
            source,
        })?;
        let mut entries = Vec::new();
        for (lineno, line) in raw.lines().enumerate() {
            let token = line.trim_end_matches(['\r', '\n']);
            if token.is_empty() {
                continue;
            }
            if token.chars().any(char::is_whitespace) {
                return Err(TextprocError::VocabEntry {
                    path: path.display().to_string(),
                    line: lineno + 1,
                });
            }
            entries.push(token.to_owned());
        }
        let stem = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Ok(Self::from_entries(format!("vocab:{stem}"), entries))
    }

    pub fn from_entries(id: String, entries: Vec<String>) -> Self {
        let max_entry_chars = entries.iter().map(|e| e.chars().count()).max().unwrap_or(0);
        Self {
            id,
            entries: entries.into_iter().collect(),
            max_entry_chars,
        }
    }
}

impl Tokenizer for VocabTokenizer {
    fn id(&self) -> &str {
        &self.id
    }

    fn tokenize(&self, text: &str) -> Vec<Token> {
        let chars: Vec<char> = text.chars().collect();
        let n = chars.len();
        let mut tokens = Vec::new();
        let mut i = 0usize;
        while i < n {
            if chars[i].is_whitespace() {
                i += 1;
                continue;
            }
            // Candidates never span whitespace.
            let mut limit = 0usize;
            while i + limit < n && limit < self.max_entry_chars && !chars[i + limit].is_whitespace()
            {
                limit += 1;
            }
            let mut matched = 0usize;
            for len in (1..=limit).rev() {
                let candidate: String = chars[i..i + len].iter().collect();
                if self.entries.contains(&candidate) {
                    matched = len;
                    tokens.push(Token {
                        text: candidate,
                        char_range: i..i + len,
                    });
                    break;
                }
            }
            if matched == 0 {
                tokens.push(Token {
                    text: chars[i].to_string(),
                    char_range: i..i + 1,
                });
                matched = 1;
            }
            i += matched;
        }
        tokens
    }
}

/// Builds a tokenizer from a CLI spec: `whitespace` or `vocab:<path>`.
pub fn tokenizer_from_spec(spec: &str) -> Result<Box<dyn Tokenizer>, TextprocError> {
    if spec == "whitespace" {
        return Ok(Box::new(WhitespaceTokenizer));
    }
    if let Some(path) = spec.strip_prefix("vocab:") {
        return Ok(Box::new(VocabTokenizer::from_path(Path::new(path))?));
    }
    Err(TextprocError::UnknownTokenizer(spec.to_owned()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitespace_splits_words_and_punctuation() {
        let toks = WhitespaceTokenizer.token_texts("S1:Hello, world!");
        assert_eq!(toks, vec!["S1", ":", "Hello", ",", "world", "!"]);
    }

    #[test]
    fn whitespace_offsets_are_char_ranges() {
        let text = "ab  cd.";
        let toks = WhitespaceTokenizer.tokenize(text);
        let chars: Vec<char> = text.chars().collect();
        for t in &toks {
            let slice: String = chars[t.char_range.clone()].iter().collect();
            assert_eq!(slice, t.text);
        }
        assert_eq!(toks.len(), 3);
    }

    #[test]
    fn whitespace_empty_input() {
        assert!(WhitespaceTokenizer.tokenize("").is_empty());
        assert!(WhitespaceTokenizer.tokenize("   ").is_empty());
    }

    #[test]
    fn vocab_longest_match_first() {
        let tok = VocabTokenizer::from_entries(
            "vocab:test".into(),
            vec!["un".into(), "unbelievable".into(), "believ".into(), "able".into()],
        );
        let texts = tok.token_texts("unbelievable unable");
        assert_eq!(texts, vec!["unbelievable", "un", "able"]);
    }

    #[test]
    fn vocab_unknown_chars_become_single_tokens() {
        let tok = VocabTokenizer::from_entries("vocab:test".into(), vec!["ab".into()]);
        let texts = tok.token_texts("abx");
        assert_eq!(texts, vec!["ab", "x"]);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(tokenizer_from_spec("whitespace").unwrap().id(), "whitespace");
        assert!(matches!(
            tokenizer_from_spec("bogus"),
            Err(TextprocError::UnknownTokenizer(_))
        ));
    }
}
