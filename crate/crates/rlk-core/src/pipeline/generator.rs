//! Pluggable text-generation backends.
//!
//! Wire protocol (http kind): `POST <address>/generate` with JSON body
//! `{"prompt": string, "decoder_prefix": string|null, "max_tokens": integer}`;
//! the response is `{"text": string}`.
//!
//! The mock backend replays a JSONL table mapping `(example_id, stage)` to
//! canned text. Stage keys are `rationale`, `decision`, `parallel`, and
//! `parallel_masked` (a parallel-stage request carrying a decoder prefix).

use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Quadruple;
use crate::textproc::mark_labels;

use super::PipelineError;

/// Which pipeline step issued a request. Routing metadata for the mock
/// backend; never serialized onto the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Rationale,
    Decision,
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorRequest {
    pub example_id: String,
    pub stage: Stage,
    pub prompt: String,
    pub decoder_prefix: Option<String>,
    pub max_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorResponse {
    pub text: String,
}

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("backend protocol error: {0}")]
    Protocol(String),
    #[error("no mock entry for example '{example_id}' stage '{stage}'")]
    MissingMockEntry { example_id: String, stage: String },
}

impl GeneratorError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, GeneratorError::Transport(_))
    }
}

/// A deterministic-or-remote text generator.
pub trait Generator: Send + Sync {
    fn generate(&self, request: &GeneratorRequest) -> Result<GeneratorResponse, GeneratorError>;

    /// Whether the backend honors the `decoder_prefix` request field.
    fn supports_decoder_prefix(&self) -> bool {
        true
    }
}

/// Where generations come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndpointKind {
    /// Replay canned texts from a JSONL table.
    Mock { table: PathBuf },
    /// POST to `<address>/generate`.
    Http { address: String },
}

/// Backend selection plus request limits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorEndpoint {
    pub kind: EndpointKind,
    pub timeout: Duration,
    pub max_output_tokens: u32,
}

impl GeneratorEndpoint {
    pub fn build(&self) -> Result<Box<dyn Generator>, PipelineError> {
        match &self.kind {
            EndpointKind::Mock { table } => Ok(Box::new(MockGenerator::from_path(table)?)),
            EndpointKind::Http { address } => {
                Ok(Box::new(HttpGenerator::new(address, self.timeout)?))
            }
        }
    }
}

#[derive(Serialize)]
struct WireRequest<'a> {
    prompt: &'a str,
    decoder_prefix: Option<&'a str>,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct WireResponse {
    text: String,
}

/// HTTP backend speaking the `/generate` wire protocol.
pub struct HttpGenerator {
    client: reqwest::blocking::Client,
    url: String,
}

impl HttpGenerator {
    pub fn new(address: &str, timeout: Duration) -> Result<Self, PipelineError> {
        let base = address.trim_end_matches('/');
        let url = format!("{base}/generate");
        reqwest::Url::parse(&url)
            .map_err(|e| PipelineError::Endpoint(format!("invalid address '{address}': {e}")))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| PipelineError::Endpoint(e.to_string()))?;
        Ok(Self { client, url })
    }
}

impl Generator for HttpGenerator {
    fn generate(&self, request: &GeneratorRequest) -> Result<GeneratorResponse, GeneratorError> {
        let body = WireRequest {
            prompt: &request.prompt,
            decoder_prefix: request.decoder_prefix.as_deref(),
            max_tokens: request.max_tokens,
        };
        let response = self
            .client
            .post(&self.url)
            .json(&body)
            .send()
            .map_err(|e| GeneratorError::Transport(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            return Err(GeneratorError::Protocol(format!(
                "{} returned status {status}",
                self.url
            )));
        }
        let parsed: WireResponse = response
            .json()
            .map_err(|e| GeneratorError::Protocol(format!("malformed response body: {e}")))?;
        Ok(GeneratorResponse { text: parsed.text })
    }
}

/// One line of a mock table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockEntry {
    pub example_id: String,
    pub stage: String,
    pub text: String,
}

/// Table-driven deterministic backend with a request log.
pub struct MockGenerator {
    entries: HashMap<(String, String), String>,
    log: Mutex<Vec<GeneratorRequest>>,
}

impl MockGenerator {
    pub fn from_path(path: &Path) -> Result<Self, PipelineError> {
        let file = std::fs::File::open(path).map_err(|source| PipelineError::MockIo {
            path: path.display().to_string(),
            source,
        })?;
        let mut entries = Vec::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| PipelineError::MockIo {
                path: path.display().to_string(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: MockEntry =
                serde_json::from_str(&line).map_err(|source| PipelineError::MockParse {
                    path: path.display().to_string(),
                    line: lineno + 1,
                    source,
                })?;
            entries.push(entry);
        }
        Ok(Self::from_entries(entries))
    }

    pub fn from_entries(entries: Vec<MockEntry>) -> Self {
        Self {
            entries: entries
                .into_iter()
                .map(|e| ((e.example_id, e.stage), e.text))
                .collect(),
            log: Mutex::new(Vec::new()),
        }
    }

    /// Every request this generator has served, in arrival order.
    pub fn request_log(&self) -> Vec<GeneratorRequest> {
        self.log.lock().expect("log lock").clone()
    }

    fn stage_key(request: &GeneratorRequest) -> &'static str {
        match (request.stage, request.decoder_prefix.is_some()) {
            (Stage::Rationale, _) => "rationale",
            (Stage::Decision, _) => "decision",
            (Stage::Parallel, false) => "parallel",
            (Stage::Parallel, true) => "parallel_masked",
        }
    }
}

impl Generator for MockGenerator {
    fn generate(&self, request: &GeneratorRequest) -> Result<GeneratorResponse, GeneratorError> {
        self.log.lock().expect("log lock").push(request.clone());
        let stage = Self::stage_key(request);
        let key = (request.example_id.clone(), stage.to_owned());
        match self.entries.get(&key) {
            Some(text) => Ok(GeneratorResponse { text: text.clone() }),
            None => Err(GeneratorError::MissingMockEntry {
                example_id: request.example_id.clone(),
                stage: stage.to_owned(),
            }),
        }
    }
}

/// Serializes mock entries as a JSONL table.
pub fn mock_table_to_jsonl(entries: &[MockEntry]) -> String {
    let mut out = String::new();
    for entry in entries {
        out.push_str(&serde_json::to_string(entry).expect("entry serializes"));
        out.push('\n');
    }
    out
}

/// Mock entries that answer every stage perfectly: annotated sentence marks
/// and the gold label. Closes the pipeline-metrics loop at known-perfect
/// scores.
pub fn oracle_mock_entries(dataset: &[Quadruple]) -> Vec<MockEntry> {
    dataset
        .iter()
        .flat_map(|example| {
            let marks = mark_labels(&example.rationale_sentences);
            [
                MockEntry {
                    example_id: example.id.clone(),
                    stage: "rationale".into(),
                    text: marks.clone(),
                },
                MockEntry {
                    example_id: example.id.clone(),
                    stage: "decision".into(),
                    text: example.label.clone(),
                },
                MockEntry {
                    example_id: example.id.clone(),
                    stage: "parallel".into(),
                    text: format!("{} {marks}", example.label),
                },
                MockEntry {
                    example_id: example.id.clone(),
                    stage: "parallel_masked".into(),
                    text: marks,
                },
            ]
        })
        .collect()
}

/// Mock entries that answer with wrong rationale indices but the gold
/// label: every scored example lands in the wrong-rationale/correct-decision
/// class. The wrong indices point at unannotated sentences when any exist,
/// otherwise out of range.
pub fn adversarial_mock_entries(dataset: &[Quadruple]) -> Vec<MockEntry> {
    dataset
        .iter()
        .flat_map(|example| {
            let sentence_count = crate::textproc::split_sentences(&example.passage)
                .map(|s| s.len())
                .unwrap_or(0);
            let complement: std::collections::BTreeSet<usize> = (0..sentence_count)
                .filter(|i| !example.rationale_sentences.contains(i))
                .collect();
            let marks = if complement.is_empty() {
                format!("S{}", sentence_count + 1)
            } else {
                mark_labels(&complement)
            };
            [
                MockEntry {
                    example_id: example.id.clone(),
                    stage: "rationale".into(),
                    text: marks.clone(),
                },
                MockEntry {
                    example_id: example.id.clone(),
                    stage: "decision".into(),
                    text: example.label.clone(),
                },
                MockEntry {
                    example_id: example.id.clone(),
                    stage: "parallel".into(),
                    text: format!("{} {marks}", example.label),
                },
                MockEntry {
                    example_id: example.id.clone(),
                    stage: "parallel_masked".into(),
                    text: marks,
                },
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(id: &str, stage: Stage, prefix: Option<&str>) -> GeneratorRequest {
        GeneratorRequest {
            example_id: id.into(),
            stage,
            prompt: "p".into(),
            decoder_prefix: prefix.map(str::to_owned),
            max_tokens: 16,
        }
    }

    #[test]
    fn mock_routes_by_example_and_stage() {
        let mock = MockGenerator::from_entries(vec![
            MockEntry { example_id: "a".into(), stage: "rationale".into(), text: "S1".into() },
            MockEntry { example_id: "a".into(), stage: "decision".into(), text: "True".into() },
        ]);
        assert_eq!(
            mock.generate(&request("a", Stage::Rationale, None)).unwrap().text,
            "S1"
        );
        assert_eq!(
            mock.generate(&request("a", Stage::Decision, None)).unwrap().text,
            "True"
        );
    }

    #[test]
    fn mock_distinguishes_masked_parallel_by_decoder_prefix() {
        let mock = MockGenerator::from_entries(vec![
            MockEntry { example_id: "a".into(), stage: "parallel".into(), text: "True S1".into() },
            MockEntry { example_id: "a".into(), stage: "parallel_masked".into(), text: "S2".into() },
        ]);
        assert_eq!(
            mock.generate(&request("a", Stage::Parallel, None)).unwrap().text,
            "True S1"
        );
        assert_eq!(
            mock.generate(&request("a", Stage::Parallel, Some("Answer: <pad> Explanation:")))
                .unwrap()
                .text,
            "S2"
        );
    }

    #[test]
    fn mock_missing_entry_is_an_error() {
        let mock = MockGenerator::from_entries(vec![]);
        let err = mock.generate(&request("a", Stage::Decision, None)).unwrap_err();
        assert!(matches!(err, GeneratorError::MissingMockEntry { .. }));
        assert!(!err.is_retryable());
    }

    #[test]
    fn mock_logs_requests_in_order() {
        let mock = MockGenerator::from_entries(vec![MockEntry {
            example_id: "a".into(),
            stage: "decision".into(),
            text: "True".into(),
        }]);
        let _ = mock.generate(&request("a", Stage::Decision, None));
        let _ = mock.generate(&request("b", Stage::Decision, None));
        let log = mock.request_log();
        assert_eq!(log.len(), 2);
        assert_eq!(log[0].example_id, "a");
        assert_eq!(log[1].example_id, "b");
    }

    #[test]
    fn http_generator_rejects_bad_address() {
        assert!(HttpGenerator::new("not a url", Duration::from_secs(1)).is_err());
    }

    #[test]
    fn mock_table_round_trips_through_jsonl() {
        let entries = vec![MockEntry {
            example_id: "a".into(),
            stage: "rationale".into(),
            text: "S1 S2".into(),
        }];
        let jsonl = mock_table_to_jsonl(&entries);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mock.jsonl");
        std::fs::write(&path, jsonl).unwrap();
        let mock = MockGenerator::from_path(&path).unwrap();
        assert_eq!(
            mock.generate(&request("a", Stage::Rationale, None)).unwrap().text,
            "S1 S2"
        );
    }
}
