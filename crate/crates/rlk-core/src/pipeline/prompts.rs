//! Prompt templates and prompt assembly.
//!
//! Field order inside every prompt is fixed: template, question, rationale,
//! passage. Fields are joined by single newlines; multi-segment inputs are
//! joined by blank lines, each segment repeating the template + question
//! prefix. Backends that fuse segments may split on the blank line.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::textproc::FidSegments;

use super::PipelineError;

/// Decoder prefix used to mask the decision in the parallel baseline.
/// `<pad>` is transmitted verbatim; backends may substitute their own pad
/// token.
pub const DECISION_MASK_PREFIX: &str = "Answer: <pad> Explanation:";

/// The two discrete prompt templates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplates {
    pub t_rationale: String,
    pub t_answer: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        Self {
            t_rationale: "Extract the rationale from the passage to assess the claim".into(),
            t_answer: "Refer to the following information to judge the claim".into(),
        }
    }
}

impl PromptTemplates {
    /// Loads templates from a JSON document with fields `t_rationale` and
    /// `t_answer`.
    pub fn from_path(path: &Path) -> Result<Self, PipelineError> {
        let raw = std::fs::read_to_string(path).map_err(|e| {
            PipelineError::Config(format!("failed to read templates {}: {e}", path.display()))
        })?;
        let templates: PromptTemplates = serde_json::from_str(&raw).map_err(|e| {
            PipelineError::Config(format!("invalid templates {}: {e}", path.display()))
        })?;
        templates.validate()?;
        Ok(templates)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.t_rationale.is_empty() || self.t_answer.is_empty() {
            return Err(PipelineError::Config(
                "prompt templates must be non-empty".into(),
            ));
        }
        Ok(())
    }
}

/// The per-segment prefix for the self-attribution stage.
pub fn stage1_prefix(templates: &PromptTemplates, question: &str) -> String {
    format!("{}\n{}", templates.t_rationale, question)
}

/// The per-segment prefix for the parallel (decision-then-rationale) mode.
pub fn parallel_prefix(templates: &PromptTemplates, question: &str) -> String {
    format!("{}\n{}", templates.t_answer, question)
}

/// Joins per-segment inputs into the single wire prompt.
pub fn segmented_prompt(segments: &FidSegments) -> String {
    segments.segment_inputs().join("\n\n")
}

/// The decision-stage prompt. `rationale` and `passage` are included per
/// the decision input mode.
pub fn decision_prompt(
    templates: &PromptTemplates,
    question: &str,
    rationale: Option<&str>,
    passage: Option<&str>,
) -> String {
    let mut parts = vec![templates.t_answer.as_str(), question];
    if let Some(rationale) = rationale {
        parts.push(rationale);
    }
    if let Some(passage) = passage {
        parts.push(passage);
    }
    parts.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textproc::{build_fid_segments, mark_sentences, split_sentences, WhitespaceTokenizer};

    #[test]
    fn default_templates_are_non_empty() {
        assert!(PromptTemplates::default().validate().is_ok());
    }

    #[test]
    fn decision_prompt_field_order() {
        let t = PromptTemplates {
            t_rationale: "TR".into(),
            t_answer: "TA".into(),
        };
        assert_eq!(decision_prompt(&t, "Q", Some("R"), None), "TA\nQ\nR");
        assert_eq!(decision_prompt(&t, "Q", Some("R"), Some("P")), "TA\nQ\nR\nP");
        assert_eq!(decision_prompt(&t, "Q", None, Some("P")), "TA\nQ\nP");
    }

    #[test]
    fn segmented_prompt_repeats_prefix_per_segment() {
        let marked = mark_sentences(split_sentences("a b c. d e f.").unwrap());
        let prefix = "TR\nQ";
        let segments =
            build_fid_segments(prefix, &marked, &WhitespaceTokenizer, 9, 4).unwrap();
        assert_eq!(segments.segment_count(), 2);
        assert_eq!(
            segmented_prompt(&segments),
            "TR\nQ\nS1:a b c.\n\nTR\nQ\nS2:d e f."
        );
    }
}
