//! Rationale-quality and link-reliability metrics.
//!
//! Per-example scores (sentence-level IOU F1, token-level TF1) are macro
//! averaged over the scored examples. Link reliability partitions examples
//! into the four rationale-correct x decision-correct classes and derives
//! RSQ, RSQ-W, and RSQ-C from the counts.

mod matching;
mod score;

pub use matching::{longest_common_run, max_bipartite_matching};
pub use score::{score_predictions, ExampleScore, ScoredRun};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textproc::Tokenizer;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("threshold must be in (0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("record '{id}' has decision mode '{found}'; every record must have mode '{expected}'")]
    MixedDecisionMode {
        id: String,
        found: String,
        expected: String,
    },
    #[error("no records to score")]
    Empty,
    #[error("prediction '{id}' does not match any dataset example")]
    UnknownPredictionId { id: String },
    #[error("dataset example '{id}' has no prediction")]
    MissingPrediction { id: String },
    #[error("duplicate prediction id '{id}'")]
    DuplicatePrediction { id: String },
}

/// How two sentences are declared matching: the token-length of their
/// longest common contiguous run, divided by the union length, must exceed
/// `iou_threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentenceMatchConfig {
    pub iou_threshold: f64,
}

impl Default for SentenceMatchConfig {
    fn default() -> Self {
        Self { iou_threshold: 0.5 }
    }
}

/// Per-example precision/recall/F1 triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1Score {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl F1Score {
    fn from_matched(matched: usize, generated: usize, annotated: usize) -> Self {
        let precision = ratio_or_degenerate(matched, generated, annotated);
        let recall = ratio_or_degenerate(matched, annotated, generated);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            precision,
            recall,
            f1,
        }
    }
}

/// `matched / own`, with the degenerate rules: both sides empty is perfect,
/// an empty own side against a non-empty other side is zero.
fn ratio_or_degenerate(matched: usize, own: usize, other: usize) -> f64 {
    if own == 0 {
        if other == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        matched as f64 / own as f64
    }
}

/// Sentence-level overlap: matching size plus the derived scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentenceOverlap {
    pub matched: usize,
    pub score: F1Score,
}

/// Whether two sentences match under the LCS-over-union rule.
///
/// The intersection is the token-length of the longest common contiguous
/// token run; the union is `len(a) + len(b) - intersection`. Two empty
/// sentences never match.
pub fn sentence_match(
    a: &str,
    b: &str,
    tokenizer: &dyn Tokenizer,
    config: &SentenceMatchConfig,
) -> bool {
    let ta = tokenizer.token_texts(a);
    let tb = tokenizer.token_texts(b);
    let intersection = longest_common_run(&ta, &tb);
    let union = ta.len() + tb.len() - intersection;
    if union == 0 {
        return false;
    }
    intersection as f64 / union as f64 > config.iou_threshold
}

/// Sentence-level IOU scores for one example.
///
/// Matching between annotated and generated sentences is one-to-one and
/// maximal; each sentence participates in at most one match.
pub fn iou_f1(
    annotated: &[String],
    generated: &[String],
    tokenizer: &dyn Tokenizer,
    config: &SentenceMatchConfig,
) -> SentenceOverlap {
    let adjacency: Vec<Vec<bool>> = annotated
        .iter()
        .map(|a| {
            generated
                .iter()
                .map(|g| sentence_match(a, g, tokenizer, config))
                .collect()
        })
        .collect();
    let matched = max_bipartite_matching(&adjacency);
    SentenceOverlap {
        matched,
        score: F1Score::from_matched(matched, generated.len(), annotated.len()),
    }
}

/// The set of token texts of a string under the given tokenizer.
pub fn token_set(text: &str, tokenizer: &dyn Tokenizer) -> BTreeSet<String> {
    tokenizer.token_texts(text).into_iter().collect()
}

/// Token-level scores over the annotated (`q1`) and generated (`q2`) token
/// sets. Set semantics: duplicates and order never matter.
pub fn token_f1(q1: &BTreeSet<String>, q2: &BTreeSet<String>) -> F1Score {
    let matched = q1.intersection(q2).count();
    F1Score::from_matched(matched, q2.len(), q1.len())
}

/// The recall-threshold rule for rationale correctness: strictly greater
/// than the threshold, except at threshold 1.0 where exact cover counts.
pub fn recall_exceeds(recall: f64, threshold: f64) -> bool {
    if threshold >= 1.0 {
        recall >= threshold
    } else {
        recall > threshold
    }
}

/// Whether a generated rationale is correct: its sentence-level recall
/// against the annotated rationale exceeds `recall_threshold`.
pub fn rationale_correct(
    annotated: &[String],
    generated: &[String],
    recall_threshold: f64,
    tokenizer: &dyn Tokenizer,
    config: &SentenceMatchConfig,
) -> bool {
    let overlap = iou_f1(annotated, generated, tokenizer, config);
    recall_exceeds(overlap.score.recall, recall_threshold)
}

/// Counts of the four rationale-correct x decision-correct classes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkClassCounts {
    pub rc_dc: usize,
    pub rw_dw: usize,
    pub rc_dw: usize,
    pub rw_dc: usize,
}

impl LinkClassCounts {
    pub fn total(&self) -> usize {
        self.rc_dc + self.rw_dw + self.rc_dw + self.rw_dc
    }
}

/// Tallies `(rationale_correct, decision_correct)` pairs into the four
/// link classes.
pub fn classify_links(links: &[(bool, bool)]) -> LinkClassCounts {
    let mut counts = LinkClassCounts::default();
    for &(rationale_ok, decision_ok) in links {
        match (rationale_ok, decision_ok) {
            (true, true) => counts.rc_dc += 1,
            (false, false) => counts.rw_dw += 1,
            (true, false) => counts.rc_dw += 1,
            (false, true) => counts.rw_dc += 1,
        }
    }
    counts
}

/// Fraction of examples whose rationale and decision agree in correctness.
/// `None` when no examples were scored.
pub fn rsq(counts: &LinkClassCounts) -> Option<f64> {
    let total = counts.total();
    (total > 0).then(|| (counts.rc_dc + counts.rw_dw) as f64 / total as f64)
}

/// Fraction of wrong decisions among examples with a correct rationale.
/// `None` when no rationale was correct.
pub fn rsq_w(counts: &LinkClassCounts) -> Option<f64> {
    let denom = counts.rc_dc + counts.rc_dw;
    (denom > 0).then(|| counts.rc_dw as f64 / denom as f64)
}

/// Fraction of correct decisions among examples with a wrong rationale.
/// `None` when every rationale was correct.
pub fn rsq_c(counts: &LinkClassCounts) -> Option<f64> {
    let denom = counts.rw_dw + counts.rw_dc;
    (denom > 0).then(|| counts.rw_dc as f64 / denom as f64)
}

/// Accuracy of an externally trained judge over generated rationales:
/// `(predicted, gold)` label pairs. `None` on empty input.
pub fn r_acc(judge_decisions: &[(String, String)]) -> Option<f64> {
    if judge_decisions.is_empty() {
        return None;
    }
    let correct = judge_decisions.iter().filter(|(p, g)| p == g).count();
    Some(correct as f64 / judge_decisions.len() as f64)
}

/// One example's inputs to the threshold sweep: its fixed rationale recall
/// and whether its decision was correct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredLink {
    pub recall: f64,
    pub decision_correct: bool,
}

/// One row of a threshold sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub rationale_correct: usize,
    pub counts: LinkClassCounts,
    pub rsq: Option<f64>,
    pub rsq_w: Option<f64>,
    pub rsq_c: Option<f64>,
}

/// Recomputes the link classes and the RSQ family at each threshold.
pub fn threshold_sweep(
    links: &[ScoredLink],
    thresholds: &[f64],
) -> Result<Vec<SweepRow>, MetricsError> {
    for &t in thresholds {
        if !(t > 0.0 && t <= 1.0) {
            return Err(MetricsError::InvalidThreshold(t));
        }
    }
    Ok(thresholds
        .iter()
        .map(|&threshold| {
            let classified: Vec<(bool, bool)> = links
                .iter()
                .map(|l| (recall_exceeds(l.recall, threshold), l.decision_correct))
                .collect();
            let counts = classify_links(&classified);
            SweepRow {
                threshold,
                rationale_correct: counts.rc_dc + counts.rc_dw,
                rsq: rsq(&counts),
                rsq_w: rsq_w(&counts),
                rsq_c: rsq_c(&counts),
                counts,
            }
        })
        .collect())
}

/// Which recall feeds the rationale-correctness rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecallUnit {
    Sentence,
    Token,
}

/// Full metric configuration, echoed into every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub iou_threshold: f64,
    pub recall_threshold: f64,
    pub recall_unit: RecallUnit,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            iou_threshold: 0.5,
            recall_threshold: 0.5,
            recall_unit: RecallUnit::Sentence,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), MetricsError> {
        for t in [self.iou_threshold, self.recall_threshold] {
            if !(t > 0.0 && t <= 1.0) {
                return Err(MetricsError::InvalidThreshold(t));
            }
        }
        Ok(())
    }
}

/// Configuration echo carried inside a [`MetricReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub iou_threshold: f64,
    pub recall_threshold: f64,
    pub recall_unit: RecallUnit,
    pub tokenizer: String,
    pub scored_examples: usize,
    pub total_examples: usize,
}

/// All computed metrics plus the configuration that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub accuracy: f64,
    pub iou_f1: f64,
    pub tf1: f64,
    pub rsq: Option<f64>,
    pub rsq_w: Option<f64>,
    pub rsq_c: Option<f64>,
    pub rcp: Option<f64>,
    pub r_acc: Option<f64>,
    pub counts: LinkClassCounts,
    pub config: ReportConfig,
}
