//! Core library for the rationale-link toolkit (`rlk`).
//!
//! The toolkit runs a two-stage generate-rationale-then-decide protocol
//! against a pluggable text generator and measures how reliably the
//! generated rationale and the final decision hang together.
//!
//! Modules:
//! - [`corpus`]: canonical quadruple datasets (question, passage, rationale, label).
//! - [`textproc`]: sentence splitting, tokenization, sentence marks, segment packing.
//! - [`pipeline`]: two-stage inference orchestration and the parallel baseline mode.
//! - [`trainprep`]: training-sample export for external seq2seq trainers.
//! - [`metrics`]: IOU F1, TF1, RSQ family, RCP, R-Acc, threshold sweeps.
//! - [`analysis`]: decision-masking analysis over the parallel baseline.

pub mod analysis;
pub mod corpus;
pub mod metrics;
pub mod pipeline;
pub mod textproc;
pub mod trainprep;
