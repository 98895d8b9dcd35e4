//! Staged maturity assessment for m-learning adoption.
//!
//! The crate scores multi-rater Likert questionnaires against a five-level
//! staged maturity model, determines the achieved maturity level, measures
//! inter-rater agreement and reports the gap to the next level.
//!
//! ```text
//! responses (csv/json) ──ingest──▶ ResponseSheet
//!                                      │
//!              aggregate_ratings ◀─────┤────▶ pairwise_kappa_matrix
//!                     │                              │
//!                   assess ──▶ gap_analysis          │
//!                     └──────────────┴──── render ◀──┘
//! ```
//!
//! Each stage is a pure function over immutable inputs. The `mlmm` binary
//! wires the pipeline together; see [`cli`].

pub mod agreement;
pub mod cli;
pub mod diagnostic;
pub mod fixtures;
pub mod ingest;
pub mod model;
pub mod report;
pub mod scoring;

pub use agreement::{
    classify_agreement, cohen_kappa, fleiss_kappa, pairwise_kappa_matrix, AgreementBand,
    AgreementError, AgreementReport, KappaValue,
};
pub use diagnostic::{Diagnostic, Severity};
pub use ingest::{bind_sheet, parse_responses, BindingMode, InputFormat, ResponseRecord};
pub use model::{default_mlmm, load_model, validate_model, MaturityModel};
pub use report::{gap_analysis, render, GapReport, RenderedReport, ReportFormat};
pub use scoring::{
    aggregate_ratings, assess, is_achieved, nas, pass_threshold, pct_to_rating, Achievement,
    AggregatedRatings, AggregationMethod, AggregationPolicy, AssessmentResult, LevelResult, Rating,
    ResponseSheet,
};
