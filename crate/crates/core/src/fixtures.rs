//! Reference documents shipped with the crate.
//!
//! The two case-study response sets are synthetic: per-rater answers were
//! constructed (see `examples/build_fixtures.rs`) so that median
//! aggregation reproduces the published NAS vectors of each institution,
//! (14, 15, 1, 1) for University A with 8 raters and (17, 2, 0, 0) for
//! University B with 9 raters.

use crate::ingest::{bind_sheet, parse_responses, BindingMode, InputFormat};
use crate::model::{load_model, MaturityModel};
use crate::scoring::ResponseSheet;

/// The built-in model as a JSON document.
pub const DEFAULT_MODEL_JSON: &str = include_str!("../data/mlmm_default.json");

pub const UNIVERSITY_A_CSV: &str = include_str!("../data/university_a.csv");
pub const UNIVERSITY_B_CSV: &str = include_str!("../data/university_b.csv");

pub fn default_model() -> MaturityModel {
    load_model(DEFAULT_MODEL_JSON).expect("shipped model is valid")
}

fn sheet(csv: &str, institution: &str) -> ResponseSheet {
    let parsed = parse_responses(csv, InputFormat::Csv).expect("shipped fixture parses");
    assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
    bind_sheet(
        &parsed.records,
        &default_model(),
        BindingMode::Strict,
        institution,
    )
    .expect("shipped fixture is complete")
    .sheet
}

pub fn university_a() -> ResponseSheet {
    sheet(UNIVERSITY_A_CSV, "University A")
}

pub fn university_b() -> ResponseSheet {
    sheet(UNIVERSITY_B_CSV, "University B")
}
