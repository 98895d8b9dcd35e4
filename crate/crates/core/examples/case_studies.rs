//! Assesses the two bundled case-study institutions end to end and prints
//! the text report for each.
//!
//! Run with `cargo run --example case_studies`.

use mlmm::report::{gap_analysis, render, ReportFormat};
use mlmm::{aggregate_ratings, assess, fixtures, pairwise_kappa_matrix, AggregationPolicy};

fn main() {
    let model = fixtures::default_model();
    for sheet in [fixtures::university_a(), fixtures::university_b()] {
        let agg = aggregate_ratings(&sheet, &model, AggregationPolicy::default()).unwrap();
        let result = assess(&agg, &model).unwrap();
        let agreement = pairwise_kappa_matrix(&sheet, &model).unwrap();
        let gap = gap_analysis(&result, &agg, &model).unwrap();

        let report = render(&result, Some(&agreement), gap.as_ref(), ReportFormat::Text);
        println!("{}", report.body);
        println!("NAS per level: {:?}", result.nas_vector());
        println!();
    }
}
