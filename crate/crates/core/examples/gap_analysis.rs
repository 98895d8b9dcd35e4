//! What an institution needs to reach the next level: the shortfall and
//! the blocking statements, lowest consolidated rating first.
//!
//! Run with `cargo run --example gap_analysis`.

use mlmm::report::gap_analysis;
use mlmm::{aggregate_ratings, assess, fixtures, AggregationPolicy};

fn main() {
    let model = fixtures::default_model();
    let sheet = fixtures::university_a();
    let agg = aggregate_ratings(&sheet, &model, AggregationPolicy::default()).unwrap();
    let result = assess(&agg, &model).unwrap();

    let Some(gap) = gap_analysis(&result, &agg, &model).unwrap() else {
        println!("{} passed every level", result.institution);
        return;
    };
    println!(
        "{} is at level {} ({}); level {} ({}) needs {} of {} and has {}: short by {}",
        result.institution,
        result.maturity_level,
        result.maturity_name,
        gap.target_level,
        gap.target_name,
        gap.pt,
        gap.tns,
        gap.nas,
        gap.shortfall
    );
    for s in &gap.blocking_statements {
        let raters: Vec<String> = s.rater_ratings.iter().map(|r| r.to_string()).collect();
        println!(
            "  statement {:>2} (csf {}): rated {} [{}] spread {}",
            s.id,
            s.csf,
            s.rating,
            raters.join(" "),
            s.spread
        );
    }
}
