//! Parsing response documents: per-row diagnostics, strict and lenient
//! binding, and a model that fails validation.
//!
//! Run with `cargo run --example ingest_validation`.

use mlmm::{
    bind_sheet, default_mlmm, fixtures, parse_responses, validate_model, BindingMode, InputFormat,
};

fn main() {
    let model = default_mlmm();

    let messy = "rater_id,level,statement_id,rating\n\
                 r1,2,1,3\n\
                 r1,2,1,4\n\
                 r1,2,two,3\n\
                 r1,2,3,7\n\
                 r1,9,1,2\n";
    let parsed = parse_responses(messy, InputFormat::Csv).unwrap();
    println!("{} record(s) accepted", parsed.records.len());
    for d in &parsed.diagnostics {
        println!("  {d}");
    }

    let json = r#"[{"rater_id": "r1", "level": 2, "statement_id": 1, "rating": 3, "note": "x"}]"#;
    for d in parse_responses(json, InputFormat::Json)
        .unwrap()
        .diagnostics
    {
        println!("  {d}");
    }

    // drop one answer from rater A08 and bind both ways
    let trimmed: String = fixtures::UNIVERSITY_A_CSV
        .lines()
        .filter(|l| !l.starts_with("A08,3,4,"))
        .map(|l| format!("{l}\n"))
        .collect();
    let records = parse_responses(&trimmed, InputFormat::Csv).unwrap().records;
    match bind_sheet(&records, &model, BindingMode::Strict, "A") {
        Ok(_) => println!("strict: bound"),
        Err(e) => println!("strict: {e}"),
    }
    let lenient = bind_sheet(&records, &model, BindingMode::Lenient, "A").unwrap();
    println!("lenient: {} raters kept", lenient.sheet.rater_count());
    for d in &lenient.diagnostics {
        println!("  {d}");
    }

    let mut broken = default_mlmm();
    broken.levels[2].statements[4].csf = 42;
    broken.levels.pop();
    println!("validating a broken model:");
    for d in validate_model(&broken) {
        println!("  {d}");
    }
}
