//! Building a smaller model, validating it, and assessing a hand-made
//! response sheet against it with both aggregation methods.
//!
//! Run with `cargo run --example custom_model`.

use mlmm::model::{CsfTag, Level, Statement};
use mlmm::scoring::EntryKey;
use mlmm::{
    aggregate_ratings, assess, load_model, validate_model, AggregationMethod, AggregationPolicy,
    MaturityModel, Rating, ResponseSheet,
};

fn level(number: u8, name: &str, statements: u32) -> Level {
    Level {
        number,
        name: name.into(),
        statements: (1..=statements)
            .map(|id| Statement {
                id,
                text: format!("{name} practice {id}"),
                csf: 1 + id % 2,
            })
            .collect(),
    }
}

fn main() {
    let model = MaturityModel {
        name: "Pilot model".into(),
        csfs: vec![
            CsfTag {
                id: 1,
                label: "Strategy".into(),
            },
            CsfTag {
                id: 2,
                label: "Support".into(),
            },
        ],
        levels: vec![
            level(1, "Ad hoc", 0),
            level(2, "Started", 5),
            level(3, "Managed", 5),
            level(4, "Measured", 4),
            level(5, "Leading", 4),
        ],
    };
    for d in validate_model(&model) {
        println!("{d}");
    }
    let model = load_model(&model.to_json()).expect("valid model");

    let answers: [(&str, [u8; 18]); 3] = [
        (
            "amy",
            [4, 4, 3, 3, 0, 3, 3, 4, 2, 3, 2, 2, 1, 3, 1, 1, 2, 1],
        ),
        ("bo", [3, 4, 3, 2, 0, 3, 2, 4, 3, 3, 2, 1, 2, 3, 1, 2, 1, 1]),
        ("cy", [4, 3, 4, 3, 0, 3, 3, 3, 2, 4, 3, 3, 2, 2, 2, 1, 1, 1]),
    ];
    let mut sheet = ResponseSheet::new("Pilot college");
    for (rater, ratings) in answers {
        for ((level, id), v) in model.statement_keys().zip(ratings) {
            sheet
                .insert(EntryKey::new(rater, level, id), Rating::new(v).unwrap())
                .unwrap();
        }
    }

    for method in [
        AggregationMethod::MedianConservative,
        AggregationMethod::MeanRoundHalfUp,
    ] {
        let agg = aggregate_ratings(&sheet, &model, AggregationPolicy::new(method)).unwrap();
        let result = assess(&agg, &model).unwrap();
        println!(
            "{method:?}: NAS {:?}, level {} ({})",
            result.nas_vector(),
            result.maturity_level,
            result.maturity_name
        );
    }
}
