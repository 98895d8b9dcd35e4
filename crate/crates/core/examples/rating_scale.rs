//! The rating scale: percentage bands, anchors, the achievement rule and
//! the pass threshold for a few level sizes.
//!
//! Run with `cargo run --example rating_scale`.

use mlmm::{is_achieved, pass_threshold, pct_to_rating, Achievement, Rating};

fn main() {
    println!("rating  achieved  anchor");
    for r in Rating::all() {
        println!("{:>6}  {:>8}  {}", r.value(), is_achieved(r), r.anchor());
    }

    println!();
    for pct in [0.0, 33.2, 33.3, 66.6, 66.7, 79.9, 80.0, 100.0] {
        let r = pct_to_rating(Achievement::Percent(pct)).unwrap();
        println!("{pct:>5.1}% -> {r}");
    }
    println!(
        "n/a    -> {}",
        pct_to_rating(Achievement::NotApplicable).unwrap()
    );
    if let Err(e) = pct_to_rating(Achievement::Percent(120.0)) {
        println!("120%   -> error: {e}");
    }

    println!();
    for tns in [5, 17, 18, 20] {
        println!("{tns} statements: pass at {} achieved", pass_threshold(tns));
    }
}
