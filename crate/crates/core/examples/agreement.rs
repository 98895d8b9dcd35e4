//! Inter-rater agreement: Cohen's kappa on a pair, Fleiss' kappa on a
//! count table, and the full pairwise matrix for a case study.
//!
//! Run with `cargo run --example agreement`.

use mlmm::report::{render_agreement, ReportFormat};
use mlmm::{classify_agreement, cohen_kappa, fixtures, fleiss_kappa, pairwise_kappa_matrix};

fn main() {
    let first = [4, 3, 3, 2, 0, 1, 3, 4, 2, 2];
    let second = [4, 3, 2, 2, 0, 1, 3, 3, 2, 1];
    let k = cohen_kappa(&first, &second).unwrap();
    println!(
        "cohen: kappa {:.3} (observed {:.2}, chance {:.2}) -> {}",
        k.value,
        k.p_observed,
        k.p_expected,
        classify_agreement(k.value).unwrap()
    );

    // three raters, four items, categories 0..=2
    let counts = [[3, 0, 0], [0, 2, 1], [0, 0, 3], [1, 1, 1]];
    let f = fleiss_kappa(&counts).unwrap();
    println!("fleiss: kappa {:.3}", f.value);

    println!();
    let model = fixtures::default_model();
    let report = pairwise_kappa_matrix(&fixtures::university_b(), &model).unwrap();
    print!("{}", render_agreement(&report, ReportFormat::Text));
}
