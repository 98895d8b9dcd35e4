//! Regenerates the synthetic case-study response files in `data/`.
//!
//! Only the published summary numbers of the two case studies exist: each
//! institution's NAS per level and the range of its pairwise kappas. This
//! program builds per-rater answer sheets that reproduce them:
//!
//! 1. A consolidated target rating is fixed for every statement so that the
//!    NAS vector matches (A: 14, 15, 1, 1; B: 17, 2, 0, 0).
//! 2. Every rater starts out agreeing with the targets.
//! 3. A seeded annealed search nudges single answers by one Likert step,
//!    keeping only moves that leave every statement's median-conservative
//!    consolidation unchanged, until the smallest and largest pairwise
//!    Cohen's kappa round to the published range (A: 0.45 to 0.85,
//!    B: 0.43 to 0.79).
//!
//! Run with `cargo run --example build_fixtures [-- <output dir>]`.

use std::fs;
use std::path::PathBuf;

use mlmm::{cohen_kappa, default_mlmm, AggregationPolicy, MaturityModel, Rating};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Dataset {
    file: &'static str,
    prefix: &'static str,
    raters: usize,
    seed: u64,
    /// Consolidated ratings per assessed level, before shuffling.
    targets: [Vec<u8>; 4],
    kappa_range: (f64, f64),
}

fn repeat(parts: &[(u8, usize)]) -> Vec<u8> {
    parts
        .iter()
        .flat_map(|&(v, n)| std::iter::repeat_n(v, n))
        .collect()
}

fn datasets() -> Vec<Dataset> {
    vec![
        Dataset {
            file: "university_a.csv",
            prefix: "A",
            raters: 8,
            seed: 0xA,
            targets: [
                repeat(&[(0, 1), (3, 9), (4, 4), (2, 3), (1, 1)]),
                repeat(&[(0, 1), (3, 10), (4, 4), (2, 3), (1, 2)]),
                repeat(&[(3, 1), (2, 10), (1, 9)]),
                repeat(&[(3, 1), (2, 8), (1, 8)]),
            ],
            kappa_range: (0.45, 0.85),
        },
        Dataset {
            file: "university_b.csv",
            prefix: "B",
            raters: 9,
            seed: 0xB,
            targets: [
                repeat(&[(0, 1), (3, 8), (4, 8), (2, 1)]),
                repeat(&[(3, 2), (2, 10), (1, 8)]),
                repeat(&[(2, 12), (1, 8)]),
                repeat(&[(2, 9), (1, 8)]),
            ],
            kappa_range: (0.43, 0.79),
        },
    ]
}

fn pair_kappas(sheets: &[Vec<u8>]) -> Vec<f64> {
    let mut out = Vec::new();
    for a in 0..sheets.len() {
        for b in a + 1..sheets.len() {
            out.push(cohen_kappa(&sheets[a], &sheets[b]).map_or(0.0, |k| k.value));
        }
    }
    out
}

fn objective(kappas: &[f64], (lo, hi): (f64, f64)) -> f64 {
    let min = kappas.iter().copied().fold(f64::INFINITY, f64::min);
    let max = kappas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let outside: f64 = kappas
        .iter()
        .map(|&k| (k - hi).max(0.0) + (lo - k).max(0.0))
        .sum();
    outside + (min - lo).abs() + (max - hi).abs()
}

fn in_window(kappas: &[f64], (lo, hi): (f64, f64)) -> bool {
    const SLACK: f64 = 0.003;
    let min = kappas.iter().copied().fold(f64::INFINITY, f64::min);
    let max = kappas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min - lo).abs() < SLACK && (max - hi).abs() < SLACK
}

fn consolidated(sheets: &[Vec<u8>], item: usize) -> u8 {
    let column: Vec<Rating> = sheets
        .iter()
        .map(|s| Rating::new(s[item]).unwrap())
        .collect();
    AggregationPolicy::default().consolidate(&column).value()
}

fn build(dataset: &Dataset, model: &MaturityModel) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(dataset.seed);
    let mut targets = Vec::new();
    for (level, wanted) in model.assessed_levels().zip(&dataset.targets) {
        assert_eq!(level.tns(), wanted.len(), "level {}", level.number);
        let mut v = wanted.clone();
        v.shuffle(&mut rng);
        targets.extend(v);
    }

    let mut sheets = vec![targets.clone(); dataset.raters];
    let mut kappas = pair_kappas(&sheets);
    let mut score = objective(&kappas, dataset.kappa_range);

    const STEPS: usize = 400_000;
    for step in 0..STEPS {
        if in_window(&kappas, dataset.kappa_range) {
            return sheets;
        }
        let r = rng.gen_range(0..dataset.raters);
        let i = rng.gen_range(0..targets.len());
        let old = sheets[r][i];
        let new = if rng.gen_bool(0.5) {
            old.saturating_sub(1)
        } else {
            (old + 1).min(4)
        };
        if new == old {
            continue;
        }
        sheets[r][i] = new;
        if consolidated(&sheets, i) != targets[i] {
            sheets[r][i] = old;
            continue;
        }
        let next = pair_kappas(&sheets);
        let next_score = objective(&next, dataset.kappa_range);
        // annealed acceptance lets the search step over overshooting moves
        let temperature = 0.01 * (1.0 - step as f64 / STEPS as f64) + 1e-4;
        if next_score <= score || rng.gen::<f64>() < (-(next_score - score) / temperature).exp() {
            kappas = next;
            score = next_score;
        } else {
            sheets[r][i] = old;
        }
    }
    let min = kappas.iter().copied().fold(f64::INFINITY, f64::min);
    let max = kappas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    panic!(
        "search did not converge for {}: score {score} kappa {min}..{max}",
        dataset.file
    );
}

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));
    let model = default_mlmm();
    let keys: Vec<(u8, u32)> = model.statement_keys().collect();

    for dataset in datasets() {
        let sheets = build(&dataset, &model);
        let mut csv = String::from("rater_id,level,statement_id,rating\n");
        for (r, sheet) in sheets.iter().enumerate() {
            for (&(level, id), rating) in keys.iter().zip(sheet) {
                csv.push_str(&format!(
                    "{}{:02},{level},{id},{rating}\n",
                    dataset.prefix,
                    r + 1
                ));
            }
        }
        let path = out_dir.join(dataset.file);
        fs::write(&path, csv).expect("write fixture");

        let kappas = pair_kappas(&sheets);
        let min = kappas.iter().copied().fold(f64::INFINITY, f64::min);
        let max = kappas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{}: {} raters, pairwise kappa {min:.4}..{max:.4}",
            path.display(),
            dataset.raters
        );
    }
}
