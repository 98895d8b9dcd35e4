#![allow(dead_code)]

use mlmm::ingest::ResponseRecord;
use mlmm::{parse_responses, InputFormat};

/// Cohen's kappa from an explicit confusion matrix over the union of the
/// labels seen. Returns `None` when chance agreement is 1.
pub fn kappa_oracle(r1: &[u8], r2: &[u8]) -> Option<f64> {
    let mut labels: Vec<u8> = r1.iter().chain(r2).copied().collect();
    labels.sort_unstable();
    labels.dedup();
    let k = labels.len();
    let idx = |v: u8| labels.iter().position(|&l| l == v).unwrap();

    let mut confusion = vec![vec![0.0f64; k]; k];
    for (&a, &b) in r1.iter().zip(r2) {
        confusion[idx(a)][idx(b)] += 1.0;
    }
    let n = r1.len() as f64;
    let p_o: f64 = (0..k).map(|i| confusion[i][i]).sum::<f64>() / n;
    let p_e: f64 = (0..k)
        .map(|i| {
            let row: f64 = confusion[i].iter().sum();
            let col: f64 = confusion.iter().map(|r| r[i]).sum();
            row * col
        })
        .sum::<f64>()
        / (n * n);
    if (p_e - 1.0).abs() < 1e-15 {
        return None;
    }
    Some((p_o - p_e) / (1.0 - p_e))
}

/// Fleiss' kappa written out term by term.
pub fn fleiss_oracle(counts: &[Vec<usize>]) -> f64 {
    let big_n = counts.len() as f64;
    let n: f64 = counts[0].iter().sum::<usize>() as f64;
    let k = counts[0].len();
    let p_bar = counts
        .iter()
        .map(|row| {
            let sq: f64 = row.iter().map(|&c| (c * c) as f64).sum();
            (sq - n) / (n * (n - 1.0))
        })
        .sum::<f64>()
        / big_n;
    let p_e: f64 = (0..k)
        .map(|c| {
            let p = counts.iter().map(|r| r[c] as f64).sum::<f64>() / (big_n * n);
            p * p
        })
        .sum();
    (p_bar - p_e) / (1.0 - p_e)
}

pub fn records_of(csv: &str) -> Vec<ResponseRecord> {
    let parsed = parse_responses(csv, InputFormat::Csv).unwrap();
    assert!(parsed.diagnostics.is_empty());
    parsed.records
}

pub fn to_json(records: &[ResponseRecord]) -> String {
    serde_json::to_string(records).unwrap()
}

pub fn to_csv(records: &[ResponseRecord]) -> String {
    let mut out = String::from("rater_id,level,statement_id,rating\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.rater_id, r.level, r.statement_id, r.rating
        ));
    }
    out
}
