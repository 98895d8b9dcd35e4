//! Inter-rater agreement: Cohen's kappa for rater pairs, Fleiss' kappa for
//! the whole panel, and a four-band strength benchmark.
//!
//! Kappa values follow the standard definition and range over `[-1, 1]`;
//! negative values indicate systematic disagreement.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::MaturityModel;
use crate::scoring::{Rating, ResponseSheet, ScoringError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgreementError {
    #[error("rating sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no items to compare")]
    EmptyInput,
    #[error("kappa is undefined: chance agreement is 1 but observed agreement is {p_observed}")]
    UndefinedKappa { p_observed: f64 },
    #[error("item {item} has {found} ratings, expected {expected}")]
    InconsistentRaterCounts {
        item: usize,
        expected: usize,
        found: usize,
    },
    #[error("item {item} has {found} categories, expected {expected}")]
    RaggedCategories {
        item: usize,
        expected: usize,
        found: usize,
    },
    #[error("agreement needs at least 2 raters, found {0}")]
    TooFewRaters(usize),
    #[error("kappa {0} is outside [-1, 1]")]
    KappaOutOfRange(f64),
    #[error("every rater pair has undefined kappa")]
    AllPairsUndefined,
    #[error(transparent)]
    Sheet(#[from] ScoringError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaValue {
    pub value: f64,
    pub p_observed: f64,
    pub p_expected: f64,
}

/// Unweighted Cohen's kappa between two raters' labels for the same items.
///
/// Labels can be any ordered type; only equality and category frequencies
/// matter. Observed and chance agreement are accumulated as integer counts
/// and divided once, so the result is exact up to a single rounding.
pub fn cohen_kappa<T: Ord>(r1: &[T], r2: &[T]) -> Result<KappaValue, AgreementError> {
    if r1.len() != r2.len() {
        return Err(AgreementError::LengthMismatch(r1.len(), r2.len()));
    }
    if r1.is_empty() {
        return Err(AgreementError::EmptyInput);
    }
    let n = r1.len() as u128;

    let mut marginals: BTreeMap<&T, (u128, u128)> = BTreeMap::new();
    let mut matches = 0u128;
    for (a, b) in r1.iter().zip(r2) {
        marginals.entry(a).or_default().0 += 1;
        marginals.entry(b).or_default().1 += 1;
        if a == b {
            matches += 1;
        }
    }
    let chance: u128 = marginals.values().map(|(c1, c2)| c1 * c2).sum();
    let total = n * n;

    let p_observed = matches as f64 / n as f64;
    let p_expected = chance as f64 / total as f64;
    if chance == total {
        if matches == n {
            return Ok(KappaValue {
                value: 1.0,
                p_observed,
                p_expected,
            });
        }
        return Err(AgreementError::UndefinedKappa { p_observed });
    }

    let num = (n * matches) as f64 - chance as f64;
    let den = (total - chance) as f64;
    Ok(KappaValue {
        value: num / den,
        p_observed,
        p_expected,
    })
}

/// Fleiss' kappa from an items × categories count matrix.
///
/// Row `i` holds how many raters put item `i` in each category; every row
/// must sum to the same rater count `n >= 2`.
pub fn fleiss_kappa<R: AsRef<[usize]>>(counts: &[R]) -> Result<KappaValue, AgreementError> {
    let first = counts.first().ok_or(AgreementError::EmptyInput)?.as_ref();
    let categories = first.len();
    let raters: usize = first.iter().sum();
    if raters < 2 {
        return Err(AgreementError::TooFewRaters(raters));
    }

    let mut column_totals = vec![0u128; categories];
    let mut sum_sq = 0u128;
    for (item, row) in counts.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != categories {
            return Err(AgreementError::RaggedCategories {
                item,
                expected: categories,
                found: row.len(),
            });
        }
        let found: usize = row.iter().sum();
        if found != raters {
            return Err(AgreementError::InconsistentRaterCounts {
                item,
                expected: raters,
                found,
            });
        }
        for (total, &c) in column_totals.iter_mut().zip(row) {
            *total += c as u128;
            sum_sq += (c * c) as u128;
        }
    }

    let items = counts.len() as u128;
    let n = raters as u128;
    // P_bar = agree / agree_den, P_e = chance / chance_den
    let agree = sum_sq - items * n;
    let agree_den = items * n * (n - 1);
    let chance: u128 = column_totals.iter().map(|t| t * t).sum();
    let chance_den = (items * n) * (items * n);

    let p_observed = agree as f64 / agree_den as f64;
    let p_expected = chance as f64 / chance_den as f64;
    if chance == chance_den {
        // A single category used throughout forces P_bar = 1 as well.
        return Ok(KappaValue {
            value: 1.0,
            p_observed,
            p_expected,
        });
    }

    let num = agree as f64 * chance_den as f64 - chance as f64 * agree_den as f64;
    let den = agree_den as f64 * (chance_den - chance) as f64;
    Ok(KappaValue {
        value: num / den,
        p_observed,
        p_expected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgreementBand {
    Poor,
    Moderate,
    Substantial,
    Excellent,
}

impl fmt::Display for AgreementBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgreementBand::Poor => "poor",
            AgreementBand::Moderate => "moderate",
            AgreementBand::Substantial => "substantial",
            AgreementBand::Excellent => "excellent",
        })
    }
}

pub const MODERATE_FROM: f64 = 0.44;
pub const SUBSTANTIAL_FROM: f64 = 0.62;
pub const EXCELLENT_FROM: f64 = 0.78;

/// Bands are left-closed: `[0.44, 0.62)` is moderate, `[0.62, 0.78)`
/// substantial and `0.78` upward excellent.
pub fn classify_agreement(kappa: f64) -> Result<AgreementBand, AgreementError> {
    if !(-1.0..=1.0).contains(&kappa) {
        return Err(AgreementError::KappaOutOfRange(kappa));
    }
    Ok(if kappa >= EXCELLENT_FROM {
        AgreementBand::Excellent
    } else if kappa >= SUBSTANTIAL_FROM {
        AgreementBand::Substantial
    } else if kappa >= MODERATE_FROM {
        AgreementBand::Moderate
    } else {
        AgreementBand::Poor
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairKappa {
    /// Indices into [`AgreementReport::raters`], `first < second`.
    pub first: usize,
    pub second: usize,
    /// `None` when the pair's kappa is undefined.
    pub kappa: Option<KappaValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    /// Ordinal rater aliases (`R1`, `R2`, ...) in sorted rater-id order.
    pub raters: Vec<String>,
    pub items: usize,
    pub pairs: Vec<PairKappa>,
    pub fleiss: KappaValue,
    pub min_kappa: f64,
    pub max_kappa: f64,
    /// Band of the weakest pair.
    pub overall_band: AgreementBand,
}

impl AgreementReport {
    /// Symmetric lookup; the diagonal and undefined pairs yield `None`.
    pub fn kappa(&self, a: usize, b: usize) -> Option<&KappaValue> {
        let (first, second) = if a < b { (a, b) } else { (b, a) };
        self.pairs
            .iter()
            .find(|p| p.first == first && p.second == second)
            .and_then(|p| p.kappa.as_ref())
    }

    pub fn matrix(&self) -> Vec<Vec<Option<f64>>> {
        let n = self.raters.len();
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        if a == b {
                            None
                        } else {
                            self.kappa(a, b).map(|k| k.value)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn undefined_pairs(&self) -> impl Iterator<Item = &PairKappa> {
        self.pairs.iter().filter(|p| p.kappa.is_none())
    }
}

pub fn rater_alias(index: usize) -> String {
    format!("R{}", index + 1)
}

/// Pairwise Cohen's kappa and Fleiss' kappa over every assessed statement,
/// levels concatenated in model order.
pub fn pairwise_kappa_matrix(
    sheet: &ResponseSheet,
    model: &MaturityModel,
) -> Result<AgreementReport, AgreementError> {
    let raters = sheet.raters();
    if raters.len() < 2 {
        return Err(AgreementError::TooFewRaters(raters.len()));
    }
    sheet.check_complete(model)?;

    let keys: Vec<(u8, u32)> = model.statement_keys().collect();
    let vectors: Vec<Vec<Rating>> = raters
        .iter()
        .map(|r| {
            keys.iter()
                .map(|&(level, id)| sheet.rating(r, level, id).expect("completeness checked"))
                .collect()
        })
        .collect();

    let mut pairs = Vec::new();
    for first in 0..raters.len() {
        for second in first + 1..raters.len() {
            let kappa = match cohen_kappa(&vectors[first], &vectors[second]) {
                Ok(k) => Some(k),
                Err(AgreementError::UndefinedKappa { .. }) => None,
                Err(e) => return Err(e),
            };
            pairs.push(PairKappa {
                first,
                second,
                kappa,
            });
        }
    }

    let categories = usize::from(Rating::MAX) + 1;
    let counts: Vec<Vec<usize>> = (0..keys.len())
        .map(|item| {
            let mut row = vec![0; categories];
            for v in &vectors {
                row[usize::from(v[item].value())] += 1;
            }
            row
        })
        .collect();
    let fleiss = fleiss_kappa(&counts)?;

    let defined = pairs.iter().filter_map(|p| p.kappa.map(|k| k.value));
    let (min_kappa, max_kappa) = defined.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !min_kappa.is_finite() {
        return Err(AgreementError::AllPairsUndefined);
    }

    Ok(AgreementReport {
        raters: (0..raters.len()).map(rater_alias).collect(),
        items: keys.len(),
        pairs,
        fleiss,
        min_kappa,
        max_kappa,
        overall_band: classify_agreement(min_kappa)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_mlmm;
    use crate::scoring::EntryKey;

    #[test]
    fn cohen_identical() {
        let v = [0u8, 1, 2, 3, 4, 4, 2];
        let k = cohen_kappa(&v, &v).unwrap();
        assert_eq!(k.value, 1.0);
        assert_eq!(k.p_observed, 1.0);
    }

    #[test]
    fn cohen_hand_cases() {
        let k = cohen_kappa(&['A', 'A', 'B', 'B', 'A'], &['A', 'B', 'B', 'B', 'A']).unwrap();
        assert!((k.p_observed - 0.8).abs() < 1e-12);
        assert!((k.p_expected - 0.48).abs() < 1e-12);
        assert!((k.value - 0.615385).abs() < 1e-6);

        let k = cohen_kappa(&['A', 'A', 'B', 'B'], &['B', 'B', 'A', 'A']).unwrap();
        assert_eq!(k.p_observed, 0.0);
        assert_eq!(k.p_expected, 0.5);
        assert!((k.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cohen_errors() {
        assert_eq!(
            cohen_kappa(&[1, 2], &[1]),
            Err(AgreementError::LengthMismatch(2, 1))
        );
        assert_eq!(cohen_kappa::<u8>(&[], &[]), Err(AgreementError::EmptyInput));
    }

    #[test]
    fn cohen_single_shared_category_is_one() {
        let k = cohen_kappa(&[3, 3, 3], &[3, 3, 3]).unwrap();
        assert_eq!(k.value, 1.0);
        assert_eq!(k.p_expected, 1.0);
    }

    #[test]
    fn fleiss_hand_case() {
        let k = fleiss_kappa(&[[3, 0], [2, 1]]).unwrap();
        assert!((k.p_observed - 2.0 / 3.0).abs() < 1e-12);
        assert!((k.p_expected - 13.0 / 18.0).abs() < 1e-12);
        assert!((k.value + 0.2).abs() < 1e-9);
    }

    #[test]
    fn fleiss_perfect_agreement() {
        let k = fleiss_kappa(&[[4, 0, 0], [0, 4, 0], [0, 0, 4]]).unwrap();
        assert_eq!(k.value, 1.0);
        let k = fleiss_kappa(&[[0, 5], [0, 5]]).unwrap();
        assert_eq!(k.value, 1.0);
    }

    #[test]
    fn fleiss_errors() {
        assert_eq!(
            fleiss_kappa::<Vec<usize>>(&[]),
            Err(AgreementError::EmptyInput)
        );
        assert_eq!(
            fleiss_kappa(&[[1, 0]]),
            Err(AgreementError::TooFewRaters(1))
        );
        assert!(matches!(
            fleiss_kappa(&[vec![2, 1], vec![1, 1]]),
            Err(AgreementError::InconsistentRaterCounts { item: 1, .. })
        ));
        assert!(matches!(
            fleiss_kappa(&[vec![2, 1], vec![3]]),
            Err(AgreementError::RaggedCategories { item: 1, .. })
        ));
    }

    #[test]
    fn bands() {
        let c = |k| classify_agreement(k).unwrap();
        assert_eq!(c(0.30), AgreementBand::Poor);
        assert_eq!(c(-0.5), AgreementBand::Poor);
        assert_eq!(c(0.4399), AgreementBand::Poor);
        assert_eq!(c(0.44), AgreementBand::Moderate);
        assert_eq!(c(0.50), AgreementBand::Moderate);
        assert_eq!(c(0.62), AgreementBand::Substantial);
        assert_eq!(c(0.70), AgreementBand::Substantial);
        assert_eq!(c(0.78), AgreementBand::Excellent);
        assert_eq!(c(0.85), AgreementBand::Excellent);
        assert_eq!(c(1.0), AgreementBand::Excellent);
        assert!(classify_agreement(1.01).is_err());
        assert!(classify_agreement(f64::NAN).is_err());
    }

    fn sheet_from(vectors: &[Vec<u8>]) -> ResponseSheet {
        let model = default_mlmm();
        let mut sheet = ResponseSheet::new("t");
        for (r, v) in vectors.iter().enumerate() {
            for ((level, id), &x) in model.statement_keys().zip(v) {
                sheet
                    .insert(
                        EntryKey::new(format!("rater{r}"), level, id),
                        Rating::new(x).unwrap(),
                    )
                    .unwrap();
            }
        }
        sheet
    }

    #[test]
    fn identical_raters_excellent() {
        let v: Vec<u8> = (0..75).map(|i| (i % 5) as u8).collect();
        let report = pairwise_kappa_matrix(&sheet_from(&[v.clone(), v]), &default_mlmm()).unwrap();
        assert_eq!(report.min_kappa, 1.0);
        assert_eq!(report.max_kappa, 1.0);
        assert_eq!(report.overall_band, AgreementBand::Excellent);
        assert_eq!(report.items, 75);
    }

    #[test]
    fn three_raters_three_pairs() {
        let a: Vec<u8> = (0..75).map(|i| (i % 5) as u8).collect();
        let mut b = a.clone();
        b[0] = 4;
        let mut c = a.clone();
        c[1] = 3;
        c[2] = 0;
        let report = pairwise_kappa_matrix(&sheet_from(&[a, b, c]), &default_mlmm()).unwrap();
        assert_eq!(report.pairs.len(), 3);
        assert_eq!(report.raters, vec!["R1", "R2", "R3"]);
        let m = report.matrix();
        for (i, row) in m.iter().enumerate() {
            assert!(row[i].is_none());
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, m[j][i]);
            }
        }
        assert!(report.min_kappa <= report.max_kappa);
    }

    #[test]
    fn single_rater_rejected() {
        let v: Vec<u8> = vec![3; 75];
        assert_eq!(
            pairwise_kappa_matrix(&sheet_from(&[v]), &default_mlmm()),
            Err(AgreementError::TooFewRaters(1))
        );
    }
}
