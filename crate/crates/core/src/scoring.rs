//! Rating scale, achievement predicate, cross-rater aggregation and staged
//! maturity determination.
//!
//! A statement is *achieved* when its consolidated rating is Largely (3) or
//! Completely (4) achieved, or Inapplicable (0). A level passes when its
//! number of achieved statements (NAS) reaches the pass threshold, 80% of
//! the level's statement count rounded to the nearest integer. The maturity
//! level is the highest level `j` such that every level `2..=j` passed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MaturityModel, FIRST_ASSESSED_LEVEL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("rating {0} out of range 0..4")]
    InvalidRating(u8),
    #[error("achievement percentage {0} is not a finite value in [0, 100]")]
    InvalidPercentage(f64),
    #[error("duplicate rating for {0}")]
    DuplicateEntry(EntryKey),
    #[error("response sheet has no ratings")]
    EmptySheet,
    #[error("response sheet is incomplete; missing {}", list_missing(.0))]
    Incomplete(Vec<EntryKey>),
    #[error("rating for {0} does not match any assessed statement of the model")]
    UnknownStatement(EntryKey),
    #[error("level {0} is not an assessed level of these ratings")]
    UnknownLevel(u8),
    #[error("aggregated ratings do not cover the model: {0}")]
    CoverageMismatch(String),
}

pub(crate) fn list_missing(missing: &[EntryKey]) -> String {
    const SHOWN: usize = 10;
    let mut out = missing
        .iter()
        .take(SHOWN)
        .map(EntryKey::to_string)
        .collect::<Vec<_>>()
        .join(", ");
    if missing.len() > SHOWN {
        out.push_str(&format!(" and {} more", missing.len() - SHOWN));
    }
    out
}

/// A 0..=4 Likert rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Rating(u8);

impl Rating {
    pub const INAPPLICABLE: Rating = Rating(0);
    pub const UNACHIEVED: Rating = Rating(1);
    pub const PARTIALLY_ACHIEVED: Rating = Rating(2);
    pub const LARGELY_ACHIEVED: Rating = Rating(3);
    pub const COMPLETELY_ACHIEVED: Rating = Rating(4);

    pub const MAX: u8 = 4;

    pub fn new(value: u8) -> Result<Self, ScoringError> {
        if value <= Self::MAX {
            Ok(Rating(value))
        } else {
            Err(ScoringError::InvalidRating(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn anchor(self) -> &'static str {
        match self.0 {
            0 => "Inapplicable",
            1 => "Unachieved",
            2 => "Partially Achieved",
            3 => "Largely Achieved",
            _ => "Completely Achieved",
        }
    }

    pub fn all() -> impl Iterator<Item = Rating> {
        (0..=Self::MAX).map(Rating)
    }
}

impl TryFrom<u8> for Rating {
    type Error = ScoringError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Rating::new(value)
    }
}

impl From<Rating> for u8 {
    fn from(r: Rating) -> u8 {
        r.0
    }
}

impl fmt::Display for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Degree to which a statement's condition is met, as a percentage, or a
/// marker that the condition does not apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Achievement {
    Percent(f64),
    NotApplicable,
}

/// Maps an achievement percentage onto the rating scale.
///
/// Bands are half-open so that every value in `[0, 100]` maps to exactly one
/// rating: `[80, 100]` → 4, `[66.7, 80)` → 3, `[33.3, 66.7)` → 2,
/// `[0, 33.3)` → 1.
pub fn pct_to_rating(achievement: Achievement) -> Result<Rating, ScoringError> {
    let pct = match achievement {
        Achievement::NotApplicable => return Ok(Rating::INAPPLICABLE),
        Achievement::Percent(p) => p,
    };
    if !pct.is_finite() || !(0.0..=100.0).contains(&pct) {
        return Err(ScoringError::InvalidPercentage(pct));
    }
    Ok(if pct >= 80.0 {
        Rating::COMPLETELY_ACHIEVED
    } else if pct >= 66.7 {
        Rating::LARGELY_ACHIEVED
    } else if pct >= 33.3 {
        Rating::PARTIALLY_ACHIEVED
    } else {
        Rating::UNACHIEVED
    })
}

pub fn is_achieved(r: Rating) -> bool {
    r.0 >= 3 || r.0 == 0
}

/// Round-half-up of `0.8 * tns`, in integer arithmetic.
pub fn pass_threshold(tns: usize) -> usize {
    (8 * tns + 5) / 10
}

/// Identifies one rating: who gave it and for which statement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntryKey {
    pub rater: String,
    pub level: u8,
    pub statement: u32,
}

impl EntryKey {
    pub fn new(rater: impl Into<String>, level: u8, statement: u32) -> Self {
        Self {
            rater: rater.into(),
            level,
            statement,
        }
    }
}

impl fmt::Display for EntryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(rater {}, level {}, statement {})",
            self.rater, self.level, self.statement
        )
    }
}

/// Raw ratings of one institution's assessment, keyed by rater and statement.
///
/// Raters are kept in sorted id order so that two sheets holding the same
/// ratings compare equal regardless of input order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResponseSheet {
    institution: String,
    entries: BTreeMap<EntryKey, Rating>,
}

impl ResponseSheet {
    pub fn new(institution: impl Into<String>) -> Self {
        Self {
            institution: institution.into(),
            entries: BTreeMap::new(),
        }
    }

    pub fn institution(&self) -> &str {
        &self.institution
    }

    pub fn insert(&mut self, key: EntryKey, rating: Rating) -> Result<(), ScoringError> {
        if self.entries.contains_key(&key) {
            return Err(ScoringError::DuplicateEntry(key));
        }
        self.entries.insert(key, rating);
        Ok(())
    }

    pub fn rating(&self, rater: &str, level: u8, statement: u32) -> Option<Rating> {
        // BTreeMap lookups need an owned key; sheets are small.
        self.entries
            .get(&EntryKey::new(rater, level, statement))
            .copied()
    }

    pub fn raters(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.entries.keys().map(|k| k.rater.as_str()).collect();
        set.into_iter().collect()
    }

    pub fn rater_count(&self) -> usize {
        self.raters().len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&EntryKey, Rating)> {
        self.entries.iter().map(|(k, r)| (k, *r))
    }

    pub fn remove_rater(&mut self, rater: &str) {
        self.entries.retain(|k, _| k.rater != rater);
    }

    /// Ratings of every model statement `(level, id)` missing for some rater.
    pub fn missing_entries(&self, model: &MaturityModel) -> Vec<EntryKey> {
        let mut missing = Vec::new();
        for rater in self.raters() {
            for (level, statement) in model.statement_keys() {
                let key = EntryKey::new(rater, level, statement);
                if !self.entries.contains_key(&key) {
                    missing.push(key);
                }
            }
        }
        missing
    }

    /// Checks that every entry names an assessed statement of `model` and
    /// that every rater rated every such statement.
    pub fn check_complete(&self, model: &MaturityModel) -> Result<(), ScoringError> {
        if self.is_empty() {
            return Err(ScoringError::EmptySheet);
        }
        if let Some(key) = self.entries.keys().find(|k| {
            k.level < FIRST_ASSESSED_LEVEL || model.statement(k.level, k.statement).is_none()
        }) {
            return Err(ScoringError::UnknownStatement(key.clone()));
        }
        let missing = self.missing_entries(model);
        if missing.is_empty() {
            Ok(())
        } else {
            Err(ScoringError::Incomplete(missing))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationMethod {
    /// Lower median of the non-zero ratings.
    #[default]
    MedianConservative,
    /// Arithmetic mean of the non-zero ratings, rounded half up.
    MeanRoundHalfUp,
}

impl fmt::Display for AggregationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggregationMethod::MedianConservative => f.write_str("median-conservative"),
            AggregationMethod::MeanRoundHalfUp => f.write_str("mean-round-half-up"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InapplicableRule {
    /// A statement is consolidated to 0 when strictly more than half of the
    /// raters rated it 0.
    #[default]
    MajorityZeroMeansInapplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AggregationPolicy {
    pub method: AggregationMethod,
    pub inapplicable_rule: InapplicableRule,
}

impl AggregationPolicy {
    pub fn new(method: AggregationMethod) -> Self {
        Self {
            method,
            inapplicable_rule: InapplicableRule::MajorityZeroMeansInapplicable,
        }
    }

    /// Consolidates one statement's ratings from all raters.
    ///
    /// # Panics
    ///
    /// Panics if `ratings` is empty.
    pub fn consolidate(&self, ratings: &[Rating]) -> Rating {
        assert!(!ratings.is_empty(), "cannot consolidate zero ratings");
        let zeros = ratings.iter().filter(|r| r.0 == 0).count();
        if 2 * zeros > ratings.len() {
            return Rating::INAPPLICABLE;
        }
        let mut rated: Vec<u8> = ratings.iter().map(|r| r.0).filter(|&v| v != 0).collect();
        rated.sort_unstable();
        let value = match self.method {
            AggregationMethod::MedianConservative => rated[(rated.len() - 1) / 2],
            AggregationMethod::MeanRoundHalfUp => {
                let sum: usize = rated.iter().map(|&v| usize::from(v)).sum();
                let n = rated.len();
                ((2 * sum + n) / (2 * n)) as u8
            }
        };
        Rating(value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregatedStatement {
    pub id: u32,
    pub rating: Rating,
    /// Every rater's rating for the statement, sorted ascending.
    pub rater_ratings: Vec<Rating>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregatedLevel {
    pub level: u8,
    pub statements: Vec<AggregatedStatement>,
}

impl AggregatedLevel {
    pub fn ratings(&self) -> impl Iterator<Item = Rating> + '_ {
        self.statements.iter().map(|s| s.rating)
    }
}

/// One consolidated rating per assessed statement, in model order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregatedRatings {
    pub institution: String,
    pub policy: AggregationPolicy,
    pub rater_count: usize,
    pub levels: Vec<AggregatedLevel>,
}

impl AggregatedRatings {
    pub fn level(&self, number: u8) -> Option<&AggregatedLevel> {
        self.levels.iter().find(|l| l.level == number)
    }

    pub fn level_mut(&mut self, number: u8) -> Option<&mut AggregatedLevel> {
        self.levels.iter_mut().find(|l| l.level == number)
    }
}

/// Consolidates every rater's answers into one rating per statement.
///
/// The sheet must be complete: every rater rated every statement of levels
/// 2 to 5. The result does not depend on rater order.
pub fn aggregate_ratings(
    sheet: &ResponseSheet,
    model: &MaturityModel,
    policy: AggregationPolicy,
) -> Result<AggregatedRatings, ScoringError> {
    sheet.check_complete(model)?;
    let raters = sheet.raters();

    let levels = model
        .assessed_levels()
        .map(|level| {
            let statements = level
                .statements
                .iter()
                .map(|stmt| {
                    let mut rater_ratings: Vec<Rating> = raters
                        .iter()
                        .map(|r| {
                            sheet
                                .rating(r, level.number, stmt.id)
                                .expect("completeness checked")
                        })
                        .collect();
                    rater_ratings.sort_unstable();
                    AggregatedStatement {
                        id: stmt.id,
                        rating: policy.consolidate(&rater_ratings),
                        rater_ratings,
                    }
                })
                .collect();
            AggregatedLevel {
                level: level.number,
                statements,
            }
        })
        .collect();

    Ok(AggregatedRatings {
        institution: sheet.institution().to_string(),
        policy,
        rater_count: raters.len(),
        levels,
    })
}

/// Number of achieved statements at `level`.
pub fn nas(agg: &AggregatedRatings, level: u8) -> Result<usize, ScoringError> {
    let lvl = agg
        .level(level)
        .filter(|l| l.level >= FIRST_ASSESSED_LEVEL)
        .ok_or(ScoringError::UnknownLevel(level))?;
    Ok(lvl.ratings().filter(|&r| is_achieved(r)).count())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelResult {
    pub level: u8,
    pub name: String,
    pub tns: usize,
    pub nas: usize,
    pub pt: usize,
    pub passed: bool,
    /// Achieved statements whose consolidated rating is Inapplicable.
    pub inapplicable_achieved: usize,
    /// Lower median of the level's consolidated ratings.
    pub attainment: Rating,
    pub attainment_label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessmentResult {
    pub institution: String,
    pub policy: AggregationPolicy,
    pub rater_count: usize,
    pub levels: Vec<LevelResult>,
    pub maturity_level: u8,
    pub maturity_name: String,
    /// Name of the unassessed level 1, the fallback verdict.
    pub baseline_name: String,
}

impl AssessmentResult {
    pub fn level(&self, number: u8) -> Option<&LevelResult> {
        self.levels.iter().find(|l| l.level == number)
    }

    pub fn nas_vector(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.nas).collect()
    }
}

/// Scores each assessed level and determines the staged maturity level.
pub fn assess(
    agg: &AggregatedRatings,
    model: &MaturityModel,
) -> Result<AssessmentResult, ScoringError> {
    let assessed: Vec<u8> = model.assessed_levels().map(|l| l.number).collect();
    let covered: Vec<u8> = agg.levels.iter().map(|l| l.level).collect();
    if assessed != covered {
        return Err(ScoringError::CoverageMismatch(format!(
            "model assesses levels {assessed:?}, ratings cover {covered:?}"
        )));
    }

    let mut levels = Vec::with_capacity(assessed.len());
    for (model_level, agg_level) in model.assessed_levels().zip(&agg.levels) {
        let expected: Vec<u32> = model_level.statements.iter().map(|s| s.id).collect();
        let actual: Vec<u32> = agg_level.statements.iter().map(|s| s.id).collect();
        if expected != actual {
            return Err(ScoringError::CoverageMismatch(format!(
                "level {} statements differ from the model",
                model_level.number
            )));
        }

        let tns = model_level.tns();
        let nas = nas(agg, model_level.number)?;
        let pt = pass_threshold(tns);
        let inapplicable_achieved = agg_level.ratings().filter(|r| r.0 == 0).count();
        let mut sorted: Vec<Rating> = agg_level.ratings().collect();
        sorted.sort_unstable();
        let attainment = sorted[(sorted.len() - 1) / 2];

        levels.push(LevelResult {
            level: model_level.number,
            name: model_level.name.clone(),
            tns,
            nas,
            pt,
            passed: nas >= pt,
            inapplicable_achieved,
            attainment,
            attainment_label: attainment.anchor().to_string(),
        });
    }

    let maturity_level = levels
        .iter()
        .take_while(|l| l.passed)
        .last()
        .map_or(1, |l| l.level);
    let maturity_name = model
        .level_name(maturity_level)
        .unwrap_or_default()
        .to_string();

    Ok(AssessmentResult {
        institution: agg.institution.clone(),
        policy: agg.policy,
        rater_count: agg.rater_count,
        levels,
        maturity_level,
        maturity_name,
        baseline_name: model.level_name(1).unwrap_or_default().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_mlmm;

    fn r(v: u8) -> Rating {
        Rating::new(v).unwrap()
    }

    fn rs(vs: &[u8]) -> Vec<Rating> {
        vs.iter().map(|&v| r(v)).collect()
    }

    /// Builds aggregated ratings over the default model where level `j`
    /// has the first `nas[j]` statements rated 4 and the rest rated 1.
    fn agg_with_nas(nas: [usize; 4]) -> AggregatedRatings {
        let model = default_mlmm();
        let levels = model
            .assessed_levels()
            .zip(nas)
            .map(|(l, achieved)| AggregatedLevel {
                level: l.number,
                statements: l
                    .statements
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let v = if i < achieved { 4 } else { 1 };
                        AggregatedStatement {
                            id: s.id,
                            rating: r(v),
                            rater_ratings: vec![r(v)],
                        }
                    })
                    .collect(),
            })
            .collect();
        AggregatedRatings {
            institution: "test".into(),
            policy: AggregationPolicy::default(),
            rater_count: 1,
            levels,
        }
    }

    #[test]
    fn rating_range() {
        assert!(Rating::new(4).is_ok());
        assert_eq!(Rating::new(5), Err(ScoringError::InvalidRating(5)));
        assert_eq!(r(3).anchor(), "Largely Achieved");
        assert_eq!(r(0).anchor(), "Inapplicable");
    }

    #[test]
    fn percentage_bands() {
        let p = |x| pct_to_rating(Achievement::Percent(x)).unwrap().value();
        assert_eq!(p(85.0), 4);
        assert_eq!(p(80.0), 4);
        assert_eq!(p(100.0), 4);
        assert_eq!(p(79.95), 3);
        assert_eq!(p(70.0), 3);
        assert_eq!(p(66.7), 3);
        assert_eq!(p(66.65), 2);
        assert_eq!(p(50.0), 2);
        assert_eq!(p(33.3), 2);
        assert_eq!(p(33.29), 1);
        assert_eq!(p(10.0), 1);
        assert_eq!(p(0.0), 1);
        assert_eq!(
            pct_to_rating(Achievement::NotApplicable).unwrap().value(),
            0
        );
    }

    #[test]
    fn percentage_out_of_range() {
        for bad in [-0.1, 100.01, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                pct_to_rating(Achievement::Percent(bad)),
                Err(ScoringError::InvalidPercentage(_))
            ));
        }
    }

    #[test]
    fn achievement_predicate() {
        assert!(is_achieved(r(3)));
        assert!(is_achieved(r(4)));
        assert!(is_achieved(r(0)));
        assert!(!is_achieved(r(2)));
        assert!(!is_achieved(r(1)));
    }

    #[test]
    fn thresholds() {
        assert_eq!(pass_threshold(18), 14);
        assert_eq!(pass_threshold(20), 16);
        assert_eq!(pass_threshold(17), 14);
        assert_eq!(pass_threshold(0), 0);
        assert_eq!(pass_threshold(5), 4);
        // 0.8 * 15 = 12 exactly; 0.8 * 25 = 20
        assert_eq!(pass_threshold(15), 12);
        assert_eq!(pass_threshold(25), 20);
    }

    #[test]
    fn threshold_matches_float_rounding() {
        for tns in 0..2000usize {
            let float = (0.8 * tns as f64 + 0.5).floor() as usize;
            // 0.8 is not exact in binary; only compare where we are far from .5
            let frac = (0.8 * tns as f64).fract();
            if (frac - 0.5).abs() > 1e-6 {
                assert_eq!(pass_threshold(tns), float, "tns={tns}");
            }
        }
    }

    #[test]
    fn consolidate_median() {
        let p = AggregationPolicy::new(AggregationMethod::MedianConservative);
        assert_eq!(p.consolidate(&rs(&[2, 3, 4])), r(3));
        assert_eq!(p.consolidate(&rs(&[3, 4])), r(3));
        assert_eq!(p.consolidate(&rs(&[0, 0, 0, 3])), r(0));
        // exactly half zero: not a majority, zeros are ignored
        assert_eq!(p.consolidate(&rs(&[0, 0, 4, 4])), r(4));
        assert_eq!(p.consolidate(&rs(&[1, 2, 3, 4])), r(2));
        assert_eq!(p.consolidate(&rs(&[0])), r(0));
    }

    #[test]
    fn consolidate_mean() {
        let p = AggregationPolicy::new(AggregationMethod::MeanRoundHalfUp);
        assert_eq!(p.consolidate(&rs(&[3, 4])), r(4));
        assert_eq!(p.consolidate(&rs(&[2, 3])), r(3));
        assert_eq!(p.consolidate(&rs(&[3, 3, 4])), r(3));
        assert_eq!(p.consolidate(&rs(&[0, 1, 1, 2])), r(1));
        assert_eq!(p.consolidate(&rs(&[0, 0, 0, 3])), r(0));
    }

    fn full_sheet(raters: &[(&str, u8)]) -> ResponseSheet {
        let model = default_mlmm();
        let mut sheet = ResponseSheet::new("inst");
        for &(rater, v) in raters {
            for (level, stmt) in model.statement_keys() {
                sheet
                    .insert(EntryKey::new(rater, level, stmt), r(v))
                    .unwrap();
            }
        }
        sheet
    }

    #[test]
    fn single_rater_identity() {
        let model = default_mlmm();
        let mut sheet = ResponseSheet::new("one");
        for (i, (level, stmt)) in model.statement_keys().enumerate() {
            sheet
                .insert(EntryKey::new("solo", level, stmt), r((i % 5) as u8))
                .unwrap();
        }
        let agg = aggregate_ratings(&sheet, &model, AggregationPolicy::default()).unwrap();
        for lvl in &agg.levels {
            for s in &lvl.statements {
                assert_eq!(Some(s.rating), sheet.rating("solo", lvl.level, s.id));
            }
        }
    }

    #[test]
    fn aggregate_errors() {
        let model = default_mlmm();
        let empty = ResponseSheet::new("x");
        assert_eq!(
            aggregate_ratings(&empty, &model, AggregationPolicy::default()),
            Err(ScoringError::EmptySheet)
        );

        let mut sheet = full_sheet(&[("a", 3), ("b", 4)]);
        sheet.remove_rater("b");
        sheet.insert(EntryKey::new("b", 2, 5), r(4)).unwrap();
        let err = aggregate_ratings(&sheet, &model, AggregationPolicy::default()).unwrap_err();
        let ScoringError::Incomplete(missing) = err else {
            panic!("expected incomplete");
        };
        assert_eq!(missing.len(), 74);
        assert!(missing.iter().all(|k| k.rater == "b"));

        let mut sheet = full_sheet(&[("a", 3)]);
        sheet.insert(EntryKey::new("a", 2, 19), r(3)).unwrap();
        assert!(matches!(
            aggregate_ratings(&sheet, &model, AggregationPolicy::default()),
            Err(ScoringError::UnknownStatement(_))
        ));
    }

    #[test]
    fn duplicate_entry_rejected() {
        let mut sheet = ResponseSheet::new("x");
        sheet.insert(EntryKey::new("a", 2, 1), r(3)).unwrap();
        assert!(matches!(
            sheet.insert(EntryKey::new("a", 2, 1), r(4)),
            Err(ScoringError::DuplicateEntry(_))
        ));
    }

    #[test]
    fn nas_counts() {
        let agg = agg_with_nas([18, 20, 20, 17]);
        assert_eq!(nas(&agg, 2).unwrap(), 18);
        assert_eq!(nas(&agg, 1), Err(ScoringError::UnknownLevel(1)));
        assert_eq!(nas(&agg, 6), Err(ScoringError::UnknownLevel(6)));

        let mut agg = agg_with_nas([0, 0, 0, 0]);
        let lvl = agg.level_mut(2).unwrap();
        lvl.statements.truncate(5);
        for (s, v) in lvl.statements.iter_mut().zip([3, 3, 0, 2, 1]) {
            s.rating = r(v);
        }
        assert_eq!(nas(&agg, 2).unwrap(), 3);
    }

    #[test]
    fn staged_levels() {
        let model = default_mlmm();
        let cases = [
            ([14, 15, 1, 1], 2, "Established"),
            ([17, 2, 0, 0], 2, "Established"),
            ([18, 20, 20, 17], 5, "Continuous Improvement"),
            ([10, 20, 20, 17], 1, "Preliminary"),
            ([14, 16, 15, 17], 3, "Defined"),
            ([14, 16, 16, 13], 4, "Structured"),
        ];
        for (nas_vec, level, name) in cases {
            let res = assess(&agg_with_nas(nas_vec), &model).unwrap();
            assert_eq!(res.nas_vector(), nas_vec.to_vec());
            assert_eq!(res.maturity_level, level, "{nas_vec:?}");
            assert_eq!(res.maturity_name, name);
        }
    }

    #[test]
    fn level_results_carry_thresholds() {
        let res = assess(&agg_with_nas([14, 15, 1, 1]), &default_mlmm()).unwrap();
        let pts: Vec<usize> = res.levels.iter().map(|l| l.pt).collect();
        assert_eq!(pts, vec![14, 16, 16, 14]);
        let passed: Vec<bool> = res.levels.iter().map(|l| l.passed).collect();
        assert_eq!(passed, vec![true, false, false, false]);
    }

    #[test]
    fn attainment_is_lower_median() {
        let model = default_mlmm();
        let mut agg = agg_with_nas([18, 20, 20, 17]);
        let l2 = agg.level_mut(2).unwrap();
        // nine 3s and nine 4s: lower median is 3
        for s in l2.statements.iter_mut().take(9) {
            s.rating = r(3);
        }
        let res = assess(&agg, &model).unwrap();
        assert_eq!(res.level(2).unwrap().attainment_label, "Largely Achieved");
        assert_eq!(
            res.level(3).unwrap().attainment_label,
            "Completely Achieved"
        );
    }

    #[test]
    fn inapplicable_annotation() {
        let model = default_mlmm();
        let mut agg = agg_with_nas([18, 20, 20, 17]);
        agg.level_mut(4).unwrap().statements[0].rating = r(0);
        agg.level_mut(4).unwrap().statements[1].rating = r(0);
        let res = assess(&agg, &model).unwrap();
        assert_eq!(res.level(4).unwrap().inapplicable_achieved, 2);
        assert_eq!(res.level(4).unwrap().nas, 20);
    }

    #[test]
    fn coverage_mismatch() {
        let model = default_mlmm();
        let mut agg = agg_with_nas([18, 20, 20, 17]);
        agg.levels.pop();
        assert!(matches!(
            assess(&agg, &model),
            Err(ScoringError::CoverageMismatch(_))
        ));
        let mut agg = agg_with_nas([18, 20, 20, 17]);
        agg.level_mut(3).unwrap().statements[0].id = 99;
        assert!(matches!(
            assess(&agg, &model),
            Err(ScoringError::CoverageMismatch(_))
        ));
    }

    #[test]
    fn policy_serializes_kebab_case() {
        let json = serde_json::to_string(&AggregationPolicy::default()).unwrap();
        assert_eq!(
            json,
            r#"{"method":"median-conservative","inapplicable_rule":"majority-zero-means-inapplicable"}"#
        );
    }
}
