//! The staged maturity model: five ordered levels, each holding the
//! questionnaire statements that must be satisfied to reach it.
//!
//! Models are plain data loaded from a JSON document:
//!
//! ```json
//! {
//!   "name": "...",
//!   "csfs": [{ "id": 1, "label": "..." }],
//!   "levels": [{ "number": 1, "name": "Preliminary", "statements": [] }, ...]
//! }
//! ```
//!
//! Level 1 is never assessed and must list no statements; levels 2 to 5 each
//! need at least one. Statements carry an opaque critical-success-factor tag.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostic::{has_errors, Diagnostic};

pub const LEVEL_COUNT: usize = 5;
pub const FIRST_ASSESSED_LEVEL: u8 = 2;
pub const TOP_LEVEL: u8 = 5;

/// Names of the five levels in the built-in model, lowest first.
pub const DEFAULT_LEVEL_NAMES: [&str; LEVEL_COUNT] = [
    "Preliminary",
    "Established",
    "Defined",
    "Structured",
    "Continuous Improvement",
];

/// Statement counts of the built-in questionnaire, level 1 first.
pub const DEFAULT_STATEMENT_COUNTS: [usize; LEVEL_COUNT] = [0, 18, 20, 20, 17];

pub const DEFAULT_CSF_COUNT: u32 = 9;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid model: {}", summarize(.0))]
    Invalid(Vec<Diagnostic>),
}

fn summarize(diagnostics: &[Diagnostic]) -> String {
    let errors: Vec<String> = diagnostics
        .iter()
        .filter(|d| d.is_error())
        .map(|d| format!("{}: {}", d.location, d.message))
        .collect();
    errors.join("; ")
}

/// Critical success factor tag. The label is opaque to the engine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsfTag {
    pub id: u32,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Statement {
    pub id: u32,
    pub text: String,
    /// Id of the [`CsfTag`] this statement belongs to.
    pub csf: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Level {
    pub number: u8,
    pub name: String,
    #[serde(default)]
    pub statements: Vec<Statement>,
}

impl Level {
    /// Total number of statements at this level.
    pub fn tns(&self) -> usize {
        self.statements.len()
    }

    pub fn statement(&self, id: u32) -> Option<&Statement> {
        self.statements.iter().find(|s| s.id == id)
    }

    pub fn is_assessed(&self) -> bool {
        self.number >= FIRST_ASSESSED_LEVEL
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaturityModel {
    pub name: String,
    pub csfs: Vec<CsfTag>,
    pub levels: Vec<Level>,
}

impl MaturityModel {
    pub fn level(&self, number: u8) -> Option<&Level> {
        self.levels.iter().find(|l| l.number == number)
    }

    /// Levels 2..=5 in ascending order.
    pub fn assessed_levels(&self) -> impl Iterator<Item = &Level> {
        self.levels.iter().filter(|l| l.is_assessed())
    }

    pub fn level_name(&self, number: u8) -> Option<&str> {
        self.level(number).map(|l| l.name.as_str())
    }

    pub fn statement(&self, level: u8, id: u32) -> Option<&Statement> {
        self.level(level).and_then(|l| l.statement(id))
    }

    pub fn total_statements(&self) -> usize {
        self.levels.iter().map(Level::tns).sum()
    }

    /// Every assessed `(level, statement id)` pair in model order.
    pub fn statement_keys(&self) -> impl Iterator<Item = (u8, u32)> + '_ {
        self.assessed_levels()
            .flat_map(|l| l.statements.iter().map(move |s| (l.number, s.id)))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("model serializes");
        out.push('\n');
        out
    }
}

/// Parses and validates a JSON model document.
pub fn load_model(document: &str) -> Result<MaturityModel, ModelError> {
    let model: MaturityModel = serde_json::from_str(document)?;
    let diagnostics = validate_model(&model);
    if has_errors(&diagnostics) {
        return Err(ModelError::Invalid(diagnostics));
    }
    Ok(model)
}

/// The built-in five-level model.
///
/// The published questionnaire items are not available, so statement texts
/// are placeholders and the nine CSF tags are numbered placeholders. Within
/// each level statements are assigned to CSFs round-robin.
pub fn default_mlmm() -> MaturityModel {
    let csfs = (1..=DEFAULT_CSF_COUNT)
        .map(|id| CsfTag {
            id,
            label: format!("CSF {id}"),
        })
        .collect();

    let levels = DEFAULT_LEVEL_NAMES
        .iter()
        .zip(DEFAULT_STATEMENT_COUNTS)
        .enumerate()
        .map(|(idx, (name, count))| {
            let number = idx as u8 + 1;
            let statements = (1..=count as u32)
                .map(|id| Statement {
                    id,
                    text: format!("{name} statement {id}"),
                    csf: (id - 1) % DEFAULT_CSF_COUNT + 1,
                })
                .collect();
            Level {
                number,
                name: (*name).to_string(),
                statements,
            }
        })
        .collect();

    MaturityModel {
        name: "M-Learning Maturity Model".to_string(),
        csfs,
        levels,
    }
}

/// Checks every model invariant. Returns an empty list for a valid model.
pub fn validate_model(model: &MaturityModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    if model.name.trim().is_empty() {
        out.push(Diagnostic::error("name", "model name must not be empty"));
    }

    let mut csf_ids = HashSet::new();
    for (i, csf) in model.csfs.iter().enumerate() {
        if csf.id == 0 {
            out.push(Diagnostic::error(
                format!("csfs[{i}].id"),
                "CSF id must be a positive integer",
            ));
        }
        if !csf_ids.insert(csf.id) {
            out.push(Diagnostic::error(
                format!("csfs[{i}].id"),
                format!("duplicate CSF id {}", csf.id),
            ));
        }
        if csf.label.trim().is_empty() {
            out.push(Diagnostic::error(
                format!("csfs[{i}].label"),
                "CSF label must not be empty",
            ));
        }
    }

    if model.levels.len() != LEVEL_COUNT {
        out.push(Diagnostic::error(
            "levels",
            format!(
                "model must have exactly {LEVEL_COUNT} levels, found {}",
                model.levels.len()
            ),
        ));
    }

    let mut names = HashSet::new();
    let mut used_csfs = BTreeSet::new();
    for (i, level) in model.levels.iter().enumerate() {
        let at = format!("levels[{i}]");
        let expected = i + 1;
        if usize::from(level.number) != expected || expected > LEVEL_COUNT {
            out.push(Diagnostic::error(
                format!("{at}.number"),
                format!(
                    "level numbers must run 1..=5 in ascending order; expected {expected}, found {}",
                    level.number
                ),
            ));
        }
        if level.name.trim().is_empty() {
            out.push(Diagnostic::error(
                format!("{at}.name"),
                "level name must not be empty",
            ));
        } else if !names.insert(level.name.as_str()) {
            out.push(Diagnostic::error(
                format!("{at}.name"),
                format!("duplicate level name {:?}", level.name),
            ));
        }

        if level.number == 1 && !level.statements.is_empty() {
            out.push(Diagnostic::error(
                format!("{at}.statements"),
                format!(
                    "level 1 is not assessed and must list no statements, found {}",
                    level.statements.len()
                ),
            ));
        } else if level.number >= FIRST_ASSESSED_LEVEL && level.statements.is_empty() {
            out.push(Diagnostic::error(
                format!("{at}.statements"),
                format!("level {} must list at least one statement", level.number),
            ));
        }

        let mut ids = HashSet::new();
        for (k, stmt) in level.statements.iter().enumerate() {
            let sat = format!("{at}.statements[{k}]");
            if stmt.id == 0 {
                out.push(Diagnostic::error(
                    format!("{sat}.id"),
                    "statement id must be a positive integer",
                ));
            }
            if !ids.insert(stmt.id) {
                out.push(Diagnostic::error(
                    format!("{sat}.id"),
                    format!(
                        "duplicate statement id {} in level {}",
                        stmt.id, level.number
                    ),
                ));
            }
            if stmt.text.trim().is_empty() {
                out.push(Diagnostic::error(
                    format!("{sat}.text"),
                    "statement text must not be empty",
                ));
            }
            if csf_ids.contains(&stmt.csf) {
                used_csfs.insert(stmt.csf);
            } else {
                out.push(Diagnostic::error(
                    format!("{sat}.csf"),
                    format!("references undeclared CSF id {}", stmt.csf),
                ));
            }
        }
    }

    for (i, csf) in model.csfs.iter().enumerate() {
        if !used_csfs.contains(&csf.id) {
            out.push(Diagnostic::warning(
                format!("csfs[{i}]"),
                format!("CSF {} is not referenced by any statement", csf.id),
            ));
        }
    }

    out
}
