//! Survey response files and their binding to a maturity model.
//!
//! Two equivalent encodings are accepted:
//!
//! * CSV with the exact header `rater_id,level,statement_id,rating`, one
//!   rating per line, LF or CRLF line endings.
//! * JSON: an array of `{"rater_id": str, "level": int, "statement_id": int, "rating": int}`.
//!
//! Parsing never fails on a bad row; each rejected row yields exactly one
//! error diagnostic. Only a document that cannot be read at all (no CSV
//! header, JSON that is not an array) is an error.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::diagnostic::Diagnostic;
use crate::model::{MaturityModel, FIRST_ASSESSED_LEVEL, TOP_LEVEL};
use crate::scoring::{list_missing, EntryKey, Rating, ResponseSheet};

pub const CSV_HEADER: [&str; 4] = ["rater_id", "level", "statement_id", "rating"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("unreadable response document: {0}")]
    Unreadable(String),
    #[error("unknown response format {0:?} (expected csv or json)")]
    UnknownFormat(String),
    #[error("responses reference statements outside the model: {}", first_error(.0))]
    Binding(Vec<Diagnostic>),
    #[error("responses are incomplete; missing {}", list_missing(.0))]
    Incomplete(Vec<EntryKey>),
    #[error("no usable raters remain")]
    NoUsableRaters,
}

fn first_error(diagnostics: &[Diagnostic]) -> String {
    let shown: Vec<String> = diagnostics
        .iter()
        .filter(|d| d.is_error())
        .take(5)
        .map(|d| format!("{}: {}", d.location, d.message))
        .collect();
    shown.join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Json,
}

impl FromStr for InputFormat {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(InputFormat::Csv),
            "json" => Ok(InputFormat::Json),
            _ => Err(IngestError::UnknownFormat(s.to_string())),
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::Csv => "csv",
            InputFormat::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub rater_id: String,
    pub level: u8,
    pub statement_id: u32,
    pub rating: Rating,
}

impl ResponseRecord {
    pub fn key(&self) -> EntryKey {
        EntryKey::new(self.rater_id.clone(), self.level, self.statement_id)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedResponses {
    pub records: Vec<ResponseRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Raw field values before type checking. `None` means absent or blank.
struct RawRow<'a> {
    rater_id: Option<&'a str>,
    level: Field,
    statement_id: Field,
    rating: Field,
}

enum Field {
    Missing,
    Int(i64),
    Invalid(String),
}

impl Field {
    fn from_text(s: &str) -> Self {
        if s.is_empty() {
            Field::Missing
        } else {
            s.parse::<i64>()
                .map_or_else(|_| Field::Invalid(format!("{s:?}")), Field::Int)
        }
    }

    fn from_json(v: Option<&Value>) -> Self {
        match v {
            None | Some(Value::Null) => Field::Missing,
            Some(Value::Number(n)) => match n.as_i64() {
                Some(i) => Field::Int(i),
                None if n.is_u64() => Field::Int(i64::MAX),
                None => Field::Invalid(n.to_string()),
            },
            Some(Value::String(s)) if s.is_empty() => Field::Missing,
            Some(other) => Field::Invalid(other.to_string()),
        }
    }
}

fn int_field(name: &str, field: &Field) -> Result<i64, String> {
    match field {
        Field::Missing => Err(format!("{name} is blank")),
        Field::Invalid(text) => Err(format!("{name} is not an integer: {text}")),
        Field::Int(v) => Ok(*v),
    }
}

fn check_row(raw: &RawRow<'_>) -> Result<ResponseRecord, String> {
    let rater_id = match raw.rater_id {
        Some(r) if !r.trim().is_empty() => r.to_string(),
        _ => return Err("rater_id is blank".to_string()),
    };
    let level = int_field("level", &raw.level)?;
    if !(i64::from(FIRST_ASSESSED_LEVEL)..=i64::from(TOP_LEVEL)).contains(&level) {
        return Err(format!(
            "level out of range {FIRST_ASSESSED_LEVEL}..{TOP_LEVEL}: {level}"
        ));
    }
    let statement_id = int_field("statement_id", &raw.statement_id)?;
    if !(1..=i64::from(u32::MAX)).contains(&statement_id) {
        return Err(format!(
            "statement_id must be a positive integer: {statement_id}"
        ));
    }
    let rating = match &raw.rating {
        Field::Missing => {
            return Err("rating is blank; record 0 for an inapplicable statement".to_string())
        }
        other => int_field("rating", other)?,
    };
    if !(0..=i64::from(Rating::MAX)).contains(&rating) {
        return Err(format!("rating out of range 0..4: {rating}"));
    }
    Ok(ResponseRecord {
        rater_id,
        level: level as u8,
        statement_id: statement_id as u32,
        rating: Rating::new(rating as u8).expect("range checked"),
    })
}

/// Accumulates records, rejecting later duplicates of a key.
#[derive(Default)]
struct Collector {
    out: ParsedResponses,
    seen: HashSet<EntryKey>,
}

impl Collector {
    fn push(&mut self, location: String, row: Result<ResponseRecord, String>) {
        match row {
            Err(message) => self
                .out
                .diagnostics
                .push(Diagnostic::error(location, message)),
            Ok(record) => {
                let key = record.key();
                if self.seen.contains(&key) {
                    self.out.diagnostics.push(Diagnostic::error(
                        location,
                        format!("duplicate rating for {key}"),
                    ));
                } else {
                    self.seen.insert(key);
                    self.out.records.push(record);
                }
            }
        }
    }
}

pub fn parse_responses(
    document: &str,
    format: InputFormat,
) -> Result<ParsedResponses, IngestError> {
    match format {
        InputFormat::Csv => parse_csv(document),
        InputFormat::Json => parse_json(document),
    }
}

fn parse_csv(document: &str) -> Result<ParsedResponses, IngestError> {
    let document = document.strip_prefix('\u{feff}').unwrap_or(document);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(document.as_bytes());
    let mut rows = reader.records();

    match rows.next() {
        None => return Err(IngestError::Unreadable("missing CSV header".into())),
        Some(Err(e)) => return Err(IngestError::Unreadable(e.to_string())),
        Some(Ok(header)) => {
            if header.iter().ne(CSV_HEADER) {
                return Err(IngestError::Unreadable(format!(
                    "CSV header must be `{}`, found `{}`",
                    CSV_HEADER.join(","),
                    header.iter().collect::<Vec<_>>().join(",")
                )));
            }
        }
    }

    let mut collector = Collector::default();
    for row in rows {
        let record = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                collector.push(format!("line {line}"), Err(e.to_string()));
                continue;
            }
        };
        let line = record.position().map_or(0, |p| p.line());
        let location = format!("line {line}");
        if record.len() != CSV_HEADER.len() {
            collector.push(
                location,
                Err(format!("expected 4 fields, found {}", record.len())),
            );
            continue;
        }
        let raw = RawRow {
            rater_id: Some(&record[0]),
            level: Field::from_text(&record[1]),
            statement_id: Field::from_text(&record[2]),
            rating: Field::from_text(&record[3]),
        };
        collector.push(location, check_row(&raw));
    }
    Ok(collector.out)
}

fn parse_json(document: &str) -> Result<ParsedResponses, IngestError> {
    let value: Value =
        serde_json::from_str(document).map_err(|e| IngestError::Unreadable(e.to_string()))?;
    let Value::Array(items) = value else {
        return Err(IngestError::Unreadable(
            "JSON responses must be an array of records".into(),
        ));
    };

    let mut collector = Collector::default();
    for (i, item) in items.iter().enumerate() {
        let location = format!("[{i}]");
        let Value::Object(obj) = item else {
            collector.push(location, Err("record is not an object".into()));
            continue;
        };
        if let Some(unknown) = obj.keys().find(|k| !CSV_HEADER.contains(&k.as_str())) {
            collector.push(location, Err(format!("unknown field {unknown:?}")));
            continue;
        }
        let rater_id = match obj.get("rater_id") {
            Some(Value::String(s)) => Some(s.as_str()),
            None | Some(Value::Null) => None,
            Some(_) => {
                collector.push(location, Err("rater_id must be a string".into()));
                continue;
            }
        };
        let raw = RawRow {
            rater_id,
            level: Field::from_json(obj.get("level")),
            statement_id: Field::from_json(obj.get("statement_id")),
            rating: Field::from_json(obj.get("rating")),
        };
        collector.push(location, check_row(&raw));
    }
    Ok(collector.out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BindingMode {
    /// Every rater must rate every assessed statement.
    #[default]
    Strict,
    /// Raters with missing ratings are dropped with a warning.
    Lenient,
}

impl FromStr for BindingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(BindingMode::Strict),
            "lenient" => Ok(BindingMode::Lenient),
            _ => Err(format!("unknown binding mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundSheet {
    pub sheet: ResponseSheet,
    pub diagnostics: Vec<Diagnostic>,
}

/// Builds a [`ResponseSheet`] from parsed records and checks it against the
/// model.
///
/// Records naming a statement the model does not have are fatal in both
/// modes.
pub fn bind_sheet(
    records: &[ResponseRecord],
    model: &MaturityModel,
    mode: BindingMode,
    institution: &str,
) -> Result<BoundSheet, IngestError> {
    let mut sheet = ResponseSheet::new(institution);
    let mut errors = Vec::new();
    for record in records {
        let key = record.key();
        let location = format!("rater {}", record.rater_id);
        if model.statement(record.level, record.statement_id).is_none() {
            errors.push(Diagnostic::error(
                location,
                format!(
                    "level {} statement {} is not in the model",
                    record.level, record.statement_id
                ),
            ));
        } else if let Err(e) = sheet.insert(key, record.rating) {
            errors.push(Diagnostic::error(location, e.to_string()));
        }
    }
    if !errors.is_empty() {
        return Err(IngestError::Binding(errors));
    }
    if sheet.is_empty() {
        return Err(IngestError::NoUsableRaters);
    }

    let missing = sheet.missing_entries(model);
    let mut diagnostics = Vec::new();
    if !missing.is_empty() {
        if mode == BindingMode::Strict {
            return Err(IngestError::Incomplete(missing));
        }
        let mut per_rater: BTreeMap<String, usize> = BTreeMap::new();
        for key in missing {
            *per_rater.entry(key.rater).or_default() += 1;
        }
        let total = model.statement_keys().count();
        for (rater, count) in per_rater {
            sheet.remove_rater(&rater);
            diagnostics.push(Diagnostic::warning(
                format!("rater {rater}"),
                format!("dropped incomplete rater: missing {count} of {total} statements"),
            ));
        }
        if sheet.is_empty() {
            return Err(IngestError::NoUsableRaters);
        }
    }

    Ok(BoundSheet { sheet, diagnostics })
}
