//! Gap analysis and report rendering (text, markdown, JSON).

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agreement::AgreementReport;
use crate::model::MaturityModel;
use crate::scoring::{is_achieved, AggregatedRatings, AssessmentResult, Rating};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("assessment result does not match the ratings or model: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingStatement {
    pub id: u32,
    pub text: String,
    pub csf: u32,
    pub rating: Rating,
    /// Per-rater ratings, sorted ascending.
    pub rater_ratings: Vec<Rating>,
    /// Highest minus lowest rater rating.
    pub spread: u8,
}

/// Distance from the current maturity level to the next one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReport {
    pub target_level: u8,
    pub target_name: String,
    pub tns: usize,
    pub nas: usize,
    pub pt: usize,
    /// Additional achieved statements needed to pass the target level.
    pub shortfall: usize,
    /// Unachieved statements at the target level, lowest rating first.
    pub blocking_statements: Vec<BlockingStatement>,
}

/// Targets the lowest failed level. Returns `None` at the top level.
pub fn gap_analysis(
    result: &AssessmentResult,
    agg: &AggregatedRatings,
    model: &MaturityModel,
) -> Result<Option<GapReport>, ReportError> {
    let Some(target) = result.levels.iter().find(|l| !l.passed) else {
        return Ok(None);
    };
    let mismatch = |msg: String| ReportError::Mismatch(msg);

    let model_level = model
        .level(target.level)
        .ok_or_else(|| mismatch(format!("model has no level {}", target.level)))?;
    let agg_level = agg
        .level(target.level)
        .ok_or_else(|| mismatch(format!("ratings have no level {}", target.level)))?;
    if model_level.tns() != target.tns || agg_level.statements.len() != target.tns {
        return Err(mismatch(format!(
            "level {} statement counts differ",
            target.level
        )));
    }

    let mut blocking = Vec::new();
    let mut achieved = 0;
    for s in &agg_level.statements {
        if is_achieved(s.rating) {
            achieved += 1;
            continue;
        }
        let stmt = model_level
            .statement(s.id)
            .ok_or_else(|| mismatch(format!("level {} has no statement {}", target.level, s.id)))?;
        let lo = s.rater_ratings.iter().min().map_or(0, |r| r.value());
        let hi = s.rater_ratings.iter().max().map_or(0, |r| r.value());
        blocking.push(BlockingStatement {
            id: s.id,
            text: stmt.text.clone(),
            csf: stmt.csf,
            rating: s.rating,
            rater_ratings: s.rater_ratings.clone(),
            spread: hi - lo,
        });
    }
    if achieved != target.nas {
        return Err(mismatch(format!(
            "level {} NAS is {} but the ratings give {achieved}",
            target.level, target.nas
        )));
    }
    blocking.sort_by_key(|b| (b.rating, b.id));

    Ok(Some(GapReport {
        target_level: target.level,
        target_name: target.name.clone(),
        tns: target.tns,
        nas: target.nas,
        pt: target.pt,
        shortfall: target.pt.saturating_sub(target.nas),
        blocking_statements: blocking,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(format!("unknown report format {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedReport {
    pub format: ReportFormat,
    pub body: String,
}

/// Structured form of a rendered report; this is what the JSON format
/// serializes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub assessment: AssessmentResult,
    pub agreement: Option<AgreementReport>,
    pub gap: Option<GapReport>,
}

impl ReportDocument {
    pub fn from_json(body: &str) -> serde_json::Result<Self> {
        serde_json::from_str(body)
    }
}

pub fn render(
    result: &AssessmentResult,
    agreement: Option<&AgreementReport>,
    gap: Option<&GapReport>,
    format: ReportFormat,
) -> RenderedReport {
    let body = match format {
        ReportFormat::Json => {
            let doc = ReportDocument {
                assessment: result.clone(),
                agreement: agreement.cloned(),
                gap: gap.cloned(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => render_text(result, agreement, gap),
        ReportFormat::Markdown => render_markdown(result, agreement, gap),
    };
    RenderedReport { format, body }
}

/// Renders only the agreement section, for agreement-only runs.
pub fn render_agreement(agreement: &AgreementReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(agreement).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => {
            let mut out = String::new();
            text_agreement(&mut out, agreement);
            out
        }
        ReportFormat::Markdown => {
            let mut out = String::new();
            markdown_agreement(&mut out, agreement);
            out
        }
    }
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn ratings_list(ratings: &[Rating]) -> String {
    ratings
        .iter()
        .map(Rating::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn kappa_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |k| format!("{k:.3}"))
}

fn render_text(
    result: &AssessmentResult,
    agreement: Option<&AgreementReport>,
    gap: Option<&GapReport>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Maturity assessment: {}", result.institution);
    let _ = writeln!(
        out,
        "Raters: {}  Aggregation: {} ({})",
        result.rater_count,
        result.policy.method,
        kebab(&result.policy.inapplicable_rule)
    );
    out.push('\n');
    let _ = writeln!(
        out,
        "{:<24} {:>5} {:>10} {:>4}  {:<6} {:>12}",
        "Level", "Total", "Threshold", "NAS", "Result", "Inapplicable"
    );
    let _ = writeln!(
        out,
        "{:<24} {:>5} {:>10} {:>4}  {:<6} {:>12}",
        result.baseline_name, 0, "Not Valid", "-", "-", "-"
    );
    for l in &result.levels {
        let _ = writeln!(
            out,
            "{:<24} {:>5} {:>10} {:>4}  {:<6} {:>12}",
            l.name,
            l.tns,
            l.pt,
            l.nas,
            verdict(l.passed),
            l.inapplicable_achieved
        );
    }
    out.push('\n');
    let _ = writeln!(
        out,
        "Maturity level: {} ({})",
        result.maturity_level, result.maturity_name
    );
    for l in &result.levels {
        let _ = writeln!(
            out,
            "Level {} attainment: {} ({})",
            l.level, l.attainment_label, l.attainment
        );
    }

    if let Some(a) = agreement {
        out.push('\n');
        text_agreement(&mut out, a);
    }

    if let Some(g) = gap {
        out.push('\n');
        let _ = writeln!(out, "Gap to level {} ({})", g.target_level, g.target_name);
        let _ = writeln!(
            out,
            "  NAS {} of {}, threshold {}, shortfall {}",
            g.nas, g.tns, g.pt, g.shortfall
        );
        let _ = writeln!(
            out,
            "  Blocking statements ({}):",
            g.blocking_statements.len()
        );
        for b in &g.blocking_statements {
            let _ = writeln!(
                out,
                "    {:>3}  rating {}  raters [{}]  spread {}  csf {}  {}",
                b.id,
                b.rating,
                ratings_list(&b.rater_ratings),
                b.spread,
                b.csf,
                b.text
            );
        }
    } else {
        out.push('\n');
        out.push_str("No gap: every assessed level passed.\n");
    }
    out
}

fn text_agreement(out: &mut String, a: &AgreementReport) {
    let _ = writeln!(out, "Inter-rater agreement over {} items", a.items);
    let _ = writeln!(
        out,
        "  Cohen's kappa (pairwise): min {:.3}, max {:.3} over {} pairs",
        a.min_kappa,
        a.max_kappa,
        a.pairs.len()
    );
    let _ = writeln!(out, "  Fleiss' kappa: {:.3}", a.fleiss.value);
    let _ = writeln!(out, "  Overall band: {}", a.overall_band);
    let undefined = a.undefined_pairs().count();
    if undefined > 0 {
        let _ = writeln!(out, "  Undefined pairs (excluded): {undefined}");
    }
    out.push('\n');
    let _ = write!(out, "  {:>6}", "");
    for r in &a.raters {
        let _ = write!(out, " {r:>6}");
    }
    out.push('\n');
    for (i, row) in a.matrix().iter().enumerate() {
        let _ = write!(out, "  {:>6}", a.raters[i]);
        for (j, cell) in row.iter().enumerate() {
            let s = if i == j {
                "-".to_string()
            } else {
                kappa_cell(*cell)
            };
            let _ = write!(out, " {s:>6}");
        }
        out.push('\n');
    }
}

fn render_markdown(
    result: &AssessmentResult,
    agreement: Option<&AgreementReport>,
    gap: Option<&GapReport>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Maturity assessment: {}", result.institution);
    out.push('\n');
    let _ = writeln!(
        out,
        "Raters: {}. Aggregation: `{}` with `{}`.",
        result.rater_count,
        result.policy.method,
        kebab(&result.policy.inapplicable_rule)
    );
    out.push('\n');
    out.push_str(
        "| Level | Total Questions | Pass Threshold 80% | NAS | Result | Inapplicable |\n",
    );
    out.push_str("|---|---:|---:|---:|---|---:|\n");
    let _ = writeln!(
        out,
        "| {} | 0 | Not Valid | - | - | - |",
        result.baseline_name
    );
    for l in &result.levels {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} |",
            l.name,
            l.tns,
            l.pt,
            l.nas,
            verdict(l.passed),
            l.inapplicable_achieved
        );
    }
    out.push('\n');
    let _ = writeln!(
        out,
        "**Maturity level:** {} ({})",
        result.maturity_level, result.maturity_name
    );
    out.push('\n');
    for l in &result.levels {
        let _ = writeln!(
            out,
            "- Level {} attainment: {} ({})",
            l.level, l.attainment_label, l.attainment
        );
    }

    if let Some(a) = agreement {
        out.push('\n');
        markdown_agreement(&mut out, a);
    }

    out.push('\n');
    match gap {
        Some(g) => {
            let _ = writeln!(
                out,
                "## Gap to level {} ({})",
                g.target_level, g.target_name
            );
            out.push('\n');
            let _ = writeln!(
                out,
                "NAS {} of {}, threshold {}, shortfall **{}**.",
                g.nas, g.tns, g.pt, g.shortfall
            );
            out.push('\n');
            out.push_str("| Statement | Rating | Rater ratings | Spread | CSF | Text |\n");
            out.push_str("|---:|---:|---|---:|---:|---|\n");
            for b in &g.blocking_statements {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} |",
                    b.id,
                    b.rating,
                    ratings_list(&b.rater_ratings),
                    b.spread,
                    b.csf,
                    b.text.replace('|', "\\|")
                );
            }
        }
        None => out.push_str("## Gap\n\nNo gap: every assessed level passed.\n"),
    }
    out
}

fn markdown_agreement(out: &mut String, a: &AgreementReport) {
    out.push_str("## Inter-rater agreement\n\n");
    let _ = writeln!(
        out,
        "- Cohen's kappa (pairwise): min {:.3}, max {:.3} over {} pairs",
        a.min_kappa,
        a.max_kappa,
        a.pairs.len()
    );
    let _ = writeln!(out, "- Fleiss' kappa: {:.3}", a.fleiss.value);
    let _ = writeln!(out, "- Overall band: **{}**", a.overall_band);
    let undefined = a.undefined_pairs().count();
    if undefined > 0 {
        let _ = writeln!(out, "- Undefined pairs (excluded): {undefined}");
    }
    out.push('\n');
    out.push('|');
    out.push_str("   |");
    for r in &a.raters {
        let _ = write!(out, " {r} |");
    }
    out.push('\n');
    out.push_str("|---|");
    for _ in &a.raters {
        out.push_str("---:|");
    }
    out.push('\n');
    for (i, row) in a.matrix().iter().enumerate() {
        let _ = write!(out, "| {} |", a.raters[i]);
        for (j, cell) in row.iter().enumerate() {
            let s = if i == j {
                "-".to_string()
            } else {
                kappa_cell(*cell)
            };
            let _ = write!(out, " {s} |");
        }
        out.push('\n');
    }
}

fn kebab<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}
