//! Command-line front end: `validate`, `assess`, `agreement` and
//! `default-model`.
//!
//! Exit codes are a stable contract: 0 on success (whatever the maturity
//! verdict), 1 on domain or validation failures, 2 on I/O and parse
//! failures, including command-line usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::agreement::pairwise_kappa_matrix;
use crate::diagnostic::{has_errors, Diagnostic};
use crate::ingest::{bind_sheet, parse_responses, BindingMode, IngestError, InputFormat};
use crate::model::{default_mlmm, load_model, validate_model, MaturityModel, ModelError};
use crate::report::{gap_analysis, render, render_agreement, ReportFormat};
use crate::scoring::{
    aggregate_ratings, assess, AggregationMethod, AggregationPolicy, ResponseSheet,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "mlmm",
    version,
    about = "Staged m-learning maturity assessment"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a maturity model document.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Score responses and report the maturity level, agreement and gap.
    Assess(RunArgs),
    /// Report inter-rater agreement only.
    Agreement(RunArgs),
    /// Print the built-in model as JSON.
    DefaultModel,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Model document; the built-in model when omitted.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Response file, or `-` for stdin.
    #[arg(long)]
    pub responses: String,
    /// Response encoding; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub input_format: Option<InputFormatArg>,
    #[arg(long, value_enum, default_value_t = AggregationArg::Median)]
    pub aggregation: AggregationArg,
    #[arg(long, value_enum, default_value_t = BindingArg::Strict)]
    pub binding: BindingArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Institution label; defaults to the response file name.
    #[arg(long)]
    pub institution: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregationArg {
    Median,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BindingArg {
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Json,
    Markdown,
}

impl From<AggregationArg> for AggregationMethod {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::Median => AggregationMethod::MedianConservative,
            AggregationArg::Mean => AggregationMethod::MeanRoundHalfUp,
        }
    }
}

impl From<BindingArg> for BindingMode {
    fn from(b: BindingArg) -> Self {
        match b {
            BindingArg::Strict => BindingMode::Strict,
            BindingArg::Lenient => BindingMode::Lenient,
        }
    }
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => ReportFormat::Text,
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Markdown => ReportFormat::Markdown,
        }
    }
}

impl From<InputFormatArg> for InputFormat {
    fn from(f: InputFormatArg) -> Self {
        match f {
            InputFormatArg::Csv => InputFormat::Csv,
            InputFormatArg::Json => InputFormat::Json,
        }
    }
}

/// A failed command: message plus exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn domain(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Parse(_) => Failure::io(e.to_string()),
            ModelError::Invalid(_) => Failure::domain(e.to_string()),
        }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Unreadable(_) | IngestError::UnknownFormat(_) => {
                Failure::io(e.to_string())
            }
            _ => Failure::domain(e.to_string()),
        }
    }
}

/// Streams a command reads from and writes to.
pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(io.stderr, "{e}");
                EXIT_IO
            } else {
                let _ = write!(io.stdout, "{e}");
                EXIT_OK
            };
            return code;
        }
    };

    let outcome = match cli.command {
        Command::Validate { model } => cmd_validate(&model, io),
        Command::Assess(args) => cmd_assess(&args, io),
        Command::Agreement(args) => cmd_agreement(&args, io),
        Command::DefaultModel => write_out(io, None, &default_mlmm().to_json()),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))
}

fn write_out(io: &mut Io<'_>, out: Option<&Path>, body: &str) -> Result<i32, Failure> {
    match out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?,
        None => io
            .stdout
            .write_all(body.as_bytes())
            .map_err(|e| Failure::io(format!("cannot write output: {e}")))?,
    }
    Ok(EXIT_OK)
}

fn print_diagnostics(w: &mut dyn Write, diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        let _ = writeln!(w, "{d}");
    }
}

fn cmd_validate(path: &Path, io: &mut Io<'_>) -> Result<i32, Failure> {
    let text = read_file(path)?;
    let model: MaturityModel = serde_json::from_str(&text)
        .map_err(|e| Failure::io(format!("malformed model document: {e}")))?;
    let diagnostics = validate_model(&model);
    print_diagnostics(io.stdout, &diagnostics);
    if has_errors(&diagnostics) {
        return Ok(EXIT_DOMAIN);
    }
    let _ = writeln!(
        io.stdout,
        "ok: {} ({} levels, {} statements)",
        model.name,
        model.levels.len(),
        model.total_statements()
    );
    Ok(EXIT_OK)
}

fn load_inputs(args: &RunArgs, io: &mut Io<'_>) -> Result<(MaturityModel, ResponseSheet), Failure> {
    let model = match &args.model {
        Some(path) => load_model(&read_file(path)?)?,
        None => default_mlmm(),
    };

    let (text, inferred, institution) = if args.responses == "-" {
        let mut buf = String::new();
        io.stdin
            .read_to_string(&mut buf)
            .map_err(|e| Failure::io(format!("cannot read stdin: {e}")))?;
        (buf, InputFormat::Csv, "stdin".to_string())
    } else {
        let path = Path::new(&args.responses);
        let format = match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
            _ => InputFormat::Csv,
        };
        let stem = path.file_stem().map_or_else(
            || args.responses.clone(),
            |s| s.to_string_lossy().into_owned(),
        );
        (read_file(path)?, format, stem)
    };
    let format = args.input_format.map_or(inferred, InputFormat::from);
    let institution = args.institution.clone().unwrap_or(institution);

    let parsed = parse_responses(&text, format)?;
    print_diagnostics(io.stderr, &parsed.diagnostics);
    if has_errors(&parsed.diagnostics) {
        return Err(Failure::domain(format!(
            "{} response record(s) rejected",
            parsed.diagnostics.iter().filter(|d| d.is_error()).count()
        )));
    }

    let bound = bind_sheet(&parsed.records, &model, args.binding.into(), &institution)?;
    print_diagnostics(io.stderr, &bound.diagnostics);
    Ok((model, bound.sheet))
}

fn cmd_assess(args: &RunArgs, io: &mut Io<'_>) -> Result<i32, Failure> {
    let (model, sheet) = load_inputs(args, io)?;
    let policy = AggregationPolicy::new(args.aggregation.into());
    let agg =
        aggregate_ratings(&sheet, &model, policy).map_err(|e| Failure::domain(e.to_string()))?;
    let result = assess(&agg, &model).map_err(|e| Failure::domain(e.to_string()))?;
    let gap = gap_analysis(&result, &agg, &model).map_err(|e| Failure::domain(e.to_string()))?;
    let agreement = if sheet.rater_count() >= 2 {
        Some(pairwise_kappa_matrix(&sheet, &model).map_err(|e| Failure::domain(e.to_string()))?)
    } else {
        None
    };
    let report = render(
        &result,
        agreement.as_ref(),
        gap.as_ref(),
        args.format.into(),
    );
    write_out(io, args.out.as_deref(), &report.body)
}

fn cmd_agreement(args: &RunArgs, io: &mut Io<'_>) -> Result<i32, Failure> {
    let (model, sheet) = load_inputs(args, io)?;
    let report =
        pairwise_kappa_matrix(&sheet, &model).map_err(|e| Failure::domain(e.to_string()))?;
    let body = render_agreement(&report, args.format.into());
    write_out(io, args.out.as_deref(), &body)
}
