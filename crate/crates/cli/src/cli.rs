//! The `ers` command line.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage error, 3 internal
//! error.

use std::ffi::OsString;
use std::io::Write;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ers_core::framework::{FrameworkError, PrincipleCode, Severity};
use ers_core::report::ReportError;
use ers_core::scoring::MaxPath;
use ers_core::{
    build_document, consensus, lint_framework, rank_principles, render_human, render_machine, samples, trace_audit,
    Audit, ConsensusWeights, Engine, FrameworkDefinition, QuestionTag, ScoreError, ScoringMode,
};

use crate::config::Defaults;
use crate::registry::{load_engine, Registry, RegistryError};
use crate::service;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ers", version, about = "Ethical risk scoring for data and ML systems")]
pub struct Cli {
    /// TOML file with default `mode` and consensus `weights`.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Machine,
    Human,
}

#[derive(Debug, Args)]
pub struct Target {
    /// Framework id (e.g. ers-v1) or path to a framework file.
    #[arg(long, default_value = "ers-v1")]
    pub framework: String,
    /// Audit file, or the name of a shipped example (alpha_ltd, beta_ltd).
    #[arg(long)]
    pub audit: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score an audit.
    Score {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        mode: Option<ScoringMode>,
        #[arg(long, value_enum, default_value = "machine")]
        format: Format,
        #[arg(long)]
        weights: Option<ConsensusWeights>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List every missing or invalid answer.
    Validate {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Show how one changed answer would move the scores.
    Whatif {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        question: QuestionTag,
        #[arg(long)]
        answer: String,
        #[arg(long)]
        mode: Option<ScoringMode>,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Inspect framework definitions.
    Framework {
        #[command(subcommand)]
        action: FrameworkAction,
    },
    /// Theory-consensus scores of principles.
    Consensus {
        #[arg(long)]
        principle: Option<PrincipleCode>,
        #[arg(long)]
        weights: Option<ConsensusWeights>,
        #[arg(long, default_value = "ers-v1")]
        framework: String,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Exhaustive per-dimension extrema and the maximum total.
    Extrema {
        #[arg(long, default_value = "ers-v1")]
        framework: String,
        #[arg(long)]
        mode: Option<ScoringMode>,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Run the HTTP scoring service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        bind: IpAddr,
    },
}

#[derive(Debug, Subcommand)]
pub enum FrameworkAction {
    /// Summarize questions, formulas and the principle catalog.
    Show { framework: String },
    /// Report structural problems; exits 1 if any is an error.
    Lint { framework: String },
    /// Print the full definition as JSON.
    Export { framework: String },
}

#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Usage(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Usage(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

impl From<ScoreError> for Failure {
    fn from(e: ScoreError) -> Self {
        match e {
            ScoreError::Invalid(errors) => {
                Failure::Invalid(errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))
            }
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Score(e) => e.into(),
            other => Failure::Internal(other.to_string()),
        }
    }
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let defaults = match &cli.config {
        Some(path) => Defaults::load(path).map_err(|e| Failure::Usage(e.to_string()))?,
        None => Defaults::default(),
    };
    let registry = Registry::from_env().map_err(|e| match e {
        RegistryError::Scan { .. } => Failure::Usage(e.to_string()),
        other => Failure::Invalid(other.to_string()),
    })?;

    match cli.command {
        Command::Score {
            target,
            mode,
            format,
            weights,
            out: out_path,
        } => {
            let engine = resolve_framework(&registry, &target.framework)?;
            let audit = resolve_audit(&target.audit)?;
            let weights = weights.unwrap_or(defaults.weights);
            let mode = mode.or(defaults.mode);
            let text = match format {
                Format::Machine => render_machine(&build_document(&engine, &audit, mode, &weights)?),
                Format::Human => human_report(&engine, &audit, mode, &weights)?,
            };
            match out_path {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display())))?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
        Command::Validate { target, format } => {
            let engine = resolve_framework(&registry, &target.framework)?;
            let audit = resolve_audit(&target.audit)?;
            let errors = engine.validate(&audit);
            match format {
                Format::Machine => {
                    let fw = engine.framework();
                    out.write_all(
                        render_machine(&service::ValidationResponse {
                            framework: ers_core::audit::FrameworkRef {
                                id: fw.id.clone(),
                                version: fw.version.clone(),
                            },
                            valid: errors.is_empty(),
                            errors: errors.clone(),
                        })
                        .as_bytes(),
                    )?;
                }
                Format::Human if errors.is_empty() => {
                    writeln!(
                        out,
                        "valid: all {} questions answered",
                        engine.framework().questions.len()
                    )?;
                }
                Format::Human => {
                    for e in &errors {
                        writeln!(out, "{e}")?;
                    }
                    writeln!(out, "{} problem(s) found", errors.len())?;
                }
            }
            Ok(if errors.is_empty() { EXIT_OK } else { EXIT_INVALID })
        }
        Command::Whatif {
            target,
            question,
            answer,
            mode,
            format,
        } => {
            let engine = resolve_framework(&registry, &target.framework)?;
            let audit = resolve_audit(&target.audit)?;
            let delta = engine.what_if(&audit, question, &answer, mode.or(defaults.mode))?;
            match format {
                Format::Machine => out.write_all(render_machine(&delta).as_bytes())?,
                Format::Human => {
                    writeln!(
                        out,
                        "{}: {} -> {} ({} mode)",
                        delta.question,
                        delta.old_answer,
                        delta.new_answer,
                        delta.base.mode.as_str()
                    )?;
                    for (sym, d) in &delta.dimension_deltas {
                        writeln!(
                            out,
                            "  {sym}  {:>10}  ({} -> {})",
                            d.to_string(),
                            delta.base.dimension_scores[sym],
                            delta.variant.dimension_scores[sym]
                        )?;
                    }
                    writeln!(
                        out,
                        "total delta: {} ({} -> {})",
                        delta.total_delta, delta.base.total, delta.variant.total
                    )?;
                    writeln!(
                        out,
                        "normalized delta: {} ({} -> {})",
                        delta.normalized_delta, delta.base.normalized, delta.variant.normalized
                    )?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Framework { action } => framework_command(&registry, action, out),
        Command::Consensus {
            principle,
            weights,
            framework,
            format,
        } => {
            let engine = resolve_framework(&registry, &framework)?;
            let matrix = &engine.framework().theory_matrix;
            let weights = weights.unwrap_or(defaults.weights);
            let records = match principle {
                Some(code) => vec![consensus(matrix, &weights, code).map_err(|e| Failure::Invalid(e.to_string()))?],
                None => rank_principles(matrix, &weights),
            };
            match format {
                Format::Machine => out.write_all(render_machine(&records).as_bytes())?,
                Format::Human => {
                    writeln!(out, "weights {weights} over {} theories", matrix.theories.len())?;
                    writeln!(out, "{:<5} {:>3} {:>3} {:>3} {:>3}  score", "", "D", "C", "I", "N")?;
                    for r in &records {
                        use ers_core::framework::SupportLevel::*;
                        writeln!(
                            out,
                            "{:<5} {:>3} {:>3} {:>3} {:>3}  {}",
                            r.code.to_string(),
                            r.count(D),
                            r.count(C),
                            r.count(I),
                            r.count(N),
                            r.weighted_score
                        )?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Extrema {
            framework,
            mode,
            format,
        } => {
            let engine = resolve_framework(&registry, &framework)?;
            let mode = mode.or(defaults.mode).unwrap_or(engine.framework().default_mode);
            let extrema = engine
                .dimension_extrema(mode)
                .map_err(|e| Failure::Internal(e.to_string()))?;
            let max = engine
                .max_possible_total(mode)
                .map_err(|e| Failure::Internal(e.to_string()))?;
            match format {
                Format::Machine => {
                    #[derive(serde::Serialize)]
                    struct Doc<'a> {
                        mode: ScoringMode,
                        dimensions: &'a [ers_core::scoring::DimensionExtrema],
                        max_total: &'a ers_core::scoring::MaxTotal,
                    }
                    let doc = Doc {
                        mode,
                        dimensions: &extrema,
                        max_total: max,
                    };
                    out.write_all(render_machine(&doc).as_bytes())?;
                }
                Format::Human => {
                    writeln!(
                        out,
                        "{} {} ({} mode)",
                        engine.framework().id,
                        engine.framework().version,
                        mode.as_str()
                    )?;
                    for d in &extrema {
                        writeln!(out, "  {}  min {:<10} max {}", d.symbol, d.min.to_string(), d.max)?;
                    }
                    let path = match max.path {
                        MaxPath::PerDimension => "sum of per-dimension maxima",
                        MaxPath::Union => "exhaustive sweep over shared questions",
                    };
                    writeln!(out, "maximum total: {} ({path})", max.value)?;
                    let witness: Vec<String> = max.witness.iter().map(|(q, a)| format!("{q}={a}")).collect();
                    writeln!(out, "witness: {}", witness.join(" "))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Serve { port, bind } => {
            let runtime = tokio::runtime::Runtime::new()?;
            let app = service::router(registry, defaults);
            runtime.block_on(service::serve(SocketAddr::new(bind, port), app))?;
            Ok(EXIT_OK)
        }
    }
}

/// Both modes side by side unless a mode is pinned.
fn human_report(
    engine: &Engine,
    audit: &Audit,
    mode: Option<ScoringMode>,
    weights: &ConsensusWeights,
) -> Result<String, Failure> {
    let modes: Vec<ScoringMode> = match mode {
        Some(m) => vec![m],
        None => ScoringMode::ALL.to_vec(),
    };
    let reports = modes
        .iter()
        .map(|m| engine.score_in_mode(audit, *m))
        .collect::<Result<Vec<_>, _>>()?;
    let trace =
        trace_audit(engine.framework(), audit, &reports[0], weights).map_err(|e| Failure::Internal(e.to_string()))?;
    Ok(render_human(engine.framework(), audit, &reports, &trace))
}

fn framework_command(registry: &Registry, action: FrameworkAction, out: &mut dyn Write) -> Result<i32, Failure> {
    match action {
        FrameworkAction::Show { framework } => {
            let engine = resolve_framework(registry, &framework)?;
            let fw = engine.framework();
            writeln!(
                out,
                "{} {} (default mode: {})",
                fw.id,
                fw.version,
                fw.default_mode.as_str()
            )?;
            writeln!(
                out,
                "{} questions, {} principles, {} theories",
                fw.questions.len(),
                fw.principles.len(),
                fw.theory_matrix.theories.len()
            )?;
            writeln!(out, "\ndimensions:")?;
            for d in &fw.dimensions {
                writeln!(out, "  {} {} = {}", d.symbol, d.label, d.formula)?;
            }
            writeln!(out, "  total = {}", fw.total_formula)?;
            writeln!(out, "\nquestions:")?;
            for q in &fw.questions {
                let options: Vec<String> = q.options.iter().map(|o| format!("{}={}", o.key, o.value)).collect();
                let gate = q
                    .gate_answer
                    .as_ref()
                    .map(|a| format!("  gate opens on {a}"))
                    .unwrap_or_default();
                writeln!(
                    out,
                    "  {:<6} [{}]{gate}  {}",
                    q.tag.to_string(),
                    options.join(" "),
                    q.text
                )?;
            }
            Ok(EXIT_OK)
        }
        FrameworkAction::Lint { framework } => {
            // lint without the load-time check so errors can be listed
            let fw = match registry.get(&framework) {
                Some(engine) => engine.framework().clone(),
                None => {
                    let text = std::fs::read_to_string(&framework)
                        .map_err(|e| Failure::Usage(format!("unknown framework {framework:?}: {e}")))?;
                    serde_json::from_str::<FrameworkDefinition>(&text)
                        .map_err(|e| Failure::Invalid(format!("{framework}: {e}")))?
                }
            };
            let findings = lint_framework(&fw);
            if findings.is_empty() {
                writeln!(out, "{}: no findings", fw.id)?;
            }
            for f in &findings {
                writeln!(out, "{f}")?;
            }
            let failed = findings.iter().any(|f| f.severity == Severity::Error);
            Ok(if failed { EXIT_INVALID } else { EXIT_OK })
        }
        FrameworkAction::Export { framework } => {
            let engine = resolve_framework(registry, &framework)?;
            let mut text = engine.framework().to_json_pretty();
            if !text.ends_with('\n') {
                text.push('\n');
            }
            out.write_all(text.as_bytes())?;
            Ok(EXIT_OK)
        }
    }
}

/// A registered id, else a path to a framework file.
pub fn resolve_framework(registry: &Registry, arg: &str) -> Result<Arc<Engine>, Failure> {
    if let Some(engine) = registry.get(arg) {
        return Ok(engine);
    }
    let path = Path::new(arg);
    if !path.is_file() {
        return Err(Failure::Usage(format!(
            "unknown framework {arg:?} (not a registered id or a file)"
        )));
    }
    match load_engine(path) {
        Ok(engine) => Ok(Arc::new(engine)),
        Err(
            e @ RegistryError::Framework {
                source: FrameworkError::Io { .. },
                ..
            },
        ) => Err(Failure::Usage(e.to_string())),
        Err(e) => Err(Failure::Invalid(e.to_string())),
    }
}

/// An audit file, else a shipped example named by the path's file stem, so
/// `examples/beta_ltd` and `beta_ltd.json` both find the Beta example.
pub fn resolve_audit(arg: &str) -> Result<Audit, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        return Audit::load(path).map_err(|e| match e {
            ers_core::audit::AuditLoadError::Io { .. } => Failure::Usage(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        });
    }
    path.file_stem()
        .and_then(|s| s.to_str())
        .and_then(samples::by_name)
        .ok_or_else(|| Failure::Usage(format!("no audit file at {arg:?}")))
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
