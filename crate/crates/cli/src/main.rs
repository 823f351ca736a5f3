//! Command-line front end: enumerate crossingless bases, build and export
//! Gram matrices, compute exact determinants, and verify the closed product
//! formulas.
//!
//! Exit codes: 0 on success (and on a verified claim), 1 when a checked
//! claim fails, 2 on usage, resource-refusal, or I/O errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gramdet::formulas::{self, Claim};
use gramdet::gram::{self, GramKind, GramMatrix, Limits};
use gramdet::report::{Status, VerificationReport};
use gramdet::wenzl;

#[derive(Parser)]
#[command(
    name = "gramdet",
    version,
    about = "Exact Gram matrices and determinants for crossingless curve bases"
)]
struct Cli {
    /// Number of worker threads (default: all cores); results are
    /// bit-identical regardless
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Directory for cached Gram matrices, keyed by kind, n, and version
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Lift the built-in size refusals
    #[arg(long, global = true)]
    allow_large: bool,

    /// Write output to a file instead of stdout
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the basis diagrams of a form, one label per line
    Enum(KindArgs),
    /// Build a Gram matrix and export it
    Gram {
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Compute the exact determinant of a Gram matrix
    Det {
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a determinant against its closed product formula
    Verify {
        /// One of: typeA, genA, typeB, chen, p1, propp, p2
        #[arg(long)]
        claim: Claim,
        #[arg(short, long)]
        n: usize,
        /// Largest localization exponent tried for the nesting claim
        #[arg(long, default_value_t = 8)]
        max_k: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a Temperley-Lieb self-check suite
    Wenzl {
        #[arg(long, value_enum)]
        check: WenzlCheck,
        /// Size bound handed to the suite (strand count or strand-sum)
        #[arg(short, long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct KindArgs {
    /// One of: disc, genA, annulus, mobius
    #[arg(long)]
    kind: GramKind,
    #[arg(short, long)]
    n: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum WenzlCheck {
    Idempotent,
    Traces,
    Theta,
    Dbasis,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(workers) = cli.workers {
        if workers == 0 {
            bail!("--workers must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .context("worker pool already initialized")?;
    }
    let limits = if cli.allow_large { Limits::unbounded() } else { Limits::default() };

    match cli.command {
        Command::Enum(args) => {
            refuse_oversize(args.kind, args.n, &limits)?;
            let codes = gram::basis_codes(args.kind, args.n);
            let lines: Vec<String> = codes
                .iter()
                .map(|&c| gram::diagram_label(args.kind, args.n, c))
                .collect();
            emit(&cli.output, &(lines.join("\n") + "\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gram { kind, format } => {
            refuse_oversize(kind.kind, kind.n, &limits)?;
            let matrix = load_or_build(kind.kind, kind.n, &limits, &cli.cache_dir)?;
            let rendered = match format {
                Format::Csv => matrix.to_csv(),
                Format::Json => serde_json::to_string_pretty(&matrix)? + "\n",
                Format::Text => render_matrix_text(&matrix),
            };
            emit(&cli.output, &rendered)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Det { kind, format } => {
            refuse_oversize(kind.kind, kind.n, &limits)?;
            let matrix = load_or_build(kind.kind, kind.n, &limits, &cli.cache_dir)?;
            let det = gramdet::symmetry::gram_det_auto(&matrix);
            let rendered = match format {
                Format::Text => format!("{det}\n"),
                Format::Json => {
                    let doc = serde_json::json!({
                        "kind": matrix.kind.name(),
                        "n": matrix.n,
                        "size": matrix.size(),
                        "determinant": det,
                        "display": det.to_string(),
                    });
                    serde_json::to_string_pretty(&doc)? + "\n"
                }
                Format::Csv => bail!("csv output only applies to matrices"),
            };
            emit(&cli.output, &rendered)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { claim, n, max_k, format } => {
            let report = formulas::verify(claim, n, &limits, max_k)?;
            finish_report(&cli.output, &report, format)
        }
        Command::Wenzl { check, n, format } => {
            let report = run_wenzl_check(check, n)?;
            finish_report(&cli.output, &report, format)
        }
    }
}

fn refuse_oversize(kind: GramKind, n: usize, limits: &Limits) -> Result<()> {
    let max = limits.max_for(kind);
    if n > max {
        bail!("{} size {n} exceeds the limit {max} (pass --allow-large to override)", kind.name());
    }
    Ok(())
}

fn run_wenzl_check(check: WenzlCheck, n: usize) -> Result<VerificationReport> {
    match check {
        WenzlCheck::Idempotent => {
            anyhow::ensure!((1..=8).contains(&n), "idempotent suite supports n in 1..=8");
            Ok(wenzl::check_idempotent(n))
        }
        WenzlCheck::Traces => {
            anyhow::ensure!((1..=8).contains(&n), "trace suite supports n in 1..=8");
            Ok(wenzl::check_traces(n))
        }
        WenzlCheck::Theta => {
            anyhow::ensure!(n <= 5, "theta suite supports strand-sums up to 5");
            Ok(wenzl::check_theta(n))
        }
        WenzlCheck::Dbasis => {
            anyhow::ensure!((1..=3).contains(&n), "ladder-basis suite supports n in 1..=3");
            Ok(wenzl::dbasis_checks(n))
        }
    }
}

fn finish_report(output: &Option<PathBuf>, report: &VerificationReport, format: Format) -> Result<ExitCode> {
    let rendered = match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Text => render_report_text(report),
        Format::Csv => bail!("csv output only applies to matrices"),
    };
    emit(output, &rendered)?;
    Ok(if report.is_verified() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn render_report_text(report: &VerificationReport) -> String {
    let status = match report.status {
        Status::Verified => "VERIFIED",
        Status::Failed => "FAILED",
        Status::Indeterminate => "INDETERMINATE",
    };
    let mut out = format!(
        "{} n={}: {} ({} ms)\n",
        report.claim, report.n, status, report.timing_ms
    );
    if let Some(note) = &report.note {
        out.push_str(&format!("  note: {note}\n"));
    }
    if let Some(exps) = &report.exponents {
        let parts: Vec<String> = exps.iter().map(|(i, e)| format!("{i}^{e}")).collect();
        out.push_str(&format!("  exponents: {}\n", parts.join(" ")));
    }
    for w in &report.witness {
        out.push_str(&format!("  witness: {w}\n"));
    }
    out
}

fn render_matrix_text(matrix: &GramMatrix) -> String {
    let size = matrix.size();
    let mut out = format!("{} n={} ({}x{})\n", matrix.kind.name(), matrix.n, size, size);
    for i in 0..size {
        let row: Vec<String> = (0..size).map(|j| matrix.entry(i, j).to_string()).collect();
        out.push_str(&format!("{}: {}\n", matrix.basis_label(i), row.join(", ")));
    }
    out
}

/// Loads a cached matrix if one matches the current kind, size, and code
/// version; otherwise builds it and, when a cache directory is set, stores
/// it there.  Stale or unreadable cache entries are rebuilt and replaced.
fn load_or_build(
    kind: GramKind,
    n: usize,
    limits: &Limits,
    cache_dir: &Option<PathBuf>,
) -> Result<GramMatrix> {
    let path = cache_dir
        .as_ref()
        .map(|d| d.join(format!("{}-{}-v{}.json", kind.name(), n, env!("CARGO_PKG_VERSION"))));
    if let Some(p) = &path {
        if let Ok(text) = fs::read_to_string(p) {
            if let Ok(cached) = serde_json::from_str::<GramMatrix>(&text) {
                if cached.kind == kind && cached.n == n {
                    return Ok(cached);
                }
            }
        }
    }
    let matrix = gram::build_gram(kind, n, limits)?;
    if let Some(p) = &path {
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        fs::write(p, serde_json::to_string(&matrix)?)
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(matrix)
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<()> {
    match output {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{content}"),
    }
    Ok(())
}
