use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use leverage_cli::{emit, ingest_csv, run_diagnostics, CliError, Decompositions, OutputFormat, RunConfig};
use leverage_core::synthetic::{generate, sweep_leverage, ScenarioSpec, PRNG_NAME};
use leverage_core::verify::verify;

/// Leverage diagnostics for regression designs.
///
/// Exit status: 0 when no row exceeds the leverage threshold, 2 when some
/// row does, 1 on any error.
#[derive(Parser)]
#[command(name = "levdiag", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Leverage of every row with its attribution to the regressors.
    Analyze(AnalyzeArgs),
    /// Write a synthetic scenario dataset as CSV.
    Synth(SynthArgs),
    /// Re-run every identity against independent oracles.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// CSV file with a header line.
    #[arg(long)]
    input: PathBuf,
    /// Column to exclude from the regressors; echoed in the report.
    #[arg(long)]
    response: Option<String>,
    /// Flag rows with leverage above this value [default: 2(p+1)/n].
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, value_enum, default_value_t = Decompose::Both)]
    decompose: Decompose,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Rows shown in text output.
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    /// Also run the oracle checks; a failed check exits with 1.
    #[arg(long)]
    verify: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Scenario file of `key = value` lines.
    #[arg(long)]
    seedfile: PathBuf,
    /// Write the trajectory of a leverage_sweep plant instead of the data.
    #[arg(long)]
    sweep: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    response: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Decompose {
    #[value(name = "I")]
    One,
    #[value(name = "II")]
    Two,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Synth(args) => synth(args),
        Command::Verify(args) => verify_cmd(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("levdiag: {e}");
            ExitCode::from(1)
        }
    }
}

fn write_out(output: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Write {
            path: path.to_owned(),
            source,
        }),
        None => std::io::stdout().write_all(bytes).map_err(|source| CliError::Write {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn analyze(args: AnalyzeArgs) -> Result<u8, CliError> {
    let config = RunConfig {
        input_path: args.input,
        response_column: args.response,
        threshold: args.threshold,
        decompositions: match args.decompose {
            Decompose::One => Decompositions { one: true, two: false },
            Decompose::Two => Decompositions { one: false, two: true },
            Decompose::Both => Decompositions::BOTH,
        },
        output_format: args.format.into(),
        verify: args.verify,
        top_k: args.top_k,
    };
    let report = run_diagnostics(&config)?;
    if report.meta.condition_warning {
        eprintln!(
            "levdiag: warning: near-singular design (condition number {:.3e})",
            report.meta.condition_number
        );
    }
    write_out(args.output.as_deref(), &emit(&report, config.output_format, config.top_k))?;
    if report.verification_failed() {
        eprintln!("levdiag: verification failed");
        return Ok(1);
    }
    Ok(report.exit_code() as u8)
}

fn read_scenario(path: &Path) -> Result<ScenarioSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    text.parse().map_err(|e: leverage_core::DiagError| CliError::Scenario {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn synth(args: SynthArgs) -> Result<u8, CliError> {
    let spec = read_scenario(&args.seedfile)?;
    let mut out = String::new();
    if args.sweep {
        let points = sweep_leverage(&spec)?;
        out.push_str("t,leverage,mahalanobis_sq");
        for i in 0..spec.p {
            out.push_str(&format!(",inflation_x{i}"));
        }
        for i in 0..spec.p {
            out.push_str(&format!(",term_x{i}"));
        }
        out.push('\n');
        for pt in points {
            let fields: Vec<String> = [pt.t, pt.record.leverage, pt.record.mahalanobis_sq]
                .into_iter()
                .chain(pt.inflation.iter().copied())
                .chain(pt.terms.iter().map(|t| t.term))
                .map(|v| format!("{v:?}"))
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
    } else {
        let data = generate(&spec)?;
        out.push_str(&data.column_names().join(","));
        out.push('\n');
        for r in 0..data.n() {
            let fields: Vec<String> = data.row(r).iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
    }
    eprintln!("levdiag: generator {PRNG_NAME}, seed {}", spec.seed);
    write_out(args.output.as_deref(), out.as_bytes())?;
    Ok(0)
}

fn verify_cmd(args: VerifyArgs) -> Result<u8, CliError> {
    let input = ingest_csv(&args.input, args.response.as_deref())?;
    // run the full pipeline first so failures name the offending columns
    let mut config = RunConfig::new(&args.input);
    config.response_column = args.response.clone();
    config.decompositions = Decompositions::default();
    leverage_cli::analyze(&input, &config)?;
    let report = verify(&input.data)?;
    let bytes = match args.format {
        Format::Json => {
            let checks: Vec<_> = report.checks.iter().map(leverage_cli::report::CheckReport::from).collect();
            let mut s = serde_json::to_string_pretty(&checks).expect("serializable");
            s.push('\n');
            s.into_bytes()
        }
        Format::Text => {
            let mut s = String::new();
            for c in &report.checks {
                let status = if c.passed { "ok" } else { "FAILED" };
                s.push_str(&format!(
                    "{:<30} {:>12.3e}  (tolerance {:.1e})  {status}\n",
                    c.name, c.max_deviation, c.tolerance
                ));
            }
            s.into_bytes()
        }
    };
    write_out(args.output.as_deref(), &bytes)?;
    Ok(if report.all_passed() { 0 } else { 1 })
}
