use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use monogamy_cli::compute::{compute_rows, fixture_report};
use monogamy_cli::suites::family_row;
use monogamy_cli::{
    emit_report, parse_state_file, run_suite, Format, StateFileError, Suite, SuiteParams,
};
use monogamy_core::monogamy::{unit_grid, verify_theorem2_family, Family, Theorem2Config};

const EXIT_VIOLATIONS: u8 = 1;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "monogamy",
    version,
    about = "Concurrence, CoA and tangle for 2x2xn states, with seeded verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measures of a state read from a JSON state file.
    Compute {
        #[arg(long)]
        state: PathBuf,
        /// Qubit pair `i,j` forming A and B; the remaining qubits form C.
        #[arg(long, value_parser = parse_pair)]
        grouping: Option<(usize, usize)>,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Run a verification suite; exits 1 if any trial violates its tolerance.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, env = "MONOGAMY_SEED")]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// CSV report destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chain checks and roof bounds along a mixed three-qubit family.
    Sweep {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long, default_value_t = 11)]
        points: usize,
        #[arg(long, env = "MONOGAMY_SEED")]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        decompositions: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rows for the built-in fixture states.
    Report {
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (i, j) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `i,j`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((parse(i)?, parse(j)?))
}

fn parse_family(s: &str) -> Result<Family, String> {
    Family::parse(s).ok_or_else(|| {
        let names: Vec<_> = Family::all().iter().map(|f| f.name()).collect();
        format!(
            "unknown family `{s}` (expected one of {})",
            names.join(", ")
        )
    })
}

fn write_output(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn state_id(path: &Path, meta: &std::collections::BTreeMap<String, serde_json::Value>) -> String {
    meta.get("id")
        .and_then(|v| v.as_str())
        .map(str::to_string)
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "state".into())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Compute {
            state,
            grouping,
            format,
        } => {
            let text = fs::read_to_string(&state)
                .with_context(|| format!("cannot read {}", state.display()))?;
            let loaded = parse_state_file(&text)?;
            let rows = compute_rows(&state_id(&state, &loaded.meta), &loaded.state, grouping)?;
            write_output(None, &emit_report(&rows, format))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            suite,
            trials,
            seed,
            n_min,
            n_max,
            out,
        } => {
            let params = SuiteParams {
                trials,
                seed,
                n_min,
                n_max,
            };
            let outcome = run_suite(suite, &params)?;
            write_output(out.as_deref(), &emit_report(&outcome.rows, Format::Csv))?;
            eprintln!(
                "{suite}: {} trials, {} violations, max residual {:e}",
                outcome.rows.len(),
                outcome.violations,
                outcome.max_residual
            );
            Ok(if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VIOLATIONS)
            })
        }
        Command::Sweep {
            family,
            points,
            seed,
            decompositions,
            out,
        } => {
            let config = Theorem2Config {
                decompositions_per_point: decompositions,
                ..Theorem2Config::default()
            };
            let rows = verify_theorem2_family(family, &unit_grid(points), &config, seed)?;
            let flagged = rows.iter().filter(|r| r.flagged).count();
            let report: Vec<_> = rows.iter().map(|r| family_row(r, seed)).collect();
            write_output(out.as_deref(), &emit_report(&report, Format::Csv))?;
            eprintln!(
                "{}: {} points, {flagged} flagged",
                family.name(),
                rows.len()
            );
            Ok(if flagged == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VIOLATIONS)
            })
        }
        Command::Report { format, out } => {
            write_output(out.as_deref(), &emit_report(&fixture_report()?, format))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            if let Some(file_err) = err.downcast_ref::<StateFileError>() {
                eprintln!("error[{}]: {file_err}", file_err.code());
                return ExitCode::from(file_err.exit_code());
            }
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
