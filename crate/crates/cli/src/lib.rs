//! Command-line front end: argument parsing, configuration resolution and
//! output writing for the `jastrow1d` binary.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 on a usage error.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use config::{Mode, RunArgs, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "jastrow1d",
    version,
    about = "Pair-product trial wavefunctions for particles in a 1D harmonic trap"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the relative two-body problem and print its coefficients
    Twobody(RunArgs),
    /// Scan the trial energy over alpha (CSV curve plus JSON summary)
    Scan(RunArgs),
    /// Same as scan: grid search refined by golden section
    Minimize(RunArgs),
    /// Configuration-interaction reference spectrum
    Ci(RunArgs),
    /// Trial minimum against the CI ground state
    Compare(RunArgs),
}

impl Command {
    fn parts(&self) -> (&RunArgs, Mode) {
        match self {
            Command::Twobody(a) => (a, Mode::TwoBody),
            Command::Scan(a) | Command::Minimize(a) => (a, Mode::Scan),
            Command::Ci(a) => (a, Mode::Ci),
            Command::Compare(a) => (a, Mode::Compare),
        }
    }
}

/// Writes `text` to `path`, or to standard output when no path is given.
fn emit(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| format!("cannot write to standard output: {e}"))
        }
    }
}

/// Where the JSON summary of a scan goes when the CSV is written to `csv`.
pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (args, mode) = cli.command.parts();
    let config = match RunConfig::from_args(args, mode) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let output = config.output.as_deref();

    if args.emit_config {
        let doc = serde_json::to_value(config.to_file()).expect("config serializes");
        return finish(emit(output, &commands::render_json(&doc)));
    }

    match &cli.command {
        Command::Twobody(_) => finish(
            commands::twobody(&config).and_then(|doc| emit(output, &commands::render_json(&doc))),
        ),
        Command::Scan(_) | Command::Minimize(_) => finish(commands::scan_result(&config).and_then(
            |scan| {
                let csv = commands::scan_csv(&scan);
                let summary = commands::render_json(&commands::scan_summary(&scan, &config));
                match output {
                    Some(p) => {
                        emit(Some(p), &csv)?;
                        emit(Some(&summary_path(p)), &summary)
                    }
                    None => emit(None, &format!("{csv}\n{summary}")),
                }
            },
        )),
        Command::Ci(_) => finish(
            commands::ci(&config).and_then(|doc| emit(output, &commands::render_json(&doc))),
        ),
        Command::Compare(_) => {
            let cmp = commands::compare(&config);
            let doc = commands::render_json(&commands::compare_json(&cmp, &config));
            eprint!("{}", commands::compare_table(&cmp, &config));
            let written = emit(output, &doc);
            if cmp.failed() {
                let _ = written;
                EXIT_RUNTIME
            } else {
                finish(written)
            }
        }
    }
}

fn finish(result: Result<(), String>) -> i32 {
    match result {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_RUNTIME
        }
    }
}
