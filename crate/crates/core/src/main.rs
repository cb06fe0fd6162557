use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use prccsl::lang::{elaborate, parse, pretty_print};
use prccsl::monitor::Threshold;
use prccsl::report::Report;
use prccsl::sim::{AVParams, FaultSpec, Simulator};
use prccsl::trace_io::{read_trace_file, TraceWriter};
use prccsl::verify::{check_trace, verify_av, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "prccsl",
    version,
    about = "Probabilistic clock-constraint checker"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check a specification against a trace file.
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// Sample size N; default is the whole trace.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        samples: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Write a simulated vehicle trace as CSV.
    Simulate {
        #[arg(long)]
        steps: u64,
        #[arg(long)]
        seed: u64,
        /// TARGET:RATE, e.g. periodic-R1:0.10
        #[arg(long)]
        fault: Option<FaultSpec>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate the vehicle and check the bundled specification.
    VerifyAv {
        #[arg(long, default_value_t = 60_000)]
        steps: u64,
        #[arg(long, default_value = "0.95")]
        threshold: Threshold,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        samples: Option<u64>,
        #[arg(long)]
        fault: Option<FaultSpec>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print a specification in canonical form.
    Fmt { spec: PathBuf },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn emit_report(report: &Report, out: Option<&Path>, format: Format) -> Result<u8, Failure> {
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))?
        }
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(report.exit_code() as u8)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check {
            spec,
            trace,
            samples,
            out,
            format,
        } => {
            let src = fs::read_to_string(&spec)
                .map_err(|e| Failure(format!("{}: {e}", spec.display())))?;
            let parsed = parse(&src).map_err(|e| Failure(format!("{}:{e}", spec.display())))?;
            let el = elaborate(&parsed).map_err(|e| Failure(format!("{}:{e}", spec.display())))?;
            let t = read_trace_file(&trace)
                .map_err(|e| Failure(format!("{}: {e}", trace.display())))?;
            let report = check_trace(
                &el,
                &spec.display().to_string(),
                &t,
                &trace.display().to_string(),
                samples,
            );
            emit_report(&report, out.as_deref(), format)
        }
        Command::Simulate {
            steps,
            seed,
            fault,
            out,
        } => {
            let params = AVParams {
                steps,
                seed,
                ..AVParams::default()
            };
            let sim = Simulator::new(params, fault)?;
            let alphabet = sim.alphabet();
            let file =
                File::create(&out).map_err(|e| Failure(format!("{}: {e}", out.display())))?;
            let mut writer = TraceWriter::new(BufWriter::new(file), &alphabet)?;
            let mut counts = vec![0u64; alphabet.len()];
            for ticks in sim {
                for c in ticks.iter() {
                    counts[c] += 1;
                }
                writer.write_step(&ticks)?;
            }
            writer.finish()?;
            println!("wrote {} steps to {}", steps, out.display());
            for (name, n) in alphabet.iter().zip(counts) {
                println!("{:>16} {n}", name.as_str());
            }
            Ok(0)
        }
        Command::VerifyAv {
            steps,
            threshold,
            seed,
            samples,
            fault,
            out,
            format,
        } => {
            let report = verify_av(&VerifyOptions {
                steps,
                seed,
                threshold: Some(threshold),
                samples,
                fault,
            })?;
            emit_report(&report, out.as_deref(), format)
        }
        Command::Fmt { spec } => {
            let src = fs::read_to_string(&spec)
                .map_err(|e| Failure(format!("{}: {e}", spec.display())))?;
            let parsed = parse(&src).map_err(|e| Failure(format!("{}:{e}", spec.display())))?;
            print!("{}", pretty_print(&parsed));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
