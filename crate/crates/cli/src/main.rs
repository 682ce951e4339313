use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use siginv::samples::DEFAULT_SEED;
use siginv_cli::bench::{self, BenchConfig, Vary};
use siginv_cli::io::{
    parse_list, parse_point, read_paths, read_signatures, write_json, write_paths,
};
use siginv_cli::{commands, CliError, Result, THREADS_ENV};

/// Path signatures and their inversion.
#[derive(Parser)]
#[command(name = "siginv", version)]
struct Cli {
    /// Largest number of coefficients any tensor may allocate.
    #[arg(long, global = true)]
    max_coeffs: Option<usize>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Signature of each path in a CSV file, as JSON.
    Sign {
        input: PathBuf,
        #[arg(long)]
        depth: usize,
        /// Reparameterise at constant speed first.
        #[arg(long)]
        constant_speed: bool,
    },
    /// Rebuild paths from signature JSON, as CSV.
    Invert {
        input: PathBuf,
        /// Start point, e.g. `0.5,-1`. Defaults to the origin.
        #[arg(long)]
        start: Option<String>,
    },
    /// Sign, invert and report reconstruction errors per depth.
    Roundtrip {
        input: PathBuf,
        #[arg(long, default_value = "5,10,20")]
        depths: String,
    },
    /// Smoothed path: depth-n inversion anchored at the first sample.
    Trend {
        input: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Timing table for batch inversion.
    Bench {
        #[arg(long, default_value = "depth")]
        vary: String,
        /// Values of the varied parameter, `4..12` or `1,10,50`.
        #[arg(long, default_value = "4..12")]
        values: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 50)]
        batch: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
    /// Hyperbolic development lower-bound report, as JSON.
    Develop {
        input: PathBuf,
        /// Scale factor; defaults to 2K(omega)/D.
        #[arg(long)]
        alpha: Option<f64>,
    },
}

fn open(path: &PathBuf) -> Result<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(io::stdin().lock()))
    } else {
        Ok(Box::new(BufReader::new(File::open(path)?)))
    }
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Format(format!("{THREADS_ENV} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Format(e.to_string()))
}

/// Returns the exit code of a partially failed batch, if any.
fn run(cli: Cli) -> Result<Option<i32>> {
    configure_threads()?;
    if let Some(cap) = cli.max_coeffs {
        siginv::tensor::set_max_coeffs(cap);
    }
    match cli.command {
        Command::Sign {
            input,
            depth,
            constant_speed,
        } => {
            let file = read_paths(open(&input)?)?;
            let records = commands::sign(&file, depth, constant_speed)?;
            write_json(output(&cli.out)?, &records, file.has_ids)?;
        }
        Command::Invert { input, start } => {
            let records = read_signatures(open(&input)?)?;
            let start = start.as_deref().map(parse_point).transpose()?;
            let (paths, code) = commands::invert(&records, start.as_deref())?;
            write_paths(output(&cli.out)?, &paths)?;
            return Ok(code);
        }
        Command::Roundtrip { input, depths } => {
            let depths = parse_list(&depths)?;
            let file = read_paths(open(&input)?)?;
            let rows = commands::roundtrip(&file, &depths)?;
            let mut w = csv::Writer::from_writer(output(&cli.out)?);
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Command::Trend { input, depth } => {
            let file = read_paths(open(&input)?)?;
            write_paths(output(&cli.out)?, &commands::trend(&file, depth)?)?;
        }
        Command::Bench {
            vary,
            values,
            depth,
            dim,
            batch,
            seed,
            repeats,
        } => {
            let cfg = BenchConfig {
                vary: vary.parse::<Vary>()?,
                values: parse_list(&values)?,
                depth,
                dim,
                batch,
                seed,
                repeats,
            };
            bench::write_csv(output(&cli.out)?, &bench::run(&cfg)?)?;
        }
        Command::Develop { input, alpha } => {
            let file = read_paths(open(&input)?)?;
            let reports = commands::develop(&file, alpha)?;
            write_json(output(&cli.out)?, &reports, file.has_ids)?;
        }
    }
    Ok(None)
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
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(code)) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("siginv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
