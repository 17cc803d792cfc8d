use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use zq_cli::commands::{self, CharsumParams, IncidenceParams, KindArg, SetArg, SumKind};
use zq_cli::config::VerifyConfig;
use zq_cli::report::{Format, Report};
use zq_cli::{exit, suites, CliError};
use zq_core::pool::{threads_from_env, with_threads};
use zq_core::Modulus;

#[derive(Parser)]
#[command(name = "zq", version, about = "Character sums, spheres and incidences over Z/p^l")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Print wall time to stderr (never written into the report).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct Grid {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    ell: u32,
    #[arg(long)]
    d: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one character sum.
    Charsum {
        #[arg(value_enum)]
        kind: SumKind,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        a: i64,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        b: i64,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        m: Option<u32>,
        /// Power of the Legendre symbol used as the character for `tau`.
        #[arg(long, default_value_t = 1)]
        power: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Sphere sizes and Fourier decay.
    Sphere {
        #[command(flatten)]
        grid: Grid,
        /// Radius; every radius when omitted.
        #[arg(long)]
        j: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Distance or dot-product incidences of seeded random sets or a lift.
    Incidence {
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        size: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u32,
        #[arg(long, value_enum, default_value_t = KindArg::Distance)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = SetArg::Random)]
        set: SetArg,
        /// Report the decomposition at this value.
        #[arg(long)]
        t: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Lagrangian lift and its distance/dot-product sets.
    Sharpness {
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Run every verification suite over a grid.
    VerifyAll {
        /// key = value grid file; built-in defaults when omitted.
        config: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
}

fn emit(report: &Report, output: &Output) -> Result<(), CliError> {
    let format = output.format.unwrap_or(Format::Csv);
    match &output.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            report.write(format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn emit_text(text: &str, output: &Output) -> Result<(), CliError> {
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(bool, bool), CliError> {
    let (pass, timing) = match cli.command {
        Command::Charsum { kind, a, b, n, q, p, m, power, seed, output } => {
            let params = CharsumParams { a, b, n, q, p, m, power };
            let r = commands::charsum(kind, &params)?;
            match output.format {
                Some(_) => emit(&r.report(&params, seed), &output)?,
                None => emit_text(&r.text(), &output)?,
            }
            (r.pass, output.timing)
        }
        Command::Sphere { grid, j, seed, output } => {
            let o = commands::sphere(Modulus::new(grid.p, grid.ell)?, grid.d, j, seed)?;
            emit(&o.report, &output)?;
            (o.pass, output.timing)
        }
        Command::Incidence { grid, size, seed, trials, kind, set, t, output } => {
            let o = commands::incidence(&IncidenceParams {
                m: Modulus::new(grid.p, grid.ell)?,
                d: grid.d,
                size,
                seed,
                trials,
                kind: kind.into(),
                set,
                t,
            })?;
            emit(&o.report, &output)?;
            (o.pass, output.timing)
        }
        Command::Sharpness { grid, seed, output } => {
            let o = commands::sharpness(grid.p, grid.ell, grid.d, seed)?;
            emit(&o.report, &output)?;
            (o.pass, output.timing)
        }
        Command::VerifyAll { config, seed, output } => {
            let mut c = match &config {
                Some(path) => VerifyConfig::load(path)?,
                None => VerifyConfig::default(),
            };
            if let Some(s) = seed {
                c.seed = s;
            }
            let cells = suites::run_all(&c)?;
            emit(&suites::to_report(&cells), &output)?;
            (suites::all_pass(&cells), output.timing)
        }
    };
    Ok((pass, timing))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = with_threads(threads_from_env(), || run(cli));
    let code = match result {
        Ok((pass, timing)) => {
            if timing {
                eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
            }
            if pass {
                exit::OK
            } else {
                exit::VERIFICATION_FAILED
            }
        }
        Err(e) => {
            eprintln!("zq: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
