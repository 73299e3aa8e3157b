use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use casimir_cli::output::{emit, read_curve};
use casimir_cli::window::all_windows;
use casimir_cli::{scan, spectrum, Format, ScanConfig, ScanSpec, EXIT_CONFIG, EXIT_NUMERICAL};
use clap::{Parser, Subcommand, ValueEnum};

/// Casimir pressure between planar mirrors.
///
/// Distances are in units of Λ = 2πc/Ω, temperatures in ħΩ/k_B and material
/// frequencies in Ω. The `pressure` column is P·L⁴/(ħc), positive when the
/// plates attract.
#[derive(Parser)]
#[command(name = "casimir", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the pressure on a distance/temperature grid.
    Scan {
        #[arg(long)]
        config: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Find distance intervals with repulsive pressure in a scan output.
    ///
    /// JSON input carries its config, so sign changes are refined by
    /// bisection; CSV input is interpolated between grid points.
    Window {
        #[arg(long = "in")]
        input: PathBuf,
        /// Print the windows as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// List the complex cavity modes at one transverse wavenumber.
    Modes {
        #[arg(long)]
        config: PathBuf,
        /// Transverse wavenumber in units of Ω/c.
        #[arg(long)]
        k: f64,
        /// Distance in units of Λ; the first grid distance when omitted.
        #[arg(long)]
        distance: Option<f64>,
    },
}

/// An error together with the exit status it maps to.
struct Failure(i32, anyhow::Error);

fn config_error<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure(EXIT_CONFIG, e.into())
}

fn numerical<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure(EXIT_NUMERICAL, e.into())
}

fn io_error<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure(1, e.into())
}

fn load(path: &Path) -> Result<ScanSpec, Failure> {
    ScanConfig::load(path)
        .and_then(|c| c.resolve())
        .with_context(|| format!("config {}", path.display()))
        .map_err(config_error)
}

fn writer(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display())).map_err(io_error)?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Scan { config, out, format } => {
            let spec = load(&config)?;
            let curve = scan(&spec).map_err(numerical)?;
            for r in &curve.rows {
                if let Some(w) = &r.warning {
                    eprintln!("warning: L={} T={} {}: {w}", r.l, r.t, r.method);
                }
            }
            emit(&curve, format.into(), writer(out.as_deref())?).map_err(io_error)?;
            let failed: Vec<_> = curve.failures().collect();
            for r in &failed {
                eprintln!(
                    "error: L={} T={} {}: {}",
                    r.l,
                    r.t,
                    r.method,
                    r.error.as_deref().unwrap_or("failed")
                );
            }
            if !failed.is_empty() {
                return Err(numerical(anyhow::anyhow!("{} of {} points failed", failed.len(), curve.rows.len())));
            }
            Ok(())
        }
        Command::Window { input, json } => {
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("cannot read {}", input.display()))
                .map_err(io_error)?;
            let curve = read_curve(&text)
                .with_context(|| format!("curve {}", input.display()))
                .map_err(config_error)?;
            let spec = match &curve.config {
                Some(c) => Some(c.resolve().context("config embedded in the curve").map_err(config_error)?),
                None => {
                    eprintln!("warning: no config in the input; bounds are interpolated between grid points");
                    None
                }
            };
            let groups = all_windows(&curve.rows, spec.as_ref());
            for (method, t, w) in &groups {
                if w.len() > 1 {
                    eprintln!("warning: {method} at T={t}: {} disjoint repulsive intervals", w.len());
                }
            }
            let mut out = writer(None)?;
            let result = if json {
                let all: Vec<_> = groups.iter().flat_map(|g| g.2.iter()).collect();
                serde_json::to_writer_pretty(&mut out, &all)
                    .map_err(io::Error::from)
                    .and_then(|_| writeln!(out))
            } else {
                groups.iter().try_for_each(|(method, t, w)| {
                    if w.is_empty() {
                        return writeln!(out, "{method} T={t}: none");
                    }
                    w.iter().try_for_each(|w| {
                        let open = |o: bool| if o { " (grid edge)" } else { "" };
                        writeln!(
                            out,
                            "{method} T={t}: L in [{}{}, {}{}]",
                            w.l_lo,
                            open(w.lower_open),
                            w.l_hi,
                            open(w.upper_open)
                        )
                    })
                })
            };
            result.and_then(|_| out.flush()).map_err(io_error)
        }
        Command::Modes { config, k, distance } => {
            let spec = load(&config)?;
            if !(k >= 0.0 && k.is_finite()) {
                return Err(config_error(anyhow::anyhow!("--k must be finite and >= 0, got {k}")));
            }
            let l = distance.unwrap_or(spec.distances[0]);
            let modes = spectrum(&spec, l, k).map_err(numerical)?;
            let mut out = writer(None)?;
            let result = writeln!(out, "pol,n,re,im").and_then(|_| {
                modes
                    .iter()
                    .try_for_each(|m| writeln!(out, "{},{},{},{}", m.pol, m.branch_index, m.omega.re, m.omega.im))
            });
            result.and_then(|_| out.flush()).map_err(io_error)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code as u8)
        }
    }
}
