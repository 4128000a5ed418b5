//! Command-line front end for `qwps-core`.
//!
//! Each subcommand computes one quantity and renders it to bytes in the
//! requested format; [`execute`] is pure so the binary and the tests share
//! one code path.

pub mod export;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qwps_core::{
    build_spectrum, evolve, limiting_chi, limiting_wigner, marginal_over_k, marginal_over_x,
    revival_scan, revival_scan_at, time_average_wigner, wigner_bloch, wigner_direct, wigner_fft,
    CycleConfig, WalkError, WignerGrid,
};
use serde::Serialize;

use crate::export::{
    grid_to_csv, grid_to_json, grid_to_ppm, scan_to_csv, scan_to_json, to_json_bytes,
    vector_to_csv, Format, VectorRecord,
};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "QWPS_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "qwps",
    version,
    about = "Continuous-time quantum walks on cycles in discrete phase space",
    after_help = "Grids are written with rows x (position) and columns kappa (momentum index) \
                  in csv/json; ppm heatmaps put x horizontally and kappa vertically (kappa = 0 \
                  at the bottom). Set QWPS_THREADS to cap kernel parallelism."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bloch eigenphases and energies of the ring Hamiltonian.
    Spectrum {
        /// Number of ring nodes.
        #[arg(long, value_parser = parse_ring_size)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Amplitudes and transition probabilities at time t.
    Evolve {
        #[command(flatten)]
        ring: Ring,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Discrete Wigner function W(x, kappa; t).
    Wigner {
        #[command(flatten)]
        ring: Ring,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, value_enum, default_value_t = GridMethod::Fft)]
        method: GridMethod,
        #[command(flatten)]
        out: Output,
    },
    /// Position marginal sum_kappa W(x, kappa; t).
    #[command(name = "marginal-x")]
    MarginalX {
        #[command(flatten)]
        ring: Ring,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, value_enum, default_value_t = GridMethod::Fft)]
        method: GridMethod,
        #[command(flatten)]
        out: Output,
    },
    /// Momentum marginal sum_x W(x, kappa; t).
    #[command(name = "marginal-k")]
    MarginalK {
        #[command(flatten)]
        ring: Ring,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, value_enum, default_value_t = GridMethod::Fft)]
        method: GridMethod,
        #[command(flatten)]
        out: Output,
    },
    /// Closed-form long-time limit of the Wigner function (or of |psi|^2 with --chi).
    Limit {
        #[command(flatten)]
        ring: Ring,
        /// Emit the limiting position distribution instead of the grid.
        #[arg(long)]
        chi: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Numerical time average of the Wigner function over [0, T).
    #[command(name = "time-average")]
    TimeAverage {
        #[command(flatten)]
        ring: Ring,
        /// Averaging window T.
        #[arg(long, value_parser = parse_positive)]
        total_time: f64,
        /// Uniform samples on [0, T); defaults to ceil(T) (spacing about 1).
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Return-probability scan with peak report. Equal-fidelity plateaus
    /// report their earliest time.
    #[command(name = "revival-scan")]
    RevivalScan {
        #[command(flatten)]
        ring: Ring,
        #[arg(long, allow_negative_numbers = true, requires_all = ["t_end", "dt"], conflicts_with = "times")]
        t_start: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t_end: Option<f64>,
        #[arg(long, value_parser = parse_positive)]
        dt: Option<f64>,
        /// Explicit comma-separated sample times instead of a uniform grid.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        times: Option<Vec<f64>>,
        /// Rows in the csv peak table.
        #[arg(long, default_value_t = 10)]
        max_peaks: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Ring {
    /// Number of ring nodes (N >= 2).
    #[arg(long, value_parser = parse_ring_size)]
    pub n: usize,
    /// Start node, 0 <= j < N.
    #[arg(long, default_value_t = 0)]
    pub j: usize,
    /// Bond coupling gamma.
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub gamma: f64,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridMethod {
    Direct,
    Bloch,
    Fft,
}

fn parse_ring_size(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 2 {
        return Err(format!("ring size must satisfy N >= 2, got {n}"));
    }
    Ok(n)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("must be finite and > 0, got {s}"));
    }
    Ok(v)
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flag combination; exit status 2.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Walk(#[from] WalkError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Walk(_) | CliError::Io(_) => 1,
        }
    }
}

impl Ring {
    fn config(&self) -> Result<CycleConfig, CliError> {
        if self.j >= self.n {
            return Err(CliError::Usage(format!(
                "start node must satisfy 0 <= j < N, got j = {} with N = {}",
                self.j, self.n
            )));
        }
        Ok(CycleConfig::with_gamma(self.n, self.j, self.gamma)?)
    }
}

impl Command {
    pub fn output(&self) -> &Output {
        match self {
            Command::Spectrum { out, .. }
            | Command::Evolve { out, .. }
            | Command::Wigner { out, .. }
            | Command::MarginalX { out, .. }
            | Command::MarginalK { out, .. }
            | Command::Limit { out, .. }
            | Command::TimeAverage { out, .. }
            | Command::RevivalScan { out, .. } => out,
        }
    }

    /// Flag checks that clap cannot express; run before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let name = self.name();
        let format = self.output().format;
        let grid_output = matches!(
            self,
            Command::Wigner { .. }
                | Command::TimeAverage { .. }
                | Command::Limit { chi: false, .. }
        );
        if format == Format::Ppm && !grid_output {
            return Err(CliError::Usage(format!(
                "'{name}' does not support --format ppm"
            )));
        }
        match self {
            Command::Spectrum { .. } => Ok(()),
            Command::Evolve { ring, t, .. }
            | Command::Wigner { ring, t, .. }
            | Command::MarginalX { ring, t, .. }
            | Command::MarginalK { ring, t, .. } => {
                ring.config()?;
                if !t.is_finite() {
                    return Err(CliError::Usage(format!("--t must be finite, got {t}")));
                }
                Ok(())
            }
            Command::Limit { ring, .. } => ring.config().map(|_| ()),
            Command::TimeAverage { ring, samples, .. } => {
                ring.config()?;
                if matches!(samples, Some(s) if *s < 2) {
                    return Err(CliError::Usage("--samples must be at least 2".into()));
                }
                Ok(())
            }
            Command::RevivalScan {
                ring,
                t_start,
                t_end,
                dt,
                times,
                ..
            } => {
                ring.config()?;
                match (t_start, t_end, dt, times) {
                    (_, _, _, Some(ts)) if ts.len() < 3 => {
                        Err(CliError::Usage("--times needs at least 3 values".into()))
                    }
                    (_, _, _, Some(_)) => Ok(()),
                    (Some(a), Some(b), Some(_), None) if a < b => Ok(()),
                    (Some(a), Some(b), Some(_), None) => Err(CliError::Usage(format!(
                        "--t-start must be below --t-end, got {a} and {b}"
                    ))),
                    _ => Err(CliError::Usage(
                        "give either --t-start/--t-end/--dt or --times".into(),
                    )),
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Evolve { .. } => "evolve",
            Command::Wigner { .. } => "wigner",
            Command::MarginalX { .. } => "marginal-x",
            Command::MarginalK { .. } => "marginal-k",
            Command::Limit { .. } => "limit",
            Command::TimeAverage { .. } => "time-average",
            Command::RevivalScan { .. } => "revival-scan",
        }
    }
}

fn grid_for(ring: &Ring, t: f64, method: GridMethod) -> Result<WignerGrid, CliError> {
    let config = ring.config()?;
    let grid = match method {
        GridMethod::Direct => wigner_direct(&evolve(&config, t)?)?,
        GridMethod::Bloch => wigner_bloch(&config, t)?,
        GridMethod::Fft => wigner_fft(&config, t)?,
    };
    Ok(grid)
}

fn render_grid(grid: &WignerGrid, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => grid_to_csv(grid),
        Format::Json => grid_to_json(grid),
        Format::Ppm => grid_to_ppm(grid),
    }
}

fn render_vector(
    config: &CycleConfig,
    t: Option<f64>,
    (index, quantity): (&str, &str),
    values: &[f64],
    format: Format,
) -> Vec<u8> {
    match format {
        Format::Json => to_json_bytes(&VectorRecord {
            n: config.n,
            j: config.j,
            gamma: config.gamma,
            t,
            quantity,
            values,
        })
        .expect("vector serializes"),
        _ => vector_to_csv(index, quantity, values),
    }
}

#[derive(Serialize)]
struct SpectrumRecord<'a> {
    n: usize,
    thetas: &'a [f64],
    energies: &'a [f64],
}

#[derive(Serialize)]
struct StateRecord<'a> {
    n: usize,
    j: usize,
    gamma: f64,
    t: f64,
    re: &'a [f64],
    im: &'a [f64],
    probability: &'a [f64],
}

/// Validates the command and renders its output.
pub fn execute(command: &Command) -> Result<Vec<u8>, CliError> {
    command.validate()?;
    let format = command.output().format;
    let bytes = match command {
        Command::Spectrum { n, .. } => {
            let s = build_spectrum(*n)?;
            match format {
                Format::Json => to_json_bytes(&SpectrumRecord {
                    n: *n,
                    thetas: &s.thetas,
                    energies: &s.energies,
                })
                .expect("spectrum serializes"),
                _ => {
                    let mut out = String::from("n,theta,energy\n");
                    for (k, (th, e)) in s.thetas.iter().zip(&s.energies).enumerate() {
                        out.push_str(&format!(
                            "{k},{},{}\n",
                            export::fmt_f64(*th),
                            export::fmt_f64(*e)
                        ));
                    }
                    out.into_bytes()
                }
            }
        }
        Command::Evolve { ring, t, .. } => {
            let psi = evolve(&ring.config()?, *t)?;
            let re: Vec<f64> = psi.amplitudes.iter().map(|a| a.re).collect();
            let im: Vec<f64> = psi.amplitudes.iter().map(|a| a.im).collect();
            let p = psi.probabilities();
            match format {
                Format::Json => to_json_bytes(&StateRecord {
                    n: ring.n,
                    j: ring.j,
                    gamma: ring.gamma,
                    t: *t,
                    re: &re,
                    im: &im,
                    probability: &p,
                })
                .expect("state serializes"),
                _ => {
                    let mut out = String::from("x,re,im,probability\n");
                    for x in 0..ring.n {
                        out.push_str(&format!(
                            "{x},{},{},{}\n",
                            export::fmt_f64(re[x]),
                            export::fmt_f64(im[x]),
                            export::fmt_f64(p[x])
                        ));
                    }
                    out.into_bytes()
                }
            }
        }
        Command::Wigner {
            ring, t, method, ..
        } => render_grid(&grid_for(ring, *t, *method)?, format),
        Command::MarginalX {
            ring, t, method, ..
        } => {
            let m = marginal_over_k(&grid_for(ring, *t, *method)?);
            render_vector(&m.config, Some(*t), ("x", "p"), &m.values, format)
        }
        Command::MarginalK {
            ring, t, method, ..
        } => {
            let m = marginal_over_x(&grid_for(ring, *t, *method)?);
            render_vector(&m.config, Some(*t), ("kappa", "q"), &m.values, format)
        }
        Command::Limit { ring, chi, .. } => {
            let config = ring.config()?;
            if *chi {
                let values = limiting_chi(&config)?.to_f64();
                render_vector(&config, None, ("x", "chi"), &values, format)
            } else {
                render_grid(&limiting_wigner(&config)?.to_grid(), format)
            }
        }
        Command::TimeAverage {
            ring,
            total_time,
            samples,
            ..
        } => {
            let samples = samples.unwrap_or_else(|| (total_time.ceil() as usize).max(2));
            render_grid(
                &time_average_wigner(&ring.config()?, *total_time, samples)?,
                format,
            )
        }
        Command::RevivalScan {
            ring,
            t_start,
            t_end,
            dt,
            times,
            max_peaks,
            ..
        } => {
            let config = ring.config()?;
            let scan = match (times, t_start, t_end, dt) {
                (Some(ts), ..) => revival_scan_at(&config, ts.clone())?,
                (None, Some(a), Some(b), Some(d)) => revival_scan(&config, *a, *b, *d)?,
                _ => unreachable!("validated above"),
            };
            match format {
                Format::Json => scan_to_json(&scan),
                _ => scan_to_csv(&scan, *max_peaks),
            }
        }
    };
    Ok(bytes)
}

/// Builds the global thread pool from `QWPS_THREADS`, if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))
}

/// Validates, computes and writes the output of one invocation.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    use std::io::Write;

    let bytes = execute(&cli.command)?;
    match &cli.command.output().output {
        Some(path) => std::fs::write(path, &bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}
