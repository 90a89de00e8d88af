//! `choimap` — inspect, convert, apply, combine, and optimize quantum
//! channels stored as Kraus or Choi files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use choimap_core::builtin::random_cptp_choi;
use choimap_core::opt::{
    depolarizing_start, optimize_linear, LinearObjective, Sense, DEFAULT_STEP0,
};
use choimap_core::{
    apply_choi, apply_kraus, choi_to_kraus, product_choi, psd_check, validate_cptp,
};

use choimap_cli::error::{CliError, Result};
use choimap_cli::files::{
    load_channel, load_objective, load_state, save_choi, save_kraus, save_state, Channel,
};

#[derive(Parser)]
#[command(
    name = "choimap",
    version,
    about = "Quantum channel toolbox working on Choi and Kraus files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReprKind {
    Kraus,
    Choi,
}

#[derive(Subcommand)]
enum Command {
    /// Check a channel file for complete positivity and trace preservation.
    ///
    /// Prints one machine-readable line; exits 0 only if both hold.
    Validate {
        /// Channel file (kraus or choi kind).
        channel: PathBuf,
        /// Tolerance for the eigenvalue and trace-preservation checks.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },

    /// Convert between the Kraus and Choi representations.
    Convert {
        /// Channel file (kraus or choi kind).
        channel: PathBuf,
        /// Target representation.
        #[arg(long, value_enum)]
        to: ReprKind,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
        /// Positivity tolerance for the choi -> kraus direction.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },

    /// Apply a channel to a density matrix and write the output state.
    ///
    /// Uses the representation native to the channel file.
    Apply {
        /// Channel file (kraus or choi kind).
        channel: PathBuf,
        /// State file holding the input density matrix.
        state: PathBuf,
        /// Output state file.
        #[arg(long)]
        out: PathBuf,
        /// Tolerance for the density-matrix checks on the input state.
        #[arg(long, default_value_t = 1e-8)]
        state_tol: f64,
    },

    /// Write the Choi matrix of the parallel composition of two channels.
    Tensor {
        /// First channel file.
        channel_a: PathBuf,
        /// Second channel file.
        channel_b: PathBuf,
        /// Output choi-kind file.
        #[arg(long)]
        out: PathBuf,
    },

    /// Maximize a linear objective tr(F X) over CPTP Choi matrices.
    ///
    /// Prints one report line and writes the optimizer as a choi file;
    /// exits 1 if the run stopped on the iteration cap.
    Optimize {
        /// Hermitian objective: a channel file or a bare {d, matrix} file.
        #[arg(long)]
        objective: PathBuf,
        /// Input dimension of the channel being optimized.
        #[arg(long)]
        d_in: usize,
        /// Output dimension of the channel being optimized.
        #[arg(long)]
        d_out: usize,
        /// Outer iteration cap.
        #[arg(long, default_value_t = 5000)]
        max_iter: usize,
        /// Stopping tolerance on the objective window.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Start from a random CPTP channel with this seed instead of the
        /// maximally depolarizing point.
        #[arg(long)]
        seed: Option<u64>,
        /// Output choi-kind file for the optimizer.
        #[arg(long)]
        out: PathBuf,
    },

    /// Generate a reproducible random CPTP channel as a choi file.
    Random {
        /// Input dimension.
        #[arg(long)]
        d_in: usize,
        /// Output dimension.
        #[arg(long)]
        d_out: usize,
        /// Kraus rank of the generated channel.
        #[arg(long)]
        rank: usize,
        /// RNG seed; the same seed writes identical bytes.
        #[arg(long)]
        seed: u64,
        /// Output choi-kind file.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Validate { channel, tol } => cmd_validate(&channel, tol),
        Command::Convert {
            channel,
            to,
            out,
            tol,
        } => cmd_convert(&channel, to, &out, tol),
        Command::Apply {
            channel,
            state,
            out,
            state_tol,
        } => cmd_apply(&channel, &state, &out, state_tol),
        Command::Tensor {
            channel_a,
            channel_b,
            out,
        } => cmd_tensor(&channel_a, &channel_b, &out),
        Command::Optimize {
            objective,
            d_in,
            d_out,
            max_iter,
            tol,
            seed,
            out,
        } => cmd_optimize(&objective, d_in, d_out, max_iter, tol, seed, &out),
        Command::Random {
            d_in,
            d_out,
            rank,
            seed,
            out,
        } => cmd_random(d_in, d_out, rank, seed, &out),
    }
}

fn cmd_validate(channel: &PathBuf, tol: f64) -> Result<u8> {
    let x = load_channel(channel)?.to_choi();
    let report = validate_cptp(&x, tol)?;
    println!(
        "cp={} tp={} min_eigenvalue={:e} tp_defect={:e}",
        report.cp, report.tp, report.min_eigenvalue, report.tp_defect
    );
    Ok(if report.is_cptp() { 0 } else { 1 })
}

fn cmd_convert(channel: &PathBuf, to: ReprKind, out: &PathBuf, tol: f64) -> Result<u8> {
    let parsed = load_channel(channel)?;
    match (parsed, to) {
        (Channel::Kraus(k), ReprKind::Kraus) => save_kraus(out, &k)?,
        (Channel::Choi(x), ReprKind::Choi) => save_choi(out, &x)?,
        (Channel::Kraus(k), ReprKind::Choi) => {
            save_choi(out, &choimap_core::kraus_to_choi(&k))?
        }
        (Channel::Choi(x), ReprKind::Kraus) => {
            let psd = psd_check(x.matrix(), tol)?;
            if !psd.ok {
                return Err(CliError::Semantic(format!(
                    "channel is not completely positive: min eigenvalue {:e}",
                    psd.min_eigenvalue
                )));
            }
            let k = choi_to_kraus(&x, Some(tol))?;
            save_kraus(out, &k)?;
        }
    }
    Ok(0)
}

fn cmd_apply(channel: &PathBuf, state: &PathBuf, out: &PathBuf, state_tol: f64) -> Result<u8> {
    let parsed = load_channel(channel)?;
    let rho = load_state(state, state_tol)?;
    let output = match &parsed {
        Channel::Kraus(k) => apply_kraus(k, rho.matrix())?,
        Channel::Choi(x) => apply_choi(x, rho.matrix())?,
    };
    save_state(out, &output)?;
    Ok(0)
}

fn cmd_tensor(channel_a: &PathBuf, channel_b: &PathBuf, out: &PathBuf) -> Result<u8> {
    let xa = load_channel(channel_a)?.to_choi();
    let xb = load_channel(channel_b)?.to_choi();
    save_choi(out, &product_choi(&xa, &xb))?;
    Ok(0)
}

fn cmd_optimize(
    objective: &PathBuf,
    d_in: usize,
    d_out: usize,
    max_iter: usize,
    tol: f64,
    seed: Option<u64>,
    out: &PathBuf,
) -> Result<u8> {
    let f = load_objective(objective)?;
    if f.rows() != d_in * d_out || f.cols() != d_in * d_out {
        return Err(CliError::Malformed {
            path: objective.clone(),
            message: format!(
                "objective is {}x{}, expected side d_in*d_out = {}",
                f.rows(),
                f.cols(),
                d_in * d_out
            ),
        });
    }
    let obj = LinearObjective::new(f, Sense::Maximize)?;
    let start = match seed {
        Some(seed) => random_cptp_choi(d_in, d_out, d_in * d_out, seed)?,
        None => depolarizing_start(d_in, d_out),
    };
    let report = optimize_linear(&obj, &start, DEFAULT_STEP0, tol, max_iter)?;
    println!(
        "objective={:e} iterations={} converged={} min_eigenvalue={:e} tp_defect={:e}",
        report.objective_value,
        report.iterations,
        report.converged,
        report.feasibility.min_eigenvalue,
        report.feasibility.tp_defect
    );
    save_choi(out, &report.x_opt)?;
    Ok(if report.converged { 0 } else { 1 })
}

fn cmd_random(d_in: usize, d_out: usize, rank: usize, seed: u64, out: &PathBuf) -> Result<u8> {
    let x = random_cptp_choi(d_in, d_out, rank, seed)?;
    save_choi(out, &x)?;
    Ok(0)
}
