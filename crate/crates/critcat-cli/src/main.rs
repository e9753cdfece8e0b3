//! Command-line front end: reproduces the spectral sweeps, rate scans,
//! protocol grids and symbolic tables as CSV files with JSON metadata
//! sidecars.

mod commands;
mod config;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{AppError, Ctx};

#[derive(Parser)]
#[command(
    name = "critcat",
    version,
    about = "Spectral analysis and protocols for dissipatively stabilized Kerr cat qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Parameter file (flat JSON; keys depend on the subcommand).
    #[arg(long, global = true)]
    params: Option<std::path::PathBuf>,

    /// Grid spec `axis:start:stop:count`, repeatable.
    #[arg(long = "grid", global = true)]
    grids: Vec<String>,

    /// Fock cutoff override (even values required for block work).
    #[arg(long, global = true)]
    cutoff: Option<usize>,

    /// Output directory (default: $CRITCAT_OUT or ./out).
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,

    /// Worker threads for sweep dispatch (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Evolution tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Table preset row (a..f) for protocol subcommands.
    #[arg(long, global = true)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Gaps and lowest eigenvalues of the four parity sectors at one point.
    Spectrum {
        /// Also dump the dense superoperator in binary form.
        #[arg(long)]
        dump_superop: bool,
    },
    /// Detuning sweep of gaps, occupations and the NS diagnostic.
    SweepDelta,
    /// Phase-flip rate versus drive amplitude at fixed detuning.
    GammaPhi,
    /// Optimal detuning versus drive amplitude.
    OptimalDelta,
    /// Critical drive amplitude from the detuning jump.
    FindGc,
    /// Optimal-detuning scan with the exponential-suppression fit.
    Zeta,
    /// Recovery-from-frequency-shift infidelity grid.
    Recover,
    /// Single X-gate trajectory.
    GateX,
    /// X-gate return infidelity versus drive strength.
    GateXError,
    /// Two-qubit XX-gate Bell oscillation.
    GateXx,
    /// Phase-flip rate versus detuning for several dephasing rates.
    DephasingStudy,
    /// Derived couplings and table consistency from microscopic parameters.
    DeriveParams,
    /// Resonant term tables of the rotating-wave expansion.
    Rwa,
    /// Two-mode versus effective single-mode comparison.
    ValidateAdiabatic,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    critcat::linalg::configure_blas_threads(1);
    if let Some(w) = cli.workers {
        critcat::sweep::configure_workers(w);
    }
    let started = Instant::now();
    let ctx = match Ctx::new(
        cli.params.clone(),
        &cli.grids,
        cli.cutoff,
        cli.out.clone(),
        cli.tol,
        cli.preset.clone(),
        started,
    ) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let result = match &cli.command {
        Command::Spectrum { dump_superop } => commands::spectrum(&ctx, *dump_superop),
        Command::SweepDelta => commands::sweep_delta(&ctx),
        Command::GammaPhi => commands::gamma_phi(&ctx),
        Command::OptimalDelta => commands::optimal_delta(&ctx),
        Command::FindGc => commands::find_gc(&ctx),
        Command::Zeta => commands::zeta(&ctx),
        Command::Recover => commands::recover(&ctx),
        Command::GateX => commands::gate_x(&ctx),
        Command::GateXError => commands::gate_x_error(&ctx),
        Command::GateXx => commands::gate_xx(&ctx),
        Command::DephasingStudy => commands::dephasing_study(&ctx),
        Command::DeriveParams => commands::derive_params(&ctx),
        Command::Rwa => commands::rwa(&ctx),
        Command::ValidateAdiabatic => commands::validate_adiabatic(&ctx),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: AppError) -> ExitCode {
    let (kind, code) = match &e {
        AppError::Config(_) => ("config", 2u8),
        AppError::Numerical(_) => ("numerical", 3u8),
    };
    let msg = serde_json::json!({
        "error": { "kind": kind, "message": e.to_string() }
    });
    eprintln!("{msg}");
    ExitCode::from(code)
}
