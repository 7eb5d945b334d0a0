use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sech_jcm::cli::{self, RunConfig};

#[derive(Parser)]
#[command(name = "sech-jcm", version, about = "Atomic inversion of Jaynes-Cummings models driven by a sech pulse")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the inversion time series and emit CSV.
    Run(Settings),
    /// Cross-check the analytic engine against direct integration.
    Verify(Settings),
}

/// Times are in units of τ, couplings as λ₀τ, detunings as δτ.
#[derive(Args)]
struct Settings {
    /// key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// fig1_resonant | fig1_detuned | fig2_resonant | fig2_detuned | fig3_resonant | fig3_detuned
    #[arg(long)]
    preset: Option<String>,
    /// standard | mphoton | kerr
    #[arg(long)]
    model: Option<String>,
    /// Coherent field with this mean photon number (atom excited).
    #[arg(long)]
    nbar: Option<String>,
    /// Field number state |n>.
    #[arg(long)]
    n: Option<String>,
    /// Initial excited-state probability for a number state.
    #[arg(long)]
    pe: Option<String>,
    #[arg(long = "lambda0-tau")]
    lambda0_tau: Option<String>,
    /// Pulse switch-on time t0/τ.
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<String>,
    #[arg(long = "delta-tau", allow_hyphen_values = true)]
    delta_tau: Option<String>,
    #[arg(long = "kappa-tau", allow_hyphen_values = true)]
    kappa_tau: Option<String>,
    #[arg(long = "omega-tau")]
    omega_tau: Option<String>,
    /// Photons exchanged per transition.
    #[arg(long)]
    m: Option<String>,
    /// start:end:samples in units of τ.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// analytic | ode | both
    #[arg(long)]
    engine: Option<String>,
    /// Output CSV path; stdout if absent.
    #[arg(long)]
    out: Option<String>,
    /// Discarded Poisson tail probability.
    #[arg(long = "tail-eps")]
    tail_eps: Option<String>,
    /// ODE tolerance.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long = "gamma-shift", hide = true, allow_hyphen_values = true)]
    gamma_shift: Option<String>,
}

impl Settings {
    fn resolve(&self) -> sech_jcm::Result<RunConfig> {
        let mut kv = match &self.config {
            Some(path) => cli::read_config_file(path)?,
            None => Vec::new(),
        };
        // order matters: n before pe
        let flags = [
            ("preset", &self.preset),
            ("model", &self.model),
            ("m", &self.m),
            ("omega_tau", &self.omega_tau),
            ("delta_tau", &self.delta_tau),
            ("kappa_tau", &self.kappa_tau),
            ("lambda0_tau", &self.lambda0_tau),
            ("t0", &self.t0),
            ("nbar", &self.nbar),
            ("n", &self.n),
            ("pe", &self.pe),
            ("grid", &self.grid),
            ("engine", &self.engine),
            ("out", &self.out),
            ("tail_eps", &self.tail_eps),
            ("tol", &self.tol),
            ("gamma_shift", &self.gamma_shift),
        ];
        kv.extend(
            flags
                .into_iter()
                .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))),
        );
        RunConfig::from_settings(&kv)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(s) => s.resolve().and_then(|c| cli::run_and_emit(&c)).map(|csv| {
            if let Some(csv) = csv {
                print!("{csv}");
            }
            true
        }),
        Command::Verify(s) => s.resolve().and_then(|c| cli::verify(&c)).map(|report| {
            if report.passed {
                println!("verify: pass, worst discrepancy {}", report.worst);
            } else {
                eprintln!(
                    "verify: FAIL, discrepancy {} exceeds {:e}",
                    report.worst,
                    cli::VERIFY_TOL
                );
            }
            report.passed
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
