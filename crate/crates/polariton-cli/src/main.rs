//! Batch front end for the cavity–ensemble simulator.
//!
//! Reads a scenario (defaults, optional config file, CLI overrides), runs
//! one computation, and writes a CSV plus a JSON sidecar carrying the fully
//! resolved configuration and summary scalars. Exit codes: 0 success,
//! 1 invalid configuration, 2 numerical failure.

mod config;
mod run;

use clap::Parser;
use config::{DistKind, Mode, Route, ScenarioConfig};
use std::path::PathBuf;

/// Cavity mode coupled to inhomogeneously broadened emitter ensembles:
/// transmission spectra, polariton poles, exact dynamics and quantum-memory
/// fidelities.
///
/// All frequencies and rates are angular, in rad/us, relative to the cavity
/// resonance; times are in us. Defaults reproduce the standard strong
/// coupling working point (gaussian, fwhm 1, coupling 3.5, kappa 0.1,
/// gamma 1e-4).
///
/// Config files hold one `key = value` pair per line (keys match the long
/// flags, `#` comments); a JSON sidecar from a previous run is also accepted
/// and reproduces that run. CLI flags override the file.
///
/// CSV columns per mode:
///   spectrum     omega, re_t, im_t, abs_t_sq
///   poles        index, re_lambda, im_lambda
///   dynamics     t, re_alpha1, im_alpha1, abs_alpha1_sq
///   survival     t, survival
///   memory-scan  delta, fidelity
///   dark-state   omega, re_t, im_t, abs_t_sq
///   validate     check, value, threshold, pass
///
/// The POLARITON_THREADS environment variable caps internal parallelism.
#[derive(Parser, Debug)]
#[command(name = "polariton", version, verbatim_doc_comment, allow_negative_numbers = true)]
struct Cli {
    /// Computation to run.
    #[arg(long, value_enum)]
    mode: Option<Mode>,

    /// Config file: flat key=value text or a JSON sidecar.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Emitter distribution shape.
    #[arg(long, value_enum)]
    dist: Option<DistKind>,

    /// Ensemble center relative to the cavity (rad/us).
    #[arg(long)]
    omega_c: Option<f64>,

    /// Distribution width parameter (rad/us).
    #[arg(long)]
    delta_fwhm: Option<f64>,

    /// Collective coupling (rad/us).
    #[arg(long)]
    coupling: Option<f64>,

    /// Homogeneous emitter linewidth (rad/us).
    #[arg(long)]
    gamma: Option<f64>,

    /// Cavity linewidth (rad/us).
    #[arg(long)]
    kappa: Option<f64>,

    /// Detuning for survival / memory-scan / dark-state modes (rad/us).
    #[arg(long)]
    detuning: Option<f64>,

    /// Storage or final time (us).
    #[arg(long)]
    tau: Option<f64>,

    /// Lower edge of the probe grid (rad/us).
    #[arg(long)]
    grid_min: Option<f64>,

    /// Upper edge of the probe grid (rad/us).
    #[arg(long)]
    grid_max: Option<f64>,

    /// Number of grid points (or time samples).
    #[arg(long)]
    grid_points: Option<usize>,

    /// Emitters in the brute-force discretized route.
    #[arg(long)]
    oracle_n: Option<usize>,

    /// Dynamics route: laplace, discrete or fano.
    #[arg(long, value_enum)]
    route: Option<Route>,

    /// Output CSV path (sidecar and plot script derive from it).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write a matplotlib script next to the CSV.
    #[arg(long)]
    emit_plot: bool,
}

fn main() {
    if let Ok(threads) = std::env::var("POLARITON_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: POLARITON_THREADS must be a positive integer, got '{threads}'");
                std::process::exit(1);
            }
        }
    }

    let cli = Cli::parse();

    let mut config = match &cli.config {
        Some(path) => match config::parse_config_file(path) {
            Ok(c) => c,
            Err(msg) => {
                eprintln!("error: {msg}");
                std::process::exit(1);
            }
        },
        None => ScenarioConfig::default(),
    };

    macro_rules! override_with {
        ($($field:ident),* $(,)?) => {
            $(if let Some(v) = cli.$field.clone() { config.$field = v; })*
        };
    }
    override_with!(
        mode, dist, omega_c, delta_fwhm, coupling, gamma, kappa, detuning, tau, grid_min,
        grid_max, grid_points, oracle_n, route, out,
    );
    if cli.emit_plot {
        config.emit_plot = true;
    }

    std::process::exit(run::run(&config));
}
