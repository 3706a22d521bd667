//! Mode implementations and output writing.

use crate::config::{Mode, Route, ScenarioConfig};
use num_complex::Complex64;
use polariton::dynamics::{
    alpha1_fano, alpha1_laplace, laplace_fano_equivalence, overlap, polariton_survival,
    EffectiveHamiltonian, SurvivalRoute,
};
use polariton::ensemble::{pv_susceptibility, susceptibility_quadrature};
use polariton::memory;
use polariton::quadrature;
use polariton::spectral::{
    default_pole_seeds, extract_fwhm, find_poles, perturbative_poles, predicted_width, spectrum,
};
use polariton::{dynamics, EnsembleParams, Error, LineShape, SpectralDistribution};
use serde_json::json;
use std::fmt::Write as _;
use std::path::Path;

/// Run one scenario; returns the process exit code.
pub fn run(config: &ScenarioConfig) -> i32 {
    match execute(config) {
        Ok(code) => code,
        Err(RunError::Config(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(RunError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(RunError::Io(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

enum RunError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidFwhm(_)
            | Error::InvalidRate { .. }
            | Error::InvalidFrequency(_)
            | Error::NonFiniteArgument(_)
            | Error::TooFewEmitters(_)
            | Error::TooManyEnsembles(_)
            | Error::NoSeeds
            | Error::ZeroCoupling
            | Error::DarkStateUndefined
            | Error::InvalidInput(_) => RunError::Config(e.to_string()),
            _ => RunError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

fn execute(config: &ScenarioConfig) -> Result<i32, RunError> {
    // Fail fast on the physical parameters shared by every mode.
    let cavity = config.cavity()?;
    let ensemble = config.ensemble()?;
    if config.grid_points < 2 {
        return Err(RunError::Config(format!(
            "grid_points must be at least 2, got {}",
            config.grid_points
        )));
    }

    let (csv, summary, all_pass) = match config.mode {
        Mode::Spectrum => run_spectrum(config)?,
        Mode::Poles => run_poles(config)?,
        Mode::Dynamics => run_dynamics(config)?,
        Mode::Survival => run_survival(config)?,
        Mode::MemoryScan => run_memory_scan(config)?,
        Mode::DarkState => run_dark_state(config)?,
        Mode::Validate => run_validate(config)?,
    };
    let _ = (&cavity, &ensemble);

    std::fs::write(&config.out, csv)?;
    let sidecar = json!({
        "config": config,
        "version": env!("CARGO_PKG_VERSION"),
        "summary": summary,
    });
    let sidecar_path = config.out.with_extension("json");
    std::fs::write(&sidecar_path, serde_json::to_string_pretty(&sidecar).unwrap())?;
    if config.emit_plot {
        let plot_path = config.out.with_extension("py");
        std::fs::write(&plot_path, plot_script(config.mode, &config.out))?;
    }

    if config.mode == Mode::Validate && !all_pass {
        return Ok(2);
    }
    Ok(0)
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn times_grid(config: &ScenarioConfig) -> Vec<f64> {
    let n = config.grid_points.max(2);
    (0..n)
        .map(|k| config.tau * k as f64 / (n - 1) as f64)
        .collect()
}

fn run_spectrum(config: &ScenarioConfig) -> Result<(String, serde_json::Value, bool), RunError> {
    let cavity = config.cavity()?;
    let ensemble = config.ensemble()?;
    let sp = spectrum(
        &cavity,
        &[ensemble],
        config.grid_min,
        config.grid_max,
        config.grid_points,
    )?;
    let mut csv = String::from("omega,re_t,im_t,abs_t_sq\n");
    for (w, t) in sp.probe().iter().zip(sp.amplitude()) {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_f(*w),
            fmt_f(t.re),
            fmt_f(t.im),
            fmt_f(t.norm_sqr())
        );
    }
    let peaks: Vec<_> = extract_fwhm(&sp)
        .into_iter()
        .map(|p| {
            json!({
                "position": p.position,
                "fwhm": p.fwhm,
                "at_boundary": p.at_boundary,
            })
        })
        .collect();
    let summary = json!({
        "peaks": peaks,
        "predicted_width": predicted_width(&ensemble, &cavity),
    });
    Ok((csv, summary, true))
}

fn run_poles(config: &ScenarioConfig) -> Result<(String, serde_json::Value, bool), RunError> {
    let cavity = config.cavity()?;
    let ensemble = config.ensemble()?;
    let seeds = default_pole_seeds(&cavity, &[ensemble]);
    let set = find_poles(&cavity, &[ensemble], &seeds)?;
    let mut csv = String::from("index,re_lambda,im_lambda\n");
    for (i, p) in set.poles.iter().enumerate() {
        let _ = writeln!(csv, "{i},{},{}", fmt_f(p.re), fmt_f(p.im));
    }
    let perturbative = perturbative_poles(&ensemble, &cavity)
        .map(|(lo, hi)| json!({ "lower": [lo.re, lo.im], "upper": [hi.re, hi.im] }))
        .unwrap_or(serde_json::Value::Null);
    let summary = json!({
        "poles": set.poles.iter().map(|p| [p.re, p.im]).collect::<Vec<_>>(),
        "residual": set.residual,
        "perturbative": perturbative,
    });
    Ok((csv, summary, true))
}

fn run_dynamics(config: &ScenarioConfig) -> Result<(String, serde_json::Value, bool), RunError> {
    let cavity = config.cavity()?;
    let ensemble = config.ensemble()?;
    let times = times_grid(config);
    let series = match config.route {
        Route::Laplace => alpha1_laplace(&cavity, &ensemble, &times)?,
        Route::Fano => alpha1_fano(&cavity, &ensemble, &times)?,
        Route::Discrete => {
            let sampled = ensemble.sample(config.oracle_n, sample_span(&ensemble))?;
            let h = EffectiveHamiltonian::new(&cavity, &sampled);
            let psi0 = h.cavity_state();
            let states = dynamics::evolve(&h, &psi0, &times)?;
            let values: Vec<Complex64> = states.iter().map(|s| overlap(&psi0, s)).collect();
            dynamics::TimeSeries::new(
                times.clone(),
                values,
                dynamics::AmplitudeLabel::CavityToCavity,
            )
        }
    };
    let mut csv = String::from("t,re_alpha1,im_alpha1,abs_alpha1_sq\n");
    for (t, v) in series.times().iter().zip(series.values()) {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_f(*t),
            fmt_f(v.re),
            fmt_f(v.im),
            fmt_f(v.norm_sqr())
        );
    }
    let final_v = series.values().last().copied().unwrap_or_default();
    let summary = json!({
        "route": format!("{:?}", config.route).to_lowercase(),
        "final_abs_sq": final_v.norm_sqr(),
    });
    Ok((csv, summary, true))
}

fn sample_span(ensemble: &EnsembleParams) -> f64 {
    // Lorentzian tails are heavy; give them a wider deterministic grid.
    match ensemble.distribution().shape() {
        LineShape::Lorentzian => 60.0,
        LineShape::Gaussian => 10.0,
        LineShape::Rectangular => 1.0,
    }
}

fn run_survival(config: &ScenarioConfig) -> Result<(String, serde_json::Value, bool), RunError> {
    let cavity = config.cavity()?;
    let ensemble = config.ensemble()?;
    let times = times_grid(config);
    let route = match config.route {
        Route::Laplace => SurvivalRoute::Laplace,
        Route::Discrete => SurvivalRoute::Discrete {
            emitters: config.oracle_n,
            span: sample_span(&ensemble),
        },
        Route::Fano => {
            return Err(RunError::Config(
                "survival mode supports the laplace and discrete routes".into(),
            ))
        }
    };
    let series = polariton_survival(&cavity, &ensemble, config.detuning, &times, route)?;
    let mut csv = String::from("t,survival\n");
    for (t, p) in series.times.iter().zip(&series.probability) {
        let _ = writeln!(csv, "{},{}", fmt_f(*t), fmt_f(*p));
    }
    let theta = dynamics::mixing_angle(config.detuning, config.coupling)?;
    let summary = json!({
        "mixing_angle": theta,
        "final_survival": series.probability.last(),
    });
    Ok((csv, summary, true))
}

fn run_memory_scan(config: &ScenarioConfig) -> Result<(String, serde_json::Value, bool), RunError> {
    let cavity = config.cavity()?;
    let ensemble = config.ensemble()?;
    let lo = config.coupling.max(1e-6);
    let hi = 10.0 * config.coupling * config.coupling / config.delta_fwhm;
    let scan = memory::optimize_detuning(&cavity, &ensemble, config.tau, (lo, hi.max(2.0 * lo)), 48)?;
    let mut csv = String::from("delta,fidelity\n");
    for (d, f) in &scan.scan {
        let _ = writeln!(csv, "{},{}", fmt_f(*d), fmt_f(*f));
    }
    let summary = json!({
        "optimal_detuning": scan.optimal_detuning,
        "optimal_fidelity": scan.optimal_fidelity,
        "flat_objective": scan.flat_objective,
        "storage_time": config.tau,
    });
    Ok((csv, summary, true))
}

fn run_dark_state(config: &ScenarioConfig) -> Result<(String, serde_json::Value, bool), RunError> {
    let cavity = config.cavity()?;
    let template = config.ensemble()?;
    let sp = memory::two_ensemble_spectrum(
        &cavity,
        &template,
        config.detuning,
        config.grid_min,
        config.grid_max,
        config.grid_points,
    )?;
    let mut csv = String::from("omega,re_t,im_t,abs_t_sq\n");
    for (w, t) in sp.probe().iter().zip(sp.amplitude()) {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_f(*w),
            fmt_f(t.re),
            fmt_f(t.im),
            fmt_f(t.norm_sqr())
        );
    }
    let gd = memory::dark_state_linewidth(
        config.detuning,
        config.coupling,
        config.kappa,
        config.gamma,
    )?;
    let central = extract_fwhm(&sp)
        .into_iter()
        .filter(|p| p.position.abs() < config.detuning.max(1e-12))
        .min_by(|a, b| {
            a.position
                .abs()
                .partial_cmp(&b.position.abs())
                .unwrap()
        });
    let summary = json!({
        "dark_state_linewidth": gd,
        "dark_state_photon_weight":
            memory::dark_state_overlap(config.detuning, config.coupling)?,
        "central_peak": central.map(|p| json!({"position": p.position, "fwhm": p.fwhm})),
    });
    Ok((csv, summary, true))
}

struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
}

impl Check {
    fn pass(&self) -> bool {
        self.value <= self.threshold
    }
}

fn run_validate(config: &ScenarioConfig) -> Result<(String, serde_json::Value, bool), RunError> {
    let mut checks: Vec<Check> = Vec::new();

    // Closed-form susceptibility against direct quadrature, all shapes.
    let mut worst_susc = 0.0f64;
    for shape in [
        LineShape::Gaussian,
        LineShape::Lorentzian,
        LineShape::Rectangular,
    ] {
        let dist = SpectralDistribution::new(shape, 0.0, 1.0)?;
        let ens = EnsembleParams::new(2.5, 0.01, dist)?;
        for k in 0..=20 {
            let x = -5.0 + 0.5 * k as f64;
            let closed = ens.susceptibility(x);
            let quad = susceptibility_quadrature(&dist, 2.5, 0.01, x)?;
            worst_susc = worst_susc.max((closed - quad).norm() / quad.norm());
        }
    }
    checks.push(Check {
        name: "susceptibility closed form vs quadrature (rel)",
        value: worst_susc,
        threshold: 1e-8,
    });

    // Principal-value route against the small-width limit.
    let mut worst_pv = 0.0f64;
    for shape in [
        LineShape::Gaussian,
        LineShape::Lorentzian,
        LineShape::Rectangular,
    ] {
        let dist = SpectralDistribution::new(shape, 0.0, 1.0)?;
        for &x in &[0.2, 0.7, 2.0] {
            let pv = pv_susceptibility(&dist, 1.0, x)?;
            let small = susceptibility_quadrature(&dist, 1.0, 1e-6, x)?;
            worst_pv = worst_pv.max((pv - small).norm() / small.norm());
        }
    }
    checks.push(Check {
        name: "zero-width susceptibility vs small-width limit (rel)",
        value: worst_pv,
        threshold: 1e-5,
    });

    // Faddeeva against its defining integral.
    let mut worst_w = 0.0f64;
    for &(x, y) in &[(0.3, 0.2), (2.5, 0.01), (4.0, 3.0), (7.5, 0.4), (12.0, 5.0)] {
        let z = Complex64::new(x, y);
        let w = polariton::faddeeva::faddeeva(z)?;
        let oracle = faddeeva_defining_integral(z);
        worst_w = worst_w.max((w - oracle).norm() / oracle.norm());
    }
    checks.push(Check {
        name: "faddeeva vs defining integral (rel)",
        value: worst_w,
        threshold: 1e-10,
    });

    // Lorentzian homogeneous equivalence is exact.
    let lor = EnsembleParams::new(
        2.0,
        0.3,
        SpectralDistribution::new(LineShape::Lorentzian, 0.0, 0.8)?,
    )?;
    let mut worst_lor = 0.0f64;
    for &x in &[0.0, 0.5, -1.7, 4.0] {
        let w = lor.susceptibility(x);
        let expected = 4.0 / Complex64::new(x, 0.5 * (0.3 + 0.8));
        worst_lor = worst_lor.max((w - expected).norm() / expected.norm());
    }
    checks.push(Check {
        name: "lorentzian homogeneous equivalence (rel)",
        value: worst_lor,
        threshold: 1e-12,
    });

    // Laplace vs spectral-integral time-domain agreement without losses.
    let ens = EnsembleParams::new(
        4.0,
        0.0,
        SpectralDistribution::new(config.dist.to_shape(), 0.0, 1.0)?,
    )?;
    let cav = config.cavity()?;
    let times: Vec<f64> = (0..=100).map(|k| 0.2 * k as f64).collect();
    let report = laplace_fano_equivalence(&cav, &ens, &times, 1e-4, 1e-6)?;
    checks.push(Check {
        name: "time-domain route agreement (sup)",
        value: report.time_domain_sup,
        threshold: 2e-2,
    });
    checks.push(Check {
        name: "transform vs eigenstate weight identity (rel sup)",
        value: report.spectral_identity_sup,
        threshold: 0.5,
    });
    checks.push(Check {
        name: "imag alpha1(0) (abs)",
        value: report.imag_alpha1_at_zero,
        threshold: 1e-9,
    });

    let mut csv = String::from("check,value,threshold,pass\n");
    let mut all_pass = true;
    println!("{:-^78}", " validation ");
    for c in &checks {
        let pass = c.pass();
        all_pass &= pass;
        println!(
            "{:<55} {:>10.3e} <= {:>8.1e}  {}",
            c.name,
            c.value,
            c.threshold,
            if pass { "PASS" } else { "FAIL" }
        );
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            c.name,
            fmt_f(c.value),
            fmt_f(c.threshold),
            pass
        );
    }
    println!("{:-^78}", if all_pass { " all passed " } else { " FAILURES " });

    let summary = json!({
        "all_pass": all_pass,
        "checks": checks.iter().map(|c| json!({
            "name": c.name, "value": c.value, "threshold": c.threshold, "pass": c.pass(),
        })).collect::<Vec<_>>(),
    });
    Ok((csv, summary, all_pass))
}

/// w(z) = (i/π) ∫ e^{−t²}/(z−t) dt by adaptive quadrature, Im z > 0.
fn faddeeva_defining_integral(z: Complex64) -> Complex64 {
    let mut pts = vec![-30.0f64, 30.0];
    for p in [
        z.re - 50.0 * z.im,
        z.re - z.im,
        z.re,
        z.re + z.im,
        z.re + 50.0 * z.im,
        -1.0,
        0.0,
        1.0,
    ] {
        if p > -30.0 && p < 30.0 {
            pts.push(p);
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let mut f = |t: f64| (-t * t).exp() / (z - t);
    let q = quadrature::integrate_segmented(&mut f, &pts, 1e-16, 5e-16, 4000);
    Complex64::new(0.0, std::f64::consts::FRAC_1_PI) * q.value
}

fn plot_script(mode: Mode, csv: &Path) -> String {
    let csv_name = csv
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out.csv".into());
    let (x, y, xlabel, ylabel, logy) = match mode {
        Mode::Spectrum | Mode::DarkState => (0, 3, "probe detuning (rad/us)", "|t|^2", true),
        Mode::Dynamics => (0, 3, "time (us)", "|alpha1|^2", false),
        Mode::Survival => (0, 1, "time (us)", "survival probability", false),
        Mode::MemoryScan => (0, 1, "detuning (rad/us)", "fidelity", false),
        Mode::Poles => (1, 2, "Re lambda (rad/us)", "Im lambda (rad/us)", false),
        Mode::Validate => (1, 2, "value", "threshold", true),
    };
    let scatter = matches!(mode, Mode::Poles | Mode::Validate);
    let semilog = if logy { "ax.set_yscale('log')\n" } else { "" };
    let style = if scatter { "'o'" } else { "'-'" };
    let logx = if matches!(mode, Mode::MemoryScan) {
        "ax.set_xscale('log')\n"
    } else {
        ""
    };
    format!(
        "#!/usr/bin/env python3\n\
         import csv\n\
         import matplotlib.pyplot as plt\n\
         \n\
         xs, ys = [], []\n\
         with open({csv_name:?}) as fh:\n\
         \x20   for row in csv.DictReader(fh):\n\
         \x20       vals = list(row.values())\n\
         \x20       try:\n\
         \x20           xs.append(float(vals[{x}]))\n\
         \x20           ys.append(float(vals[{y}]))\n\
         \x20       except ValueError:\n\
         \x20           continue\n\
         \n\
         fig, ax = plt.subplots(figsize=(7, 4.5))\n\
         ax.plot(xs, ys, {style}, lw=1.2, ms=4)\n\
         {semilog}{logx}\
         ax.set_xlabel({xlabel:?})\n\
         ax.set_ylabel({ylabel:?})\n\
         ax.grid(alpha=0.3)\n\
         fig.tight_layout()\n\
         fig.savefig({csv_name:?}.replace('.csv', '.png'), dpi=160)\n\
         print('wrote', {csv_name:?}.replace('.csv', '.png'))\n"
    )
}
