//! Scenario configuration: defaults, flat key=value files, JSON sidecars.

use polariton::{CavityParams, EnsembleParams, LineShape, SpectralDistribution};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Spectrum,
    Poles,
    Dynamics,
    Survival,
    MemoryScan,
    DarkState,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DistKind {
    Gaussian,
    Lorentzian,
    Rect,
}

impl DistKind {
    pub fn to_shape(self) -> LineShape {
        match self {
            DistKind::Gaussian => LineShape::Gaussian,
            DistKind::Lorentzian => LineShape::Lorentzian,
            DistKind::Rect => LineShape::Rectangular,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Laplace,
    Discrete,
    Fano,
}

/// Fully resolved run configuration. Frequencies are angular rates in
/// rad·µs⁻¹ relative to the cavity resonance; times are in µs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub dist: DistKind,
    /// Ensemble center relative to the cavity.
    pub omega_c: f64,
    /// Distribution width parameter.
    pub delta_fwhm: f64,
    /// Collective coupling.
    pub coupling: f64,
    /// Homogeneous emitter width.
    pub gamma: f64,
    /// Cavity linewidth.
    pub kappa: f64,
    /// Detuning for survival / memory / dark-state modes.
    pub detuning: f64,
    /// Storage / final time.
    pub tau: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
    /// Emitters used by the brute-force route.
    pub oracle_n: usize,
    /// Dynamics route.
    pub route: Route,
    /// Output CSV path; the JSON sidecar replaces the extension with .json.
    pub out: PathBuf,
    pub emit_plot: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Spectrum,
            dist: DistKind::Gaussian,
            omega_c: 0.0,
            delta_fwhm: 1.0,
            coupling: 3.5,
            gamma: 1e-4,
            kappa: 0.1,
            detuning: 0.5,
            tau: 100.0,
            grid_min: -6.0,
            grid_max: 6.0,
            grid_points: 4001,
            oracle_n: 2000,
            route: Route::Laplace,
            out: PathBuf::from("polariton_out.csv"),
            emit_plot: false,
        }
    }
}

impl ScenarioConfig {
    /// Validated cavity parameters (cavity frequency is the origin).
    pub fn cavity(&self) -> polariton::Result<CavityParams> {
        CavityParams::new(0.0, self.kappa)
    }

    /// Validated ensemble parameters.
    pub fn ensemble(&self) -> polariton::Result<EnsembleParams> {
        let dist = SpectralDistribution::new(self.dist.to_shape(), self.omega_c, self.delta_fwhm)?;
        EnsembleParams::new(self.coupling, self.gamma, dist)
    }
}

/// Parse a configuration file: either a flat `key = value` text or a JSON
/// document (a bare config, or a sidecar holding one under "config").
pub fn parse_config_file(path: &Path) -> Result<ScenarioConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    if text.trim_start().starts_with('{') {
        parse_json_config(&text)
    } else {
        parse_flat_config(&text)
    }
}

fn parse_json_config(text: &str) -> Result<ScenarioConfig, String> {
    #[derive(Deserialize)]
    struct Sidecar {
        config: ScenarioConfig,
    }
    if let Ok(sidecar) = serde_json::from_str::<Sidecar>(text) {
        return Ok(sidecar.config);
    }
    serde_json::from_str::<ScenarioConfig>(text).map_err(|e| format!("invalid JSON config: {e}"))
}

/// Grammar: one `key = value` pair per line; `#` starts a comment; blank
/// lines ignored. Keys match the CLI flag names with `-` or `_` separators.
fn parse_flat_config(text: &str) -> Result<ScenarioConfig, String> {
    let mut config = ScenarioConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let fail = |e: String| format!("line {}: {key}: {e}", lineno + 1);
        macro_rules! num {
            () => {
                value.parse().map_err(|e| fail(format!("{e}")))?
            };
        }
        match key.as_str() {
            "mode" => {
                config.mode = serde_json::from_value(serde_json::Value::String(value.into()))
                    .map_err(|e| fail(format!("{e}")))?
            }
            "dist" => {
                config.dist = serde_json::from_value(serde_json::Value::String(value.into()))
                    .map_err(|e| fail(format!("{e}")))?
            }
            "route" => {
                config.route = serde_json::from_value(serde_json::Value::String(value.into()))
                    .map_err(|e| fail(format!("{e}")))?
            }
            "omega_c" => config.omega_c = num!(),
            "delta_fwhm" => config.delta_fwhm = num!(),
            "coupling" => config.coupling = num!(),
            "gamma" => config.gamma = num!(),
            "kappa" => config.kappa = num!(),
            "detuning" => config.detuning = num!(),
            "tau" => config.tau = num!(),
            "grid_min" => config.grid_min = num!(),
            "grid_max" => config.grid_max = num!(),
            "grid_points" => config.grid_points = num!(),
            "oracle_n" => config.oracle_n = num!(),
            "out" => config.out = PathBuf::from(value),
            "emit_plot" => config.emit_plot = value.parse().map_err(|e| fail(format!("{e}")))?,
            other => return Err(format!("line {}: unknown key '{other}'", lineno + 1)),
        }
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_config_round_trip() {
        let text = "
            # a comment
            mode = poles
            dist = rect
            coupling = 2.5   # trailing comment
            grid_points = 101
            emit_plot = true
        ";
        let cfg = parse_flat_config(text).unwrap();
        assert_eq!(cfg.mode, Mode::Poles);
        assert_eq!(cfg.dist, DistKind::Rect);
        assert_eq!(cfg.coupling, 2.5);
        assert_eq!(cfg.grid_points, 101);
        assert!(cfg.emit_plot);
        // Untouched keys keep defaults.
        assert_eq!(cfg.kappa, 0.1);
    }

    #[test]
    fn bad_keys_and_values_are_reported_with_lines() {
        assert!(parse_flat_config("bogus = 1").unwrap_err().contains("unknown key"));
        assert!(parse_flat_config("coupling = abc").unwrap_err().contains("coupling"));
        assert!(parse_flat_config("just words").unwrap_err().contains("key = value"));
    }

    #[test]
    fn json_sidecar_is_accepted() {
        let cfg = ScenarioConfig {
            coupling: 7.0,
            ..Default::default()
        };
        let sidecar = serde_json::json!({
            "config": cfg,
            "version": "x",
            "summary": {}
        });
        let parsed = parse_json_config(&sidecar.to_string()).unwrap();
        assert_eq!(parsed.coupling, 7.0);
        let bare = serde_json::to_string(&cfg).unwrap();
        assert_eq!(parse_json_config(&bare).unwrap().coupling, 7.0);
    }
}
