//! Quantum-memory figures of merit.
//!
//! Two storage schemes built on cavity protection: a single dispersively
//! coupled ensemble holding the excitation in a dressed state at an
//! optimized detuning, and a pair of symmetrically detuned ensembles whose
//! collective dark state yields a narrow central transmission line.

use crate::dynamics::{self, mixing_angle, LaplaceSettings, SurvivalRoute};
use crate::error::{Error, Result};
use crate::params::{CavityParams, EnsembleParams};
use crate::spectral::{self, TransmissionSpectrum};
use num_complex::Complex64;
use rayon::prelude::*;

/// Dressed storage state cos(θ/2)|collective⟩ + i sin(θ/2)|cavity⟩ with
/// cot θ = δ/(2Ω), θ ∈ (0, π). Large positive detuning makes it
/// matter-like.
#[derive(Debug, Clone, Copy)]
pub struct DressedState {
    mixing_angle: f64,
}

impl DressedState {
    pub fn new(detuning: f64, coupling: f64) -> Result<Self> {
        Ok(Self {
            mixing_angle: mixing_angle(detuning, coupling)?,
        })
    }

    pub fn mixing_angle(&self) -> f64 {
        self.mixing_angle
    }

    /// Amplitude on the bare photon state, i sin(θ/2).
    pub fn cavity_amplitude(&self) -> Complex64 {
        Complex64::new(0.0, (0.5 * self.mixing_angle).sin())
    }

    /// Amplitude on the collective emitter state, cos(θ/2).
    pub fn collective_amplitude(&self) -> f64 {
        (0.5 * self.mixing_angle).cos()
    }
}

/// Single-ensemble storage scenario: the ensemble template is recentered a
/// detuning δ above the cavity and the dressed state is held for the
/// storage time.
#[derive(Debug, Clone, Copy)]
pub struct MemoryScenario {
    cavity: CavityParams,
    ensemble: EnsembleParams,
    detuning: f64,
    storage_time: f64,
}

impl MemoryScenario {
    pub fn new(
        cavity: CavityParams,
        ensemble: EnsembleParams,
        detuning: f64,
        storage_time: f64,
    ) -> Result<Self> {
        if !(storage_time.is_finite() && storage_time >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "storage time must be ≥ 0, got {storage_time}"
            )));
        }
        if !detuning.is_finite() {
            return Err(Error::InvalidFrequency(detuning));
        }
        Ok(Self {
            cavity,
            ensemble,
            detuning,
            storage_time,
        })
    }

    pub fn cavity(&self) -> &CavityParams {
        &self.cavity
    }

    pub fn ensemble(&self) -> &EnsembleParams {
        &self.ensemble
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn storage_time(&self) -> f64 {
        self.storage_time
    }

    pub fn dressed_state(&self) -> Result<DressedState> {
        DressedState::new(self.detuning, self.ensemble.coupling())
    }
}

/// Probability of recovering the excitation from the dressed state after
/// the storage time, F = |⟨ψ(δ)|U(τ)|ψ(δ)⟩|².
pub fn memory_fidelity(scenario: &MemoryScenario) -> Result<f64> {
    memory_fidelity_with(scenario, SurvivalRoute::Laplace, &LaplaceSettings::default())
}

/// [`memory_fidelity`] over an explicit route (the discrete route serves as
/// the brute-force cross-check).
pub fn memory_fidelity_with(
    scenario: &MemoryScenario,
    route: SurvivalRoute,
    settings: &LaplaceSettings,
) -> Result<f64> {
    let series = dynamics::polariton_survival_with(
        &scenario.cavity,
        &scenario.ensemble,
        scenario.detuning,
        &[scenario.storage_time],
        route,
        settings,
    )?;
    Ok(series.probability[0])
}

/// Result of a detuning optimization.
#[derive(Debug, Clone)]
pub struct DetuningScan {
    /// Maximizing detuning.
    pub optimal_detuning: f64,
    /// Fidelity at the maximizer.
    pub optimal_fidelity: f64,
    /// The coarse scan curve (detuning, fidelity), for plotting.
    pub scan: Vec<(f64, f64)>,
    /// Set when the objective is flat to 1e−6 across the scan.
    pub flat_objective: bool,
}

/// Maximize the storage fidelity over the detuning.
///
/// A log-spaced coarse scan (at least 40 points) brackets the maximum and a
/// golden-section refinement narrows it to a relative detuning tolerance of
/// 1e−3. Scan points evaluate in parallel; ties resolve to the lowest
/// detuning, so the result does not depend on thread scheduling.
pub fn optimize_detuning(
    cavity: &CavityParams,
    ensemble: &EnsembleParams,
    storage_time: f64,
    delta_range: (f64, f64),
    n_scan: usize,
) -> Result<DetuningScan> {
    let (lo, hi) = delta_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidInput(format!(
            "detuning range must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    let n = n_scan.max(40);
    let settings = LaplaceSettings::default();

    let deltas: Vec<f64> = (0..n)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp())
        .collect();
    let scan: Vec<(f64, f64)> = deltas
        .par_iter()
        .map(|&delta| {
            let scenario = MemoryScenario::new(*cavity, *ensemble, delta, storage_time)?;
            Ok((delta, memory_fidelity(&scenario)?))
        })
        .collect::<Result<_>>()?;

    let mut best = 0usize;
    for (i, &(_, f)) in scan.iter().enumerate() {
        if f > scan[best].1 {
            best = i;
        }
    }
    let (f_min, f_max) = scan
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, f)| {
            (a.min(f), b.max(f))
        });
    let flat_objective = f_max - f_min < 1e-6;
    if flat_objective {
        return Ok(DetuningScan {
            optimal_detuning: scan[best].0,
            optimal_fidelity: scan[best].1,
            scan,
            flat_objective,
        });
    }

    // Golden-section refinement on the bracketing interval.
    let eval = |delta: f64| -> Result<f64> {
        let scenario = MemoryScenario::new(*cavity, *ensemble, delta, storage_time)?;
        memory_fidelity_with(&scenario, SurvivalRoute::Laplace, &settings)
    };
    let mut a = scan[best.saturating_sub(1)].0;
    let mut b = scan[(best + 1).min(scan.len() - 1)].0;
    if a >= b {
        return Ok(DetuningScan {
            optimal_detuning: scan[best].0,
            optimal_fidelity: scan[best].1,
            scan,
            flat_objective,
        });
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while (b - a) > 1e-3 * b {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        }
    }
    let (mut opt_d, mut opt_f) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if scan[best].1 > opt_f {
        opt_d = scan[best].0;
        opt_f = scan[best].1;
    }

    Ok(DetuningScan {
        optimal_detuning: opt_d,
        optimal_fidelity: opt_f,
        scan,
        flat_objective,
    })
}

/// Linewidth of the two-ensemble dark state,
/// Γ_d = (δ²κ + 2Ω²γ) / (δ² + 2Ω²).
pub fn dark_state_linewidth(detuning: f64, coupling: f64, kappa: f64, gamma: f64) -> Result<f64> {
    if detuning == 0.0 && coupling == 0.0 {
        return Err(Error::DarkStateUndefined);
    }
    let d2 = detuning * detuning;
    let c2 = 2.0 * coupling * coupling;
    Ok((d2 * kappa + c2 * gamma) / (d2 + c2))
}

/// Photonic weight of the dark state, δ²/(δ² + 2Ω²).
pub fn dark_state_overlap(detuning: f64, coupling: f64) -> Result<f64> {
    if detuning == 0.0 && coupling == 0.0 {
        return Err(Error::DarkStateUndefined);
    }
    let d2 = detuning * detuning;
    Ok(d2 / (d2 + 2.0 * coupling * coupling))
}

/// Transmission of a cavity coupled to two copies of the ensemble template,
/// recentered at ω₀ ± δ.
pub fn two_ensemble_spectrum(
    cavity: &CavityParams,
    template: &EnsembleParams,
    detuning: f64,
    omega_min: f64,
    omega_max: f64,
    n_points: usize,
) -> Result<TransmissionSpectrum> {
    let upper = template.recentered(cavity.frequency() + detuning);
    let lower = template.recentered(cavity.frequency() - detuning);
    spectral::spectrum(cavity, &[upper, lower], omega_min, omega_max, n_points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{LineShape, SpectralDistribution};
    use crate::spectral::extract_fwhm;
    use std::f64::consts::PI;

    fn gaussian(fwhm: f64) -> SpectralDistribution {
        SpectralDistribution::new(LineShape::Gaussian, 0.0, fwhm).unwrap()
    }

    #[test]
    fn dressed_state_angles() {
        // δ = 0: equal superposition.
        let d = DressedState::new(0.0, 3.0).unwrap();
        assert!((d.mixing_angle() - PI / 2.0).abs() < 1e-15);
        assert!((d.collective_amplitude() - (0.5f64).sqrt()).abs() < 1e-12);
        // δ = 2Ω: cot θ = 1 → θ = π/4.
        let d = DressedState::new(6.0, 3.0).unwrap();
        assert!((d.mixing_angle() - PI / 4.0).abs() < 1e-15);
        // δ → +∞: matter-like.
        let d = DressedState::new(1e9, 3.0).unwrap();
        assert!(d.collective_amplitude() > 1.0 - 1e-9);
        assert!(d.cavity_amplitude().norm() < 1e-8);
        // Ω = 0 is rejected.
        assert!(matches!(
            DressedState::new(1.0, 0.0),
            Err(Error::ZeroCoupling)
        ));
    }

    #[test]
    fn zero_storage_time_is_perfect() {
        let cav = CavityParams::new(0.0, 0.1).unwrap();
        let ens = EnsembleParams::new(10.0, 1e-4, gaussian(1.0)).unwrap();
        let scenario = MemoryScenario::new(cav, ens, 50.0, 0.0).unwrap();
        let f = memory_fidelity(&scenario).unwrap();
        assert_eq!(f, 1.0);
    }

    #[test]
    fn far_dispersive_limit_decays_at_gamma() {
        // Narrow ensemble, huge detuning: the state is matter-like and the
        // fidelity follows e^{−γτ}; checked against the brute-force route.
        let gamma = 1e-4;
        let cav = CavityParams::new(0.0, 0.1).unwrap();
        let ens = EnsembleParams::new(1.0, gamma, gaussian(1e-4)).unwrap();
        let scenario = MemoryScenario::new(cav, ens, 100.0, 100.0).unwrap();
        let f = memory_fidelity(&scenario).unwrap();
        let expected = (-gamma * 100.0f64).exp();
        assert!((f - expected).abs() < 2e-3, "{f} vs {expected}");

        let f_disc = memory_fidelity_with(
            &scenario,
            SurvivalRoute::Discrete {
                emitters: 600,
                span: 10.0,
            },
            &LaplaceSettings::default(),
        )
        .unwrap();
        assert!((f - f_disc).abs() < 1e-3, "laplace {f} vs discrete {f_disc}");
    }

    #[test]
    fn lossless_fidelity_is_unity_at_protected_detuning() {
        // κ = γ = 0 and a narrow ensemble: the dressed state is the exact
        // eigenstate up to a bath admixture 2μ₂(δ/Ω²)², which is below 1e−4
        // here, so the fidelity stays at unity.
        let cav = CavityParams::new(0.0, 0.0).unwrap();
        let ens = EnsembleParams::new(40.0, 0.0, gaussian(0.1)).unwrap();
        let scenario = MemoryScenario::new(cav, ens, 80.0, 50.0).unwrap();
        let f = memory_fidelity(&scenario).unwrap();
        assert!(f > 1.0 - 1e-4, "lossless fidelity {f}");
        // Quadrature noise on the inversion route sits at the 1e-7 scale.
        assert!(f <= 1.0 + 1e-6, "fidelity above unity: {f}");
    }

    #[test]
    fn lossless_fidelity_deficit_matches_brute_force() {
        // With a broad ensemble the sudden preparation leaves a bath
        // admixture: the plateau sits measurably below 1 and both routes
        // agree on it.
        let cav = CavityParams::new(0.0, 0.0).unwrap();
        let ens = EnsembleParams::new(40.0, 0.0, gaussian(1.0)).unwrap();
        let scenario = MemoryScenario::new(cav, ens, 160.0, 50.0).unwrap();
        let f = memory_fidelity(&scenario).unwrap();
        let f_disc = memory_fidelity_with(
            &scenario,
            SurvivalRoute::Discrete {
                emitters: 3000,
                span: 12.0,
            },
            &LaplaceSettings::default(),
        )
        .unwrap();
        assert!((f - f_disc).abs() < 1e-4, "laplace {f} vs discrete {f_disc}");
        // Deficit ≈ 2μ₂/gap² with gap = Ω²/δ = 10.
        let deficit = 1.0 - f;
        assert!(
            deficit > 0.010 && deficit < 0.025,
            "hybridization deficit {deficit}"
        );
    }

    #[test]
    fn optimize_detuning_brackets_the_gap_tradeoff() {
        let cav = CavityParams::new(0.0, 0.1).unwrap();
        let ens = EnsembleParams::new(20.0, 1e-4, gaussian(1.0)).unwrap();
        let scan = optimize_detuning(&cav, &ens, 100.0, (20.0, 4000.0), 40).unwrap();
        assert!(!scan.flat_objective);
        assert_eq!(scan.scan.len(), 40);
        // The protective gap Ω²/δ* lands near a few ensemble widths.
        let gap = 20.0 * 20.0 / scan.optimal_detuning;
        assert!(gap > 2.0 && gap < 8.0, "gap {gap}");
        assert!(scan.optimal_fidelity > 0.4, "{}", scan.optimal_fidelity);
        // The refined optimum cannot fall below the best coarse sample.
        let coarse_best = scan
            .scan
            .iter()
            .map(|&(_, f)| f)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(scan.optimal_fidelity >= coarse_best - 1e-12);
    }

    #[test]
    fn flat_objective_is_flagged() {
        // Lossless cavity, zero-width ensemble, far-dispersive everywhere:
        // fidelity is 1 at every detuning.
        let cav = CavityParams::new(0.0, 0.0).unwrap();
        let ens = EnsembleParams::new(1.0, 0.0, gaussian(1e-9)).unwrap();
        let scan = optimize_detuning(&cav, &ens, 1.0, (1e4, 1e5), 40).unwrap();
        assert!(
            scan.flat_objective,
            "spread not flat: {:?}",
            scan.optimal_fidelity
        );
        // Deterministic: a repeated run reproduces the same maximizer.
        let again = optimize_detuning(&cav, &ens, 1.0, (1e4, 1e5), 40).unwrap();
        assert_eq!(scan.optimal_detuning, again.optimal_detuning);
        assert_eq!(scan.optimal_fidelity, again.optimal_fidelity);
    }

    #[test]
    fn dark_state_linewidth_limits() {
        // δ = 0 → γ; δ ≫ Ω → κ.
        assert_eq!(dark_state_linewidth(0.0, 1.0, 0.5, 1e-4).unwrap(), 1e-4);
        let wide = dark_state_linewidth(1e6, 1.0, 0.5, 1e-4).unwrap();
        assert!((wide - 0.5).abs() < 1e-9);
        // Mixed regime value by direct substitution.
        let mid = dark_state_linewidth(0.5, 1.0, 0.5, 1e-4).unwrap();
        let expected = (0.25 * 0.5 + 2.0 * 1e-4) / (0.25 + 2.0);
        assert!((mid - expected).abs() < 1e-15);
        assert!(matches!(
            dark_state_linewidth(0.0, 0.0, 0.5, 1e-4),
            Err(Error::DarkStateUndefined)
        ));
    }

    #[test]
    fn dark_state_overlap_values() {
        assert_eq!(dark_state_overlap(0.0, 1.0).unwrap(), 0.0);
        let half = dark_state_overlap(2.0f64.sqrt(), 1.0).unwrap();
        assert!((half - 0.5).abs() < 1e-15);
        let photon = dark_state_overlap(1e8, 1.0).unwrap();
        assert!(photon > 1.0 - 1e-15);
    }

    #[test]
    fn merged_ensembles_equal_boosted_single() {
        // δ = 0: two ensembles on top of each other act as one with √2 Ω.
        let cav = CavityParams::new(0.0, 0.5).unwrap();
        let template = EnsembleParams::new(1.0, 1e-4, gaussian(0.1)).unwrap();
        let two = two_ensemble_spectrum(&cav, &template, 0.0, -3.0, 3.0, 501).unwrap();
        let boosted = template.with_coupling(2.0f64.sqrt()).unwrap();
        let one = spectral::spectrum(&cav, &[boosted], -3.0, 3.0, 501).unwrap();
        for (a, b) in two.amplitude().iter().zip(one.amplitude()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn two_ensemble_transmission_is_symmetric() {
        let cav = CavityParams::new(0.0, 0.5).unwrap();
        let template = EnsembleParams::new(1.0, 1e-4, gaussian(0.1)).unwrap();
        let sp = two_ensemble_spectrum(&cav, &template, 0.5, -3.0, 3.0, 2001).unwrap();
        let amps = sp.amplitude();
        let n = amps.len();
        for i in 0..n / 2 {
            let diff = (amps[i].norm() - amps[n - 1 - i].norm()).abs();
            assert!(diff < 1e-12, "asymmetry {diff} at index {i}");
        }
    }

    #[test]
    fn central_peak_width_tracks_dark_state_formula() {
        // Three-peak structure; the central peak narrows to Γ_d.
        let cav = CavityParams::new(0.0, 0.5).unwrap();
        let template = EnsembleParams::new(1.0, 1e-4, gaussian(0.1)).unwrap();
        let sp = two_ensemble_spectrum(&cav, &template, 0.5, -0.3, 0.3, 6001).unwrap();
        let peaks = extract_fwhm(&sp);
        let central: Vec<_> = peaks.iter().filter(|p| p.position.abs() < 0.1).collect();
        assert_eq!(central.len(), 1, "{peaks:?}");
        let gd = dark_state_linewidth(0.5, 1.0, 0.5, 1e-4).unwrap();
        let rel = (central[0].fwhm - gd).abs() / gd;
        assert!(rel < 0.1, "extracted {} vs Γ_d {gd}", central[0].fwhm);
    }
}
