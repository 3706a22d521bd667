//! Cavity transmission, polariton poles and linewidths.
//!
//! The two-port transmission is t(ω) = (κ/2i) / D(ω) with the dispersion
//! function D(ω) = ω − ω₀ + iκ/2 − Σᵢ Wᵢ(ω). Poles are reported in the
//! convention where the imaginary part is positive and equals the half-width
//! of the corresponding transmission peak.

use crate::ensemble::discrete_susceptibility;
use crate::error::{Error, Result};
use crate::params::{CavityParams, DiscreteEnsemble, EnsembleParams, LineShape};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Sampled complex transmission over a probe-frequency grid, together with
/// the parameters that produced it.
#[derive(Debug, Clone)]
pub struct TransmissionSpectrum {
    probe: Vec<f64>,
    amplitude: Vec<Complex64>,
    cavity: CavityParams,
    ensembles: Vec<EnsembleParams>,
}

impl TransmissionSpectrum {
    pub fn probe(&self) -> &[f64] {
        &self.probe
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub fn cavity(&self) -> &CavityParams {
        &self.cavity
    }

    pub fn ensembles(&self) -> &[EnsembleParams] {
        &self.ensembles
    }

    /// Transmitted energy |t(ω)|² at every grid point.
    pub fn energy(&self) -> Vec<f64> {
        self.amplitude.iter().map(|t| t.norm_sqr()).collect()
    }
}

/// Poles of the transmission function, with the worst residual |D| among the
/// converged roots.
#[derive(Debug, Clone)]
pub struct PoleSet {
    pub poles: Vec<Complex64>,
    pub residual: f64,
}

/// One transmission peak: position, full width at half maximum, and whether
/// a half-maximum crossing ran into the grid boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub position: f64,
    pub fwhm: f64,
    pub at_boundary: bool,
}

fn check_ensembles(ensembles: &[EnsembleParams]) -> Result<()> {
    if ensembles.len() > 2 {
        return Err(Error::TooManyEnsembles(ensembles.len()));
    }
    Ok(())
}

/// Dispersion function D(ω) = ω − ω₀ + iκ/2 − Σ Wᵢ(ω) at complex frequency.
pub fn dispersion(
    cavity: &CavityParams,
    ensembles: &[EnsembleParams],
    omega: Complex64,
) -> Complex64 {
    let mut d = omega - cavity.frequency() + Complex64::new(0.0, 0.5 * cavity.linewidth());
    for ens in ensembles {
        d -= ens.susceptibility_complex(omega);
    }
    d
}

/// d/dω of the dispersion function, 1 − Σ Wᵢ'(ω).
pub fn dispersion_derivative(ensembles: &[EnsembleParams], omega: Complex64) -> Complex64 {
    let mut d = Complex64::new(1.0, 0.0);
    for ens in ensembles {
        d -= ens.susceptibility_derivative(omega);
    }
    d
}

/// Complex transmission t(ω) for a cavity coupled to up to two ensembles.
pub fn transmission(
    cavity: &CavityParams,
    ensembles: &[EnsembleParams],
    omega: f64,
) -> Result<Complex64> {
    check_ensembles(ensembles)?;
    let d = dispersion(cavity, ensembles, Complex64::new(omega, 0.0));
    Ok(Complex64::new(0.0, -0.5 * cavity.linewidth()) / d)
}

/// Complex reflection r(ω) = 1 + t(ω).
pub fn reflection(
    cavity: &CavityParams,
    ensembles: &[EnsembleParams],
    omega: f64,
) -> Result<Complex64> {
    Ok(1.0 + transmission(cavity, ensembles, omega)?)
}

/// Transmission of a discretely sampled ensemble, the finite coupling sum
/// replacing the continuum susceptibility.
pub fn discrete_transmission(
    cavity: &CavityParams,
    ensemble: &DiscreteEnsemble,
    omega: f64,
) -> Complex64 {
    let d = omega - cavity.frequency() + Complex64::new(0.0, 0.5 * cavity.linewidth())
        - discrete_susceptibility(ensemble, omega);
    Complex64::new(0.0, -0.5 * cavity.linewidth()) / d
}

/// Evaluate the transmission on a uniform grid.
pub fn spectrum(
    cavity: &CavityParams,
    ensembles: &[EnsembleParams],
    omega_min: f64,
    omega_max: f64,
    n_points: usize,
) -> Result<TransmissionSpectrum> {
    check_ensembles(ensembles)?;
    if n_points < 2 {
        return Err(Error::InvalidInput(format!(
            "spectrum needs at least 2 points, got {n_points}"
        )));
    }
    if !(omega_min < omega_max) {
        return Err(Error::InvalidInput(format!(
            "empty probe window [{omega_min}, {omega_max}]"
        )));
    }
    let step = (omega_max - omega_min) / (n_points - 1) as f64;
    let probe: Vec<f64> = (0..n_points).map(|i| omega_min + step * i as f64).collect();
    let amplitude: Vec<Complex64> = probe
        .par_iter()
        .map(|&w| {
            let d = dispersion(cavity, ensembles, Complex64::new(w, 0.0));
            Complex64::new(0.0, -0.5 * cavity.linewidth()) / d
        })
        .collect();
    Ok(TransmissionSpectrum {
        probe,
        amplitude,
        cavity: *cavity,
        ensembles: ensembles.to_vec(),
    })
}

/// Default Newton seeds: ±Ω_eff + i(κ+γ)/4 around the cavity frequency, with
/// Ω_eff² the summed squared couplings.
pub fn default_pole_seeds(cavity: &CavityParams, ensembles: &[EnsembleParams]) -> Vec<Complex64> {
    let coupling_eff = ensembles
        .iter()
        .map(|e| e.coupling() * e.coupling())
        .sum::<f64>()
        .sqrt();
    let gamma_mean = if ensembles.is_empty() {
        0.0
    } else {
        ensembles.iter().map(|e| e.homogeneous_width()).sum::<f64>() / ensembles.len() as f64
    };
    let im = 0.25 * (cavity.linewidth() + gamma_mean);
    if coupling_eff == 0.0 {
        return vec![Complex64::new(cavity.frequency(), im.max(1e-6))];
    }
    vec![
        Complex64::new(cavity.frequency() - coupling_eff, im),
        Complex64::new(cavity.frequency() + coupling_eff, im),
    ]
}

/// Newton search for transmission poles.
///
/// Roots are refined on the physical sheet and reported conjugated, so a
/// pole at peak position E with half-width Γ/2 comes back as E + iΓ/2
/// (non-negative imaginary part for passive parameters). Converged roots
/// closer than 1e−8 of the natural frequency scale are merged. A rectangular
/// ensemble at γ = 0 carries branch cuts along its support band; seeds
/// inside that band are refused.
pub fn find_poles(
    cavity: &CavityParams,
    ensembles: &[EnsembleParams],
    seeds: &[Complex64],
) -> Result<PoleSet> {
    check_ensembles(ensembles)?;
    if seeds.is_empty() {
        return Err(Error::NoSeeds);
    }

    let scale = ensembles
        .iter()
        .flat_map(|e| {
            [
                e.coupling(),
                e.homogeneous_width(),
                e.distribution().fwhm(),
            ]
        })
        .chain([cavity.linewidth()])
        .fold(0.0f64, f64::max)
        .max(1e-12);

    for ens in ensembles {
        if ens.distribution().shape() == LineShape::Rectangular && ens.homogeneous_width() == 0.0
        {
            let center = ens.distribution().center();
            let half = 0.5 * ens.distribution().fwhm();
            for seed in seeds {
                if (seed.re - center).abs() <= half {
                    return Err(Error::SeedInBranchCut {
                        seed_re: seed.re,
                        seed_im: seed.im,
                    });
                }
            }
        }
    }

    const MAX_ITER: usize = 200;
    let mut poles: Vec<Complex64> = Vec::new();
    let mut residual = 0.0f64;

    for &seed in seeds {
        // Work on the physical sheet: ω = conj(λ).
        let mut omega = seed.conj();
        let mut converged = false;
        let mut finite = true;
        for iter in 0..MAX_ITER {
            let d = dispersion(cavity, ensembles, omega);
            let dp = dispersion_derivative(ensembles, omega);
            if !(d.re.is_finite() && d.im.is_finite()) {
                finite = false;
                break;
            }
            let step = if dp.norm() > 1e-280 {
                d / dp
            } else {
                // Derivative underflow: secant step from a nearby probe.
                let probe = omega + Complex64::new(1e-7 * scale, 0.0);
                let d2 = dispersion(cavity, ensembles, probe);
                let denom = d2 - d;
                if denom.norm() < 1e-280 {
                    break;
                }
                d * (probe - omega) / denom
            };
            omega -= step;
            if !(omega.re.is_finite() && omega.im.is_finite()) {
                finite = false;
                break;
            }
            if step.norm() < 1e-14 * scale.max(omega.norm()) && iter > 0 {
                converged = true;
                break;
            }
        }
        let final_residual = if finite {
            dispersion(cavity, ensembles, omega).norm()
        } else {
            f64::INFINITY
        };
        if !converged && !(final_residual <= 1e-10 * scale) {
            return Err(Error::PoleNonConvergence {
                seed_re: seed.re,
                seed_im: seed.im,
                iterations: MAX_ITER,
            });
        }
        residual = residual.max(final_residual);

        let lambda = omega.conj();
        let duplicate = poles.iter().any(|p| (p - lambda).norm() < 1e-8 * scale);
        if !duplicate {
            poles.push(lambda);
        }
    }

    poles.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    Ok(PoleSet { poles, residual })
}

/// Perturbative full width at half maximum of the polariton peaks for a
/// resonant ensemble: Γ = (κ + γ + 2π ρ(Ω) Ω²)/2, the density evaluated a
/// detuning Ω from the distribution center. Valid deep in strong coupling,
/// Ω ≫ Δ.
pub fn predicted_width(ens: &EnsembleParams, cavity: &CavityParams) -> f64 {
    let coupling = ens.coupling();
    let rho = ens
        .distribution()
        .density(ens.distribution().center() + coupling);
    0.5 * (cavity.linewidth() + ens.homogeneous_width() + 2.0 * PI * rho * coupling * coupling)
}

/// Perturbative pole pair relative to the cavity frequency:
/// ±Ω√(1 + μ₂/Ω² − ((κ + 2πρ(Ω)Ω² − γ)/4Ω)²) + iΓ/2.
///
/// Propagates the undefined-moment error for a Lorentzian ensemble.
pub fn perturbative_poles(
    ens: &EnsembleParams,
    cavity: &CavityParams,
) -> Result<(Complex64, Complex64)> {
    let coupling = ens.coupling();
    if coupling <= 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let mu2 = ens.distribution().moment(2)?;
    let rho = ens
        .distribution()
        .density(ens.distribution().center() + coupling);
    let damping = (cavity.linewidth() + 2.0 * PI * rho * coupling * coupling
        - ens.homogeneous_width())
        / (4.0 * coupling);
    let re = coupling * (1.0 + mu2 / (coupling * coupling) - damping * damping).sqrt();
    let half_width = 0.5 * predicted_width(ens, cavity);
    Ok((
        Complex64::new(-re, half_width),
        Complex64::new(re, half_width),
    ))
}

/// Locate transmission peaks and measure their widths on a sampled spectrum.
///
/// Local maxima of |t|² whose topographic prominence exceeds 1e−3 of the
/// global maximum are kept; half-maximum crossings are found by linear
/// interpolation. A peak whose half-maximum crossing runs off the grid is
/// flagged instead of dropped. Peaks should span at least 8 grid points for
/// trustworthy widths.
pub fn extract_fwhm(spectrum: &TransmissionSpectrum) -> Vec<Peak> {
    let y = spectrum.energy();
    let x = spectrum.probe();
    let n = y.len();
    if n < 3 {
        return Vec::new();
    }
    let global_max = y.iter().cloned().fold(0.0f64, f64::max);
    if global_max <= 0.0 {
        return Vec::new();
    }

    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            continue;
        }
        // Topographic prominence: walk outward until a higher point appears,
        // tracking the deepest valley on each side.
        let mut left_min = y[i];
        let mut j = i;
        while j > 0 {
            j -= 1;
            left_min = left_min.min(y[j]);
            if y[j] > y[i] {
                break;
            }
        }
        let mut right_min = y[i];
        let mut k = i;
        while k < n - 1 {
            k += 1;
            right_min = right_min.min(y[k]);
            if y[k] > y[i] {
                break;
            }
        }
        let prominence = y[i] - left_min.max(right_min);
        if prominence < 1e-3 * global_max {
            continue;
        }

        let half = 0.5 * y[i];
        let mut at_boundary = false;

        let mut left_x = x[0];
        let mut found_left = false;
        for j in (0..i).rev() {
            if y[j] <= half {
                let f = (half - y[j]) / (y[j + 1] - y[j]);
                left_x = x[j] + f * (x[j + 1] - x[j]);
                found_left = true;
                break;
            }
        }
        if !found_left {
            at_boundary = true;
        }

        let mut right_x = x[n - 1];
        let mut found_right = false;
        for j in i + 1..n {
            if y[j] <= half {
                let f = (y[j - 1] - half) / (y[j - 1] - y[j]);
                right_x = x[j - 1] + f * (x[j] - x[j - 1]);
                found_right = true;
                break;
            }
        }
        if !found_right {
            at_boundary = true;
        }

        peaks.push(Peak {
            position: x[i],
            fwhm: right_x - left_x,
            at_boundary,
        });
    }
    peaks.sort_by(|a, b| a.position.partial_cmp(&b.position).unwrap());
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{LineShape, SpectralDistribution};

    fn dist(shape: LineShape, fwhm: f64) -> SpectralDistribution {
        SpectralDistribution::new(shape, 0.0, fwhm).unwrap()
    }

    fn fig2_cavity() -> CavityParams {
        CavityParams::new(0.0, 0.1).unwrap()
    }

    #[test]
    fn empty_cavity_on_resonance_transmits_fully() {
        let cav = fig2_cavity();
        let t = transmission(&cav, &[], 0.0).unwrap();
        assert!((t - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((t.norm_sqr() - 1.0).abs() < 1e-14);
        let r = reflection(&cav, &[], 0.0).unwrap();
        assert!(r.norm() < 1e-14);
    }

    #[test]
    fn transmission_is_suppressed_between_polaritons() {
        // Sharp ensemble, γ → 0: W diverges at the common center, killing t.
        let cav = fig2_cavity();
        let ens = EnsembleParams::new(3.5, 1e-12, dist(LineShape::Gaussian, 1e-9)).unwrap();
        let t = transmission(&cav, &[ens], 0.0).unwrap();
        assert!(t.norm() < 1e-6, "|t(ω₀)| = {}", t.norm());
    }

    #[test]
    fn far_detuned_reflection_approaches_unity() {
        let cav = fig2_cavity();
        let ens = EnsembleParams::new(3.5, 1e-4, dist(LineShape::Gaussian, 1.0)).unwrap();
        let r = reflection(&cav, &[ens], 2e4).unwrap();
        assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-3);
    }

    #[test]
    fn three_ensembles_are_rejected() {
        let cav = fig2_cavity();
        let ens = EnsembleParams::new(1.0, 0.0, dist(LineShape::Gaussian, 1.0)).unwrap();
        assert!(matches!(
            transmission(&cav, &[ens, ens, ens], 0.0),
            Err(Error::TooManyEnsembles(3))
        ));
    }

    #[test]
    fn two_point_spectrum_matches_direct_calls() {
        let cav = fig2_cavity();
        let ens = EnsembleParams::new(3.5, 1e-4, dist(LineShape::Gaussian, 1.0)).unwrap();
        let sp = spectrum(&cav, &[ens], -1.0, 1.0, 2).unwrap();
        assert_eq!(sp.probe(), &[-1.0, 1.0]);
        for (i, &w) in sp.probe().iter().enumerate() {
            let direct = transmission(&cav, &[ens], w).unwrap();
            assert_eq!(sp.amplitude()[i], direct);
        }
    }

    #[test]
    fn figure_two_gaussian_peaks_sit_at_the_coupling() {
        let cav = fig2_cavity();
        let ens = EnsembleParams::new(3.5, 1e-4, dist(LineShape::Gaussian, 1.0)).unwrap();
        let sp = spectrum(&cav, &[ens], -6.0, 6.0, 8001).unwrap();
        let peaks = extract_fwhm(&sp);
        assert_eq!(peaks.len(), 2, "{peaks:?}");
        assert!((peaks[0].position + 3.5).abs() < 0.15, "{peaks:?}");
        assert!((peaks[1].position - 3.5).abs() < 0.15, "{peaks:?}");
    }

    #[test]
    fn bare_cavity_line_has_width_kappa() {
        let cav = fig2_cavity();
        let sp = spectrum(&cav, &[], -1.0, 1.0, 4001).unwrap();
        let peaks = extract_fwhm(&sp);
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].position).abs() < 1e-3);
        assert!(
            (peaks[0].fwhm - 0.1).abs() < 2e-3,
            "fwhm = {}",
            peaks[0].fwhm
        );
        assert!(!peaks[0].at_boundary);
    }

    #[test]
    fn boundary_peak_is_flagged() {
        let cav = fig2_cavity();
        // Window cut inside the line: half-maximum never reached on the left.
        let sp = spectrum(&cav, &[], -0.01, 1.0, 2001).unwrap();
        let peaks = extract_fwhm(&sp);
        assert_eq!(peaks.len(), 1);
        assert!(peaks[0].at_boundary);
    }

    #[test]
    fn no_peak_yields_empty_list() {
        let cav = CavityParams::new(0.0, 0.0).unwrap();
        // κ = 0 transmits nothing; the spectrum is identically zero.
        let sp = spectrum(&cav, &[], -1.0, 1.0, 64).unwrap();
        assert!(extract_fwhm(&sp).is_empty());
    }

    #[test]
    fn dirac_limit_poles_match_closed_form() {
        let cav = fig2_cavity();
        let gamma = 1e-4;
        let ens = EnsembleParams::new(3.5, gamma, dist(LineShape::Gaussian, 1e-6)).unwrap();
        let seeds = default_pole_seeds(&cav, &[ens]);
        let set = find_poles(&cav, &[ens], &seeds).unwrap();
        assert_eq!(set.poles.len(), 2);
        let re = (3.5f64 * 3.5 - ((0.1 - gamma) / 4.0) * ((0.1 - gamma) / 4.0)).sqrt();
        let im = (0.1 + gamma) / 4.0;
        for (pole, expect_re) in set.poles.iter().zip([-re, re]) {
            assert!(
                (pole - Complex64::new(expect_re, im)).norm() < 1e-6,
                "pole {pole} vs {expect_re}+{im}i"
            );
        }
        assert!(set.residual < 1e-10 * 3.5);
    }

    #[test]
    fn lorentzian_poles_match_quadratic_oracle() {
        // D is exactly quadratic for a Lorentzian: roots of
        // (ω + iκ/2)(ω + iγ'/2) = Ω² with γ' = γ + Δ, solved directly.
        let cav = fig2_cavity();
        let ens = EnsembleParams::new(3.5, 1e-4, dist(LineShape::Lorentzian, 1.0)).unwrap();
        let seeds = default_pole_seeds(&cav, &[ens]);
        let set = find_poles(&cav, &[ens], &seeds).unwrap();
        assert_eq!(set.poles.len(), 2);

        let half_kappa = Complex64::new(0.0, 0.05);
        let half_gp = Complex64::new(0.0, 0.5 * (1e-4 + 1.0));
        // ω² + (iκ/2 + iγ'/2)ω + (iκ/2)(iγ'/2) − Ω² = 0
        let b = half_kappa + half_gp;
        let c = half_kappa * half_gp - 3.5 * 3.5;
        let disc = (b * b - 4.0 * c).sqrt();
        let mut expected = [((-b + disc) / 2.0).conj(), ((-b - disc) / 2.0).conj()];
        expected.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (pole, exp) in set.poles.iter().zip(expected) {
            assert!((pole - exp).norm() < 1e-10, "pole {pole} vs oracle {exp}");
        }
    }

    #[test]
    fn bare_cavity_single_pole() {
        let cav = fig2_cavity();
        let set = find_poles(&cav, &[], &default_pole_seeds(&cav, &[])).unwrap();
        assert_eq!(set.poles.len(), 1);
        assert!((set.poles[0] - Complex64::new(0.0, 0.05)).norm() < 1e-12);
    }

    #[test]
    fn rectangular_branch_cut_seeds_are_refused() {
        let cav = fig2_cavity();
        let ens = EnsembleParams::new(3.5, 0.0, dist(LineShape::Rectangular, 1.0)).unwrap();
        let inside = [Complex64::new(0.2, 0.01)];
        assert!(matches!(
            find_poles(&cav, &[ens], &inside),
            Err(Error::SeedInBranchCut { .. })
        ));
        // Seeds outside the band work.
        let set = find_poles(&cav, &[ens], &default_pole_seeds(&cav, &[ens])).unwrap();
        assert_eq!(set.poles.len(), 2);
    }

    #[test]
    fn pole_symmetry_for_resonant_symmetric_distributions() {
        let cav = fig2_cavity();
        for shape in [
            LineShape::Gaussian,
            LineShape::Lorentzian,
            LineShape::Rectangular,
        ] {
            let ens = EnsembleParams::new(3.5, 1e-4, dist(shape, 1.0)).unwrap();
            let set = find_poles(&cav, &[ens], &default_pole_seeds(&cav, &[ens])).unwrap();
            assert_eq!(set.poles.len(), 2, "{shape}");
            let (lo, hi) = (set.poles[0], set.poles[1]);
            assert!((lo.re + hi.re).abs() < 1e-9, "{shape}: {lo} {hi}");
            assert!((lo.im - hi.im).abs() < 1e-9, "{shape}: {lo} {hi}");
            assert!(lo.im >= 0.0 && hi.im >= 0.0);
        }
    }

    #[test]
    fn predicted_width_limits() {
        let cav = fig2_cavity();
        // Rectangular with Ω > Δ/2: density vanishes at the poles.
        let rect = EnsembleParams::new(3.5, 1e-4, dist(LineShape::Rectangular, 1.0)).unwrap();
        assert!((predicted_width(&rect, &cav) - 0.5 * (0.1 + 1e-4)).abs() < 1e-15);
        // Lorentzian far in: Γ → (κ + γ + Δ)/2.
        let lor = EnsembleParams::new(35.0, 1e-4, dist(LineShape::Lorentzian, 1.0)).unwrap();
        let expected = 0.5 * (0.1 + 1e-4 + 1.0);
        assert!(
            (predicted_width(&lor, &cav) - expected).abs() / expected < 2e-4,
            "{} vs {expected}",
            predicted_width(&lor, &cav)
        );
    }

    #[test]
    fn perturbative_poles_match_gaussian_values() {
        let cav = fig2_cavity();
        let ens = EnsembleParams::new(3.5, 1e-4, dist(LineShape::Gaussian, 1.0)).unwrap();
        let (lo, hi) = perturbative_poles(&ens, &cav).unwrap();
        assert!((hi.re - 3.602).abs() < 2e-3, "upper pole at {hi}");
        assert!((lo.re + hi.re).abs() < 1e-15);
        // Must agree with the Newton poles to about a percent.
        let set = find_poles(&cav, &[ens], &default_pole_seeds(&cav, &[ens])).unwrap();
        assert!(
            (set.poles[1].re - hi.re).abs() / set.poles[1].re.abs() < 0.01,
            "{} vs {}",
            set.poles[1].re,
            hi.re
        );
    }

    #[test]
    fn perturbative_poles_trivial_and_lorentzian_cases() {
        // μ₂ ≈ 0, ρ(Ω) = 0, γ = κ = 0 → ±Ω.
        let cav = CavityParams::new(0.0, 0.0).unwrap();
        let ens = EnsembleParams::new(2.0, 0.0, dist(LineShape::Rectangular, 1e-12)).unwrap();
        let (lo, hi) = perturbative_poles(&ens, &cav).unwrap();
        assert!((hi - Complex64::new(2.0, 0.0)).norm() < 1e-9);
        assert!((lo - Complex64::new(-2.0, 0.0)).norm() < 1e-9);

        let lor = EnsembleParams::new(2.0, 0.0, dist(LineShape::Lorentzian, 1.0)).unwrap();
        assert!(matches!(
            perturbative_poles(&lor, &fig2_cavity()),
            Err(Error::MomentUndefined { order: 2 })
        ));
    }

    #[test]
    fn rectangular_perturbative_poles_track_newton() {
        let cav = fig2_cavity();
        let ens = EnsembleParams::new(3.5, 1e-4, dist(LineShape::Rectangular, 1.0)).unwrap();
        let (_, hi) = perturbative_poles(&ens, &cav).unwrap();
        let set = find_poles(&cav, &[ens], &default_pole_seeds(&cav, &[ens])).unwrap();
        assert!(
            (set.poles[1].re - hi.re).abs() / set.poles[1].re < 0.01,
            "{} vs {}",
            set.poles[1].re,
            hi.re
        );
    }

    #[test]
    fn discrete_transmission_tracks_continuum() {
        let cav = fig2_cavity();
        let ens = EnsembleParams::new(3.5, 0.05, dist(LineShape::Gaussian, 1.0)).unwrap();
        let sampled = ens.sample(2000, 10.0).unwrap();
        for k in -20..=20 {
            let w = 0.25 * k as f64;
            let td = discrete_transmission(&cav, &sampled, w);
            let tc = transmission(&cav, &[ens], w).unwrap();
            assert!(
                (td - tc).norm() < 1e-3 * tc.norm().max(0.01),
                "at {w}: {td} vs {tc}"
            );
        }
    }

    #[test]
    fn transmission_magnitude_never_exceeds_unity() {
        let cav = fig2_cavity();
        for shape in [
            LineShape::Gaussian,
            LineShape::Lorentzian,
            LineShape::Rectangular,
        ] {
            let ens = EnsembleParams::new(2.5, 0.01, dist(shape, 0.8)).unwrap();
            for k in -100..=100 {
                let w = 0.07 * k as f64;
                let t = transmission(&cav, &[ens], w).unwrap();
                assert!(t.norm() <= 1.0 + 1e-12, "{shape} at {w}: |t| = {}", t.norm());
            }
        }
    }
}
