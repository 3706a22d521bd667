//! Physical parameter types shared by every module.
//!
//! All angular frequencies and rates are in rad·µs⁻¹, all times in µs, so a
//! cavity linewidth of 0.1 corresponds to a 10 µs field lifetime. Only ratios
//! of rates matter for the physics.

use crate::error::{Error, Result};

/// Line shape of the emitter frequency distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineShape {
    Gaussian,
    Lorentzian,
    Rectangular,
}

impl LineShape {
    pub fn name(self) -> &'static str {
        match self {
            LineShape::Gaussian => "gaussian",
            LineShape::Lorentzian => "lorentzian",
            LineShape::Rectangular => "rectangular",
        }
    }
}

impl std::fmt::Display for LineShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Normalized spectral density of emitter frequencies.
///
/// The width parameter follows the closed forms used throughout the library:
/// the Lorentzian has full width `fwhm` at half maximum and the rectangular
/// support is `fwhm` wide, while the Gaussian reaches half its peak at
/// `±fwhm` from the center (its second moment is `fwhm² / (2 ln 2)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDistribution {
    shape: LineShape,
    center: f64,
    fwhm: f64,
}

impl SpectralDistribution {
    pub fn new(shape: LineShape, center: f64, fwhm: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidFrequency(center));
        }
        if !(fwhm.is_finite() && fwhm > 0.0) {
            return Err(Error::InvalidFwhm(fwhm));
        }
        Ok(Self {
            shape,
            center,
            fwhm,
        })
    }

    pub fn shape(&self) -> LineShape {
        self.shape
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn fwhm(&self) -> f64 {
        self.fwhm
    }

    /// Same shape and width, recentered at `center`.
    pub fn recentered(&self, center: f64) -> Self {
        Self { center, ..*self }
    }
}

/// Ensemble of emitters: collective coupling to the cavity, homogeneous
/// (single-emitter) linewidth, and the frequency distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleParams {
    coupling: f64,
    homogeneous_width: f64,
    distribution: SpectralDistribution,
}

impl EnsembleParams {
    pub fn new(
        coupling: f64,
        homogeneous_width: f64,
        distribution: SpectralDistribution,
    ) -> Result<Self> {
        if !(coupling.is_finite() && coupling >= 0.0) {
            return Err(Error::InvalidRate {
                name: "coupling",
                value: coupling,
            });
        }
        if !(homogeneous_width.is_finite() && homogeneous_width >= 0.0) {
            return Err(Error::InvalidRate {
                name: "homogeneous_width",
                value: homogeneous_width,
            });
        }
        Ok(Self {
            coupling,
            homogeneous_width,
            distribution,
        })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn homogeneous_width(&self) -> f64 {
        self.homogeneous_width
    }

    pub fn distribution(&self) -> &SpectralDistribution {
        &self.distribution
    }

    pub fn with_coupling(&self, coupling: f64) -> Result<Self> {
        Self::new(coupling, self.homogeneous_width, self.distribution)
    }

    pub fn with_homogeneous_width(&self, width: f64) -> Result<Self> {
        Self::new(self.coupling, width, self.distribution)
    }

    pub fn recentered(&self, center: f64) -> Self {
        Self {
            distribution: self.distribution.recentered(center),
            ..*self
        }
    }
}

/// Cavity mode: resonance frequency and total linewidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    frequency: f64,
    linewidth: f64,
}

impl CavityParams {
    pub fn new(frequency: f64, linewidth: f64) -> Result<Self> {
        if !frequency.is_finite() {
            return Err(Error::InvalidFrequency(frequency));
        }
        if !(linewidth.is_finite() && linewidth >= 0.0) {
            return Err(Error::InvalidRate {
                name: "linewidth",
                value: linewidth,
            });
        }
        Ok(Self {
            frequency,
            linewidth,
        })
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn linewidth(&self) -> f64 {
        self.linewidth
    }

    /// Complex mode frequency ω₀ − iκ/2.
    pub fn complex_frequency(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.frequency, -0.5 * self.linewidth)
    }
}

/// Finite set of emitters sampled from a continuous distribution.
///
/// Serves as the brute-force representation against which the continuum
/// formulas are checked.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteEnsemble {
    frequencies: Vec<f64>,
    couplings: Vec<f64>,
    homogeneous_width: f64,
}

impl DiscreteEnsemble {
    pub fn new(frequencies: Vec<f64>, couplings: Vec<f64>, homogeneous_width: f64) -> Result<Self> {
        if frequencies.len() != couplings.len() {
            return Err(Error::InvalidInput(format!(
                "frequency/coupling length mismatch: {} vs {}",
                frequencies.len(),
                couplings.len()
            )));
        }
        if !(homogeneous_width.is_finite() && homogeneous_width >= 0.0) {
            return Err(Error::InvalidRate {
                name: "homogeneous_width",
                value: homogeneous_width,
            });
        }
        if frequencies.iter().any(|w| !w.is_finite())
            || couplings.iter().any(|g| !(g.is_finite() && *g >= 0.0))
        {
            return Err(Error::NonFiniteArgument("discrete ensemble entries"));
        }
        Ok(Self {
            frequencies,
            couplings,
            homogeneous_width,
        })
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn homogeneous_width(&self) -> f64 {
        self.homogeneous_width
    }

    /// Total squared coupling Σ gₖ², i.e. the captured share of Ω².
    pub fn total_coupling_sq(&self) -> f64 {
        self.couplings.iter().map(|g| g * g).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_fwhm() {
        assert!(SpectralDistribution::new(LineShape::Gaussian, 0.0, 0.0).is_err());
        assert!(SpectralDistribution::new(LineShape::Gaussian, 0.0, -1.0).is_err());
        assert!(SpectralDistribution::new(LineShape::Gaussian, 0.0, f64::NAN).is_err());
        assert!(SpectralDistribution::new(LineShape::Gaussian, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn rejects_negative_rates() {
        let dist = SpectralDistribution::new(LineShape::Lorentzian, 0.0, 1.0).unwrap();
        assert!(EnsembleParams::new(-1.0, 0.0, dist).is_err());
        assert!(EnsembleParams::new(1.0, -1.0, dist).is_err());
        assert!(CavityParams::new(0.0, -0.1).is_err());
        assert!(EnsembleParams::new(f64::NAN, 0.0, dist).is_err());
    }

    #[test]
    fn complex_frequency_has_negative_imaginary_part() {
        let cav = CavityParams::new(2.0, 0.1).unwrap();
        let w = cav.complex_frequency();
        assert_eq!(w.re, 2.0);
        assert_eq!(w.im, -0.05);
    }

    #[test]
    fn discrete_ensemble_checks_lengths() {
        assert!(DiscreteEnsemble::new(vec![0.0, 1.0], vec![1.0], 0.0).is_err());
        let d = DiscreteEnsemble::new(vec![0.0, 1.0], vec![1.0, 2.0], 0.0).unwrap();
        assert_eq!(d.total_coupling_sq(), 5.0);
    }
}
