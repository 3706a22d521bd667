//! Emitter distributions and the collective susceptibility W(ω).
//!
//! The susceptibility of an ensemble with coupling Ω, homogeneous width γ and
//! density ρ is
//!
//! ```text
//! W(ω) = Ω² ∫ ρ(ω') dω' / (ω − ω' + iγ/2)
//! ```
//!
//! Closed forms exist for all three line shapes (the Gaussian through the
//! Faddeeva function); a direct adaptive-quadrature route and a
//! principal-value route for γ = 0 serve as independent cross-checks.

use crate::error::{Error, Result};
use crate::faddeeva::faddeeva_w;
use crate::params::{DiscreteEnsemble, EnsembleParams, LineShape, SpectralDistribution};
use crate::quadrature;
use num_complex::Complex64;
use std::f64::consts::PI;

const LN2: f64 = std::f64::consts::LN_2;

impl SpectralDistribution {
    /// Normalized spectral density ρ(ω).
    pub fn density(&self, omega: f64) -> f64 {
        let x = omega - self.center();
        let d = self.fwhm();
        match self.shape() {
            LineShape::Gaussian => {
                (LN2 / PI).sqrt() / d * (-(x * x) * LN2 / (d * d)).exp()
            }
            LineShape::Lorentzian => {
                let half = 0.5 * d;
                half / PI / (half * half + x * x)
            }
            LineShape::Rectangular => {
                if x.abs() <= 0.5 * d {
                    1.0 / d
                } else {
                    0.0
                }
            }
        }
    }

    /// k-th moment about the center, ∫ ρ(ω) (ω − ω_c)^k dω.
    ///
    /// Odd moments vanish by symmetry. Lorentzian moments of order ≥ 2
    /// diverge and are reported as an error.
    pub fn moment(&self, order: u32) -> Result<f64> {
        if order == 0 {
            return Ok(1.0);
        }
        if order % 2 == 1 {
            return Ok(0.0);
        }
        let d = self.fwhm();
        match self.shape() {
            LineShape::Gaussian => {
                // (2m−1)!! σ^{2m} with σ² = Δ²/(2 ln 2)
                let sigma_sq = d * d / (2.0 * LN2);
                let m = order / 2;
                let mut value = 1.0;
                for j in 1..=m {
                    value *= (2 * j - 1) as f64 * sigma_sq;
                }
                Ok(value)
            }
            LineShape::Rectangular => {
                // (Δ/2)^{2m} / (2m + 1)
                let half = 0.5 * d;
                Ok(half.powi(order as i32) / (order as f64 + 1.0))
            }
            LineShape::Lorentzian => Err(Error::MomentUndefined { order }),
        }
    }
}

impl EnsembleParams {
    /// Closed-form susceptibility at a real probe frequency.
    pub fn susceptibility(&self, omega: f64) -> Complex64 {
        self.susceptibility_complex(Complex64::new(omega, 0.0))
    }

    /// Closed-form susceptibility continued to complex frequency.
    ///
    /// The Gaussian form is entire; the Lorentzian is meromorphic. For the
    /// rectangular shape the continuation is valid for |Re(ω) − ω_c| > Δ/2
    /// when dipping below Im ω = −γ/2: the band above the support carries the
    /// branch cuts that emanate from the support edges.
    pub fn susceptibility_complex(&self, omega: Complex64) -> Complex64 {
        let coupling_sq = self.coupling() * self.coupling();
        if coupling_sq == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let dist = self.distribution();
        let x = omega - dist.center();
        let gamma = self.homogeneous_width();
        let d = dist.fwhm();
        match dist.shape() {
            LineShape::Lorentzian => {
                coupling_sq / (x + Complex64::new(0.0, 0.5 * (gamma + d)))
            }
            LineShape::Rectangular => {
                let shifted = x + Complex64::new(0.0, 0.5 * gamma);
                if shifted.im == 0.0 && shifted.re.abs() < 0.5 * d {
                    // Limit from above inside the support: the log picks up
                    // −iπΔ·ρ directly, avoiding signed-zero branch accidents.
                    let re = ((shifted.re + 0.5 * d) / (0.5 * d - shifted.re)).ln();
                    return coupling_sq / d * Complex64::new(re, -PI);
                }
                let num = shifted + 0.5 * d;
                let den = shifted - 0.5 * d;
                coupling_sq / d * (num.ln() - den.ln())
            }
            LineShape::Gaussian => {
                let scale = LN2.sqrt() / d;
                let z = (x + Complex64::new(0.0, 0.5 * gamma)) * scale;
                Complex64::new(0.0, -(PI * LN2).sqrt()) * coupling_sq / d * faddeeva_w(z)
            }
        }
    }

    /// d/dω of the closed-form susceptibility, for Newton pole refinement.
    pub fn susceptibility_derivative(&self, omega: Complex64) -> Complex64 {
        let coupling_sq = self.coupling() * self.coupling();
        if coupling_sq == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let dist = self.distribution();
        let x = omega - dist.center();
        let gamma = self.homogeneous_width();
        let d = dist.fwhm();
        match dist.shape() {
            LineShape::Lorentzian => {
                let den = x + Complex64::new(0.0, 0.5 * (gamma + d));
                -coupling_sq / (den * den)
            }
            LineShape::Rectangular => {
                let shifted = x + Complex64::new(0.0, 0.5 * gamma);
                let num = shifted + 0.5 * d;
                let den = shifted - 0.5 * d;
                coupling_sq / d * (1.0 / num - 1.0 / den)
            }
            LineShape::Gaussian => {
                let scale = LN2.sqrt() / d;
                let z = (x + Complex64::new(0.0, 0.5 * gamma)) * scale;
                let wp = crate::faddeeva::faddeeva_w_derivative(z);
                Complex64::new(0.0, -(PI * LN2).sqrt()) * coupling_sq / d * wp * scale
            }
        }
    }

    /// Deterministic discretization of the ensemble on a midpoint grid
    /// spanning `span` FWHMs around the center.
    ///
    /// Couplings follow gₖ² = Ω² ρ(ωₖ) wₖ so that Σ gₖ² recovers Ω² times
    /// the spectral mass captured by the window.
    pub fn sample(&self, n: usize, span: f64) -> Result<DiscreteEnsemble> {
        if n < 2 {
            return Err(Error::TooFewEmitters(n));
        }
        if !(span.is_finite() && span > 0.0) {
            return Err(Error::InvalidInput(format!(
                "span must be positive and finite, got {span}"
            )));
        }
        let dist = self.distribution();
        let length = span * dist.fwhm();
        let start = dist.center() - 0.5 * length;
        let weight = length / n as f64;
        let mut frequencies = Vec::with_capacity(n);
        let mut couplings = Vec::with_capacity(n);
        for k in 0..n {
            let omega = start + (k as f64 + 0.5) * weight;
            frequencies.push(omega);
            couplings.push(self.coupling() * (dist.density(omega) * weight).sqrt());
        }
        DiscreteEnsemble::new(frequencies, couplings, self.homogeneous_width())
    }
}

/// Susceptibility by direct adaptive quadrature of the defining integral.
///
/// This is the oracle route: it never touches the closed forms. Requires
/// γ > 0 so the integrand is regular; the γ = 0 case belongs to
/// [`pv_susceptibility`]. The absolute tolerance scales as 1e−12·Ω²/Δ.
pub fn susceptibility_quadrature(
    dist: &SpectralDistribution,
    coupling: f64,
    gamma: f64,
    omega: f64,
) -> Result<Complex64> {
    if !(gamma > 0.0) {
        return Err(Error::ZeroWidthQuadrature);
    }
    if !(coupling.is_finite() && gamma.is_finite() && omega.is_finite()) {
        return Err(Error::NonFiniteArgument("susceptibility_quadrature input"));
    }
    let coupling_sq = coupling * coupling;
    if coupling_sq == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let center = dist.center();
    let width = dist.fwhm();
    let eps_abs = 1e-12 * coupling_sq / width;
    let eps_rel = 1e-12;

    let kernel = |w_prime: f64| {
        dist.density(w_prime) / Complex64::new(omega - w_prime, 0.5 * gamma)
    };

    let (lo, hi) = match dist.shape() {
        LineShape::Rectangular => (center - 0.5 * width, center + 0.5 * width),
        _ => (center - 20.0 * width, center + 20.0 * width),
    };

    // Breakpoints: the near-pole at ω' = ω (width γ/2) and the distribution
    // core, so the first panels already isolate the difficult structure.
    let mut points = vec![lo, hi];
    for p in [
        center - width,
        center - 0.5 * width,
        center,
        center + 0.5 * width,
        center + width,
        omega - 50.0 * gamma,
        omega - 0.5 * gamma,
        omega,
        omega + 0.5 * gamma,
        omega + 50.0 * gamma,
    ] {
        if p > lo && p < hi {
            points.push(p);
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();

    let mut f = kernel;
    let core = quadrature::integrate_segmented(&mut f, &points, eps_abs, eps_rel, 4000);
    let mut value = core.value;

    // Tails beyond the finite window, mapped through u = 1/(ω' − center).
    // Only the Lorentzian has enough tail mass to matter, but the treatment
    // is exact for all unbounded shapes.
    if dist.shape() != LineShape::Rectangular {
        let tail_hi = quadrature::integrate_upper_tail(
            |s: f64| {
                dist.density(center + s) / Complex64::new(omega - center - s, 0.5 * gamma)
            },
            20.0 * width,
            eps_abs,
            eps_rel,
        );
        let tail_lo = quadrature::integrate_upper_tail(
            |s: f64| {
                dist.density(center - s) / Complex64::new(omega - center + s, 0.5 * gamma)
            },
            20.0 * width,
            eps_abs,
            eps_rel,
        );
        value += tail_hi.value + tail_lo.value;
    }

    Ok(coupling_sq * value)
}

/// Zero-γ susceptibility through the Sokhatsky–Weierstrass decomposition:
/// W/Ω² = P∫ ρ(ω')/(ω − ω') dω' − iπ ρ(ω).
pub fn pv_susceptibility(
    dist: &SpectralDistribution,
    coupling: f64,
    omega: f64,
) -> Result<Complex64> {
    if !(coupling.is_finite() && omega.is_finite()) {
        return Err(Error::NonFiniteArgument("pv_susceptibility input"));
    }
    let coupling_sq = coupling * coupling;
    if coupling_sq == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let center = dist.center();
    let width = dist.fwhm();
    let eps_abs = 1e-13;
    let eps_rel = 1e-12;

    let (lo, hi) = match dist.shape() {
        LineShape::Rectangular => (center - 0.5 * width, center + 0.5 * width),
        _ => (center - 30.0 * width, center + 30.0 * width),
    };

    let density = |w_prime: f64| dist.density(w_prime);
    let real_part = if omega > lo && omega < hi {
        quadrature::principal_value(density, omega, lo, hi, eps_abs, eps_rel).value
    } else {
        let mut f = |w_prime: f64| dist.density(w_prime) / (omega - w_prime);
        quadrature::integrate_segmented(&mut f, &[lo, hi], eps_abs, eps_rel, 2000).value
    };

    let mut real_part = real_part;
    if dist.shape() != LineShape::Rectangular {
        let tail_hi = quadrature::integrate_upper_tail(
            |s: f64| dist.density(center + s) / (omega - center - s),
            30.0 * width,
            eps_abs,
            eps_rel,
        );
        let tail_lo = quadrature::integrate_upper_tail(
            |s: f64| dist.density(center - s) / (omega - center + s),
            30.0 * width,
            eps_abs,
            eps_rel,
        );
        real_part += tail_hi.value + tail_lo.value;
    }

    Ok(coupling_sq * Complex64::new(real_part, -PI * dist.density(omega)))
}

/// Finite-sum susceptibility of a sampled ensemble: Σ gₖ²/(ω − ωₖ + iγ/2).
pub fn discrete_susceptibility(ens: &DiscreteEnsemble, omega: f64) -> Complex64 {
    let half_gamma = 0.5 * ens.homogeneous_width();
    ens.frequencies()
        .iter()
        .zip(ens.couplings())
        .map(|(&wk, &gk)| gk * gk / Complex64::new(omega - wk, half_gamma))
        .sum()
}
