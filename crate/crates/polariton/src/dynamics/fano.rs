//! Lossless spectral-integral route for the cavity survival amplitude.
//!
//! Diagonalizing the closed cavity–continuum system gives eigenstates whose
//! overlap with the bare photon is |a(ω)|² = Ω²ρ(ω)/|ω − ω₀ − W₀(ω)|², with
//! W₀ the zero-damping susceptibility; the amplitude follows as
//! α₁(t) = ∫ |a(ω)|² e^{−iωt} dω. A bounded support adds discrete
//! eigenstates outside the continuum: for Ω above the support width the two
//! polaritons carry Dirac weights that keep the measure normalized.

use super::{AmplitudeLabel, TimeSeries};
use crate::error::{Error, Result};
use crate::params::{CavityParams, EnsembleParams, LineShape};
use crate::quadrature;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Photonic weight density |a(ω)|² of the lossless eigenstates.
///
/// Cavity and emitter losses are ignored; only the frequencies enter.
pub fn fano_weight(cavity: &CavityParams, ens: &EnsembleParams, omega: f64) -> Result<f64> {
    let lossless = ens.with_homogeneous_width(0.0)?;
    let coupling_sq = ens.coupling() * ens.coupling();
    let rho = ens.distribution().density(omega);
    if rho == 0.0 {
        return Ok(0.0);
    }
    let denom = Complex64::new(omega - cavity.frequency(), 0.0)
        - lossless.susceptibility(omega);
    Ok(coupling_sq * rho / denom.norm_sqr())
}

/// Real part of the eigenvalue condition, C(ω) = ω − ω₀ − Re W₀(ω); its
/// zeros locate the polariton peaks (and, outside a bounded support, the
/// discrete eigenstates).
fn eigenvalue_condition(cavity: &CavityParams, ens: &EnsembleParams, omega: f64) -> f64 {
    let lossless = ens.with_homogeneous_width(0.0).expect("gamma 0 is valid");
    omega - cavity.frequency() - lossless.susceptibility(omega).re
}

fn bisect_root(
    f: &impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    iterations: usize,
) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Find zeros of C(ω) by scanning for sign changes and bisecting.
fn condition_roots(
    cavity: &CavityParams,
    ens: &EnsembleParams,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Vec<f64> {
    let f = |w: f64| eigenvalue_condition(cavity, ens, w);
    let mut roots = Vec::new();
    let mut prev_w = lo;
    let mut prev_f = f(lo);
    for i in 1..=samples {
        let w = lo + (hi - lo) * i as f64 / samples as f64;
        let fw = f(w);
        if prev_f == 0.0 {
            roots.push(prev_w);
        } else if (fw > 0.0) != (prev_f > 0.0) {
            roots.push(bisect_root(&f, prev_w, w, 80));
        }
        prev_w = w;
        prev_f = fw;
    }
    roots
}

struct SpectralMeasure {
    /// Sorted quadrature breakpoints covering the continuum.
    points: Vec<f64>,
    /// Discrete eigenstate contributions (frequency, weight).
    discrete: Vec<(f64, f64)>,
    /// Continuum mass captured by the quadrature window.
    continuum_mass: f64,
    /// Heavy-tail mass outside the window (unbounded shapes only).
    tail_mass: f64,
}

fn build_measure(cavity: &CavityParams, ens: &EnsembleParams) -> Result<SpectralMeasure> {
    let coupling = ens.coupling();
    if coupling <= 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let dist = ens.distribution();
    let center = dist.center();
    let fwhm = dist.fwhm();
    let omega0 = cavity.frequency();

    let reach = (coupling + (omega0 - center).abs()) * 1.6 + 10.0 * fwhm;
    let (win_lo, win_hi) = match dist.shape() {
        LineShape::Rectangular => (center - 0.5 * fwhm, center + 0.5 * fwhm),
        _ => (center - reach, center + reach),
    };

    // Peak positions inform the breakpoints (their widths can be thousands
    // of times narrower than the window).
    let mut points = vec![win_lo, win_hi];
    for root in condition_roots(cavity, ens, win_lo, win_hi, 4000) {
        let rho = dist.density(root);
        if rho <= 0.0 {
            continue;
        }
        // Peak width ≈ πΩ²ρ / |C'|, with C' from a centered difference.
        let h = 1e-6 * fwhm.max(coupling);
        let slope = (eigenvalue_condition(cavity, ens, root + h)
            - eigenvalue_condition(cavity, ens, root - h))
            / (2.0 * h);
        let width = (PI * coupling * coupling * rho / slope.abs().max(1e-12)).max(1e-12);
        for p in [
            root - 50.0 * width,
            root - width,
            root,
            root + width,
            root + 50.0 * width,
        ] {
            if p > win_lo && p < win_hi {
                points.push(p);
            }
        }
    }
    points.push(center);
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();

    // Discrete eigenstates outside a bounded support, weights 1/C'(ω_d)
    // rescaled so the full measure is normalized.
    let mut discrete = Vec::new();
    if dist.shape() == LineShape::Rectangular {
        let eps = 1e-9 * fwhm;
        let outer = (coupling + (omega0 - center).abs()) * 3.0 + 3.0 * fwhm;
        for (lo, hi) in [
            (center - 0.5 * fwhm - outer, center - 0.5 * fwhm - eps),
            (center + 0.5 * fwhm + eps, center + 0.5 * fwhm + outer),
        ] {
            for root in condition_roots(cavity, ens, lo, hi, 3000) {
                let h = 1e-7 * fwhm.max(coupling);
                let slope = (eigenvalue_condition(cavity, ens, root + h)
                    - eigenvalue_condition(cavity, ens, root - h))
                    / (2.0 * h);
                if slope > 0.0 {
                    discrete.push((root, 1.0 / slope));
                }
            }
        }
    }

    let mut f = |w: f64| fano_weight(cavity, ens, w).unwrap_or(0.0);
    let continuum_mass =
        quadrature::integrate_segmented(&mut f, &points, 1e-10, 1e-9, 6000).value;

    let mut tail_mass = 0.0;
    if dist.shape() != LineShape::Rectangular {
        let hi_edge = win_hi - center;
        tail_mass += quadrature::integrate_upper_tail(
            |s: f64| fano_weight(cavity, ens, center + s).unwrap_or(0.0),
            hi_edge,
            1e-11,
            1e-9,
        )
        .value;
        tail_mass += quadrature::integrate_upper_tail(
            |s: f64| fano_weight(cavity, ens, center - s).unwrap_or(0.0),
            hi_edge,
            1e-11,
            1e-9,
        )
        .value;
    }

    let discrete_raw: f64 = discrete.iter().map(|(_, w)| w).sum();
    if discrete.is_empty() {
        let total = continuum_mass + tail_mass;
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::CompletenessCheck {
                total,
                tolerance: 1e-6,
            });
        }
    } else {
        // Fix the discrete weights by overall normalization; reject if that
        // disagrees grossly with the slopes.
        let target = 1.0 - continuum_mass - tail_mass;
        if discrete_raw <= 0.0 || (discrete_raw - target).abs() > 1e-2 {
            return Err(Error::CompletenessCheck {
                total: continuum_mass + tail_mass + discrete_raw,
                tolerance: 1e-2,
            });
        }
        let scale = target / discrete_raw;
        for d in discrete.iter_mut() {
            d.1 *= scale;
        }
    }

    Ok(SpectralMeasure {
        points,
        discrete,
        continuum_mass,
        tail_mass,
    })
}

/// Cavity survival amplitude from the lossless spectral integral.
///
/// κ and γ do not enter; the cavity contributes only its frequency. The
/// oscillatory tail of an unbounded distribution beyond the quadrature
/// window is dropped for t > 0 (its magnitude is below the completeness
/// tolerance); the t = 0 sample carries the full measured mass.
pub fn alpha1_fano(
    cavity: &CavityParams,
    ens: &EnsembleParams,
    times: &[f64],
) -> Result<TimeSeries> {
    let measure = build_measure(cavity, ens)?;
    let weight = |w: f64| fano_weight(cavity, ens, w).unwrap_or(0.0);

    let values: Vec<Complex64> = times
        .par_iter()
        .map(|&t| {
            if t == 0.0 {
                let total = measure.continuum_mass
                    + measure.tail_mass
                    + measure.discrete.iter().map(|(_, w)| w).sum::<f64>();
                return Complex64::new(total, 0.0);
            }
            // Oscillation-aware panels between the stored breakpoints.
            let lo = measure.points[0];
            let hi = *measure.points.last().unwrap();
            let n_osc = (((hi - lo) * t) / (4.0 * PI)).ceil().max(1.0) as usize;
            let n_osc = n_osc.min(200_000);
            let mut points = measure.points.clone();
            for k in 0..=n_osc {
                points.push(lo + (hi - lo) * k as f64 / n_osc as f64);
            }
            points.sort_by(|a, b| a.partial_cmp(b).unwrap());
            points.dedup();
            let mut f = |w: f64| weight(w) * (-Complex64::i() * w * t).exp();
            let mut value = quadrature::integrate_segmented(
                &mut f,
                &points,
                1e-8,
                1e-8,
                n_osc * 4 + 2000,
            )
            .value;
            for &(wd, mass) in &measure.discrete {
                value += mass * (-Complex64::i() * wd * t).exp();
            }
            value
        })
        .collect();

    Ok(TimeSeries::new(
        times.to_vec(),
        values,
        AmplitudeLabel::CavityToCavity,
    ))
}
