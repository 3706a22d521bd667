//! Numerical inversion of one-sided Fourier–Laplace amplitudes.
//!
//! An amplitude α(t) with transform F(ω) = ∫₀^∞ α(t) e^{iωt} dt is recovered
//! as α(t) = (1/2π) ∫ F(ω) e^{−iωt} dω. Two backends share the pole-reference
//! idea: terms rⱼ·i/(ω − μⱼ) with Im μⱼ < 0 invert exactly to rⱼ e^{−iμⱼt},
//! so only the subtracted remainder is handled numerically.
//!
//! * `invert_fft` samples the remainder on a wide uniform grid and applies a
//!   single FFT. It needs every feature resolved by the grid and decayed
//!   within the wrap-around time, which holds in the resonant regimes.
//! * `invert_adaptive` integrates the remainder window by window with
//!   adaptive quadrature per output time. It has no resolution floor and
//!   covers the dispersive-memory regime where lines are orders of magnitude
//!   narrower than any affordable uniform grid.

use crate::error::{Error, Result};
use crate::quadrature;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Exactly invertible reference term r·i/(ω − μ) ↦ r·e^{−iμt}.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PoleRef {
    /// Physical-sheet frequency; Im < 0 means decay.
    pub frequency: Complex64,
    /// Amplitude coefficient of the exponential.
    pub residue: Complex64,
}

impl PoleRef {
    fn transform(&self, omega: f64) -> Complex64 {
        self.residue * Complex64::i() / (omega - self.frequency)
    }

    fn amplitude(&self, t: f64) -> Complex64 {
        self.residue * (-Complex64::i() * self.frequency * t).exp()
    }
}

/// Tuning knobs of the frequency-window inversion.
#[derive(Debug, Clone)]
pub struct LaplaceSettings {
    /// Half-span of the FFT window in units of the largest rate.
    pub span_factor: f64,
    /// Number of uniform FFT samples.
    pub points: usize,
    /// Fraction of the window smoothed by the raised-cosine taper.
    pub taper_fraction: f64,
    /// Relative spectral weight allowed at the window edge.
    pub leakage_limit: f64,
    /// Absolute tolerance of the adaptive backend per time sample.
    pub quad_tolerance: f64,
}

impl Default for LaplaceSettings {
    fn default() -> Self {
        Self {
            span_factor: 40.0,
            points: 1 << 20,
            taper_fraction: 0.05,
            leakage_limit: 1e-6,
            quad_tolerance: 1e-7,
        }
    }
}

/// FFT inversion of `transform` minus the reference poles.
///
/// The grid spans `omega_ref ± half_span` with `settings.points` samples.
/// Requested times must stay below 45% of the wrap-around time 2π/dω.
pub(crate) fn invert_fft(
    transform: &(dyn Fn(f64) -> Complex64 + Sync),
    refs: &[PoleRef],
    alpha0: Complex64,
    omega_ref: f64,
    half_span: f64,
    times: &[f64],
    settings: &LaplaceSettings,
) -> Result<Vec<Complex64>> {
    let m = settings.points;
    let d_omega = 2.0 * half_span / m as f64;
    let dt = PI / half_span;
    let t_wrap = m as f64 * dt;
    let t_usable = 0.45 * t_wrap;
    for &t in times {
        if t > t_usable {
            return Err(Error::TimeBeyondWindow {
                requested: t,
                max: t_usable,
            });
        }
    }

    // Floor reference decay so no reference sits on the sampling line; the
    // subtract/re-add pair stays exact for any strictly damped frequency.
    let im_floor = -8.0 / t_wrap;
    let refs: Vec<PoleRef> = refs
        .iter()
        .map(|r| PoleRef {
            frequency: Complex64::new(r.frequency.re, r.frequency.im.min(im_floor)),
            residue: r.residue,
        })
        .collect();

    let start = omega_ref - half_span;
    let mut samples: Vec<Complex64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let w = start + d_omega * i as f64;
            let mut g = transform(w);
            for r in &refs {
                g -= r.transform(w);
            }
            g
        })
        .collect();

    // Spectral-leakage guard: remaining weight at the window edge, relative
    // to the dominant feature of the raw transform.
    let peak = samples
        .iter()
        .zip(0..m)
        .map(|(g, i)| {
            let w = start + d_omega * i as f64;
            let mut f = *g;
            for r in &refs {
                f += r.transform(w);
            }
            f.norm()
        })
        .fold(0.0f64, f64::max);
    let edge_bins = (m / 100).max(4);
    let edge = samples[..edge_bins]
        .iter()
        .chain(&samples[m - edge_bins..])
        .map(|g| g.norm())
        .fold(0.0f64, f64::max);
    if edge > settings.leakage_limit * peak.max(1e-300) {
        return Err(Error::WindowTooSmall {
            tail: edge / peak.max(1e-300),
            limit: settings.leakage_limit,
        });
    }

    // Raised-cosine taper over the outer fraction of the window.
    let n_taper = ((m as f64) * settings.taper_fraction) as usize;
    for i in 0..n_taper {
        let w = 0.5 * (1.0 - (PI * i as f64 / n_taper as f64).cos());
        samples[i] *= w;
        samples[m - 1 - i] *= w;
    }

    FftPlanner::new().plan_fft_forward(m).process(&mut samples);

    // Demodulated envelope: α(tₙ)e^{iω_ref tₙ} = (dω/2π)(−1)ⁿ X[n].
    let scale = d_omega / (2.0 * PI);
    let env: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(n, x)| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            scale * sign * x
        })
        .collect();

    Ok(times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return alpha0;
            }
            let u = t / dt;
            let n0 = (u.floor() as usize).clamp(1, m - 3);
            let frac = u - n0 as f64;
            let interpolated = catmull_rom(
                env[n0 - 1],
                env[n0],
                env[n0 + 1],
                env[n0 + 2],
                frac,
            );
            let mut value = interpolated * (-Complex64::i() * omega_ref * t).exp();
            for r in &refs {
                value += r.amplitude(t);
            }
            value
        })
        .collect())
}

fn catmull_rom(p0: Complex64, p1: Complex64, p2: Complex64, p3: Complex64, u: f64) -> Complex64 {
    let u2 = u * u;
    let u3 = u2 * u;
    0.5 * ((2.0 * p1)
        + (p2 - p0) * u
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2
        + (3.0 * (p1 - p2) + p3 - p0) * u3)
}

/// Adaptive-quadrature inversion of `transform` minus the reference poles
/// over explicit frequency windows.
///
/// Outside the windows the remainder must be negligible (the caller places
/// windows over every spectral feature). Window edges and reference
/// frequencies become panel boundaries, so the integrand is never evaluated
/// exactly on a subtracted pole.
pub(crate) fn invert_adaptive(
    transform: &(dyn Fn(f64) -> Complex64 + Sync),
    refs: &[PoleRef],
    alpha0: Complex64,
    windows: &[(f64, f64)],
    times: &[f64],
    settings: &LaplaceSettings,
) -> Vec<Complex64> {
    let remainder = |w: f64| {
        let mut g = transform(w);
        for r in refs {
            g -= r.transform(w);
        }
        g
    };

    // Near the real axis the pole subtraction cancels two large numbers; the
    // noise scales like (residue error)/distance and would mislead the
    // adaptive refinement. Excise a hole around each barely-damped pole; the
    // true remainder there is smooth, so the omitted mass is O(hole width).
    let span: f64 = windows.iter().map(|(a, b)| b - a).fold(0.0, f64::max);
    let holes: Vec<(f64, f64)> = refs
        .iter()
        .filter(|r| r.frequency.im.abs() < 1e-5 * span)
        .map(|r| {
            let h = 1e-6 * span;
            (r.frequency.re - h, r.frequency.re + h)
        })
        .collect();
    let windows: Vec<(f64, f64)> = windows
        .iter()
        .flat_map(|&w| punch_holes(w, &holes))
        .collect();

    times
        .par_iter()
        .map(|&t| {
            if t == 0.0 {
                return alpha0;
            }
            let mut value = Complex64::default();
            for r in refs {
                value += r.amplitude(t);
            }
            for &(a, b) in &windows {
                // Seed panels at roughly two oscillation periods each.
                let n_panels = (((b - a) * t) / (4.0 * PI)).ceil().max(1.0) as usize;
                let n_panels = n_panels.min(200_000);
                let mut points = Vec::with_capacity(n_panels + 1 + refs.len());
                for k in 0..=n_panels {
                    points.push(a + (b - a) * k as f64 / n_panels as f64);
                }
                for r in refs {
                    let c = r.frequency.re;
                    if c > a && c < b {
                        points.push(c);
                    }
                }
                points.sort_by(|x, y| x.partial_cmp(y).unwrap());
                points.dedup();
                let mut f = |w: f64| remainder(w) * (-Complex64::i() * w * t).exp();
                let q = quadrature::integrate_segmented(
                    &mut f,
                    &points,
                    settings.quad_tolerance * 2.0 * PI,
                    1e-9,
                    n_panels * 4 + 2000,
                );
                value += q.value / (2.0 * PI);
            }
            value
        })
        .collect()
}

/// Remove the hole intervals from a window, returning the surviving pieces.
fn punch_holes(window: (f64, f64), holes: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pieces = vec![window];
    for &(ha, hb) in holes {
        let mut next = Vec::with_capacity(pieces.len() + 1);
        for (a, b) in pieces {
            if hb <= a || ha >= b {
                next.push((a, b));
            } else {
                if ha > a {
                    next.push((a, ha));
                }
                if hb < b {
                    next.push((hb, b));
                }
            }
        }
        pieces = next;
    }
    pieces
}

/// Merge overlapping windows into a sorted disjoint cover.
pub(crate) fn merge_windows(mut windows: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    windows.retain(|(a, b)| b > a);
    windows.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(windows.len());
    for (a, b) in windows {
        if let Some(last) = merged.last_mut() {
            if a <= last.1 {
                last.1 = last.1.max(b);
                continue;
            }
        }
        merged.push((a, b));
    }
    merged
}
