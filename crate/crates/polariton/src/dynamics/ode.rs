//! Adaptive Dormand–Prince 5(4) integrator for complex linear systems.

use crate::error::{Error, Result};
use num_complex::Complex64;

// Butcher tableau of the Dormand–Prince 5(4) pair (stage times omitted:
// the systems integrated here are autonomous).
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Fifth-minus-fourth order error weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub(crate) struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

fn axpy(out: &mut [Complex64], y: &[Complex64], h: f64, coeffs: &[(f64, &[Complex64])]) {
    for i in 0..out.len() {
        let mut acc = y[i];
        for (a, k) in coeffs {
            acc += h * *a * k[i];
        }
        out[i] = acc;
    }
}

/// Integrate dψ/dt = f(ψ) from t = 0 through every requested output time.
///
/// `times` must be non-negative and non-decreasing. Returns the state at each
/// requested time (steps land exactly on the outputs).
pub(crate) fn integrate<F>(
    deriv: F,
    initial: &[Complex64],
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Vec<Complex64>>>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    let n = initial.len();
    let mut outputs = Vec::with_capacity(times.len());
    if times.is_empty() {
        return Ok(outputs);
    }
    for w in times.windows(2) {
        if w[1] < w[0] {
            return Err(Error::InvalidInput(
                "output times must be non-decreasing".into(),
            ));
        }
    }
    if times[0] < 0.0 {
        return Err(Error::InvalidInput("output times must be ≥ 0".into()));
    }

    let mut t = 0.0f64;
    let mut y = initial.to_vec();
    let mut k1 = vec![Complex64::default(); n];
    let mut k2 = vec![Complex64::default(); n];
    let mut k3 = vec![Complex64::default(); n];
    let mut k4 = vec![Complex64::default(); n];
    let mut k5 = vec![Complex64::default(); n];
    let mut k6 = vec![Complex64::default(); n];
    let mut k7 = vec![Complex64::default(); n];
    let mut stage = vec![Complex64::default(); n];
    let mut y_new = vec![Complex64::default(); n];

    deriv(&y, &mut k1);
    let t_end = *times.last().unwrap();

    // Initial step from the derivative magnitude.
    let f_norm = k1.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let y_norm = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut h = (0.01 * (y_norm + opts.atol) / (f_norm + 1e-30)).min(t_end.max(1e-6));
    if h <= 0.0 {
        h = 1e-6;
    }

    let mut next_output = 0;
    while next_output < times.len() && times[next_output] <= t {
        outputs.push(y.clone());
        next_output += 1;
    }

    let scale_t = t_end.max(1.0);
    while next_output < times.len() {
        if h < 1e-14 * scale_t {
            return Err(Error::StepSizeUnderflow { time: t });
        }
        let target = times[next_output];
        let mut h_try = h.min(target - t);
        if h_try <= 0.0 {
            h_try = h;
        }

        axpy(&mut stage, &y, h_try, &[(A21, &k1)]);
        deriv(&stage, &mut k2);
        axpy(&mut stage, &y, h_try, &[(A31, &k1), (A32, &k2)]);
        deriv(&stage, &mut k3);
        axpy(&mut stage, &y, h_try, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        deriv(&stage, &mut k4);
        axpy(
            &mut stage,
            &y,
            h_try,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        );
        deriv(&stage, &mut k5);
        axpy(
            &mut stage,
            &y,
            h_try,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        deriv(&stage, &mut k6);
        axpy(
            &mut y_new,
            &y,
            h_try,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        deriv(&y_new, &mut k7);

        // Weighted rms of the embedded error estimate.
        let mut err_sq = 0.0;
        for i in 0..n {
            let err = h_try
                * (E1 * k1[i]
                    + E3 * k3[i]
                    + E4 * k4[i]
                    + E5 * k5[i]
                    + E6 * k6[i]
                    + E7 * k7[i]);
            let tol = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            let r = err.norm() / tol;
            err_sq += r * r;
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            t += h_try;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7); // FSAL
            while next_output < times.len() && times[next_output] <= t + 1e-14 * scale_t {
                outputs.push(y.clone());
                next_output += 1;
            }
        }

        let factor = if err > 1e-30 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h_try * factor).max(1e-16 * scale_t);
    }

    Ok(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        // dy/dt = (−0.3 − 2i) y
        let lambda = Complex64::new(-0.3, -2.0);
        let deriv = |y: &[Complex64], out: &mut [Complex64]| {
            out[0] = lambda * y[0];
        };
        let times: Vec<f64> = (0..=20).map(|k| 0.5 * k as f64).collect();
        let sol = integrate(
            deriv,
            &[Complex64::new(1.0, 0.0)],
            &times,
            &OdeOptions::default(),
        )
        .unwrap();
        for (k, state) in sol.iter().enumerate() {
            let exact = (lambda * times[k]).exp();
            assert!(
                (state[0] - exact).norm() < 1e-9,
                "t = {}: {} vs {exact}",
                times[k],
                state[0]
            );
        }
    }

    #[test]
    fn two_level_rabi_oscillation() {
        // H = [[0, ig], [−ig, 0]]: amplitude on the first level is cos(gt).
        let g = 1.7;
        let deriv = move |y: &[Complex64], out: &mut [Complex64]| {
            // dψ/dt = −iHψ
            out[0] = -Complex64::i() * (Complex64::i() * g * y[1]);
            out[1] = -Complex64::i() * (-Complex64::i() * g * y[0]);
        };
        let times: Vec<f64> = (0..=40).map(|k| 0.25 * k as f64).collect();
        let sol = integrate(
            deriv,
            &[Complex64::new(1.0, 0.0), Complex64::default()],
            &times,
            &OdeOptions::default(),
        )
        .unwrap();
        for (k, state) in sol.iter().enumerate() {
            let exact = (g * times[k]).cos();
            assert!(
                (state[0].re - exact).abs() < 1e-8 && state[0].im.abs() < 1e-8,
                "t = {}: {} vs {exact}",
                times[k],
                state[0]
            );
            let norm = state[0].norm_sqr() + state[1].norm_sqr();
            assert!((norm - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn output_at_time_zero_is_exact() {
        let deriv = |y: &[Complex64], out: &mut [Complex64]| {
            out[0] = -y[0];
        };
        let sol = integrate(
            deriv,
            &[Complex64::new(0.5, 0.5)],
            &[0.0, 1.0],
            &OdeOptions::default(),
        )
        .unwrap();
        assert_eq!(sol[0][0], Complex64::new(0.5, 0.5));
    }
}
