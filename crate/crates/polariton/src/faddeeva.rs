//! Scaled complex complementary error function w(z) = e^{−z²} erfc(−iz).
//!
//! Region-switched evaluation: a Maclaurin/Kummer series near the origin, a
//! trigonometric series built on the Fourier expansion of the Gaussian in the
//! middle range, and the asymptotic inverse-power series far out. The lower
//! half plane is reached through w(z) = 2e^{−z²} − w(−z). Target accuracy is
//! better than 1e−12 relative on Im z ≥ 0, which the test suite checks
//! against adaptive quadrature of the defining integral.

use crate::error::{Error, Result};
use num_complex::Complex64;

const FRAC_2_SQRT_PI: f64 = 1.128_379_167_095_512_573_9;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_9;

// Fourier step a = π/√(−ln(ε/2)) for ε = 2⁻⁵², with c = 2a/π and a².
const A: f64 = 0.518_321_480_430_085_929_872;
const C: f64 = 0.329_973_702_884_629_072_537;

/// Faddeeva function for any finite complex argument.
///
/// Returns a domain error on NaN or infinite input.
pub fn faddeeva(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFiniteArgument("faddeeva argument"));
    }
    Ok(faddeeva_w(z))
}

/// Unchecked Faddeeva evaluation; propagates NaN for non-finite input.
pub(crate) fn faddeeva_w(z: Complex64) -> Complex64 {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    if z.im >= 0.0 {
        w_upper(z)
    } else {
        // w(z) + w(−z) = 2 e^{−z²}; −z has Im > 0. exp(−z²) may overflow for
        // deep arguments with |Im z| ≫ |Re z|, outside the physical regime
        // served here (shallow analytic continuation below the real axis).
        2.0 * exp_minus_z_squared(z) - w_upper(-z)
    }
}

fn exp_minus_z_squared(z: Complex64) -> Complex64 {
    // −z² = (y² − x²) − 2ixy, computed without forming z² to limit rounding.
    let re = (z.im - z.re) * (z.im + z.re);
    let im = -2.0 * z.re * z.im;
    Complex64::from_polar(re.exp(), im)
}

fn w_upper(z: Complex64) -> Complex64 {
    let r2 = z.re * z.re + z.im * z.im;
    // The Maclaurin series loses digits against the e^{y²} growth away from
    // the real axis, so its disc stays small.
    if r2 <= 1.0 {
        w_series(z)
    } else if r2 >= 81.0 {
        w_asymptotic(z)
    } else if z.re >= 0.0 {
        w_middle(z.re, z.im)
    } else {
        // w(−conj z) = conj(w(z)) maps Re z < 0 back to the first quadrant.
        w_middle(-z.re, z.im).conj()
    }
}

/// |z| ≤ 1: w(z) = e^{−z²} + (2i/√π) z M(1, 3/2, −z²) with the Kummer series
/// summed directly (it reproduces the Dawson series on the real axis).
fn w_series(z: Complex64) -> Complex64 {
    let u = -(z * z);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..120 {
        term = term * u / (1.5 + k as f64);
        sum += term;
        if term.norm_sqr() < 1e-36 * sum.norm_sqr() {
            break;
        }
    }
    exp_minus_z_squared(z) + Complex64::new(0.0, FRAC_2_SQRT_PI) * z * sum
}

/// |z| ≥ 9: w(z) = (i/√π) z⁻¹ Σ (2k−1)!! (2z²)⁻ᵏ, truncated at the smallest
/// term. On the real axis the series is purely imaginary and the exact
/// e^{−x²} real part is restored explicitly.
fn w_asymptotic(z: Complex64) -> Complex64 {
    let inv_2z2 = 0.5 / (z * z);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev_mag = 1.0f64;
    for k in 0..40 {
        term = term * (2 * k + 1) as f64 * inv_2z2;
        let mag = term.norm_sqr();
        if mag >= prev_mag {
            break;
        }
        sum += term;
        prev_mag = mag;
        if mag < 1e-36 * sum.norm_sqr() {
            break;
        }
    }
    let mut w = Complex64::new(0.0, FRAC_1_SQRT_PI) / z * sum;
    if z.im == 0.0 {
        w.re = (-z.re * z.re).exp();
    }
    w
}

/// 2 < |z| < 9, first quadrant: Fourier-series evaluation with step `A`.
///
/// With coefₙ = e^{−(a²n² + x²)}/(a²n² + y²) the three required sums are
/// s₁ = Σ coefₙ, s₊ = Σ coefₙ cosh(2anx) and s₋ = Σ coefₙ·an·sinh(2anx);
/// the truncation error is below 2⁻⁵³ by construction of `A`.
fn w_middle(x: f64, y: f64) -> Complex64 {
    let exp_mx2 = (-x * x).exp();
    let mut s1 = 0.0;
    let mut s_cosh = 0.0;
    let mut s_sinh = 0.0;

    let n_max = ((x + 9.0) / A).ceil() as usize + 4;
    for n in 1..=n_max {
        let an = A * n as f64;
        let coef = (-(an * an + x * x)).exp() / (an * an + y * y);
        let arg = 2.0 * an * x;
        s1 += coef;
        s_cosh += coef * arg.cosh();
        let term_sinh = coef * an * arg.sinh();
        s_sinh += term_sinh;
        // The sinh sum has the slowest decay; once its term is negligible
        // relative to every accumulated sum the expansion has converged.
        let term_dom = coef * arg.exp() * (an + 1.0);
        if term_dom < 1e-18 * (s_sinh + s_cosh + s1 + 1e-300) && an > x + 1.0 {
            break;
        }
    }

    let erfcx_y = erfcx(y);
    let coef1 = exp_mx2 * erfcx_y - C * y * s1;
    let coef2 = C * x * exp_mx2;
    let xy = x * y;
    let sin_xy = xy.sin();
    let sin_2xy = (2.0 * xy).sin();
    let cos_2xy = (2.0 * xy).cos();

    let re = coef1 * cos_2xy + coef2 * sin_xy * sinc(xy, sin_xy) + C * y * s_cosh;
    let im = coef2 * sinc(2.0 * xy, sin_2xy) - coef1 * sin_2xy + C * s_sinh;
    Complex64::new(re, im)
}

fn sinc(x: f64, sin_x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        sin_x / x
    }
}

/// w′(z), stable at every scale.
///
/// The identity w′ = −2z·w + 2i/√π loses all precision for large |z| where
/// the two terms cancel to O(1/z²); there the derivative gets its own
/// asymptotic series, −(i/√π) Σ (2k+1) (2k−1)!! (2z²)⁻ᵏ / z².
pub(crate) fn faddeeva_w_derivative(z: Complex64) -> Complex64 {
    let r2 = z.re * z.re + z.im * z.im;
    if r2 < 81.0 {
        -2.0 * z * faddeeva_w(z) + Complex64::new(0.0, FRAC_2_SQRT_PI)
    } else {
        let inv_2z2 = 0.5 / (z * z);
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        let mut prev_mag = 1.0f64;
        for k in 1..40 {
            term = term * (2 * k - 1) as f64 * inv_2z2;
            let contribution = term * (2 * k + 1) as f64;
            let mag = contribution.norm_sqr();
            if mag >= prev_mag {
                break;
            }
            sum += contribution;
            prev_mag = mag;
            if mag < 1e-36 * sum.norm_sqr() {
                break;
            }
        }
        let mut wp = Complex64::new(0.0, -FRAC_1_SQRT_PI) / (z * z) * sum;
        if z.im == 0.0 {
            // Real-axis exponential part: d/dx e^{−x²} = −2x e^{−x²}.
            wp.re = -2.0 * z.re * (-z.re * z.re).exp();
        }
        wp
    }
}

/// Scaled real complementary error function e^{y²} erfc(y) for y ≥ 0.
pub fn erfcx(y: f64) -> f64 {
    debug_assert!(y >= 0.0);
    if y < 1.8 {
        (y * y).exp() * (1.0 - erf_maclaurin(y))
    } else {
        erfcx_continued_fraction(y)
    }
}

fn erf_maclaurin(x: f64) -> f64 {
    // erf x = (2/√π) Σ (−1)ᵏ x^{2k+1} / (k! (2k+1)), adequate for |x| ≲ 2.
    let x2 = x * x;
    let mut power = x;
    let mut sum = x;
    let mut k = 1.0;
    loop {
        power *= -x2 / k;
        let term = power / (2.0 * k + 1.0);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() || k > 80.0 {
            break;
        }
        k += 1.0;
    }
    FRAC_2_SQRT_PI * sum
}

fn erfcx_continued_fraction(y: f64) -> f64 {
    // erfcx y = (1/√π) / (y + K), K = (1/2)/(y + 1/(y + (3/2)/(y + ...))),
    // with K evaluated by the modified Lentz scheme (aₙ = n/2, bₙ = y).
    let tiny = 1e-300;
    let mut f = tiny;
    let mut c = tiny;
    let mut d = 0.0;
    for n in 1..500 {
        let a_n = 0.5 * n as f64;
        d = y + a_n * d;
        if d == 0.0 {
            d = tiny;
        }
        c = y + a_n / c;
        if c == 0.0 {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if n > 1 && (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    FRAC_1_SQRT_PI / (y + f)
}
