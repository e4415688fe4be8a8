//! Special functions: complete elliptic integral of the second kind,
//! gamma wrappers and the standard normal CDF.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

const AGM_TOL: f64 = 1e-14;
const AGM_MAX_ITER: usize = 64;

/// Complete elliptic integral of the second kind in parameter form,
/// `E(m) = ∫₀^{π/2} √(1 − m sin²θ) dθ`, for `m ≤ 1`.
///
/// Arithmetic-geometric mean with the Legendre correction sum
/// `E = K · (1 − Σ 2^{n−1} c_n²)`.
pub fn ellipe(m: f64) -> f64 {
    if m.is_nan() || m > 1.0 {
        return f64::NAN;
    }
    if m == 1.0 {
        return 1.0;
    }
    if m == 0.0 {
        return FRAC_PI_2;
    }
    let mut a = 1.0;
    let mut b = (1.0 - m).sqrt();
    let mut sum = 0.5 * m; // 2^{-1} c_0², c_0² = m
    let mut pow = 0.5;
    for _ in 0..AGM_MAX_ITER {
        let a_next = 0.5 * (a + b);
        let b_next = (a * b).sqrt();
        let c_next = 0.5 * (a - b);
        pow *= 2.0;
        sum += pow * c_next * c_next;
        a = a_next;
        b = b_next;
        if c_next.abs() <= AGM_TOL * a {
            break;
        }
    }
    FRAC_PI_2 / a * (1.0 - sum)
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Standard normal CDF `Φ(x) = 1 − Q(x)`.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Gaussian tail function `Q(x) = 1 − Φ(x)`.
pub fn q_function(x: f64) -> f64 {
    normal_cdf(-x)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
