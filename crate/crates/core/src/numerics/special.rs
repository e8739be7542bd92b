//! Overflow- and cancellation-safe elementary combinations.

use num_complex::Complex64;

/// `(cosh z - cos w) * exp(-shift)` for `z >= 0`.
///
/// Uses `cosh z - cos w = 2 sinh^2(z/2) + 2 sin^2(w/2)`, a sum of two
/// nonnegative terms, with `2 sinh^2(z/2) = exp(z) expm1(-z)^2 / 2`. No
/// subtraction happens and nothing overflows as long as `z <= shift + 709`.
#[inline]
pub fn cosh_minus_cos_scaled(z: f64, w: f64, shift: f64) -> f64 {
    debug_assert!(z >= 0.0);
    let em = (-z).exp_m1();
    let s = (0.5 * w).sin();
    0.5 * (z - shift).exp() * em * em + 2.0 * s * s * (-shift).exp()
}

/// `exp(z) - 1` for complex `z`, accurate when `|z|` is small.
pub fn expm1_complex(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let half = (0.5 * y).sin();
    let re = x.exp_m1() * y.cos() - 2.0 * half * half;
    let im = x.exp() * y.sin();
    Complex64::new(re, im)
}

/// `sinh(z) / z` for complex `z`.
pub fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        // sum_k z^{2k} / (2k+1)!
        let z2 = z * z;
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = term;
        for k in 1..40 {
            term *= z2 / (((2 * k) * (2 * k + 1)) as f64);
            acc += term;
            if term.norm() < 1e-18 * acc.norm() {
                break;
            }
        }
        acc
    } else {
        z.sinh() / z
    }
}
