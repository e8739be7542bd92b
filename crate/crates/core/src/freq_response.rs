//! Exact periodic response to the boundary input `d(t) = sin(wt)`.
//!
//! The periodic solution is `u(t, x) = sin(wt) h(x) + cos(wt) g(x)`, where
//! `h + i g = sinh(lambda (1 - x)) / sinh(lambda)` and `lambda = a + i b` is the
//! root of `lambda^2 (1 + i sigma w) = i mu w - w^2` with positive real and
//! imaginary parts. Everything here is evaluated with the growth `exp(2a)`
//! divided out, so nothing overflows when `sigma` is small and `w` is large.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::special::{cosh_minus_cos_scaled, expm1_complex, sinhc};
use crate::numerics::{refine_top_maxima, Extremum};
use crate::DampingParams;

/// Below this `max(a, b)` the small-argument formulas take over.
const SMALL_ROOT: f64 = 1.0;
/// Below this `|lambda|` the profile uses the complex closed form.
const SMALL_PROFILE_ROOT: f64 = 0.5;

/// Polar data of the characteristic root at one forcing frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyPoint {
    pub omega: f64,
    /// Modulus of `lambda^2`.
    pub r: f64,
    /// Argument of `lambda^2`, in `(0, pi)`.
    pub theta: f64,
    /// `sqrt(r) cos(theta / 2)`
    pub a: f64,
    /// `sqrt(r) sin(theta / 2)`
    pub b: f64,
}

impl FrequencyPoint {
    /// The spatial root `lambda = a + i b`.
    pub fn root(&self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega.is_finite() && omega > 0.0) {
        return domain(format!("omega must be finite and positive, got {omega}"));
    }
    Ok(())
}

fn check_x(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("x must lie in [0, 1], got {x}"));
    }
    Ok(())
}

/// Computes `r`, `theta`, `a`, `b` at frequency `omega`.
pub fn polar_params(params: DampingParams, omega: f64) -> Result<FrequencyPoint> {
    check_omega(omega)?;
    let (sigma, mu) = (params.sigma(), params.mu());
    let denom = 1.0 + sigma * sigma * omega * omega;
    // r cos(theta) and r sin(theta)
    let re = (mu * sigma - 1.0) * omega * omega / denom;
    let im = (mu + sigma * omega * omega) * omega / denom;
    let r = re.hypot(im);
    let theta = im.atan2(re);
    // principal square root of re + i im, picking the well-conditioned half
    // angle first and recovering the other from 2ab = im
    let (a, b) = if re >= 0.0 {
        let a = (0.5 * (r + re)).sqrt();
        (a, im / (2.0 * a))
    } else {
        let b = (0.5 * (r - re)).sqrt();
        (im / (2.0 * b), b)
    };
    Ok(FrequencyPoint {
        omega,
        r,
        theta,
        a,
        b,
    })
}

/// In-phase and quadrature profiles `(h(x), g(x))`.
pub fn profile_at(point: &FrequencyPoint, x: f64) -> Result<(f64, f64)> {
    check_x(x)?;
    Ok(profile_unchecked(point, x))
}

pub(crate) fn profile_unchecked(point: &FrequencyPoint, x: f64) -> (f64, f64) {
    let (a, b) = (point.a, point.b);
    if a.hypot(b) < SMALL_PROFILE_ROOT {
        // sinh(lambda (1 - x)) / sinh(lambda), written as
        // exp(-lambda x) expm1(-2 lambda (1 - x)) / expm1(-2 lambda)
        let lambda = point.root();
        let v = (-lambda * x).exp() * expm1_complex(-2.0 * lambda * (1.0 - x))
            / expm1_complex(-2.0 * lambda);
        return (v.re, v.im);
    }
    // Closed form with numerator and denominator multiplied by exp(-2a).
    let ea_x = (-a * x).exp();
    let far = (-a * (4.0 - x)).exp();
    let near = (a * (x - 2.0)).exp();
    let mirror = (-a * (x + 2.0)).exp();
    let cosh_2mx = 0.5 * (ea_x + far);
    let sinh_2mx = 0.5 * (ea_x - far);
    let cosh_x = 0.5 * (near + mirror);
    let sinh_x = 0.5 * (near - mirror);
    let (s2b, c2b) = (2.0 * b).sin_cos();
    let (sbx, cbx) = (b * x).sin_cos();
    let denom = cosh_minus_cos_scaled(2.0 * a, 2.0 * b, 2.0 * a);
    let h = ((cosh_2mx - c2b * cosh_x) * cbx - s2b * sbx * cosh_x) / denom;
    let g = (s2b * cbx * sinh_x - (sinh_2mx + c2b * sinh_x) * sbx) / denom;
    (h, g)
}

/// Pointwise amplitude `A(x) = sqrt(h^2 + g^2)` from its closed form.
pub fn amplitude_at(point: &FrequencyPoint, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(amplitude_ratio(point, 1.0 - x).sqrt())
}

/// `(cosh(2a y) - cos(2b y)) / (cosh 2a - cos 2b)` for `y` in `[0, 1]`.
#[inline]
fn amplitude_ratio(point: &FrequencyPoint, y: f64) -> f64 {
    let (a, b) = (point.a, point.b);
    let shift = 2.0 * a;
    cosh_minus_cos_scaled(2.0 * a * y, 2.0 * b * y, shift)
        / cosh_minus_cos_scaled(2.0 * a, 2.0 * b, shift)
}

const SUP_REFINED_LOBES: usize = 8;

/// Number of grid points used for the spatial maximization.
pub fn sup_grid_points(point: &FrequencyPoint) -> usize {
    if point.b > 64.0 {
        16 * point.b.ceil() as usize
    } else {
        1024
    }
}

fn sup_grid(point: &FrequencyPoint) -> (Vec<f64>, Vec<f64>) {
    let n = sup_grid_points(point);
    let ys: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                1.0
            } else {
                i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let vs = ys.iter().map(|&y| amplitude_ratio(point, y)).collect();
    (ys, vs)
}

/// Grid-only estimate of `A(w)`, never above the refined value.
pub(crate) fn sup_gain_sampled(point: &FrequencyPoint) -> f64 {
    sup_grid(point).1.into_iter().fold(0.0, f64::max).sqrt()
}

/// Sup-norm gain `A(w)` together with the maximizing position in the
/// `cosh(2ax) - cos(2bx)` parametrization.
pub fn sup_gain_detail(point: &FrequencyPoint) -> Extremum {
    let (ys, vs) = sup_grid(point);
    let f = |y: f64| amplitude_ratio(point, y);
    // lobe heights grow with y through the cosh term, so only the highest
    // sampled lobes can hold the maximum; the sample at y = 1 is exactly 1
    let best = refine_top_maxima(f, &ys, &vs, 1e-10, SUP_REFINED_LOBES);
    Extremum {
        x: best.x,
        value: best.value.sqrt(),
    }
}

/// Per-frequency sup-norm gain `A(w) = sqrt(max_x (cosh(2ax) - cos(2bx)) / (cosh 2a - cos 2b))`.
pub fn sup_gain_at(params: DampingParams, omega: f64) -> Result<f64> {
    let point = polar_params(params, omega)?;
    Ok(sup_gain_detail(&point).value)
}

/// Mean-square statistics of the periodic solution over one period:
/// `||u(t)||_2^2 = p + q1 cos(2wt) + q2 sin(2wt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L2ResponseStats {
    pub p: f64,
    pub q1: f64,
    pub q2: f64,
    /// Closed form of `q1^2 + q2^2`.
    pub m: f64,
    /// Per-frequency L2 gain `sqrt(p + sqrt(m))`.
    pub q: f64,
}

/// `p`, `q1`, `q2`, `M` and `Q(w)` at one frequency point.
pub fn l2_stats(point: &FrequencyPoint) -> L2ResponseStats {
    let (a, b) = (point.a, point.b);
    let (p, q1, q2, m) = if a.max(b) < SMALL_ROOT {
        l2_stats_series(point)
    } else {
        l2_stats_closed(a, b)
    };
    L2ResponseStats {
        p,
        q1,
        q2,
        m,
        q: (p + m.max(0.0).sqrt()).sqrt(),
    }
}

/// Closed forms with every hyperbolic factor multiplied by `exp(-2a)` (and the
/// squared quantities by `exp(-4a)`).
fn l2_stats_closed(a: f64, b: f64) -> (f64, f64, f64, f64) {
    let e = (-2.0 * a).exp();
    let ch = 0.5 * (1.0 + e * e); // cosh(2a) e
    let sh = 0.5 * (1.0 - e * e); // sinh(2a) e
    let (s2b, c2b) = (2.0 * b).sin_cos();
    let d = cosh_minus_cos_scaled(2.0 * a, 2.0 * b, 2.0 * a); // (cosh 2a - cos 2b) e
    let rho2 = a * a + b * b;
    let p = (b * sh - a * s2b * e) / (4.0 * a * b * d);
    let q1 = (ch * c2b * e - e * e) / (2.0 * d * d) + (b * s2b * e - a * sh) / (4.0 * rho2 * d);
    let q2 = sh * s2b * e / (2.0 * d * d) - (a * s2b * e + b * sh) / (4.0 * rho2 * d);
    let m = (4.0 * rho2 * e * e - 4.0 * (b * s2b * ch * e + a * sh * c2b * e)
        + sh * sh
        + s2b * s2b * e * e)
        / (16.0 * rho2 * d * d);
    (p, q1, q2, m)
}

/// Power-series forms for small roots, where the closed forms cancel.
fn l2_stats_series(point: &FrequencyPoint) -> (f64, f64, f64, f64) {
    let (a, b) = (point.a, point.b);
    // sinh(2a)/(2a) - sin(2b)/(2b) = sum_k 4^k (a^2k - (-b^2)^k) / (2k+1)!
    let (a2, nb2) = (a * a, -b * b);
    let mut pa = 1.0;
    let mut pb = 1.0;
    let mut inv_fact = 1.0;
    let mut pow4 = 1.0;
    let mut num = 0.0;
    for k in 1..60 {
        pa *= a2;
        pb *= nb2;
        pow4 *= 4.0;
        inv_fact /= ((2 * k) * (2 * k + 1)) as f64;
        num += pow4 * (pa - pb) * inv_fact;
        if pow4 * (pa.abs() + pb.abs()) * inv_fact < 1e-18 * num.abs() {
            break;
        }
    }
    let d = cosh_minus_cos_scaled(2.0 * a, 2.0 * b, 0.0);
    let p = num / (2.0 * d);

    // integral_0^1 sinh^2(lambda y) dy / sinh^2(lambda)
    //   = [sum_{k>=1} 2^{2k-1} lambda^{2k-2} / (2k+1)!] / sinhc(lambda)^2
    let lambda = point.root();
    let l2 = lambda * lambda;
    let mut term = Complex64::new(1.0 / 3.0, 0.0);
    let mut acc = term;
    for k in 2..60 {
        term *= l2 * 4.0 / (((2 * k) * (2 * k + 1)) as f64);
        acc += term;
        if term.norm() < 1e-18 * acc.norm() {
            break;
        }
    }
    let sc = sinhc(lambda);
    let j = acc / (sc * sc);
    (p, -0.5 * j.re, 0.5 * j.im, 0.25 * j.norm_sqr())
}

/// L2 statistics at `omega`.
pub fn l2_stats_at(params: DampingParams, omega: f64) -> Result<L2ResponseStats> {
    Ok(l2_stats(&polar_params(params, omega)?))
}

/// Per-frequency L2 gain `Q(w)`.
pub fn q_gain_at(params: DampingParams, omega: f64) -> Result<f64> {
    Ok(l2_stats_at(params, omega)?.q)
}

/// A frequency point bundled with evaluators for its spatial profiles.
#[derive(Debug, Clone, Copy)]
pub struct SteadyStateProfile {
    pub point: FrequencyPoint,
}

impl SteadyStateProfile {
    pub fn new(params: DampingParams, omega: f64) -> Result<Self> {
        Ok(Self {
            point: polar_params(params, omega)?,
        })
    }

    pub fn h(&self, x: f64) -> Result<f64> {
        Ok(profile_at(&self.point, x)?.0)
    }

    pub fn g(&self, x: f64) -> Result<f64> {
        Ok(profile_at(&self.point, x)?.1)
    }

    pub fn amplitude(&self, x: f64) -> Result<f64> {
        amplitude_at(&self.point, x)
    }

    /// The periodic solution `u(t, x) = sin(wt) h(x) + cos(wt) g(x)`.
    pub fn field(&self, t: f64, x: f64) -> Result<f64> {
        let (h, g) = profile_at(&self.point, x)?;
        let (s, c) = (self.point.omega * t).sin_cos();
        Ok(s * h + c * g)
    }
}
