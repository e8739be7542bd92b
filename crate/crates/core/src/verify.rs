//! Cross-validation suites run by `wavegain verify`.
//!
//! Every suite checks one implementation route against an independent one
//! (finite differences, quadrature, modal sums, closed-form limits). The
//! steady-state profile is injectable so the suites can be pointed at a
//! deliberately broken implementation.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::freq_response::{
    amplitude_at, l2_stats, polar_params, profile_unchecked, FrequencyPoint,
};
use crate::gain_bounds::{gain_bounds, mode_constants, upper_l2, upper_sup, FrequencySearchConfig};
use crate::modal::{modal_kernel_l1, modal_transfer};
use crate::numerics::{integrate, pairwise_sum, QuadratureConfig};
use crate::{DampingParams, INV_SQRT_3};

pub const DEFAULT_SEED: u64 = 20_160_807;

/// Profile implementation under test: `(h(x), g(x))` at a frequency point.
pub type ProfileFn = dyn Fn(&FrequencyPoint, f64) -> (f64, f64) + Sync;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub quick: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            quick: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    /// Worst observed error, in the suite's own measure.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.suites {
            writeln!(
                f,
                "{} {:<22} checks={:<5} worst={:.3e} tol={:.0e}",
                if s.passed { "PASS" } else { "FAIL" },
                s.name,
                s.checks,
                s.worst,
                s.tolerance
            )?;
        }
        writeln!(
            f,
            "{}",
            if self.passed() {
                "all suites passed"
            } else {
                "verification FAILED"
            }
        )
    }
}

fn suite(name: &'static str, errors: &[f64], tolerance: f64) -> SuiteReport {
    // NaN counts as a failure
    let worst = errors.iter().fold(0.0f64, |m, &e| {
        if e.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(e)
        }
    });
    SuiteReport {
        name,
        checks: errors.len(),
        worst,
        tolerance,
        passed: !errors.is_empty() && worst <= tolerance,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Random `(sigma, mu, omega)` draws: `sigma` log-uniform on `[0.05, 2]`,
/// `mu` uniform on `[0, 3]`, `omega` log-uniform on `[0.05, 30]`.
pub fn random_draws(seed: u64, count: usize) -> Vec<(DampingParams, FrequencyPoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let sigma = (rng.gen_range(0.05f64.ln()..2f64.ln())).exp();
            let mu = rng.gen_range(0.0..3.0);
            let omega = (rng.gen_range(0.05f64.ln()..30f64.ln())).exp();
            let p = DampingParams::new(sigma, mu).expect("valid draw");
            (p, polar_params(p, omega).expect("valid draw"))
        })
        .collect()
}

const FD8: [f64; 5] = [
    -205.0 / 72.0,
    8.0 / 5.0,
    -1.0 / 5.0,
    8.0 / 315.0,
    -1.0 / 560.0,
];

fn second_derivative(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let mut acc = FD8[0] * f(x);
    for (j, c) in FD8.iter().enumerate().skip(1) {
        let d = j as f64 * h;
        acc += c * (f(x - d) + f(x + d));
    }
    acc / (h * h)
}

/// Largest residual of the profile equations
/// `h'' - sigma w g'' + mu w g + w^2 h = 0` and
/// `g'' + sigma w h'' - mu w h + w^2 g = 0`, relative to the largest term.
pub fn ode_residual(params: DampingParams, pt: &FrequencyPoint, profile: &ProfileFn) -> f64 {
    let (sigma, mu, w) = (params.sigma(), params.mu(), pt.omega);
    let step = (0.2 / pt.root().norm()).min(0.0019);
    let h = |x: f64| profile(pt, x).0;
    let g = |x: f64| profile(pt, x).1;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for j in 0..64 {
        let x = (j as f64 + 0.5) / 64.0;
        let (hv, gv) = profile(pt, x);
        let (h2, g2) = (
            second_derivative(&h, x, step),
            second_derivative(&g, x, step),
        );
        let r1 = h2 - sigma * w * g2 + mu * w * gv + w * w * hv;
        let r2 = g2 + sigma * w * h2 - mu * w * hv + w * w * gv;
        worst = worst.max(r1.abs()).max(r2.abs());
        scale = scale
            .max(h2.abs() + (sigma * w * g2).abs() + (mu * w * gv).abs() + (w * w * hv).abs())
            .max(g2.abs() + (sigma * w * h2).abs() + (mu * w * hv).abs() + (w * w * gv).abs());
    }
    worst / scale
}

fn quad() -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_intervals: 4000,
    }
}

/// Runs all suites against the shipped profile.
pub fn run_suites(opts: &VerifyOptions) -> VerifyReport {
    run_suites_with(opts, &|pt, x| profile_unchecked(pt, x))
}

pub fn run_suites_with(opts: &VerifyOptions, profile: &ProfileFn) -> VerifyReport {
    let draws = random_draws(opts.seed, if opts.quick { 40 } else { 200 });
    let mut suites = Vec::new();

    let e: Vec<f64> = draws
        .par_iter()
        .map(|(p, pt)| ode_residual(*p, pt, profile))
        .collect();
    suites.push(suite("ode_residual", &e, 1e-6));

    let e: Vec<f64> = draws
        .iter()
        .map(|(_, pt)| {
            let (h0, g0) = profile(pt, 0.0);
            let (h1, g1) = profile(pt, 1.0);
            (h0 - 1.0).abs().max(g0.abs()).max(h1.abs()).max(g1.abs())
        })
        .collect();
    suites.push(suite("boundary_values", &e, 1e-12));

    let e: Vec<f64> = draws
        .iter()
        .map(|(p, pt)| {
            let l = pt.root();
            let w = pt.omega;
            let lhs = l * l * Complex64::new(1.0, p.sigma() * w);
            let rhs = Complex64::new(-w * w, p.mu() * w);
            (lhs - rhs).norm() / rhs.norm()
        })
        .collect();
    suites.push(suite("characteristic_root", &e, 1e-12));

    let e: Vec<f64> = draws
        .iter()
        .flat_map(|(_, pt)| {
            // x = 1 is covered by the boundary suite, where both sides vanish
            (0..16).map(move |j| {
                let x = j as f64 / 16.0;
                let (h, g) = profile(pt, x);
                let want = h.hypot(g);
                let got = amplitude_at(pt, x).unwrap_or(f64::NAN);
                rel(got, want)
            })
        })
        .collect();
    suites.push(suite("amplitude_identity", &e, 1e-10));

    // closed-form L2 statistics against quadrature of the profile
    let e: Vec<f64> = draws
        .par_iter()
        .map(|(_, pt)| {
            let st = l2_stats(pt);
            let cfg = quad();
            let hh = integrate(|x| profile(pt, x).0.powi(2), 0.0, 1.0, &cfg).value;
            let gg = integrate(|x| profile(pt, x).1.powi(2), 0.0, 1.0, &cfg).value;
            let hg = integrate(
                |x| {
                    let (h, g) = profile(pt, x);
                    h * g
                },
                0.0,
                1.0,
                &cfg,
            )
            .value;
            let scale = st.p;
            let m_err = (st.m - (st.q1 * st.q1 + st.q2 * st.q2)).abs() / (scale * scale);
            let p_err = (st.p - 0.5 * (hh + gg)).abs() / scale;
            let q1_err = (st.q1 - 0.5 * (gg - hh)).abs() / scale;
            let q2_err = (st.q2 - hg).abs() / scale;
            m_err.max(p_err).max(q1_err).max(q2_err)
        })
        .collect();
    suites.push(suite("l2_statistics", &e, 1e-8));

    // Parseval: (1/2) sum |H_n|^2 -> p
    let p = DampingParams::new(1.0, 0.0).expect("valid");
    let terms: Vec<f64> = (1..=10_000u32)
        .map(|n| 0.5 * modal_transfer(p, n, 1.0).norm_sqr())
        .collect();
    let target = l2_stats(&polar_params(p, 1.0).expect("valid")).p;
    suites.push(suite(
        "parseval",
        &[rel(pairwise_sum(&terms), target)],
        1e-3,
    ));

    // kernel L1 norms against the amplification constants
    let top = if opts.quick { 10 } else { 50 };
    let sets = [(2.0, 1.0), (0.5, 0.0), (0.05, 0.1)];
    let e: Vec<f64> = sets
        .par_iter()
        .flat_map_iter(|&(s, m)| {
            let p = DampingParams::new(s, m).expect("valid");
            (1..=top).map(move |n| {
                let l1 = modal_kernel_l1(p, n).unwrap_or(f64::NAN);
                let a = mode_constants(p, n)
                    .map(|c| c.amplification)
                    .unwrap_or(f64::NAN);
                rel(l1, SQRT_2 / (n as f64 * PI) * a)
            })
        })
        .collect();
    suites.push(suite("kernel_l1", &e, 1e-6));

    // sine coefficients of the profile against H_n
    let modes = if opts.quick { 8 } else { 32 };
    let duality_draws = [(1.0, 0.0, 1.0), (0.3, 0.7, 4.0), (0.05, 0.1, 3.0)];
    let e: Vec<f64> = duality_draws
        .par_iter()
        .flat_map_iter(|&(s, m, w)| {
            let p = DampingParams::new(s, m).expect("valid");
            let pt = polar_params(p, w).expect("valid");
            (1..=modes).map(move |n| {
                let npi = n as f64 * PI;
                let cfg = QuadratureConfig {
                    abs_tol: 1e-13,
                    rel_tol: 1e-12,
                    max_intervals: 4000,
                };
                let re = SQRT_2
                    * integrate(|x| profile(&pt, x).0 * (npi * x).sin(), 0.0, 1.0, &cfg).value;
                let im = SQRT_2
                    * integrate(|x| profile(&pt, x).1 * (npi * x).sin(), 0.0, 1.0, &cfg).value;
                let h = modal_transfer(p, n, w);
                (re - h.re).abs().max((im - h.im).abs())
            })
        })
        .collect();
    suites.push(suite("transfer_duality", &e, 1e-8));

    // exact values where mu sigma >= 1
    let search = FrequencySearchConfig::default();
    let mut e = Vec::new();
    let p11 = DampingParams::new(1.0, 1.0).expect("valid");
    e.push((upper_sup(p11).unwrap_or(f64::NAN) - 1.0).abs() * 1e-3);
    for &(s, m) in &[(1.0, 1.0), (0.5, 3.0), (2.0, 1.0)] {
        let p = DampingParams::new(s, m).expect("valid");
        e.push(if upper_l2(p) == INV_SQRT_3 {
            0.0
        } else {
            f64::INFINITY
        });
        match gain_bounds(p, &search) {
            Ok(b) => {
                e.push((b.lower_l2 - INV_SQRT_3).abs());
                if m * s == 1.0 {
                    e.push((b.lower_sup - 1.0).abs());
                }
            }
            Err(_) => e.push(f64::INFINITY),
        }
    }
    suites.push(suite("corollary_values", &e, 1e-6));

    // ordering invariants on a coarse grid
    let (ns, nm) = if opts.quick { (4, 4) } else { (8, 8) };
    let grid: Vec<(f64, f64)> = (0..ns)
        .flat_map(|i| {
            let sigma =
                (0.05f64.ln() + (2f64.ln() - 0.05f64.ln()) * i as f64 / (ns - 1) as f64).exp();
            (0..nm).map(move |j| (sigma, 4.0 * j as f64 / (nm - 1) as f64))
        })
        .collect();
    let e: Vec<f64> = grid
        .par_iter()
        .map(|&(s, m)| {
            let p = DampingParams::new(s, m).expect("valid");
            match gain_bounds(p, &search) {
                Ok(_) => 0.0,
                Err(_) => 1.0,
            }
        })
        .collect();
    suites.push(suite("ordering_invariants", &e, 0.0));

    VerifyReport { suites }
}
