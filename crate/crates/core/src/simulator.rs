//! Time-domain reconstruction of `u(t, x)` from a truncated modal expansion.
//!
//! The field is reconstructed in lifted form
//!
//! ```text
//! u(t, x) = d(t) (1 - x) + sqrt(2) sum_{n <= N} (y_n(t) - sqrt(2) d(t) / (n pi)) sin(n pi x)
//! ```
//!
//! which equals the plain sine series in the limit `N -> inf` but honours the
//! boundary value `u(t, 0) = d(t)` exactly at every `N`. The lifted
//! coefficients decay like `n^-3`, so there is no Gibbs overshoot at `x = 0`.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::freq_response::{l2_stats_at, sup_gain_at};
use crate::modal::{modal_transfer, DisturbanceSpec, ModeDynamics};
use crate::numerics::sum::pairwise_sum_by;
use crate::DampingParams;

/// Discretization of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub n_modes: usize,
    pub t_final: f64,
    /// Output sampling period; the actual period is `t_final / ceil(t_final / dt_output)`.
    pub dt_output: f64,
    pub x_points: usize,
    /// Gains are measured over `t >= burn_in`.
    pub burn_in: f64,
}

pub const DEFAULT_MODES: usize = 512;
pub const DEFAULT_X_POINTS: usize = 1024;
pub const DEFAULT_DT_OUTPUT: f64 = 0.01;
pub const MIN_X_POINTS: usize = 64;

/// `10 / min_n (decay rate of mode n)` over the first `n_modes` modes.
pub fn default_burn_in(params: DampingParams, n_modes: usize) -> f64 {
    let slowest = (1..=n_modes.max(1) as u32)
        .map(|n| ModeDynamics::new(params, n).expect("n >= 1").decay_rate())
        .fold(f64::INFINITY, f64::min);
    10.0 / slowest
}

impl SimConfig {
    /// Default truncation, grids, and burn-in; `t_final` defaults to twice the burn-in.
    pub fn with_defaults(params: DampingParams, t_final: Option<f64>) -> Self {
        let burn_in = default_burn_in(params, DEFAULT_MODES);
        Self {
            n_modes: DEFAULT_MODES,
            t_final: t_final.unwrap_or(2.0 * burn_in),
            dt_output: DEFAULT_DT_OUTPUT,
            x_points: DEFAULT_X_POINTS,
            burn_in,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_modes < 1 {
            return domain("n_modes must be at least 1");
        }
        if self.x_points < MIN_X_POINTS {
            return domain(format!("x_points must be at least {MIN_X_POINTS}"));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return domain("t_final must be positive");
        }
        if !(self.dt_output.is_finite() && self.dt_output > 0.0) {
            return domain("dt_output must be positive");
        }
        if !(self.burn_in >= 0.0 && self.burn_in < self.t_final) {
            return domain(format!(
                "burn_in must satisfy 0 <= burn_in < t_final, got {} and {}",
                self.burn_in, self.t_final
            ));
        }
        Ok(())
    }

    fn output_times(&self) -> Vec<f64> {
        let steps = (self.t_final / self.dt_output - 1e-9).ceil().max(1.0) as usize;
        (0..=steps)
            .map(|i| {
                if i == steps {
                    self.t_final
                } else {
                    self.t_final * i as f64 / steps as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimSample {
    pub t: f64,
    pub sup_norm: f64,
    pub l2_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub samples: Vec<SimSample>,
    /// `max_{t >= burn_in} sup_norm / sup|d|`; `None` without disturbance.
    pub empirical_gain_sup: Option<f64>,
    pub empirical_gain_l2: Option<f64>,
    /// Bound on the steady-state sup-norm contribution of the modes beyond
    /// `n_modes`, per unit disturbance amplitude.
    pub truncation_tail_estimate: f64,
    pub config: SimConfig,
}

/// Spatial grid `x_j = j / (x_points - 1)`.
pub fn x_grid(x_points: usize) -> Vec<f64> {
    let m = (x_points - 1) as f64;
    (0..x_points).map(|j| j as f64 / m).collect()
}

/// Lifted field value at `x` from the coefficients `y_1..y_N` and the
/// boundary value `d`.
pub fn field_at(coeffs: &[f64], d: f64, x: f64) -> f64 {
    let series = pairwise_sum_by(coeffs.len(), &|i| {
        let npi = (i + 1) as f64 * PI;
        (coeffs[i] - SQRT_2 * d / npi) * (npi * x).sin()
    });
    d * (1.0 - x) + SQRT_2 * series
}

/// Composite Simpson weights on a uniform grid of `m` points over `[0, 1]`,
/// closing with a 3/8 panel when the interval count is odd.
fn simpson_weights(m: usize) -> Vec<f64> {
    let intervals = m - 1;
    let h = 1.0 / intervals as f64;
    let mut w = vec![0.0; m];
    let simpson_end = if intervals % 2 == 0 {
        intervals
    } else {
        intervals - 3
    };
    for i in (0..simpson_end).step_by(2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if simpson_end < intervals {
        let i = simpson_end;
        for (o, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
            w[i + o] += 3.0 * h / 8.0 * c;
        }
    }
    w
}

/// Per-unit-amplitude steady sup-norm contribution of the lifted modes
/// beyond `n_modes`.
fn tail_estimate(params: DampingParams, d: &DisturbanceSpec, n_modes: usize) -> f64 {
    let term: Box<dyn Fn(u32) -> f64> = match d {
        DisturbanceSpec::Sinusoid { omega, .. } => {
            let omega = *omega;
            Box::new(move |n| {
                let npi = n as f64 * PI;
                SQRT_2 * (modal_transfer(params, n, omega) - SQRT_2 / npi).norm()
            })
        }
        DisturbanceSpec::Constant { .. } => return 0.0,
        DisturbanceSpec::PiecewiseLinear { knots } => {
            let amp = d.sup_amplitude();
            if amp == 0.0 {
                return 0.0;
            }
            let slope = knots
                .windows(2)
                .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                .fold(0.0, f64::max);
            let mu = params.mu();
            // steady lifted coefficient under d' = slope is sqrt(2) n pi mu slope / (n pi)^4
            Box::new(move |n| {
                let npi = n as f64 * PI;
                2.0 * npi * mu * slope / npi.powi(4) / amp
            })
        }
    };
    let first = n_modes as u32 + 1;
    let last = first + 4 * n_modes as u32;
    let explicit = pairwise_sum_by((last - first + 1) as usize, &|i| term(first + i as u32));
    // terms decay like n^-3: sum_{m > M} C m^-3 ~ C / (2 M^2) = term(M) M / 2
    explicit + term(last) * last as f64 / 2.0
}

/// Runs the modal simulation. `initial` supplies `(y_n(0), y_n'(0))` for the
/// leading modes; missing modes start at rest.
pub fn simulate(
    params: DampingParams,
    d: &DisturbanceSpec,
    config: &SimConfig,
    initial: Option<&[(f64, f64)]>,
) -> Result<SimResult> {
    config.validate()?;
    d.validate()?;
    let times = config.output_times();
    let n_modes = config.n_modes;
    let dynamics: Vec<ModeDynamics> = (1..=n_modes as u32)
        .map(|n| ModeDynamics::new(params, n))
        .collect::<Result<_>>()?;
    let uniform = times[1] - times[0];

    // coefficient histories, one row per mode
    let histories: Vec<Vec<f64>> = dynamics
        .par_iter()
        .enumerate()
        .map(|(i, m)| -> Result<Vec<f64>> {
            let phi = m.transition(uniform);
            let mut state = initial
                .and_then(|v| v.get(i).copied())
                .unwrap_or((0.0, 0.0));
            let mut out = Vec::with_capacity(times.len());
            out.push(state.0);
            for w in times.windows(2) {
                let (t0, t1) = (w[0], w[1]);
                let cuts = d.breakpoints_in(t0, t1);
                if cuts.is_empty() && (t1 - t0 - uniform).abs() <= 1e-12 * uniform {
                    let forcing = d.shape_on(t0, t1 - t0)?;
                    state = m.advance(state, &forcing, t0, t1 - t0, &phi);
                } else {
                    let mut a = t0;
                    for b in cuts.into_iter().chain(std::iter::once(t1)) {
                        let forcing = d.shape_on(a, b - a)?;
                        state = m.advance(state, &forcing, a, b - a, &m.transition(b - a));
                        a = b;
                    }
                }
                out.push(state.0);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let xs = x_grid(config.x_points);
    // sin table laid out per x point
    let table: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| (1..=n_modes).map(|n| (n as f64 * PI * x).sin()).collect())
        .collect();
    let weights = simpson_weights(config.x_points);
    let statics: Vec<f64> = (1..=n_modes).map(|n| SQRT_2 / (n as f64 * PI)).collect();

    let samples: Vec<SimSample> = times
        .par_iter()
        .enumerate()
        .map(|(ti, &t)| {
            let dv = d.value(t);
            let lifted: Vec<f64> = (0..n_modes)
                .map(|i| histories[i][ti] - statics[i] * dv)
                .collect();
            let mut sup: f64 = 0.0;
            let mut sq = Vec::with_capacity(xs.len());
            for (j, &x) in xs.iter().enumerate() {
                let row = &table[j];
                let s = pairwise_sum_by(n_modes, &|i| lifted[i] * row[i]);
                let u = dv * (1.0 - x) + SQRT_2 * s;
                sup = sup.max(u.abs());
                sq.push(weights[j] * u * u);
            }
            let l2 = pairwise_sum_by(sq.len(), &|j| sq[j]).max(0.0).sqrt();
            SimSample {
                t,
                sup_norm: sup,
                l2_norm: l2,
            }
        })
        .collect();

    let amp = d.sup_amplitude();
    let (gain_sup, gain_l2) = if amp > 0.0 {
        let post = samples.iter().filter(|s| s.t >= config.burn_in);
        let (s, l) = post.fold((0.0f64, 0.0f64), |(s, l), x| {
            (s.max(x.sup_norm), l.max(x.l2_norm))
        });
        (Some(s / amp), Some(l / amp))
    } else {
        (None, None)
    };

    Ok(SimResult {
        samples,
        empirical_gain_sup: gain_sup,
        empirical_gain_l2: gain_l2,
        truncation_tail_estimate: tail_estimate(params, d, n_modes),
        config: *config,
    })
}

/// Least-squares fit of `l2_norm^2 = p + q1 cos(2wt) + q2 sin(2wt)` over
/// `t >= from`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicFit {
    pub p: f64,
    pub q1: f64,
    pub q2: f64,
    /// Largest absolute residual divided by `p`.
    pub relative_residual: f64,
}

pub fn fit_l2_harmonics(samples: &[SimSample], omega: f64, from: f64) -> Result<HarmonicFit> {
    let rows: Vec<([f64; 3], f64)> = samples
        .iter()
        .filter(|s| s.t >= from)
        .map(|s| {
            let (sn, cs) = (2.0 * omega * s.t).sin_cos();
            ([1.0, cs, sn], s.l2_norm * s.l2_norm)
        })
        .collect();
    if rows.len() < 3 {
        return domain("need at least 3 samples after the fit start");
    }
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (r, y) in &rows {
        for i in 0..3 {
            atb[i] += r[i] * y;
            for j in 0..3 {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    let c =
        solve3(ata, atb).ok_or_else(|| crate::Error::Domain("degenerate harmonic fit".into()))?;
    let worst = rows
        .iter()
        .map(|(r, y)| (y - (c[0] * r[0] + c[1] * r[1] + c[2] * r[2])).abs())
        .fold(0.0, f64::max);
    Ok(HarmonicFit {
        p: c[0],
        q1: c[1],
        q2: c[2],
        relative_residual: worst / c[0].abs(),
    })
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// One row of an empirical-versus-analytic gain comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainComparison {
    pub omega: f64,
    pub empirical_sup: f64,
    pub analytic_sup: f64,
    pub empirical_l2: f64,
    pub analytic_l2: f64,
    pub rel_err_sup: f64,
    pub rel_err_l2: f64,
}

/// Simulates `d = sin(wt)` for each `w` and compares against `A(w)`, `Q(w)`.
pub fn empirical_gain_sweep(
    params: DampingParams,
    omegas: &[f64],
    config: &SimConfig,
) -> Result<Vec<GainComparison>> {
    omegas
        .iter()
        .map(|&omega| {
            let run = simulate(params, &DisturbanceSpec::sin(omega), config, None)?;
            let analytic_sup = sup_gain_at(params, omega)?;
            let analytic_l2 = l2_stats_at(params, omega)?.q;
            let empirical_sup = run.empirical_gain_sup.unwrap_or(0.0);
            let empirical_l2 = run.empirical_gain_l2.unwrap_or(0.0);
            Ok(GainComparison {
                omega,
                empirical_sup,
                analytic_sup,
                empirical_l2,
                analytic_l2,
                rel_err_sup: (empirical_sup - analytic_sup).abs() / analytic_sup,
                rel_err_l2: (empirical_l2 - analytic_l2).abs() / analytic_l2,
            })
        })
        .collect()
}
