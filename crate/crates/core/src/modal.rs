//! Mode-space view: the Fourier-sine coefficients
//! `y_n(t) = sqrt(2) int_0^1 u(t, x) sin(n pi x) dx` obey
//!
//! ```text
//! y_n'' + (mu + n^2 pi^2 sigma) y_n' + n^2 pi^2 y_n = sqrt(2) n pi (sigma d' + d)
//! ```
//!
//! Each mode is advanced exactly in time: closed-form homogeneous transition
//! plus the exact particular solution for sinusoidal, constant, or linear
//! forcing on the step.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gain_bounds::{classify, ModeRegime};
use crate::numerics::{integrate, pairwise_sum, QuadratureConfig};
use crate::DampingParams;

/// `ln(1e16)`: kernels are truncated where their envelope falls below 1e-16
/// of its peak.
const ENVELOPE_DECADES: f64 = 36.841_361_487_904_734;

/// Steady-state response `H_n(w)` of mode `n` to the input `d(t) = e^{iwt}`.
///
/// Requires `n >= 1` and `omega > 0`.
pub fn modal_transfer(params: DampingParams, n: u32, omega: f64) -> Complex64 {
    let npi = n as f64 * PI;
    let c = params.mu() + npi * npi * params.sigma();
    let num = Complex64::new(SQRT_2 * npi, SQRT_2 * npi * params.sigma() * omega);
    num / Complex64::new(npi * npi - omega * omega, omega * c)
}

// ---------------------------------------------------------------------------
// Disturbances

/// Boundary input `d(t)` at `x = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DisturbanceSpec {
    /// `amplitude * sin(omega t + phase)`
    Sinusoid {
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
    Constant {
        level: f64,
    },
    /// Linear interpolation between `(t, d)` knots, held constant outside.
    PiecewiseLinear {
        knots: Vec<(f64, f64)>,
    },
}

impl DisturbanceSpec {
    pub fn sin(omega: f64) -> Self {
        DisturbanceSpec::Sinusoid {
            amplitude: 1.0,
            omega,
            phase: 0.0,
        }
    }

    pub fn zero() -> Self {
        DisturbanceSpec::Constant { level: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DisturbanceSpec::Sinusoid {
                amplitude,
                omega,
                phase,
            } => {
                if !(omega.is_finite() && *omega > 0.0) {
                    return domain(format!("sinusoid omega must be positive, got {omega}"));
                }
                if !(amplitude.is_finite() && phase.is_finite()) {
                    return domain("sinusoid amplitude and phase must be finite");
                }
            }
            DisturbanceSpec::Constant { level } => {
                if !level.is_finite() {
                    return domain("constant level must be finite");
                }
            }
            DisturbanceSpec::PiecewiseLinear { knots } => {
                if knots.is_empty() {
                    return domain("piecewise-linear table needs at least one knot");
                }
                if knots.iter().any(|(t, d)| !(t.is_finite() && d.is_finite())) {
                    return domain("piecewise-linear knots must be finite");
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return domain("piecewise-linear knot times must be strictly increasing");
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            DisturbanceSpec::Sinusoid {
                amplitude,
                omega,
                phase,
            } => amplitude * (omega * t + phase).sin(),
            DisturbanceSpec::Constant { level } => *level,
            DisturbanceSpec::PiecewiseLinear { knots } => {
                let i = knots.partition_point(|k| k.0 <= t);
                if i == 0 {
                    knots[0].1
                } else if i == knots.len() {
                    knots[i - 1].1
                } else {
                    let (t0, d0) = knots[i - 1];
                    let (t1, d1) = knots[i];
                    d0 + (d1 - d0) * (t - t0) / (t1 - t0)
                }
            }
        }
    }

    /// `sup_t |d(t)|`; `0` means no disturbance.
    pub fn sup_amplitude(&self) -> f64 {
        match self {
            DisturbanceSpec::Sinusoid { amplitude, .. } => amplitude.abs(),
            DisturbanceSpec::Constant { level } => level.abs(),
            DisturbanceSpec::PiecewiseLinear { knots } => {
                knots.iter().fold(0.0, |m, k| m.max(k.1.abs()))
            }
        }
    }

    /// Knot times strictly inside `(t0, t1)`, where a step must be split.
    pub fn breakpoints_in(&self, t0: f64, t1: f64) -> Vec<f64> {
        match self {
            DisturbanceSpec::PiecewiseLinear { knots } => knots
                .iter()
                .map(|k| k.0)
                .filter(|&t| t > t0 && t < t1)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Forcing shape on `[t0, t0 + dt]`.
    pub(crate) fn shape_on(&self, t0: f64, dt: f64) -> Result<Forcing> {
        match self {
            DisturbanceSpec::Sinusoid {
                amplitude,
                omega,
                phase,
            } => Ok(Forcing::Sinusoid {
                amplitude: *amplitude,
                omega: *omega,
                phase: *phase,
            }),
            DisturbanceSpec::Constant { level } => Ok(Forcing::Affine {
                t0,
                value: *level,
                slope: 0.0,
            }),
            DisturbanceSpec::PiecewiseLinear { knots } => {
                let t1 = t0 + dt;
                if let Some(&(tk, _)) = knots.iter().find(|k| k.0 > t0 && k.0 < t1) {
                    return Err(Error::Contract(format!(
                        "knot at t = {tk} lies inside the step [{t0}, {t1}]; subdivide at knots"
                    )));
                }
                let i = knots.partition_point(|k| k.0 <= t0);
                let slope = if i == 0 || i == knots.len() {
                    0.0
                } else {
                    (knots[i].1 - knots[i - 1].1) / (knots[i].0 - knots[i - 1].0)
                };
                Ok(Forcing::Affine {
                    t0,
                    value: self.value(t0),
                    slope,
                })
            }
        }
    }
}

/// Forcing that is smooth over one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Forcing {
    Sinusoid {
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
    /// `value + slope (t - t0)`
    Affine { t0: f64, value: f64, slope: f64 },
}

// ---------------------------------------------------------------------------
// Exact stepping

/// Coefficients of one mode equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDynamics {
    pub n: u32,
    /// Input gain `sqrt(2) n pi`.
    pub gain: f64,
    /// Stiffness `n^2 pi^2`.
    pub stiffness: f64,
    /// Damping `mu + n^2 pi^2 sigma`.
    pub damping: f64,
    pub sigma: f64,
    pub regime: ModeRegime,
    params: DampingParams,
}

/// Homogeneous transition matrix, acting on `(y, y')`.
pub type Transition = [[f64; 2]; 2];

impl ModeDynamics {
    pub fn new(params: DampingParams, n: u32) -> Result<Self> {
        if n < 1 {
            return domain("mode index must be at least 1");
        }
        let npi = n as f64 * PI;
        let (_, regime) = classify(params, n);
        Ok(Self {
            n,
            gain: SQRT_2 * npi,
            stiffness: npi * npi,
            damping: params.mu() + npi * npi * params.sigma(),
            sigma: params.sigma(),
            regime,
            params,
        })
    }

    /// Slowest homogeneous decay rate.
    pub fn decay_rate(&self) -> f64 {
        let k = 0.5 * self.damping;
        match self.regime {
            ModeRegime::Overdamped { r } => self.stiffness / (k + r),
            _ => k,
        }
    }

    /// Exact homogeneous transition over `dt >= 0`.
    pub fn transition(&self, dt: f64) -> Transition {
        let k = 0.5 * self.damping;
        let w2 = self.stiffness;
        // (C + kS, S, C - kS) with C, S the even and odd fundamental solutions
        let (cps, s, cms) = match self.regime {
            ModeRegime::Overdamped { r } => {
                let slow = w2 / (k + r);
                let decay = (-slow * dt).exp();
                let e = (-2.0 * r * dt).exp();
                let g = -(-2.0 * r * dt).exp_m1() / (2.0 * r);
                let cms = if r < 0.5 * k {
                    0.5 * (1.0 + e) - k * g
                } else {
                    ((k + r) * e - slow) / (2.0 * r)
                };
                (decay * (0.5 * (1.0 + e) + k * g), decay * g, decay * cms)
            }
            ModeRegime::Critical => {
                let decay = (-k * dt).exp();
                (decay * (1.0 + k * dt), decay * dt, decay * (1.0 - k * dt))
            }
            ModeRegime::Underdamped { omega } => {
                let decay = (-k * dt).exp();
                let (sn, cs) = (omega * dt).sin_cos();
                let s = sn / omega;
                (decay * (cs + k * s), decay * s, decay * (cs - k * s))
            }
        };
        [[cps, s], [-w2 * s, cms]]
    }

    /// Particular solution `(y_p, y_p')` at absolute time `t`.
    pub(crate) fn particular(&self, forcing: &Forcing, t: f64) -> (f64, f64) {
        match *forcing {
            Forcing::Sinusoid {
                amplitude,
                omega,
                phase,
            } => {
                let h = modal_transfer(self.params, self.n, omega);
                let z = amplitude * h * Complex64::from_polar(1.0, omega * t + phase);
                (z.im, omega * z.re)
            }
            Forcing::Affine { t0, value, slope } => {
                let a1 = self.gain * slope / self.stiffness;
                let a0 =
                    (self.gain * (self.sigma * slope + value) - self.damping * a1) / self.stiffness;
                (a0 + a1 * (t - t0), a1)
            }
        }
    }

    /// Advances `(y, y')` from `t0` to `t0 + dt` under `forcing`, using the
    /// precomputed `transition(dt)`.
    pub(crate) fn advance(
        &self,
        state: (f64, f64),
        forcing: &Forcing,
        t0: f64,
        dt: f64,
        phi: &Transition,
    ) -> (f64, f64) {
        let (p0, v0) = self.particular(forcing, t0);
        let (p1, v1) = self.particular(forcing, t0 + dt);
        let (ey, ev) = (state.0 - p0, state.1 - v0);
        (
            p1 + phi[0][0] * ey + phi[0][1] * ev,
            v1 + phi[1][0] * ey + phi[1][1] * ev,
        )
    }
}

/// State of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModalState {
    pub n: u32,
    /// Time at which the state is given.
    pub t: f64,
    pub y: f64,
    pub y_dot: f64,
    /// Forced-response component: the part of `y` driven by the
    /// disturbance alone, starting from rest.
    pub g: f64,
    pub g_dot: f64,
}

impl ModalState {
    /// Initial state at `t` with coefficient data `(y, y')` and boundary
    /// value `d0 = d(t)`.
    pub fn new(params: DampingParams, n: u32, t: f64, y: f64, y_dot: f64, d0: f64) -> Self {
        // the forced component carries the instantaneous response sqrt(2) n pi sigma d(0)
        let g_dot = SQRT_2 * n as f64 * PI * params.sigma() * d0;
        Self {
            n,
            t,
            y,
            y_dot,
            g: 0.0,
            g_dot,
        }
    }

    pub fn at_rest(params: DampingParams, n: u32, t: f64, d0: f64) -> Self {
        Self::new(params, n, t, 0.0, 0.0, d0)
    }
}

/// Advances `state` by `dt` exactly. The disturbance must be sinusoidal,
/// constant, or linear on `[state.t, state.t + dt]`.
pub fn modal_step(
    state: ModalState,
    params: DampingParams,
    d: &DisturbanceSpec,
    dt: f64,
) -> Result<ModalState> {
    if !(dt.is_finite() && dt > 0.0) {
        return domain(format!("step must be positive, got {dt}"));
    }
    d.validate()?;
    let dynamics = ModeDynamics::new(params, state.n)?;
    let forcing = d.shape_on(state.t, dt)?;
    let phi = dynamics.transition(dt);
    let (y, y_dot) = dynamics.advance((state.y, state.y_dot), &forcing, state.t, dt, &phi);
    let (g, g_dot) = dynamics.advance((state.g, state.g_dot), &forcing, state.t, dt, &phi);
    Ok(ModalState {
        n: state.n,
        t: state.t + dt,
        y,
        y_dot,
        g,
        g_dot,
    })
}

// ---------------------------------------------------------------------------
// Kernels

/// Forcing kernel `k_n(tau)` with `g_n(t) = int_0^t k_n(t - s) d(s) ds`.
pub fn forcing_kernel(params: DampingParams, n: u32, tau: f64) -> f64 {
    let npi = n as f64 * PI;
    let sigma = params.sigma();
    let (k, regime) = classify(params, n);
    match regime {
        ModeRegime::Overdamped { r } => {
            let slow = npi * npi / (k + r);
            let fast = (-(k + r) * tau).exp();
            npi / (r * SQRT_2)
                * ((sigma * (k + r) - 1.0) * fast
                    + (1.0 + sigma * r - sigma * k) * (-slow * tau).exp())
        }
        ModeRegime::Critical => npi * SQRT_2 * (sigma + (1.0 - sigma * k) * tau) * (-k * tau).exp(),
        ModeRegime::Underdamped { omega } => {
            let (s, c) = (omega * tau).sin_cos();
            npi * SQRT_2 / omega * (sigma * omega * c + (1.0 - sigma * k) * s) * (-k * tau).exp()
        }
    }
}

/// Sign changes of the kernel on `(0, horizon)` plus the horizon itself.
fn kernel_pieces(params: DampingParams, n: u32) -> Vec<f64> {
    let npi = n as f64 * PI;
    let sigma = params.sigma();
    let (k, regime) = classify(params, n);
    let mut cuts = Vec::new();
    match regime {
        ModeRegime::Overdamped { r } => {
            let slow = npi * npi / (k + r);
            let horizon = ENVELOPE_DECADES / slow;
            let (p, q) = (sigma * (k + r) - 1.0, 1.0 + sigma * r - sigma * k);
            if p > 0.0 && q < 0.0 && -q < p {
                cuts.push((p / -q).ln() / (2.0 * r));
            }
            // geometric cuts resolve the fast exponential
            let fast = 1.0 / (k + r);
            let mut t = horizon;
            while t > fast {
                t *= 0.125;
                cuts.push(t);
            }
            cuts.push(horizon);
        }
        ModeRegime::Critical => {
            let horizon = (ENVELOPE_DECADES + 4.0) / k;
            if sigma * k > 1.0 {
                cuts.push(sigma / (sigma * k - 1.0));
            }
            cuts.push(horizon);
        }
        ModeRegime::Underdamped { omega } => {
            let horizon = ENVELOPE_DECADES / k;
            let phi = (sigma * omega).atan2(1.0 - sigma * k);
            let mut m = 1.0;
            loop {
                let t = (m * PI - phi) / omega;
                if t >= horizon {
                    break;
                }
                cuts.push(t);
                m += 1.0;
            }
            cuts.push(horizon);
        }
    }
    cuts.retain(|&t| t > 0.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

/// `int_0^inf |k_n(tau)| d tau`, by adaptive quadrature between the analytic
/// zeros of the kernel.
pub fn modal_kernel_l1(params: DampingParams, n: u32) -> Result<f64> {
    if n < 1 {
        return domain("mode index must be at least 1");
    }
    let cfg = QuadratureConfig {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    let cuts = kernel_pieces(params, n);
    let mut lo = 0.0;
    let mut parts = Vec::with_capacity(cuts.len());
    for &hi in &cuts {
        parts.push(integrate(|t| forcing_kernel(params, n, t).abs(), lo, hi, &cfg).value);
        lo = hi;
    }
    Ok(pairwise_sum(&parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gain_bounds::mode_constants;

    fn params(sigma: f64, mu: f64) -> DampingParams {
        DampingParams::new(sigma, mu).unwrap()
    }

    #[test]
    fn transfer_static_limit() {
        let p = params(0.7, 0.3);
        for n in 1..10 {
            let h = modal_transfer(p, n, 1e-9);
            assert!((h.re - SQRT_2 / (n as f64 * PI)).abs() < 1e-9);
            assert!(h.im.abs() < 1e-8);
        }
    }

    #[test]
    fn rest_stays_at_rest() {
        let p = params(1.0, 0.0);
        let mut s = ModalState::at_rest(p, 3, 0.0, 0.0);
        for _ in 0..50 {
            s = modal_step(s, p, &DisturbanceSpec::zero(), 0.37).unwrap();
        }
        assert_eq!((s.y, s.y_dot, s.g, s.g_dot), (0.0, 0.0, 0.0, 0.0));
    }

    fn semigroup(p: DampingParams, n: u32, d: &DisturbanceSpec) {
        let s0 = ModalState {
            n,
            t: 0.3,
            y: 0.4,
            y_dot: -1.3,
            g: 0.1,
            g_dot: 0.2,
        };
        let one = modal_step(s0, p, d, 0.8).unwrap();
        let half = modal_step(modal_step(s0, p, d, 0.4).unwrap(), p, d, 0.4).unwrap();
        let scale = 1.0 + one.y_dot.abs();
        assert!(
            (one.y - half.y).abs() < 1e-12 * scale,
            "{n} {one:?} {half:?}"
        );
        assert!((one.y_dot - half.y_dot).abs() < 1e-12 * scale * n as f64);
    }

    #[test]
    fn stepping_is_exact_in_time() {
        for (p, n) in [
            (params(0.01, 0.0), 1), // underdamped
            (params(1.0, 0.0), 1),  // overdamped
            (params(1.0, 0.0), 40), // stiff overdamped
        ] {
            semigroup(p, n, &DisturbanceSpec::zero());
            semigroup(p, n, &DisturbanceSpec::Constant { level: 0.7 });
            semigroup(
                p,
                n,
                &DisturbanceSpec::Sinusoid {
                    amplitude: 1.5,
                    omega: 2.3,
                    phase: 0.4,
                },
            );
            semigroup(
                p,
                n,
                &DisturbanceSpec::PiecewiseLinear {
                    knots: vec![(0.0, 0.0), (2.0, 1.0)],
                },
            );
        }
        let sigma = 1.5 / PI;
        let p = params(sigma, 2.0 * PI - PI * PI * sigma);
        assert_eq!(
            ModeDynamics::new(p, 1).unwrap().regime,
            ModeRegime::Critical
        );
        semigroup(
            p,
            1,
            &DisturbanceSpec::Sinusoid {
                amplitude: 1.0,
                omega: 1.0,
                phase: 0.0,
            },
        );
    }

    #[test]
    fn sinusoid_reaches_transfer_steady_state() {
        let p = params(0.3, 0.2);
        let omega = 2.0;
        let d = DisturbanceSpec::sin(omega);
        for n in [1, 2, 5] {
            let dyn_ = ModeDynamics::new(p, n).unwrap();
            let horizon = 20.0 / dyn_.decay_rate();
            let steps = (horizon / 0.5).ceil() as usize;
            let mut s = ModalState::at_rest(p, n, 0.0, 0.0);
            for _ in 0..steps {
                s = modal_step(s, p, &d, 0.5).unwrap();
            }
            let z = modal_transfer(p, n, omega) * Complex64::from_polar(1.0, omega * s.t);
            assert!((s.y - z.im).abs() < 1e-8);
            assert!((s.y_dot - omega * z.re).abs() < 1e-8);
            assert!((s.g - s.y).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_forcing_settles_at_static_coefficient() {
        let p = params(0.5, 1.0);
        let mut s = ModalState::at_rest(p, 2, 0.0, 1.0);
        for _ in 0..200 {
            s = modal_step(s, p, &DisturbanceSpec::Constant { level: 1.0 }, 0.5).unwrap();
        }
        // sqrt(2) int (1 - x) sin(n pi x) dx = sqrt(2) / (n pi)
        assert!((s.y - SQRT_2 / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn knot_inside_step_is_a_contract_error() {
        let p = params(1.0, 0.0);
        let d = DisturbanceSpec::PiecewiseLinear {
            knots: vec![(0.0, 0.0), (1.0, 1.0)],
        };
        let s = ModalState::at_rest(p, 1, 0.0, 0.0);
        assert!(matches!(modal_step(s, p, &d, 2.0), Err(Error::Contract(_))));
        assert!(modal_step(s, p, &d, 1.0).is_ok());
        let bad = DisturbanceSpec::PiecewiseLinear {
            knots: vec![(1.0, 0.0), (1.0, 1.0)],
        };
        assert!(modal_step(s, p, &bad, 0.5).is_err());
        assert!(modal_step(s, p, &DisturbanceSpec::sin(-1.0), 0.5).is_err());
    }

    #[test]
    fn piecewise_linear_values() {
        let d = DisturbanceSpec::PiecewiseLinear {
            knots: vec![(1.0, 2.0), (3.0, -2.0)],
        };
        assert_eq!(d.value(0.0), 2.0);
        assert_eq!(d.value(2.0), 0.0);
        assert_eq!(d.value(9.0), -2.0);
        assert_eq!(d.sup_amplitude(), 2.0);
        assert_eq!(d.breakpoints_in(0.0, 3.0), vec![1.0]);
    }

    #[test]
    fn kernel_l1_matches_amplification() {
        for (s, m) in [(2.0, 1.0), (0.5, 0.0), (0.05, 0.1)] {
            let p = params(s, m);
            for n in [1, 2, 3, 7, 20] {
                let l1 = modal_kernel_l1(p, n).unwrap();
                let want = SQRT_2 / (n as f64 * PI) * mode_constants(p, n).unwrap().amplification;
                assert!(
                    (l1 - want).abs() < 1e-6 * want,
                    "{s} {m} {n}: {l1} vs {want}"
                );
            }
        }
    }

    #[test]
    fn kernel_integrates_to_step_response() {
        let p = params(0.05, 0.1);
        let n = 1;
        // response to d = 1 for t >= 0 is the integral of the kernel
        let mut s = ModalState::at_rest(p, n, 0.0, 1.0);
        let step = 0.01;
        let mut integral = 0.0;
        let mut prev = forcing_kernel(p, n, 0.0);
        for i in 1..=300 {
            s = modal_step(s, p, &DisturbanceSpec::Constant { level: 1.0 }, step).unwrap();
            let cur = forcing_kernel(p, n, i as f64 * step);
            integral += 0.5 * step * (prev + cur);
            prev = cur;
        }
        assert!((s.g - integral).abs() < 1e-4, "{} {}", s.g, integral);
    }
}
