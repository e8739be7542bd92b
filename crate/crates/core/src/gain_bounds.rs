//! Upper and lower bounds for the sup-norm and L2 asymptotic gains.
//!
//! * `U_inf`: small-gain bound, the infimum over `theta` of
//!   `1 / (sin(theta) (1 - p(s, theta)))`, defined when
//!   `2 < 2 mu sigma + sigma^2 pi^2`.
//! * `L_inf`: supremum over `w` of the per-frequency sup-norm gain `A(w)`.
//! * `U_2`: eigenfunction-expansion bound `G(mu, sigma)` built from the modal
//!   amplification factors `A_n`.
//! * `L_2`: supremum over `w` of the per-frequency L2 gain `Q(w)`.
//!
//! The suprema over `w` are taken on a logarithmic base grid joined with dense
//! linear windows around `w = n pi`, where the resonance spikes sit, followed
//! by golden-section refinement of the best local maxima.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::freq_response::{l2_stats, polar_params, sup_gain_detail, sup_gain_sampled};
use crate::numerics::{golden_min, refine_grid_max, refine_top_maxima, Extremum};
use crate::{DampingParams, INV_SQRT_3};

/// Ordering slack used when checking the bound invariants.
pub const ORDER_SLACK: f64 = 1e-9;

/// Relative distance from `mu + n^2 pi^2 sigma = 2 n pi` treated as critical.
pub const CRITICAL_REL_TOL: f64 = 1e-9;

const UPPER_SUP_GRID: usize = 4096;
const UPPER_SUP_TOL: f64 = 1e-10;
const REFINED_MAXIMA: usize = 64;

/// Search set used for the frequency suprema.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencySearchConfig {
    pub omega_min: f64,
    /// Upper end of the search; `None` selects `max(20 pi, 4 / sigma)`.
    pub omega_max: Option<f64>,
    /// Points of the logarithmic base grid.
    pub base_points: usize,
    pub window_half_width: f64,
    /// Points of each linear window around `n pi`.
    pub window_points: usize,
    /// Stop scanning windows after this many consecutive windows whose
    /// maximum does not exceed the running best.
    pub early_stop_windows: usize,
    /// Golden-section tolerance in `w`.
    pub refine_tol: f64,
}

impl Default for FrequencySearchConfig {
    fn default() -> Self {
        Self {
            omega_min: 1e-3,
            omega_max: None,
            base_points: 1000,
            window_half_width: 0.5,
            window_points: 257,
            early_stop_windows: 5,
            refine_tol: 1e-8,
        }
    }
}

impl FrequencySearchConfig {
    pub fn omega_max_for(&self, params: DampingParams) -> f64 {
        self.omega_max
            .unwrap_or_else(|| (20.0 * PI).max(4.0 / params.sigma()))
    }

    /// Same search with `factor` times more base-grid points.
    pub fn with_denser_base(&self, factor: usize) -> Self {
        Self {
            base_points: self.base_points * factor,
            ..*self
        }
    }

    fn validate(&self, params: DampingParams) -> Result<()> {
        let hi = self.omega_max_for(params);
        if !(self.omega_min.is_finite()
            && hi.is_finite()
            && self.omega_min > 0.0
            && self.omega_min < hi)
        {
            return domain(format!(
                "frequency search range must satisfy 0 < omega_min < omega_max, got [{}, {}]",
                self.omega_min, hi
            ));
        }
        if self.base_points < 2 || self.window_points < 2 {
            return domain("frequency search grids need at least 2 points");
        }
        if !(self.window_half_width > 0.0 && self.refine_tol > 0.0) {
            return domain("window half-width and refinement tolerance must be positive");
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// U_inf

/// Minimization problem behind the sup-norm upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupUpperBoundProblem {
    /// Shifted damping parameter `(mu sigma - 1) / sigma^2`.
    pub s: f64,
    /// Upper end `pi - sqrt(|s| - s)` of the feasible `theta` interval.
    pub theta_max: f64,
}

impl SupUpperBoundProblem {
    /// `None` when `2 < 2 mu sigma + sigma^2 pi^2` fails.
    pub fn new(params: DampingParams) -> Option<Self> {
        if !params.sup_gain_certified() {
            return None;
        }
        let sigma = params.sigma();
        let s = (params.mu_sigma() - 1.0) / (sigma * sigma);
        let theta_max = PI - (s.abs() - s).sqrt();
        (theta_max > 0.0).then_some(Self { s, theta_max })
    }

    /// `p(s, theta) = |s| / (s + (pi - theta)^2)`
    pub fn p(&self, theta: f64) -> f64 {
        let d = PI - theta;
        self.s.abs() / (self.s + d * d)
    }

    /// `1 / (sin(theta) (1 - p(s, theta)))`
    pub fn objective(&self, theta: f64) -> f64 {
        1.0 / (theta.sin() * (1.0 - self.p(theta)))
    }

    /// Infimum over `(0, theta_max)`: interior grid, then golden-section
    /// refinement of every grid-local minimum.
    pub fn minimize(&self) -> Extremum {
        let n = UPPER_SUP_GRID;
        let thetas: Vec<f64> = (1..=n)
            .map(|i| self.theta_max * i as f64 / (n + 1) as f64)
            .collect();
        let neg: Vec<f64> = thetas.iter().map(|&t| -self.objective(t)).collect();
        let best = refine_grid_max(|t| -self.objective(t), &thetas, &neg, UPPER_SUP_TOL);
        // one more pass on the winning bracket, since refine_grid_max clips
        // endpoint brackets to the sampled range
        let step = self.theta_max / (n + 1) as f64;
        let lo = (best.x - step).max(0.5 * step);
        let hi = (best.x + step).min(self.theta_max - 0.5 * step);
        let polish = golden_min(|t| self.objective(t), lo, hi, UPPER_SUP_TOL);
        let best = Extremum {
            x: best.x,
            value: -best.value,
        };
        if polish.value < best.value {
            polish
        } else {
            best
        }
    }
}

/// Sup-norm upper bound `U_inf`, or `None` where it is not established.
pub fn upper_sup(params: DampingParams) -> Option<f64> {
    SupUpperBoundProblem::new(params).map(|p| p.minimize().value)
}

// ---------------------------------------------------------------------------
// Lower bounds over frequency

/// Result of a frequency supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    /// Maximizing frequency; `None` means the `w -> 0` limit won.
    pub argmax_omega: Option<f64>,
    /// `true` when the value bounds the true gain only if a finite sup-norm
    /// gain exists (always `false` for the L2 bound).
    pub conditional: bool,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * step })
        .collect()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    let step = (l1 - l0) / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (l0 + i as f64 * step).exp(),
        })
        .collect()
}

fn sample(objective: &(impl Fn(f64) -> f64 + Sync), omegas: Vec<f64>) -> Vec<(f64, f64)> {
    omegas.into_par_iter().map(|w| (w, objective(w))).collect()
}

/// Spike-aware supremum of `objective` over the search set, with the `w -> 0`
/// limit `limit_value` always a candidate. The grid is sampled with `scan`, a
/// cheaper under-estimate of `objective`; peaks are refined with `objective`.
pub fn frequency_supremum(
    objective: impl Fn(f64) -> f64 + Sync,
    scan: impl Fn(f64) -> f64 + Sync,
    limit_value: f64,
    params: DampingParams,
    cfg: &FrequencySearchConfig,
) -> Result<Extremum> {
    cfg.validate(params)?;
    let (lo, hi) = (cfg.omega_min, cfg.omega_max_for(params));
    let mut samples = sample(&scan, logspace(lo, hi, cfg.base_points));
    let mut running = samples.iter().fold(limit_value, |m, s| m.max(s.1));

    let windows = (hi / PI).ceil() as usize;
    let mut low_streak = 0;
    for n in 1..=windows {
        let center = n as f64 * PI;
        let wlo = (center - cfg.window_half_width).max(lo);
        let whi = (center + cfg.window_half_width).min(hi);
        if wlo >= whi {
            continue;
        }
        let chunk = sample(&scan, linspace(wlo, whi, cfg.window_points));
        let window_max = chunk.iter().fold(f64::NEG_INFINITY, |m, s| m.max(s.1));
        samples.extend(chunk);
        if window_max <= running + ORDER_SLACK {
            low_streak += 1;
            if low_streak >= cfg.early_stop_windows {
                break;
            }
        } else {
            low_streak = 0;
            running = running.max(window_max);
        }
    }

    samples.sort_by(|x, y| x.0.total_cmp(&y.0));
    samples.dedup_by(|x, y| x.0 == y.0);
    let (xs, vs): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
    let found = refine_top_maxima(&objective, &xs, &vs, cfg.refine_tol, REFINED_MAXIMA);
    // the limit candidate sits at w = 0 and so wins every tie
    let best = Extremum {
        x: 0.0,
        value: limit_value,
    }
    .max_of(found);
    Ok(best)
}

fn to_lower_bound(e: Extremum, conditional: bool) -> LowerBound {
    LowerBound {
        value: e.value,
        argmax_omega: (e.x > 0.0).then_some(e.x),
        conditional,
    }
}

fn sup_objective(params: DampingParams) -> impl Fn(f64) -> f64 + Sync {
    move |w| {
        polar_params(params, w)
            .map(|pt| sup_gain_detail(&pt).value)
            .unwrap_or(f64::NAN)
    }
}

fn sup_scan(params: DampingParams) -> impl Fn(f64) -> f64 + Sync {
    move |w| {
        polar_params(params, w)
            .map(|pt| sup_gain_sampled(&pt))
            .unwrap_or(f64::NAN)
    }
}

fn l2_objective(params: DampingParams) -> impl Fn(f64) -> f64 + Sync {
    move |w| {
        polar_params(params, w)
            .map(|pt| l2_stats(&pt).q)
            .unwrap_or(f64::NAN)
    }
}

/// Sup-norm lower bound `L_inf = sup_w A(w)`.
pub fn lower_sup(params: DampingParams, search: &FrequencySearchConfig) -> Result<LowerBound> {
    let e = frequency_supremum(sup_objective(params), sup_scan(params), 1.0, params, search)?;
    Ok(to_lower_bound(e, !params.sup_gain_certified()))
}

/// L2 lower bound `L_2 = sup_w Q(w)`.
pub fn lower_l2(params: DampingParams, search: &FrequencySearchConfig) -> Result<LowerBound> {
    let e = frequency_supremum(
        l2_objective(params),
        l2_objective(params),
        INV_SQRT_3,
        params,
        search,
    )?;
    Ok(to_lower_bound(e, false))
}

// ---------------------------------------------------------------------------
// Modal amplification factors and U_2

/// Damping regime of mode `n`, by the sign of `(mu + n^2 pi^2 sigma) - 2 n pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModeRegime {
    /// Real roots `-k +- r`.
    Overdamped {
        r: f64,
    },
    Critical,
    /// Complex roots `-k +- i omega`.
    Underdamped {
        omega: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeConstants {
    pub n: u32,
    /// Half the modal damping, `(mu + n^2 pi^2 sigma) / 2`.
    pub k: f64,
    pub regime: ModeRegime,
    /// Exponent of the overdamped sign-changing factor, when that formula is used.
    pub beta: Option<f64>,
    /// Kernel L1 amplification factor `A_n >= 1`.
    pub amplification: f64,
}

impl ModeConstants {
    /// Slowest homogeneous decay rate of the mode.
    pub fn decay_rate(&self) -> f64 {
        match self.regime {
            ModeRegime::Overdamped { r } => {
                let w2 = (self.n as f64 * PI).powi(2);
                w2 / (self.k + r)
            }
            _ => self.k,
        }
    }
}

pub(crate) fn classify(params: DampingParams, n: u32) -> (f64, ModeRegime) {
    let npi = n as f64 * PI;
    let c = params.mu() + npi * npi * params.sigma();
    let two = 2.0 * npi;
    let k = 0.5 * c;
    let regime = if ((c - two) / two).abs() < CRITICAL_REL_TOL {
        ModeRegime::Critical
    } else if c > two {
        ModeRegime::Overdamped {
            r: 0.5 * ((c - two) * (c + two)).sqrt(),
        }
    } else {
        ModeRegime::Underdamped {
            omega: 0.5 * ((two - c) * (two + c)).sqrt(),
        }
    };
    (k, regime)
}

/// Regime, constants, and amplification factor `A_n` of mode `n >= 1`.
pub fn mode_constants(params: DampingParams, n: u32) -> Result<ModeConstants> {
    if n < 1 {
        return domain("mode index must be at least 1");
    }
    let (sigma, mu) = (params.sigma(), params.mu());
    let ms = params.mu_sigma();
    let npi = n as f64 * PI;
    let (k, regime) = classify(params, n);
    let c = 2.0 * k;
    let mut beta = None;
    let amplification = if ms >= 1.0 {
        // kernel never changes sign
        1.0
    } else {
        let root = (1.0 - ms).sqrt();
        match regime {
            ModeRegime::Critical => {
                if npi * sigma > 1.0 {
                    1.0 + 2.0 * root * (-1.0 - 1.0 / root).exp()
                } else {
                    1.0
                }
            }
            ModeRegime::Overdamped { r } => {
                if npi * sigma < 1.0 {
                    1.0
                } else {
                    // 2 beta sqrt(1 - mu sigma) / (sigma c (1 + beta) - 2 beta)
                    // equals sqrt(1 - mu sigma) / (sigma (k + r) - 1)
                    let b = k / r;
                    beta = Some(b);
                    let v = sigma * (k + r) - 1.0;
                    if v <= 0.0 {
                        1.0
                    } else {
                        1.0 + 2.0 * root * (b * (root / v).ln()).exp()
                    }
                }
            }
            ModeRegime::Underdamped { .. } => {
                let w = ((2.0 * npi - c) * (2.0 * npi + c)).sqrt();
                let arg = ((2.0 - sigma * mu - npi * npi * sigma * sigma) / (2.0 * root))
                    .clamp(-1.0, 1.0);
                let ratio = c / w;
                // exp(ratio acos(arg)) / (exp(ratio pi) - 1), rearranged to avoid overflow
                let num = (ratio * (arg.acos() - PI)).exp();
                let den = -(-ratio * PI).exp_m1();
                1.0 + 2.0 * root * num / den
            }
        }
    };
    Ok(ModeConstants {
        n,
        k,
        regime,
        beta,
        amplification,
    })
}

/// L2 upper bound together with its series truncation data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperL2 {
    pub value: f64,
    /// Number of explicitly summed modes (0 on the closed-form branch).
    pub terms: u64,
    /// Bound on the error of the series tail approximation in `sum n^-2 A_n^2`.
    pub truncation_bound: f64,
}

/// Largest mode index that can be underdamped, critical, or overdamped
/// without a sign-changing kernel; beyond it `A_n` decreases to 1.
fn tail_start(params: DampingParams) -> u64 {
    let ms = params.mu_sigma().min(1.0);
    ((1.0 + (1.0 - ms).sqrt()) / (PI * params.sigma())).floor() as u64 + 1
}

const AMPLIFICATION_FLOOR: f64 = 1e-12;
const TAIL_TARGET: f64 = 1e-13;
const MAX_TERMS: u64 = 200_000_000;

/// `U_2 = G(mu, sigma)`.
pub fn upper_l2(params: DampingParams) -> f64 {
    upper_l2_detail(params).value
}

pub fn upper_l2_detail(params: DampingParams) -> UpperL2 {
    if params.mu_sigma() >= 1.0 {
        return UpperL2 {
            value: INV_SQRT_3,
            terms: 0,
            truncation_bound: 0.0,
        };
    }
    upper_l2_with(params, |n| {
        mode_constants(params, n as u32)
            .expect("n >= 1")
            .amplification
    })
}

/// Series branch of `G(mu, sigma)` with the amplification factors supplied by
/// `amplification(n)`.
#[doc(hidden)]
pub fn upper_l2_with(params: DampingParams, amplification: impl Fn(u64) -> f64) -> UpperL2 {
    let start = tail_start(params);
    let mut weighted = Neumaier::default();
    let mut plain = Neumaier::default();
    let mut n: u64 = 0;
    let mut last;
    loop {
        n += 1;
        let a = amplification(n);
        let inv = 1.0 / (n as f64 * n as f64);
        weighted.add(inv * a * a);
        plain.add(inv);
        last = a;
        if n >= start {
            let tail = PI * PI / 6.0 - plain.total();
            if a - 1.0 < AMPLIFICATION_FLOOR || (a * a - 1.0) * tail < TAIL_TARGET || n >= MAX_TERMS
            {
                break;
            }
        }
    }
    let tail = (PI * PI / 6.0 - plain.total()).max(0.0);
    // A_n is nonincreasing past `start`, so the last summed factor bounds the tail
    let envelope = last.max(1.0);
    let sum = weighted.total() + tail * envelope * envelope;
    UpperL2 {
        value: (2.0 * sum).sqrt() / PI,
        terms: n,
        truncation_bound: tail * (envelope * envelope - 1.0),
    }
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

// ---------------------------------------------------------------------------
// Aggregate

/// The four bounds bracketing the sup-norm and L2 asymptotic gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainBounds {
    pub params: DampingParams,
    pub lower_sup: f64,
    /// `L_inf` is a certified lower bound only if a finite sup-norm gain
    /// exists, which is established when this flag is `false`.
    pub lower_sup_conditional: bool,
    pub upper_sup: Option<f64>,
    pub lower_l2: f64,
    pub upper_l2: f64,
    pub argmax_omega_sup: Option<f64>,
    pub argmax_omega_l2: Option<f64>,
    pub upper_l2_truncation: f64,
}

/// Computes all four bounds and checks their mutual ordering.
pub fn gain_bounds(params: DampingParams, search: &FrequencySearchConfig) -> Result<GainBounds> {
    let ((lsup, l2), (usup, u2)) = rayon::join(
        || (lower_sup(params, search), lower_l2(params, search)),
        || (upper_sup(params), upper_l2_detail(params)),
    );
    let (lsup, l2) = (lsup?, l2?);
    let bounds = GainBounds {
        params,
        lower_sup: lsup.value,
        lower_sup_conditional: lsup.conditional,
        upper_sup: usup,
        lower_l2: l2.value,
        upper_l2: u2.value,
        argmax_omega_sup: lsup.argmax_omega,
        argmax_omega_l2: l2.argmax_omega,
        upper_l2_truncation: u2.truncation_bound,
    };
    bounds.check()?;
    Ok(bounds)
}

impl GainBounds {
    /// Verifies the ordering and limit invariants.
    pub fn check(&self) -> Result<()> {
        let fail = |what: &str| {
            Err(Error::InternalConsistency(format!(
                "{what} violated for sigma = {}, mu = {}: {self:?}",
                self.params.sigma(),
                self.params.mu()
            )))
        };
        let all_finite = [self.lower_sup, self.lower_l2, self.upper_l2]
            .iter()
            .chain(self.upper_sup.as_ref())
            .all(|v| v.is_finite());
        if !all_finite {
            return fail("finiteness");
        }
        if self.lower_l2 > self.upper_l2 + ORDER_SLACK {
            return fail("L_2 <= U_2");
        }
        if let Some(u) = self.upper_sup {
            if self.lower_sup > u + ORDER_SLACK {
                return fail("L_inf <= U_inf");
            }
        }
        if self.lower_l2 > self.lower_sup + ORDER_SLACK {
            return fail("L_2 <= L_inf");
        }
        if self.lower_l2 < INV_SQRT_3 - 1e-6 {
            return fail("L_2 >= 1/sqrt(3)");
        }
        if self.lower_sup < 1.0 - ORDER_SLACK {
            return fail("L_inf >= 1");
        }
        Ok(())
    }
}
