//! Asymptotic gains of a damped vibrating string under boundary forcing.
//!
//! The model is the wave equation on `[0, 1]` with Kelvin-Voigt damping
//! `sigma > 0` and viscous damping `mu >= 0`,
//!
//! ```text
//! u_tt = u_xx + sigma * u_txx - mu * u_t,    u(t, 0) = d(t),  u(t, 1) = 0,
//! ```
//!
//! and the quantities of interest are the disturbance-to-displacement
//! asymptotic gains in the spatial sup norm and the spatial L2 norm. The crate
//! brackets both gains between closed-form upper bounds and frequency-analysis
//! lower bounds, and checks every closed form against an independent route:
//!
//! * [`freq_response`]: exact periodic response to `d(t) = sin(wt)`, the
//!   per-frequency gains `A(w)` (sup norm) and `Q(w)` (L2 norm).
//! * [`gain_bounds`]: the four bounds `L_inf <= gamma_inf <= U_inf` and
//!   `L_2 <= gamma_2 <= U_2`, including the 1-D extremizations.
//! * [`modal`]: Fourier-sine mode equations, exact stepping, transfer
//!   functions and the kernel L1 norms behind the `A_n` factors.
//! * [`simulator`]: time-domain reconstruction of `u(t, x)` and empirical
//!   gains.
//! * [`cli`]: the `wavegain` command line (bounds, Bode sweeps, damping
//!   sweeps, simulation, cross-validation).
//!
//! ```
//! use wavegain::{DampingParams, gain_bounds::{gain_bounds, FrequencySearchConfig}};
//!
//! let params = DampingParams::new(1.0, 1.0).unwrap();
//! let bounds = gain_bounds(params, &FrequencySearchConfig::default()).unwrap();
//! assert!((bounds.upper_sup.unwrap() - 1.0).abs() < 1e-9);
//! assert!((bounds.upper_l2 - 1.0 / 3f64.sqrt()).abs() < 1e-15);
//! ```

pub mod cli;
pub mod error;
pub mod freq_response;
pub mod gain_bounds;
pub mod modal;
pub mod numerics;
pub mod simulator;
pub mod verify;

mod params;

pub use error::{Error, Result};
pub use params::DampingParams;

/// `1/sqrt(3)`, the small-frequency limit of `Q(w)` and the exact L2 gain
/// whenever `mu * sigma >= 1`.
pub const INV_SQRT_3: f64 = 0.577_350_269_189_625_8;
