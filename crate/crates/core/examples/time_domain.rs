//! Modal simulation under a sinusoidal disturbance, compared with the
//! frequency-domain gains.

use wavegain::freq_response::{l2_stats_at, sup_gain_at};
use wavegain::modal::DisturbanceSpec;
use wavegain::simulator::{fit_l2_harmonics, simulate, SimConfig};
use wavegain::DampingParams;

fn main() -> wavegain::Result<()> {
    let p = DampingParams::new(0.5, 0.5)?;
    let omega = 2.0;
    let mut cfg = SimConfig::with_defaults(p, None);
    cfg.n_modes = 256;
    println!(
        "t_final={} burn_in={} modes={}",
        cfg.t_final, cfg.burn_in, cfg.n_modes
    );

    let run = simulate(p, &DisturbanceSpec::sin(omega), &cfg, None)?;
    for s in run.samples.iter().step_by(run.samples.len() / 10) {
        println!("t={:>8.3} sup={:.6} l2={:.6}", s.t, s.sup_norm, s.l2_norm);
    }
    let emp_sup = run.empirical_gain_sup.unwrap_or(0.0);
    let emp_l2 = run.empirical_gain_l2.unwrap_or(0.0);
    println!(
        "sup gain: simulated {emp_sup:.6}, analytic {:.6}",
        sup_gain_at(p, omega)?
    );
    println!(
        "l2 gain:  simulated {emp_l2:.6}, analytic {:.6}",
        l2_stats_at(p, omega)?.q
    );
    println!("tail estimate {:.2e}", run.truncation_tail_estimate);

    let fit = fit_l2_harmonics(&run.samples, omega, cfg.burn_in)?;
    let st = l2_stats_at(p, omega)?;
    println!(
        "||u||^2 fit   p={:.6} q1={:.6} q2={:.6}",
        fit.p, fit.q1, fit.q2
    );
    println!(
        "closed form   p={:.6} q1={:.6} q2={:.6}",
        st.p, st.q1, st.q2
    );
    Ok(())
}
