//! With light viscous damping the gains spike near multiples of pi.

use std::f64::consts::PI;

use wavegain::freq_response::{q_gain_at, sup_gain_at};
use wavegain::gain_bounds::{lower_l2, lower_sup, FrequencySearchConfig};
use wavegain::DampingParams;

fn main() -> wavegain::Result<()> {
    let p = DampingParams::new(1e-4, 0.05)?;
    let n = 2000;
    let (lo, hi) = (0.5, 13.0);
    let omegas: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let ln_q: Vec<f64> = omegas
        .iter()
        .map(|&w| q_gain_at(p, w).map(f64::ln))
        .collect::<Result<_, _>>()?;

    println!("local maxima of ln Q:");
    for i in 1..n - 1 {
        if ln_q[i] > ln_q[i - 1] && ln_q[i] >= ln_q[i + 1] {
            let w = omegas[i];
            println!(
                "  omega={w:.4} (omega/pi={:.4}) ln Q={:.4} ln A={:.4}",
                w / PI,
                ln_q[i],
                sup_gain_at(p, w)?.ln()
            );
        }
    }

    let search = FrequencySearchConfig {
        omega_max: Some(hi),
        ..Default::default()
    };
    let ls = lower_sup(p, &search)?;
    let l2 = lower_l2(p, &search)?;
    println!("L_inf={} at omega={:?}", ls.value, ls.argmax_omega);
    println!("L_2={} at omega={:?}", l2.value, l2.argmax_omega);
    Ok(())
}
