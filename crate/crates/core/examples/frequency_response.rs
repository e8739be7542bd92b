//! Steady sinusoidal response of the string at one frequency.
//!
//! cargo run --example frequency_response -- 1.0 0.0 3.0

use wavegain::freq_response::{l2_stats, polar_params, profile_at, sup_gain_detail};
use wavegain::DampingParams;

fn main() -> wavegain::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let (sigma, mu, omega) = match args[..] {
        [s, m, w] => (s, m, w),
        _ => (1.0, 0.0, 3.0),
    };
    let pt = polar_params(DampingParams::new(sigma, mu)?, omega)?;
    let lambda = pt.root();
    println!("sigma={sigma} mu={mu} omega={omega}");
    println!("lambda = {} + {}i", lambda.re, lambda.im);

    println!("{:>6} {:>12} {:>12} {:>12}", "x", "h", "g", "|phi|");
    for j in 0..=10 {
        let x = j as f64 / 10.0;
        let (h, g) = profile_at(&pt, x)?;
        println!("{x:>6.2} {h:>12.6} {g:>12.6} {:>12.6}", h.hypot(g));
    }

    let sup = sup_gain_detail(&pt);
    let st = l2_stats(&pt);
    // sup_gain_detail reports the position as 1 - x
    println!("A(omega) = {} at x = {}", sup.value, 1.0 - sup.x);
    println!(
        "Q(omega) = {}  (p={}, q1={}, q2={})",
        st.q, st.p, st.q1, st.q2
    );
    Ok(())
}
