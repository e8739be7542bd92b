//! Sweeps mu at fixed sigma and writes the band between lower and upper
//! bounds as CSV, ready for plotting.
//!
//! cargo run --release --example grey_area > band.csv

use wavegain::cli::fmt_num;
use wavegain::gain_bounds::{gain_bounds, FrequencySearchConfig};
use wavegain::DampingParams;

fn main() -> wavegain::Result<()> {
    let sigma = 1.0;
    let search = FrequencySearchConfig::default();
    println!("mu,L_inf,U_inf,L_2,U_2,width_2");
    for i in 0..=20 {
        let mu = i as f64 / 10.0;
        let b = gain_bounds(DampingParams::new(sigma, mu)?, &search)?;
        let u_inf = b.upper_sup.map(fmt_num).unwrap_or_default();
        println!(
            "{},{},{u_inf},{},{},{}",
            fmt_num(mu),
            fmt_num(b.lower_sup),
            fmt_num(b.lower_l2),
            fmt_num(b.upper_l2),
            fmt_num(b.upper_l2 - b.lower_l2)
        );
    }
    Ok(())
}
