//! Lower and upper bounds on the worst-case gains for a few dampings.

use wavegain::gain_bounds::{gain_bounds, FrequencySearchConfig};
use wavegain::DampingParams;

fn main() -> wavegain::Result<()> {
    let search = FrequencySearchConfig::default();
    println!(
        "{:>6} {:>6} {:>10} {:>10} {:>10} {:>10}",
        "sigma", "mu", "L_inf", "U_inf", "L_2", "U_2"
    );
    for (sigma, mu) in [
        (1.0, 0.0),
        (1.0, 0.5),
        (1.0, 1.0),
        (0.5, 0.0),
        (0.1, 0.0),
        (0.1, 2.0),
    ] {
        let b = gain_bounds(DampingParams::new(sigma, mu)?, &search)?;
        let u_inf = b.upper_sup.map_or("-".to_string(), |u| format!("{u:.6}"));
        // a lower sup bound is only proven when the upper bound exists
        let mark = if b.lower_sup_conditional { "*" } else { " " };
        println!(
            "{sigma:>6} {mu:>6} {:>9.6}{mark} {u_inf:>10} {:>10.6} {:>10.6}",
            b.lower_sup, b.lower_l2, b.upper_l2
        );
    }
    println!("* conditional on the sup gain being finite");
    Ok(())
}
