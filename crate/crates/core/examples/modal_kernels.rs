//! Per-mode constants and the L1 norms of the forcing kernels.

use std::f64::consts::{PI, SQRT_2};

use wavegain::gain_bounds::{mode_constants, ModeRegime};
use wavegain::modal::{forcing_kernel, modal_kernel_l1};
use wavegain::DampingParams;

fn main() -> wavegain::Result<()> {
    let p = DampingParams::new(0.3, 0.4)?;
    println!("sigma=0.3 mu=0.4");
    println!(
        "{:>3} {:>12} {:>11} {:>12} {:>12}",
        "n", "regime", "A_n", "||k_n||_1", "ratio"
    );
    for n in 1..=8 {
        let m = mode_constants(p, n)?;
        let regime = match m.regime {
            ModeRegime::Overdamped { .. } => "overdamped",
            ModeRegime::Critical => "critical",
            ModeRegime::Underdamped { .. } => "underdamped",
        };
        let l1 = modal_kernel_l1(p, n)?;
        let ratio = l1 / (SQRT_2 / (n as f64 * PI));
        println!(
            "{n:>3} {regime:>12} {:>11.8} {l1:>12.8} {ratio:>12.8}",
            m.amplification
        );
    }

    println!("\nk_1(tau):");
    for i in 0..=10 {
        let tau = i as f64 * 0.5;
        println!("{tau:>5.1} {:>12.6}", forcing_kernel(p, 1, tau));
    }
    Ok(())
}
