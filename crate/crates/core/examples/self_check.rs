//! Runs the built-in verification suites with a chosen seed.

use wavegain::verify::{run_suites, VerifyOptions, DEFAULT_SEED};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .map_or(DEFAULT_SEED, |s| s.parse().expect("seed"));
    let report = run_suites(&VerifyOptions { seed, quick: true });
    print!("{report}");
    std::process::exit(if report.passed() { 0 } else { 1 });
}
