//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//!
//! Runs sequentially (no libtest harness) so the wall-clock budgets are
//! measured without competing tests.

use std::f64::consts::{PI, SQRT_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use wavegain::cli::run_with;
use wavegain::freq_response::{
    amplitude_at, l2_stats, polar_params, profile_at, q_gain_at, sup_gain_at,
};
use wavegain::gain_bounds::{gain_bounds, mode_constants, upper_l2, FrequencySearchConfig};
use wavegain::modal::{modal_kernel_l1, modal_transfer, DisturbanceSpec};
use wavegain::numerics::pairwise_sum;
use wavegain::simulator::{fit_l2_harmonics, simulate, SimConfig};
use wavegain::verify::{ode_residual, random_draws};
use wavegain::{DampingParams, INV_SQRT_3};

type Outcome = Result<String, String>;

fn params(sigma: f64, mu: f64) -> DampingParams {
    DampingParams::new(sigma, mu).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corollaries() -> Outcome {
    let search = FrequencySearchConfig::default();
    let b = gain_bounds(params(1.0, 1.0), &search).map_err(|e| e.to_string())?;
    let u_inf = b.upper_sup.ok_or("U_inf undefined at sigma = mu = 1")?;
    ensure((u_inf - 1.0).abs() <= 1e-9, || format!("U_inf = {u_inf}"))?;
    ensure((b.lower_sup - 1.0).abs() <= 1e-6, || {
        format!("L_inf = {}", b.lower_sup)
    })?;
    let mut worst: f64 = 0.0;
    for (s, m) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5), (0.1, 40.0), (1.5, 3.0)] {
        let p = params(s, m);
        let u2 = upper_l2(p);
        ensure(u2 == INV_SQRT_3, || format!("U_2({s}, {m}) = {u2}"))?;
        let l2 = gain_bounds(p, &search).map_err(|e| e.to_string())?.lower_l2;
        worst = worst.max((l2 - INV_SQRT_3).abs());
    }
    ensure(worst <= 1e-6, || format!("|L_2 - 1/sqrt(3)| = {worst}"))?;
    Ok(format!(
        "U_inf = {u_inf}, L_inf = {}, max |L_2 - 1/sqrt(3)| = {worst:.1e}",
        b.lower_sup
    ))
}

fn frequency_identities() -> Outcome {
    let profile = |pt: &wavegain::freq_response::FrequencyPoint, x: f64| profile_at(pt, x).unwrap();
    let (mut ode, mut amp, mut bnd, mut root) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (p, pt) in random_draws(wavegain::verify::DEFAULT_SEED, 200) {
        ode = ode.max(ode_residual(p, &pt, &profile));
        for j in 0..16 {
            let x = j as f64 / 16.0;
            let (h, g) = profile(&pt, x);
            let a = amplitude_at(&pt, x).unwrap();
            amp = amp.max((a * a - (h * h + g * g)).abs() / (h * h + g * g));
        }
        let (h0, g0) = profile(&pt, 0.0);
        let (h1, g1) = profile(&pt, 1.0);
        bnd = bnd
            .max((h0 - 1.0).abs())
            .max(g0.abs())
            .max(h1.abs())
            .max(g1.abs());
        let l = pt.root();
        let w = pt.omega;
        let rhs = Complex64::new(-w * w, p.mu() * w);
        root = root.max((l * l * Complex64::new(1.0, p.sigma() * w) - rhs).norm() / rhs.norm());
    }
    ensure(ode < 1e-6, || format!("ODE residual {ode}"))?;
    ensure(amp < 1e-10, || format!("amplitude identity {amp}"))?;
    ensure(bnd < 1e-12, || format!("boundary values {bnd}"))?;
    ensure(root < 1e-12, || format!("characteristic root {root}"))?;
    Ok(format!(
        "200 draws: ode {ode:.1e}, amplitude {amp:.1e}, boundary {bnd:.1e}, root {root:.1e}"
    ))
}

fn kernel_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for (s, m) in [(2.0, 1.0), (0.5, 0.0), (0.05, 0.1)] {
        let p = params(s, m);
        for n in 1..=50 {
            let l1 = modal_kernel_l1(p, n).map_err(|e| e.to_string())?;
            let want = SQRT_2 / (n as f64 * PI)
                * mode_constants(p, n)
                    .map_err(|e| e.to_string())?
                    .amplification;
            worst = worst.max((l1 - want).abs() / want);
        }
    }
    ensure(worst < 1e-6, || format!("relative gap {worst}"))?;
    Ok(format!("150 kernels, max relative gap {worst:.1e}"))
}

fn parseval() -> Outcome {
    let p = params(1.0, 0.0);
    let terms: Vec<f64> = (1..=10_000u32)
        .map(|n| 0.5 * modal_transfer(p, n, 1.0).norm_sqr())
        .collect();
    let sum = pairwise_sum(&terms);
    let target = l2_stats(&polar_params(p, 1.0).unwrap()).p;
    let rel = (sum - target).abs() / target;
    ensure(rel < 1e-3, || format!("modal sum {sum} vs p {target}"))?;
    Ok(format!(
        "modal sum {sum:.9} vs p {target:.9} (rel {rel:.1e})"
    ))
}

fn simulation() -> Outcome {
    let p = params(1.0, 0.0);
    let cfg = SimConfig {
        n_modes: 512,
        t_final: 40.0,
        dt_output: 0.01,
        x_points: 1024,
        burn_in: 20.0,
    };
    let run = simulate(p, &DisturbanceSpec::sin(5.0), &cfg, None).map_err(|e| e.to_string())?;
    let (a, q) = (sup_gain_at(p, 5.0).unwrap(), q_gain_at(p, 5.0).unwrap());
    let es = run.empirical_gain_sup.ok_or("no sup gain")?;
    let el = run.empirical_gain_l2.ok_or("no l2 gain")?;
    let (rs, rl) = ((es - a).abs() / a, (el - q).abs() / q);
    ensure(rs <= 0.02, || format!("sup gain {es} vs {a}"))?;
    ensure(rl <= 0.02, || format!("l2 gain {el} vs {q}"))?;
    let fit = fit_l2_harmonics(&run.samples, 5.0, 20.0).map_err(|e| e.to_string())?;
    ensure(fit.relative_residual < 1e-3, || {
        format!("harmonic fit residual {}", fit.relative_residual)
    })?;
    Ok(format!(
        "sup {es:.6} vs {a:.6}, l2 {el:.6} vs {q:.6}, fit residual {:.1e}",
        fit.relative_residual
    ))
}

fn local_maxima(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    (1..ys.len() - 1)
        .filter(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1])
        .map(|i| xs[i])
        .collect()
}

fn spikes() -> Outcome {
    let n = 20_000;
    let grid: Vec<f64> = (0..n)
        .map(|i| 0.5 + 12.5 * i as f64 / (n - 1) as f64)
        .collect();
    let p = params(1e-4, 0.05);
    let lnq: Vec<f64> = grid
        .iter()
        .map(|&w| q_gain_at(p, w).unwrap().ln())
        .collect();
    let peaks = local_maxima(&grid, &lnq);
    ensure(peaks.len() >= 3, || format!("only {} maxima", peaks.len()))?;
    for w in peaks.windows(2) {
        let gap = w[1] - w[0];
        ensure((gap - PI).abs() <= 0.3, || {
            format!("spacing {gap} between {} and {}", w[0], w[1])
        })?;
    }
    let flat = params(1.0, 2.0);
    let worst = grid
        .iter()
        .map(|&w| sup_gain_at(flat, w).unwrap().ln())
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(worst <= 1e-9, || format!("max ln A = {worst}"))?;
    Ok(format!(
        "ln Q maxima at {peaks:.4?}; max ln A (sigma=1, mu=2) = {worst:.1e}"
    ))
}

fn cli_capture(args: &[&str]) -> Result<String, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(
        std::iter::once("wavegain").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    if code != 0 {
        return Err(format!(
            "{args:?} exited {code}: {}",
            String::from_utf8_lossy(&err)
        ));
    }
    Ok(String::from_utf8(out).expect("utf8"))
}

fn parse_csv(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn ordering() -> Outcome {
    let search = FrequencySearchConfig::default();
    let mut checked = 0;
    for i in 0..20 {
        let sigma = (0.02f64.ln() + (2f64.ln() - 0.02f64.ln()) * i as f64 / 19.0).exp();
        for j in 0..20 {
            let mu = 4.0 * j as f64 / 19.0;
            let b = gain_bounds(params(sigma, mu), &search).map_err(|e| e.to_string())?;
            let fail = |what: &str| format!("{what} at sigma = {sigma}, mu = {mu}: {b:?}");
            ensure(b.lower_l2 <= b.upper_l2 + 1e-9, || fail("L_2 <= U_2"))?;
            ensure(b.lower_l2 <= b.lower_sup + 1e-9, || fail("L_2 <= L_inf"))?;
            if let Some(u) = b.upper_sup {
                ensure(b.lower_sup <= u + 1e-9, || fail("L_inf <= U_inf"))?;
            }
            ensure(b.lower_l2 >= INV_SQRT_3 - 1e-6, || fail("L_2 >= 1/sqrt(3)"))?;
            ensure(b.lower_sup >= 1.0 - 1e-9, || fail("L_inf >= 1"))?;
            checked += 1;
        }
    }
    for sigma in ["1", "0.5"] {
        let csv = cli_capture(&[
            "sweep", "--sigma", sigma, "--mu-min", "0", "--mu-max", "4", "--points", "41",
        ])?;
        let rows = parse_csv(&csv);
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
        let mut prev_u2 = f64::INFINITY;
        for r in &rows {
            let (mu, l_inf, l2, u2) = (num(&r[0])?, num(&r[2])?, num(&r[5])?, num(&r[6])?);
            ensure(u2 - l2 >= -1e-9, || {
                format!("L2 width < 0 at sigma {sigma}, mu {mu}")
            })?;
            if !r[4].is_empty() {
                let u_inf = num(&r[4])?;
                ensure(u_inf - l_inf >= -1e-9, || {
                    format!("L_inf width < 0 at sigma {sigma}, mu {mu}")
                })?;
            }
            // more damping never raises the L2 upper bound
            ensure(u2 <= prev_u2 + 1e-12, || {
                format!("U_2 increases at sigma {sigma}, mu {mu}")
            })?;
            prev_u2 = u2;
            let ms = mu * num(sigma)?;
            if ms >= 1.0 {
                ensure((u2 - l2).abs() <= 1e-6, || {
                    format!("L_2 != U_2 at sigma {sigma}, mu {mu}")
                })?;
            }
            if sigma == "1" && mu == 1.0 {
                let u_inf = num(&r[4])?;
                ensure(
                    (l_inf - 1.0).abs() < 1e-6 && (u_inf - 1.0).abs() < 1e-9,
                    || format!("row at mu = 1: {r:?}"),
                )?;
            }
        }
        checked += rows.len();
    }
    Ok(format!("{checked} parameter points satisfy all orderings"))
}

fn determinism() -> Outcome {
    let bode = [
        "bode",
        "--sigma",
        "1e-4",
        "--mu",
        "0.05",
        "--omega-min",
        "0.5",
        "--omega-max",
        "13",
        "--points",
        "2000",
    ];
    let sweep = [
        "sweep", "--sigma", "0.5", "--mu-min", "0", "--mu-max", "4", "--points", "9",
    ];
    for cmd in [&bode[..], &sweep[..]] {
        let with = |t: &str| {
            let mut a = vec!["--threads", t];
            a.extend_from_slice(cmd);
            cli_capture(&a)
        };
        let (a, b, c) = (with("1")?, with("1")?, with("8")?);
        ensure(a == b, || format!("{} differs between runs", cmd[0]))?;
        ensure(a == c, || {
            format!("{} differs between 1 and 8 threads", cmd[0])
        })?;
    }
    Ok("bode and sweep byte-identical across runs and 1/8 threads".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 8] = [
        ("corollary exactness", corollaries, 10),
        ("frequency-response identities", frequency_identities, 30),
        ("kernel L1 oracle", kernel_oracle, 60),
        ("Parseval cross-route", parseval, 10),
        ("simulation vs analytic gains", simulation, 60),
        ("spike structure", spikes, 60),
        ("ordering and limit properties", ordering, 300),
        ("determinism", determinism, u64::MAX),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if elapsed > Duration::from_secs(*budget) {
                Err(format!("{d}; took {elapsed:.1?}, budget {budget} s"))
            } else {
                Ok(d)
            }
        });
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {elapsed:.2?})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}; {elapsed:.2?})", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
