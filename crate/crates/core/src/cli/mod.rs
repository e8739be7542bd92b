//! Command-line surface behind the `wavegain` binary.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.

mod config;
mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::freq_response::{l2_stats_at, sup_gain_at};
use crate::gain_bounds::{gain_bounds, FrequencySearchConfig, GainBounds};
use crate::modal::DisturbanceSpec;
use crate::simulator::{default_burn_in, simulate, SimConfig, SimResult};
use crate::verify::{run_suites, VerifyOptions};
use crate::DampingParams;

pub use output::fmt_num;

/// Environment variable holding the default number of worker threads.
pub const THREADS_ENV: &str = "WAVEGAIN_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "wavegain",
    version,
    about = "Asymptotic gain bounds for the damped wave equation with boundary disturbance"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Worker threads (default: $WAVEGAIN_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Flat `key = value` file of flag defaults; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the four gain bounds for one (sigma, mu).
    Bounds(BoundsArgs),
    /// Per-frequency gains on a frequency grid, as CSV.
    Bode(BodeArgs),
    /// Gain bounds along a mu axis at fixed sigma, as CSV.
    Sweep(SweepArgs),
    /// Time-domain modal simulation, as CSV plus a JSON sidecar.
    Simulate(SimulateArgs),
    /// Run the cross-validation suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Lower end of the frequency search.
    #[arg(long, default_value_t = 1e-3)]
    pub search_omega_min: f64,
    /// Upper end of the frequency search (default max(20 pi, 4 / sigma)).
    #[arg(long)]
    pub search_omega_max: Option<f64>,
    /// Points of the logarithmic base grid.
    #[arg(long, default_value_t = 1000)]
    pub search_points: usize,
}

impl SearchArgs {
    fn search(&self) -> FrequencySearchConfig {
        FrequencySearchConfig {
            omega_min: self.search_omega_min,
            omega_max: self.search_omega_max,
            base_points: self.search_points,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Args)]
pub struct BodeArgs {
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.5)]
    pub omega_min: f64,
    #[arg(long, default_value_t = 13.0)]
    pub omega_max: f64,
    #[arg(long, default_value_t = 2000)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Scale::Linear)]
    pub scale: Scale,
    /// Output path; `-` writes to stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 41)]
    pub points: usize,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DisturbanceKind {
    Sin,
    Constant,
    Zero,
    /// Piecewise-linear `t,d` table read from `--table`.
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub mu: f64,
    #[arg(long, value_enum, default_value_t = DisturbanceKind::Sin)]
    pub disturbance: DisturbanceKind,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phase: f64,
    #[arg(long, default_value_t = 1.0)]
    pub level: f64,
    #[arg(long, value_name = "FILE")]
    pub table: Option<PathBuf>,
    #[arg(long, default_value_t = crate::simulator::DEFAULT_MODES)]
    pub n_modes: usize,
    /// Default: twice the burn-in.
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long, default_value_t = crate::simulator::DEFAULT_DT_OUTPUT)]
    pub dt: f64,
    #[arg(long, default_value_t = crate::simulator::DEFAULT_X_POINTS)]
    pub x_points: usize,
    /// Default: 10 over the slowest modal decay rate, capped at half of t_final.
    #[arg(long)]
    pub burn_in: Option<f64>,
    /// CSV path; the sidecar goes next to it with a `.json` extension.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = crate::verify::DEFAULT_SEED)]
    pub seed: u64,
    /// Smaller draws and fewer modes.
    #[arg(long)]
    pub quick: bool,
}

/// Parses `args` (including the program name), runs the command, and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run_with(args, &mut out, &mut err)
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config::inject(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "wavegain: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "wavegain: {e}");
            match e {
                Error::InternalConsistency(_) => EXIT_VERIFY_FAILED,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(n) = flag {
        return if n == 0 {
            domain("--threads must be at least 1")
        } else {
            Ok(Some(n))
        };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => domain(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            )),
        },
        _ => Ok(None),
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(cli.threads)? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Domain(format!("cannot start thread pool: {e}")))?;
    let mut buf = Vec::new();
    let code = pool.install(|| match &cli.command {
        Command::Bounds(a) => cmd_bounds(a, &mut buf).map(|_| EXIT_OK),
        Command::Bode(a) => cmd_bode(a, &mut buf).map(|_| EXIT_OK),
        Command::Sweep(a) => cmd_sweep(a, &mut buf).map(|_| EXIT_OK),
        Command::Simulate(a) => cmd_simulate(a).map(|_| EXIT_OK),
        Command::Verify(a) => cmd_verify(a, &mut buf),
    });
    out.write_all(&buf)?;
    code
}

// ---------------------------------------------------------------------------
// bounds

#[derive(Serialize)]
struct BoundsReport {
    sigma: f64,
    mu: f64,
    #[serde(rename = "L_inf")]
    l_inf: f64,
    #[serde(rename = "L_inf_conditional")]
    l_inf_conditional: bool,
    #[serde(rename = "U_inf")]
    u_inf: Option<f64>,
    #[serde(rename = "L_2")]
    l_2: f64,
    #[serde(rename = "U_2")]
    u_2: f64,
    argmax_omega_sup: Option<f64>,
    argmax_omega_l2: Option<f64>,
    u_2_truncation_bound: f64,
}

impl From<&GainBounds> for BoundsReport {
    fn from(b: &GainBounds) -> Self {
        Self {
            sigma: b.params.sigma(),
            mu: b.params.mu(),
            l_inf: b.lower_sup,
            l_inf_conditional: b.lower_sup_conditional,
            u_inf: b.upper_sup,
            l_2: b.lower_l2,
            u_2: b.upper_l2,
            argmax_omega_sup: b.argmax_omega_sup,
            argmax_omega_l2: b.argmax_omega_l2,
            u_2_truncation_bound: b.upper_l2_truncation,
        }
    }
}

pub fn cmd_bounds(args: &BoundsArgs, out: &mut dyn Write) -> Result<()> {
    let params = DampingParams::new(args.sigma, args.mu)?;
    let b = gain_bounds(params, &args.search.search())?;
    let report = BoundsReport::from(&b);
    if args.json {
        let text =
            serde_json::to_string_pretty(&report).map_err(|e| Error::Domain(e.to_string()))?;
        writeln!(out, "{text}")?;
        return Ok(());
    }
    let opt = |v: Option<f64>, none: &str| v.map(fmt_num).unwrap_or_else(|| none.to_string());
    let rows = [
        ("sigma", fmt_num(report.sigma)),
        ("mu", fmt_num(report.mu)),
        (
            "L_inf",
            if report.l_inf_conditional {
                format!(
                    "{} (conditional: finite sup-norm gain not established)",
                    fmt_num(report.l_inf)
                )
            } else {
                fmt_num(report.l_inf)
            },
        ),
        ("U_inf", opt(report.u_inf, "undefined")),
        ("L_2", fmt_num(report.l_2)),
        ("U_2", fmt_num(report.u_2)),
        ("argmax_omega_sup", opt(report.argmax_omega_sup, "0+")),
        ("argmax_omega_l2", opt(report.argmax_omega_l2, "0+")),
    ];
    for (k, v) in rows {
        writeln!(out, "{k:<17} {v}")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bode

pub const BODE_HEADER: &str = "omega,A_sup,Q_l2,ln_A_sup,ln_Q_l2";

fn check_points(points: usize) -> Result<()> {
    if points < 2 {
        return domain(format!("point count must be at least 2, got {points}"));
    }
    Ok(())
}

/// Frequency grid of a Bode sweep.
pub fn bode_grid(lo: f64, hi: f64, points: usize, scale: Scale) -> Result<Vec<f64>> {
    check_points(points)?;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return domain(format!(
            "frequency range must satisfy 0 < min < max, got [{lo}, {hi}]"
        ));
    }
    let m = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let s = i as f64 / m;
            match (i, scale) {
                (0, _) => lo,
                _ if i == points - 1 => hi,
                (_, Scale::Linear) => lo + (hi - lo) * s,
                (_, Scale::Log) => (lo.ln() + (hi.ln() - lo.ln()) * s).exp(),
            }
        })
        .collect())
}

pub fn cmd_bode(args: &BodeArgs, out: &mut dyn Write) -> Result<()> {
    let params = DampingParams::new(args.sigma, args.mu)?;
    let grid = bode_grid(args.omega_min, args.omega_max, args.points, args.scale)?;
    let rows: Vec<String> = grid
        .par_iter()
        .map(|&w| -> Result<String> {
            let a = sup_gain_at(params, w)?;
            let q = l2_stats_at(params, w)?.q;
            Ok(output::csv_row(&[w, a, q, a.ln(), q.ln()]))
        })
        .collect::<Result<_>>()?;
    output::write_csv(&args.out, BODE_HEADER, &rows, out)
}

// ---------------------------------------------------------------------------
// sweep

pub const SWEEP_HEADER: &str = "mu,sigma,L_inf,L_inf_conditional,U_inf,L_2,U_2";

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    check_points(args.points)?;
    if !(args.mu_min.is_finite()
        && args.mu_max.is_finite()
        && args.mu_min >= 0.0
        && args.mu_min < args.mu_max)
    {
        return domain(format!(
            "mu range must satisfy 0 <= mu_min < mu_max, got [{}, {}]",
            args.mu_min, args.mu_max
        ));
    }
    DampingParams::new(args.sigma, args.mu_min)?;
    let search = args.search.search();
    let m = (args.points - 1) as f64;
    let mus: Vec<f64> = (0..args.points)
        .map(|i| {
            if i == args.points - 1 {
                args.mu_max
            } else {
                args.mu_min + (args.mu_max - args.mu_min) * i as f64 / m
            }
        })
        .collect();
    let rows: Vec<String> = mus
        .par_iter()
        .map(|&mu| -> Result<String> {
            let b = gain_bounds(DampingParams::new(args.sigma, mu)?, &search)?;
            Ok([
                fmt_num(mu),
                fmt_num(args.sigma),
                fmt_num(b.lower_sup),
                (b.lower_sup_conditional as u8).to_string(),
                b.upper_sup.map(fmt_num).unwrap_or_default(),
                fmt_num(b.lower_l2),
                fmt_num(b.upper_l2),
            ]
            .join(","))
        })
        .collect::<Result<_>>()?;
    output::write_csv(&args.out, SWEEP_HEADER, &rows, out)
}

// ---------------------------------------------------------------------------
// simulate

pub const SIMULATE_HEADER: &str = "t,sup_norm,l2_norm";

/// JSON sidecar written next to the simulation CSV.
#[derive(Debug, Serialize)]
pub struct SimulationSidecar {
    pub sigma: f64,
    pub mu: f64,
    pub disturbance: DisturbanceSpec,
    pub config: SimConfig,
    pub empirical_gain_sup: Option<f64>,
    pub empirical_gain_l2: Option<f64>,
    pub truncation_tail_estimate: f64,
    /// `A(w)` and `Q(w)` for sinusoidal forcing.
    pub analytic_gain_sup: Option<f64>,
    pub analytic_gain_l2: Option<f64>,
    pub rel_err_sup: Option<f64>,
    pub rel_err_l2: Option<f64>,
}

fn read_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path)?;
    let mut knots = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let parsed = match (parts.next(), parts.next(), parts.next()) {
            (Some(t), Some(d), None) => t.parse::<f64>().ok().zip(d.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some(k) => knots.push(k),
            // tolerate one header line
            None if knots.is_empty() && i == 0 => continue,
            None => return domain(format!("{}:{}: expected `t,d`", path.display(), i + 1)),
        }
    }
    Ok(knots)
}

fn disturbance_from(args: &SimulateArgs) -> Result<DisturbanceSpec> {
    Ok(match args.disturbance {
        DisturbanceKind::Sin => DisturbanceSpec::Sinusoid {
            amplitude: args.amplitude,
            omega: args.omega,
            phase: args.phase,
        },
        DisturbanceKind::Constant => DisturbanceSpec::Constant { level: args.level },
        DisturbanceKind::Zero => DisturbanceSpec::zero(),
        DisturbanceKind::Table => {
            let path = args
                .table
                .as_ref()
                .ok_or_else(|| Error::Domain("--disturbance table needs --table".into()))?;
            DisturbanceSpec::PiecewiseLinear {
                knots: read_table(path)?,
            }
        }
    })
}

/// Simulation configuration from flags, filling unset values with defaults.
pub fn sim_config_from(args: &SimulateArgs, params: DampingParams) -> SimConfig {
    let natural = default_burn_in(params, args.n_modes.max(1));
    let t_final = args.t_final.unwrap_or(2.0 * natural);
    let burn_in = args.burn_in.unwrap_or(if natural < t_final {
        natural
    } else {
        0.5 * t_final
    });
    SimConfig {
        n_modes: args.n_modes,
        t_final,
        dt_output: args.dt,
        x_points: args.x_points,
        burn_in,
    }
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<SimResult> {
    let params = DampingParams::new(args.sigma, args.mu)?;
    let d = disturbance_from(args)?;
    let config = sim_config_from(args, params);
    let result = simulate(params, &d, &config, None)?;
    let rows: Vec<String> = result
        .samples
        .iter()
        .map(|s| output::csv_row(&[s.t, s.sup_norm, s.l2_norm]))
        .collect();
    output::write_csv(&args.out, SIMULATE_HEADER, &rows, &mut std::io::sink())?;

    let (analytic_sup, analytic_l2) = match d {
        DisturbanceSpec::Sinusoid { omega, .. } => (
            Some(sup_gain_at(params, omega)?),
            Some(l2_stats_at(params, omega)?.q),
        ),
        _ => (None, None),
    };
    let rel = |e: Option<f64>, a: Option<f64>| e.zip(a).map(|(e, a)| (e - a).abs() / a);
    let sidecar = SimulationSidecar {
        sigma: params.sigma(),
        mu: params.mu(),
        disturbance: d,
        config,
        empirical_gain_sup: result.empirical_gain_sup,
        empirical_gain_l2: result.empirical_gain_l2,
        truncation_tail_estimate: result.truncation_tail_estimate,
        analytic_gain_sup: analytic_sup,
        analytic_gain_l2: analytic_l2,
        rel_err_sup: rel(result.empirical_gain_sup, analytic_sup),
        rel_err_l2: rel(result.empirical_gain_l2, analytic_l2),
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Domain(e.to_string()))?;
    fs::write(sidecar_path(&args.out), json + "\n")?;
    Ok(result)
}

// ---------------------------------------------------------------------------
// verify

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let report = run_suites(&VerifyOptions {
        seed: args.seed,
        quick: args.quick,
    });
    write!(out, "{report}")?;
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("wavegain").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn bad_flags_exit_two() {
        assert_eq!(
            run_capture(&["bounds", "--sigma", "x", "--mu", "0"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_capture(&["bounds", "--mu", "0"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["nope"]).0, EXIT_USAGE);
        assert_eq!(
            run_capture(&["bounds", "--sigma", "-1", "--mu", "0"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn bode_grid_shapes() {
        let g = bode_grid(1.0, 100.0, 3, Scale::Log).unwrap();
        assert_eq!(g[0], 1.0);
        assert_eq!(g[2], 100.0);
        assert!((g[1] - 10.0).abs() < 1e-12);
        assert_eq!(
            bode_grid(0.5, 13.0, 2, Scale::Linear).unwrap(),
            vec![0.5, 13.0]
        );
        assert!(bode_grid(0.5, 13.0, 1, Scale::Linear).is_err());
        assert!(bode_grid(0.0, 13.0, 5, Scale::Log).is_err());
        assert!(bode_grid(3.0, 2.0, 5, Scale::Linear).is_err());
    }

    #[test]
    fn two_point_bode_to_stdout() {
        let (code, out, _) = run_capture(&["bode", "--sigma", "1", "--mu", "2", "--points", "2"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], BODE_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0.5,1,"));
    }

    #[test]
    fn bounds_text_and_json() {
        let (code, out, _) = run_capture(&["bounds", "--sigma", "0.1", "--mu", "0", "--json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["U_inf"].is_null());
        assert_eq!(v["L_inf_conditional"], true);
        let (code, out, _) = run_capture(&["bounds", "--sigma", "1", "--mu", "1"]);
        assert_eq!(code, 0);
        assert!(
            out.contains("U_2               0.5773502691896258"),
            "{out}"
        );
    }

    #[test]
    fn unwritable_output_exits_two() {
        let (code, _, err) = run_capture(&[
            "bode",
            "--sigma",
            "1",
            "--mu",
            "0",
            "--out",
            "/nonexistent-dir/x.csv",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
    }

    #[test]
    fn zero_threads_rejected() {
        assert_eq!(
            run_capture(&["--threads", "0", "bounds", "--sigma", "1", "--mu", "1"]).0,
            EXIT_USAGE
        );
    }
}
