use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use spherical_core::ensembles::{sample_product, spectrum_of, EnsembleConfig, MRule};
use spherical_core::parallel::map_trials;
use spherical_core::radial::{radial_trials, RadialConfig};
use spherical_core::stats::scaled_spectrum;
use spherical_core::weightfn::{check_feasible, WeightFunction};

use crate::checks::{run_group, Settings};
use crate::config::{Flags, PathKind, Suite};
use crate::report::{Counters, Report};
use crate::CliError;

/// Largest dimension accepted on the matrix path.
pub const MATRIX_MAX_N: usize = 512;
/// Largest `m n^3` accepted on the matrix path.
pub const MATRIX_MAX_WORK: f64 = 1e11;

/// Shortest round-trip text of a float; exponent form only when needed.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(dir, name, &text)
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("missing {flag}")))
}

pub fn check_matrix_size(n: usize, m: usize) -> Result<(), CliError> {
    let work = m as f64 * (n as f64).powi(3);
    if n > MATRIX_MAX_N || work > MATRIX_MAX_WORK {
        return Err(CliError::Infeasible(format!(
            "matrix path is limited to n <= {MATRIX_MAX_N} and m n^3 <= {MATRIX_MAX_WORK:e} (got n={n}, m={m}); use --path radial"
        )));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SampleManifest {
    command: &'static str,
    version: &'static str,
    path: PathKind,
    n: usize,
    m_rule: MRule,
    m: usize,
    trials: usize,
    seed: u64,
    rows: usize,
    resamples: usize,
    surrogate_angles: bool,
}

pub fn sample(flags: &Flags) -> Result<(), CliError> {
    let n = require(flags.n, "--n")?;
    let m_rule = flags.m_rule()?;
    let m = m_rule.resolve(n)?;
    let trials = flags.trials.unwrap_or(1);
    let seed = flags.seed();
    let path = flags.path.unwrap_or(PathKind::Matrix);

    let mut csv =
        String::from("trial,index,re,im,theta,scaled_radius,log_scale,surrogate_angles\n");
    let mut resamples = 0;
    let mut rows = 0;
    match path {
        PathKind::Matrix => {
            check_matrix_size(n, m)?;
            let config = EnsembleConfig::<f64>::new(n, m_rule, seed);
            let draws = map_trials(seed, trials, flags.jobs, |_, stream| {
                let sample = sample_product(&config, stream)?;
                let spectrum = spectrum_of(&sample)?;
                let scaled = scaled_spectrum(&spectrum, m)?;
                Ok((spectrum, scaled, sample.resample_count))
            })
            .into_iter()
            .collect::<spherical_core::Result<Vec<_>>>()?;
            for (t, (spectrum, scaled, r)) in draws.iter().enumerate() {
                resamples += r;
                for (i, z) in spectrum.eigenvalues.iter().enumerate() {
                    let _ = writeln!(
                        csv,
                        "{t},{i},{},{},{},{},{},false",
                        fmt_f64(z.re),
                        fmt_f64(z.im),
                        fmt_f64(scaled.angles[i]),
                        fmt_f64(scaled.scaled_radii[i]),
                        fmt_f64(spectrum.log_scale)
                    );
                    rows += 1;
                }
            }
        }
        PathKind::Radial => {
            let config = RadialConfig {
                n,
                m_rule,
                seed,
                trials,
            };
            let spectra = radial_trials::<f64>(&config, flags.jobs)?;
            let mf = m as f64;
            for (t, s) in spectra.iter().enumerate() {
                for (i, (&theta, &r)) in s.angles.iter().zip(&s.scaled_radii).enumerate() {
                    // unit phase; the modulus r^m lives in log_scale
                    let _ = writeln!(
                        csv,
                        "{t},{i},{},{},{},{},{},true",
                        fmt_f64(theta.cos()),
                        fmt_f64(theta.sin()),
                        fmt_f64(theta),
                        fmt_f64(r),
                        fmt_f64(mf * r.ln())
                    );
                    rows += 1;
                }
            }
        }
    }
    let dir = flags.out_dir();
    write_file(&dir, "spectra.csv", &csv)?;
    write_json(
        &dir,
        "manifest.json",
        &SampleManifest {
            command: "sample",
            version: env!("CARGO_PKG_VERSION"),
            path,
            n,
            m_rule,
            m,
            trials,
            seed,
            rows,
            resamples,
            surrogate_angles: path == PathKind::Radial,
        },
    )?;
    Ok(())
}

/// Echo of the options that determine a verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyEcho {
    pub suite: Suite,
    pub seed: u64,
    pub n: Option<usize>,
    pub trials: Option<usize>,
    pub alpha: Option<f64>,
}

/// Runs a suite without touching the file system.
pub fn run_suite(suite: Suite, settings: &Settings) -> Report<VerifyEcho> {
    let mut counters = Counters::default();
    let checks = suite
        .groups()
        .into_iter()
        .flat_map(|g| run_group(g, settings, &mut counters))
        .collect();
    let echo = VerifyEcho {
        suite,
        seed: settings.seed,
        n: settings.n,
        trials: settings.trials,
        alpha: settings.alpha,
    };
    Report::new(suite.name(), echo, checks, counters)
}

pub fn verify(flags: &Flags) -> Result<bool, CliError> {
    let suite = flags.suite.unwrap_or(Suite::All);
    if let Some(a) = flags.alpha {
        if !(a > 0.0 && a < 1.0) {
            return Err(CliError::Config(format!(
                "--alpha must lie in (0, 1) (got {a})"
            )));
        }
    }
    let settings = Settings {
        seed: flags.seed(),
        jobs: flags.jobs,
        n: flags.n,
        trials: flags.trials,
        alpha: flags.alpha,
    };
    let start = Instant::now();
    let report = run_suite(suite, &settings);
    for c in &report.checks {
        println!("{} {}", if c.passed() { "PASS" } else { "FAIL" }, c.name);
    }
    println!(
        "{}: {} of {} checks passed",
        report.suite,
        report.checks.iter().filter(|c| c.passed()).count(),
        report.checks.len()
    );
    eprintln!("wall-clock {:.2}s", start.elapsed().as_secs_f64());
    write_json(&flags.out_dir(), "report.json", &report)?;
    Ok(report.passed)
}

#[derive(Debug, Serialize)]
struct WeightsManifest {
    command: &'static str,
    version: &'static str,
    n: usize,
    m: usize,
    j: Vec<usize>,
    y_min: f64,
    y_max: f64,
    points: usize,
    quad_tol: f64,
}

pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

pub fn weights(flags: &Flags) -> Result<(), CliError> {
    let n = require(flags.n, "--n")?;
    let m = match flags.m_rule()? {
        MRule::Fixed(m) => m,
        _ => return Err(CliError::Config("weights needs a fixed --m".into())),
    };
    check_feasible(m, n)?;
    let y_min = flags.y_min.unwrap_or(1e-4);
    let y_max = flags.y_max.unwrap_or(1e4);
    let points = flags.points.unwrap_or(2001);
    if !(y_min > 0.0 && y_max > y_min && points >= 2) {
        return Err(CliError::Config(
            "grid needs 0 < --y-min < --y-max and --points >= 2".into(),
        ));
    }
    let js = flags.j.clone().unwrap_or_else(|| (1..=n).collect());
    if let Some(&bad) = js.iter().find(|&&j| j < 1 || j > n) {
        return Err(CliError::Config(format!("--j {bad} outside 1..={n}")));
    }

    let grid = log_grid(y_min, y_max, points);
    let wf = WeightFunction::<f64>::new(m, n)?;
    let table = wf.table(&grid)?;
    let mut w_csv = String::from("y,w_value\n");
    for (&y, &w) in table.grid.iter().zip(&table.values) {
        let _ = writeln!(w_csv, "{},{}", fmt_f64(y), fmt_f64(w));
    }
    let mut d_csv = String::from("j,y,density,cdf\n");
    for &j in &js {
        let d = wf.density(j, &grid)?;
        for ((&y, &p), &c) in d.grid.iter().zip(&d.density).zip(&d.cdf) {
            let _ = writeln!(d_csv, "{j},{},{},{}", fmt_f64(y), fmt_f64(p), fmt_f64(c));
        }
    }
    let dir = flags.out_dir();
    write_file(&dir, "weights.csv", &w_csv)?;
    write_file(&dir, "y_density.csv", &d_csv)?;
    write_json(
        &dir,
        "manifest.json",
        &WeightsManifest {
            command: "weights",
            version: env!("CARGO_PKG_VERSION"),
            n,
            m,
            j: js,
            y_min,
            y_max,
            points,
            quad_tol: table.quad_tol,
        },
    )?;
    Ok(())
}
