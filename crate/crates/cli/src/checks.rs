//! The named verification checks behind `spherical verify`.
//!
//! Every check draws from its own substream of the run seed, so a check
//! gives the same numbers whether it runs alone, inside its suite, or
//! inside `all`, and regardless of the worker count.

use num_complex::Complex;
use spherical_core::distributions::{mean_eta_mc, s_cdf, s_mean_var, sample_s};
use spherical_core::ensembles::{
    sample_ginibre, sample_product, spectrum_of, EnsembleConfig, MRule,
};
use spherical_core::linalg::{eigenvalues, multiset_distance, LuFactors};
use spherical_core::parallel::map_trials;
use spherical_core::radial::{
    concentration_stat, g_n, pooled_radial_radii, radial_trials, GnMode, RadialConfig,
};
use spherical_core::rng::derive_seed;
use spherical_core::stats::{
    angle_uniformity, ks_one_sample, ks_statistic, ks_two_sample, ordering_report, scaled_spectrum,
    ScaledSpectrum,
};
use spherical_core::weightfn::{
    limit_modulus_cdf, limit_radial_cdf, polar_to_complex, w_eval, y_density,
};
use spherical_core::{Matrix64, RandomStream, Result, SquareComplexMatrix};

use crate::report::{Check, Counters};

/// Order-fixed list of check groups with their stream ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    ScalarOracle,
    PathEquivalence,
    LimitLaw,
    FixedMLaw,
    Moments,
    EtaDecay,
    Concentration,
    GnSymmetry,
    Ordering,
    Weights,
    Eigensolver,
    AngleUniformity,
}

impl Group {
    pub const ALL: [Group; 12] = [
        Group::ScalarOracle,
        Group::PathEquivalence,
        Group::LimitLaw,
        Group::FixedMLaw,
        Group::Moments,
        Group::EtaDecay,
        Group::Concentration,
        Group::GnSymmetry,
        Group::Ordering,
        Group::Weights,
        Group::Eigensolver,
        Group::AngleUniformity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Group::ScalarOracle => "scalar-spherical-oracle",
            Group::PathEquivalence => "path-equivalence",
            Group::LimitLaw => "limit-law",
            Group::FixedMLaw => "fixed-m-law",
            Group::Moments => "s-moments",
            Group::EtaDecay => "eta-decay",
            Group::Concentration => "concentration",
            Group::GnSymmetry => "g-n-symmetry",
            Group::Ordering => "stochastic-ordering",
            Group::Weights => "weight-recursion",
            Group::Eigensolver => "eigensolver",
            Group::AngleUniformity => "angle-uniformity",
        }
    }

    fn stream_id(self) -> u64 {
        Group::ALL.iter().position(|&g| g == self).unwrap() as u64
    }
}

/// Parameters shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub jobs: Option<usize>,
    /// Dimension of the limit-law check (default 500).
    pub n: Option<usize>,
    /// Trials of the limit-law check (default 50).
    pub trials: Option<usize>,
    /// Level of the KS checks that take one; defaults are per check.
    pub alpha: Option<f64>,
}

impl Settings {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            jobs: None,
            n: None,
            trials: None,
            alpha: None,
        }
    }

    fn seed_for(&self, group: Group, part: u64) -> u64 {
        derive_seed(derive_seed(self.seed, group.stream_id()), part)
    }

    fn stream(&self, group: Group, part: u64) -> RandomStream {
        RandomStream::new(self.seed_for(group, part))
    }

    fn alpha_or(&self, default: f64) -> f64 {
        self.alpha.unwrap_or(default)
    }
}

/// Runs one group; an evaluation error becomes a single failed check.
pub fn run_group(group: Group, settings: &Settings, counters: &mut Counters) -> Vec<Check> {
    let result = match group {
        Group::ScalarOracle => scalar_oracle(settings, counters),
        Group::PathEquivalence => path_equivalence(settings, counters),
        Group::LimitLaw => limit_law(settings),
        Group::FixedMLaw => fixed_m_law(settings),
        Group::Moments => moments(settings),
        Group::EtaDecay => eta_decay(settings),
        Group::Concentration => concentration(settings),
        Group::GnSymmetry => gn_symmetry(settings),
        Group::Ordering => ordering(settings),
        Group::Weights => weights(settings),
        Group::Eigensolver => eigensolver(settings),
        Group::AngleUniformity => angle_check(settings, counters),
    };
    match result {
        Ok(checks) => checks
            .into_iter()
            .map(|mut c| {
                c.name = format!("{}: {}", group.name(), c.name);
                c
            })
            .collect(),
        Err(e) => {
            counters.errors += 1;
            vec![Check::below(
                format!("{}: {e}", group.name()),
                f64::NAN,
                0.0,
            )]
        }
    }
}

/// Scaled spectra of `trials` matrix-path draws plus the resample total.
pub fn matrix_spectra(
    n: usize,
    m_rule: MRule,
    seed: u64,
    trials: usize,
    jobs: Option<usize>,
) -> Result<(Vec<ScaledSpectrum<f64>>, usize)> {
    let config = EnsembleConfig::<f64>::new(n, m_rule, seed);
    let m = config.validate()?;
    let parts = map_trials(seed, trials, jobs, |_, stream| {
        let sample = sample_product(&config, stream)?;
        let spectrum = spectrum_of(&sample)?;
        Ok((scaled_spectrum(&spectrum, m)?, sample.resample_count))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let resamples = parts.iter().map(|p| p.1).sum();
    Ok((parts.into_iter().map(|p| p.0).collect(), resamples))
}

fn pooled_radii(parts: &[ScaledSpectrum<f64>]) -> Vec<f64> {
    parts
        .iter()
        .flat_map(|p| p.scaled_radii.iter().copied())
        .collect()
}

fn scalar_oracle(s: &Settings, counters: &mut Counters) -> Result<Vec<Check>> {
    let (parts, resamples) = matrix_spectra(
        1,
        MRule::Fixed(1),
        s.seed_for(Group::ScalarOracle, 0),
        10_000,
        s.jobs,
    )?;
    counters.resamples += resamples;
    let squared: Vec<f64> = pooled_radii(&parts).iter().map(|r| r * r).collect();
    let ks = ks_one_sample(&squared, |x| x / (1.0 + x), s.alpha_or(0.05))?;
    Ok(vec![Check::ks("scalar |z|^2 vs x/(1+x), n=1 m=1", &ks)])
}

fn path_equivalence(s: &Settings, counters: &mut Counters) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (k, &(n, m)) in [(20usize, 1usize), (50, 2), (50, 5)].iter().enumerate() {
        let trials = 10_000 / n;
        let k = 2 * k as u64;
        let (parts, resamples) = matrix_spectra(
            n,
            MRule::Fixed(m),
            s.seed_for(Group::PathEquivalence, k),
            trials,
            s.jobs,
        )?;
        counters.resamples += resamples;
        let radial = RadialConfig {
            n,
            m_rule: MRule::Fixed(m),
            seed: s.seed_for(Group::PathEquivalence, k + 1),
            trials,
        };
        let a = pooled_radii(&parts);
        let b: Vec<f64> = pooled_radial_radii(&radial, s.jobs)?;
        let ks = ks_two_sample(&a, &b, s.alpha_or(0.001))?;
        checks.push(Check::ks(
            format!("matrix vs radial radii, n={n} m={m}"),
            &ks,
        ));
    }
    Ok(checks)
}

fn radial_limit_stat(
    n: usize,
    m_rule: MRule,
    seed: u64,
    trials: usize,
    jobs: Option<usize>,
) -> Result<f64> {
    let cfg = RadialConfig {
        n,
        m_rule,
        seed,
        trials,
    };
    let radii: Vec<f64> = pooled_radial_radii(&cfg, jobs)?;
    ks_statistic(&radii, limit_radial_cdf)
}

fn rule_label(rule: MRule) -> String {
    match rule {
        MRule::Fixed(m) => format!("fixed({m})"),
        MRule::EqualN => "equal-n".into(),
        MRule::CeilPow(a) => format!("pow({a})"),
    }
}

fn limit_law(s: &Settings) -> Result<Vec<Check>> {
    let n = s.n.unwrap_or(500);
    let trials = s.trials.unwrap_or(50);
    let mut checks = Vec::new();
    for (k, &rule) in [MRule::Fixed(1), MRule::Fixed(5), MRule::EqualN]
        .iter()
        .enumerate()
    {
        let k = 3 * k as u64;
        let label = rule_label(rule);
        let d = radial_limit_stat(n, rule, s.seed_for(Group::LimitLaw, k), trials, s.jobs)?;
        checks.push(Check::at_most(
            format!("KS radii vs r^2/(1+r^2), n={n} {label}"),
            d,
            0.05,
        ));
        let d200 = radial_limit_stat(200, rule, s.seed_for(Group::LimitLaw, k + 1), 50, s.jobs)?;
        let d800 = radial_limit_stat(800, rule, s.seed_for(Group::LimitLaw, k + 2), 50, s.jobs)?;
        checks.push(Check::at_most(
            format!("KS(n=800) / KS(n=200), {label}"),
            d800 / d200,
            1.2,
        ));
    }
    Ok(checks)
}

fn fixed_m_law(s: &Settings) -> Result<Vec<Check>> {
    let (n, m) = (200, 2);
    let cfg = RadialConfig {
        n,
        m_rule: MRule::Fixed(m),
        seed: s.seed_for(Group::FixedMLaw, 0),
        trials: 50,
    };
    let moduli: Vec<f64> = radial_trials::<f64>(&cfg, s.jobs)?
        .iter()
        .flat_map(|p| {
            p.angles
                .iter()
                .zip(&p.scaled_radii)
                .map(|(&t, &r)| polar_to_complex(t, r, m).norm())
        })
        .collect();
    let d = ks_statistic(&moduli, |t| limit_modulus_cdf(m, t))?;
    Ok(vec![Check::at_most(
        format!("KS |r^m e^(i theta)| vs t^(2/m)/(1+t^(2/m)), n={n} m={m}"),
        d,
        0.05,
    )])
}

fn moments(s: &Settings) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (k, &(j, n)) in [(1usize, 4usize), (2, 5), (5, 20), (10, 40)]
        .iter()
        .enumerate()
    {
        let mut stream = s.stream(Group::Moments, k as u64);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| sample_s(&mut stream, j, n))
            .collect::<Result<_>>()?;
        let len = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / len;
        let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / len;
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / len;
        let var = m2 * len / (len - 1.0);
        let want = s_mean_var::<f64>(j, n)?;
        checks.push(Check::within(
            format!("mean of s, j={j} n={n}"),
            mean,
            want.mean,
            5.0 * (var / len).sqrt(),
        ));
        checks.push(Check::within(
            format!("variance of s, j={j} n={n}"),
            var,
            want.variance,
            5.0 * ((m4 - m2 * m2) / len).sqrt(),
        ));
    }
    Ok(checks)
}

fn eta_decay(s: &Settings) -> Result<Vec<Check>> {
    let ns = [20usize, 80, 320];
    let values = ns
        .iter()
        .enumerate()
        .map(|(k, &n)| mean_eta_mc(0.5, n, 100_000, &mut s.stream(Group::EtaDecay, k as u64)))
        .collect::<Result<Vec<f64>>>()?;
    let mut checks = Vec::new();
    for k in 1..ns.len() {
        checks.push(Check::below(
            format!("mean eta, n={} vs n={}", ns[k], ns[k - 1]),
            values[k],
            values[k - 1],
        ));
    }
    checks.push(Check::below("mean eta, n=320", values[2], 0.02));
    Ok(checks)
}

fn concentration(s: &Settings) -> Result<Vec<Check>> {
    let trials = 1000;
    let root = (trials as f64).sqrt();
    let (mean200, sd200) = concentration_stat(
        0.5,
        200,
        200,
        trials,
        &mut s.stream(Group::Concentration, 0),
    )?;
    let (_, sd50) =
        concentration_stat(0.5, 50, 50, trials, &mut s.stream(Group::Concentration, 1))?;
    let (mean400, sd400) = concentration_stat(
        0.75,
        400,
        400,
        trials,
        &mut s.stream(Group::Concentration, 2),
    )?;
    Ok(vec![
        Check::within(
            "mean log Y^(2/m), x=0.5 n=200",
            mean200,
            0.0,
            5.0 * sd200 / root,
        ),
        Check::below("sd(n=200) vs sd(n=50)/1.5, x=0.5", sd200, sd50 / 1.5),
        Check::within(
            "mean log Y^(2/m), x=0.75 n=400",
            mean400,
            3f64.ln(),
            5.0 * sd400 / root,
        ),
    ])
}

fn gn_symmetry(s: &Settings) -> Result<Vec<Check>> {
    let mut stream = s.stream(Group::GnSymmetry, 0);
    let mut checks = Vec::new();
    for n in [5usize, 50, 500] {
        let g = g_n(1.0, n, 1, GnMode::Exact, &mut stream)?;
        checks.push(Check::within(
            format!("exact G_n(1), n={n} m=1"),
            g,
            0.5,
            1e-10,
        ));
    }
    let g = g_n(
        2.0,
        500,
        500,
        GnMode::MonteCarlo { trials: 20 },
        &mut stream,
    )?;
    checks.push(Check::within(
        "Monte Carlo G_n(2), n=500 m=500",
        g,
        0.8,
        0.03,
    ));
    Ok(checks)
}

fn ordering(s: &Settings) -> Result<Vec<Check>> {
    let grid = [0.1, 0.5, 1.0, 2.0, 10.0];
    let exact = ordering_report(12, 1, &grid, 0, &mut s.stream(Group::Ordering, 0))?;
    let mc = ordering_report(10, 3, &grid, 10_000, &mut s.stream(Group::Ordering, 1))?;
    Ok(vec![
        Check::at_most(
            "exact ordering violations, n=12 m=1",
            exact.violation_count() as f64,
            0.0,
        ),
        Check::at_most(
            "ordering violations beyond band, n=10 m=3",
            mc.violation_count() as f64,
            0.0,
        ),
    ])
}

fn weights(s: &Settings) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for n in [1usize, 3, 10] {
        for &y in &[0.01f64, 0.5, 1.0, 2.0, 10.0] {
            let want = (1.0 + y * y).powi(-(n as i32 + 1));
            worst = worst.max((w_eval(1, n, y)? - want).abs() / want);
        }
    }

    // histogram of sqrt(s s') against the normalized two-level density
    let mut stream = s.stream(Group::Weights, 0);
    let draws = 100_000;
    let (bins, hi) = (100usize, 5.0);
    let width = hi / bins as f64;
    let mut counts = vec![0usize; bins + 1];
    for _ in 0..draws {
        let a: f64 = sample_s(&mut stream, 1, 1)?;
        let b: f64 = sample_s(&mut stream, 1, 1)?;
        let y = (a * b).sqrt();
        counts[((y / width) as usize).min(bins)] += 1;
    }
    let edges: Vec<f64> = (1..=bins).map(|i| width * i as f64).collect();
    let table = y_density(1, 1, 2, &edges)?;
    let mut prev = 0.0;
    let mut l1 = 0.0;
    for (b, &c) in counts.iter().enumerate() {
        let cum = if b < bins { table.cdf[b] } else { 1.0 };
        l1 += (c as f64 / draws as f64 - (cum - prev)).abs();
        prev = cum;
    }

    let grid: Vec<f64> = (0..400)
        .map(|i| (-3.0 + 5.0 * i as f64 / 399.0) * std::f64::consts::LN_10)
        .map(f64::exp)
        .collect();
    let single = y_density(2, 5, 1, &grid)?;
    let mut sup = 0.0f64;
    for (&y, &c) in grid.iter().zip(&single.cdf) {
        sup = sup.max((c - s_cdf(2, 5, y * y)?).abs());
    }

    Ok(vec![
        Check::at_most("w_1 relative error vs (1+y^2)^-(n+1)", worst, 1e-12),
        Check::below("L1 histogram of sqrt(s s') vs y_density(1,1,2)", l1, 0.05),
        Check::at_most("sup |table CDF - s_cdf|, j=2 n=5 m=1", sup, 1e-4),
    ])
}

fn eigensolver(s: &Settings) -> Result<Vec<Check>> {
    let mut stream = s.stream(Group::Eigensolver, 0);
    let (mut trace_err, mut det_err) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let a: Matrix64 = sample_ginibre(8, &mut stream);
        let ev = eigenvalues(&a)?.eigenvalues;
        let sum: Complex<f64> = ev.iter().sum();
        trace_err = trace_err.max((sum - a.trace()).norm() / a.frobenius_norm());
        let prod: Complex<f64> = ev.iter().product();
        let det = LuFactors::factor(&a)?.determinant();
        det_err = det_err.max((prod - det).norm() / det.norm());
    }

    let c = |re: f64, im: f64| Complex::new(re, im);
    let cases = [
        (
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
            [c(1.0, 0.0), c(2.0, 0.0)],
        ),
        (
            vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 1.0), c(0.0, -1.0)],
        ),
        (
            vec![c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)],
            [c(1.0, 0.0), c(3.0, 0.0)],
        ),
        (
            vec![c(3.0, 1.0), c(5.0, 0.0), c(0.0, 0.0), c(3.0, 1.0)],
            [c(3.0, 1.0), c(3.0, 1.0)],
        ),
    ];
    let mut two_err = 0.0f64;
    for (entries, want) in cases {
        let ev = eigenvalues(&SquareComplexMatrix::from_row_major(entries)?)?.eigenvalues;
        two_err = two_err.max(multiset_distance(&ev, &want).unwrap_or(f64::INFINITY));
    }

    Ok(vec![
        Check::at_most(
            "max |sum(lambda) - trace| / ||A||_F, 100 x 8x8",
            trace_err,
            1e-8,
        ),
        Check::at_most("max |prod(lambda) - det| / |det|, 100 x 8x8", det_err, 1e-6),
        Check::at_most("max eigenvalue error, analytic 2x2 cases", two_err, 1e-12),
    ])
}

fn angle_check(s: &Settings, counters: &mut Counters) -> Result<Vec<Check>> {
    let (parts, resamples) = matrix_spectra(
        100,
        MRule::Fixed(2),
        s.seed_for(Group::AngleUniformity, 0),
        100,
        s.jobs,
    )?;
    counters.resamples += resamples;
    let pooled = ScaledSpectrum::pooled(&parts).expect("at least one trial");
    let ks = angle_uniformity(&pooled, s.alpha_or(0.05))?;
    Ok(vec![Check::at_most(
        "KS of pooled angles vs Uniform[0, 2 pi), n=100 m=2",
        ks.statistic,
        0.02,
    )])
}
