//! Empirical measures and Kolmogorov-Smirnov machinery.

use serde::{Deserialize, Serialize};

use crate::distributions::s_cdf;
use crate::error::{domain, Error, Result};
use crate::linalg::Spectrum;
use crate::radial::sample_log_radius_squared;
use crate::rng::RandomStream;
use crate::Real;

/// Minimum sample count accepted by the KS tests.
pub const MIN_KS_SAMPLES: usize = 8;

/// Atoms `(theta_j, |z_j|^{1/m})` of one scaled spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSpectrum<T> {
    /// Arguments in `[0, 2 pi)`.
    pub angles: Vec<T>,
    pub scaled_radii: Vec<T>,
    pub n: usize,
    pub m: usize,
    /// Angles were drawn i.i.d. uniform rather than computed from eigenvalues.
    pub surrogate_angles: bool,
}

impl<T: Real> ScaledSpectrum<T> {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Concatenates spectra into one pooled sample. `None` for an empty input.
    pub fn pooled(parts: &[ScaledSpectrum<T>]) -> Option<Self> {
        let first = parts.first()?;
        Some(Self {
            angles: parts
                .iter()
                .flat_map(|p| p.angles.iter().copied())
                .collect(),
            scaled_radii: parts
                .iter()
                .flat_map(|p| p.scaled_radii.iter().copied())
                .collect(),
            n: first.n,
            m: first.m,
            surrogate_angles: parts.iter().any(|p| p.surrogate_angles),
        })
    }
}

/// Maps a principal argument into `[0, 2 pi)`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let tau = T::TAU();
    let mut t = theta % tau;
    if t < T::zero() {
        t += tau;
    }
    if t >= tau {
        t = T::zero();
    }
    t
}

/// Angles and scaled radii `exp((ln|lambda| + log_scale) / m)`.
pub fn scaled_spectrum<T: Real>(spectrum: &Spectrum<T>, m: usize) -> Result<ScaledSpectrum<T>> {
    if m < 1 {
        return domain("m must be >= 1");
    }
    let mf = T::from_usize_lossy(m);
    let mut angles = Vec::with_capacity(spectrum.len());
    let mut radii = Vec::with_capacity(spectrum.len());
    for z in &spectrum.eigenvalues {
        let modulus = z.norm();
        if !(modulus > T::zero()) {
            return Err(Error::ZeroEigenvalue);
        }
        angles.push(wrap_angle(z.im.atan2(z.re)));
        radii.push(((modulus.ln() + spectrum.log_scale) / mf).exp());
    }
    Ok(ScaledSpectrum {
        angles,
        scaled_radii: radii,
        n: spectrum.len(),
        m,
        surrogate_angles: false,
    })
}

/// Right-continuous empirical CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf<T> {
    sorted: Vec<T>,
}

impl<T: Real> EmpiricalCdf<T> {
    pub fn new(samples: &[T]) -> Result<Self> {
        if samples.iter().any(|x| x.is_nan()) {
            return domain("empirical CDF samples must not be NaN");
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
        Ok(Self { sorted })
    }

    pub fn count(&self) -> usize {
        self.sorted.len()
    }

    pub fn sorted_samples(&self) -> &[T] {
        &self.sorted
    }

    /// `#{samples <= x} / count`.
    pub fn eval(&self, x: T) -> T {
        if self.sorted.is_empty() {
            return T::zero();
        }
        let k = self.sorted.partition_point(|&v| v <= x);
        T::from_usize_lossy(k) / T::from_usize_lossy(self.sorted.len())
    }
}

/// Outcome of a KS test at a fixed level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    /// `N` for one-sample tests, `N_a N_b / (N_a + N_b)` for two-sample.
    pub sample_size: f64,
    pub threshold: f64,
    pub alpha: f64,
    pub passed: bool,
}

impl KsResult {
    fn new(statistic: f64, sample_size: f64, threshold: f64, alpha: f64) -> Self {
        Self {
            statistic,
            sample_size,
            threshold,
            alpha,
            passed: statistic <= threshold,
        }
    }
}

/// Asymptotic Kolmogorov upper quantile `c(alpha)`.
pub fn kolmogorov_quantile(alpha: f64) -> f64 {
    const TABLE: [(f64, f64); 5] = [
        (0.10, 1.224),
        (0.05, 1.358),
        (0.025, 1.480),
        (0.01, 1.628),
        (0.001, 1.949),
    ];
    for (a, c) in TABLE {
        if (alpha - a).abs() < 1e-12 {
            return c;
        }
    }
    (-0.5 * (alpha / 2.0).ln()).sqrt()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("alpha must lie in (0, 1) (alpha={alpha})"));
    }
    Ok(())
}

/// Sup distance between the empirical CDF of `samples` and `cdf`.
///
/// Both one-sided gaps are taken at every distinct sample value, which
/// covers ties and the jump discontinuities of the step function.
pub fn ks_statistic<T: Real>(samples: &[T], cdf: impl Fn(T) -> T) -> Result<f64> {
    let ecdf = EmpiricalCdf::new(samples)?;
    let xs = ecdf.sorted_samples();
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let mut k = i;
        while k < xs.len() && xs[k] == xs[i] {
            k += 1;
        }
        let f = cdf(xs[i]).as_f64();
        d = d.max(k as f64 / n - f).max(f - i as f64 / n);
        i = k;
    }
    Ok(d)
}

/// One-sample KS with threshold `c(alpha)/sqrt(N)`.
pub fn ks_one_sample<T: Real>(samples: &[T], cdf: impl Fn(T) -> T, alpha: f64) -> Result<KsResult> {
    check_alpha(alpha)?;
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::TooFewSamples {
            got: samples.len(),
            need: MIN_KS_SAMPLES,
        });
    }
    let d = ks_statistic(samples, cdf)?;
    let n = samples.len() as f64;
    Ok(KsResult::new(
        d,
        n,
        kolmogorov_quantile(alpha) / n.sqrt(),
        alpha,
    ))
}

/// Sup distance between two empirical CDFs.
pub fn ks_two_sample_statistic<T: Real>(a: &[T], b: &[T]) -> Result<f64> {
    let ea = EmpiricalCdf::new(a)?;
    let eb = EmpiricalCdf::new(b)?;
    let (xa, xb) = (ea.sorted_samples(), eb.sorted_samples());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut k) = (0, 0);
    let mut d = 0.0f64;
    while i < xa.len() || k < xb.len() {
        let v = match (xa.get(i), xb.get(k)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < xa.len() && xa[i] <= v {
            i += 1;
        }
        while k < xb.len() && xb[k] <= v {
            k += 1;
        }
        d = d.max((i as f64 / na - k as f64 / nb).abs());
    }
    Ok(d)
}

/// Two-sample KS with threshold `c(alpha) sqrt((N_a + N_b)/(N_a N_b))`.
pub fn ks_two_sample<T: Real>(a: &[T], b: &[T], alpha: f64) -> Result<KsResult> {
    check_alpha(alpha)?;
    for s in [a, b] {
        if s.len() < MIN_KS_SAMPLES {
            return Err(Error::TooFewSamples {
                got: s.len(),
                need: MIN_KS_SAMPLES,
            });
        }
    }
    let d = ks_two_sample_statistic(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let eff = na * nb / (na + nb);
    Ok(KsResult::new(
        d,
        eff,
        kolmogorov_quantile(alpha) / eff.sqrt(),
        alpha,
    ))
}

/// KS of `angles / (2 pi)` against Uniform[0, 1]. Refuses surrogate angles.
pub fn angle_uniformity<T: Real>(spectrum: &ScaledSpectrum<T>, alpha: f64) -> Result<KsResult> {
    if spectrum.surrogate_angles {
        return Err(Error::SurrogateAngles);
    }
    let tau = T::TAU();
    let u: Vec<T> = spectrum.angles.iter().map(|&t| t / tau).collect();
    ks_one_sample(&u, |x| x.max(T::zero()).min(T::one()), alpha)
}

/// Per-grid-point verdict of the stochastic-ordering check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingPoint {
    pub x: f64,
    /// `P(Y_j^2 <= x)` (exact or empirical) for `j = 1..n`.
    pub cdfs: Vec<f64>,
    /// Indices `j` with `F_{j+1}(x) - F_j(x)` above the tolerance band.
    pub violations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub n: usize,
    pub m: usize,
    pub exact: bool,
    /// Allowed increase between neighbours: 0 for exact, noise band otherwise.
    pub band: f64,
    pub points: Vec<OrderingPoint>,
}

impl OrderingReport {
    pub fn violation_count(&self) -> usize {
        self.points.iter().map(|p| p.violations.len()).sum()
    }

    pub fn passed(&self) -> bool {
        self.violation_count() == 0
    }
}

/// Significance level of the Monte Carlo ordering band.
pub const ORDERING_ALPHA: f64 = 0.001;

/// Checks `P(Y_1^2 <= x) >= ... >= P(Y_n^2 <= x)` at every grid point.
///
/// `m = 1` uses the incomplete-beta CDFs with zero tolerance; `m >= 2` uses
/// empirical CDFs from `trials` draws per index and only flags increases
/// beyond the two-sample band `c(0.001) sqrt(2 / trials)`.
pub fn ordering_report(
    n: usize,
    m: usize,
    grid: &[f64],
    trials: usize,
    stream: &mut RandomStream,
) -> Result<OrderingReport> {
    if n < 2 {
        return domain("ordering needs n >= 2");
    }
    if m < 1 {
        return domain("m must be >= 1");
    }
    if grid.iter().any(|&x| !(x >= 0.0)) {
        return domain("ordering grid points must be >= 0");
    }
    let (exact, band, table) = if m == 1 {
        let mut table = Vec::with_capacity(grid.len());
        for &x in grid {
            let mut row = Vec::with_capacity(n);
            for j in 1..=n {
                row.push(s_cdf(j, n, x)?);
            }
            table.push(row);
        }
        (true, 0.0, table)
    } else {
        if trials < MIN_KS_SAMPLES {
            return Err(Error::TooFewSamples {
                got: trials,
                need: MIN_KS_SAMPLES,
            });
        }
        let ln_grid: Vec<f64> = grid.iter().map(|x| x.ln()).collect();
        let mut counts = vec![vec![0usize; n]; grid.len()];
        for _ in 0..trials {
            for j in 1..=n {
                let v: f64 = sample_log_radius_squared(j, n, m, stream)?;
                for (g, &lx) in ln_grid.iter().enumerate() {
                    if v <= lx {
                        counts[g][j - 1] += 1;
                    }
                }
            }
        }
        let t = trials as f64;
        let table = counts
            .into_iter()
            .map(|row| row.into_iter().map(|c| c as f64 / t).collect())
            .collect();
        (
            false,
            kolmogorov_quantile(ORDERING_ALPHA) * (2.0 / t).sqrt(),
            table,
        )
    };
    let points = grid
        .iter()
        .zip(table)
        .map(|(&x, cdfs)| {
            let violations = (1..n).filter(|&j| cdfs[j] - cdfs[j - 1] > band).collect();
            OrderingPoint {
                x,
                cdfs,
                violations,
            }
        })
        .collect();
    Ok(OrderingReport {
        n,
        m,
        exact,
        band,
        points,
    })
}
