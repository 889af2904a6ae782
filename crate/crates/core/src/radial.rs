//! Eigenvalue-free sampling of the scaled moduli.
//!
//! `Y_j^2` is distributed as a product of `m` independent
//! `BetaPrime(j, n + 1 - j)` variables, so one scaled radius costs `O(m)`
//! gamma draws and a full spectrum of radii `O(nm)`. Everything is summed
//! in log space; only the final exponential is taken.

use serde::{Deserialize, Serialize};

use crate::distributions::{log_sample_s_unchecked, s_cdf};
use crate::ensembles::MRule;
use crate::error::{domain, Error, Result};
use crate::parallel::map_trials;
use crate::rng::RandomStream;
use crate::stats::ScaledSpectrum;
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialConfig {
    pub n: usize,
    pub m_rule: MRule,
    pub seed: u64,
    pub trials: usize,
}

impl RadialConfig {
    pub fn validate(&self) -> Result<usize> {
        if self.n < 1 {
            return domain("n must be >= 1");
        }
        if self.trials < 1 {
            return domain("trials must be >= 1");
        }
        self.m_rule.resolve(self.n)
    }
}

fn check(j: usize, n: usize, m: usize) -> Result<()> {
    if j < 1 || j > n {
        return domain(format!("index j={j} outside 1..={n}"));
    }
    if m < 1 {
        return domain("m must be >= 1");
    }
    Ok(())
}

/// `ln Y_j^2 = sum_l ln s_{j,l}` over `m` independent factors.
pub fn sample_log_radius_squared<T: Real>(
    j: usize,
    n: usize,
    m: usize,
    stream: &mut RandomStream,
) -> Result<T> {
    check(j, n, m)?;
    let a = T::from_usize_lossy(j);
    let b = T::from_usize_lossy(n + 1 - j);
    let mut acc = T::zero();
    for _ in 0..m {
        acc += log_sample_s_unchecked(stream, a, b);
    }
    Ok(acc)
}

/// One draw of `Y_j^{1/m}`.
pub fn sample_scaled_radius<T: Real>(
    j: usize,
    n: usize,
    m: usize,
    stream: &mut RandomStream,
) -> Result<T> {
    let ln_y2 = sample_log_radius_squared::<T>(j, n, m, stream)?;
    Ok((ln_y2 / T::from_usize_lossy(2 * m)).exp())
}

/// One radial spectrum: `n` independent scaled radii (`j = 1..n`) paired
/// with i.i.d. uniform angles. The angles are flagged as surrogate data.
pub fn sample_radial_spectrum<T: Real>(
    config: &RadialConfig,
    stream: &mut RandomStream,
) -> Result<ScaledSpectrum<T>> {
    let m = config.validate()?;
    let n = config.n;
    let mut radii = Vec::with_capacity(n);
    for j in 1..=n {
        radii.push(sample_scaled_radius(j, n, m, stream)?);
    }
    let tau = T::TAU();
    let angles = (0..n).map(|_| T::lit(stream.uniform()) * tau).collect();
    Ok(ScaledSpectrum {
        angles,
        scaled_radii: radii,
        n,
        m,
        surrogate_angles: true,
    })
}

/// Radial spectra for `config.trials` trials, trial `t` drawn from the
/// substream `(config.seed, t)`.
pub fn radial_trials<T: Real>(
    config: &RadialConfig,
    jobs: Option<usize>,
) -> Result<Vec<ScaledSpectrum<T>>> {
    config.validate()?;
    map_trials(config.seed, config.trials, jobs, |_, stream| {
        sample_radial_spectrum(config, stream)
    })
    .into_iter()
    .collect()
}

/// All scaled radii of [`radial_trials`], concatenated in trial order.
pub fn pooled_radial_radii<T: Real>(config: &RadialConfig, jobs: Option<usize>) -> Result<Vec<T>> {
    Ok(radial_trials::<T>(config, jobs)?
        .into_iter()
        .flat_map(|s| s.scaled_radii)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GnMode {
    /// Incomplete-beta evaluation; only for `m = 1`.
    Exact,
    /// Each `P(Y_j^{1/m} <= r)` estimated from this many draws.
    MonteCarlo { trials: usize },
}

/// `G_n(r) = (1/n) sum_j P(Y_j^{1/m} <= r)`.
pub fn g_n<T: Real>(
    r: T,
    n: usize,
    m: usize,
    mode: GnMode,
    stream: &mut RandomStream,
) -> Result<T> {
    if !(r > T::zero()) {
        return domain(format!("G_n needs r > 0 (r={r})"));
    }
    if n < 1 || m < 1 {
        return domain("G_n needs n >= 1 and m >= 1");
    }
    let nf = T::from_usize_lossy(n);
    match mode {
        GnMode::Exact => {
            if m != 1 {
                return Err(Error::ExactUnavailable { m });
            }
            let x = r * r;
            let mut acc = T::zero();
            for j in 1..=n {
                acc += s_cdf(j, n, x)?;
            }
            Ok(acc / nf)
        }
        GnMode::MonteCarlo { trials } => {
            if trials < 1 {
                return domain("Monte Carlo G_n needs trials >= 1");
            }
            // Y^{1/m} <= r  <=>  ln Y^2 <= 2m ln r
            let cut = T::from_usize_lossy(2 * m) * r.ln();
            let mut hits = 0usize;
            for _ in 0..trials {
                for j in 1..=n {
                    if sample_log_radius_squared::<T>(j, n, m, stream)? <= cut {
                        hits += 1;
                    }
                }
            }
            Ok(T::from_usize_lossy(hits) / (nf * T::from_usize_lossy(trials)))
        }
    }
}

/// Mean and standard deviation over `trials` draws of `ln Y_{[nx]}^{2/m}`.
pub fn concentration_stat<T: Real>(
    x: T,
    n: usize,
    m: usize,
    trials: usize,
    stream: &mut RandomStream,
) -> Result<(T, T)> {
    if !(x > T::zero() && x < T::one()) {
        return domain(format!("x must lie in (0, 1) (x={x})"));
    }
    if trials < 2 {
        return domain("concentration statistic needs trials >= 2");
    }
    let j = (x * T::from_usize_lossy(n)).floor().to_usize().unwrap_or(0);
    if j < 1 {
        return domain(format!("[nx] must be >= 1 (n={n}, x={x})"));
    }
    let mf = T::from_usize_lossy(m);
    let draws: Vec<T> = (0..trials)
        .map(|_| sample_log_radius_squared::<T>(j, n, m, stream).map(|v| v / mf))
        .collect::<Result<_>>()?;
    let k = T::from_usize_lossy(trials);
    let mean = draws.iter().copied().sum::<T>() / k;
    let var = draws.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / (k - T::one());
    Ok((mean, var.sqrt()))
}
