//! Scalar samplers (complex Gaussian, gamma, beta-prime) and the exact
//! distributional facts about `s_{j,l} ~ BetaPrime(j, n + 1 - j)`.

use num_complex::Complex;
use num_traits::{FromPrimitive, Num};

use crate::error::{domain, Result};
use crate::rng::RandomStream;
use crate::special::betainc_split;
use crate::Real;

/// Mean and variance of a scalar law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentPair<T> {
    pub mean: T,
    pub variance: T,
}

/// Standard complex normal: independent real and imaginary parts with
/// variance 1/2 each, so `E|z|^2 = 1`.
pub fn sample_std_complex_gaussian<T: Real>(stream: &mut RandomStream) -> Complex<T> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let re = stream.standard_normal() * scale;
    let im = stream.standard_normal() * scale;
    Complex::new(T::lit(re), T::lit(im))
}

/// Logarithm of a Gamma(shape, 1) draw.
///
/// Marsaglia-Tsang squeeze for `shape >= 1`; smaller shapes are boosted
/// through `G(a) = G(a + 1) U^{1/a}`. The log is formed directly from the
/// acceptance variables, never by exponentiating first.
pub fn sample_ln_gamma<T: Real>(shape: T, stream: &mut RandomStream) -> T {
    debug_assert!(shape > T::zero());
    if shape < T::one() {
        let u = T::lit(stream.uniform_open0());
        return sample_ln_gamma(shape + T::one(), stream) + u.ln() / shape;
    }
    let third = T::lit(1.0 / 3.0);
    let d = shape - third;
    let c = (T::lit(9.0) * d).sqrt().recip();
    let half = T::lit(0.5);
    loop {
        let x = T::lit(stream.standard_normal());
        let t = T::one() + c * x;
        if t <= T::zero() {
            continue;
        }
        let v = t * t * t;
        let ln_u = T::lit(stream.uniform_open0()).ln();
        let x2 = x * x;
        if ln_u < half * x2 + d - d * v + d * v.ln() {
            return d.ln() + T::lit(3.0) * t.ln();
        }
    }
}

/// Gamma(shape, 1) draw.
pub fn sample_gamma<T: Real>(shape: T, stream: &mut RandomStream) -> T {
    sample_ln_gamma(shape, stream).exp()
}

fn check_index(j: usize, n: usize) -> Result<()> {
    if j < 1 || j > n {
        return domain(format!("index j={j} outside 1..={n}"));
    }
    Ok(())
}

fn shapes<T: Real>(j: usize, n: usize) -> (T, T) {
    (T::from_usize_lossy(j), T::from_usize_lossy(n + 1 - j))
}

/// One draw of `s_{j,l}`, density proportional to `y^{j-1} / (1 + y)^{n+1}`,
/// as the ratio of independent Gamma(j) and Gamma(n + 1 - j) variates.
pub fn sample_s<T: Real>(stream: &mut RandomStream, j: usize, n: usize) -> Result<T> {
    check_index(j, n)?;
    let (a, b) = shapes::<T>(j, n);
    let num = sample_gamma(a, stream);
    let den = sample_gamma(b, stream);
    Ok(num / den)
}

/// `ln s_{j,l}` as a difference of log-gamma variates.
pub fn log_sample_s<T: Real>(stream: &mut RandomStream, j: usize, n: usize) -> Result<T> {
    check_index(j, n)?;
    let (a, b) = shapes::<T>(j, n);
    Ok(log_sample_s_unchecked(stream, a, b))
}

#[inline]
pub(crate) fn log_sample_s_unchecked<T: Real>(stream: &mut RandomStream, a: T, b: T) -> T {
    let num = sample_ln_gamma(a, stream);
    let den = sample_ln_gamma(b, stream);
    num - den
}

/// Exact mean `j/(n-j)` and variance `nj/((n-j)^2 (n-j-1))` of `s_{j,l}`.
///
/// Generic over any number type, so `Ratio<i64>` yields the exact rationals.
pub fn s_mean_var<T>(j: usize, n: usize) -> Result<MomentPair<T>>
where
    T: Num + FromPrimitive + Clone,
{
    if j < 1 || j + 2 > n {
        return domain(format!(
            "variance of s_{{j}} needs 1 <= j <= n-2 (j={j}, n={n})"
        ));
    }
    let int = |k: usize| T::from_usize(k).expect("index representable");
    let mean = int(j) / int(n - j);
    let variance = int(n * j) / (int((n - j) * (n - j)) * int(n - j - 1));
    Ok(MomentPair { mean, variance })
}

/// `P(s_{j,l} <= x) = I_{x/(1+x)}(j, n+1-j)`.
pub fn s_cdf<T: Real>(j: usize, n: usize, x: T) -> Result<T> {
    check_index(j, n)?;
    if x.is_nan() || x < T::zero() {
        return domain(format!("s_cdf argument must be >= 0 (x={x})"));
    }
    if x.is_infinite() {
        return Ok(T::one());
    }
    let (a, b) = shapes::<T>(j, n);
    let denom = T::one() + x;
    betainc_split(a, b, x / denom, denom.recip())
}

/// `eta(y) = y - 1 - ln y`, nonnegative with its unique zero at `y = 1`.
pub fn eta<T: Real>(y: T) -> Result<T> {
    if !(y > T::zero()) {
        return domain(format!("eta requires y > 0 (y={y})"));
    }
    // y - 1 - ln y loses everything to cancellation near 1; expand instead
    let t = y - T::one();
    if t.abs() < T::lit(1e-3) {
        let mut acc = T::zero();
        let mut pow = t * t;
        for k in 2..12usize {
            let term = pow / T::from_usize_lossy(k);
            acc += if k % 2 == 0 { term } else { -term };
            pow *= t;
        }
        return Ok(acc);
    }
    Ok(t - y.ln())
}

/// Monte Carlo estimate of `E[eta(s_{[nx]} / mu_{[nx]})]`.
pub fn mean_eta_mc<T: Real>(x: T, n: usize, trials: usize, stream: &mut RandomStream) -> Result<T> {
    if !(x > T::zero() && x < T::one()) {
        return domain(format!("x must lie in (0, 1) (x={x})"));
    }
    if trials == 0 {
        return domain("trials must be >= 1");
    }
    let j = (x * T::from_usize_lossy(n)).floor().to_usize().unwrap_or(0);
    if j < 1 {
        return domain(format!("[nx] must be >= 1 (n={n}, x={x})"));
    }
    let mu = s_mean_var::<T>(j, n)?.mean;
    let (a, b) = shapes::<T>(j, n);
    let mut acc = T::zero();
    for _ in 0..trials {
        let ln_s = log_sample_s_unchecked(stream, a, b);
        acc += eta((ln_s - mu.ln()).exp())?;
    }
    Ok(acc / T::from_usize_lossy(trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_rational::Ratio;

    fn sample_moments(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn complex_gaussian_moments() {
        let mut s = RandomStream::new(1);
        let n = 100_000;
        let draws: Vec<Complex<f64>> = (0..n)
            .map(|_| sample_std_complex_gaussian(&mut s))
            .collect();
        let mean: Complex<f64> = draws.iter().sum::<Complex<f64>>() / n as f64;
        let tol = 5.0 / (n as f64).sqrt();
        assert!(mean.re.abs() < tol && mean.im.abs() < tol);
        let m2 = draws.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        assert!((m2 - 1.0).abs() < 5.0 * (1.0 / n as f64).sqrt());
    }

    #[test]
    fn complex_gaussian_deterministic() {
        let mut a = RandomStream::new(9);
        let mut b = RandomStream::new(9);
        for _ in 0..50 {
            let x: Complex<f64> = sample_std_complex_gaussian(&mut a);
            let y: Complex<f64> = sample_std_complex_gaussian(&mut b);
            assert_eq!(x, y);
        }
    }

    #[test]
    fn gamma_moments_small_and_large_shape() {
        let mut s = RandomStream::new(5);
        for &shape in &[0.3, 1.0, 2.5, 40.0] {
            let xs: Vec<f64> = (0..100_000).map(|_| sample_gamma(shape, &mut s)).collect();
            let (m, v) = sample_moments(&xs);
            let se_m = (shape / 1e5_f64).sqrt();
            assert!((m - shape).abs() < 5.0 * se_m, "shape {shape}: mean {m}");
            // Var of the sample variance for gamma: (mu4 - sigma^4)/N with mu4 = 3a^2 + 6a
            let se_v = ((3.0 * shape * shape + 6.0 * shape - shape * shape) / 1e5).sqrt();
            assert!((v - shape).abs() < 5.0 * se_v, "shape {shape}: var {v}");
        }
    }

    #[test]
    fn s_moments_match_closed_form() {
        let mut s = RandomStream::new(2);
        for &(j, n) in &[(1usize, 4usize), (2, 5), (3, 10)] {
            let xs: Vec<f64> = (0..100_000)
                .map(|_| sample_s(&mut s, j, n).unwrap())
                .collect();
            let (m, _) = sample_moments(&xs);
            let mv = s_mean_var::<f64>(j, n).unwrap();
            let se = (mv.variance / 1e5).sqrt();
            assert!(
                (m - mv.mean).abs() < 5.0 * se,
                "(j={j}, n={n}) mean {m} vs {}",
                mv.mean
            );
        }
    }

    #[test]
    fn s_index_errors() {
        let mut s = RandomStream::new(0);
        assert!(sample_s::<f64>(&mut s, 0, 3).is_err());
        assert!(sample_s::<f64>(&mut s, 4, 3).is_err());
        assert!(log_sample_s::<f64>(&mut s, 0, 3).is_err());
        assert!(s_cdf(5, 4, 1.0).is_err());
        assert!(s_cdf(1, 4, -1.0).is_err());
    }

    #[test]
    fn log_s_is_symmetric_for_unit_shapes() {
        let mut s = RandomStream::new(4);
        let n = 100_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| log_sample_s(&mut s, 1, 1).unwrap())
            .collect();
        let (m, v) = sample_moments(&xs);
        assert!(m.abs() < 5.0 * (v / n as f64).sqrt());
    }

    #[test]
    fn s_mean_var_exact_rationals() {
        let p = s_mean_var::<Ratio<i64>>(1, 4).unwrap();
        assert_eq!(p.mean, Ratio::new(1, 3));
        assert_eq!(p.variance, Ratio::new(2, 9));
        let p = s_mean_var::<Ratio<i64>>(2, 5).unwrap();
        assert_eq!(p.mean, Ratio::new(2, 3));
        assert_eq!(p.variance, Ratio::new(5, 9));
        for n in 3..30 {
            let p = s_mean_var::<Ratio<i64>>(n - 2, n).unwrap();
            assert_eq!(p.mean, Ratio::new(n as i64 - 2, 2));
        }
        assert!(s_mean_var::<f64>(3, 4).is_err());
        assert!(s_mean_var::<f64>(0, 4).is_err());
    }

    #[test]
    fn s_cdf_unit_shapes_and_limits() {
        assert_relative_eq!(s_cdf(1, 1, 1.0).unwrap(), 0.5, epsilon = 1e-15);
        for &x in &[0.0, 0.1, 2.0, 37.0] {
            assert_relative_eq!(s_cdf(1, 1, x).unwrap(), x / (1.0 + x), epsilon = 1e-14);
        }
        assert_eq!(s_cdf(1, 4, f64::INFINITY).unwrap(), 1.0);
        assert!((s_cdf(1, 4, 1e12_f64).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(1.0).unwrap(), 0.0);
        assert_relative_eq!(
            eta(std::f64::consts::E).unwrap(),
            std::f64::consts::E - 2.0,
            epsilon = 1e-15
        );
        assert!(eta(0.0).is_err());
        assert!(eta(-1.0).is_err());
        // series branch agrees with the direct formula just outside its range
        let y = 1.0 + 1.01e-3;
        assert_relative_eq!(eta(y).unwrap(), (y - 1.0) - f64::ln(y), max_relative = 1e-9);
        let y = 1.0 + 0.99e-3;
        assert_relative_eq!(eta(y).unwrap(), (y - 1.0) - f64::ln(y), max_relative = 1e-9);
    }

    #[test]
    fn mean_eta_second_order() {
        let mut s = RandomStream::new(8);
        let est: f64 = mean_eta_mc(0.5, 320, 100_000, &mut s).unwrap();
        assert!((est - 0.00625).abs() < 0.003, "{est}");
        assert!(est >= 0.0);
        assert!(mean_eta_mc(0.5_f64, 1, 10, &mut s).is_err());
        assert!(mean_eta_mc(1.5_f64, 10, 10, &mut s).is_err());
    }
}
