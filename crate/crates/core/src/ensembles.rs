//! Ginibre, spherical and product-of-spherical samplers.

use serde::{Deserialize, Serialize};

use crate::distributions::sample_std_complex_gaussian;
use crate::error::{domain, Error, Result};
use crate::linalg::{eigenvalues, matmul, LuFactors, Spectrum, SquareComplexMatrix};
use crate::rng::RandomStream;
use crate::Real;

/// Consecutive ill-conditioned draws tolerated before giving up.
pub const MAX_RESAMPLES: usize = 100;

/// Rule resolving the product length `m_n` from the dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule", content = "value")]
pub enum MRule {
    Fixed(usize),
    EqualN,
    /// `m_n = ceil(n^alpha)`.
    CeilPow(f64),
}

impl MRule {
    pub fn resolve(&self, n: usize) -> Result<usize> {
        let m = match *self {
            MRule::Fixed(m) => m,
            MRule::EqualN => n,
            MRule::CeilPow(alpha) => {
                if !alpha.is_finite() {
                    return domain(format!(
                        "power rule exponent must be finite (alpha={alpha})"
                    ));
                }
                let v = (n as f64).powf(alpha).ceil();
                if !(v < 1e15) {
                    return domain(format!("ceil(n^alpha) too large (n={n}, alpha={alpha})"));
                }
                v as usize
            }
        };
        if m < 1 {
            return domain(format!("resolved m must be >= 1 (rule {self:?}, n={n})"));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig<T> {
    pub n: usize,
    pub m_rule: MRule,
    pub seed: u64,
    pub condition_cap: T,
    /// Frobenius-norm window outside which the running product is rescaled.
    pub rescale_bounds: (T, T),
}

impl<T: Real> EnsembleConfig<T> {
    pub fn new(n: usize, m_rule: MRule, seed: u64) -> Self {
        Self {
            n,
            m_rule,
            seed,
            condition_cap: T::lit(1e12),
            rescale_bounds: (T::lit(1e-100), T::lit(1e100)),
        }
    }

    pub fn with_rescale_bounds(mut self, lo: T, hi: T) -> Self {
        self.rescale_bounds = (lo, hi);
        self
    }

    pub fn with_condition_cap(mut self, cap: T) -> Self {
        self.condition_cap = cap;
        self
    }

    pub fn m(&self) -> Result<usize> {
        self.m_rule.resolve(self.n)
    }

    pub fn validate(&self) -> Result<usize> {
        if self.n < 1 {
            return domain("n must be >= 1");
        }
        if !(self.condition_cap > T::one()) {
            return domain(format!(
                "condition cap must exceed 1 (got {})",
                self.condition_cap
            ));
        }
        let (lo, hi) = self.rescale_bounds;
        if !(lo > T::zero() && hi > lo) {
            return domain(format!("invalid rescale bounds [{lo}, {hi}]"));
        }
        self.m()
    }
}

/// `matrix * exp(log_scale)` is the true product; eigenvalue moduli of the
/// product are `exp(ln|lambda(matrix)| + log_scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSample<T> {
    pub matrix: SquareComplexMatrix<T>,
    pub log_scale: T,
    pub resample_count: usize,
}

/// `n x n` matrix of i.i.d. standard complex normals.
pub fn sample_ginibre<T: Real>(n: usize, stream: &mut RandomStream) -> SquareComplexMatrix<T> {
    SquareComplexMatrix::from_fn(n, |_, _| sample_std_complex_gaussian(stream))
}

/// One spherical draw `A^{-1} B` and the number of rejected `A`s.
#[derive(Debug, Clone)]
pub struct SphericalDraw<T> {
    pub matrix: SquareComplexMatrix<T>,
    pub resamples: usize,
}

/// `X = A^{-1} B` by solving `A X = B`; `A` is redrawn while its condition
/// estimate exceeds `condition_cap`.
pub fn sample_spherical<T: Real>(
    n: usize,
    condition_cap: T,
    stream: &mut RandomStream,
) -> Result<SphericalDraw<T>> {
    let mut resamples = 0;
    let lu = loop {
        let a = sample_ginibre::<T>(n, stream);
        match LuFactors::factor(&a) {
            Ok(lu) if lu.condition_estimate() <= condition_cap => break lu,
            Ok(_) | Err(Error::SingularMatrix { .. }) => {
                resamples += 1;
                if resamples >= MAX_RESAMPLES {
                    return Err(Error::ResampleLimit {
                        attempts: resamples,
                    });
                }
            }
            Err(e) => return Err(e),
        }
    };
    let b = sample_ginibre::<T>(n, stream);
    Ok(SphericalDraw {
        matrix: lu.solve(&b)?,
        resamples,
    })
}

/// Rescales by the power of two nearest `norm`, so the mantissas are
/// untouched and the bookkeeping is exact. Returns the log of the divisor.
fn rescale_pow2<T: Real>(p: &mut SquareComplexMatrix<T>, norm: T) -> T {
    let k = norm.log2().round();
    let two = T::lit(2.0);
    // split the exponent so 2^-k never under/overflows on its own
    let half = (k / two).trunc();
    let rest = k - half;
    p.scale_mut(two.powf(-half));
    p.scale_mut(two.powf(-rest));
    k * T::LN_2()
}

/// Left-to-right product of `m_n` independent spherical factors with
/// norm-triggered rescaling.
pub fn sample_product<T: Real>(
    config: &EnsembleConfig<T>,
    stream: &mut RandomStream,
) -> Result<ProductSample<T>> {
    let m = config.validate()?;
    let (lo, hi) = config.rescale_bounds;
    let first = sample_spherical(config.n, config.condition_cap, stream)?;
    let mut product = first.matrix;
    let mut resample_count = first.resamples;
    let mut log_scale = T::zero();
    for step in 0..m {
        if step > 0 {
            let next = sample_spherical(config.n, config.condition_cap, stream)?;
            resample_count += next.resamples;
            product = matmul(&product, &next.matrix)?;
        }
        let norm = product.frobenius_norm();
        if !(norm > T::zero() && norm.is_finite()) {
            return Err(Error::Domain(format!(
                "running product norm left the representable range at factor {}",
                step + 1
            )));
        }
        if norm < lo || norm > hi {
            log_scale += rescale_pow2(&mut product, norm);
        }
    }
    Ok(ProductSample {
        matrix: product,
        log_scale,
        resample_count,
    })
}

/// Eigenvalues of one product draw, with its `log_scale` carried along.
pub fn spectral_sample<T: Real>(
    config: &EnsembleConfig<T>,
    stream: &mut RandomStream,
) -> Result<Spectrum<T>> {
    let sample = sample_product(config, stream)?;
    spectrum_of(&sample)
}

pub fn spectrum_of<T: Real>(sample: &ProductSample<T>) -> Result<Spectrum<T>> {
    let mut spectrum = eigenvalues(&sample.matrix)?;
    spectrum.log_scale = sample.log_scale;
    Ok(spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_rules_resolve() {
        assert_eq!(MRule::Fixed(3).resolve(10).unwrap(), 3);
        assert_eq!(MRule::EqualN.resolve(10).unwrap(), 10);
        assert_eq!(MRule::CeilPow(0.5).resolve(10).unwrap(), 4);
        assert_eq!(MRule::CeilPow(0.0).resolve(10).unwrap(), 1);
        assert!(MRule::Fixed(0).resolve(10).is_err());
        assert!(MRule::CeilPow(-1.0).resolve(10).is_ok());
        assert!(MRule::CeilPow(f64::NAN).resolve(10).is_err());
    }

    #[test]
    fn config_validation() {
        let c = EnsembleConfig::<f64>::new(4, MRule::Fixed(2), 0);
        assert_eq!(c.validate().unwrap(), 2);
        assert!(c.clone().with_condition_cap(0.5).validate().is_err());
        assert!(c.clone().with_rescale_bounds(1.0, 0.5).validate().is_err());
        assert!(EnsembleConfig::<f64>::new(0, MRule::Fixed(1), 0)
            .validate()
            .is_err());
    }

    #[test]
    fn pow2_rescale_is_exact() {
        let mut rng = RandomStream::new(1);
        let a: SquareComplexMatrix<f64> = sample_ginibre(3, &mut rng);
        let mut b = a.clone();
        b.scale_mut(1e120);
        let norm = b.frobenius_norm();
        let ls = rescale_pow2(&mut b, norm);
        let k = (ls / std::f64::consts::LN_2).round();
        let mut back = b.clone();
        let scale = 2f64.powf(k);
        back.scale_mut(scale);
        for (x, y) in back.as_slice().iter().zip(a.as_slice()) {
            assert!(((x - y * 1e120) / (y * 1e120)).norm() < 1e-15);
        }
        assert!(b.frobenius_norm() > 0.5 && b.frobenius_norm() < 2.0);
    }

    #[test]
    fn one_by_one_spherical_is_ratio() {
        let mut s1 = RandomStream::new(3);
        let mut s2 = RandomStream::new(3);
        let x: SphericalDraw<f64> = sample_spherical(1, 1e12, &mut s1).unwrap();
        let a: SquareComplexMatrix<f64> = sample_ginibre(1, &mut s2);
        let b: SquareComplexMatrix<f64> = sample_ginibre(1, &mut s2);
        let want = b[(0, 0)] / a[(0, 0)];
        assert!((x.matrix[(0, 0)] - want).norm() < 1e-15 * want.norm());
    }

    #[test]
    fn resample_limit_for_impossible_cap() {
        let mut s = RandomStream::new(3);
        let r = sample_spherical::<f64>(6, 1.0 + 1e-12, &mut s);
        assert!(matches!(
            r,
            Err(Error::ResampleLimit {
                attempts: MAX_RESAMPLES
            })
        ));
    }
}
