//! Radial weight functions `w_m` of the product ensemble, normalized `Y_j`
//! densities, and the closed-form limiting laws.
//!
//! `w_1(y) = (1 + y^2)^{-(n+1)}` and
//! `w_{k+1}(y) = 2 pi int_0^inf w_k(y / r) (1 + r^2)^{-(n+1)} dr / r`.
//! With `y = e^u`, `r = e^v` the recursion is a convolution on the real
//! line of log-concave functions, so every integrand is unimodal and
//! concentrated; all levels are carried as `ln w`.

use num_complex::Complex;
use num_traits::Num;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::Real;

/// Largest supported product length.
pub const MAX_M: usize = 4;
/// Largest supported dimension.
pub const MAX_N: usize = 50;
/// Relative tolerance of every adaptive integration.
pub const QUAD_TOL: f64 = 1e-8;
/// Integrands are truncated where they fall below this fraction of the peak.
pub const TRUNCATION: f64 = 1e-16;

const GRID_LN_MIN: f64 = -40.0;
const GRID_LN_MAX: f64 = 40.0;
const GRID_STEP: f64 = 0.005;
const MAX_INTERVALS: usize = 400;

#[inline]
fn softplus<T: Real>(x: T) -> T {
    if x > T::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln w_1(e^u)`.
#[inline]
fn ln_w1<T: Real>(n: usize, u: T) -> T {
    -T::from_usize_lossy(n + 1) * softplus(u + u)
}

/// `ln w` tabulated on a uniform grid in `u = ln y`, interpolated by a
/// monotone (Fritsch-Carlson) cubic and extended linearly past the ends.
#[derive(Debug, Clone)]
struct LogGrid<T> {
    start: T,
    step: T,
    values: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> LogGrid<T> {
    fn new(start: T, step: T, values: Vec<T>) -> Self {
        let k = values.len();
        let secant: Vec<T> = values.windows(2).map(|w| (w[1] - w[0]) / step).collect();
        let mut slopes = vec![T::zero(); k];
        slopes[0] = secant[0];
        slopes[k - 1] = secant[k - 2];
        for i in 1..k - 1 {
            let (a, b) = (secant[i - 1], secant[i]);
            slopes[i] = if a * b <= T::zero() {
                T::zero()
            } else {
                T::lit(2.0) / (a.recip() + b.recip())
            };
        }
        Self {
            start,
            step,
            values,
            slopes,
        }
    }

    fn end(&self) -> T {
        self.start + self.step * T::from_usize_lossy(self.values.len() - 1)
    }

    fn eval(&self, u: T) -> T {
        let last = self.values.len() - 1;
        if u <= self.start {
            return self.values[0] + self.slopes[0] * (u - self.start);
        }
        if u >= self.end() {
            return self.values[last] + self.slopes[last] * (u - self.end());
        }
        let pos = (u - self.start) / self.step;
        let i = pos.floor().to_usize().unwrap_or(0).min(last - 1);
        let t = pos - T::from_usize_lossy(i);
        let h = self.step;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1
    }
}

/// Maximizes a concave function on `[lo, hi]` by golden-section search.
fn concave_argmax<T: Real>(f: &impl Fn(T) -> T, mut lo: T, mut hi: T) -> T {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > T::lit(1e-6) {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        }
    }
    T::lit(0.5) * (lo + hi)
}

/// `ln int exp(g(v)) dv` for concave `g`, peak searched in `[lo, hi]`.
fn ln_integral_concave<T: Real>(g: impl Fn(T) -> T, lo: T, hi: T) -> Result<T> {
    let peak_at = concave_argmax(&g, lo, hi);
    let peak = g(peak_at);
    let cut = T::lit(TRUNCATION).ln();
    let step = T::lit(0.5);
    let mut a = peak_at;
    while g(a) - peak > cut {
        a -= step;
    }
    let mut b = peak_at;
    while g(b) - peak > cut {
        b += step;
    }
    let r = integrate(
        |v| (g(v) - peak).exp(),
        a,
        b,
        T::lit(QUAD_TOL) * T::lit(0.01),
        T::zero(),
        MAX_INTERVALS,
    )?;
    Ok(peak + r.value.ln())
}

/// Search window for the recursion integrand at `u`.
fn window<T: Real>(u: T) -> (T, T) {
    let pad = T::lit(60.0);
    (u.min(T::zero()) - pad, u.max(T::zero()) + pad)
}

/// Evaluator for `w_m` with both `m` and `n` as parameters.
///
/// Levels `2..m-1` are memoized on a log grid; level `m` itself is
/// integrated directly at each query point from level `m - 1`.
#[derive(Debug, Clone)]
pub struct WeightFunction<T> {
    m: usize,
    n: usize,
    /// `tables[k]` holds level `k + 2`.
    tables: Vec<LogGrid<T>>,
}

pub fn check_feasible(m: usize, n: usize) -> Result<()> {
    if m < 1 || n < 1 {
        return Err(Error::Domain(format!(
            "w_m needs m >= 1 and n >= 1 (m={m}, n={n})"
        )));
    }
    if m > MAX_M || n > MAX_N {
        return Err(Error::Infeasible(format!(
            "weight recursion is limited to m <= {MAX_M} and n <= {MAX_N} (got m={m}, n={n}); use the radial Monte Carlo path instead"
        )));
    }
    Ok(())
}

impl<T: Real> WeightFunction<T> {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        check_feasible(m, n)?;
        let mut wf = Self {
            m,
            n,
            tables: Vec::new(),
        };
        let start = T::lit(GRID_LN_MIN);
        let step = T::lit(GRID_STEP);
        let count = ((GRID_LN_MAX - GRID_LN_MIN) / GRID_STEP).round() as usize + 1;
        for level in 2..m {
            let values = (0..count)
                .into_par_iter()
                .map(|i| wf.ln_level(level, start + step * T::from_usize_lossy(i)))
                .collect::<Result<Vec<T>>>()?;
            wf.tables.push(LogGrid::new(start, step, values));
        }
        Ok(wf)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `ln w_level(e^u)` for `level <= m`, using memoized lower levels.
    fn ln_level(&self, level: usize, u: T) -> Result<T> {
        if level == 1 {
            return Ok(ln_w1(self.n, u));
        }
        if let Some(table) = self.tables.get(level - 2) {
            return Ok(table.eval(u));
        }
        let n1 = T::from_usize_lossy(self.n + 1);
        let (lo, hi) = window(u);
        let inner = |v: T| -> T {
            let base = if level == 2 {
                ln_w1(self.n, u - v)
            } else {
                self.tables[level - 3].eval(u - v)
            };
            base - n1 * softplus(v + v)
        };
        Ok(T::TAU().ln() + ln_integral_concave(inner, lo, hi)?)
    }

    /// `ln w_m(y)`.
    pub fn ln_value(&self, y: T) -> Result<T> {
        if !(y > T::zero()) {
            return Err(Error::Domain(format!("w_m needs y > 0 (y={y})")));
        }
        self.ln_level(self.m, y.ln())
    }

    /// `w_m(y)`; may underflow to 0 far in the tail, see [`Self::ln_value`].
    pub fn value(&self, y: T) -> Result<T> {
        Ok(self.ln_value(y)?.exp())
    }

    /// Tabulates `w_m` on `grid`.
    pub fn table(&self, grid: &[T]) -> Result<WeightTable<T>> {
        check_grid(grid)?;
        let values = grid
            .par_iter()
            .map(|&y| self.value(y))
            .collect::<Result<Vec<T>>>()?;
        Ok(WeightTable {
            m: self.m,
            n: self.n,
            grid: grid.to_vec(),
            values,
            quad_tol: T::lit(QUAD_TOL),
        })
    }

    /// `ln int_0^inf y^{2j-1} w_m(y) dy`.
    fn ln_moment(&self, j: usize) -> Result<T> {
        let two_j = T::from_usize_lossy(2 * j);
        let g = |u: T| two_j * u + self.ln_level(self.m, u).unwrap_or(T::neg_infinity());
        let (lo, hi) = window(T::zero());
        ln_integral_concave(g, lo, hi)
    }

    /// Normalized density of `Y_j`, proportional to `y^{2j-1} w_m(y)`, on `grid`.
    pub fn density(&self, j: usize, grid: &[T]) -> Result<DensityTable<T>> {
        if j < 1 || j > self.n {
            return Err(Error::Domain(format!("index j={j} outside 1..={}", self.n)));
        }
        check_grid(grid)?;
        let ln_norm = self.ln_moment(j)?;
        let two_j = T::from_usize_lossy(2 * j);
        let ln_dens_u = |u: T| -> Result<T> { Ok(two_j * u + self.ln_level(self.m, u)? - ln_norm) };

        let density = grid
            .par_iter()
            .map(|&y| {
                let u = y.ln();
                Ok((ln_dens_u(u)? - u).exp())
            })
            .collect::<Result<Vec<T>>>()?;

        // cumulative mass in u = ln y; region below the grid from the
        // truncated lower end of the density
        let cut = T::lit(TRUNCATION).ln();
        let mut lower = grid[0].ln();
        while ln_dens_u(lower)? > cut {
            lower -= T::lit(0.5);
        }
        let edges: Vec<T> = std::iter::once(lower)
            .chain(grid.iter().map(|y| y.ln()))
            .collect();
        let pieces = edges
            .par_windows(2)
            .map(|w| {
                if w[1] <= w[0] {
                    return Ok(T::zero());
                }
                let mut failed = None;
                let r = integrate(
                    |u| match ln_dens_u(u) {
                        Ok(v) => v.exp(),
                        Err(e) => {
                            failed = Some(e);
                            T::zero()
                        }
                    },
                    w[0],
                    w[1],
                    T::lit(QUAD_TOL),
                    T::lit(1e-15),
                    MAX_INTERVALS,
                )?;
                match failed {
                    Some(e) => Err(e),
                    None => Ok(r.value),
                }
            })
            .collect::<Result<Vec<T>>>()?;
        let mut acc = T::zero();
        let cdf = pieces
            .into_iter()
            .map(|p| {
                acc += p;
                acc.min(T::one())
            })
            .collect();
        Ok(DensityTable {
            j,
            n: self.n,
            m: self.m,
            grid: grid.to_vec(),
            density,
            cdf,
            ln_norm,
        })
    }
}

fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("grid must not be empty".into()));
    }
    if !(grid[0] > T::zero()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "grid must be strictly increasing and positive".into(),
        ));
    }
    Ok(())
}

/// `w_m` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable<T> {
    pub m: usize,
    pub n: usize,
    pub grid: Vec<T>,
    pub values: Vec<T>,
    pub quad_tol: T,
}

/// Normalized `Y_j` density and its CDF on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable<T> {
    pub j: usize,
    pub n: usize,
    pub m: usize,
    pub grid: Vec<T>,
    pub density: Vec<T>,
    /// `P(Y_j <= grid[i])`.
    pub cdf: Vec<T>,
    /// `ln int y^{2j-1} w_m(y) dy`.
    pub ln_norm: T,
}

impl<T: Real> DensityTable<T> {
    /// Mass outside the grid, `P(Y_j < grid[0]) + P(Y_j > grid[last])`.
    pub fn mass_outside(&self) -> T {
        self.cdf[0] + (T::one() - self.cdf[self.cdf.len() - 1])
    }
}

/// One-shot `w_m(y)`; builds the memoized lower levels on every call.
pub fn w_eval<T: Real>(m: usize, n: usize, y: T) -> Result<T> {
    WeightFunction::new(m, n)?.value(y)
}

/// Normalized `Y_j` density table.
pub fn y_density<T: Real>(j: usize, n: usize, m: usize, grid: &[T]) -> Result<DensityTable<T>> {
    WeightFunction::new(m, n)?.density(j, grid)
}

/// Limiting CDF of the scaled radius, `r^2 / (1 + r^2)`. Works for any
/// number type, including exact rationals.
pub fn limit_radial_cdf<T: Num + Copy>(r: T) -> T {
    let r2 = r * r;
    r2 / (T::one() + r2)
}

/// Limiting radial density `2r / (1 + r^2)^2`.
pub fn limit_radial_density<T: Real>(r: T) -> T {
    let d = T::one() + r * r;
    T::lit(2.0) * r / (d * d)
}

/// Limiting density of `(theta, r)`: `r / (pi (1 + r^2)^2)`, free of `theta`.
pub fn limit_polar_density<T: Real>(_theta: T, r: T) -> T {
    let d = T::one() + r * r;
    r / (T::PI() * d * d)
}

/// Fixed-`m` limiting eigenvalue density
/// `|z|^{2/m - 2} / (m pi (1 + |z|^{2/m})^2)`.
///
/// For `m >= 2` the density has an integrable singularity at the origin;
/// `z = 0` returns `+inf` there (and `1/pi` for `m = 1`).
pub fn p_m_density<T: Real>(m: usize, z: Complex<T>) -> T {
    let mf = T::from_usize_lossy(m.max(1));
    let r = z.norm();
    if r == T::zero() {
        return if m <= 1 {
            T::FRAC_1_PI()
        } else {
            T::infinity()
        };
    }
    let ln_r = r.ln();
    let t = ((T::lit(2.0) / mf) * ln_r).exp();
    let front = ((T::lit(2.0) / mf - T::lit(2.0)) * ln_r).exp();
    let d = T::one() + t;
    front / (mf * T::PI() * d * d)
}

/// `P(|z| <= t)` under `p_m`: `t^{2/m} / (1 + t^{2/m})`.
pub fn limit_modulus_cdf<T: Real>(m: usize, t: T) -> T {
    if t <= T::zero() {
        return T::zero();
    }
    let s = ((T::lit(2.0) / T::from_usize_lossy(m)) * t.ln()).exp();
    s / (T::one() + s)
}

/// Limiting density of `z = r e^{i theta}`: `1 / (pi (1 + |z|^2)^2)`.
pub fn limit_complex_density<T: Real>(z: Complex<T>) -> T {
    let d = T::one() + z.norm_sqr();
    T::FRAC_1_PI() / (d * d)
}

/// `r^power e^{i theta}`, modulus formed as `exp(power ln r)`.
pub fn polar_to_complex<T: Real>(theta: T, r: T, power: usize) -> Complex<T> {
    if r == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let modulus = (T::from_usize_lossy(power) * r.ln()).exp();
    Complex::from_polar(modulus, theta)
}
