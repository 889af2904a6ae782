use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::SquareComplexMatrix;
use crate::error::{Error, Result};
use crate::Real;

/// `PA = LU` with partial (row) pivoting. `L` is unit lower triangular and
/// shares storage with `U`.
#[derive(Debug, Clone)]
pub struct LuFactors<T> {
    lu: SquareComplexMatrix<T>,
    /// Row `i` of `PA` is row `perm[i]` of `A`.
    perm: Vec<usize>,
    swaps: usize,
    norm_one: T,
}

impl<T: Real> LuFactors<T> {
    pub fn factor(a: &SquareComplexMatrix<T>) -> Result<Self> {
        let n = a.dim();
        let norm_one = a.norm_one();
        let threshold = T::from_usize_lossy(n) * T::epsilon() * norm_one;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, pivot_mag) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold(
                        (k, -T::one()),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if !(pivot_mag > threshold) {
                return Err(Error::SingularMatrix {
                    pivot: pivot_mag.as_f64(),
                    threshold: threshold.as_f64(),
                });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let inv_pivot = lu[(k, k)].inv();
            for i in k + 1..n {
                let factor = lu[(i, k)] * inv_pivot;
                lu[(i, k)] = factor;
                if factor.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let ukj = lu[(k, j)];
                    lu[(i, j)] -= factor * ukj;
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            swaps,
            norm_one,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.dim()
    }

    /// Solves `A X = B` for all columns of `B` at once, sweeping rows.
    pub fn solve(&self, b: &SquareComplexMatrix<T>) -> Result<SquareComplexMatrix<T>> {
        let n = self.dim();
        if b.dim() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: b.dim(),
            });
        }
        let mut x = SquareComplexMatrix::from_fn(n, |i, j| b[(self.perm[i], j)]);
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                if l.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = x[(k, j)];
                    x[(i, j)] -= l * v;
                }
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                if u.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = x[(k, j)];
                    x[(i, j)] -= u * v;
                }
            }
            let inv = self.lu[(i, i)].inv();
            for j in 0..n {
                x[(i, j)] *= inv;
            }
        }
        Ok(x)
    }

    /// Solves `A x = b`.
    pub fn solve_vec(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim();
        let mut y: Vec<Complex<T>> = (0..n).map(|i| b[self.perm[i]]).collect();
        for i in 0..n {
            let mut acc = y[i];
            for k in 0..i {
                acc -= self.lu[(i, k)] * y[k];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for k in i + 1..n {
                acc -= self.lu[(i, k)] * y[k];
            }
            y[i] = acc / self.lu[(i, i)];
        }
        y
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint_vec(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim();
        // U^H w = b
        let mut w = b.to_vec();
        for i in 0..n {
            let mut acc = w[i];
            for k in 0..i {
                acc -= self.lu[(k, i)].conj() * w[k];
            }
            w[i] = acc / self.lu[(i, i)].conj();
        }
        // L^H y = w
        for i in (0..n).rev() {
            let mut acc = w[i];
            for k in i + 1..n {
                acc -= self.lu[(k, i)].conj() * w[k];
            }
            w[i] = acc;
        }
        let mut x = vec![Complex::zero(); n];
        for i in 0..n {
            x[self.perm[i]] = w[i];
        }
        x
    }

    pub fn determinant(&self) -> Complex<T> {
        let n = self.dim();
        let mut det: Complex<T> = (0..n).map(|i| self.lu[(i, i)]).product();
        if self.swaps % 2 == 1 {
            det = -det;
        }
        det
    }

    /// Estimate of `||A^{-1}||_1` by Hager's method (Higham's complex
    /// variant) plus Higham's alternating test vector; `O(n^2)` per step.
    pub fn inverse_norm_one_estimate(&self) -> T {
        let n = self.dim();
        let nf = T::from_usize_lossy(n);
        let norm1 = |v: &[Complex<T>]| v.iter().map(|z| z.norm()).sum::<T>();

        let mut x = vec![Complex::new(nf.recip(), T::zero()); n];
        let mut est = T::zero();
        let mut last_j = usize::MAX;
        for iter in 0..5 {
            let y = self.solve_vec(&x);
            est = est.max(norm1(&y));
            let xi: Vec<Complex<T>> = y
                .iter()
                .map(|z| {
                    let r = z.norm();
                    if r > T::zero() {
                        z / r
                    } else {
                        Complex::one()
                    }
                })
                .collect();
            let z = self.solve_adjoint_vec(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, -T::one()), |b, c| if c.1 > b.1 { c } else { b });
            let ztx: T = z.iter().zip(&x).map(|(zi, xi)| (zi.conj() * xi).re).sum();
            if iter > 0 && (zmax <= ztx || j == last_j) {
                break;
            }
            last_j = j;
            x = vec![Complex::zero(); n];
            x[j] = Complex::one();
        }
        if n > 1 {
            let alt: Vec<Complex<T>> = (0..n)
                .map(|i| {
                    let mag = T::one() + T::from_usize_lossy(i) / (nf - T::one());
                    Complex::new(if i % 2 == 0 { mag } else { -mag }, T::zero())
                })
                .collect();
            let y = self.solve_vec(&alt);
            est = est.max(T::lit(2.0) * norm1(&y) / (T::lit(3.0) * nf));
        }
        est
    }

    /// `||A||_1 * est(||A^{-1}||_1)`.
    pub fn condition_estimate(&self) -> T {
        self.norm_one * self.inverse_norm_one_estimate()
    }
}

/// Solves `A X = B` through a partial-pivoted LU of `A`.
pub fn lu_solve<T: Real>(
    a: &SquareComplexMatrix<T>,
    b: &SquareComplexMatrix<T>,
) -> Result<SquareComplexMatrix<T>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    LuFactors::factor(a)?.solve(b)
}

/// 1-norm condition number estimate of `A`.
pub fn condition_estimate<T: Real>(a: &SquareComplexMatrix<T>) -> Result<T> {
    Ok(LuFactors::factor(a)?.condition_estimate())
}
