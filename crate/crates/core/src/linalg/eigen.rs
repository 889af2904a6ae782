use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::SquareComplexMatrix;
use super::Spectrum;
use crate::error::{Error, Result};
use crate::Real;

#[inline]
fn cabs1<T: Real>(z: Complex<T>) -> T {
    z.re.abs() + z.im.abs()
}

/// Diagonal similarity scaling by powers of two so that each row and its
/// matching column have comparable 1-norms. Returns the scale factors.
pub fn balance<T: Real>(a: &mut SquareComplexMatrix<T>) -> Vec<T> {
    let n = a.dim();
    let radix = T::lit(2.0);
    let radix2 = radix * radix;
    let mut scale = vec![T::one(); n];
    for _sweep in 0..200 {
        let mut converged = true;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c += cabs1(a[(j, i)]);
                    r += cabs1(a[(i, j)]);
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let s = c + r;
            let mut f = T::one();
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix2;
            }
            g = r * radix;
            while c >= g {
                f /= radix;
                c /= radix2;
            }
            if (c + r) / f < T::lit(0.95) * s {
                converged = false;
                scale[i] *= f;
                let inv = f.recip();
                for j in 0..n {
                    a[(i, j)] = a[(i, j)].scale(inv);
                    a[(j, i)] = a[(j, i)].scale(f);
                }
            }
        }
        if converged {
            break;
        }
    }
    scale
}

/// In-place unitary reduction to upper Hessenberg form (Householder).
pub fn hessenberg<T: Real>(a: &mut SquareComplexMatrix<T>) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    let two = T::lit(2.0);
    let mut v = vec![Complex::<T>::zero(); n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let alpha = (0..len)
            .map(|i| a[(k + 1 + i, k)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if alpha == T::zero() {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let r0 = x0.norm();
        let phase = if r0 > T::zero() {
            x0 / r0
        } else {
            Complex::one()
        };
        for i in 0..len {
            v[i] = a[(k + 1 + i, k)];
        }
        v[0] += phase.scale(alpha);
        let vnorm2: T = v[..len].iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let beta = two / vnorm2;
        // left: rows k+1.., columns k..
        for j in k..n {
            let mut s = Complex::zero();
            for i in 0..len {
                s += v[i].conj() * a[(k + 1 + i, j)];
            }
            let s = s.scale(beta);
            for i in 0..len {
                let vi = v[i];
                a[(k + 1 + i, j)] -= vi * s;
            }
        }
        // right: all rows, columns k+1..
        for i in 0..n {
            let mut s = Complex::zero();
            for l in 0..len {
                s += a[(i, k + 1 + l)] * v[l];
            }
            let s = s.scale(beta);
            for l in 0..len {
                let vl = v[l].conj();
                a[(i, k + 1 + l)] -= s * vl;
            }
        }
        a[(k + 1, k)] = -phase.scale(alpha);
        for i in k + 2..n {
            a[(i, k)] = Complex::zero();
        }
    }
}

/// `(c, s)` with `[c s; -conj(s) c] [x; y] = [r; 0]`, `c` real.
#[inline]
fn givens<T: Real>(x: Complex<T>, y: Complex<T>) -> (T, Complex<T>) {
    if y.is_zero() {
        return (T::one(), Complex::zero());
    }
    if x.is_zero() {
        return (T::zero(), Complex::one());
    }
    let ax = x.norm();
    let norm = ax.hypot(y.norm());
    let c = ax / norm;
    let s = (x / ax) * y.conj() / norm;
    (c, s)
}

fn wilkinson_shift<T: Real>(h: &SquareComplexMatrix<T>, hi: usize) -> Complex<T> {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let p = (a - d).scale(T::lit(0.5));
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let plus = p + disc;
    let minus = p - disc;
    let den = if plus.norm() >= minus.norm() {
        plus
    } else {
        minus
    };
    if den.is_zero() {
        d
    } else {
        d - bc / den
    }
}

/// Eigenvalues of an upper Hessenberg matrix by single-shift implicit QR
/// with Givens bulge chasing (eigenvalues only: each sweep touches the
/// active window).
fn hessenberg_qr<T: Real>(h: &mut SquareComplexMatrix<T>) -> Result<Vec<Complex<T>>> {
    let n = h.dim();
    let mut eig = vec![Complex::zero(); n];
    let budget = 30 * n.max(1);
    let mut total = 0usize;
    let mut its = 0usize;
    let hnorm = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|ij| cabs1(h[ij]))
        .fold(T::zero(), T::max);
    let eps = T::epsilon();
    let exceptional = T::lit(0.75);

    let mut hi = n - 1;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        let mut lo = 0;
        for k in (1..=hi).rev() {
            let mut scale = cabs1(h[(k - 1, k - 1)]) + cabs1(h[(k, k)]);
            if scale == T::zero() {
                scale = hnorm;
            }
            if cabs1(h[(k, k - 1)]) <= eps * scale {
                h[(k, k - 1)] = Complex::zero();
                lo = k;
                break;
            }
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            its = 0;
            continue;
        }
        total += 1;
        if total > budget {
            return Err(Error::NoConvergence {
                iterations: total - 1,
            });
        }
        its += 1;
        let mu = if its == 10 {
            h[(lo, lo)] + Complex::new(exceptional * h[(lo + 1, lo)].re.abs(), T::zero())
        } else if its == 20 {
            h[(hi, hi)] + Complex::new(exceptional * h[(hi, hi - 1)].re.abs(), T::zero())
        } else {
            wilkinson_shift(h, hi)
        };

        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)] - mu, h[(lo + 1, lo)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let first_col = if k == lo { lo } else { k - 1 };
            for j in first_col..=hi {
                let t1 = h[(k, j)];
                let t2 = h[(k + 1, j)];
                h[(k, j)] = t1.scale(c) + s * t2;
                h[(k + 1, j)] = t2.scale(c) - s.conj() * t1;
            }
            if k > lo {
                h[(k + 1, k - 1)] = Complex::zero();
            }
            let last_row = (k + 2).min(hi);
            for i in lo..=last_row {
                let t1 = h[(i, k)];
                let t2 = h[(i, k + 1)];
                h[(i, k)] = t1.scale(c) + t2 * s.conj();
                h[(i, k + 1)] = t2.scale(c) - t1 * s;
            }
        }
    }
    Ok(eig)
}

/// All eigenvalues of `a`: balancing, Hessenberg reduction, shifted QR.
pub fn eigenvalues<T: Real>(a: &SquareComplexMatrix<T>) -> Result<Spectrum<T>> {
    if !a.is_finite() {
        return Err(Error::Domain("eigenvalues require finite entries".into()));
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let eigenvalues = hessenberg_qr(&mut h)?;
    Ok(Spectrum {
        eigenvalues,
        log_scale: T::zero(),
    })
}
