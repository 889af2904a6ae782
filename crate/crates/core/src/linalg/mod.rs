//! Dense complex linear algebra: products, pivoted LU solves, condition
//! estimation and all-eigenvalue computation for non-Hermitian matrices.

mod eigen;
mod lu;
mod matrix;

pub use eigen::{balance, eigenvalues, hessenberg};
pub use lu::{condition_estimate, lu_solve, LuFactors};
pub use matrix::{matmul, SquareComplexMatrix};

use num_complex::Complex;

use crate::Real;

/// Eigenvalues of a (possibly rescaled) matrix. The true moduli are
/// `exp(ln|lambda| + log_scale)`; arguments are unaffected by the scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<Complex<T>>,
    pub log_scale: T,
}

impl<T: Real> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `ln|lambda| + log_scale` for each eigenvalue.
    pub fn corrected_log_moduli(&self) -> Vec<T> {
        self.eigenvalues
            .iter()
            .map(|z| z.norm().ln() + self.log_scale)
            .collect()
    }
}

/// Minimal-cost matching distance between two eigenvalue multisets: the
/// largest pairwise gap after greedily pairing closest points first.
pub fn multiset_distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Option<T> {
    if a.len() != b.len() {
        return None;
    }
    let mut pairs = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, k));
        }
    }
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst = T::zero();
    let mut matched = 0;
    for (d, i, k) in pairs {
        if used_a[i] || used_b[k] {
            continue;
        }
        used_a[i] = true;
        used_b[k] = true;
        worst = worst.max(d);
        matched += 1;
        if matched == a.len() {
            break;
        }
    }
    Some(worst)
}
