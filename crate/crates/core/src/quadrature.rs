//! Adaptive Gauss-Kronrod (7/15) quadrature.

use crate::error::{Error, Result};
use crate::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod rule on `[a, b]`: `(estimate, error)`.
pub fn gk15<T: Real>(f: &mut impl FnMut(T) -> T, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for k in 0..7 {
        let dx = half_len * T::lit(XGK[k]);
        let s = f(center - dx) + f(center + dx);
        kronrod += T::lit(WGK[k]) * s;
        if k % 2 == 1 {
            gauss += T::lit(WG[k / 2]) * s;
        }
    }
    (kronrod * half_len, ((kronrod - gauss) * half_len).abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

/// Globally adaptive bisection (largest error first) until the summed error
/// is at most `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<T: Real>(
    mut f: impl FnMut(T) -> T,
    a: T,
    b: T,
    rel_tol: T,
    abs_tol: T,
    max_intervals: usize,
) -> Result<Integral<T>> {
    let (v, e) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut value = v;
    let mut error = e;
    loop {
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Integral {
                value,
                error,
                intervals: parts.len(),
            });
        }
        if parts.len() >= max_intervals {
            return Err(Error::QuadratureFailure {
                estimate: value.as_f64(),
                error: error.as_f64(),
            });
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .fold(
                (0, -T::one()),
                |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best },
            );
        let (lo, hi, pv, pe) = parts.swap_remove(idx);
        let mid = T::lit(0.5) * (lo + hi);
        if !(mid > lo && mid < hi) {
            // interval cannot be split further in this precision
            return Err(Error::QuadratureFailure {
                estimate: value.as_f64(),
                error: error.as_f64(),
            });
        }
        let (lv, le) = gk15(&mut f, lo, mid);
        let (rv, re) = gk15(&mut f, mid, hi);
        value += lv + rv - pv;
        error += le + re - pe;
        parts.push((lo, mid, lv, le));
        parts.push((mid, hi, rv, re));
        // guard against drift in the running sums
        if parts.len() % 64 == 0 {
            value = parts.iter().map(|p| p.2).sum();
            error = parts.iter().map(|p| p.3).sum();
        }
    }
}

/// `int_0^inf f(x) dx` through `x = t / (1 - t)`.
pub fn integrate_half_line<T: Real>(
    mut f: impl FnMut(T) -> T,
    rel_tol: T,
    abs_tol: T,
    max_intervals: usize,
) -> Result<Integral<T>> {
    let one = T::one();
    integrate(
        |t: T| {
            if t >= one {
                return T::zero();
            }
            let s = one - t;
            let x = t / s;
            let v = f(x) / (s * s);
            if v.is_finite() {
                v
            } else {
                T::zero()
            }
        },
        T::zero(),
        one,
        rel_tol,
        abs_tol,
        max_intervals,
    )
}
