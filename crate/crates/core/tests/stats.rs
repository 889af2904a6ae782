use std::f64::consts::TAU;

use num_complex::Complex;
use proptest::prelude::*;
use rand::Rng;
use spherical_core::distributions::s_cdf;
use spherical_core::ensembles::{spectral_sample, EnsembleConfig, MRule};
use spherical_core::parallel::map_trials;
use spherical_core::radial::{sample_radial_spectrum, RadialConfig};
use spherical_core::stats::{
    angle_uniformity, kolmogorov_quantile, ks_one_sample, ks_statistic, ks_two_sample,
    ks_two_sample_statistic, scaled_spectrum, wrap_angle, EmpiricalCdf, ScaledSpectrum,
};
use spherical_core::weightfn::{limit_modulus_cdf, limit_radial_cdf, polar_to_complex};
use spherical_core::{Error, RandomStream, Spectrum};

fn spectrum_from_angles(angles: Vec<f64>) -> ScaledSpectrum<f64> {
    let n = angles.len();
    ScaledSpectrum {
        angles,
        scaled_radii: vec![1.0; n],
        n,
        m: 1,
        surrogate_angles: false,
    }
}

#[test]
fn kolmogorov_table_and_fallback() {
    assert_eq!(kolmogorov_quantile(0.05), 1.358);
    assert_eq!(kolmogorov_quantile(0.001), 1.949);
    let c = kolmogorov_quantile(0.2);
    assert!((c - (-0.5 * 0.1f64.ln()).sqrt()).abs() < 1e-15);
}

#[test]
fn stratified_sample_has_half_step_statistic() {
    for n in [10usize, 100, 1000] {
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-12, "n={n} D={d}");
    }
}

#[test]
fn degenerate_sample_has_statistic_one_half_or_more() {
    // all mass at the median of the reference
    let xs = vec![0.5f64; 50];
    let d = ks_statistic(&xs, |x| x).unwrap();
    assert!((d - 0.5).abs() < 1e-15);
    // ties straddling a jump: both one-sided gaps matter
    let xs = [0.2f64, 0.2, 0.2, 0.8, 0.8, 0.8, 0.8, 0.8];
    let d = ks_statistic(&xs, |x| x).unwrap();
    assert!((d - 0.425).abs() < 1e-15, "D={d}");
}

#[test]
fn statistic_matches_brute_force_sup() {
    let mut rng = RandomStream::new(41);
    let xs: Vec<f64> = (0..200).map(|_| rng.uniform().powi(2)).collect();
    let d = ks_statistic(&xs, |x: f64| x.sqrt()).unwrap();
    let ecdf = EmpiricalCdf::new(&xs).unwrap();
    let mut brute = 0.0f64;
    for &x in &xs {
        let f = x.sqrt();
        let below = xs.iter().filter(|&&v| v < x).count() as f64 / 200.0;
        brute = brute.max((ecdf.eval(x) - f).abs()).max((below - f).abs());
    }
    assert!((d - brute).abs() < 1e-15);
}

#[test]
fn too_few_samples_and_bad_alpha() {
    let xs = [0.1f64, 0.2, 0.3];
    assert!(matches!(
        ks_one_sample(&xs, |x| x, 0.05),
        Err(Error::TooFewSamples { got: 3, need: 8 })
    ));
    let ys = [0.5f64; 10];
    assert!(ks_one_sample(&ys, |x| x, 0.0).is_err());
    assert!(ks_two_sample(&ys, &xs, 0.05).is_err());
    assert!(EmpiricalCdf::new(&[f64::NAN]).is_err());
}

#[test]
fn ecdf_is_right_continuous_and_counts_exactly() {
    let mut rng = RandomStream::new(42);
    let xs: Vec<f64> = (0..500).map(|_| (rng.uniform() * 20.0).floor()).collect();
    let ecdf = EmpiricalCdf::new(&xs).unwrap();
    assert_eq!(ecdf.count(), 500);
    for _ in 0..100 {
        let q =
            rng.random_range(-1.0..21.0f64).floor() + if rng.random_bool(0.5) { 0.0 } else { 0.5 };
        let brute = xs.iter().filter(|&&v| v <= q).count() as f64 / 500.0;
        assert_eq!(ecdf.eval(q), brute, "q={q}");
    }
    let ties = xs.iter().filter(|&&v| v == 3.0).count();
    let below = xs.iter().filter(|&&v| v < 3.0).count();
    assert_eq!(ecdf.eval(3.0), (below + ties) as f64 / 500.0);
    assert_eq!(ecdf.eval(3.0 - 1e-9), below as f64 / 500.0);
}

#[test]
fn two_sample_extremes() {
    let a: Vec<f64> = (0..20).map(f64::from).collect();
    assert_eq!(ks_two_sample_statistic(&a, &a).unwrap(), 0.0);
    let b: Vec<f64> = a.iter().map(|x| x + 100.0).collect();
    assert_eq!(ks_two_sample_statistic(&a, &b).unwrap(), 1.0);
    let r = ks_two_sample(&a, &b, 0.05).unwrap();
    assert!(!r.passed);
    assert!((r.sample_size - 10.0).abs() < 1e-12);
}

#[test]
fn two_sample_same_law_passes() {
    let mut rng = RandomStream::new(43);
    let a: Vec<f64> = (0..3000).map(|_| rng.standard_normal()).collect();
    let b: Vec<f64> = (0..5000).map(|_| rng.standard_normal()).collect();
    assert!(ks_two_sample(&a, &b, 0.001).unwrap().passed);
}

#[test]
fn angle_uniformity_on_grids() {
    let n = 400;
    let grid = spectrum_from_angles((0..n).map(|i| TAU * (i as f64 + 0.5) / n as f64).collect());
    let r = angle_uniformity(&grid, 0.05).unwrap();
    assert!(r.statistic <= 1.0 / n as f64 && r.passed);
    let zeros = spectrum_from_angles(vec![0.0; n]);
    assert!(!angle_uniformity(&zeros, 0.05).unwrap().passed);
}

#[test]
fn angle_uniformity_refuses_surrogate_angles() {
    let cfg = RadialConfig {
        n: 50,
        m_rule: MRule::Fixed(2),
        seed: 0,
        trials: 1,
    };
    let s = sample_radial_spectrum::<f64>(&cfg, &mut RandomStream::new(0)).unwrap();
    assert!(matches!(
        angle_uniformity(&s, 0.05),
        Err(Error::SurrogateAngles)
    ));
}

#[test]
fn pooled_matrix_angles_are_uniform() {
    let cfg = EnsembleConfig::<f64>::new(100, MRule::Fixed(2), 44);
    let parts: Vec<ScaledSpectrum<f64>> = map_trials(44, 100, None, |_, stream| {
        scaled_spectrum(&spectral_sample(&cfg, stream).unwrap(), 2).unwrap()
    });
    let pooled = ScaledSpectrum::pooled(&parts).unwrap();
    assert_eq!(pooled.len(), 10_000);
    assert!(angle_uniformity(&pooled, 0.05).unwrap().passed);
}

#[test]
fn scaled_spectrum_uses_log_scale() {
    let spectrum = Spectrum {
        eigenvalues: vec![
            Complex::new(0.0, 2.0),
            Complex::new(-1.0, 0.0),
            Complex::new(1.0, -1.0),
        ],
        log_scale: 3.0f64.ln(),
    };
    let s = scaled_spectrum(&spectrum, 2).unwrap();
    assert!(!s.surrogate_angles);
    assert!((s.scaled_radii[0] - 6.0f64.sqrt()).abs() < 1e-14);
    assert!((s.scaled_radii[1] - 3.0f64.sqrt()).abs() < 1e-14);
    assert!((s.angles[0] - TAU / 4.0).abs() < 1e-15);
    assert!((s.angles[1] - TAU / 2.0).abs() < 1e-15);
    assert!((s.angles[2] - 7.0 * TAU / 8.0).abs() < 1e-14);
    let zero = Spectrum {
        eigenvalues: vec![Complex::new(0.0, 0.0)],
        log_scale: 0.0f64,
    };
    assert!(matches!(
        scaled_spectrum(&zero, 1),
        Err(Error::ZeroEigenvalue)
    ));
}

#[test]
fn pushforward_modulus_law() {
    let n = 200;
    let m = 2;
    let cfg = RadialConfig {
        n,
        m_rule: MRule::Fixed(m),
        seed: 45,
        trials: 1,
    };
    let parts: Vec<ScaledSpectrum<f64>> = map_trials(45, 50, None, |_, stream| {
        sample_radial_spectrum(&cfg, stream).unwrap()
    });
    let pooled = ScaledSpectrum::pooled(&parts).unwrap();
    let moduli: Vec<f64> = pooled
        .angles
        .iter()
        .zip(&pooled.scaled_radii)
        .map(|(&t, &r)| polar_to_complex(t, r, m).norm())
        .collect();
    let d = ks_statistic(&moduli, |t| limit_modulus_cdf(m, t)).unwrap();
    assert!(d <= 0.05, "D={d}");
    // power 1 is the identity on moduli: same statistic as the direct radial test
    let direct = ks_statistic(&pooled.scaled_radii, limit_radial_cdf).unwrap();
    let unit: Vec<f64> = pooled
        .angles
        .iter()
        .zip(&pooled.scaled_radii)
        .map(|(&t, &r)| polar_to_complex(t, r, 1).norm())
        .collect();
    let via = ks_statistic(&unit, limit_radial_cdf).unwrap();
    assert!((direct - via).abs() < 1e-12);
}

#[test]
fn wrap_angle_range() {
    assert_eq!(wrap_angle(0.0f64), 0.0);
    assert!((wrap_angle(-TAU / 4.0) - 3.0 * TAU / 4.0).abs() < 1e-15);
    assert!((wrap_angle(5.0 * TAU / 2.0) - TAU / 2.0).abs() < 1e-12);
    assert!(wrap_angle(-1e-300f64) < TAU);
}

proptest! {
    #[test]
    fn ks_invariant_under_cubing(seed in any::<u64>(), n in 8usize..300) {
        let mut rng = RandomStream::new(seed);
        let xs: Vec<f64> = (0..n).map(|_| rng.uniform_open0() * 3.0).collect();
        let cdf = |x: f64| (x / 3.0).clamp(0.0, 1.0);
        let cubed: Vec<f64> = xs.iter().map(|x| x * x * x).collect();
        let a = ks_statistic(&xs, cdf).unwrap();
        let b = ks_statistic(&cubed, |y: f64| cdf(y.cbrt())).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn s_cdf_is_monotone(j in 1usize..40, extra in 0usize..40, x in 1e-3f64..1e3, step in 1e-6f64..10.0) {
        let n = j + extra;
        let lo = s_cdf(j, n, x).unwrap();
        let hi = s_cdf(j, n, x + step).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi >= lo);
    }

    #[test]
    fn s_cdf_inversion_symmetry(j in 1usize..60, extra in 0usize..60, x in 1e-3f64..1e3) {
        // 1 / s_j has the law of s_{n+1-j}
        let n = j + extra;
        let a = s_cdf(j, n, x).unwrap();
        let b = s_cdf(n + 1 - j, n, 1.0 / x).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-12, "{} + {}", a, b);
    }

    #[test]
    fn two_sample_statistic_is_symmetric(seed in any::<u64>()) {
        let mut rng = RandomStream::new(seed);
        let a: Vec<f64> = (0..37).map(|_| rng.uniform()).collect();
        let b: Vec<f64> = (0..23).map(|_| rng.uniform().sqrt()).collect();
        prop_assert_eq!(ks_two_sample_statistic(&a, &b).unwrap(), ks_two_sample_statistic(&b, &a).unwrap());
    }
}
