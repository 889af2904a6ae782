use std::f64::consts::{PI, TAU};

use num_complex::Complex;
use spherical_core::distributions::{s_cdf, sample_s};
use spherical_core::quadrature::integrate;
use spherical_core::weightfn::{
    check_feasible, limit_complex_density, limit_modulus_cdf, limit_polar_density,
    limit_radial_cdf, limit_radial_density, p_m_density, polar_to_complex, w_eval, y_density,
    WeightFunction,
};
use spherical_core::{Error, RandomStream, Ratio64};

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// `int y^p f(y) dy` by the trapezoid rule in `u = ln y`.
fn log_trapezoid(grid: &[f64], f: &[f64], p: i32) -> f64 {
    grid.windows(2)
        .zip(f.windows(2))
        .map(|(y, v)| {
            let du = (y[1] / y[0]).ln();
            0.5 * du * (y[0].powi(p + 1) * v[0] + y[1].powi(p + 1) * v[1])
        })
        .sum()
}

#[test]
fn base_level_is_closed_form() {
    for n in [1usize, 3, 10, 50] {
        let at_one: f64 = w_eval(1, n, 1.0).unwrap();
        assert!((at_one - 0.5f64.powi(n as i32 + 1)).abs() <= 1e-12 * at_one);
        for &y in &[0.01, 0.3, 1.0, 2.5, 7.0] {
            let w: f64 = w_eval(1, n, y).unwrap();
            let want = (1.0 + y * y).powi(-(n as i32 + 1));
            assert!((w - want).abs() <= 1e-12 * want, "n={n} y={y}");
        }
    }
}

#[test]
fn base_level_decreases() {
    let wf = WeightFunction::<f64>::new(1, 4).unwrap();
    let vals: Vec<f64> = log_grid(1e-3, 1e3, 200)
        .iter()
        .map(|&y| wf.value(y).unwrap())
        .collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn two_level_unit_case_matches_closed_form_cdf() {
    // Y^2 = s s' with s, s' ~ BetaPrime(1, 1): P(Y^2 <= a) = a (a - 1 - ln a) / (a - 1)^2
    let cdf = |y: f64| {
        let a = y * y;
        if (a - 1.0).abs() < 1e-4 {
            let t = a - 1.0;
            return 0.5 + t / 6.0 - t * t / 12.0;
        }
        a * (a - 1.0 - a.ln()) / ((a - 1.0) * (a - 1.0))
    };
    let grid = log_grid(1e-3, 1e3, 301);
    let table = y_density(1, 1, 2, &grid).unwrap();
    for (i, &y) in grid.iter().enumerate() {
        assert!(
            (table.cdf[i] - cdf(y)).abs() < 1e-6,
            "y={y}: {} vs {}",
            table.cdf[i],
            cdf(y)
        );
        let h = 1e-5 * y;
        let dens = (cdf(y + h) - cdf(y - h)) / (2.0 * h);
        assert!(
            (table.density[i] - dens).abs() < 1e-5 * dens.max(1e-3),
            "y={y}"
        );
    }
}

#[test]
fn two_level_density_matches_monte_carlo_histogram() {
    let mut stream = RandomStream::new(31);
    let draws: Vec<f64> = (0..100_000)
        .map(|_| {
            let s: f64 = sample_s(&mut stream, 1, 1).unwrap();
            let t: f64 = sample_s(&mut stream, 1, 1).unwrap();
            (s * t).sqrt()
        })
        .collect();
    let (lo, hi) = (0.0, 5.0);
    let bins = 100;
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &d in &draws {
        if d < hi {
            counts[((d - lo) / width) as usize] += 1;
        }
    }
    let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    // integrate the model over each bin from its CDF
    let table = y_density(1, 1, 2, &edges[1..]).unwrap();
    let mut prev = 0.0;
    let mut l1 = 0.0;
    for (b, &c) in counts.iter().enumerate() {
        let p = table.cdf[b] - prev;
        prev = table.cdf[b];
        l1 += (c as f64 / draws.len() as f64 - p).abs();
    }
    l1 += (draws.iter().filter(|&&d| d >= hi).count() as f64 / draws.len() as f64 - (1.0 - prev))
        .abs();
    assert!(l1 < 0.05, "L1={l1}");
}

#[test]
fn single_factor_table_cdf_matches_incomplete_beta() {
    let grid = log_grid(1e-3, 1e2, 400);
    for &(j, n) in &[(1usize, 1usize), (2, 5), (5, 9)] {
        let table = y_density(j, n, 1, &grid).unwrap();
        let sup = grid
            .iter()
            .zip(&table.cdf)
            .map(|(&y, &c)| (c - s_cdf(j, n, y * y).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-4, "(j={j},n={n}) sup={sup}");
    }
}

#[test]
fn unit_single_factor_density_closed_form() {
    let grid = log_grid(1e-2, 1e2, 50);
    let table = y_density(1, 1, 1, &grid).unwrap();
    for (i, &y) in grid.iter().enumerate() {
        let d = 2.0 * y / (1.0 + y * y).powi(2);
        assert!((table.density[i] - d).abs() < 1e-8 * d.max(1e-6), "y={y}");
        assert!((table.cdf[i] - y * y / (1.0 + y * y)).abs() < 1e-8);
    }
}

#[test]
fn densities_are_normalized() {
    let grid = log_grid(1e-8, 1e8, 3200);
    for &(j, n, m) in &[(1usize, 1usize, 2usize), (2, 3, 3), (1, 2, 4), (3, 5, 2)] {
        let table = y_density(j, n, m, &grid).unwrap();
        let mass = log_trapezoid(&grid, &table.density, 0);
        assert!((mass - 1.0).abs() < 1e-6, "(j={j},n={n},m={m}) mass={mass}");
        let last = *table.cdf.last().unwrap();
        assert!(
            (last - 1.0).abs() < 1e-6,
            "(j={j},n={n},m={m}) cdf end={last}"
        );
    }
}

#[test]
fn second_moment_is_product_of_factor_means() {
    // E[Y_j^2] = (j / (n - j))^m since the m factors are independent.
    let grid = log_grid(1e-9, 1e9, 6000);
    for &(j, n, m) in &[(1usize, 3usize, 2usize), (1, 3, 3), (1, 3, 4), (2, 6, 3)] {
        let table = y_density(j, n, m, &grid).unwrap();
        let got = log_trapezoid(&grid, &table.density, 2);
        let want = (j as f64 / (n - j) as f64).powi(m as i32);
        assert!(
            (got - want).abs() < 1e-4 * want,
            "(j={j},n={n},m={m}) {got} vs {want}"
        );
    }
}

#[test]
fn three_level_density_matches_monte_carlo() {
    let (j, n) = (2usize, 4usize);
    let mut stream = RandomStream::new(32);
    let mut draws: Vec<f64> = (0..50_000)
        .map(|_| {
            let p: f64 = (0..3)
                .map(|_| sample_s::<f64>(&mut stream, j, n).unwrap())
                .product();
            p.sqrt()
        })
        .collect();
    draws.sort_by(f64::total_cmp);
    let probes = [0.2, 0.5, 0.8, 1.0, 1.5, 3.0];
    let table = y_density(j, n, 3, &probes).unwrap();
    for (i, &y) in probes.iter().enumerate() {
        let emp = draws.partition_point(|&d| d <= y) as f64 / draws.len() as f64;
        assert!(
            (emp - table.cdf[i]).abs() < 0.01,
            "y={y}: {emp} vs {}",
            table.cdf[i]
        );
    }
}

#[test]
fn feasibility_envelope() {
    assert!(check_feasible(4, 50).is_ok());
    assert!(matches!(check_feasible(5, 3), Err(Error::Infeasible(_))));
    assert!(matches!(check_feasible(2, 51), Err(Error::Infeasible(_))));
    assert!(matches!(check_feasible(0, 3), Err(Error::Domain(_))));
    assert!(w_eval::<f64>(2, 2, -1.0).is_err());
    assert!(y_density::<f64>(4, 3, 1, &[1.0]).is_err());
    assert!(y_density::<f64>(1, 3, 1, &[2.0, 1.0]).is_err());
}

#[test]
fn limit_radial_values() {
    assert_eq!(limit_radial_cdf(1.0), 0.5);
    assert_eq!(limit_radial_cdf(0.0), 0.0);
    assert!((limit_radial_cdf(3.0) - 0.9f64).abs() < 1e-15);
    assert_eq!(limit_radial_cdf(Ratio64::new(2, 3)), Ratio64::new(4, 13));
    assert_eq!(
        limit_radial_cdf(Ratio64::from_integer(3)),
        Ratio64::new(9, 10)
    );
}

#[test]
fn radial_density_is_derivative_of_cdf() {
    for &r in &[0.01f64, 0.2, 0.7, 1.0, 1.9, 4.0, 12.0] {
        let h = 1e-5 * r.max(1e-2);
        let fd = (limit_radial_cdf(r + h) - limit_radial_cdf(r - h)) / (2.0 * h);
        assert!((fd - limit_radial_density(r)).abs() < 1e-6, "r={r}");
    }
}

#[test]
fn polar_density_integrates_to_one() {
    assert!((limit_polar_density(0.3, 1.0) - 1.0 / (4.0 * PI)).abs() < 1e-15);
    // theta-free, so the theta integral is a factor 2 pi
    let radial = integrate(
        |t: f64| {
            if t >= 1.0 {
                return 0.0;
            }
            let r = t / (1.0 - t);
            limit_polar_density(0.0, r) / ((1.0 - t) * (1.0 - t))
        },
        0.0,
        1.0,
        1e-13,
        1e-15,
        500,
    )
    .unwrap();
    assert!(
        (TAU * radial.value - 1.0).abs() < 1e-10,
        "{}",
        TAU * radial.value
    );
}

#[test]
fn fixed_m_density_values_and_mass() {
    let one = Complex::new(0.6, 0.8);
    assert!((p_m_density(1, Complex::new(0.0, 0.0)) - 1.0 / PI).abs() < 1e-15);
    assert!((p_m_density(1, one) - 1.0 / (4.0 * PI)).abs() < 1e-15);
    assert!((p_m_density(2, one) - 1.0 / (8.0 * PI)).abs() < 1e-15);
    assert!(p_m_density::<f64>(3, Complex::new(0.0, 0.0)).is_infinite());
    for m in 1..=4usize {
        // mass inside |z| <= t, integrated in u = ln r to absorb the origin singularity
        for &t in &[0.3, 1.0, 5.0] {
            let mass = integrate(
                |u: f64| {
                    let r = u.exp();
                    TAU * r * r * p_m_density(m, Complex::new(r, 0.0))
                },
                -200.0,
                f64::ln(t),
                1e-12,
                1e-14,
                2000,
            )
            .unwrap();
            assert!(
                (mass.value - limit_modulus_cdf(m, t)).abs() < 1e-9,
                "m={m} t={t}"
            );
        }
    }
}

#[test]
fn complex_density_reduces_to_single_factor() {
    assert!((limit_complex_density(Complex::new(0.0, 0.0)) - 1.0 / PI).abs() < 1e-15);
    assert!((limit_complex_density(Complex::new(0.0, 1.0)) - 1.0 / (4.0 * PI)).abs() < 1e-15);
    for i in -5..=5 {
        for k in -5..=5 {
            let z = Complex::new(0.37 * i as f64, 0.52 * k as f64);
            let (a, b) = (limit_complex_density(z), p_m_density(1, z));
            assert!((a - b).abs() <= 1e-14 * a, "z={z}");
        }
    }
}

#[test]
fn polar_to_complex_cases() {
    let z = polar_to_complex(0.0, 1.0, 5);
    assert!((z - Complex::new(1.0, 0.0)).norm() < 1e-15);
    let z = polar_to_complex(PI / 2.0, 2.0, 1);
    assert!((z - Complex::new(0.0, 2.0)).norm() < 1e-15);
    let z = polar_to_complex(1.0f64, 3.0, 3);
    assert!((z.norm() - 27.0).abs() < 1e-12 && (z.arg() - 1.0).abs() < 1e-14);
    assert_eq!(polar_to_complex(1.0, 0.0, 2), Complex::new(0.0, 0.0));
}
