//! Test-side reference numerics, independent of the library's quadrature.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gl_rule(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite 24-point Gauss-Legendre with `panels` equal panels.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize) -> Complex64 {
    let rule = gl_rule(24);
    let h = (b - a) / panels as f64;
    let mut total = Complex64::default();
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for &(x, w) in &rule {
            total += w * 0.5 * h * f(mid + 0.5 * h * x);
        }
    }
    total
}

pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, panels).re
}

/// Taylor coefficients of an analytic `f` at 0 by the trapezoidal rule on a
/// circle of radius `r`.
pub fn cauchy_taylor<F: Fn(Complex64) -> Complex64>(f: F, r: f64, count: usize) -> Vec<Complex64> {
    let m = 256;
    let samples: Vec<Complex64> = (0..m)
        .map(|j| f(Complex64::from_polar(r, 2.0 * PI * j as f64 / m as f64)))
        .collect();
    (0..count)
        .map(|k| {
            let s: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / m as f64))
                .sum();
            s / (m as f64 * r.powi(k as i32))
        })
        .collect()
}

pub fn rel_err(x: Complex64, y: Complex64) -> f64 {
    (x - y).norm() / y.norm().max(1e-300)
}
