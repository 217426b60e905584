//! Truncation remainders and the convergence-order harness.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expansion::{expand, predicted_slope, ExpansionRequest, ExpansionResult, HaarFIntegral};
use crate::mellin::{WaveletKind, WaveletSpec};
use crate::oracle::{cwt_oracle_with, haar_f_integral, OracleRule, OracleValue, QuadratureSettings};
use crate::profiles::{leibniz, shift_coeffs, FreqProfile, ProfileFamily};
use crate::quad::{gauss_legendre_adaptive, graded_toward_left, CompensatedSum, Tolerance};

/// Margin allowed above the predicted slope.
pub const SLOPE_TOLERANCE: f64 = 0.3;

/// `oracle - partial_sums[n-1]`: the full transform's truncation gap, i.e.
/// `(sqrt(a)/2 pi) delta_n(a)`.
pub fn remainder_by_difference(req: &ExpansionRequest, oracle_value: Complex64, result: &ExpansionResult) -> Result<Complex64> {
    check_same_point(req, result)?;
    Ok(oracle_value - result.value())
}

/// Remainder split by frequency half.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderSplit {
    pub total: Complex64,
    pub positive: Complex64,
    pub negative: Complex64,
}

pub fn remainder_split(req: &ExpansionRequest, oracle: &OracleValue, result: &ExpansionResult) -> Result<RemainderSplit> {
    check_same_point(req, result)?;
    Ok(RemainderSplit {
        total: oracle.value - result.value(),
        positive: oracle.positive - result.positive_value(),
        negative: oracle.negative - result.negative_value(),
    })
}

fn check_same_point(req: &ExpansionRequest, result: &ExpansionResult) -> Result<()> {
    if req.a != result.a || req.b != result.b || req.n_terms != result.n_terms {
        return Err(Error::InvalidArgument(format!(
            "expansion was computed at (b={}, a={}, n={}), request is (b={}, a={}, n={})",
            result.b, result.a, result.n_terms, req.b, req.a, req.n_terms
        )));
    }
    Ok(())
}

/// Below this the origin series of `G_n` replaces the closed-form derivatives,
/// which lose digits to cancellation near the origin.
const SERIES_RADIUS: f64 = 0.05;

/// Explicit positive-frequency Haar remainder
/// `(i/a)^(m+1) (sqrt(a)/2 pi) int_0^inf G_n^(m)(w) (e^(i a w) - 2^(m+1) e^(i a w/2)) dw`
/// with `G_n(w) = g(w)/w - sum_{s<n} d_s w^(s+lambda-2)` and `g(w) = e^(i b w) f_hat(w)`.
///
/// The subtracted monomials are integrated in closed form as generalized
/// (regularized) integrals; the rest by oscillation-resolving quadrature.
/// Requires `n + lambda - 1 > m` so that `G_n^(m)` is integrable at the
/// origin, and `m <= 2`.
pub fn haar_delta_explicit(profile: &FreqProfile, b: f64, a: f64, n: usize, m: usize, q: &QuadratureSettings) -> Result<Complex64> {
    q.validate()?;
    if m > 2 {
        return Err(Error::InvalidArgument(format!("m must be at most 2, got {m}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale a must be positive, got {a}")));
    }
    let lambda = profile.lambda;
    if !(n as f64 + lambda - 1.0 > m as f64) {
        return Err(Error::InvalidArgument(format!(
            "G_n^(m) is not integrable at the origin for n = {n}, m = {m}, lambda = {lambda}"
        )));
    }
    let total = profile.coeffs.len();
    let d = shift_coeffs(profile, b, total)?.d;
    if d[0].norm() != 0.0 {
        return Err(Error::NonzeroLeadingCoefficient { magnitude: d[0].norm() });
    }
    if matches!(profile.family, ProfileFamily::Zero) {
        return Ok(Complex64::default());
    }

    // m-th derivative of w^nu.
    let falling = |nu: f64| (0..m).fold(1.0, |acc, j| acc * (nu - j as f64));
    let exponent = |s: usize| s as f64 + lambda - 2.0;
    // (g/w)^(m) by Leibniz over f_hat and e^(i b w)/w.
    let g_over_w_m = |w: f64| -> Complex64 {
        let phase = Complex64::from_polar(1.0, b * w);
        let ib = Complex64::new(0.0, b);
        let inv = [1.0 / w, -1.0 / (w * w), 2.0 / (w * w * w)];
        let q = [
            phase * inv[0],
            phase * (ib * inv[0] + inv[1]),
            phase * (ib * ib * inv[0] + 2.0 * ib * inv[1] + inv[2]),
        ];
        let mut f = [Complex64::default(); 3];
        for (j, slot) in f.iter_mut().enumerate().take(m + 1) {
            *slot = profile.derivative(w, j).unwrap_or_default();
        }
        leibniz(&f, &q, m)
    };
    let series = |w: f64, from: usize| -> Complex64 {
        (from..total)
            .map(|s| d[s] * falling(exponent(s)) * w.powf(exponent(s) - m as f64))
            .sum()
    };
    // G_n^(m) on [0, X]; the origin series takes over near zero where
    // differencing would cancel catastrophically.
    let g_nm = |w: f64| -> Complex64 {
        if w < SERIES_RADIUS {
            series(w, n)
        } else {
            g_over_w_m(w) - (0..n).map(|s| d[s] * falling(exponent(s)) * w.powf(exponent(s) - m as f64)).sum::<Complex64>()
        }
    };
    let weight = 2f64.powi(m as i32 + 1);
    let kernel = |w: f64| Complex64::from_polar(1.0, a * w) - weight * Complex64::from_polar(1.0, 0.5 * a * w);

    // Split at X with a X large enough that the tail series below converges fast.
    let x_split = (80.0 / a).max(1.0);
    let panel = (0.5 * PI / a).min(if b != 0.0 { 0.5 * PI / b.abs() } else { 0.5 });
    let tol = Tolerance::new(q.abs_tol, q.rel_tol);
    let head_integrand = |w: f64| g_nm(w) * kernel(w);
    let head = integrate_range(&head_integrand, 0.0, x_split, panel, tol)?;

    // Tail: derivative of g/w times the kernel out to the profile cutoff ...
    let cutoff = profile.cutoff(1e-17).max(x_split);
    if !cutoff.is_finite() || cutoff > 1e6 {
        return Err(Error::InvalidArgument(format!(
            "profile `{}` decays too slowly for the explicit remainder",
            profile.name
        )));
    }
    let tail_integrand = |w: f64| g_over_w_m(w) * kernel(w);
    let tail = integrate_range(&tail_integrand, x_split, cutoff, panel, tol)?;

    // ... minus the subtracted monomials on [X, inf), regularized.
    let mut poly = Complex64::default();
    for (s, &ds) in d.iter().enumerate().take(n) {
        if ds.norm() == 0.0 {
            continue;
        }
        let nu = exponent(s) - m as f64;
        let c = ds * falling(exponent(s));
        poly += c * (oscillatory_tail(nu, a, x_split) - weight * oscillatory_tail(nu, 0.5 * a, x_split));
    }

    let prefactor = (Complex64::new(0.0, 1.0 / a)).powu(m as u32 + 1) * (a.sqrt() / (2.0 * PI));
    Ok(prefactor * (head + tail - poly))
}

/// Regularized `int_X^inf w^nu e^(i c w) dw` by repeated integration by
/// parts; accurate when `c X` is large compared with `|nu|`.
fn oscillatory_tail(nu: f64, c: f64, x: f64) -> Complex64 {
    let ic = Complex64::new(0.0, c);
    let boundary = Complex64::from_polar(1.0, c * x);
    let mut coeff = -boundary / ic * x.powf(nu);
    let mut total = coeff;
    let mut order = nu;
    for _ in 0..60 {
        if order == 0.0 {
            break;
        }
        coeff = coeff * (-order) / (ic * x);
        order -= 1.0;
        total += coeff;
        if coeff.norm() <= 1e-17 * total.norm() {
            break;
        }
    }
    total
}

fn integrate_range<F>(f: &F, lo: f64, hi: f64, panel: f64, tol: Tolerance) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let count = ((hi - lo) / panel).ceil().max(1.0) as usize;
    let local = Tolerance::new(tol.abs / count as f64, tol.rel);
    let pieces: Vec<_> = (0..count)
        .into_par_iter()
        .map(|k| {
            let x0 = lo + (hi - lo) * k as f64 / count as f64;
            let x1 = if k + 1 == count { hi } else { lo + (hi - lo) * (k + 1) as f64 / count as f64 };
            if x0 == 0.0 {
                graded_toward_left(f, x0, x1, local, 24_000)
            } else {
                gauss_legendre_adaptive(f, x0, x1, local, 400)
            }
        })
        .collect();
    let mut sum = CompensatedSum::default();
    for (k, p) in pieces.iter().enumerate() {
        if !p.converged {
            return Err(Error::NonConvergence {
                op: "haar_delta_explicit",
                detail: format!("panel {k} of {count}: estimate {:.6e}, error {:.3e}", p.value, p.error),
            });
        }
        sum.add(p.value);
    }
    Ok(sum.total())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergencePoint {
    pub a: f64,
    pub oracle: Complex64,
    pub oracle_error: f64,
    pub partial_sum: Complex64,
    pub error: f64,
    pub term_magnitudes: Vec<f64>,
    pub leading_extra_abs: Option<f64>,
    /// Whether the point entered the slope fit.
    pub fitted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub profile: String,
    pub wavelet: String,
    pub lambda: f64,
    pub b: f64,
    pub n_terms: usize,
    pub points: Vec<ConvergencePoint>,
    /// Least-squares slope of `ln error` against `ln a`; `None` when the
    /// fit is degenerate.
    pub fitted_slope: Option<f64>,
    pub predicted_slope: f64,
    pub degenerate: bool,
    pub pass: bool,
    pub warnings: Vec<String>,
}

impl ConvergenceReport {
    pub fn a_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.a).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.error).collect()
    }
}

/// `points` log-spaced values from `start` to `stop` inclusive.
pub fn log_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > start && points >= 2) {
        return Err(Error::InvalidArgument(format!(
            "log grid needs 0 < start < stop and at least 2 points, got {start}:{stop}:{points}"
        )));
    }
    let (l0, l1) = (start.ln(), stop.ln());
    Ok((0..points)
        .map(|k| match k {
            0 => start,
            k if k + 1 == points => stop,
            k => (l0 + (l1 - l0) * k as f64 / (points - 1) as f64).exp(),
        })
        .collect())
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let s = sxy / sxx;
    s.is_finite().then_some(s)
}

/// Oracle-vs-expansion errors on `a_grid` and the fitted decay slope.
pub fn convergence_study(profile: &FreqProfile, wavelet: &WaveletSpec, b: f64, n_terms: usize, a_grid: &[f64], q: &QuadratureSettings) -> Result<ConvergenceReport> {
    if a_grid.len() < 2 || a_grid.windows(2).any(|w| !(w[1] > w[0])) || !(a_grid[0] > 0.0) {
        return Err(Error::InvalidArgument("a_grid must be positive and strictly increasing with at least 2 points".into()));
    }
    let mut warnings = Vec::new();
    let decades = (a_grid[a_grid.len() - 1] / a_grid[0]).log10();
    if decades < 1.5 {
        warnings.push(format!("a_grid spans {decades:.2} decades; at least 1.5 are recommended"));
    }
    let f_b = match wavelet.kind {
        WaveletKind::Haar => Some(haar_f_integral(profile, b, q)?),
        _ => None,
    };
    let base = ExpansionRequest::new(profile.clone(), *wavelet, b, a_grid[0], n_terms)?;
    let predicted = predicted_slope(&base)?;

    let evaluated: Vec<Result<(ConvergencePoint, OracleValue)>> = a_grid
        .par_iter()
        .map(|&a| evaluate_point(&base, a, f_b, q))
        .collect();
    let mut points = Vec::with_capacity(a_grid.len());
    for r in evaluated {
        points.push(r?.0);
    }

    // Points whose error is not resolved above the oracle's own error are
    // left out of the fit.
    let mut dropped = 0;
    for p in &mut points {
        let floor = 10.0 * p.oracle_error;
        p.fitted = p.error > floor && p.error > 0.0;
        if !p.fitted {
            dropped += 1;
        } else if p.oracle_error > 1e-3 * p.error {
            warnings.push(format!(
                "oracle error {:.2e} exceeds 1e-3 of the truncation error {:.2e} at a = {}",
                p.oracle_error, p.error, p.a
            ));
        }
    }
    if dropped > 0 {
        warnings.push(format!("{dropped} grid point(s) with errors at the oracle's accuracy floor excluded from the fit"));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = points.iter().filter(|p| p.fitted).map(|p| (p.a.ln(), p.error.ln())).unzip();
    let fitted_slope = if x.len() >= 2 { fit_slope(&x, &y) } else { None };
    let degenerate = fitted_slope.is_none();
    if degenerate {
        warnings.push("fewer than two resolvable errors; slope fit is degenerate".into());
    }
    let pass = fitted_slope.is_some_and(|s| s <= predicted + SLOPE_TOLERANCE);
    Ok(ConvergenceReport {
        profile: profile.name.clone(),
        wavelet: wavelet.to_string(),
        lambda: profile.lambda,
        b,
        n_terms,
        points,
        fitted_slope,
        predicted_slope: predicted,
        degenerate,
        pass,
        warnings,
    })
}

fn evaluate_point(base: &ExpansionRequest, a: f64, f_b: Option<HaarFIntegral>, q: &QuadratureSettings) -> Result<(ConvergencePoint, OracleValue)> {
    let req = base.at_scale(a)?;
    let result = expand(&req, f_b)?;
    let oracle = cwt_oracle_with(&req.profile, &req.wavelet, req.b, a, q, OracleRule::Bisection)?;
    let partial_sum = result.value();
    Ok((
        ConvergencePoint {
            a,
            oracle: oracle.value,
            oracle_error: oracle.error,
            partial_sum,
            error: (oracle.value - partial_sum).norm(),
            term_magnitudes: result.terms.iter().map(|t| t.norm()).collect(),
            leading_extra_abs: result.leading_extra.map(|v| v.norm()),
            fitted: true,
        },
        oracle,
    ))
}
