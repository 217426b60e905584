//! Reference values of the wavelet transform by direct quadrature.
//!
//! With `u = a w` the transform becomes
//! `W(b, a) = (1 / (2 pi sqrt(a))) int_0^inf [ f_hat(u/a) e^(i b u/a) h(u) + f_hat(-u/a) e^(-i b u/a) h(-u) ] du`
//! where `h = conj(psi_hat)`. Each half-line is cut into panels no longer
//! than a quarter of the shortest oscillation period and integrated with
//! one of two independent rules.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expansion::HaarFIntegral;
use crate::mellin::{WaveletKind, WaveletSpec};
use crate::profiles::{DecayClass, FreqProfile};
use crate::quad::{gauss_legendre_adaptive, graded_toward_left, tanh_sinh, CompensatedSum, QuadEstimate, Tolerance};

/// Cutoffs beyond this are replaced by extrapolation in the cutoff.
const MAX_DIRECT_CUTOFF: f64 = 1e6;
/// Intervals each panel may use in the adaptive rule.
const PANEL_BUDGET: usize = 400;
/// Tanh-sinh refinement levels per panel.
const PANEL_MAX_LEVEL: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffStrategy {
    /// Integrate `w` over `[-omega_max, omega_max]` (in the original frequency variable).
    Fixed(f64),
    /// Truncate where the profile and kernel envelopes drop below the tolerance.
    DecayBased(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscillationHandling {
    SubdividePerPeriod,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub cutoff: CutoffStrategy,
    pub oscillation: OscillationHandling,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-16,
            rel_tol: 1e-12,
            max_subdivisions: 1_000_000,
            cutoff: CutoffStrategy::DecayBased(1e-17),
            oscillation: OscillationHandling::SubdividePerPeriod,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "quadrature tolerances must be positive, got abs={}, rel={}",
                self.abs_tol, self.rel_tol
            )));
        }
        match self.cutoff {
            CutoffStrategy::Fixed(w) if !(w > 0.0) => Err(Error::InvalidArgument(format!("fixed cutoff must be positive, got {w}"))),
            CutoffStrategy::DecayBased(t) if !(t > 0.0) => Err(Error::InvalidArgument(format!("envelope tolerance must be positive, got {t}"))),
            _ if self.max_subdivisions == 0 => Err(Error::InvalidArgument("max_subdivisions must be positive".into())),
            _ => Ok(()),
        }
    }

    fn tolerance(&self, panels: usize) -> Tolerance {
        Tolerance::new(self.abs_tol / panels.max(1) as f64, self.rel_tol)
    }
}

/// The two independent integration rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleRule {
    /// Geometrically graded Gauss-Legendre on the panel touching the
    /// origin, adaptive 20-point Gauss-Legendre bisection elsewhere.
    Bisection,
    /// Tanh-sinh on every panel.
    DoubleExponential,
}

impl OracleRule {
    pub fn id(&self) -> &'static str {
        match self {
            OracleRule::Bisection => "gauss-legendre-bisection",
            OracleRule::DoubleExponential => "tanh-sinh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    /// Contribution of positive frequencies.
    pub positive: Complex64,
    /// Contribution of negative frequencies.
    pub negative: Complex64,
    pub error: f64,
    pub evaluations: usize,
    pub panels: usize,
}

/// Geometry of one half-line integral.
#[derive(Debug, Clone, Copy)]
struct HalfLine {
    cutoff: f64,
    panel: f64,
    /// Algebraic decay exponent `k` of the integrand when the cutoff is too
    /// far out; the tail is then removed by extrapolating in `U^-k`.
    algebraic_tail: Option<f64>,
    /// Cutoffs used for extrapolation are multiples of this.
    alignment: f64,
}

fn integrate_panels<F>(f: &F, lo: f64, hi: f64, panel: f64, rule: OracleRule, q: &QuadratureSettings, total_panels: usize) -> Result<QuadEstimate<Complex64>>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let count = ((hi - lo) / panel).ceil().max(1.0) as usize;
    let tol = q.tolerance(total_panels.max(count));
    let results: Vec<QuadEstimate<Complex64>> = (0..count)
        .into_par_iter()
        .map(|k| {
            let x0 = lo + (hi - lo) * k as f64 / count as f64;
            let x1 = if k + 1 == count { hi } else { lo + (hi - lo) * (k + 1) as f64 / count as f64 };
            match rule {
                OracleRule::Bisection if x0 == 0.0 => graded_toward_left(f, x0, x1, tol, 60 * PANEL_BUDGET),
                OracleRule::Bisection => gauss_legendre_adaptive(f, x0, x1, tol, PANEL_BUDGET),
                OracleRule::DoubleExponential => tanh_sinh(f, x0, x1, tol, PANEL_MAX_LEVEL),
            }
        })
        .collect();
    let mut sum = CompensatedSum::default();
    let mut error = 0.0;
    let mut evaluations = 0;
    for (k, r) in results.iter().enumerate() {
        if !r.converged {
            return Err(Error::NonConvergence {
                op: "oracle quadrature",
                detail: format!(
                    "{} rule failed on panel {k} of {count} ([{:.6e}, {:.6e}]); last estimate {:.6e} with error {:.3e} after {} evaluations",
                    rule.id(),
                    lo + (hi - lo) * k as f64 / count as f64,
                    lo + (hi - lo) * (k + 1) as f64 / count as f64,
                    r.value,
                    r.error,
                    r.evaluations
                ),
            });
        }
        sum.add(r.value);
        error += r.error;
        evaluations += r.evaluations;
    }
    Ok(QuadEstimate {
        value: sum.total(),
        error,
        evaluations,
        converged: true,
    })
}

fn integrate_half_line<F>(f: &F, geom: HalfLine, rule: OracleRule, q: &QuadratureSettings) -> Result<(QuadEstimate<Complex64>, usize)>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let panels_needed = |u: f64| (u / geom.panel).ceil() as usize;
    match geom.algebraic_tail {
        None => {
            let panels = panels_needed(geom.cutoff);
            check_budget(panels, q)?;
            Ok((integrate_panels(f, 0.0, geom.cutoff, geom.panel, rule, q, panels)?, panels))
        }
        Some(k) => {
            // Cutoffs U_j = U_0 2^j, each a multiple of the alignment period,
            // and I(U) = I + sum_m C_m U^(-k-m).
            let base = (256.0 * geom.panel / geom.alignment).ceil().max(1.0) * geom.alignment;
            let cutoffs: Vec<f64> = (0..5).map(|j| base * 2f64.powi(j)).collect();
            let panels = panels_needed(cutoffs[4]);
            check_budget(panels, q)?;
            let mut running = integrate_panels(f, 0.0, cutoffs[0], geom.panel, rule, q, panels)?;
            let mut values = vec![running.value];
            let mut error = running.error;
            let mut evaluations = running.evaluations;
            for w in cutoffs.windows(2) {
                let piece = integrate_panels(f, w[0], w[1], geom.panel, rule, q, panels)?;
                running.value += piece.value;
                error += piece.error;
                evaluations += piece.evaluations;
                values.push(running.value);
            }
            let fine = extrapolate_cutoff(&cutoffs[1..], &values[1..], k);
            let coarse = extrapolate_cutoff(&cutoffs[2..], &values[2..], k);
            Ok((
                QuadEstimate {
                    value: fine,
                    error: error + (fine - coarse).norm(),
                    evaluations,
                    converged: true,
                },
                panels,
            ))
        }
    }
}

fn check_budget(panels: usize, q: &QuadratureSettings) -> Result<()> {
    if panels > q.max_subdivisions {
        return Err(Error::NonConvergence {
            op: "oracle quadrature",
            detail: format!("{panels} panels needed, max_subdivisions is {}", q.max_subdivisions),
        });
    }
    Ok(())
}

/// Solves `I(U_j) = I + sum_{m < n-1} C_m U_j^(-k-m)` for `I`.
fn extrapolate_cutoff(cutoffs: &[f64], values: &[Complex64], k: f64) -> Complex64 {
    let n = cutoffs.len();
    let mut rows: Vec<Vec<Complex64>> = cutoffs
        .iter()
        .zip(values)
        .map(|(&u, &v)| {
            let mut row = vec![Complex64::new(1.0, 0.0)];
            // Scale powers by the smallest cutoff to keep the system balanced.
            let x = cutoffs[0] / u;
            for m in 0..n - 1 {
                row.push(Complex64::new(x.powf(k + m as f64), 0.0));
            }
            row.push(v);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| rows[i][col].norm().total_cmp(&rows[j][col].norm())).unwrap_or(col);
        rows.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let factor = rows[r][col] / rows[col][col];
                let pivot_row = rows[col].clone();
                for (x, p) in rows[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= factor * p;
                }
            }
        }
    }
    rows[0][n] / rows[0][0]
}

fn kernel_panel(wavelet: &WaveletSpec) -> f64 {
    match wavelet.oscillation_period() {
        Some(p) => 0.25 * p,
        None => 0.5,
    }
}

/// Geometry of the `u`-integrals for the transform at scale `a`.
fn cwt_geometry(profile: &FreqProfile, wavelet: &WaveletSpec, b: f64, a: f64, q: &QuadratureSettings) -> HalfLine {
    let mut panel = kernel_panel(wavelet);
    let mut alignment = wavelet.oscillation_period().map_or(1.0, |p| 2.0 * p);
    if q.oscillation == OscillationHandling::SubdividePerPeriod && b != 0.0 {
        panel = panel.min(0.5 * PI * a / b.abs());
    }
    if b != 0.0 {
        alignment = alignment.max(2.0 * PI * a / b.abs());
    }
    if q.oscillation == OscillationHandling::None {
        panel = panel.max(1.0);
    }
    let (cutoff, algebraic_tail) = match q.cutoff {
        CutoffStrategy::Fixed(w) => (a * w, None),
        CutoffStrategy::DecayBased(tol) => {
            let profile_cut = a * profile.cutoff(tol);
            let kernel_cut = wavelet.kernel_cutoff(tol).unwrap_or(f64::INFINITY);
            let cut = profile_cut.min(kernel_cut);
            if cut <= MAX_DIRECT_CUTOFF {
                (cut, None)
            } else {
                let order = match profile.decay {
                    DecayClass::Polynomial { order } => order,
                    _ => 1.0,
                };
                let beta = wavelet.tail().map_or(0.0, |t| t.beta);
                (f64::INFINITY, Some(order + beta - 1.0))
            }
        }
    };
    HalfLine {
        cutoff,
        panel,
        algebraic_tail,
        alignment,
    }
}

/// `W(b, a)` by the bisection rule.
pub fn cwt_oracle(profile: &FreqProfile, wavelet: &WaveletSpec, b: f64, a: f64, q: &QuadratureSettings) -> Result<Complex64> {
    cwt_oracle_with(profile, wavelet, b, a, q, OracleRule::Bisection).map(|v| v.value)
}

/// `W(b, a)` with the chosen rule, split into frequency halves.
pub fn cwt_oracle_with(profile: &FreqProfile, wavelet: &WaveletSpec, b: f64, a: f64, q: &QuadratureSettings, rule: OracleRule) -> Result<OracleValue> {
    q.validate()?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale a must be positive, got {a}")));
    }
    if !b.is_finite() {
        return Err(Error::InvalidArgument(format!("translation b must be finite, got {b}")));
    }
    if matches!(profile.family, crate::profiles::ProfileFamily::Zero) {
        return Ok(OracleValue {
            value: Complex64::default(),
            positive: Complex64::default(),
            negative: Complex64::default(),
            error: 0.0,
            evaluations: 0,
            panels: 0,
        });
    }
    let geom = cwt_geometry(profile, wavelet, b, a, q);
    let pos = |u: f64| profile.eval(u / a) * Complex64::from_polar(1.0, b * u / a) * wavelet.psi_hat_conj(u);
    let neg = |u: f64| profile.eval(-u / a) * Complex64::from_polar(1.0, -b * u / a) * wavelet.psi_hat_conj(-u);
    let (p, panels) = integrate_half_line(&pos, geom, rule, q)?;
    let (n, _) = integrate_half_line(&neg, geom, rule, q)?;
    let scale = 1.0 / (2.0 * PI * a.sqrt());
    let positive = p.value * scale;
    let negative = n.value * scale;
    Ok(OracleValue {
        value: positive + negative,
        positive,
        negative,
        error: (p.error + n.error) * scale,
        evaluations: p.evaluations + n.evaluations,
        panels: 2 * panels,
    })
}

/// Both rules; errors with the two values when they disagree beyond
/// `tolerance` relative to the larger magnitude (absolute below `abs_floor`).
pub fn cwt_oracle_cross_checked(profile: &FreqProfile, wavelet: &WaveletSpec, b: f64, a: f64, q: &QuadratureSettings, tolerance: f64) -> Result<(OracleValue, OracleValue)> {
    let first = cwt_oracle_with(profile, wavelet, b, a, q, OracleRule::Bisection)?;
    let second = cwt_oracle_with(profile, wavelet, b, a, q, OracleRule::DoubleExponential)?;
    let scale = first.value.norm().max(second.value.norm());
    let gap = (first.value - second.value).norm();
    if gap > tolerance * scale.max(q.abs_tol) {
        return Err(Error::Accuracy {
            op: "oracle rule agreement",
            error: gap / scale.max(f64::MIN_POSITIVE),
            evaluations: first.evaluations + second.evaluations,
        });
    }
    Ok((first, second))
}

/// `int_{-inf}^{inf} e^(i b w) f_hat(w) / w dw`, returned by half-line.
pub fn haar_f_integral(profile: &FreqProfile, b: f64, q: &QuadratureSettings) -> Result<HaarFIntegral> {
    haar_f_integral_with(profile, b, q, OracleRule::Bisection)
}

pub fn haar_f_integral_with(profile: &FreqProfile, b: f64, q: &QuadratureSettings, rule: OracleRule) -> Result<HaarFIntegral> {
    q.validate()?;
    let zero = Complex64::default();
    let first_nonzero = |c: &[Complex64]| c.iter().position(|x| *x != zero);
    let worst = [first_nonzero(&profile.coeffs), first_nonzero(&profile.neg_coeffs)]
        .into_iter()
        .flatten()
        .min();
    let Some(s0) = worst else {
        return Ok(HaarFIntegral::default());
    };
    let origin_power = s0 as f64 + profile.lambda - 2.0;
    if origin_power <= -1.0 {
        return Err(Error::Divergence {
            detail: format!(
                "f_hat(w)/w ~ w^{origin_power} at the origin for profile `{}`",
                profile.name
            ),
        });
    }
    let mut panel: f64 = 0.5;
    if q.oscillation == OscillationHandling::SubdividePerPeriod && b != 0.0 {
        panel = panel.min(0.5 * PI / b.abs());
    }
    let (cutoff, algebraic_tail) = match q.cutoff {
        CutoffStrategy::Fixed(w) => (w, None),
        CutoffStrategy::DecayBased(tol) => {
            let c = profile.cutoff(tol);
            if c <= MAX_DIRECT_CUTOFF {
                (c, None)
            } else {
                let order = match profile.decay {
                    DecayClass::Polynomial { order } => order,
                    _ => 1.0,
                };
                (f64::INFINITY, Some(order))
            }
        }
    };
    let geom = HalfLine {
        cutoff,
        panel,
        algebraic_tail,
        alignment: if b != 0.0 { 2.0 * PI / b.abs() } else { 1.0 },
    };
    let pos = |w: f64| profile.eval(w) * Complex64::from_polar(1.0, b * w) / w;
    let neg = |w: f64| -profile.eval(-w) * Complex64::from_polar(1.0, -b * w) / w;
    let (p, _) = integrate_half_line(&pos, geom, rule, q)?;
    let (n, _) = integrate_half_line(&neg, geom, rule, q)?;
    Ok(HaarFIntegral {
        positive: p.value,
        negative: n.value,
    })
}

/// Real samples `f(start + k step)` of a time-domain signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub start: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, start: f64, end: f64, points: usize) -> Result<Self> {
        if points < 4 || !(end > start) {
            return Err(Error::InvalidArgument(format!(
                "need at least 4 samples on a nonempty interval, got {points} on [{start}, {end}]"
            )));
        }
        let step = (end - start) / (points - 1) as f64;
        Ok(Self {
            start,
            step,
            values: (0..points).map(|k| f(start + k as f64 * step)).collect(),
        })
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    /// Integral of the piecewise-cubic (4-point Lagrange) interpolant over
    /// `[lo, hi]`; each cell is integrated exactly by 2-point Gauss.
    pub fn integrate(&self, lo: f64, hi: f64) -> Result<f64> {
        let end = self.end();
        let slack = 1e-12 * self.step;
        if lo < self.start - slack || hi > end + slack || self.values.len() < 4 {
            return Err(Error::GridCoverage {
                start: self.start,
                end,
                need_lo: lo,
                need_hi: hi,
            });
        }
        let lo = lo.max(self.start);
        let hi = hi.min(end);
        let cells = self.values.len() - 1;
        let first = (((lo - self.start) / self.step).floor() as usize).min(cells - 1);
        let last = (((hi - self.start) / self.step).ceil() as usize).clamp(first + 1, cells);
        let g = 0.5 / 3f64.sqrt();
        let mut total = CompensatedSum::default();
        for cell in first..last {
            let c0 = self.start + cell as f64 * self.step;
            let x0 = c0.max(lo);
            let x1 = (c0 + self.step).min(hi);
            if x1 <= x0 {
                continue;
            }
            let base = cell.saturating_sub(1).min(self.values.len() - 4);
            let mid = 0.5 * (x0 + x1);
            let half = x1 - x0;
            let v = self.cubic(base, mid - g * half) + self.cubic(base, mid + g * half);
            total.add(0.5 * half * v);
        }
        Ok(total.total())
    }

    fn cubic(&self, base: usize, x: f64) -> f64 {
        let t = (x - self.start) / self.step - base as f64;
        let y = &self.values[base..base + 4];
        let (t0, t1, t2, t3) = (t, t - 1.0, t - 2.0, t - 3.0);
        -y[0] * t1 * t2 * t3 / 6.0 + y[1] * t0 * t2 * t3 / 2.0 - y[2] * t0 * t1 * t3 / 2.0 + y[3] * t0 * t1 * t2 / 6.0
    }
}

/// `(1/sqrt(a)) int f(t) psi((t - b)/a) dt` for the Haar wavelet, from
/// samples of a real `f`.
pub fn cwt_time_domain_oracle(samples: &SampledFunction, wavelet: &WaveletSpec, b: f64, a: f64) -> Result<Complex64> {
    if !matches!(wavelet.kind, WaveletKind::Haar) {
        return Err(Error::WrongWavelet {
            op: "cwt_time_domain_oracle",
            expected: "Haar",
            got: wavelet.to_string(),
        });
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale a must be positive, got {a}")));
    }
    let up = samples.integrate(b, b + 0.5 * a)?;
    let down = samples.integrate(b + 0.5 * a, b + a)?;
    Ok(Complex64::new((up - down) / a.sqrt(), 0.0))
}
