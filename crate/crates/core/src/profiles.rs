//! Test spectra `f_hat(w)` with known small-`w` expansions
//! `f_hat(w) ~ sum_s c_s w^(s + lambda - 1)`, the shifted coefficients `d_s`
//! of `g(w) = exp(i b w) f_hat(w)`, and numeric checks of the hypotheses the
//! expansions rely on.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mellin::WaveletSpec;

/// Number of origin coefficients stored for built-in families.
pub const DEFAULT_COEFFS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileFamily {
    /// Identically zero.
    Zero,
    /// `|w|^(lambda-1) exp(-kappa w^2)`.
    Gauss { kappa: f64 },
    /// `|w|^(lambda-1) / (1 + kappa w^2)`.
    Rational { kappa: f64 },
    /// `|w|^lambda exp(-kappa w^2)`; its leading coefficient vanishes.
    HaarAdmissible { kappa: f64 },
    /// The Haar wavelet's own spectrum `psi_hat(w)`, lambda = 1.
    HaarSpectrum,
}

impl ProfileFamily {
    pub fn id(&self) -> &'static str {
        match self {
            ProfileFamily::Zero => "zero",
            ProfileFamily::Gauss { .. } => "gauss",
            ProfileFamily::Rational { .. } => "rational",
            ProfileFamily::HaarAdmissible { .. } => "haar-admissible",
            ProfileFamily::HaarSpectrum => "haar-spectrum",
        }
    }

    fn kappa(&self) -> f64 {
        match *self {
            ProfileFamily::Gauss { kappa } | ProfileFamily::Rational { kappa } | ProfileFamily::HaarAdmissible { kappa } => kappa,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayClass {
    /// `|f_hat| <= C |w|^k exp(-rate w^2)`.
    Gaussian { rate: f64 },
    /// `|f_hat| <= C |w|^(-order)`.
    Polynomial { order: f64 },
    /// `|f_hat| <= C exp(-rate |w|)`.
    Exponential { rate: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreqProfile {
    pub name: String,
    pub family: ProfileFamily,
    pub lambda: f64,
    /// Coefficients of `f_hat(w)` for `w > 0`.
    pub coeffs: Vec<Complex64>,
    /// Coefficients of `f_hat(-w)` for `w > 0`.
    pub neg_coeffs: Vec<Complex64>,
    pub decay: DecayClass,
    /// `f_hat(w) = O(exp(sigma w^2))`; `None` when `f_hat` is bounded.
    pub sigma_bound: Option<f64>,
    /// Largest m for which `f_hat^(m)` is continuous away from the origin.
    pub smoothness_m: usize,
}

impl FreqProfile {
    /// Builds a profile of the given family with `DEFAULT_COEFFS` coefficients.
    pub fn new(name: impl Into<String>, family: ProfileFamily, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::InvalidArgument(format!("lambda must lie in (0, 1], got {lambda}")));
        }
        let kappa = family.kappa();
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
        }
        if matches!(family, ProfileFamily::HaarSpectrum) && lambda != 1.0 {
            return Err(Error::InvalidArgument("haar-spectrum profile has lambda = 1".into()));
        }
        let coeffs = family_coeffs(family, DEFAULT_COEFFS);
        let neg_coeffs = match family {
            // psi_hat(-w) = conj(psi_hat(w)) for the real Haar wavelet.
            ProfileFamily::HaarSpectrum => coeffs.iter().map(|c| c.conj()).collect(),
            _ => coeffs.clone(),
        };
        let decay = match family {
            ProfileFamily::Zero => DecayClass::Gaussian { rate: 1.0 },
            ProfileFamily::Gauss { kappa } | ProfileFamily::HaarAdmissible { kappa } => DecayClass::Gaussian { rate: kappa },
            ProfileFamily::Rational { .. } => DecayClass::Polynomial { order: 3.0 - lambda },
            ProfileFamily::HaarSpectrum => DecayClass::Polynomial { order: 1.0 },
        };
        Ok(Self {
            name: name.into(),
            family,
            lambda,
            coeffs,
            neg_coeffs,
            decay,
            sigma_bound: None,
            smoothness_m: usize::MAX,
        })
    }

    /// Replaces the origin coefficients (both half-lines; the built-in
    /// families are even in `w`).
    pub fn with_coeffs(mut self, coeffs: Vec<Complex64>) -> Self {
        self.neg_coeffs = coeffs.clone();
        self.coeffs = coeffs;
        self
    }

    pub fn with_decay(mut self, decay: DecayClass) -> Self {
        self.decay = decay;
        self
    }

    /// `f_hat(w)` for real `w`.
    pub fn eval(&self, w: f64) -> Complex64 {
        let lam = self.lambda;
        let a = w.abs();
        match self.family {
            ProfileFamily::Zero => Complex64::default(),
            ProfileFamily::Gauss { kappa } => real(a.powf(lam - 1.0) * (-kappa * w * w).exp()),
            ProfileFamily::Rational { kappa } => real(a.powf(lam - 1.0) / (1.0 + kappa * w * w)),
            ProfileFamily::HaarAdmissible { kappa } => real(a.powf(lam) * (-kappa * w * w).exp()),
            ProfileFamily::HaarSpectrum => WaveletSpec::haar().psi_hat(w),
        }
    }

    /// Derivatives `f_hat^(j)(w)` for `j <= 2` and `w != 0`, in closed form.
    pub fn derivative(&self, w: f64, j: usize) -> Result<Complex64> {
        if j > 2 || w == 0.0 {
            return Err(Error::InvalidArgument(format!("closed-form derivatives need j <= 2 and w != 0, got j = {j}, w = {w}")));
        }
        if let ProfileFamily::HaarSpectrum = self.family {
            // psi_hat = P(w) / (i w) with P = (u - 1)^2, u = exp(-i w / 2).
            let u = Complex64::from_polar(1.0, -0.5 * w);
            let i = Complex64::new(0.0, 1.0);
            let p = [(u - 1.0) * (u - 1.0), -i * (u - 1.0) * u, -0.5 * u * (2.0 * u - 1.0)];
            let q = [1.0 / w, -1.0 / (w * w), 2.0 / (w * w * w)].map(|v| Complex64::new(v, 0.0) / i);
            return Ok(leibniz(&p, &q, j));
        }
        // Even families f(w) = F(|w|) with F = w^mu * E(w).
        let x = w.abs();
        let sign = if w < 0.0 && j == 1 { -1.0 } else { 1.0 };
        let (mu, env) = match self.family {
            ProfileFamily::Zero => return Ok(Complex64::default()),
            ProfileFamily::Gauss { kappa } | ProfileFamily::HaarAdmissible { kappa } => {
                let e = (-kappa * x * x).exp();
                let mu = if matches!(self.family, ProfileFamily::Gauss { .. }) { self.lambda - 1.0 } else { self.lambda };
                (mu, [e, -2.0 * kappa * x * e, (4.0 * kappa * kappa * x * x - 2.0 * kappa) * e])
            }
            ProfileFamily::Rational { kappa } => {
                let r = 1.0 / (1.0 + kappa * x * x);
                (self.lambda - 1.0, [r, -2.0 * kappa * x * r * r, -2.0 * kappa * r * r + 8.0 * kappa * kappa * x * x * r * r * r])
            }
            ProfileFamily::HaarSpectrum => unreachable!(),
        };
        let pw = [x.powf(mu), mu * x.powf(mu - 1.0), mu * (mu - 1.0) * x.powf(mu - 2.0)].map(|v| Complex64::new(v, 0.0));
        let env = env.map(|v| Complex64::new(v, 0.0));
        Ok(leibniz(&pw, &env, j) * sign)
    }

    /// Upper bound of `|f_hat(w)|` valid for `|w| >= 1`.
    pub fn envelope(&self, w: f64) -> f64 {
        let a = w.abs();
        let lam = self.lambda;
        match self.family {
            ProfileFamily::Zero => 0.0,
            ProfileFamily::Gauss { kappa } => a.powf(lam - 1.0) * (-kappa * a * a).exp(),
            ProfileFamily::Rational { kappa } => a.powf(lam - 3.0) / kappa,
            ProfileFamily::HaarAdmissible { kappa } => a.powf(lam) * (-kappa * a * a).exp(),
            ProfileFamily::HaarSpectrum => 4.0 / a,
        }
    }

    /// Smallest `W >= 1` (to bisection accuracy) with `envelope(w) < tol`
    /// for all `|w| > W`.
    pub fn cutoff(&self, tol: f64) -> f64 {
        if matches!(self.family, ProfileFamily::Zero) {
            return 1.0;
        }
        // Envelopes are decreasing once past their peak, which lies below
        // max(1, 1/sqrt(kappa)).
        let mut lo = 1.0f64.max(1.0 / self.family.kappa().sqrt());
        if self.envelope(lo) < tol {
            return lo;
        }
        let mut hi = 2.0 * lo;
        while self.envelope(hi) >= tol {
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.envelope(mid) < tol {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        hi
    }

    /// `f_hat(w) - sum_{s<n} c_s w^(s+lambda-1)` for `w > 0`.
    pub fn origin_remainder(&self, w: f64, n: usize) -> Complex64 {
        let base = w.powf(self.lambda - 1.0);
        let mut series = Complex64::default();
        let mut power = 1.0;
        for c in self.coeffs.iter().take(n) {
            series += c * power;
            power *= w;
        }
        self.eval(w) - series * base
    }

    /// First `n <= max_n` for which the stored coefficients fail to
    /// reproduce `f_hat` to order `w^(n+lambda-1)` on either half-line,
    /// judged on `w = 1e-1, 1e-2, 1e-3` with an allowance for cancellation.
    pub fn origin_expansion_mismatch(&self, max_n: usize) -> Option<usize> {
        let base = |w: f64| w.powf(self.lambda - 1.0);
        let ratio = |coeffs: &[Complex64], sign: f64, w: f64, n: usize| {
            let series: Complex64 = coeffs.iter().take(n).enumerate().map(|(s, c)| c * w.powi(s as i32)).sum();
            let value = self.eval(sign * w);
            let order = w.powf(n as f64 + self.lambda - 1.0);
            let gap = (value - series * base(w)).norm() / order;
            (gap, 64.0 * f64::EPSILON * value.norm().max((series * base(w)).norm()) / order)
        };
        (1..=max_n.min(self.coeffs.len())).find(|&n| {
            [(&self.coeffs, 1.0), (&self.neg_coeffs, -1.0)].iter().any(|(coeffs, sign)| {
                let (reference, _) = ratio(coeffs, *sign, 1e-1, n);
                [1e-2, 1e-3].iter().any(|&w| {
                    let (gap, roundoff) = ratio(coeffs, *sign, w, n);
                    gap > 10.0 * reference + roundoff
                })
            })
        })
    }

    /// Leading coefficient on either half-line is zero.
    pub fn has_vanishing_leading_coeff(&self) -> bool {
        self.coeffs.first().is_none_or(|c| c.norm() == 0.0) && self.neg_coeffs.first().is_none_or(|c| c.norm() == 0.0)
    }
}

/// `(p q)^(j)` from the derivatives of both factors, `j <= 2`.
pub(crate) fn leibniz(p: &[Complex64; 3], q: &[Complex64; 3], j: usize) -> Complex64 {
    match j {
        0 => p[0] * q[0],
        1 => p[1] * q[0] + p[0] * q[1],
        _ => p[2] * q[0] + 2.0 * p[1] * q[1] + p[0] * q[2],
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn family_coeffs(family: ProfileFamily, n: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::default(); n];
    match family {
        ProfileFamily::Zero => {}
        ProfileFamily::Gauss { kappa } => {
            // exp(-kappa w^2) = sum_k (-kappa)^k / k! w^(2k)
            let mut term = 1.0;
            for k in 0..n.div_ceil(2) {
                if 2 * k < n {
                    c[2 * k] = real(term);
                }
                term *= -kappa / (k + 1) as f64;
            }
        }
        ProfileFamily::Rational { kappa } => {
            let mut term = 1.0;
            for k in (0..n).step_by(2) {
                c[k] = real(term);
                term *= -kappa;
            }
        }
        ProfileFamily::HaarAdmissible { kappa } => {
            let mut term = 1.0;
            for k in 0.. {
                let s = 2 * k + 1;
                if s >= n {
                    break;
                }
                c[s] = real(term);
                term *= -kappa / (k + 1) as f64;
            }
        }
        ProfileFamily::HaarSpectrum => {
            // psi_hat(w) = (exp(-i w/2) - 1)^2 / (i w), with
            // exp(-i w/2) - 1 = sum_{k>=1} (-i/2)^k w^k / k!.
            let mut e = vec![Complex64::default(); n + 2];
            let mut term = Complex64::new(1.0, 0.0);
            for (k, slot) in e.iter_mut().enumerate().skip(1) {
                term *= Complex64::new(0.0, -0.5) / k as f64;
                *slot = term;
            }
            // square, then divide by i w (shift down by one)
            for s in 0..n {
                let mut acc = Complex64::default();
                for k in 1..=s {
                    acc += e[k] * e[s + 1 - k];
                }
                c[s] = acc / Complex64::new(0.0, 1.0);
            }
        }
    }
    c
}

/// Built-in profiles by name, with their default lambda unless overridden.
pub fn builtin_profile(name: &str, lambda: Option<f64>) -> Result<FreqProfile> {
    let (family, default_lambda) = match name {
        "gauss" => (ProfileFamily::Gauss { kappa: 1.0 }, 1.0),
        "rational" => (ProfileFamily::Rational { kappa: 1.0 }, 1.0),
        "haar-admissible" => (ProfileFamily::HaarAdmissible { kappa: 1.0 }, 0.5),
        "zero" => (ProfileFamily::Zero, 1.0),
        "haar-spectrum" => (ProfileFamily::HaarSpectrum, 1.0),
        _ => return Err(Error::InvalidArgument(format!("unknown profile `{name}`"))),
    };
    FreqProfile::new(name, family, lambda.unwrap_or(default_lambda))
}

/// The standard test spectra: `gauss` and `rational` at lambda = 1 and
/// `haar-admissible` at lambda = 1/2.
pub fn builtin_profiles() -> Vec<FreqProfile> {
    ["gauss", "rational", "haar-admissible"]
        .iter()
        .map(|n| builtin_profile(n, None).expect("built-in profile"))
        .collect()
}

/// Origin coefficients `d_s` of `g(w) = exp(i b w) f_hat(w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedCoeffs {
    pub b: f64,
    pub d: Vec<Complex64>,
}

/// `d_s = sum_{r=0}^{s} (i b)^r / r! c_{s-r}` for `s < n`.
pub fn shift_coeffs(profile: &FreqProfile, b: f64, n: usize) -> Result<ShiftedCoeffs> {
    check_available(profile, n)?;
    Ok(ShiftedCoeffs {
        b,
        d: convolve_exponential(&profile.coeffs, b, n),
    })
}

/// Coefficients of `g(-w) = exp(-i b w) f_hat(-w)` for `w > 0`, which drive
/// the negative-frequency half of the transform.
pub fn shift_coeffs_reflected(profile: &FreqProfile, b: f64, n: usize) -> Result<ShiftedCoeffs> {
    check_available(profile, n)?;
    Ok(ShiftedCoeffs {
        b: -b,
        d: convolve_exponential(&profile.neg_coeffs, -b, n),
    })
}

fn check_available(profile: &FreqProfile, n: usize) -> Result<()> {
    if n > profile.coeffs.len() {
        return Err(Error::InsufficientCoefficients {
            profile: profile.name.clone(),
            available: profile.coeffs.len(),
            requested: n,
        });
    }
    Ok(())
}

fn convolve_exponential(c: &[Complex64], b: f64, n: usize) -> Vec<Complex64> {
    let ib = Complex64::new(0.0, b);
    let mut taylor = Vec::with_capacity(n);
    let mut t = Complex64::new(1.0, 0.0);
    for r in 0..n {
        taylor.push(t);
        t = t * ib / (r + 1) as f64;
    }
    (0..n)
        .map(|s| (0..=s).map(|r| taylor[r] * c[s - r]).sum())
        .collect()
}

/// One hypothesis check with the numeric evidence behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub id: &'static str,
    pub passed: bool,
    pub witness: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub profile: String,
    pub wavelet: String,
    pub m: usize,
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Exponent margin used in the tail-decay check.
pub const TAIL_EPSILON: f64 = 0.5;

/// Central-difference derivative of order `j`, step `max(1e-4, 1e-4 |w|)`,
/// shrunk so the stencil never reaches the origin.
pub fn fd_derivative<F: Fn(f64) -> Complex64>(f: &F, w: f64, j: usize) -> Complex64 {
    let mut h = (1e-4f64).max(1e-4 * w.abs());
    if w != 0.0 {
        h = h.min(w.abs() / (2.0 * j.max(1) as f64));
    }
    fn rec<F: Fn(f64) -> Complex64>(f: &F, w: f64, j: usize, h: f64) -> Complex64 {
        if j == 0 {
            f(w)
        } else {
            (rec(f, w + h, j - 1, h) - rec(f, w - h, j - 1, h)) / (2.0 * h)
        }
    }
    rec(f, w, j, h)
}

/// Numeric checks of the four standing hypotheses for the pair
/// (profile, wavelet) at smoothness order `m`. Failures are reported, not
/// raised.
pub fn check_hypotheses(profile: &FreqProfile, wavelet: &WaveletSpec, m: usize) -> HypothesisReport {
    let f = |w: f64| profile.eval(w);
    let mut checks = Vec::with_capacity(4);

    // (i) f_hat^(m) continuous away from the origin: sampled derivatives are
    // finite and free of jumps on a fine grid of both half-lines.
    {
        let mut worst: f64 = 0.0;
        let mut finite = true;
        for sign in [1.0, -1.0] {
            let mut prev: Option<Complex64> = None;
            for k in 0..400 {
                let w = sign * (0.05 + 0.025 * k as f64);
                let d = fd_derivative(&f, w, m);
                if !(d.re.is_finite() && d.im.is_finite()) {
                    finite = false;
                }
                if let Some(p) = prev {
                    let jump = (d - p).norm() / (1.0 + p.norm().max(d.norm()));
                    worst = worst.max(jump);
                }
                prev = Some(d);
            }
        }
        let passed = finite && worst < 0.5 && profile.smoothness_m >= m;
        checks.push(HypothesisCheck {
            id: "continuity",
            passed,
            witness: worst,
            note: format!("max relative jump of the order-{m} derivative on |w| in [0.05, 10]"),
        });
    }

    // (ii) origin expansion holds, and survives m differentiations: the
    // remainder after N terms, divided by w^(N + lambda - 1 - j), stays
    // bounded as w shrinks.
    {
        let n = profile.coeffs.len().min(4);
        let mut worst_growth: f64 = 0.0;
        for j in 0..=m {
            let rem = |w: f64| profile.origin_remainder(w, n);
            let ratio = |w: f64| {
                let d = if j == 0 { rem(w) } else { fd_derivative(&rem, w, j) };
                d.norm() / w.powf(n as f64 + profile.lambda - 1.0 - j as f64)
            };
            let grid: &[f64] = if j == 0 { &[1e-1, 1e-2, 1e-3] } else { &[0.3, 0.1, 0.03] };
            let r0 = ratio(grid[0]);
            for &w in &grid[1..] {
                let r = ratio(w);
                let growth = if r0 > 1e-12 { r / r0 } else if r > 1e-6 { f64::INFINITY } else { 0.0 };
                worst_growth = worst_growth.max(growth);
            }
        }
        checks.push(HypothesisCheck {
            id: "origin_expansion",
            passed: worst_growth <= 10.0,
            witness: worst_growth,
            note: format!("growth of the {n}-term remainder ratio as w -> 0, derivatives up to {m}"),
        });
    }

    // (iii) kernel conditions: rho + lambda > 0, plus the tail form.
    {
        let margin = wavelet.rho() + profile.lambda;
        let note = match wavelet.tail() {
            Some(t) => format!(
                "rho + lambda = {margin}; tail exp(i {} t^{}) t^-{} (non-oscillatory 1/t part carried by F(b))",
                t.tau, t.p, t.beta
            ),
            None => format!("rho + lambda = {margin}; kernel decays like a Gaussian"),
        };
        checks.push(HypothesisCheck {
            id: "kernel",
            passed: margin > 0.0,
            witness: margin,
            note,
        });
    }

    // (iv) w^(-beta) |f_hat^(j)(w)| = O(w^(-1-eps)) as w -> inf, j <= m.
    {
        let beta = wavelet.tail().map_or(1.0, |t| t.beta);
        let mut worst: f64 = 0.0;
        let mut first: f64 = 0.0;
        for j in 0..=m {
            let samples: Vec<f64> = (0..=40)
                .map(|k| {
                    let w = 10f64 * 100f64.powf(k as f64 / 40.0);
                    fd_derivative(&f, w, j).norm() * w.powf(1.0 + TAIL_EPSILON - beta)
                })
                .collect();
            first = first.max(samples[0]);
            worst = worst.max(samples.iter().copied().fold(0.0, f64::max));
        }
        let growth = if first > 0.0 { worst / first } else if worst > 0.0 { f64::INFINITY } else { 0.0 };
        checks.push(HypothesisCheck {
            id: "tail_decay",
            passed: growth <= 10.0,
            witness: growth,
            note: format!("sup over w in [10, 1e3] of w^(1+{TAIL_EPSILON}-beta)|f_hat^(j)|, relative to w = 10"),
        });
    }

    HypothesisReport {
        profile: profile.name.clone(),
        wavelet: wavelet.to_string(),
        m,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gauss_eval_and_coeffs() {
        let p = builtin_profile("gauss", Some(1.0)).unwrap();
        assert!((p.eval(0.1).re - (-0.01f64).exp()).abs() < 1e-15);
        assert_eq!(&p.coeffs[..5], &[c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
    }

    #[test]
    fn rational_coeffs() {
        let p = builtin_profile("rational", Some(1.0)).unwrap();
        let re: Vec<f64> = p.coeffs[..5].iter().map(|c| c.re).collect();
        assert_eq!(re, vec![1.0, 0.0, -1.0, 0.0, 1.0]);
        assert_eq!(p.decay, DecayClass::Polynomial { order: 2.0 });
    }

    #[test]
    fn haar_admissible_leading_behaviour() {
        let p = builtin_profile("haar-admissible", Some(0.5)).unwrap();
        assert_eq!(p.coeffs[0], c(0.0, 0.0));
        let w: f64 = 1e-6;
        assert!((p.eval(w).re / w.powf(0.5) - 1.0).abs() < 1e-10);
        assert!(p.has_vanishing_leading_coeff());
    }

    #[test]
    fn haar_spectrum_coeffs_match_eval() {
        let p = builtin_profile("haar-spectrum", None).unwrap();
        assert_eq!(p.coeffs[0], c(0.0, 0.0));
        for w in [0.05, 0.1, 0.2] {
            let rem = p.origin_remainder(w, 8).norm();
            assert!(rem < 1e-9, "w = {w}: {rem}");
        }
    }

    #[test]
    fn lambda_out_of_range() {
        assert!(builtin_profile("gauss", Some(0.0)).is_err());
        assert!(builtin_profile("gauss", Some(1.5)).is_err());
        assert!(builtin_profile("nope", None).is_err());
    }

    #[test]
    fn shift_examples() {
        let p = builtin_profile("rational", Some(1.0)).unwrap();
        let d = shift_coeffs(&p, 0.0, 6).unwrap();
        assert_eq!(d.d, p.coeffs[..6].to_vec());

        let p = p.with_coeffs(vec![c(1.0, 0.0); 3]);
        let d = shift_coeffs(&p, 1.0, 3).unwrap().d;
        let expected = [c(1.0, 0.0), c(1.0, 1.0), c(0.5, 1.0)];
        for (x, y) in d.iter().zip(expected) {
            assert!((x - y).norm() < 1e-15);
        }

        let p = p.with_coeffs(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let d = shift_coeffs(&p, 2.0, 2).unwrap().d;
        assert_eq!(d, vec![c(0.0, 0.0), c(1.0, 0.0)]);

        assert!(matches!(
            shift_coeffs(&p, 2.0, 3),
            Err(Error::InsufficientCoefficients { .. })
        ));
    }

    #[test]
    fn shift_matches_direct_double_loop() {
        let p = builtin_profile("gauss", Some(0.7)).unwrap();
        for b in [0.0, 1.0, -2.5] {
            let d = shift_coeffs(&p, b, 8).unwrap().d;
            for (s, ds) in d.iter().enumerate().take(8) {
                let mut direct = Complex64::default();
                for r in 0..=s {
                    let fact: f64 = (1..=r).map(|k| k as f64).product();
                    direct += Complex64::new(0.0, b).powu(r as u32) / fact * p.coeffs[s - r];
                }
                assert!((direct - ds).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn hypotheses_examples() {
        let p1 = builtin_profile("gauss", Some(1.0)).unwrap();
        let r = check_hypotheses(&p1, &WaveletSpec::mexican_hat(), 2);
        assert!(r.all_passed(), "{r:#?}");

        let p2 = builtin_profile("rational", Some(1.0)).unwrap();
        let r = check_hypotheses(&p2, &WaveletSpec::morlet(2.0).unwrap(), 0);
        assert!(r.all_passed(), "{r:#?}");

        let z = builtin_profile("zero", None).unwrap();
        for w in [WaveletSpec::haar(), WaveletSpec::mexican_hat()] {
            assert!(check_hypotheses(&z, &w, 1).all_passed());
        }
    }

    #[test]
    fn haar_spectrum_tail_is_fast_enough() {
        // |psi_hat| ~ 1/w and beta = 1 give w^-2 = O(w^(-1-eps)).
        let p = builtin_profile("haar-spectrum", None).unwrap();
        let r = check_hypotheses(&p, &WaveletSpec::haar(), 0);
        assert!(r.all_passed(), "{r:#?}");
    }

    #[test]
    fn origin_mismatch_detects_wrong_coefficients() {
        for p in builtin_profiles() {
            assert_eq!(p.origin_expansion_mismatch(6), None, "{}", p.name);
        }
        let spectrum = builtin_profile("haar-spectrum", None).unwrap();
        assert_eq!(spectrum.origin_expansion_mismatch(6), None);
        let p = builtin_profile("gauss", Some(0.5)).unwrap();
        let wrong = p.clone().with_coeffs(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert_eq!(wrong.origin_expansion_mismatch(6), Some(3));
    }

    #[test]
    fn closed_form_derivatives_match_differences() {
        for (name, lambda) in [("gauss", 0.6), ("rational", 1.0), ("haar-admissible", 0.5), ("haar-spectrum", 1.0)] {
            let p = builtin_profile(name, Some(lambda)).unwrap();
            let f = |w: f64| p.eval(w);
            for w in [-2.0, -0.4, 0.3, 1.7] {
                for j in 0..=2 {
                    let exact = p.derivative(w, j).unwrap();
                    let fd = fd_derivative(&f, w, j);
                    assert!((exact - fd).norm() < 1e-6 * (1.0 + exact.norm()), "{name} w={w} j={j}: {exact} vs {fd}");
                }
            }
        }
    }

    #[test]
    fn cutoff_brackets_envelope() {
        let p = builtin_profile("gauss", Some(0.5)).unwrap();
        let w = p.cutoff(1e-17);
        assert!(p.envelope(w) < 1e-17 && p.envelope(0.99 * w) >= 1e-17);
        let r = builtin_profile("rational", Some(1.0)).unwrap();
        assert!((r.cutoff(1e-6) - 1e3).abs() < 1e-6);
    }
}
