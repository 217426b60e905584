//! Mother wavelets and generalized Mellin transforms of their conjugated
//! Fourier transforms.
//!
//! The generalized transform is
//! `M[h; z] = lim_{eps -> 0+} int_0^inf t^(z-1) h(t) exp(-eps t^p) dt`.
//! Closed forms are provided for the three wavelet kernels; the numeric
//! evaluator [`mellin_regularized`] is the independent check on them.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{
    exp_sinh, gauss_legendre_adaptive, tanh_sinh, wynn_epsilon, CompensatedSum, Tolerance, TANH_SINH_MAX_LEVEL,
};
use crate::special_fn::{gamma_real, parabolic_cylinder_d};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveletKind {
    /// `psi(t) = exp(i omega0 t - t^2/2)`.
    Morlet { omega0: f64 },
    /// `psi(t) = (1 - t^2) exp(-t^2/2)`.
    MexicanHat,
    /// `+1` on `[0, 1/2)`, `-1` on `[1/2, 1)`.
    Haar,
}

/// Large-argument form `h(t) ~ exp(i tau t^p) sum_s b_s t^(-s-beta)` of the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailParams {
    pub tau: f64,
    pub p: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletSpec {
    pub kind: WaveletKind,
}

impl WaveletSpec {
    pub fn morlet(omega0: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::InvalidArgument(format!("Morlet omega0 must be positive, got {omega0}")));
        }
        Ok(Self {
            kind: WaveletKind::Morlet { omega0 },
        })
    }

    pub fn mexican_hat() -> Self {
        Self {
            kind: WaveletKind::MexicanHat,
        }
    }

    pub fn haar() -> Self {
        Self { kind: WaveletKind::Haar }
    }

    /// Parses `morlet:OMEGA0`, `mexican` or `haar`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        match text {
            "mexican" | "mexican-hat" | "mexican_hat" => Ok(Self::mexican_hat()),
            "haar" => Ok(Self::haar()),
            _ => {
                if let Some(rest) = text.strip_prefix("morlet:") {
                    let omega0 = rest
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidArgument(format!("bad Morlet frequency `{rest}`")))?;
                    Self::morlet(omega0)
                } else {
                    Err(Error::InvalidArgument(format!(
                        "unknown wavelet `{text}` (expected morlet:OMEGA0, mexican or haar)"
                    )))
                }
            }
        }
    }

    /// Short identifier used in reports: `morlet`, `mexican_hat`, `haar`.
    pub fn id(&self) -> &'static str {
        match self.kind {
            WaveletKind::Morlet { .. } => "morlet",
            WaveletKind::MexicanHat => "mexican_hat",
            WaveletKind::Haar => "haar",
        }
    }

    /// Order `rho` with `h(w) = O(w^rho)` as `w -> 0`.
    pub fn rho(&self) -> f64 {
        match self.kind {
            WaveletKind::Morlet { .. } => 0.0,
            WaveletKind::MexicanHat => 2.0,
            WaveletKind::Haar => 1.0,
        }
    }

    /// Algebraic-oscillatory tail parameters, `None` for kernels that decay
    /// like a Gaussian.
    pub fn tail(&self) -> Option<TailParams> {
        match self.kind {
            // Slowest phase is exp(i t / 2); the 1/t envelope gives beta = 1.
            WaveletKind::Haar => Some(TailParams {
                tau: 0.5,
                p: 1.0,
                beta: 1.0,
            }),
            _ => None,
        }
    }

    /// Fourier transform `psi_hat(w) = int exp(-i w t) psi(t) dt`.
    pub fn psi_hat(&self, w: f64) -> Complex64 {
        self.psi_hat_conj(w).conj()
    }

    /// `conj(psi_hat(w))`, the kernel `h` of the Mellin convolution.
    pub fn psi_hat_conj(&self, w: f64) -> Complex64 {
        match self.kind {
            WaveletKind::Morlet { omega0 } => {
                let d = w - omega0;
                Complex64::new(SQRT_2PI * (-0.5 * d * d).exp(), 0.0)
            }
            WaveletKind::MexicanHat => Complex64::new(SQRT_2PI * w * w * (-0.5 * w * w).exp(), 0.0),
            WaveletKind::Haar => {
                if w == 0.0 {
                    return Complex64::default();
                }
                // conj of psi_hat(w) = 4i exp(-i w/2) sin^2(w/4) / w
                let s = (0.25 * w).sin();
                Complex64::new(0.0, -4.0 * s * s / w) * Complex64::from_polar(1.0, 0.5 * w)
            }
        }
    }

    /// Haar kernel in the expanded form `(i/w)(1 - 2 exp(i w/2) + exp(i w))`.
    pub fn haar_kernel_expanded(w: f64) -> Complex64 {
        let bracket = Complex64::new(1.0, 0.0) - 2.0 * Complex64::from_polar(1.0, 0.5 * w) + Complex64::from_polar(1.0, w);
        Complex64::new(0.0, 1.0 / w) * bracket
    }

    /// Time-domain mother wavelet `psi(t)`.
    pub fn psi(&self, t: f64) -> Complex64 {
        match self.kind {
            WaveletKind::Morlet { omega0 } => Complex64::from_polar((-0.5 * t * t).exp(), omega0 * t),
            WaveletKind::MexicanHat => Complex64::new((1.0 - t * t) * (-0.5 * t * t).exp(), 0.0),
            WaveletKind::Haar => {
                if (0.0..0.5).contains(&t) {
                    Complex64::new(1.0, 0.0)
                } else if (0.5..1.0).contains(&t) {
                    Complex64::new(-1.0, 0.0)
                } else {
                    Complex64::default()
                }
            }
        }
    }

    /// Radius beyond which `|h(+-u)|` stays below `tol`; `None` when the
    /// kernel only decays algebraically.
    pub fn kernel_cutoff(&self, tol: f64) -> Option<f64> {
        let tol = tol.max(1e-300);
        match self.kind {
            WaveletKind::Morlet { omega0 } => {
                let r = (2.0 * (SQRT_2PI / tol).ln().max(0.0)).sqrt();
                Some(omega0.abs() + r)
            }
            WaveletKind::MexicanHat => {
                // Solve sqrt(2 pi) u^2 exp(-u^2/2) = tol for u > sqrt(2).
                let mut u = (2.0 * (SQRT_2PI / tol).ln().max(1.0)).sqrt();
                for _ in 0..50 {
                    u = (2.0 * (SQRT_2PI * u * u / tol).ln().max(1.0)).sqrt();
                }
                Some(u)
            }
            WaveletKind::Haar => None,
        }
    }

    /// Period of the fastest oscillation of the kernel, if it oscillates.
    pub fn oscillation_period(&self) -> Option<f64> {
        match self.kind {
            WaveletKind::Haar => Some(2.0 * PI),
            _ => None,
        }
    }
}

impl fmt::Display for WaveletSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            WaveletKind::Morlet { omega0 } => write!(f, "morlet:{omega0}"),
            WaveletKind::MexicanHat => write!(f, "mexican"),
            WaveletKind::Haar => write!(f, "haar"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MellinMethod {
    ClosedForm,
    RegularizedQuadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinValue {
    pub z: Complex64,
    pub value: Complex64,
    pub method: MellinMethod,
    /// Estimated absolute error; zero for closed forms beyond rounding.
    pub error: f64,
}

impl MellinValue {
    fn closed(z: f64, value: Complex64) -> Self {
        Self {
            z: Complex64::new(z, 0.0),
            value,
            method: MellinMethod::ClosedForm,
            error: 0.0,
        }
    }
}

/// Quadrature controls for [`mellin_regularized`].
#[derive(Debug, Clone, PartialEq)]
pub struct MellinQuadrature {
    /// `h(t) = O(t^order)` at the origin.
    pub origin_order: f64,
    /// Period of the kernel's slowest oscillation; panels are half a period.
    pub oscillation_period: Option<f64>,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Number of half-period panels fed to the epsilon algorithm.
    pub panels: usize,
}

impl Default for MellinQuadrature {
    fn default() -> Self {
        Self {
            origin_order: 0.0,
            oscillation_period: None,
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            panels: 48,
        }
    }
}

pub const DEFAULT_EPS_SEQUENCE: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Regularized Mellin transform by quadrature at each `eps`, followed by
/// polynomial (Richardson) extrapolation of the last three values to
/// `eps = 0`.
pub fn mellin_regularized<H>(h: H, z: Complex64, p: f64, eps_sequence: &[f64], q: &MellinQuadrature) -> Result<MellinValue>
where
    H: Fn(f64) -> Complex64 + Sync,
{
    if !(z.re + q.origin_order > 0.0) {
        return Err(Error::Domain {
            op: "mellin_regularized",
            detail: format!("Re(z) + origin order must be positive, got z = {z}, order = {}", q.origin_order),
        });
    }
    if eps_sequence.len() < 3 {
        return Err(Error::InvalidArgument("eps sequence needs at least three values".into()));
    }
    if eps_sequence.windows(2).any(|w| !(w[1] < w[0])) || eps_sequence.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidArgument("eps sequence must be positive and strictly decreasing".into()));
    }
    if *eps_sequence.last().unwrap() > 1e-6 {
        return Err(Error::InvalidArgument("eps sequence must end at or below 1e-6".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("regularization power p must be >= 1, got {p}")));
    }

    let mut values = Vec::with_capacity(eps_sequence.len());
    let mut inner_error: f64 = 0.0;
    for &eps in eps_sequence {
        let integrand = |t: f64| -> Complex64 {
            if t == 0.0 {
                return Complex64::default();
            }
            let power = (Complex64::new(t.ln(), 0.0) * (z - 1.0)).exp();
            power * h(t) * (-eps * t.powf(p)).exp()
        };
        let (value, err) = damped_integral(&integrand, q)?;
        inner_error = inner_error.max(err);
        values.push(value);
    }

    // Cauchy behaviour of the eps sequence.
    let n = values.len();
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let scale = 1.0 + values[n - 1].norm();
    if diffs[diffs.len() - 1] > 1e-3 * scale || diffs[diffs.len() - 1] > 10.0 * diffs[0].max(q.abs_tol) {
        return Err(Error::NonConvergence {
            op: "mellin_regularized",
            detail: format!("eps-sequence values do not settle: successive gaps {diffs:?}"),
        });
    }

    let xs = &eps_sequence[n - 3..];
    let ys = &values[n - 3..];
    let extrapolated = neville_at_zero(xs, ys);
    let linear = neville_at_zero(&xs[1..], &ys[1..]);
    let error = (extrapolated - linear).norm() + inner_error;
    Ok(MellinValue {
        z,
        value: extrapolated,
        method: MellinMethod::RegularizedQuadrature,
        error,
    })
}

fn neville_at_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let mut p: Vec<Complex64> = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (p[i] * xj - p[i + 1] * xi) * (1.0 / (xj - xi));
        }
    }
    p[0]
}

fn damped_integral<F>(f: &F, q: &MellinQuadrature) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    let tol = Tolerance::new(q.abs_tol, q.rel_tol);
    match q.oscillation_period {
        None => {
            let head = tanh_sinh(f, 0.0, 1.0, tol, TANH_SINH_MAX_LEVEL);
            let tail = exp_sinh(f, 1.0, tol, TANH_SINH_MAX_LEVEL);
            if !(head.converged && tail.converged) {
                return Err(Error::Accuracy {
                    op: "mellin_regularized",
                    error: head.error + tail.error,
                    evaluations: head.evaluations + tail.evaluations,
                });
            }
            Ok((head.value + tail.value, head.error + tail.error))
        }
        Some(period) => {
            let half = 0.5 * period;
            let first = tanh_sinh(f, 0.0, half, tol, TANH_SINH_MAX_LEVEL);
            let mut err = first.error;
            let mut sum = CompensatedSum::default();
            sum.add(first.value);
            let mut partial = Vec::with_capacity(q.panels + 1);
            partial.push(sum.total());
            for k in 1..=q.panels {
                let lo = k as f64 * half;
                let piece = gauss_legendre_adaptive(f, lo, lo + half, tol, 64);
                err += piece.error;
                sum.add(piece.value);
                partial.push(sum.total());
            }
            let (limit, accel_err) = wynn_epsilon(&partial);
            Ok((limit, err + accel_err))
        }
    }
}

/// `M[sqrt(2 pi) exp(-(w - omega0)^2 / 2); z]
///   = sqrt(2 pi) exp(-omega0^2/4) Gamma(z) D_{-z}(-omega0)`.
pub fn morlet_mellin(z: f64, omega0: f64) -> Result<MellinValue> {
    positive_z("morlet_mellin", z)?;
    let value = SQRT_2PI * (-0.25 * omega0 * omega0).exp() * gamma_real(z)? * parabolic_cylinder_d(z, -omega0)?;
    Ok(MellinValue::closed(z, Complex64::new(value, 0.0)))
}

/// Mellin transform of the reflected Morlet kernel `w -> h(-w)`, which
/// carries `D_{-z}(+omega0)`.
pub fn morlet_mellin_reflected(z: f64, omega0: f64) -> Result<MellinValue> {
    positive_z("morlet_mellin_reflected", z)?;
    let value = SQRT_2PI * (-0.25 * omega0 * omega0).exp() * gamma_real(z)? * parabolic_cylinder_d(z, omega0)?;
    Ok(MellinValue::closed(z, Complex64::new(value, 0.0)))
}

/// `M[sqrt(2 pi) w^2 exp(-w^2/2); z] = sqrt(pi) 2^((z+1)/2) Gamma((z+2)/2)`.
/// The kernel is even, so this also serves the reflected half-line.
pub fn mexican_mellin(z: f64) -> Result<MellinValue> {
    positive_z("mexican_mellin", z)?;
    let value = PI.sqrt() * 2f64.powf(0.5 * (z + 1.0)) * gamma_real(0.5 * (z + 2.0))?;
    Ok(MellinValue::closed(z, Complex64::new(value, 0.0)))
}

/// Where a Haar component value will be used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripContext {
    /// A standalone component; only `0 < z < 1` is a convergent integral.
    Raw,
    /// Inside the combined Haar kernel, where the analytic continuation of
    /// the component is what the expansion consumes.
    CombinedKernel,
}

/// `M[exp(i c t); z] = |c|^(-z) exp(sign(c) i pi z / 2) Gamma(z)`.
pub fn haar_mellin_component(z: f64, c: f64, context: StripContext) -> Result<MellinValue> {
    if !(c != 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("frequency c must be nonzero, got {c}")));
    }
    match context {
        StripContext::Raw if !(z > 0.0 && z < 1.0) => return Err(Error::StripViolation { z }),
        _ => positive_z("haar_mellin_component", z)?,
    }
    let phase = c.signum() * 0.5 * PI * z;
    let value = c.abs().powf(-z) * gamma_real(z)? * Complex64::from_polar(1.0, phase);
    Ok(MellinValue::closed(z, value))
}

/// Mellin transform of the oscillatory part `(i/w)(-2 exp(i w/2) + exp(i w))`
/// of the Haar kernel: `-(2^z - 1) exp(i pi z / 2) Gamma(z - 1)`, for `z > 1`.
///
/// The non-oscillatory `i/w` part is handled exactly by the `F(b)` integral.
pub fn haar_kernel_mellin(z: f64) -> Result<MellinValue> {
    if !(z > 1.0) {
        return Err(Error::Domain {
            op: "haar_kernel_mellin",
            detail: format!("requires z > 1 (z = s + lambda with s >= 1), got {z}"),
        });
    }
    let half = haar_mellin_component(z - 1.0, 0.5, StripContext::CombinedKernel)?;
    let full = haar_mellin_component(z - 1.0, 1.0, StripContext::CombinedKernel)?;
    let value = Complex64::new(0.0, 1.0) * (full.value - 2.0 * half.value);
    Ok(MellinValue::closed(z, value))
}

/// Reflected counterpart of [`haar_kernel_mellin`]; `h(-w) = conj(h(w))`.
pub fn haar_kernel_mellin_reflected(z: f64) -> Result<MellinValue> {
    let mut v = haar_kernel_mellin(z)?;
    v.value = v.value.conj();
    Ok(v)
}

fn positive_z(op: &'static str, z: f64) -> Result<()> {
    if z > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            op,
            detail: format!("z must be positive, got {z}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn haar_forms_agree() {
        let w = WaveletSpec::haar();
        for k in 1..200 {
            let x = -25.0 + 0.25 * k as f64 + 0.013;
            let a = w.psi_hat_conj(x);
            let b = WaveletSpec::haar_kernel_expanded(x);
            assert!((a - b).norm() < 1e-12, "x = {x}");
        }
        assert_eq!(w.psi_hat_conj(0.0), Complex64::default());
        // psi_hat itself in product form
        let x: f64 = 3.7;
        let product = Complex64::new(0.0, 4.0 * (x / 4.0).sin().powi(2) / x) * Complex64::from_polar(1.0, -x / 2.0);
        assert!((w.psi_hat(x) - product).norm() < 1e-15);
    }

    #[test]
    fn kernel_pointwise_forms() {
        let m = WaveletSpec::morlet(2.0).unwrap();
        let x: f64 = 1.3;
        assert!((m.psi_hat_conj(x).re - SQRT_2PI * (-(x - 2.0).powi(2) / 2.0).exp()).abs() < 1e-15);
        let mh = WaveletSpec::mexican_hat();
        assert!((mh.psi_hat_conj(x).re - SQRT_2PI * x * x * (-x * x / 2.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["morlet:2", "mexican", "haar"] {
            assert_eq!(WaveletSpec::parse(s).unwrap().to_string(), s);
        }
        assert!(WaveletSpec::parse("morlet:-1").is_err());
        assert!(WaveletSpec::parse("shannon").is_err());
    }

    #[test]
    fn regularized_trivial_cases() {
        let q = MellinQuadrature::default();
        let v = mellin_regularized(|t| Complex64::new((-t).exp(), 0.0), Complex64::new(2.0, 0.0), 1.0, &DEFAULT_EPS_SEQUENCE, &q)
            .unwrap();
        assert!(rel_close(v.value, Complex64::new(1.0, 0.0), 1e-10), "{}", v.value);

        let q = MellinQuadrature {
            oscillation_period: Some(2.0 * PI),
            ..Default::default()
        };
        let v = mellin_regularized(|t| Complex64::from_polar(1.0, t), Complex64::new(1.0, 0.0), 1.0, &DEFAULT_EPS_SEQUENCE, &q)
            .unwrap();
        assert!(rel_close(v.value, Complex64::new(0.0, 1.0), 1e-8), "{}", v.value);
    }

    #[test]
    fn regularized_rejects_bad_inputs() {
        let q = MellinQuadrature::default();
        let h = |t: f64| Complex64::new((-t).exp(), 0.0);
        assert!(mellin_regularized(h, Complex64::new(-0.5, 0.0), 1.0, &DEFAULT_EPS_SEQUENCE, &q).is_err());
        assert!(mellin_regularized(h, Complex64::new(1.0, 0.0), 1.0, &[1e-2, 1e-3, 1e-4], &q).is_err());
        assert!(mellin_regularized(h, Complex64::new(1.0, 0.0), 1.0, &[1e-6, 1e-2, 1e-7], &q).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let v = morlet_mellin(1.0, 0.0).unwrap().value.re;
        assert!((v - PI).abs() < 1e-12);
        let v = morlet_mellin(1.0, 2.0).unwrap().value.re;
        assert!((v - PI * (2.0 - crate::special_fn::erfc(2f64.sqrt()))).abs() < 1e-12);
        let v = morlet_mellin_reflected(1.0, 2.0).unwrap().value.re;
        assert!((v - PI * crate::special_fn::erfc(2f64.sqrt())).abs() < 1e-12);
        assert!((mexican_mellin(1.0).unwrap().value.re - PI).abs() < 1e-13);
        assert!((mexican_mellin(2.0).unwrap().value.re - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn haar_component_examples() {
        let g = PI.sqrt();
        let v = haar_mellin_component(0.5, 1.0, StripContext::Raw).unwrap().value;
        assert!((v - Complex64::new(1.0, 1.0) * (PI / 2.0).sqrt()).norm() < 1e-13);
        let v = haar_mellin_component(0.5, 0.5, StripContext::Raw).unwrap().value;
        assert!((v - Complex64::from_polar(2f64.sqrt() * g, PI / 4.0)).norm() < 1e-13);
        let v = haar_mellin_component(0.5, -1.0, StripContext::Raw).unwrap().value;
        assert!((v - Complex64::from_polar(g, -PI / 4.0)).norm() < 1e-13);
        assert!(matches!(
            haar_mellin_component(1.5, 1.0, StripContext::Raw),
            Err(Error::StripViolation { .. })
        ));
        assert!(haar_mellin_component(1.5, 1.0, StripContext::CombinedKernel).is_ok());
    }

    #[test]
    fn haar_kernel_mellin_matches_quadrature_in_strip() {
        // The oscillatory Haar part converges (Abel sense) for 1 < z < 2.
        let q = MellinQuadrature {
            origin_order: -1.0,
            oscillation_period: Some(PI),
            panels: 64,
            ..Default::default()
        };
        for z in [1.2, 1.5, 1.8] {
            let h = |t: f64| {
                Complex64::new(0.0, 1.0 / t) * (Complex64::from_polar(1.0, t) - 2.0 * Complex64::from_polar(1.0, 0.5 * t))
            };
            let numeric = mellin_regularized(h, Complex64::new(z, 0.0), 1.0, &DEFAULT_EPS_SEQUENCE, &q).unwrap();
            let closed = haar_kernel_mellin(z).unwrap();
            assert!(rel_close(numeric.value, closed.value, 1e-7), "z={z}: {} vs {}", numeric.value, closed.value);
        }
    }
}
