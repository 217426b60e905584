//! Special functions needed by the Mellin values: Gamma on the right half
//! plane, erfc, and the parabolic cylinder function `D_{-nu}(x)` for
//! nonnegative `nu`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{exp_sinh, tanh_sinh, Tolerance, TANH_SINH_MAX_LEVEL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialFnAccuracy {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for SpecialFnAccuracy {
    fn default() -> Self {
        Self {
            abs_tol: 1e-300,
            rel_tol: 1e-13,
        }
    }
}

impl SpecialFnAccuracy {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "special-function tolerances must be positive, got abs={abs_tol}, rel={rel_tol}"
            )));
        }
        Ok(Self { abs_tol, rel_tol })
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.abs_tol, self.rel_tol)
    }
}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for `Re(z) > 0`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(Error::Domain {
            op: "gamma",
            detail: format!("Re(z) must be positive, got z = {z}"),
        });
    }
    if z.re < 0.5 {
        // One upward step keeps Lanczos in its accurate range.
        return Ok(gamma(z + 1.0)? / z);
    }
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let log_power = (z + 0.5) * t.ln() - t;
    Ok((2.0 * PI).sqrt() * log_power.exp() * series)
}

/// Real-argument convenience wrapper around [`gamma`].
pub fn gamma_real(x: f64) -> Result<f64> {
    gamma(Complex64::new(x, 0.0)).map(|g| g.re)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Parabolic cylinder function `D_{-nu}(x)` for `nu >= 0`, `|x| <= 40`,
/// using the default accuracy.
pub fn parabolic_cylinder_d(nu: f64, x: f64) -> Result<f64> {
    parabolic_cylinder_d_with(nu, x, &SpecialFnAccuracy::default())
}

/// `D_{-nu}(x) = exp(-x^2/4) / Gamma(nu) * int_0^inf t^(nu-1) exp(-t^2/2 - x t) dt`.
///
/// The exponent is folded into `-(t + x)^2/2 + x^2/4` so that the integrand
/// stays in range for `|x| <= 40`.
pub fn parabolic_cylinder_d_with(nu: f64, x: f64, acc: &SpecialFnAccuracy) -> Result<f64> {
    if !(nu >= 0.0) {
        return Err(Error::Domain {
            op: "parabolic_cylinder_d",
            detail: format!("order -nu requires nu >= 0, got nu = {nu}"),
        });
    }
    if !(x.abs() <= 40.0) {
        return Err(Error::Domain {
            op: "parabolic_cylinder_d",
            detail: format!("|x| must not exceed 40, got x = {x}"),
        });
    }
    if nu == 0.0 {
        return Ok((-0.25 * x * x).exp());
    }
    let shift = 0.25 * x * x;
    let integrand = |t: f64| {
        let s = t + x;
        t.powf(nu - 1.0) * (shift - 0.5 * s * s).exp()
    };
    let split = x.abs().max(1.0);
    let tol = acc.tolerance();
    let head = tanh_sinh(integrand, 0.0, split, tol, TANH_SINH_MAX_LEVEL);
    let tail = exp_sinh(integrand, split, tol, TANH_SINH_MAX_LEVEL);
    let value = head.value + tail.value;
    let error = head.error + tail.error;
    if !(head.converged && tail.converged) || !tol.accepts(error, value.abs()) {
        return Err(Error::Accuracy {
            op: "parabolic_cylinder_d",
            error,
            evaluations: head.evaluations + tail.evaluations,
        });
    }
    Ok(value / gamma_real(nu)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn gamma_integer_and_half() {
        assert!(close(gamma_real(1.0).unwrap(), 1.0, 1e-14));
        assert!(close(gamma_real(5.0).unwrap(), 24.0, 1e-14));
        assert!(close(gamma_real(0.5).unwrap(), PI.sqrt(), 1e-14));
        assert!(close(gamma_real(25.0).unwrap(), 6.204_484_017_332_394e23, 1e-13));
    }

    #[test]
    fn gamma_rejects_left_half_plane() {
        assert!(matches!(gamma_real(0.0), Err(Error::Domain { .. })));
        assert!(matches!(gamma(Complex64::new(-0.5, 1.0)), Err(Error::Domain { .. })));
    }

    #[test]
    fn gamma_complex_known_modulus() {
        // |Gamma(1/2 + i y)|^2 = pi / cosh(pi y)
        for y in [0.3, 1.0, 2.5] {
            let g = gamma(Complex64::new(0.5, y)).unwrap();
            assert!(close(g.norm_sqr(), PI / (PI * y).cosh(), 1e-13));
        }
    }

    #[test]
    fn erfc_values() {
        assert_eq!(erfc(0.0), 1.0);
        assert!(erfc(30.0) < 1e-300);
        assert!(close(erfc(1.0), 0.157_299_207_050_285_13, 1e-15));
        assert!(close(erfc(-1.0), 2.0 - 0.157_299_207_050_285_13, 1e-15));
    }

    #[test]
    fn parabolic_cylinder_closed_forms() {
        assert!(close(parabolic_cylinder_d(0.0, 2.0).unwrap(), (-1.0f64).exp(), 1e-15));
        assert!(close(parabolic_cylinder_d(1.0, 0.0).unwrap(), (PI / 2.0).sqrt(), 1e-12));
        for x in [-3.0f64, -1.0, 1.0, 2.0, 5.0] {
            let closed = (0.25 * x * x).exp() * (PI / 2.0).sqrt() * erfc(x / 2f64.sqrt());
            assert!(close(parabolic_cylinder_d(1.0, x).unwrap(), closed, 1e-12), "x = {x}");
        }
    }

    #[test]
    fn parabolic_cylinder_extreme_arguments() {
        // D_{-1}(x) ~ exp(-x^2/4)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6) for large positive x.
        let d = parabolic_cylinder_d(1.0, 40.0).unwrap();
        let r = 1.0 / 1600.0;
        let closed = (-400f64).exp() / 40.0 * (1.0 - r + 3.0 * r * r - 15.0 * r * r * r);
        assert!(close(d, closed, 1e-10), "{d} vs {closed}");
        let d = parabolic_cylinder_d(1.0, -40.0).unwrap();
        let closed = 400f64.exp() * (PI / 2.0).sqrt() * erfc(-40.0 / 2f64.sqrt());
        assert!(close(d, closed, 1e-12));
    }

    #[test]
    fn parabolic_cylinder_domain() {
        assert!(matches!(parabolic_cylinder_d(-0.5, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(parabolic_cylinder_d(1.0, 41.0), Err(Error::Domain { .. })));
    }
}
