mod common;

use common::{integrate, rel_err};
use cwt_asymptotics::mellin::{
    haar_mellin_component, mellin_regularized, mexican_mellin, morlet_mellin, morlet_mellin_reflected, MellinQuadrature, StripContext,
    WaveletSpec, DEFAULT_EPS_SEQUENCE,
};
use cwt_asymptotics::special_fn::gamma_real;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn real(z: f64) -> Complex64 {
    Complex64::new(z, 0.0)
}

fn close(closed: Complex64, numeric: Complex64) -> bool {
    (closed - numeric).norm() <= 1e-6 * (1.0 + closed.norm())
}

fn regularized<H: Fn(f64) -> Complex64 + Sync>(h: H, z: f64, q: &MellinQuadrature) -> Complex64 {
    mellin_regularized(h, real(z), 1.0, &DEFAULT_EPS_SEQUENCE, q).unwrap().value
}

fn oscillatory(period: f64) -> MellinQuadrature {
    MellinQuadrature {
        oscillation_period: Some(period),
        ..Default::default()
    }
}

#[test]
fn regularized_examples() {
    let q = MellinQuadrature::default();
    assert!(close(real(1.0), regularized(|t| real((-t).exp()), 2.0, &q)));
    let q = oscillatory(2.0 * PI);
    let v = regularized(|t| Complex64::from_polar(1.0, t), 1.0, &q);
    assert!(close(Complex64::i(), v), "{v}");
    let v = regularized(|t| Complex64::from_polar(1.0, t), 0.7, &q);
    let want = Complex64::from_polar(gamma_real(0.7).unwrap(), 0.35 * PI);
    assert!(close(want, v), "{v} vs {want}");
}

#[test]
fn morlet_examples_against_direct_quadrature() {
    let s2p = (2.0 * PI).sqrt();
    let pos = integrate(|w| real(s2p * (-0.5 * (w - 2.0) * (w - 2.0)).exp()), 0.0, 40.0, 200);
    let neg = integrate(|w| real(s2p * (-0.5 * (w + 2.0) * (w + 2.0)).exp()), 0.0, 40.0, 200);
    assert!(rel_err(morlet_mellin(1.0, 2.0).unwrap().value, pos) < 1e-13);
    assert!(rel_err(morlet_mellin_reflected(1.0, 2.0).unwrap().value, neg) < 1e-13);
    let sym = morlet_mellin(1.0, 0.0).unwrap().value;
    assert!(rel_err(sym, real(PI)) < 1e-13);
    assert!(rel_err(morlet_mellin_reflected(1.0, 0.0).unwrap().value, sym) < 1e-15);
}

#[test]
fn mexican_examples_against_direct_quadrature() {
    let s2p = (2.0 * PI).sqrt();
    for z in [1.0, 2.0, 2.7] {
        let direct = integrate(|w| real(s2p * w.powf(z + 1.0) * (-0.5 * w * w).exp()), 0.0, 40.0, 200);
        assert!(rel_err(mexican_mellin(z).unwrap().value, direct) < 1e-12, "z={z}");
    }
    assert!(rel_err(mexican_mellin(2.0).unwrap().value, real(2.0 * s2p)) < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn morlet_closed_form_matches_regularized(z in 0.2f64..5.0, omega0 in 0.05f64..4.0) {
        let w = WaveletSpec::morlet(omega0).unwrap();
        let q = MellinQuadrature::default();
        let numeric = regularized(|t| w.psi_hat_conj(t), z, &q);
        let closed = morlet_mellin(z, omega0).unwrap().value;
        prop_assert!(close(closed, numeric), "z={z}: {closed} vs {numeric}");
        let numeric = regularized(|t| w.psi_hat_conj(-t), z, &q);
        let closed = morlet_mellin_reflected(z, omega0).unwrap().value;
        prop_assert!(close(closed, numeric), "reflected z={z}: {closed} vs {numeric}");
    }

    #[test]
    fn mexican_closed_form_matches_regularized(z in 0.1f64..6.0) {
        let w = WaveletSpec::mexican_hat();
        let q = MellinQuadrature { origin_order: 2.0, ..Default::default() };
        let numeric = regularized(|t| w.psi_hat_conj(t), z, &q);
        let closed = mexican_mellin(z).unwrap().value;
        prop_assert!(close(closed, numeric), "z={z}: {closed} vs {numeric}");
    }

    #[test]
    fn haar_components_match_regularized(z in 0.15f64..0.9, c in prop_oneof![Just(1.0f64), Just(0.5), Just(-1.0), Just(-0.5)]) {
        let q = oscillatory(2.0 * PI / c.abs());
        let numeric = regularized(|t| Complex64::from_polar(1.0, c * t), z, &q);
        let closed = haar_mellin_component(z, c, StripContext::Raw).unwrap().value;
        prop_assert!(close(closed, numeric), "z={z} c={c}: {closed} vs {numeric}");
    }

    #[test]
    fn regularized_is_linear(alpha_re in -2.0f64..2.0, alpha_im in -2.0f64..2.0, k in 0.3f64..3.0, z in 0.3f64..3.0) {
        let alpha = Complex64::new(alpha_re, alpha_im);
        let q = MellinQuadrature::default();
        let h1 = move |t: f64| real((-k * t).exp());
        let h2 = move |t: f64| real((-t * t).exp() * (1.0 + t));
        let combined = regularized(move |t| alpha * h1(t) + h2(t), z, &q);
        let separate = alpha * regularized(h1, z, &q) + regularized(h2, z, &q);
        prop_assert!((combined - separate).norm() < 1e-9 * (1.0 + separate.norm()));
    }

    #[test]
    fn regularized_scaling_law(scale in 0.2f64..5.0, z in 0.3f64..4.0) {
        let q = MellinQuadrature::default();
        let gauss = |t: f64| real((-0.5 * t * t).exp());
        let scaled = regularized(move |t| gauss(scale * t), z, &q);
        let base = regularized(gauss, z, &q);
        prop_assert!(rel_err(scaled, scale.powf(-z) * base) < 1e-9);
    }
}
