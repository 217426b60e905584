use cwt_asymptotics::expansion::{expand, first_nonvanishing_omitted, predicted_slope, ExpansionRequest};
use cwt_asymptotics::mellin::WaveletSpec;
use cwt_asymptotics::oracle::{cwt_oracle, cwt_oracle_with, haar_f_integral, OracleRule, QuadratureSettings};
use cwt_asymptotics::profiles::builtin_profile;
use cwt_asymptotics::remainder::{convergence_study, haar_delta_explicit, log_grid, remainder_by_difference, remainder_split};
use num_complex::Complex64;

fn request(profile: &str, lambda: f64, wavelet: WaveletSpec, b: f64, a: f64, n: usize) -> ExpansionRequest {
    ExpansionRequest::new(builtin_profile(profile, Some(lambda)).unwrap(), wavelet, b, a, n).unwrap()
}

/// Positive-frequency share of the oracle-minus-expansion remainder.
fn haar_positive_remainder(lambda: f64, b: f64, a: f64, n: usize) -> Complex64 {
    let q = QuadratureSettings::default();
    let req = request("haar-admissible", lambda, WaveletSpec::haar(), b, a, n);
    let f_b = haar_f_integral(&req.profile, b, &q).unwrap();
    let result = expand(&req, Some(f_b)).unwrap();
    let oracle = cwt_oracle_with(&req.profile, &req.wavelet, b, a, &q, OracleRule::Bisection).unwrap();
    remainder_split(&req, &oracle, &result).unwrap().positive
}

#[test]
fn remainder_examples() {
    let q = QuadratureSettings::default();
    let zero = request("zero", 1.0, WaveletSpec::mexican_hat(), 0.0, 100.0, 2);
    let r = remainder_by_difference(&zero, Complex64::default(), &expand(&zero, None).unwrap()).unwrap();
    assert_eq!(r, Complex64::default());

    let req = request("gauss", 1.0, WaveletSpec::mexican_hat(), 0.0, 100.0, 2);
    let oracle = cwt_oracle(&req.profile, &req.wavelet, 0.0, 100.0, &q).unwrap();
    let two = expand(&req, None).unwrap();
    let three_req = req.with_terms(3).unwrap();
    let three = expand(&three_req, None).unwrap();
    let r2 = remainder_by_difference(&req, oracle, &two).unwrap();
    let r3 = remainder_by_difference(&three_req, oracle, &three).unwrap();
    assert!((r3 - (r2 - three.terms[2])).norm() <= 4.0 * f64::EPSILON * oracle.norm());
    assert!(r2.norm() < 10.0 * three.terms[2].norm(), "{} vs {}", r2.norm(), three.terms[2].norm());
}

#[test]
fn explicit_delta_matches_positive_remainder() {
    let q = QuadratureSettings::default();
    let p3 = builtin_profile("haar-admissible", Some(0.5)).unwrap();
    let explicit = haar_delta_explicit(&p3, 0.0, 200.0, 1, 0, &q).unwrap();
    let reference = haar_positive_remainder(0.5, 0.0, 200.0, 1);
    assert!((explicit - reference).norm() < 0.2 * reference.norm());

    for (lambda, b, a, n) in [(0.5, 0.0, 200.0, 2), (0.7, 1.2, 300.0, 3), (0.9, -0.6, 800.0, 2)] {
        let reference = haar_positive_remainder(lambda, b, a, n);
        let p = builtin_profile("haar-admissible", Some(lambda)).unwrap();
        for m in 0..=2 {
            if n as f64 + lambda - 1.0 <= m as f64 {
                continue;
            }
            let explicit = haar_delta_explicit(&p, b, a, n, m, &q).unwrap();
            let ratio = explicit.norm() / reference.norm();
            assert!((0.5..=2.0).contains(&ratio), "lambda={lambda} b={b} a={a} n={n} m={m}: {explicit} vs {reference}");
            assert!((explicit - reference).norm() < 1e-5 * reference.norm(), "lambda={lambda} n={n} m={m}");
        }
    }
}

#[test]
fn explicit_delta_is_stable_under_tightening() {
    let p = builtin_profile("haar-admissible", Some(0.5)).unwrap();
    let values: Vec<Complex64> = [1e-8, 1e-10, 1e-12]
        .iter()
        .map(|&rel_tol| {
            let q = QuadratureSettings { rel_tol, ..Default::default() };
            haar_delta_explicit(&p, 0.0, 250.0, 1, 0, &q).unwrap()
        })
        .collect();
    assert!((values[1] - values[2]).norm() <= (values[0] - values[2]).norm().max(1e-13 * values[2].norm()));
    assert!((values[1] - values[2]).norm() < 1e-9 * values[2].norm());
}

#[test]
fn explicit_delta_trivial_and_guarded() {
    let q = QuadratureSettings::default();
    let zero = builtin_profile("zero", None).unwrap();
    assert_eq!(haar_delta_explicit(&zero, 0.3, 200.0, 1, 0, &q).unwrap(), Complex64::default());
    let p1 = builtin_profile("gauss", Some(1.0)).unwrap();
    assert!(haar_delta_explicit(&p1, 0.0, 200.0, 2, 0, &q).is_err());
    let p3 = builtin_profile("haar-admissible", Some(0.5)).unwrap();
    assert!(haar_delta_explicit(&p3, 0.0, 200.0, 1, 1, &q).is_err());
}

#[test]
fn telescoping_across_reports() {
    let q = QuadratureSettings::default();
    let grid = log_grid(100.0, 10f64.powf(3.5), 8).unwrap();
    let p = builtin_profile("rational", Some(0.6)).unwrap();
    let w = WaveletSpec::morlet(1.5).unwrap();
    let reports: Vec<_> = (1..=3).map(|n| convergence_study(&p, &w, -1.0, n, &grid, &q).unwrap()).collect();
    for pair in reports.windows(2) {
        let n = pair[0].n_terms;
        for (lo, hi) in pair[0].points.iter().zip(&pair[1].points) {
            let term = hi.term_magnitudes[n];
            assert!(hi.error <= lo.error + term + 1e-15 * lo.error, "n={n} a={}", lo.a);
        }
    }
}

#[test]
fn predicted_slope_follows_first_omitted_term() {
    // Morlet has no parity zeros: every step of n passes a nonvanishing term.
    let morlet = WaveletSpec::morlet(2.0).unwrap();
    let slopes: Vec<f64> = (1..6)
        .map(|n| predicted_slope(&request("rational", 0.6, morlet, -1.0, 100.0, n)).unwrap())
        .collect();
    for pair in slopes.windows(2) {
        assert!((pair[0] - pair[1] - 1.0).abs() < 1e-12, "{slopes:?}");
    }
    // Mexican hat keeps only Re(d_s) for a real even profile, so odd terms
    // vanish for every b and the slope moves in steps of 2.
    for (lambda, b) in [(1.0, 0.0), (0.6, -1.0)] {
        for n in 1..6 {
            let req = request("rational", lambda, WaveletSpec::mexican_hat(), b, 100.0, n);
            let next = first_nonvanishing_omitted(&req).unwrap().unwrap();
            assert_eq!(next, n + n % 2);
            let want = 0.5 - lambda - next as f64;
            assert!((predicted_slope(&req).unwrap() - want).abs() < 1e-12);
        }
    }
}

#[test]
fn study_examples() {
    let q = QuadratureSettings::default();
    let grid = log_grid(100.0, 10f64.powf(3.5), 8).unwrap();
    let p1 = builtin_profile("gauss", Some(1.0)).unwrap();
    let r = convergence_study(&p1, &WaveletSpec::mexican_hat(), 0.0, 1, &grid, &q).unwrap();
    assert!(r.pass && !r.degenerate, "{r:?}");
    assert!(r.predicted_slope <= -1.5);
    let zero = builtin_profile("zero", None).unwrap();
    let r = convergence_study(&zero, &WaveletSpec::mexican_hat(), 0.0, 1, &grid, &q).unwrap();
    assert!(r.degenerate && !r.pass && r.errors().iter().all(|&e| e == 0.0));
    let short = log_grid(100.0, 300.0, 4).unwrap();
    let r = convergence_study(&p1, &WaveletSpec::mexican_hat(), 0.0, 1, &short, &q).unwrap();
    assert!(!r.warnings.is_empty());
}
