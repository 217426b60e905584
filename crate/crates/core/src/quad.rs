//! Quadrature primitives shared by the special functions, the Mellin
//! evaluator and the oracle.
//!
//! Two unrelated rule families live here so that every integral the oracle
//! reports can be computed twice:
//!
//! - double-exponential rules (`tanh_sinh` on finite intervals, `exp_sinh`
//!   on half-lines), and
//! - Gauss-Legendre with adaptive bisection (`gauss_legendre_adaptive`),
//!   plus a geometrically graded variant for algebraic endpoint singularities.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

/// Values a quadrature rule can accumulate.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    #[inline]
    pub fn accepts(&self, error: f64, value: f64) -> bool {
        error <= self.abs.max(self.rel * value)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: QuadValue> CompensatedSum<T> {
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.magnitude() >= x.magnitude() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn total(&self) -> T {
        self.sum + self.carry
    }
}

const TANH_SINH_T_MAX: f64 = 6.5;
const TANH_SINH_MIN_LEVEL: usize = 3;
pub const TANH_SINH_MAX_LEVEL: usize = 12;

/// Tanh-sinh rule on a finite interval, halving the step until two
/// successive estimates agree.
///
/// Abscissae are formed from the distance to the nearer endpoint, so
/// integrable algebraic singularities at an endpoint are handled as long as
/// that endpoint is exactly representable. Nodes that collapse onto an
/// endpoint are skipped.
pub fn tanh_sinh<T, F>(f: F, a: f64, b: f64, tol: Tolerance, max_level: usize) -> QuadEstimate<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let half = 0.5 * (b - a);
    let mut evaluations = 0usize;
    if half == 0.0 {
        return QuadEstimate {
            value: T::default(),
            error: 0.0,
            evaluations,
            converged: true,
        };
    }

    // Contribution of node t (and its mirror -t when t > 0).
    let node = |t: f64, evaluations: &mut usize| -> T {
        let u = FRAC_PI_2 * t.sinh();
        let cosh_u = u.cosh();
        let weight = half * FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        if !weight.is_finite() || weight == 0.0 {
            return T::default();
        }
        // 1 - tanh(|u|), computed without cancellation.
        let comp = 1.0 / (u.abs().exp() * cosh_u);
        let offset = half * comp;
        let mut acc = T::default();
        let mut eval_at = |x: f64| {
            if x > a.min(b) && x < a.max(b) {
                *evaluations += 1;
                let v = f(x);
                if v.is_finite_value() {
                    acc = acc + v * weight;
                }
            }
        };
        if t == 0.0 {
            eval_at(a + half);
        } else {
            eval_at(a + offset);
            eval_at(b - offset);
        }
        acc
    };

    let mut sum = CompensatedSum::default();
    let k_max = TANH_SINH_T_MAX as usize;
    for k in 0..=k_max {
        sum.add(node(k as f64, &mut evaluations));
    }
    let mut h = 1.0;
    let mut estimate = sum.total() * h;
    let mut error = f64::INFINITY;
    for level in 1..=max_level {
        h *= 0.5;
        let steps = (TANH_SINH_T_MAX / h) as usize;
        let mut k = 1;
        while k <= steps {
            sum.add(node(k as f64 * h, &mut evaluations));
            k += 2;
        }
        let next = sum.total() * h;
        error = (next - estimate).magnitude();
        estimate = next;
        if level >= TANH_SINH_MIN_LEVEL && tol.accepts(error, estimate.magnitude()) {
            return QuadEstimate {
                value: estimate,
                error,
                evaluations,
                converged: true,
            };
        }
    }
    QuadEstimate {
        value: estimate,
        error,
        evaluations,
        converged: false,
    }
}

/// Exp-sinh rule on `[a, inf)`; the integrand must decay at infinity.
pub fn exp_sinh<T, F>(f: F, a: f64, tol: Tolerance, max_level: usize) -> QuadEstimate<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    const T_LO: f64 = -6.0;
    const T_HI: f64 = 4.5;
    let mut evaluations = 0usize;
    let node = |t: f64, evaluations: &mut usize| -> T {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let weight = FRAC_PI_2 * t.cosh() * e;
        let x = a + e;
        if !x.is_finite() || !weight.is_finite() || x <= a {
            return T::default();
        }
        *evaluations += 1;
        let v = f(x);
        if v.is_finite_value() {
            v * weight
        } else {
            T::default()
        }
    };

    let mut sum = CompensatedSum::default();
    let mut h = 1.0;
    let mut k = T_LO.ceil() as i64;
    while (k as f64) <= T_HI {
        sum.add(node(k as f64, &mut evaluations));
        k += 1;
    }
    let mut estimate = sum.total() * h;
    let mut error = f64::INFINITY;
    for level in 1..=max_level {
        h *= 0.5;
        let lo = (T_LO / h).ceil() as i64;
        let hi = (T_HI / h).floor() as i64;
        for k in lo..=hi {
            if k.rem_euclid(2) == 1 {
                sum.add(node(k as f64 * h, &mut evaluations));
            }
        }
        let next = sum.total() * h;
        error = (next - estimate).magnitude();
        estimate = next;
        if level >= TANH_SINH_MIN_LEVEL && tol.accepts(error, estimate.magnitude()) {
            return QuadEstimate {
                value: estimate,
                error,
                evaluations,
                converged: true,
            };
        }
    }
    QuadEstimate {
        value: estimate,
        error,
        evaluations,
        converged: false,
    }
}

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
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
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const GL_ORDER: usize = 20;

fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre_nodes(GL_ORDER))
}

/// Fixed 20-point Gauss-Legendre estimate on [a, b].
pub fn gauss_legendre_fixed<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> T {
    let (nodes, weights) = gl20();
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut acc = T::default();
    for (x, w) in nodes.iter().zip(weights) {
        acc = acc + f(c + r * x) * (w * r);
    }
    acc
}

/// Adaptive bisection driven by 20-point Gauss-Legendre: an interval is
/// accepted when its estimate agrees with the sum over its two halves.
pub fn gauss_legendre_adaptive<T, F>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_intervals: usize,
) -> QuadEstimate<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let width = (b - a).abs();
    if width == 0.0 {
        return QuadEstimate {
            value: T::default(),
            error: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let mut evaluations = GL_ORDER;
    let whole = gauss_legendre_fixed(&f, a, b);
    // Global scale used for the relative criterion.
    let scale = whole.magnitude();
    let mut stack = vec![(a, b, whole, 0u32)];
    let mut total = CompensatedSum::default();
    let mut error = 0.0;
    let mut intervals = 0usize;
    let mut converged = true;
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gauss_legendre_fixed(&f, lo, mid);
        let right = gauss_legendre_fixed(&f, mid, hi);
        evaluations += 2 * GL_ORDER;
        intervals += 1;
        let refined = left + right;
        let diff = (refined - est).magnitude();
        let share = (hi - lo).abs() / width;
        let local = Tolerance::new(tol.abs * share, tol.rel * scale.max(refined.magnitude()) * share);
        if diff <= local.abs.max(local.rel) || depth >= 50 || intervals >= max_intervals {
            if !(diff <= local.abs.max(local.rel)) {
                converged = false;
            }
            total.add(refined);
            error += diff;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    QuadEstimate {
        value: total.total(),
        error,
        evaluations,
        converged,
    }
}

/// Gauss-Legendre on a mesh graded geometrically toward `a`, for integrands
/// with an integrable algebraic singularity at the left endpoint.
pub fn graded_toward_left<T, F>(f: F, a: f64, b: f64, tol: Tolerance, max_intervals: usize) -> QuadEstimate<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    const RATIO: f64 = 0.15;
    const LEVELS: usize = 60;
    let width = b - a;
    let mut total = CompensatedSum::default();
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut converged = true;
    let mut hi = width;
    let budget = (max_intervals / LEVELS).max(8);
    for _ in 0..LEVELS {
        let lo = hi * RATIO;
        let piece = gauss_legendre_adaptive(&f, a + lo, a + hi, Tolerance::new(tol.abs / LEVELS as f64, tol.rel), budget);
        total.add(piece.value);
        error += piece.error;
        evaluations += piece.evaluations;
        converged &= piece.converged;
        hi = lo;
    }
    QuadEstimate {
        value: total.total(),
        error,
        evaluations,
        converged,
    }
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums.
///
/// Returns the accelerated limit and the spread between the two last
/// even-column estimates as an error indicator.
pub fn wynn_epsilon(partial: &[Complex64]) -> (Complex64, f64) {
    let n = partial.len();
    if n < 3 {
        let last = partial.last().copied().unwrap_or_default();
        return (last, f64::INFINITY);
    }
    // e[k] holds column j of the epsilon table, shifted as the columns shrink.
    let mut prev = vec![Complex64::default(); n + 1];
    let mut cur: Vec<Complex64> = partial.to_vec();
    let mut best = *partial.last().unwrap();
    let mut best_err = f64::INFINITY;
    let mut last_even: Option<Complex64> = None;
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for k in 0..cur.len() - 1 {
            let d = cur[k + 1] - cur[k];
            let inv = if d.norm() == 0.0 {
                Complex64::new(f64::MAX.sqrt(), 0.0)
            } else {
                d.inv()
            };
            next.push(prev[k + 1] + inv);
        }
        prev = cur;
        cur = next;
        col += 1;
        if col % 2 == 0 {
            let value = *cur.last().unwrap();
            if !(value.re.is_finite() && value.im.is_finite()) {
                break;
            }
            if let Some(prev_even) = last_even {
                let err = (value - prev_even).norm();
                if err < best_err {
                    best_err = err;
                    best = value;
                }
            }
            last_even = Some(value);
        }
    }
    (best, best_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> Tolerance {
        Tolerance::new(1e-15, 1e-14)
    }

    #[test]
    fn gauss_legendre_nodes_integrate_polynomials_exactly() {
        let (x, w) = gauss_legendre_nodes(20);
        let sum_w: f64 = w.iter().sum();
        assert!((sum_w - 2.0).abs() < 1e-14);
        let m38: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((m38 - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        let est: QuadEstimate<f64> = tanh_sinh(|x: f64| x.powf(-0.5), 0.0, 1.0, tight(), TANH_SINH_MAX_LEVEL);
        assert!(est.converged);
        assert!((est.value - 2.0).abs() < 1e-12, "{}", est.value);
    }

    #[test]
    fn exp_sinh_gaussian_tail() {
        let est: QuadEstimate<f64> = exp_sinh(|x: f64| (-x * x).exp(), 0.0, tight(), TANH_SINH_MAX_LEVEL);
        assert!((est.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_and_graded_agree() {
        let f = |x: f64| x.powf(-0.3) * x.cos();
        let a: QuadEstimate<f64> = graded_toward_left(f, 0.0, 2.0, tight(), 10_000);
        let b: QuadEstimate<f64> = tanh_sinh(f, 0.0, 2.0, tight(), TANH_SINH_MAX_LEVEL);
        assert!((a.value - b.value).abs() < 1e-12, "{} {}", a.value, b.value);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // log 2 = 1 - 1/2 + 1/3 - ...
        let mut s = 0.0;
        let partial: Vec<Complex64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                Complex64::new(s, 0.0)
            })
            .collect();
        let (v, _) = wynn_epsilon(&partial);
        assert!((v.re - 2f64.ln()).abs() < 1e-12, "{}", v.re);
    }
}
