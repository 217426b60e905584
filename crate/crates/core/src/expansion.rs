//! Large-scale asymptotic series for `(W_psi f)(b, a)`.
//!
//! Every term is an exact monomial in `a`: `term_s = coef_s * a^(1/2 - s - lambda)`.
//! Coefficients are split into the positive-frequency half (`w > 0`) and the
//! negative-frequency half so that remainders can be attributed to either.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mellin::{MellinValue, WaveletKind, WaveletSpec};
use crate::profiles::{shift_coeffs, shift_coeffs_reflected, FreqProfile};
use crate::special_fn::{gamma_real, parabolic_cylinder_d};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative size below which an omitted term counts as vanishing.
pub const VANISHING_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionRequest {
    pub profile: FreqProfile,
    pub wavelet: WaveletSpec,
    pub b: f64,
    pub a: f64,
    pub n_terms: usize,
    /// Smoothness order used to judge the `(n, m)` pairing.
    pub m: usize,
}

impl ExpansionRequest {
    pub fn new(profile: FreqProfile, wavelet: WaveletSpec, b: f64, a: f64, n_terms: usize) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale a must be positive, got {a}")));
        }
        if !b.is_finite() {
            return Err(Error::InvalidArgument(format!("translation b must be finite, got {b}")));
        }
        if n_terms == 0 {
            return Err(Error::InvalidArgument("n_terms must be at least 1".into()));
        }
        if n_terms > profile.coeffs.len() {
            return Err(Error::InsufficientCoefficients {
                profile: profile.name.clone(),
                available: profile.coeffs.len(),
                requested: n_terms,
            });
        }
        Ok(Self {
            profile,
            wavelet,
            b,
            a,
            n_terms,
            m: 0,
        })
    }

    pub fn with_smoothness(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    /// Same request at another scale.
    pub fn at_scale(&self, a: f64) -> Result<Self> {
        let mut r = Self::new(self.profile.clone(), self.wavelet, self.b, a, self.n_terms)?;
        r.m = self.m;
        Ok(r)
    }

    /// Same request with another term count.
    pub fn with_terms(&self, n_terms: usize) -> Result<Self> {
        let mut r = Self::new(self.profile.clone(), self.wavelet, self.b, self.a, n_terms)?;
        r.m = self.m;
        Ok(r)
    }

    /// Smallest positive `n` with `lambda + n > m`.
    pub fn minimal_terms(&self) -> usize {
        let mut n = 1;
        while self.profile.lambda + n as f64 <= self.m as f64 {
            n += 1;
        }
        n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaId {
    General,
    Morlet,
    MexicanHat,
    Haar,
}

impl FormulaId {
    pub fn id(&self) -> &'static str {
        match self {
            FormulaId::General => "general",
            FormulaId::Morlet => "morlet",
            FormulaId::MexicanHat => "mexican_hat",
            FormulaId::Haar => "haar",
        }
    }
}

/// How the negative-frequency half enters each term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// `d_s^- M[h(-w); z]` with `d_s^-` the origin coefficients of
    /// `g(-w)`, `w > 0`. Correct for any lambda.
    #[default]
    Reflected,
    /// `d_s e^(i pi (s + lambda + 1)) M[h(-w); z]`. Agrees with
    /// `Reflected` when `g` is analytic at the origin (lambda = 1).
    PrincipalBranch,
}

impl PhaseConvention {
    pub fn id(&self) -> &'static str {
        match self {
            PhaseConvention::Reflected => "reflected",
            PhaseConvention::PrincipalBranch => "principal_branch",
        }
    }
}

/// Which global constant the specialized formulas use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstantPolicy {
    /// Constants carried through from the `sqrt(a)/(2 pi)` prefactor.
    #[default]
    Rederived,
    /// An alternative set of constants for the closed-form results, kept for
    /// comparison against the oracle.
    Displayed,
}

impl ConstantPolicy {
    pub fn id(&self) -> &'static str {
        match self {
            ConstantPolicy::Rederived => "rederived",
            ConstantPolicy::Displayed => "displayed",
        }
    }
}

/// Full-line integral `int e^(i b w) f_hat(w) / w dw`, split at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HaarFIntegral {
    /// `int_0^inf e^(i b w) f_hat(w) / w dw`.
    pub positive: Complex64,
    /// `int_-inf^0 e^(i b w) f_hat(w) / w dw`.
    pub negative: Complex64,
}

impl HaarFIntegral {
    pub fn total(&self) -> Complex64 {
        self.positive + self.negative
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionResult {
    pub formula_id: FormulaId,
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
    /// `terms[s]`, all prefactors included. For Haar, `terms[0]` is the
    /// `a^(-1/2)` term built from the `F` integral.
    pub terms: Vec<Complex64>,
    pub positive_half: Vec<Complex64>,
    pub negative_half: Vec<Complex64>,
    pub partial_sums: Vec<Complex64>,
    pub scale_power: Vec<f64>,
    pub leading_extra: Option<Complex64>,
    pub policy: ConstantPolicy,
    pub phase: PhaseConvention,
    pub constant_note: &'static str,
    pub n_terms: usize,
    pub smoothness_m: usize,
    /// Whether `n_terms` is the minimal `n` with `lambda + n > m`.
    pub n_m_compatible: bool,
}

impl ExpansionResult {
    /// Last partial sum.
    pub fn value(&self) -> Complex64 {
        self.partial_sums.last().copied().unwrap_or_default()
    }

    /// Sum of the positive-frequency halves of all terms.
    pub fn positive_value(&self) -> Complex64 {
        self.positive_half.iter().sum()
    }

    pub fn negative_value(&self) -> Complex64 {
        self.negative_half.iter().sum()
    }
}

/// Per-term coefficients at `a = 1`, split by half-line.
#[derive(Debug, Clone)]
struct Coefficients {
    pos: Vec<Complex64>,
    neg: Vec<Complex64>,
}

fn scale_power(lambda: f64, s: usize) -> f64 {
    0.5 - s as f64 - lambda
}

fn build_result(req: &ExpansionRequest, formula_id: FormulaId, coefs: &Coefficients, policy: ConstantPolicy, phase: PhaseConvention, note: &'static str, leading_extra: Option<Complex64>) -> ExpansionResult {
    let n = req.n_terms;
    let lambda = req.profile.lambda;
    let mut powers: Vec<f64> = (0..n).map(|s| scale_power(lambda, s)).collect();
    if formula_id == FormulaId::Haar {
        powers[0] = -0.5;
    }
    let mut terms = Vec::with_capacity(n);
    let mut positive_half = Vec::with_capacity(n);
    let mut negative_half = Vec::with_capacity(n);
    for (s, &power) in powers.iter().enumerate().take(n) {
        let scale = req.a.powf(power);
        let p = coefs.pos[s] * scale;
        let q = coefs.neg[s] * scale;
        positive_half.push(p);
        negative_half.push(q);
        terms.push(p + q);
    }
    let mut partial_sums = Vec::with_capacity(n);
    let mut acc = Complex64::default();
    for t in &terms {
        acc += t;
        partial_sums.push(acc);
    }
    ExpansionResult {
        formula_id,
        a: req.a,
        b: req.b,
        lambda,
        leading_extra: leading_extra.map(|_| terms[0]),
        terms,
        positive_half,
        negative_half,
        partial_sums,
        scale_power: powers,
        policy,
        phase,
        constant_note: note,
        n_terms: n,
        smoothness_m: req.m,
        n_m_compatible: n == req.minimal_terms(),
    }
}

struct Shifted {
    pos: Vec<Complex64>,
    neg: Vec<Complex64>,
}

fn shifted(req: &ExpansionRequest, n: usize) -> Result<Shifted> {
    Ok(Shifted {
        pos: shift_coeffs(&req.profile, req.b, n)?.d,
        neg: shift_coeffs_reflected(&req.profile, req.b, n)?.d,
    })
}

/// Splits `K [d+ M+ , d- M-]` according to the phase convention.
fn halves(phase: PhaseConvention, z: f64, d_pos: Complex64, d_neg: Complex64, m_pos: Complex64, m_neg: Complex64) -> (Complex64, Complex64) {
    match phase {
        PhaseConvention::Reflected => (d_pos * m_pos, d_neg * m_neg),
        PhaseConvention::PrincipalBranch => (d_pos * m_pos, d_pos * Complex64::from_polar(1.0, PI * (z + 1.0)) * m_neg),
    }
}

fn require_haar_d0(sh: &Shifted) -> Result<()> {
    let magnitude = sh.pos[0].norm().max(sh.neg[0].norm());
    if magnitude != 0.0 {
        return Err(Error::NonzeroLeadingCoefficient { magnitude });
    }
    Ok(())
}

fn find_mellin(values: &[MellinValue], z: f64, s: usize) -> Result<Complex64> {
    values
        .iter()
        .find(|m| (m.z.re - z).abs() <= 1e-12 * z.max(1.0) && m.z.im == 0.0)
        .map(|m| m.value)
        .ok_or(Error::MissingMellin { s })
}

/// General expansion from supplied Mellin values of the kernel on the
/// positive half-line (`mellin_pos`) and of the reflected kernel
/// `w -> h(-w)` (`mellin_neg`), matched to `z = s + lambda` by value.
///
/// For Haar the Mellin values are those of the oscillatory part of the
/// kernel, `s` starts at 1 and `terms[0]` is zero; the `F`-integral term is
/// added by [`haar_expansion`].
pub fn general_expansion(req: &ExpansionRequest, mellin_pos: &[MellinValue], mellin_neg: &[MellinValue], phase: PhaseConvention) -> Result<ExpansionResult> {
    let coefs = general_coefficients(req, req.n_terms, mellin_pos, mellin_neg, phase)?;
    Ok(build_result(req, FormulaId::General, &coefs, ConstantPolicy::Rederived, phase, "sqrt(a)/(2 pi) times supplied Mellin values", None))
}

fn general_coefficients(req: &ExpansionRequest, n: usize, mellin_pos: &[MellinValue], mellin_neg: &[MellinValue], phase: PhaseConvention) -> Result<Coefficients> {
    let sh = shifted(req, n)?;
    let haar = matches!(req.wavelet.kind, WaveletKind::Haar);
    if haar {
        require_haar_d0(&sh)?;
    }
    let lambda = req.profile.lambda;
    let k = 1.0 / (2.0 * PI);
    let mut pos = vec![Complex64::default(); n];
    let mut neg = vec![Complex64::default(); n];
    for s in usize::from(haar)..n {
        let z = s as f64 + lambda;
        let mp = find_mellin(mellin_pos, z, s)?;
        let mn = find_mellin(mellin_neg, z, s)?;
        let (p, q) = halves(phase, z, sh.pos[s], sh.neg[s], mp, mn);
        pos[s] = p * k;
        neg[s] = q * k;
    }
    Ok(Coefficients { pos, neg })
}

fn require_kind(op: &'static str, expected: &'static str, req: &ExpansionRequest, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::WrongWavelet {
            op,
            expected,
            got: req.wavelet.to_string(),
        })
    }
}

const MORLET_NOTE_REDERIVED: &str = "exp(-w0^2/4)/sqrt(2 pi); the displayed constant exp(-w0^2/4) lacks the 1/sqrt(2 pi)";
const MORLET_NOTE_DISPLAYED: &str = "displayed constant exp(-w0^2/4)";
const MEXICAN_NOTE_REDERIVED: &str = "2^((lambda+1)/2)/(2 sqrt(pi)); the displayed constant is twice this";
const MEXICAN_NOTE_DISPLAYED: &str = "displayed constant 2^((lambda+1)/2)/sqrt(pi)";
const HAAR_NOTE_REDERIVED: &str = "1/(2 pi) with Mellin value -(2^z - 1) e^(+-i pi z/2) Gamma(z - 1), sum from s = 1; the displayed form uses i/pi, sum from s = 0";
const HAAR_NOTE_DISPLAYED: &str = "displayed form: i/pi times Gamma(z-1)(1 + (-1)^(z-1))(2^z - 1)e^(i pi z/2), s >= 1";

/// Morlet series: `K Gamma(z) [d+ D_{-z}(-w0) + d- D_{-z}(w0)] a^(1/2 - z)`
/// with `K = exp(-w0^2/4)/sqrt(2 pi)`.
pub fn morlet_expansion(req: &ExpansionRequest, policy: ConstantPolicy, phase: PhaseConvention) -> Result<ExpansionResult> {
    let coefs = morlet_coefficients(req, req.n_terms, policy, phase)?;
    let note = match policy {
        ConstantPolicy::Rederived => MORLET_NOTE_REDERIVED,
        ConstantPolicy::Displayed => MORLET_NOTE_DISPLAYED,
    };
    Ok(build_result(req, FormulaId::Morlet, &coefs, policy, phase, note, None))
}

fn morlet_coefficients(req: &ExpansionRequest, n: usize, policy: ConstantPolicy, phase: PhaseConvention) -> Result<Coefficients> {
    let omega0 = match req.wavelet.kind {
        WaveletKind::Morlet { omega0 } => omega0,
        _ => {
            return Err(Error::WrongWavelet {
                op: "morlet_expansion",
                expected: "Morlet",
                got: req.wavelet.to_string(),
            })
        }
    };
    let sh = shifted(req, n)?;
    let mut k = (-0.25 * omega0 * omega0).exp();
    if policy == ConstantPolicy::Rederived {
        k /= SQRT_2PI;
    }
    let lambda = req.profile.lambda;
    let mut pos = Vec::with_capacity(n);
    let mut neg = Vec::with_capacity(n);
    for s in 0..n {
        let z = s as f64 + lambda;
        if sh.pos[s] == Complex64::default() && sh.neg[s] == Complex64::default() {
            pos.push(Complex64::default());
            neg.push(Complex64::default());
            continue;
        }
        let g = gamma_real(z)?;
        let dm = Complex64::new(g * parabolic_cylinder_d(z, -omega0)?, 0.0);
        let dp = Complex64::new(g * parabolic_cylinder_d(z, omega0)?, 0.0);
        let (p, q) = halves(phase, z, sh.pos[s], sh.neg[s], dm, dp);
        pos.push(p * k);
        neg.push(q * k);
    }
    Ok(Coefficients { pos, neg })
}

/// Mexican-hat series: `K 2^(s/2) Gamma((z+2)/2) (d+ + d-) a^(1/2 - z)` with
/// `K = 2^((lambda+1)/2)/(2 sqrt(pi))`.
pub fn mexican_expansion(req: &ExpansionRequest, policy: ConstantPolicy, phase: PhaseConvention) -> Result<ExpansionResult> {
    let coefs = mexican_coefficients(req, req.n_terms, policy, phase)?;
    let note = match policy {
        ConstantPolicy::Rederived => MEXICAN_NOTE_REDERIVED,
        ConstantPolicy::Displayed => MEXICAN_NOTE_DISPLAYED,
    };
    Ok(build_result(req, FormulaId::MexicanHat, &coefs, policy, phase, note, None))
}

fn mexican_coefficients(req: &ExpansionRequest, n: usize, policy: ConstantPolicy, phase: PhaseConvention) -> Result<Coefficients> {
    require_kind("mexican_expansion", "Mexican hat", req, matches!(req.wavelet.kind, WaveletKind::MexicanHat))?;
    let sh = shifted(req, n)?;
    let lambda = req.profile.lambda;
    let mut k = 2f64.powf(0.5 * (lambda + 1.0)) / PI.sqrt();
    if policy == ConstantPolicy::Rederived {
        k *= 0.5;
    }
    let mut pos = Vec::with_capacity(n);
    let mut neg = Vec::with_capacity(n);
    for s in 0..n {
        let z = s as f64 + lambda;
        let m = Complex64::new(2f64.powf(0.5 * s as f64) * gamma_real(0.5 * (z + 2.0))?, 0.0);
        let (p, q) = halves(phase, z, sh.pos[s], sh.neg[s], m, m);
        pos.push(p * k);
        neg.push(q * k);
    }
    Ok(Coefficients { pos, neg })
}

/// Haar series. `terms[0] = (i / 2 pi) a^(-1/2) F` with `F` the full-line
/// integral of `e^(i b w) f_hat(w) / w`; for `s >= 1`
/// `term_s = (1/2 pi) (-(2^z - 1)) Gamma(z - 1) [d+ e^(i pi z/2) + d- e^(-i pi z/2)] a^(1/2 - z)`.
///
/// Requires `d_0 = 0` on both half-lines.
pub fn haar_expansion(req: &ExpansionRequest, f_b: HaarFIntegral, policy: ConstantPolicy, phase: PhaseConvention) -> Result<ExpansionResult> {
    let coefs = haar_coefficients(req, req.n_terms, f_b, policy, phase)?;
    let note = match policy {
        ConstantPolicy::Rederived => HAAR_NOTE_REDERIVED,
        ConstantPolicy::Displayed => HAAR_NOTE_DISPLAYED,
    };
    Ok(build_result(req, FormulaId::Haar, &coefs, policy, phase, note, Some(f_b.total())))
}

fn haar_coefficients(req: &ExpansionRequest, n: usize, f_b: HaarFIntegral, policy: ConstantPolicy, phase: PhaseConvention) -> Result<Coefficients> {
    require_kind("haar_expansion", "Haar", req, matches!(req.wavelet.kind, WaveletKind::Haar))?;
    let sh = shifted(req, n)?;
    require_haar_d0(&sh)?;
    let lambda = req.profile.lambda;
    let k = 1.0 / (2.0 * PI);
    let mut pos = vec![I * k * f_b.positive];
    let mut neg = vec![I * k * f_b.negative];
    for s in 1..n {
        let z = s as f64 + lambda;
        let g = gamma_real(z - 1.0)?;
        let growth = 2f64.powf(z) - 1.0;
        match policy {
            ConstantPolicy::Rederived => {
                let m_pos = -growth * g * Complex64::from_polar(1.0, 0.5 * PI * z);
                let (p, q) = halves(phase, z, sh.pos[s], sh.neg[s], m_pos, m_pos.conj());
                pos.push(p * k);
                neg.push(q * k);
            }
            ConstantPolicy::Displayed => {
                let phase_factor = Complex64::from_polar(1.0, 0.5 * PI * z);
                let reflect = Complex64::from_polar(1.0, PI * (z - 1.0));
                let base = I / PI * sh.pos[s] * g * growth * phase_factor;
                pos.push(base);
                neg.push(base * reflect);
            }
        }
    }
    Ok(Coefficients { pos, neg })
}

/// Specialized expansion for the request's wavelet with the re-derived
/// constants. Haar needs `f_b`.
pub fn expand(req: &ExpansionRequest, f_b: Option<HaarFIntegral>) -> Result<ExpansionResult> {
    expand_with(req, f_b, ConstantPolicy::Rederived, PhaseConvention::Reflected)
}

pub fn expand_with(req: &ExpansionRequest, f_b: Option<HaarFIntegral>, policy: ConstantPolicy, phase: PhaseConvention) -> Result<ExpansionResult> {
    match req.wavelet.kind {
        WaveletKind::Morlet { .. } => morlet_expansion(req, policy, phase),
        WaveletKind::MexicanHat => mexican_expansion(req, policy, phase),
        WaveletKind::Haar => {
            let f_b = f_b.ok_or_else(|| Error::InvalidArgument("Haar expansion needs the F(b) integral".into()))?;
            haar_expansion(req, f_b, policy, phase)
        }
    }
}

/// Index of the first term beyond `n_terms` whose coefficient is not
/// negligible, judged against the largest coefficient among all terms the
/// profile supports. `None` when every available later term vanishes.
pub fn first_nonvanishing_omitted(req: &ExpansionRequest) -> Result<Option<usize>> {
    let total = req.profile.coeffs.len();
    let coefs = match req.wavelet.kind {
        WaveletKind::Morlet { .. } => morlet_coefficients(req, total, ConstantPolicy::Rederived, PhaseConvention::Reflected)?,
        WaveletKind::MexicanHat => mexican_coefficients(req, total, ConstantPolicy::Rederived, PhaseConvention::Reflected)?,
        WaveletKind::Haar => haar_coefficients(req, total, HaarFIntegral::default(), ConstantPolicy::Rederived, PhaseConvention::Reflected)?,
    };
    let mags: Vec<f64> = coefs.pos.iter().zip(&coefs.neg).map(|(p, q)| (p + q).norm()).collect();
    let largest = mags.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return Ok(None);
    }
    Ok((req.n_terms..total).find(|&s| mags[s] > VANISHING_THRESHOLD * largest))
}

/// Predicted log-log slope of the truncation error: the scale power of the
/// first nonvanishing omitted term, or the naive `1/2 - n - lambda` when
/// none is available.
pub fn predicted_slope(req: &ExpansionRequest) -> Result<f64> {
    let s = first_nonvanishing_omitted(req)?.unwrap_or(req.n_terms);
    Ok(scale_power(req.profile.lambda, s))
}
