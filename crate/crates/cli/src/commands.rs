use std::path::Path;

use cwt_asymptotics::expansion::{expand, predicted_slope, ExpansionRequest, ExpansionResult, HaarFIntegral};
use cwt_asymptotics::mellin::{WaveletKind, WaveletSpec};
use cwt_asymptotics::oracle::{cwt_oracle_with, haar_f_integral_with, OracleRule, OracleValue, QuadratureSettings};
use cwt_asymptotics::profiles::{builtin_profile, check_hypotheses};
use cwt_asymptotics::remainder::{convergence_study, haar_delta_explicit, log_grid, remainder_split, ConvergenceReport};
use cwt_asymptotics::Error;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::record::{self, complex, num, Provenance};
use crate::CliError;

/// Relative agreement a golden value must be certified to.
pub const GOLDEN_REL_TOL: f64 = 1e-9;

pub const CONVERGE_HEADER: [&str; 9] = [
    "a",
    "abs_error",
    "partial_sum_re",
    "partial_sum_im",
    "oracle_re",
    "oracle_im",
    "fitted_slope",
    "predicted_slope",
    "pass",
];

pub struct Evaluation {
    pub record: Value,
    pub primary: OracleValue,
    pub secondary: OracleValue,
    /// `F` integrals by both rules, for Haar.
    pub f_integrals: Option<(HaarFIntegral, HaarFIntegral)>,
}

fn is_haar(w: &WaveletSpec) -> bool {
    matches!(w.kind, WaveletKind::Haar)
}

fn request(cfg: &RunConfig, a: f64) -> Result<ExpansionRequest, CliError> {
    Ok(ExpansionRequest::new(cfg.profile.clone(), cfg.wavelet, cfg.b, a, cfg.n_terms)?.with_smoothness(cfg.m))
}

/// Policy metadata of the expansion the configuration selects.
pub fn policy_metadata(cfg: &RunConfig) -> Result<Value, CliError> {
    let req = request(cfg, cfg.grid.start)?;
    Ok(record::policy(&expand(&req, Some(HaarFIntegral::default()))?))
}

pub fn evaluate(cfg: &RunConfig) -> Result<Evaluation, CliError> {
    let q = &cfg.quadrature;
    let req = request(cfg, cfg.a)?;
    let haar = is_haar(&cfg.wavelet);
    // Guards first, so a rejected request never reaches the F integral.
    expand(&req, Some(HaarFIntegral::default()))?;
    let f_integrals = if haar {
        Some((
            haar_f_integral_with(&cfg.profile, cfg.b, q, OracleRule::Bisection)?,
            haar_f_integral_with(&cfg.profile, cfg.b, q, OracleRule::DoubleExponential)?,
        ))
    } else {
        None
    };
    let result = expand(&req, f_integrals.map(|f| f.0))?;
    let primary = cwt_oracle_with(&cfg.profile, &cfg.wavelet, cfg.b, cfg.a, q, OracleRule::Bisection)?;
    let secondary = cwt_oracle_with(&cfg.profile, &cfg.wavelet, cfg.b, cfg.a, q, OracleRule::DoubleExponential)?;
    let split = remainder_split(&req, &primary, &result)?;
    let delta = if haar && cfg.n_terms as f64 + cfg.profile.lambda - 1.0 > cfg.m as f64 {
        match haar_delta_explicit(&cfg.profile, cfg.b, cfg.a, cfg.n_terms, cfg.m, q) {
            Ok(v) => complex(v),
            Err(Error::InvalidArgument(_)) => Value::Null,
            Err(e) => return Err(e.into()),
        }
    } else {
        Value::Null
    };
    let hypotheses = check_hypotheses(&cfg.profile, &cfg.wavelet, cfg.m);

    let mut expansion = record::expansion(&result);
    expansion["f_integral"] = f_integrals.map_or(Value::Null, |f| complex(f.0.total()));
    let record = json!({
        "profile": record::profile(&cfg.profile),
        "wavelet": cfg.wavelet.to_string(),
        "b": num(cfg.b),
        "a": num(cfg.a),
        "n_terms": cfg.n_terms,
        "m": cfg.m,
        "metadata": record::policy(&result),
        "oracle": {
            "rule": OracleRule::Bisection.id(),
            "value": complex(primary.value),
            "positive": complex(primary.positive),
            "negative": complex(primary.negative),
            "error": num(primary.error),
            "cross_check": {
                "rule": OracleRule::DoubleExponential.id(),
                "value": complex(secondary.value),
                "error": num(secondary.error),
                "difference": num((primary.value - secondary.value).norm()),
            },
        },
        "expansion": expansion,
        "remainder": {
            "total": complex(split.total),
            "positive": complex(split.positive),
            "negative": complex(split.negative),
            "haar_delta_explicit": delta,
        },
        "predicted_slope": num(predicted_slope(&req)?),
        "hypotheses": record::hypotheses(&hypotheses),
    });
    Ok(Evaluation {
        record,
        primary,
        secondary,
        f_integrals,
    })
}

fn terms_csv(result: &ExpansionResult) -> Vec<u8> {
    let rows: Vec<Vec<String>> = (0..result.terms.len())
        .map(|s| {
            vec![
                s.to_string(),
                record::fmt17(result.scale_power[s]),
                record::fmt17(result.terms[s].re),
                record::fmt17(result.terms[s].im),
                record::fmt17(result.partial_sums[s].re),
                record::fmt17(result.partial_sums[s].im),
            ]
        })
        .collect();
    record::csv_bytes(&["s", "scale_power", "term_re", "term_im", "partial_sum_re", "partial_sum_im"], &rows)
}

fn emit(path: Option<&Path>, bytes: &[u8], prov: &Provenance) -> Result<(), CliError> {
    match path {
        Some(p) => record::write_with_sidecar(p, bytes, prov),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}")))
        }
    }
}

pub fn run_eval(cfg: &RunConfig, arguments: &[String]) -> Result<(), CliError> {
    let ev = evaluate(cfg)?;
    let prov = Provenance {
        command: "eval",
        arguments,
        config: cfg.config_path.as_deref(),
        policy: ev.record["metadata"].clone(),
    };
    if let Some(path) = &cfg.csv {
        let req = request(cfg, cfg.a)?;
        let result = expand(&req, ev.f_integrals.map(|f| f.0))?;
        record::write_with_sidecar(path, &terms_csv(&result), &prov)?;
    }
    if cfg.json.is_some() || cfg.csv.is_none() {
        emit(cfg.json.as_deref(), &record::to_json_bytes(&ev.record), &prov)?;
    }
    Ok(())
}

pub fn converge_csv(report: &ConvergenceReport, haar: bool) -> Vec<u8> {
    let mut header: Vec<&str> = CONVERGE_HEADER.to_vec();
    if haar {
        header.push("leading_extra_abs");
    }
    let fitted = report.fitted_slope.map_or(String::new(), record::fmt17);
    let rows: Vec<Vec<String>> = report
        .points
        .iter()
        .map(|p| {
            let mut row = vec![
                record::fmt17(p.a),
                record::fmt17(p.error),
                record::fmt17(p.partial_sum.re),
                record::fmt17(p.partial_sum.im),
                record::fmt17(p.oracle.re),
                record::fmt17(p.oracle.im),
                fitted.clone(),
                record::fmt17(report.predicted_slope),
                report.pass.to_string(),
            ];
            if haar {
                row.push(p.leading_extra_abs.map_or(String::new(), record::fmt17));
            }
            row
        })
        .collect();
    record::csv_bytes(&header, &rows)
}

pub fn converge_json(report: &ConvergenceReport, cfg: &RunConfig, policy: Value) -> Value {
    let points: Vec<Value> = report
        .points
        .iter()
        .map(|p| {
            json!({
                "a": num(p.a),
                "abs_error": num(p.error),
                "oracle": complex(p.oracle),
                "oracle_error": num(p.oracle_error),
                "partial_sum": complex(p.partial_sum),
                "term_magnitudes": p.term_magnitudes.iter().map(|&x| num(x)).collect::<Vec<_>>(),
                "leading_extra_abs": p.leading_extra_abs.map_or(Value::Null, num),
                "fitted": p.fitted,
            })
        })
        .collect();
    json!({
        "profile": record::profile(&cfg.profile),
        "wavelet": report.wavelet,
        "b": num(report.b),
        "n_terms": report.n_terms,
        "metadata": policy,
        "fitted_slope": report.fitted_slope.map_or(Value::Null, num),
        "predicted_slope": num(report.predicted_slope),
        "pass": report.pass,
        "degenerate": report.degenerate,
        "warnings": report.warnings,
        "points": points,
    })
}

pub fn converge(cfg: &RunConfig) -> Result<ConvergenceReport, CliError> {
    let grid = log_grid(cfg.grid.start, cfg.grid.stop, cfg.grid.points)?;
    Ok(convergence_study(&cfg.profile, &cfg.wavelet, cfg.b, cfg.n_terms, &grid, &cfg.quadrature)?)
}

pub fn run_converge(cfg: &RunConfig, arguments: &[String]) -> Result<(), CliError> {
    let policy = policy_metadata(cfg)?;
    let report = converge(cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let prov = Provenance {
        command: "converge",
        arguments,
        config: cfg.config_path.as_deref(),
        policy: policy.clone(),
    };
    if cfg.csv.is_some() || cfg.json.is_none() {
        emit(cfg.csv.as_deref(), &converge_csv(&report, is_haar(&cfg.wavelet)), &prov)?;
    }
    if let Some(path) = &cfg.json {
        record::write_with_sidecar(path, &record::to_json_bytes(&converge_json(&report, cfg, policy)), &prov)?;
    }
    Ok(())
}

pub fn hypotheses_record(cfg: &RunConfig) -> Value {
    let report = check_hypotheses(&cfg.profile, &cfg.wavelet, cfg.m);
    json!({
        "profile": record::profile(&cfg.profile),
        "wavelet": cfg.wavelet.to_string(),
        "hypotheses": record::hypotheses(&report),
    })
}

pub fn run_hypotheses(cfg: &RunConfig, arguments: &[String]) -> Result<(), CliError> {
    let value = hypotheses_record(cfg);
    let prov = Provenance {
        command: "hypotheses",
        arguments,
        config: cfg.config_path.as_deref(),
        policy: Value::Null,
    };
    emit(cfg.json.as_deref(), &record::to_json_bytes(&value), &prov)
}

#[derive(Debug, Clone, Copy)]
pub struct GoldenCase {
    pub id: &'static str,
    pub profile: &'static str,
    pub lambda: f64,
    pub wavelet: &'static str,
    pub b: f64,
    pub a: f64,
    pub n: usize,
}

pub const GOLDEN_CASES: [GoldenCase; 9] = [
    GoldenCase { id: "mexican-gauss-b0-a100-n2", profile: "gauss", lambda: 1.0, wavelet: "mexican", b: 0.0, a: 100.0, n: 2 },
    GoldenCase { id: "mexican-gauss-b1.5-a316-n2", profile: "gauss", lambda: 1.0, wavelet: "mexican", b: 1.5, a: 316.22776601683796, n: 2 },
    GoldenCase { id: "mexican-zero-b0-a100-n2", profile: "zero", lambda: 1.0, wavelet: "mexican", b: 0.0, a: 100.0, n: 2 },
    GoldenCase { id: "morlet2-gauss-b0-a100-n1", profile: "gauss", lambda: 1.0, wavelet: "morlet:2", b: 0.0, a: 100.0, n: 1 },
    GoldenCase { id: "morlet2-gauss0.5-b0.7-a50-n2", profile: "gauss", lambda: 0.5, wavelet: "morlet:2", b: 0.7, a: 50.0, n: 2 },
    GoldenCase { id: "morlet1-rational-b-1-a200-n2", profile: "rational", lambda: 1.0, wavelet: "morlet:1", b: -1.0, a: 200.0, n: 2 },
    GoldenCase { id: "haar-admissible0.5-b0-a100-n2", profile: "haar-admissible", lambda: 0.5, wavelet: "haar", b: 0.0, a: 100.0, n: 2 },
    GoldenCase { id: "haar-admissible0.7-b1.2-a1000-n3", profile: "haar-admissible", lambda: 0.7, wavelet: "haar", b: 1.2, a: 1000.0, n: 3 },
    GoldenCase { id: "haar-spectrum-b0-a1-n1", profile: "haar-spectrum", lambda: 1.0, wavelet: "haar", b: 0.0, a: 1.0, n: 1 },
];

/// The configuration of one golden case; quadrature comes from `base`.
pub fn golden_config(base: &RunConfig, case: &GoldenCase) -> Result<RunConfig, CliError> {
    let mut cfg = base.clone();
    cfg.profile = builtin_profile(case.profile, Some(case.lambda))?;
    cfg.wavelet = WaveletSpec::parse(case.wavelet)?;
    cfg.b = case.b;
    cfg.a = case.a;
    cfg.n_terms = case.n;
    cfg.m = 0;
    Ok(cfg)
}

/// Accepts a golden value only when both rules agree to `GOLDEN_REL_TOL`
/// and each rule's own error estimate is that small too.
pub fn certify(ev: &Evaluation, q: &QuadratureSettings) -> Result<(), String> {
    if q.rel_tol > GOLDEN_REL_TOL {
        return Err(format!("quadrature rel_tol {:e} is looser than the golden tolerance {GOLDEN_REL_TOL:e}", q.rel_tol));
    }
    let bound = (GOLDEN_REL_TOL * ev.primary.value.norm()).max(q.abs_tol);
    let diff = (ev.primary.value - ev.secondary.value).norm();
    if diff > bound {
        return Err(format!("rules disagree by {diff:.3e} (allowed {bound:.3e})"));
    }
    if ev.primary.error.max(ev.secondary.error) > bound {
        return Err(format!(
            "error estimates {:.3e} / {:.3e} exceed {bound:.3e}",
            ev.primary.error, ev.secondary.error
        ));
    }
    if let Some((x, y)) = ev.f_integrals {
        let scale = x.positive.norm().max(x.negative.norm());
        let diff = (x.positive - y.positive).norm().max((x.negative - y.negative).norm());
        if diff > (GOLDEN_REL_TOL * scale).max(q.abs_tol) {
            return Err(format!("F integral rules disagree by {diff:.3e}"));
        }
    }
    Ok(())
}

pub fn run_golden(base: &RunConfig) -> Result<(), CliError> {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for case in &GOLDEN_CASES {
        let cfg = golden_config(base, case)?;
        let ev = evaluate(&cfg)?;
        if let Err(why) = certify(&ev, &cfg.quadrature) {
            failures.push(format!("{}: {why}", case.id));
        }
        records.push((case.id, ev.record));
    }
    if !failures.is_empty() {
        return Err(CliError::Uncertified(failures.join("; ")));
    }
    let dir = &base.golden_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    for (id, value) in &records {
        record::write(&dir.join(format!("{id}.json")), &record::to_json_bytes(value))?;
    }
    // No sidecar here: the directory must be byte-identical across runs.
    let index: String = records.iter().map(|(id, _)| format!("{id}.json\n")).collect();
    record::write(&dir.join("index.txt"), index.as_bytes())?;
    eprintln!("wrote {} golden records to {}", records.len(), dir.display());
    Ok(())
}
