//! JSON and CSV emission. Every number carries 17 significant digits.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use cwt_asymptotics::expansion::ExpansionResult;
use cwt_asymptotics::profiles::{FreqProfile, HypothesisReport, ProfileFamily};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::CliError;

/// `x` as a JSON number with 17 significant digits; `null` when not finite.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    serde_json::Number::from_str(&fmt17(x)).map(Value::Number).unwrap_or(Value::Null)
}

pub fn complex(c: Complex64) -> Value {
    json!({ "re": num(c.re), "im": num(c.im) })
}

/// Text form used in CSV cells; empty when not finite.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

pub fn profile(p: &FreqProfile) -> Value {
    let kappa = match p.family {
        ProfileFamily::Gauss { kappa } | ProfileFamily::Rational { kappa } | ProfileFamily::HaarAdmissible { kappa } => num(kappa),
        ProfileFamily::Zero | ProfileFamily::HaarSpectrum => Value::Null,
    };
    json!({
        "name": p.name,
        "family": p.family.id(),
        "lambda": num(p.lambda),
        "kappa": kappa,
    })
}

/// Constant-policy metadata carried by every record.
pub fn policy(e: &ExpansionResult) -> Value {
    json!({
        "formula_id": e.formula_id.id(),
        "constant_policy": e.policy.id(),
        "phase_convention": e.phase.id(),
        "constant_note": e.constant_note,
    })
}

pub fn expansion(e: &ExpansionResult) -> Value {
    json!({
        "scale_power": e.scale_power.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "terms": e.terms.iter().map(|&c| complex(c)).collect::<Vec<_>>(),
        "partial_sums": e.partial_sums.iter().map(|&c| complex(c)).collect::<Vec<_>>(),
        "leading_extra": e.leading_extra.map_or(Value::Null, complex),
        "n_m_compatible": e.n_m_compatible,
    })
}

pub fn hypotheses(r: &HypothesisReport) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| json!({ "id": c.id, "passed": c.passed, "witness": num(c.witness), "note": c.note }))
        .collect();
    json!({ "m": r.m, "all_passed": r.all_passed(), "checks": checks })
}

pub fn to_json_bytes(v: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("JSON values serialize");
    bytes.push(b'\n');
    bytes
}

pub fn sidecar_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    data.with_file_name(name)
}

/// Provenance kept out of the data file so data stays byte-stable.
pub struct Provenance<'a> {
    pub command: &'a str,
    pub arguments: &'a [String],
    pub config: Option<&'a Path>,
    pub policy: Value,
}

pub fn write_with_sidecar(path: &Path, bytes: &[u8], prov: &Provenance) -> Result<(), CliError> {
    write(path, bytes)?;
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = json!({
        "tool": "wavelet-asym",
        "version": env!("CARGO_PKG_VERSION"),
        "command": prov.command,
        "arguments": prov.arguments,
        "config": prov.config.map(|p| p.display().to_string()),
        "data_file": path.file_name().map(|n| n.to_string_lossy().into_owned()),
        "created_unix": created,
        "metadata": prov.policy,
    });
    write(&sidecar_path(path), &to_json_bytes(&meta))
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Writes `rows` under `header` as UTF-8 CSV with LF line endings.
pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let text = fmt17(x);
            assert_eq!(text.parse::<f64>().unwrap(), x);
            let digits = text.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
            assert_eq!(digits, 17, "{text}");
            let v = num(x);
            assert_eq!(v.as_f64().unwrap(), x);
        }
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(fmt17(f64::INFINITY), "");
    }

    #[test]
    fn csv_uses_lf() {
        let bytes = csv_bytes(&["a", "b"], &[vec!["1".into(), "2".into()]]);
        assert_eq!(bytes, b"a,b\n1,2\n");
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("out/run.csv")), PathBuf::from("out/run.csv.meta.json"));
    }
}
