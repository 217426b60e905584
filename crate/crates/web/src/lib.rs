//! WebAssembly bindings for the browser demo. The plain functions carry the
//! logic and are tested natively; the `#[wasm_bindgen]` wrappers only move
//! their errors into JavaScript exceptions.

use clap::Parser;
use wasm_bindgen::prelude::*;
use wavelet_asym::commands;
use wavelet_asym::record;
use wavelet_asym::{Cli, RunConfig};

fn resolve(args: &[String]) -> Result<RunConfig, String> {
    let argv = std::iter::once("wavelet-asym".to_string()).chain(args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| e.to_string())?;
    RunConfig::resolve(&cli.command).map_err(|e| e.to_string())
}

fn common(command: &str, profile: &str, lambda: f64, wavelet: &str) -> Vec<String> {
    vec![
        command.into(),
        "--profile".into(),
        profile.into(),
        "--lambda".into(),
        lambda.to_string(),
        "--wavelet".into(),
        wavelet.into(),
    ]
}

fn text(v: &serde_json::Value) -> String {
    String::from_utf8(record::to_json_bytes(v)).expect("JSON is UTF-8")
}

/// Single evaluation record, as `wavelet-asym eval` prints it.
pub fn evaluate(profile: &str, lambda: f64, wavelet: &str, b: f64, a: f64, n: usize) -> Result<String, String> {
    let mut args = common("eval", profile, lambda, wavelet);
    args.extend(["--b".into(), b.to_string(), "--a".into(), a.to_string(), "--n".into(), n.to_string()]);
    let cfg = resolve(&args)?;
    let ev = commands::evaluate(&cfg).map_err(|e| e.to_string())?;
    Ok(text(&ev.record))
}

/// Convergence study on a log grid from `start` to `stop`.
#[allow(clippy::too_many_arguments)]
pub fn converge(profile: &str, lambda: f64, wavelet: &str, b: f64, start: f64, stop: f64, points: usize, n: usize) -> Result<String, String> {
    let mut args = common("converge", profile, lambda, wavelet);
    args.extend([
        "--b".into(),
        b.to_string(),
        "--a-grid".into(),
        format!("{start}:{stop}:{points}"),
        "--n".into(),
        n.to_string(),
    ]);
    let cfg = resolve(&args)?;
    let policy = commands::policy_metadata(&cfg).map_err(|e| e.to_string())?;
    let report = commands::converge(&cfg).map_err(|e| e.to_string())?;
    Ok(text(&commands::converge_json(&report, &cfg, policy)))
}

pub fn hypotheses(profile: &str, lambda: f64, wavelet: &str, m: usize) -> Result<String, String> {
    let mut args = common("hypotheses", profile, lambda, wavelet);
    args.extend(["--m".into(), m.to_string()]);
    let cfg = resolve(&args)?;
    Ok(text(&commands::hypotheses_record(&cfg)))
}

#[wasm_bindgen(js_name = evaluate)]
pub fn evaluate_js(profile: &str, lambda: f64, wavelet: &str, b: f64, a: f64, n: usize) -> Result<String, JsError> {
    evaluate(profile, lambda, wavelet, b, a, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = converge)]
#[allow(clippy::too_many_arguments)]
pub fn converge_js(profile: &str, lambda: f64, wavelet: &str, b: f64, start: f64, stop: f64, points: usize, n: usize) -> Result<String, JsError> {
    converge(profile, lambda, wavelet, b, start, stop, points, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = hypotheses)]
pub fn hypotheses_js(profile: &str, lambda: f64, wavelet: &str, m: usize) -> Result<String, JsError> {
    hypotheses(profile, lambda, wavelet, m).map_err(|e| JsError::new(&e))
}
