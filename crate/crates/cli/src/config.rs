//! Run configuration: defaults, then the `[run]` section of the config file,
//! then the section named after the command, then command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use cwt_asymptotics::mellin::WaveletSpec;
use cwt_asymptotics::oracle::{CutoffStrategy, OscillationHandling, QuadratureSettings};
use cwt_asymptotics::profiles::{builtin_profile, DecayClass, FreqProfile, ProfileFamily};
use num_complex::Complex64;
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_A: f64 = 100.0;
/// 100 to 10^3.5 with 8 log-spaced points.
pub const DEFAULT_GRID: Grid = Grid {
    start: 100.0,
    stop: 3162.2776601683795,
    points: 8,
};
pub const MIN_GRID_POINTS: usize = 4;
pub const DEFAULT_GOLDEN_DIR: &str = "golden";

#[derive(Parser, Debug)]
#[command(name = "wavelet-asym", version, about = "Large-scale asymptotics of the continuous wavelet transform")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Oracle value, expansion terms and remainder at one (b, a).
    Eval(Flags),
    /// Truncation error over a grid of scales and its log-log slope.
    Converge(Flags),
    /// Regenerate the certified golden records.
    Golden(Flags),
    /// Check the expansion hypotheses for a profile and wavelet.
    Hypotheses(Flags),
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Eval(_) => CommandKind::Eval,
            Command::Converge(_) => CommandKind::Converge,
            Command::Golden(_) => CommandKind::Golden,
            Command::Hypotheses(_) => CommandKind::Hypotheses,
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Eval(f) | Command::Converge(f) | Command::Golden(f) | Command::Hypotheses(f) => f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Eval,
    Converge,
    Golden,
    Hypotheses,
}

impl CommandKind {
    pub fn id(&self) -> &'static str {
        match self {
            CommandKind::Eval => "eval",
            CommandKind::Converge => "converge",
            CommandKind::Golden => "golden",
            CommandKind::Hypotheses => "hypotheses",
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// Built-in profile (gauss, rational, haar-admissible, haar-spectrum, zero)
    /// or a `[profile.NAME]` section of the config file.
    #[arg(long)]
    pub profile: Option<String>,
    /// Origin exponent of the profile, 0 < lambda <= 1.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// morlet:OMEGA0, mexican or haar.
    #[arg(long)]
    pub wavelet: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, conflicts_with = "a_grid")]
    pub a: Option<f64>,
    /// Log-spaced grid START:STOP:POINTS.
    #[arg(long = "a-grid", value_name = "START:STOP:POINTS")]
    pub a_grid: Option<String>,
    /// Number of expansion terms.
    #[arg(long)]
    pub n: Option<usize>,
    /// Smoothness order used by the explicit Haar remainder.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Golden directory.
    #[arg(long)]
    pub dir: Option<PathBuf>,
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    #[arg(long = "abs-tol")]
    pub abs_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("a-grid must be START:STOP:POINTS, got `{text}`"));
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [start, stop, points] = parts[..] else { return Err(bad()) };
        let grid = Grid {
            start: start.parse().map_err(|_| bad())?,
            stop: stop.parse().map_err(|_| bad())?,
            points: points.parse().map_err(|_| bad())?,
        };
        if !(grid.start > 0.0 && grid.stop > grid.start && grid.stop.is_finite()) {
            return Err(CliError::Config(format!("a-grid needs 0 < START < STOP, got `{text}`")));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub profile: FreqProfile,
    pub wavelet: WaveletSpec,
    pub b: f64,
    pub a: f64,
    pub grid: Grid,
    pub n_terms: usize,
    pub m: usize,
    pub quadrature: QuadratureSettings,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub golden_dir: PathBuf,
    pub config_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    run: Option<Section>,
    eval: Option<Section>,
    converge: Option<Section>,
    golden: Option<Section>,
    hypotheses: Option<Section>,
    quadrature: Option<QuadratureSection>,
    #[serde(default)]
    profile: BTreeMap<String, ProfileSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Section {
    profile: Option<String>,
    lambda: Option<f64>,
    wavelet: Option<String>,
    b: Option<f64>,
    a: Option<f64>,
    a_grid: Option<String>,
    n: Option<usize>,
    m: Option<usize>,
    csv: Option<PathBuf>,
    json: Option<PathBuf>,
    dir: Option<PathBuf>,
}

impl Section {
    fn or(self, base: Section) -> Section {
        Section {
            profile: self.profile.or(base.profile),
            lambda: self.lambda.or(base.lambda),
            wavelet: self.wavelet.or(base.wavelet),
            b: self.b.or(base.b),
            a: self.a.or(base.a),
            a_grid: self.a_grid.or(base.a_grid),
            n: self.n.or(base.n),
            m: self.m.or(base.m),
            csv: self.csv.or(base.csv),
            json: self.json.or(base.json),
            dir: self.dir.or(base.dir),
        }
    }
}

impl From<&Flags> for Section {
    fn from(f: &Flags) -> Self {
        Section {
            profile: f.profile.clone(),
            lambda: f.lambda,
            wavelet: f.wavelet.clone(),
            b: f.b,
            a: f.a,
            a_grid: f.a_grid.clone(),
            n: f.n,
            m: f.m,
            csv: f.csv.clone(),
            json: f.json.clone(),
            dir: f.dir.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadratureSection {
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
    max_subdivisions: Option<usize>,
    /// `decay:ENVELOPE_TOL` or `fixed:OMEGA_MAX`.
    cutoff: Option<String>,
    /// `per-period` or `none`.
    oscillation: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum CoeffEntry {
    Real(f64),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileSection {
    family: String,
    kappa: Option<f64>,
    lambda: Option<f64>,
    coeffs: Option<Vec<CoeffEntry>>,
    /// `gaussian:RATE`, `polynomial:ORDER` or `exponential:RATE`.
    decay: Option<String>,
    sigma_bound: Option<f64>,
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(command: &Command) -> Result<Self, CliError> {
        let flags = command.flags();
        let kind = command.kind();
        let file = match &flags.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let per_command = match kind {
            CommandKind::Eval => file.eval.clone(),
            CommandKind::Converge => file.converge.clone(),
            CommandKind::Golden => file.golden.clone(),
            CommandKind::Hypotheses => file.hypotheses.clone(),
        };
        let merged = Section::from(flags)
            .or(per_command.unwrap_or_default())
            .or(file.run.clone().unwrap_or_default());

        let profile_name = merged.profile.clone().unwrap_or_else(|| "gauss".into());
        let profile = match file.profile.get(&profile_name) {
            Some(section) => custom_profile(&profile_name, section, merged.lambda)?,
            None => builtin_profile(&profile_name, merged.lambda).map_err(|e| CliError::Config(e.to_string()))?,
        };
        let wavelet = WaveletSpec::parse(merged.wavelet.as_deref().unwrap_or("mexican")).map_err(|e| CliError::Config(e.to_string()))?;
        let b = merged.b.unwrap_or(0.0);
        if !b.is_finite() {
            return Err(CliError::Config(format!("b must be finite, got {b}")));
        }
        let a = merged.a.unwrap_or(DEFAULT_A);
        if !(a > 0.0 && a.is_finite()) {
            return Err(CliError::Config(format!("a must be positive, got {a}")));
        }
        let grid = match &merged.a_grid {
            Some(text) => text.parse()?,
            None => DEFAULT_GRID,
        };
        if kind == CommandKind::Converge {
            if flags.a.is_some() {
                return Err(CliError::Config("converge takes --a-grid, not --a".into()));
            }
            if grid.points < MIN_GRID_POINTS {
                return Err(CliError::Config(format!(
                    "converge needs at least {MIN_GRID_POINTS} grid points, got {}",
                    grid.points
                )));
            }
        }
        if kind == CommandKind::Eval && flags.a_grid.is_some() {
            return Err(CliError::Config("eval takes --a, not --a-grid".into()));
        }
        let n_terms = merged.n.unwrap_or(1);
        if n_terms == 0 {
            return Err(CliError::Config("n must be at least 1".into()));
        }
        let quadrature = quadrature_settings(file.quadrature.unwrap_or_default(), flags)?;
        Ok(RunConfig {
            command: kind,
            profile,
            wavelet,
            b,
            a,
            grid,
            n_terms,
            m: merged.m.unwrap_or(0),
            quadrature,
            csv: merged.csv,
            json: merged.json,
            golden_dir: merged.dir.unwrap_or_else(|| PathBuf::from(DEFAULT_GOLDEN_DIR)),
            config_path: flags.config.clone(),
        })
    }
}

fn quadrature_settings(section: QuadratureSection, flags: &Flags) -> Result<QuadratureSettings, CliError> {
    let mut q = QuadratureSettings::default();
    if let Some(v) = flags.abs_tol.or(section.abs_tol) {
        q.abs_tol = v;
    }
    if let Some(v) = flags.rel_tol.or(section.rel_tol) {
        q.rel_tol = v;
    }
    if let Some(v) = section.max_subdivisions {
        q.max_subdivisions = v;
    }
    if let Some(text) = &section.cutoff {
        let bad = || CliError::Config(format!("cutoff must be decay:TOL or fixed:OMEGA, got `{text}`"));
        let (kind, value) = text.split_once(':').ok_or_else(bad)?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        q.cutoff = match kind.trim() {
            "decay" => CutoffStrategy::DecayBased(value),
            "fixed" => CutoffStrategy::Fixed(value),
            _ => return Err(bad()),
        };
    }
    if let Some(text) = &section.oscillation {
        q.oscillation = match text.as_str() {
            "per-period" => OscillationHandling::SubdividePerPeriod,
            "none" => OscillationHandling::None,
            _ => return Err(CliError::Config(format!("oscillation must be per-period or none, got `{text}`"))),
        };
    }
    q.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(q)
}

fn custom_profile(name: &str, section: &ProfileSection, lambda_override: Option<f64>) -> Result<FreqProfile, CliError> {
    let kappa = section.kappa.unwrap_or(1.0);
    let family = match section.family.as_str() {
        "gauss" => ProfileFamily::Gauss { kappa },
        "rational" => ProfileFamily::Rational { kappa },
        "haar-admissible" => ProfileFamily::HaarAdmissible { kappa },
        "haar-spectrum" => ProfileFamily::HaarSpectrum,
        "zero" => ProfileFamily::Zero,
        other => return Err(CliError::Config(format!("profile `{name}`: unknown family `{other}`"))),
    };
    let lambda = lambda_override.or(section.lambda).unwrap_or(1.0);
    let mut profile = FreqProfile::new(name, family, lambda).map_err(|e| CliError::Config(format!("profile `{name}`: {e}")))?;
    if let Some(entries) = &section.coeffs {
        let coeffs = entries
            .iter()
            .map(|entry| match entry {
                CoeffEntry::Real(x) => Ok(Complex64::new(*x, 0.0)),
                CoeffEntry::Text(t) => Complex64::from_str(t).map_err(|_| CliError::Config(format!("profile `{name}`: bad coefficient `{t}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs.is_empty() {
            return Err(CliError::Config(format!("profile `{name}`: empty coefficient list")));
        }
        profile = profile.with_coeffs(coeffs);
        if let Some(n) = profile.origin_expansion_mismatch(profile.coeffs.len()) {
            return Err(CliError::Config(format!(
                "profile `{name}`: coefficients disagree with the `{}` family near the origin from term {}",
                section.family,
                n - 1
            )));
        }
    }
    if let Some(text) = &section.decay {
        let bad = || CliError::Config(format!("profile `{name}`: decay must be gaussian:RATE, polynomial:ORDER or exponential:RATE"));
        let (kind, value) = text.split_once(':').ok_or_else(bad)?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        profile = profile.with_decay(match kind.trim() {
            "gaussian" => DecayClass::Gaussian { rate: value },
            "polynomial" => DecayClass::Polynomial { order: value },
            "exponential" => DecayClass::Exponential { rate: value },
            _ => return Err(bad()),
        });
    }
    profile.sigma_bound = section.sigma_bound;
    Ok(profile)
}
