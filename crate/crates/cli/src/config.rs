//! Run settings: built from an optional TOML/JSON file, then command-line
//! flags on top.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use ratesplit::estimator::{AxisRule, Method};
use ratesplit::fading::{EstimateVariance, GaussianEstimateLaw};
use ratesplit::{ErrorLaw, ErrorProfile, ExpectationSpec, FadingModel, LayeringSpec, Units};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Constant,
    Prediction,
    Interpolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Quad,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RuleArg {
    Graded,
    Laguerre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Switch {
    On,
    Off,
}

/// Requestable bound kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    RM,
    RStar2,
    RStarL,
    RLayered,
    RStarInf,
    IUpper,
    CCoh,
}

impl Kind {
    /// Kinds that have a column in the sweep CSV, in column order.
    pub const SWEEP: [Kind; 5] = [Kind::RM, Kind::RStar2, Kind::RStarInf, Kind::IUpper, Kind::CCoh];

    pub fn name(self) -> &'static str {
        match self {
            Kind::RM => "r_m",
            Kind::RStar2 => "r_star2",
            Kind::RStarL => "r_star_l",
            Kind::RLayered => "r_layered",
            Kind::RStarInf => "r_star_inf",
            Kind::IUpper => "i_upper",
            Kind::CCoh => "c_coh",
        }
    }
}

impl FromStr for Kind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s.trim() {
            "r_m" => Kind::RM,
            "r_star2" => Kind::RStar2,
            "r_star_l" => Kind::RStarL,
            "r_layered" => Kind::RLayered,
            "r_star_inf" => Kind::RStarInf,
            "i_upper" => Kind::IUpper,
            "c_coh" => Kind::CCoh,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown bound kind '{other}' (expected r_m, r_star2, r_star_l, r_layered, r_star_inf, i_upper, c_coh)"
                )))
            }
        })
    }
}

pub fn parse_kinds(s: &str) -> Result<Vec<Kind>, CliError> {
    let kinds: Vec<Kind> = s.split(',').filter(|p| !p.trim().is_empty()).map(Kind::from_str).collect::<Result<_, _>>()?;
    if kinds.is_empty() {
        return Err(CliError::Usage("no bound kinds requested".into()));
    }
    Ok(kinds)
}

/// `A:B:STEP` (inclusive) or a comma-separated list, in dB.
pub fn parse_snr_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("invalid SNR grid '{s}': {why}"));
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let grid: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected A:B:STEP"));
        }
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || !step.is_finite() {
            return Err(bad("STEP must be positive"));
        }
        if b < a {
            return Err(bad("B must not be below A"));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        if n > 100_000 {
            return Err(bad("too many points"));
        }
        (0..=n).map(|i| a + i as f64 * step).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if grid.is_empty() {
        return Err(bad("empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(bad("values must be finite"));
    }
    let mut sorted = grid.clone();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    Ok(sorted)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub vtilde: f64,
    pub vhat: f64,
    pub mu_re: f64,
    pub mu_im: f64,
    pub b: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            kind: ModelKind::Constant,
            vtilde: 0.5,
            vhat: 0.5,
            mu_re: 0.0,
            mu_im: 0.0,
            b: 0.25,
        }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<FadingModel, CliError> {
        let mu = Complex64::new(self.mu_re, self.mu_im);
        let (variance, profile) = match self.kind {
            ModelKind::Constant => (
                EstimateVariance::Fixed(self.vhat),
                ErrorProfile::Constant { vtilde: self.vtilde },
            ),
            ModelKind::Prediction => (EstimateVariance::Complement, ErrorProfile::prediction(self.b)?),
            ModelKind::Interpolation => (EstimateVariance::Complement, ErrorProfile::interpolation(self.b)?),
        };
        Ok(FadingModel::new(GaussianEstimateLaw { mu, variance }, profile, ErrorLaw::Gaussian)?)
    }

    /// Pilot overhead factor `(T−1)/T`, defined for interpolation only.
    pub fn pilot_factor(&self) -> Result<f64, CliError> {
        match self.build()?.error {
            ErrorProfile::Interpolation { t, .. } => Ok((t as f64 - 1.0) / t as f64),
            _ => Err(CliError::Usage("--pilot-loss needs the interpolation model".into())),
        }
    }

    pub fn describe(&self) -> String {
        let mu = format!("{}{:+}i", self.mu_re, self.mu_im);
        match self.kind {
            ModelKind::Constant => format!("constant vhat={} vtilde={} mu={mu}", self.vhat, self.vtilde),
            ModelKind::Prediction => format!("prediction B={} mu={mu} (vhat = 1 - |mu|^2 - vtilde)", self.b),
            ModelKind::Interpolation => {
                let t = (1.0 / (2.0 * self.b)).floor();
                format!("interpolation B={} T={t} mu={mu} (vhat = 1 - |mu|^2 - vtilde)", self.b)
            }
        }
    }
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<ModelKind>,
    pub vtilde: Option<f64>,
    pub vhat: Option<f64>,
    pub mu_re: Option<f64>,
    pub mu_im: Option<f64>,
    #[serde(alias = "B")]
    pub b: Option<f64>,
    pub snr_db: Option<GridValue>,
    pub power: Option<f64>,
    pub n0: Option<f64>,
    pub layers: Option<usize>,
    pub layering: Option<String>,
    pub kinds: Option<Vec<String>>,
    pub method: Option<MethodArg>,
    pub rule: Option<RuleArg>,
    pub nodes: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub units: Option<Units>,
    pub pilot_loss: Option<bool>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridValue {
    Range(String),
    List(Vec<f64>),
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
        }
    }
}

/// Command-line overrides; `None` means "not given".
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Error-variance model.
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Estimation-error variance (constant model).
    #[arg(long)]
    pub vtilde: Option<f64>,
    /// Estimate variance (constant model).
    #[arg(long)]
    pub vhat: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_im: Option<f64>,
    /// Fading bandwidth (prediction and interpolation models).
    #[arg(long = "B")]
    pub b: Option<f64>,
    /// SNR grid in dB, `A:B:STEP` or `a,b,c`.
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: Option<String>,
    #[arg(long)]
    pub power: Option<f64>,
    #[arg(long)]
    pub n0: Option<f64>,
    /// Layer count for the optimized `r_star_l` bound.
    #[arg(long)]
    pub layers: Option<usize>,
    /// Cumulative powers `q1,q2,...` or `uniform:K` for `r_layered`.
    #[arg(long)]
    pub layering: Option<String>,
    /// Comma-separated bound kinds.
    #[arg(long)]
    pub kinds: Option<String>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Quadrature rule on both axes.
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
    /// Quadrature nodes per axis.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Monte-Carlo samples.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, env = "RSB_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub units: Option<Units>,
    /// Scale rates by the pilot overhead `(T-1)/T`.
    #[arg(long, value_enum)]
    pub pilot_loss: Option<Switch>,
    /// Worker threads for grid points.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML or JSON settings file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub model: ModelSpec,
    pub grid: Option<Vec<f64>>,
    pub power: Option<f64>,
    pub n0: f64,
    pub layers: Option<usize>,
    pub layering: Option<LayeringSpec>,
    pub kinds: Option<Vec<Kind>>,
    pub spec: ExpectationSpec,
    pub units: Units,
    pub pilot_loss: bool,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Settings {
    /// Applies `file` and then `flags` over `base`.
    pub fn resolve(base: ModelSpec, flags: &Overrides) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let model = ModelSpec {
            kind: flags.model.or(file.model).unwrap_or(base.kind),
            vtilde: flags.vtilde.or(file.vtilde).unwrap_or(base.vtilde),
            vhat: flags.vhat.or(file.vhat).unwrap_or(base.vhat),
            mu_re: flags.mu_re.or(file.mu_re).unwrap_or(base.mu_re),
            mu_im: flags.mu_im.or(file.mu_im).unwrap_or(base.mu_im),
            b: flags.b.or(file.b).unwrap_or(base.b),
        };
        model.build()?;
        let grid = match (&flags.snr_db, &file.snr_db) {
            (Some(s), _) => Some(parse_snr_grid(s)?),
            (None, Some(GridValue::Range(s))) => Some(parse_snr_grid(s)?),
            (None, Some(GridValue::List(v))) => {
                let joined = v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                Some(parse_snr_grid(&joined)?)
            }
            (None, None) => None,
        };
        let kinds = match (&flags.kinds, &file.kinds) {
            (Some(s), _) => Some(parse_kinds(s)?),
            (None, Some(v)) => Some(parse_kinds(&v.join(","))?),
            (None, None) => None,
        };
        let layering = flags
            .layering
            .as_ref()
            .or(file.layering.as_ref())
            .map(|s| LayeringSpec::from_str(s))
            .transpose()?;
        let method = match flags.method.or(file.method).unwrap_or(MethodArg::Quad) {
            MethodArg::Quad => Method::Quadrature,
            MethodArg::Mc => Method::MonteCarlo,
        };
        let rule = match flags.rule.or(file.rule).unwrap_or(RuleArg::Graded) {
            RuleArg::Graded => AxisRule::Graded,
            RuleArg::Laguerre => AxisRule::Laguerre,
        };
        let defaults = ExpectationSpec::default();
        let nodes = flags.nodes.or(file.nodes).unwrap_or(defaults.nodes_g);
        let spec = ExpectationSpec {
            method,
            rule_g: rule,
            rule_w: rule,
            nodes_g: nodes,
            nodes_w: nodes,
            samples: flags.samples.or(file.samples).unwrap_or(defaults.samples),
            seed: flags.seed.or(file.seed).unwrap_or(defaults.seed),
            ..defaults
        };
        spec.validate()?;
        let n0 = flags.n0.or(file.n0).unwrap_or(1.0);
        if !(n0 > 0.0) || !n0.is_finite() {
            return Err(CliError::Usage(format!("--n0 must be positive (got {n0})")));
        }
        let power = flags.power.or(file.power);
        if let Some(p) = power {
            if !(p > 0.0) || !p.is_finite() {
                return Err(CliError::Usage(format!("--power must be positive (got {p})")));
            }
        }
        let layers = flags.layers.or(file.layers);
        if layers == Some(0) {
            return Err(CliError::Usage("--layers must be at least 1".into()));
        }
        let pilot_loss = match flags.pilot_loss {
            Some(s) => s == Switch::On,
            None => file.pilot_loss.unwrap_or(false),
        };
        if pilot_loss {
            model.pilot_factor()?;
        }
        let jobs = flags.jobs.or(file.jobs);
        if jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        Ok(Settings {
            model,
            grid,
            power,
            n0,
            layers,
            layering,
            kinds,
            spec,
            units: flags.units.or(file.units).unwrap_or_default(),
            pilot_loss,
            jobs,
            out: flags.out.clone().or(file.out),
        })
    }

    pub fn rate_factor(&self) -> f64 {
        if self.pilot_loss {
            self.model.pilot_factor().unwrap_or(1.0)
        } else {
            1.0
        }
    }
}
