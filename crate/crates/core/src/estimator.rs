//! Expectation engine over `G = |Ĥ|²` and an independent `W ~ Exp(1)`.
//!
//! The quadrature path writes `G = V̂·U` with `U ~ Exp(1)` (valid for a
//! zero-mean Gaussian estimate) and uses a tensor product of one-dimensional
//! exponential-law rules. Its error estimate compares `n` against `2n` nodes
//! per axis. The Monte-Carlo path draws samples in fixed batches; batch `i`
//! uses `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, and batch statistics
//! are merged in batch order, so results do not depend on the thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::ChannelPoint;
use crate::error::{Error, Result};
use crate::fading::{complex_gaussian, ErrorLaw, FadingModel};
use crate::layering::Layering;
use crate::quadrature::{cached_graded, cached_laguerre, ExpRule};

/// Samples per Monte-Carlo batch (one RNG stream per batch).
pub const MC_BATCH: usize = 10_000;

/// Generator recorded in output metadata.
pub const RNG_NAME: &str = "ChaCha8Rng(seed_from_u64(seed), stream = batch index)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisRule {
    /// Plain Gauss–Laguerre.
    Laguerre,
    /// Graded Legendre panels on `[0, 1]` plus a Laguerre tail.
    Graded,
}

impl AxisRule {
    fn rule(self, n: usize) -> std::sync::Arc<ExpRule> {
        match self {
            AxisRule::Laguerre => cached_laguerre(n),
            AxisRule::Graded => cached_graded(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationSpec {
    pub method: Method,
    pub rule_g: AxisRule,
    pub rule_w: AxisRule,
    pub nodes_g: usize,
    pub nodes_w: usize,
    pub samples: usize,
    pub seed: u64,
    pub target_rel_tol: f64,
}

impl Default for ExpectationSpec {
    fn default() -> Self {
        Self {
            method: Method::Quadrature,
            rule_g: AxisRule::Graded,
            rule_w: AxisRule::Graded,
            nodes_g: 32,
            nodes_w: 32,
            samples: 1_000_000,
            seed: 0,
            target_rel_tol: 1e-6,
        }
    }
}

impl ExpectationSpec {
    pub fn quadrature(nodes: usize) -> Self {
        Self {
            nodes_g: nodes,
            nodes_w: nodes,
            ..Self::default()
        }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self {
            method: Method::MonteCarlo,
            samples,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes_g < 4 || self.nodes_w < 4 {
            return Err(Error::InvalidSpec(format!(
                "quadrature needs at least 4 nodes per axis (got {}x{})",
                self.nodes_g, self.nodes_w
            )));
        }
        if self.samples < 1_000 {
            return Err(Error::InvalidSpec(format!(
                "Monte-Carlo needs at least 1000 samples (got {})",
                self.samples
            )));
        }
        if !(self.target_rel_tol > 0.0) {
            return Err(Error::InvalidSpec("target_rel_tol must be positive".into()));
        }
        Ok(())
    }

    /// Same spec with twice the nodes on both axes.
    pub fn doubled(&self) -> Self {
        Self {
            nodes_g: 2 * self.nodes_g,
            nodes_w: 2 * self.nodes_w,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Points per axis actually evaluated (after grading).
    pub points_g: Option<usize>,
    pub points_w: Option<usize>,
    pub nodes_g: Option<usize>,
    pub nodes_w: Option<usize>,
    /// `|value(n) - value(2n)|`.
    pub doubling_diff: Option<f64>,
    /// Floating-point summation floor `16·ε·Σ|wᵢ fᵢ|`.
    pub roundoff_floor: Option<f64>,
    pub samples: Option<usize>,
    pub stderr: Option<f64>,
    pub seed: Option<u64>,
    pub rng: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub value: f64,
    pub error_estimate: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl EstimateResult {
    pub fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            method,
            diagnostics: Diagnostics::default(),
        }
    }

    /// Sum of two estimates; error estimates add.
    pub fn plus(&self, other: &EstimateResult) -> EstimateResult {
        let stderr = match (self.diagnostics.stderr, other.diagnostics.stderr) {
            (Some(a), Some(b)) => Some(a + b),
            (a, b) => a.or(b),
        };
        EstimateResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            method: self.method,
            diagnostics: Diagnostics {
                stderr,
                ..self.diagnostics.clone()
            },
        }
    }

    pub fn offset(&self, delta: f64) -> EstimateResult {
        EstimateResult {
            value: self.value + delta,
            ..self.clone()
        }
    }

    /// Whether the error estimate is within `rel_tol · |value|`.
    pub fn within(&self, rel_tol: f64) -> bool {
        self.error_estimate <= rel_tol * self.value.abs().max(f64::MIN_POSITIVE)
    }
}

fn check_finite(value: f64, g: f64, w: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { g, w, value })
    }
}

struct Accum {
    sum: f64,
    abs: f64,
}

fn tensor_sum<F>(f: &F, g_rule: &ExpRule, g_scale: f64, w_rule: &ExpRule) -> Result<Accum>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let rows: Vec<Result<(f64, f64)>> = g_rule
        .nodes
        .par_iter()
        .zip(g_rule.weights.par_iter())
        .map(|(&u, &wg)| {
            let g = g_scale * u;
            let mut s = 0.0;
            let mut a = 0.0;
            for (w, ww) in w_rule.iter() {
                let v = check_finite(f(g, w), g, w)?;
                s += ww * v;
                a += (ww * v).abs();
            }
            Ok((wg * s, wg * a))
        })
        .collect();
    let mut acc = Accum { sum: 0.0, abs: 0.0 };
    for r in rows {
        let (s, a) = r?;
        acc.sum += s;
        acc.abs += a;
    }
    Ok(acc)
}

fn single_sum<F: Fn(f64) -> f64>(f: &F, rule: &ExpRule, scale: f64, tag_w: bool) -> Result<Accum> {
    let mut acc = Accum { sum: 0.0, abs: 0.0 };
    for (u, wt) in rule.iter() {
        let x = scale * u;
        let v = if tag_w {
            check_finite(f(x), f64::NAN, x)?
        } else {
            check_finite(f(x), x, f64::NAN)?
        };
        acc.sum += wt * v;
        acc.abs += (wt * v).abs();
    }
    Ok(acc)
}

fn roundoff(abs: f64) -> f64 {
    16.0 * f64::EPSILON * abs
}

fn quad_result(coarse: Accum, fine: Accum, spec: &ExpectationSpec, points: (Option<usize>, Option<usize>)) -> EstimateResult {
    let diff = (coarse.sum - fine.sum).abs();
    let floor = roundoff(fine.abs);
    EstimateResult {
        value: coarse.sum,
        error_estimate: diff.max(floor),
        method: Method::Quadrature,
        diagnostics: Diagnostics {
            points_g: points.0,
            points_w: points.1,
            nodes_g: points.0.map(|_| spec.nodes_g),
            nodes_w: points.1.map(|_| spec.nodes_w),
            doubling_diff: Some(diff),
            roundoff_floor: Some(floor),
            ..Diagnostics::default()
        },
    }
}

fn require_quadrature_model(model: &FadingModel) -> Result<()> {
    if model.is_centered_gaussian() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "quadrature over the estimate law needs a zero-mean Gaussian estimate; use the Monte-Carlo method".into(),
        ))
    }
}

#[derive(Clone, Copy)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        let mean = self.mean + delta * o.n as f64 / n as f64;
        let m2 = self.m2 + o.m2 + delta * delta * (self.n as f64 * o.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }
}

/// Runs `samples` draws of `draw` in deterministic batches.
fn mc_run<F>(samples: usize, seed: u64, draw: F) -> Result<EstimateResult>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let batches = samples.div_ceil(MC_BATCH);
    let parts: Vec<Result<Moments>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = MC_BATCH.min(samples - b * MC_BATCH);
            let mut m = Moments { n: 0, mean: 0.0, m2: 0.0 };
            for _ in 0..count {
                let x = draw(&mut rng)?;
                m.n += 1;
                let d = x - m.mean;
                m.mean += d / m.n as f64;
                m.m2 += d * (x - m.mean);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments { n: 0, mean: 0.0, m2: 0.0 };
    for p in parts {
        total = total.merge(p?);
    }
    let var = if total.n > 1 { total.m2 / (total.n - 1) as f64 } else { 0.0 };
    let stderr = (var / total.n as f64).sqrt();
    Ok(EstimateResult {
        value: total.mean,
        error_estimate: stderr,
        method: Method::MonteCarlo,
        diagnostics: Diagnostics {
            samples: Some(total.n),
            stderr: Some(stderr),
            seed: Some(seed),
            rng: Some(RNG_NAME.to_string()),
            ..Diagnostics::default()
        },
    })
}

fn draw_w(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(Exp1)
}

/// `E[f(W)]` for `W ~ Exp(1)`.
pub fn expect_w<F>(f: F, spec: &ExpectationSpec) -> Result<EstimateResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    spec.validate()?;
    match spec.method {
        Method::Quadrature => {
            let coarse = single_sum(&f, &spec.rule_w.rule(spec.nodes_w), 1.0, true)?;
            let fine_rule = spec.rule_w.rule(2 * spec.nodes_w);
            let fine = single_sum(&f, &fine_rule, 1.0, true)?;
            let pts = spec.rule_w.rule(spec.nodes_w).len();
            Ok(quad_result(coarse, fine, spec, (None, Some(pts))))
        }
        Method::MonteCarlo => mc_run(spec.samples, spec.seed, |rng| {
            let w = draw_w(rng);
            check_finite(f(w), f64::NAN, w)
        }),
    }
}

/// `E[f(Ĥ)]` over the estimate law at SNR `ρ`.
///
/// On the quadrature path the estimate is passed with zero phase,
/// `ĥ = √g`, which is exact for circularly-symmetric integrands.
pub fn expect_estimate<F>(f: F, model: &FadingModel, rho: f64, spec: &ExpectationSpec) -> Result<EstimateResult>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    spec.validate()?;
    match spec.method {
        Method::Quadrature => {
            require_quadrature_model(model)?;
            let vhat = model.estimate_variance(rho)?;
            let h = |g: f64| f(Complex64::new(g.sqrt(), 0.0));
            let rule = spec.rule_g.rule(spec.nodes_g);
            let coarse = single_sum(&h, &rule, vhat, false)?;
            let fine = single_sum(&h, &spec.rule_g.rule(2 * spec.nodes_g), vhat, false)?;
            Ok(quad_result(coarse, fine, spec, (Some(rule.len()), None)))
        }
        Method::MonteCarlo => mc_run(spec.samples, spec.seed, |rng| {
            let hh = model.sample_estimate(rho, rng)?;
            check_finite(f(hh), hh.norm_sqr(), f64::NAN)
        }),
    }
}

/// `E[f(|Ĥ|²)]`.
pub fn expect_g<F>(f: F, model: &FadingModel, rho: f64, spec: &ExpectationSpec) -> Result<EstimateResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    expect_estimate(|h| f(h.norm_sqr()), model, rho, spec)
}

/// Value of `E[f(|Ĥ|²)]` at the configured node count only.
pub fn expect_g_value<F>(f: F, model: &FadingModel, rho: f64, spec: &ExpectationSpec) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    spec.validate()?;
    match spec.method {
        Method::Quadrature => {
            require_quadrature_model(model)?;
            let vhat = model.estimate_variance(rho)?;
            Ok(single_sum(&f, &spec.rule_g.rule(spec.nodes_g), vhat, false)?.sum)
        }
        Method::MonteCarlo => expect_g(f, model, rho, spec).map(|r| r.value),
    }
}

/// `E[f(|Ĥ|², W)]` with `W ~ Exp(1)` independent of `Ĥ`.
pub fn expect_gw<F>(f: F, model: &FadingModel, rho: f64, spec: &ExpectationSpec) -> Result<EstimateResult>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    spec.validate()?;
    match spec.method {
        Method::Quadrature => {
            require_quadrature_model(model)?;
            let vhat = model.estimate_variance(rho)?;
            let gr = spec.rule_g.rule(spec.nodes_g);
            let wr = spec.rule_w.rule(spec.nodes_w);
            let coarse = tensor_sum(&f, &gr, vhat, &wr)?;
            let fine = tensor_sum(&f, &spec.rule_g.rule(2 * spec.nodes_g), vhat, &spec.rule_w.rule(2 * spec.nodes_w))?;
            Ok(quad_result(coarse, fine, spec, (Some(gr.len()), Some(wr.len()))))
        }
        Method::MonteCarlo => mc_run(spec.samples, spec.seed, |rng| {
            let g = model.sample_estimate(rho, rng)?.norm_sqr();
            let w = draw_w(rng);
            check_finite(f(g, w), g, w)
        }),
    }
}

/// Value of `E[f(|Ĥ|², W)]` at the configured node count only (no error
/// estimate); used inside optimization loops.
pub fn expect_gw_value<F>(f: F, model: &FadingModel, rho: f64, spec: &ExpectationSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    spec.validate()?;
    match spec.method {
        Method::Quadrature => {
            require_quadrature_model(model)?;
            let vhat = model.estimate_variance(rho)?;
            Ok(tensor_sum(&f, &spec.rule_g.rule(spec.nodes_g), vhat, &spec.rule_w.rule(spec.nodes_w))?.sum)
        }
        Method::MonteCarlo => expect_gw(f, model, rho, spec).map(|r| r.value),
    }
}

/// `E[f(|H|²)]` for the true channel `H = Ĥ + H̃`.
///
/// Needs a Gaussian error law. Quadrature additionally needs a zero-mean
/// Gaussian estimate, so that `|H|²` is exponential with mean `V̂ + Ṽ`.
pub fn expect_channel_gain<F>(f: F, model: &FadingModel, rho: f64, spec: &ExpectationSpec) -> Result<EstimateResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    spec.validate()?;
    if !matches!(model.error_law, ErrorLaw::Gaussian) {
        return Err(Error::Unsupported(
            "the true-channel law is only available for a Gaussian estimation error".into(),
        ));
    }
    let vt = model.error_variance(rho)?;
    match spec.method {
        Method::Quadrature => {
            require_quadrature_model(model)?;
            let mean = model.estimate_variance(rho)? + vt;
            let rule = spec.rule_g.rule(spec.nodes_g);
            let coarse = single_sum(&f, &rule, mean, false)?;
            let fine = single_sum(&f, &spec.rule_g.rule(2 * spec.nodes_g), mean, false)?;
            Ok(quad_result(coarse, fine, spec, (Some(rule.len()), None)))
        }
        Method::MonteCarlo => mc_run(spec.samples, spec.seed, |rng| {
            let h = model.sample_estimate(rho, rng)? + complex_gaussian(vt, rng);
            let g = h.norm_sqr();
            check_finite(f(g), g, f64::NAN)
        }),
    }
}

/// Monte-Carlo evaluation of the `L`-layer rate with explicit Gaussian layer
/// symbols `X1, …, XL` and the true partial sums `|Σ_{i<ℓ} Xi|²`.
pub fn mc_full_layers(
    model: &FadingModel,
    ch: &ChannelPoint,
    layering: &Layering,
    samples: usize,
    seed: u64,
) -> Result<EstimateResult> {
    if samples < 1_000 {
        return Err(Error::InvalidSpec(format!("Monte-Carlo needs at least 1000 samples (got {samples})")));
    }
    let p = ch.power;
    if (layering.total() - p).abs() > 1e-12 * p {
        return Err(Error::InvalidLayering(format!(
            "layering total {} does not match the channel power {p}",
            layering.total()
        )));
    }
    let rho = ch.snr();
    let vt = model.error_variance(rho)?;
    let n0 = ch.n0;
    let powers = layering.powers();
    let cum = layering.cumulative().to_vec();
    mc_run(samples, seed, |rng| {
        let g = model.sample_estimate(rho, rng)?.norm_sqr();
        let mut partial = Complex64::new(0.0, 0.0);
        let mut total = 0.0;
        for (l, &pl) in powers.iter().enumerate() {
            let den = vt * partial.norm_sqr() + vt * pl + (g + vt) * (p - cum[l]) + n0;
            total += (g * pl / den).ln_1p();
            partial += complex_gaussian(pl, rng);
        }
        check_finite(total, g, f64::NAN)
    })
}
