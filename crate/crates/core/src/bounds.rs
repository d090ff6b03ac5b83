//! Lower and upper bounds on the Gaussian-input mutual information.
//!
//! Every layer symbol is Gaussian, so the interference power `|Σ_{i<ℓ} Xi|²`
//! seen by layer `ℓ` is `Q_{ℓ-1}·W` with `W ~ Exp(1)`. The layered bounds
//! take the `W`-expectation of each layer term in closed form through
//! [`expected_log_affine`], leaving a one-dimensional quadrature over
//! `G = |Ĥ|²`. The supremum has no such reduction and uses the tensor rule.

use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{
    expect_channel_gain, expect_estimate, expect_g, expect_g_value, expect_gw, EstimateResult, ExpectationSpec,
    Method,
};
use crate::fading::FadingModel;
use crate::layering::Layering;
use crate::special::{expected_log_affine, theta_parts};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelPoint {
    pub power: f64,
    pub n0: f64,
}

impl ChannelPoint {
    pub fn new(power: f64, n0: f64) -> Result<Self> {
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::InvalidChannel(format!("power must be positive and finite (got {power})")));
        }
        if !(n0 > 0.0) || !n0.is_finite() {
            return Err(Error::InvalidChannel(format!("noise variance must be positive and finite (got {n0})")));
        }
        Ok(Self { power, n0 })
    }

    /// Unit noise variance at SNR `rho`.
    pub fn from_snr(rho: f64) -> Result<Self> {
        Self::new(rho, 1.0)
    }

    pub fn snr(&self) -> f64 {
        self.power / self.n0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    RM,
    RTwoLayer,
    RLayered,
    RStarL,
    RStarInf,
    CCoh,
    IUpper,
}

impl BoundKind {
    pub fn is_lower(self) -> bool {
        !matches!(self, BoundKind::CCoh | BoundKind::IUpper)
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::RM => "r_m",
            BoundKind::RTwoLayer => "r_two_layer",
            BoundKind::RLayered => "r_layered",
            BoundKind::RStarL => "r_star_l",
            BoundKind::RStarInf => "r_star_inf",
            BoundKind::CCoh => "c_coh",
            BoundKind::IUpper => "i_upper",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub kind: BoundKind,
    pub rate_nats: f64,
    pub estimate: EstimateResult,
    /// Set when the bound is `+∞`.
    pub unbounded: bool,
}

impl BoundValue {
    fn from_estimate(kind: BoundKind, estimate: EstimateResult) -> Self {
        Self {
            kind,
            rate_nats: estimate.value,
            unbounded: estimate.value == f64::INFINITY,
            estimate,
        }
    }

    pub fn error_estimate(&self) -> f64 {
        self.estimate.error_estimate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLayerRates {
    pub p1: f64,
    pub r1: EstimateResult,
    pub r2: EstimateResult,
    pub total: BoundValue,
}

/// Médard's bound `E[log(1 + |Ĥ|²P/(ṼP + N0))]`.
pub fn medard_bound(model: &FadingModel, ch: &ChannelPoint, spec: &ExpectationSpec) -> Result<BoundValue> {
    let rho = ch.snr();
    let vt = model.error_variance(rho)?;
    let a = ch.power / (vt * ch.power + ch.n0);
    let est = expect_g(|g| (a * g).ln_1p(), model, rho, spec)?;
    Ok(BoundValue::from_estimate(BoundKind::RM, est))
}

/// Coherent capacity `E[log(1 + |H|²P/N0)]`.
pub fn coherent_capacity(model: &FadingModel, ch: &ChannelPoint, spec: &ExpectationSpec) -> Result<BoundValue> {
    let rho = ch.snr();
    let est = expect_channel_gain(|g| (rho * g).ln_1p(), model, rho, spec)?;
    Ok(BoundValue::from_estimate(BoundKind::CCoh, est))
}

struct LayerTerms {
    p: f64,
    n0: f64,
    vt: f64,
    cum: Vec<f64>,
}

impl LayerTerms {
    fn new(model: &FadingModel, ch: &ChannelPoint, q: &Layering) -> Result<Self> {
        let p = ch.power;
        if (q.total() - p).abs() > 1e-12 * p {
            return Err(Error::InvalidLayering(format!(
                "layering total {} does not match the channel power {p}",
                q.total()
            )));
        }
        Ok(Self {
            p,
            n0: ch.n0,
            vt: model.error_variance(ch.snr())?,
            cum: q.cumulative().to_vec(),
        })
    }

    /// `E_W[log(1 + Γℓ)]` for layer index `l` (zero-based) at gain `g`.
    fn layer(&self, l: usize, g: f64) -> f64 {
        let (p, vt) = (self.p, self.vt);
        let prev = if l == 0 { 0.0 } else { self.cum[l - 1] };
        let cur = self.cum[l];
        let pl = cur - prev;
        // denominator without the W term: c + g·(P - Qℓ)
        let c = vt * (p - prev) + self.n0;
        let lo = c + g * (p - cur);
        let a = vt * prev;
        if a == 0.0 {
            return (g * pl / lo).ln_1p();
        }
        let hi = lo + g * pl;
        match (expected_log_affine(a, hi), expected_log_affine(a, lo)) {
            (Ok(x), Ok(y)) => x - y,
            _ => f64::NAN,
        }
    }

    fn total(&self, g: f64) -> f64 {
        (0..self.cum.len()).map(|l| self.layer(l, g)).sum()
    }

    /// Joint-sample integrand `Σℓ log(1 + Γℓ)` with one `W` per call.
    fn sampled(&self, g: f64, w: f64) -> f64 {
        let mut prev = 0.0;
        let mut s = 0.0;
        for &cur in &self.cum {
            let pl = cur - prev;
            let den = self.vt * prev * w + self.vt * pl + (g + self.vt) * (self.p - cur) + self.n0;
            s += (g * pl / den).ln_1p();
            prev = cur;
        }
        s
    }
}

fn layered_estimate(terms: &LayerTerms, model: &FadingModel, rho: f64, spec: &ExpectationSpec) -> Result<EstimateResult> {
    match spec.method {
        Method::Quadrature => expect_g(|g| terms.total(g), model, rho, spec),
        Method::MonteCarlo => expect_gw(|g, w| terms.sampled(g, w), model, rho, spec),
    }
}

/// `R[Q] = Σℓ E[log(1 + Γℓ)]`.
pub fn layered_bound(model: &FadingModel, ch: &ChannelPoint, q: &Layering, spec: &ExpectationSpec) -> Result<BoundValue> {
    let terms = LayerTerms::new(model, ch, q)?;
    let est = layered_estimate(&terms, model, ch.snr(), spec)?;
    Ok(BoundValue::from_estimate(BoundKind::RLayered, est))
}

/// `R[Q]` at the configured node count only, for search loops.
pub fn layered_bound_value(model: &FadingModel, ch: &ChannelPoint, q: &Layering, spec: &ExpectationSpec) -> Result<f64> {
    let terms = LayerTerms::new(model, ch, q)?;
    match spec.method {
        Method::Quadrature => expect_g_value(|g| terms.total(g), model, ch.snr(), spec),
        Method::MonteCarlo => layered_estimate(&terms, model, ch.snr(), spec).map(|e| e.value),
    }
}

fn two_layer_layering(ch: &ChannelPoint, p1: f64) -> Result<Layering> {
    if !(p1 > 0.0 && p1 < ch.power) {
        return Err(Error::InvalidLayering(format!(
            "first-layer power {p1} must lie strictly between 0 and {}",
            ch.power
        )));
    }
    Layering::new(vec![p1, ch.power])
}

/// Two-layer bound with first-layer power `p1 ∈ (0, P)`.
pub fn two_layer_bound(model: &FadingModel, ch: &ChannelPoint, p1: f64, spec: &ExpectationSpec) -> Result<TwoLayerRates> {
    let q = two_layer_layering(ch, p1)?;
    let terms = LayerTerms::new(model, ch, &q)?;
    let rho = ch.snr();
    let r1 = expect_g(|g| terms.layer(0, g), model, rho, spec)?;
    let r2 = match spec.method {
        Method::Quadrature => expect_g(|g| terms.layer(1, g), model, rho, spec)?,
        Method::MonteCarlo => {
            let (vt, n0, p2) = (terms.vt, terms.n0, ch.power - p1);
            expect_gw(|g, w| (g * p2 / (vt * (p1 * w + p2) + n0)).ln_1p(), model, rho, spec)?
        }
    };
    let total = BoundValue::from_estimate(BoundKind::RTwoLayer, r1.plus(&r2));
    Ok(TwoLayerRates { p1, r1, r2, total })
}

/// Second-layer rate with the interference power replaced by its mean,
/// `E[log(1 + |Ĥ|²P2/(ṼP + N0))]`. Jensen puts it below the exact `R2`.
pub fn two_layer_jensen_r2(model: &FadingModel, ch: &ChannelPoint, p1: f64, spec: &ExpectationSpec) -> Result<EstimateResult> {
    two_layer_layering(ch, p1)?;
    let rho = ch.snr();
    let vt = model.error_variance(rho)?;
    let a = (ch.power - p1) / (vt * ch.power + ch.n0);
    expect_g(|g| (a * g).ln_1p(), model, rho, spec)
}

/// Supremum over all layerings, `E[(G/b)·Θ((Ṽ(W−1) − G)/b)]` with
/// `b = G + Ṽ + N0/P`.
pub fn rate_splitting_supremum(model: &FadingModel, ch: &ChannelPoint, spec: &ExpectationSpec) -> Result<BoundValue> {
    let rho = ch.snr();
    let vt = model.error_variance(rho)?;
    let inv = 1.0 / rho;
    let violated = AtomicBool::new(false);
    let f = |g: f64, w: f64| {
        let b = g + vt + inv;
        let one_plus_x = (vt * w + inv) / b;
        if !(one_plus_x > 1e-300) {
            violated.store(true, Ordering::Relaxed);
            return 0.0;
        }
        let x = (vt * (w - 1.0) - g) / b;
        g / b * theta_parts(x, one_plus_x)
    };
    let est = expect_gw(f, model, rho, spec)?;
    if violated.load(Ordering::Relaxed) {
        return Err(Error::Internal(format!(
            "supremum integrand left the domain x > -1 (vtilde = {vt}, rho = {rho})"
        )));
    }
    Ok(BoundValue::from_estimate(BoundKind::RStarInf, est))
}

/// `R_M + E[log((ṼP + N0)/(Φ̃PW + N0))]`.
pub fn upper_bound_iupper(model: &FadingModel, ch: &ChannelPoint, spec: &ExpectationSpec) -> Result<BoundValue> {
    let rm = medard_bound(model, ch, spec)?;
    let correction = iupper_correction(model, ch, spec)?;
    let mut est = rm.estimate.plus(&correction);
    est.method = spec.method;
    Ok(BoundValue::from_estimate(BoundKind::IUpper, est))
}

/// The `I_upper − R_M` term alone.
pub fn iupper_correction(model: &FadingModel, ch: &ChannelPoint, spec: &ExpectationSpec) -> Result<EstimateResult> {
    let rho = ch.snr();
    let (p, n0) = (ch.power, ch.n0);
    let top = (model.error_variance(rho)? * p + n0).ln();
    let failure = std::sync::Mutex::new(None);
    let f = |h: num_complex::Complex64| match model.entropy_power(h, rho) {
        Ok(phi) if phi >= 0.0 && phi.is_finite() => match expected_log_affine(phi * p, n0) {
            Ok(v) => top - v,
            Err(e) => {
                *failure.lock().unwrap() = Some(e);
                0.0
            }
        },
        Ok(phi) => {
            *failure.lock().unwrap() = Some(Error::InvalidModel(format!("entropy power {phi} is not a finite nonnegative number")));
            0.0
        }
        Err(e) => {
            *failure.lock().unwrap() = Some(e);
            0.0
        }
    };
    let est = expect_estimate(f, model, rho, spec)?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub rho: f64,
    /// `I_upper − R*`.
    pub gap_rstar: f64,
    /// `I_upper − R_M`.
    pub gap_medard: f64,
    /// `E[log((ṼP+N0)/(Φ̃PW+N0))]`.
    pub correction: f64,
}

/// Upper/lower gaps over an SNR grid (unit noise variance).
pub fn asymptotic_gap_diag(model: &FadingModel, rho_grid: &[f64], spec: &ExpectationSpec) -> Result<Vec<GapRow>> {
    rho_grid
        .iter()
        .map(|&rho| {
            let ch = ChannelPoint::from_snr(rho)?;
            let rm = medard_bound(model, &ch, spec)?.rate_nats;
            let corr = iupper_correction(model, &ch, spec)?.value;
            let rs = rate_splitting_supremum(model, &ch, spec)?.rate_nats;
            let iu = rm + corr;
            Ok(GapRow {
                rho,
                gap_rstar: iu - rs,
                gap_medard: iu - rm,
                correction: corr,
            })
        })
        .collect()
}

/// Slope `d rate / d ln ρ` at the top of a curve sampled on a geometric
/// SNR grid, from a second-order backward difference.
pub fn prelog_diag(curve: &[(f64, f64)]) -> Result<f64> {
    if curve.len() < 3 {
        return Err(Error::InvalidSpec(format!(
            "slope needs at least 3 points (got {})",
            curve.len()
        )));
    }
    let logs: Vec<f64> = curve
        .iter()
        .map(|&(rho, _)| {
            if rho > 0.0 && rho.is_finite() {
                Ok(rho.ln())
            } else {
                Err(Error::InvalidSpec(format!("SNR {rho} must be positive")))
            }
        })
        .collect::<Result<_>>()?;
    let h = logs[1] - logs[0];
    if !(h > 0.0) {
        return Err(Error::InvalidSpec("SNR grid must be increasing".into()));
    }
    for pair in logs.windows(2) {
        if ((pair[1] - pair[0]) - h).abs() > 1e-6 * h.abs().max(1.0) {
            return Err(Error::InvalidSpec("SNR grid is not geometric".into()));
        }
    }
    let n = curve.len();
    let (r0, r1, r2) = (curve[n - 3].1, curve[n - 2].1, curve[n - 1].1);
    Ok((3.0 * r2 - 4.0 * r1 + r0) / (2.0 * h))
}
