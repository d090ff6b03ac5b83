//! Channel-estimate and estimation-error models.
//!
//! A [`FadingModel`] couples the law of the estimate `Ĥ ~ CN(μ, V̂)` with an
//! error-variance profile `Ṽ` and a description of the conditional error law
//! (needed for the entropy power `Φ̃`). For every built-in profile `Ṽ` depends
//! on the SNR `ρ` but not on the realization `ĥ`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quadrature::adaptive_gk15;

/// Absolute tolerance for the PSD integrals.
pub const PSD_TOLERANCE: f64 = 1e-9;

/// Power spectral density `λ ↦ f_H(λ)` on `[-1/2, 1/2]`.
pub type Psd = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Conditional differential entropy `h(H̃ | Ĥ = ĥ)` in nats at SNR `ρ`;
/// `-∞` when the conditional law is not absolutely continuous.
pub type EntropyFn = Arc<dyn Fn(Complex64, f64) -> f64 + Send + Sync>;

/// Draws one realization of `Ĥ`.
pub type EstimateSampler = Arc<dyn Fn(&mut dyn RngCore) -> Complex64 + Send + Sync>;

/// Variance of the estimate: fixed, or the complement `1 - |μ|² - Ṽ(ρ)` that
/// keeps `E|Ĥ|² + E[Ṽ] = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimateVariance {
    Fixed(f64),
    Complement,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEstimateLaw {
    pub mu: Complex64,
    pub variance: EstimateVariance,
}

impl GaussianEstimateLaw {
    pub fn centered(vhat: f64) -> Self {
        Self {
            mu: Complex64::new(0.0, 0.0),
            variance: EstimateVariance::Fixed(vhat),
        }
    }
}

/// Error-variance profile `Ṽ_ρ`.
#[derive(Clone)]
pub enum ErrorProfile {
    Constant { vtilde: f64 },
    /// MMSE prediction from the noisy past of a process with rectangular
    /// spectrum of bandwidth `b`.
    Prediction { b: f64 },
    /// MMSE interpolation from pilots every `t` symbols.
    Interpolation { b: f64, t: u32 },
    /// Arbitrary spectrum: prediction when `t` is `None`, interpolation
    /// otherwise. `band` is the spectral support edge, used as an integration
    /// breakpoint and to check `t ≤ 1/(2·band)`.
    GeneralPsd { psd: Psd, band: Option<f64>, t: Option<u32> },
}

impl fmt::Debug for ErrorProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorProfile::Constant { vtilde } => f.debug_struct("Constant").field("vtilde", vtilde).finish(),
            ErrorProfile::Prediction { b } => f.debug_struct("Prediction").field("b", b).finish(),
            ErrorProfile::Interpolation { b, t } => f.debug_struct("Interpolation").field("b", b).field("t", t).finish(),
            ErrorProfile::GeneralPsd { band, t, .. } => {
                f.debug_struct("GeneralPsd").field("band", band).field("t", t).finish_non_exhaustive()
            }
        }
    }
}

impl ErrorProfile {
    /// Interpolation profile with the largest pilot spacing `T = ⌊1/(2B)⌋`.
    pub fn interpolation(b: f64) -> Result<Self> {
        check_bandwidth(b)?;
        let t = (1.0 / (2.0 * b)).floor() as u32;
        Ok(ErrorProfile::Interpolation { b, t })
    }

    pub fn prediction(b: f64) -> Result<Self> {
        check_bandwidth(b)?;
        Ok(ErrorProfile::Prediction { b })
    }

    /// Whether `Ṽ` changes with the SNR.
    pub fn snr_dependent(&self) -> bool {
        !matches!(self, ErrorProfile::Constant { .. })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ErrorProfile::Constant { vtilde } => {
                if !(vtilde >= 0.0) || !vtilde.is_finite() {
                    return Err(Error::InvalidModel(format!("constant error variance {vtilde} must be >= 0")));
                }
            }
            ErrorProfile::Prediction { b } => check_bandwidth(b)?,
            ErrorProfile::Interpolation { b, t } => {
                check_bandwidth(b)?;
                check_pilot_spacing(b, t)?;
            }
            ErrorProfile::GeneralPsd { band, t, .. } => {
                if let Some(b) = band {
                    if !(b > 0.0 && b <= 0.5) {
                        return Err(Error::InvalidModel(format!("PSD band edge {b} must lie in (0, 1/2]")));
                    }
                    if let Some(t) = t {
                        check_pilot_spacing(b, t)?;
                    }
                }
                if t == Some(0) {
                    return Err(Error::InvalidModel("pilot spacing must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

fn check_bandwidth(b: f64) -> Result<()> {
    if b > 0.0 && b < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("bandwidth B = {b} must lie in (0, 1/2)")))
    }
}

fn check_pilot_spacing(b: f64, t: u32) -> Result<()> {
    if t == 0 {
        return Err(Error::InvalidModel("pilot spacing must be positive".into()));
    }
    // T·2B ≤ 1 up to rounding in B
    if f64::from(t) * 2.0 * b > 1.0 + 1e-12 {
        return Err(Error::InvalidModel(format!("pilot spacing T = {t} exceeds 1/(2B) = {}", 1.0 / (2.0 * b))));
    }
    Ok(())
}

/// Conditional law of `H̃` given `Ĥ`, as far as the entropy power is concerned.
#[derive(Clone)]
pub enum ErrorLaw {
    /// Conditionally Gaussian: `Φ̃ = Ṽ`.
    Gaussian,
    /// Known conditional differential entropy.
    Entropy(EntropyFn),
}

impl fmt::Debug for ErrorLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorLaw::Gaussian => f.write_str("Gaussian"),
            ErrorLaw::Entropy(_) => f.write_str("Entropy(..)"),
        }
    }
}

#[derive(Clone)]
pub struct FadingModel {
    pub estimate: GaussianEstimateLaw,
    pub error: ErrorProfile,
    pub error_law: ErrorLaw,
    /// Replaces the Gaussian estimate law on Monte-Carlo paths.
    pub sampler: Option<EstimateSampler>,
}

impl fmt::Debug for FadingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FadingModel")
            .field("estimate", &self.estimate)
            .field("error", &self.error)
            .field("error_law", &self.error_law)
            .field("sampler", &self.sampler.as_ref().map(|_| ".."))
            .finish()
    }
}

impl FadingModel {
    pub fn new(estimate: GaussianEstimateLaw, error: ErrorProfile, error_law: ErrorLaw) -> Result<Self> {
        let model = Self {
            estimate,
            error,
            error_law,
            sampler: None,
        };
        model.validate()?;
        Ok(model)
    }

    /// Zero-mean Gaussian estimate and Gaussian error, both SNR-independent.
    ///
    /// # Panics
    /// On negative or non-finite variances.
    pub fn constant(vhat: f64, vtilde: f64) -> Self {
        Self::new(
            GaussianEstimateLaw::centered(vhat),
            ErrorProfile::Constant { vtilde },
            ErrorLaw::Gaussian,
        )
        .expect("variances must be finite and nonnegative")
    }

    /// Zero-mean Gaussian estimate whose variance complements the error
    /// variance to one, with Gaussian error.
    pub fn normalized(error: ErrorProfile) -> Result<Self> {
        Self::new(
            GaussianEstimateLaw {
                mu: Complex64::new(0.0, 0.0),
                variance: EstimateVariance::Complement,
            },
            error,
            ErrorLaw::Gaussian,
        )
    }

    pub fn with_sampler(mut self, sampler: EstimateSampler) -> Self {
        self.sampler = Some(sampler);
        self
    }

    pub fn with_error_law(mut self, law: ErrorLaw) -> Self {
        self.error_law = law;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.error.validate()?;
        if !self.estimate.mu.re.is_finite() || !self.estimate.mu.im.is_finite() {
            return Err(Error::InvalidModel("estimate mean must be finite".into()));
        }
        if let EstimateVariance::Fixed(v) = self.estimate.variance {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidModel(format!("estimate variance {v} must be >= 0")));
            }
        }
        Ok(())
    }

    /// `Ṽ_ρ`.
    pub fn error_variance(&self, rho: f64) -> Result<f64> {
        error_variance(self, rho)
    }

    /// `V̂_ρ`.
    pub fn estimate_variance(&self, rho: f64) -> Result<f64> {
        match self.estimate.variance {
            EstimateVariance::Fixed(v) => Ok(v),
            EstimateVariance::Complement => {
                let v = 1.0 - self.estimate.mu.norm_sqr() - self.error_variance(rho)?;
                if v < -1e-12 {
                    return Err(Error::InvalidModel(format!(
                        "normalized estimate variance is negative ({v}) at rho = {rho}"
                    )));
                }
                Ok(v.max(0.0))
            }
        }
    }

    /// `E|Ĥ|² + E[Ṽ]` at SNR `ρ`.
    pub fn second_moment(&self, rho: f64) -> Result<f64> {
        Ok(self.estimate.mu.norm_sqr() + self.estimate_variance(rho)? + self.error_variance(rho)?)
    }

    /// Checks `E|Ĥ|² + E[Ṽ] = 1` at `ρ`.
    pub fn check_normalized(&self, rho: f64) -> Result<()> {
        let m = self.second_moment(rho)?;
        if (m - 1.0).abs() <= 1e-9 {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!("E|H|^2 = {m} at rho = {rho}, expected 1")))
        }
    }

    pub fn is_centered_gaussian(&self) -> bool {
        self.sampler.is_none() && self.estimate.mu.norm_sqr() == 0.0
    }

    pub fn entropy_power(&self, hhat: Complex64, rho: f64) -> Result<f64> {
        entropy_power(self, hhat, rho)
    }

    pub fn sample_estimate<R: RngCore>(&self, rho: f64, rng: &mut R) -> Result<Complex64> {
        sample_estimate(self, rho, rng)
    }
}

/// Error variance `Ṽ_ρ` of the model at SNR `ρ`.
pub fn error_variance(model: &FadingModel, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain {
            function: "error_variance",
            value: rho,
            expected: "rho > 0",
        });
    }
    let v = match model.error {
        ErrorProfile::Constant { vtilde } => vtilde,
        ErrorProfile::Prediction { b } => prediction_variance(b, rho),
        ErrorProfile::Interpolation { b, t } => {
            let bt2 = 2.0 * b * f64::from(t);
            bt2 / (rho + bt2)
        }
        ErrorProfile::GeneralPsd { ref psd, band, t } => match t {
            None => psd_prediction_variance_with(psd.as_ref(), rho, band)?,
            Some(t) => psd_interpolation_variance_with(psd.as_ref(), rho, t, band)?,
        },
    };
    if v < 0.0 || !v.is_finite() {
        return Err(Error::Domain {
            function: "error_variance",
            value: v,
            expected: "nonnegative variance",
        });
    }
    debug_assert!(!model.error.snr_dependent() || v <= 1.0 + 1e-9);
    Ok(v)
}

// ((1/(2B) + 1/ρ)^{2B} ρ^{2B-1} - 1/ρ written as ((1 + ρ/(2B))^{2B} - 1)/ρ
fn prediction_variance(b: f64, rho: f64) -> f64 {
    let two_b = 2.0 * b;
    (two_b * (rho / two_b).ln_1p()).exp_m1() / rho
}

/// `exp{∫ log(f_H(λ) + 1/ρ) dλ} - 1/ρ` over `λ ∈ [-1/2, 1/2]`.
pub fn psd_prediction_variance<F: Fn(f64) -> f64>(psd: F, rho: f64, band: Option<f64>) -> Result<f64> {
    psd_prediction_variance_with(&psd, rho, band)
}

fn psd_prediction_variance_with<F: Fn(f64) -> f64 + ?Sized>(psd: &F, rho: f64, band: Option<f64>) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain {
            function: "psd_prediction_variance",
            value: rho,
            expected: "rho > 0",
        });
    }
    let inv = 1.0 / rho;
    let breaks: Vec<f64> = band.map(|b| vec![-b, b]).unwrap_or_default();
    let integral = adaptive_gk15(|l| (psd(l).max(0.0) + inv).ln(), -0.5, 0.5, &breaks, PSD_TOLERANCE)?;
    // exp(I) - 1/ρ = (exp(I + ln ρ) - 1)/ρ
    let v = (integral + rho.ln()).exp_m1() / rho;
    Ok(v.max(0.0))
}

/// `1 - ∫ ρ f² / (ρ f + T) dλ` over the spectral support.
pub fn psd_interpolation_variance<F: Fn(f64) -> f64>(psd: F, rho: f64, t: u32, band: Option<f64>) -> Result<f64> {
    psd_interpolation_variance_with(&psd, rho, t, band)
}

fn psd_interpolation_variance_with<F: Fn(f64) -> f64 + ?Sized>(
    psd: &F,
    rho: f64,
    t: u32,
    band: Option<f64>,
) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain {
            function: "psd_interpolation_variance",
            value: rho,
            expected: "rho > 0",
        });
    }
    if t == 0 {
        return Err(Error::InvalidModel("pilot spacing must be positive".into()));
    }
    let tf = f64::from(t);
    let breaks: Vec<f64> = band.map(|b| vec![-b, b]).unwrap_or_default();
    // 1 - ∫ ρf²/(ρf+T) = ∫ f·T/(ρf+T) for a unit-mass PSD, which avoids
    // cancellation at high SNR
    let integral = adaptive_gk15(
        |l| {
            let f = psd(l).max(0.0);
            f * tf / (rho * f + tf)
        },
        -0.5,
        0.5,
        &breaks,
        PSD_TOLERANCE,
    )?;
    Ok(integral.max(0.0))
}

/// Rectangular unit-mass PSD of bandwidth `b`.
pub fn rectangular_psd(b: f64) -> impl Fn(f64) -> f64 + Send + Sync + Clone {
    move |l: f64| if l.abs() < b { 1.0 / (2.0 * b) } else { 0.0 }
}

/// Conditional entropy power `Φ̃(ĥ)` at SNR `ρ`.
pub fn entropy_power(model: &FadingModel, hhat: Complex64, rho: f64) -> Result<f64> {
    match &model.error_law {
        ErrorLaw::Gaussian => error_variance(model, rho),
        ErrorLaw::Entropy(h) => {
            let h = h(hhat, rho);
            Ok(entropy_power_from_entropy(h))
        }
    }
}

/// `(1/(πe))·e^h`, or 0 for `h = -∞`.
pub fn entropy_power_from_entropy(h: f64) -> f64 {
    if h == f64::NEG_INFINITY {
        0.0
    } else {
        (h - (std::f64::consts::PI * std::f64::consts::E).ln()).exp()
    }
}

/// Draws `Ĥ ~ CN(μ, V̂_ρ)`, or from the model's custom sampler.
pub fn sample_estimate<R: RngCore>(model: &FadingModel, rho: f64, rng: &mut R) -> Result<Complex64> {
    if let Some(s) = &model.sampler {
        return Ok(s(rng));
    }
    let v = model.estimate_variance(rho)?;
    Ok(model.estimate.mu + complex_gaussian(v, rng))
}

/// One draw of a circularly-symmetric complex Gaussian of variance `v`.
pub fn complex_gaussian<R: RngCore + ?Sized>(v: f64, rng: &mut R) -> Complex64 {
    if v == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let s = (0.5 * v).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn interp(b: f64) -> FadingModel {
        FadingModel::normalized(ErrorProfile::interpolation(b).unwrap()).unwrap()
    }

    fn pred(b: f64) -> FadingModel {
        FadingModel::normalized(ErrorProfile::prediction(b).unwrap()).unwrap()
    }

    #[test]
    fn interpolation_examples() {
        let m = interp(0.25);
        assert_relative_eq!(m.error_variance(10.0).unwrap(), 1.0 / 11.0, max_relative = 1e-15);
        assert!((m.error_variance(1e-12).unwrap() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn prediction_example() {
        // (2.1)^{1/2}·10^{-1/2} - 0.1 evaluated directly
        let direct = 2.1f64.sqrt() / 10f64.sqrt() - 0.1;
        let v = pred(0.25).error_variance(10.0).unwrap();
        assert_relative_eq!(v, direct, max_relative = 1e-14);
        assert_relative_eq!(v, 0.358_257_5, epsilon = 1e-7);
    }

    #[test]
    fn rectangular_psd_matches_closed_forms() {
        let psd = rectangular_psd(0.25);
        for rho in [0.1, 1.0, 10.0, 1e3, 1e6] {
            let p = psd_prediction_variance(&psd, rho, Some(0.25)).unwrap();
            let closed = pred(0.25).error_variance(rho).unwrap();
            assert!((p - closed).abs() < 1e-7, "rho={rho}: {p} vs {closed}");
            let i = psd_interpolation_variance(&psd, rho, 2, Some(0.25)).unwrap();
            let closed = interp(0.25).error_variance(rho).unwrap();
            assert!((i - closed).abs() < 1e-7, "rho={rho}: {i} vs {closed}");
        }
        let i = psd_interpolation_variance(&psd, 10.0, 2, Some(0.25)).unwrap();
        assert!((i - 1.0 / 11.0).abs() < 1e-7);
    }

    #[test]
    fn flat_psd_predicts_nothing() {
        for rho in [0.1, 1.0, 10.0, 100.0] {
            let v = psd_prediction_variance(|_| 1.0, rho, None).unwrap();
            assert!((v - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn psd_limits() {
        let psd = rectangular_psd(0.25);
        assert!(psd_prediction_variance(&psd, 1e10, Some(0.25)).unwrap() < 1e-4);
        assert!((psd_interpolation_variance(&psd, 1e-9, 2, Some(0.25)).unwrap() - 1.0).abs() < 1e-8);
        let v = psd_interpolation_variance(&psd, 1e8, 2, Some(0.25)).unwrap();
        assert_relative_eq!(v, 1.0 / 1e8, max_relative = 1e-6);
    }

    #[test]
    fn general_psd_profile_goes_through_model() {
        let model = FadingModel::normalized(ErrorProfile::GeneralPsd {
            psd: Arc::new(rectangular_psd(0.25)),
            band: Some(0.25),
            t: Some(2),
        })
        .unwrap();
        assert!((model.error_variance(10.0).unwrap() - 1.0 / 11.0).abs() < 1e-7);
        let bad = FadingModel::normalized(ErrorProfile::GeneralPsd {
            psd: Arc::new(rectangular_psd(0.25)),
            band: Some(0.25),
            t: Some(3),
        });
        assert!(bad.is_err());
    }

    #[test]
    fn snr_dependent_profiles_decrease() {
        let mut rho = 0.1;
        let models = [pred(0.25), interp(0.25), pred(0.1), interp(0.1)];
        let mut prev: Vec<f64> = models.iter().map(|m| m.error_variance(rho).unwrap()).collect();
        while rho < 1e6 {
            rho *= 1.5;
            for (m, p) in models.iter().zip(prev.iter_mut()) {
                let v = m.error_variance(rho).unwrap();
                assert!(v < *p, "not decreasing at rho={rho}");
                assert!((0.0..=1.0).contains(&v));
                *p = v;
            }
        }
        for m in &models {
            assert!(m.error_variance(1e8).unwrap() < 1e-3);
        }
    }

    #[test]
    fn profile_validation() {
        assert!(ErrorProfile::prediction(0.5).is_err());
        assert!(ErrorProfile::prediction(0.0).is_err());
        assert!(ErrorProfile::interpolation(0.7).is_err());
        assert!(FadingModel::new(
            GaussianEstimateLaw::centered(0.5),
            ErrorProfile::Interpolation { b: 0.25, t: 3 },
            ErrorLaw::Gaussian
        )
        .is_err());
        assert!(FadingModel::new(
            GaussianEstimateLaw::centered(0.5),
            ErrorProfile::Constant { vtilde: -0.1 },
            ErrorLaw::Gaussian
        )
        .is_err());
        assert_eq!(ErrorProfile::interpolation(0.25).unwrap().snr_dependent(), true);
        match ErrorProfile::interpolation(0.15).unwrap() {
            ErrorProfile::Interpolation { t, .. } => assert_eq!(t, 3),
            _ => unreachable!(),
        }
    }

    #[test]
    fn error_variance_rejects_nonpositive_snr() {
        let m = FadingModel::constant(0.5, 0.5);
        assert!(m.error_variance(0.0).is_err());
        assert!(m.error_variance(-1.0).is_err());
    }

    #[test]
    fn normalization() {
        let m = interp(0.25);
        for rho in [0.01, 1.0, 1e4] {
            m.check_normalized(rho).unwrap();
        }
        FadingModel::constant(0.5, 0.5).check_normalized(3.0).unwrap();
        assert!(FadingModel::constant(1.0, 0.5).check_normalized(3.0).is_err());
    }

    #[test]
    fn entropy_power_cases() {
        let h0 = Complex64::new(0.3, 0.0);
        assert_eq!(FadingModel::constant(0.5, 0.5).entropy_power(h0, 1.0).unwrap(), 0.5);
        let singular = FadingModel::constant(0.5, 0.5).with_error_law(ErrorLaw::Entropy(Arc::new(|_, _| f64::NEG_INFINITY)));
        assert_eq!(singular.entropy_power(h0, 1.0).unwrap(), 0.0);
        let v = 0.37;
        let pe = std::f64::consts::PI * std::f64::consts::E;
        let given = FadingModel::constant(0.5, v).with_error_law(ErrorLaw::Entropy(Arc::new(move |_, _| (pe * v).ln())));
        assert_relative_eq!(given.entropy_power(h0, 1.0).unwrap(), v, max_relative = 1e-14);
    }

    #[test]
    fn sampling_moments_and_determinism() {
        let m = FadingModel::constant(0.5, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let g = m.sample_estimate(1.0, &mut rng).unwrap().norm_sqr();
            s += g;
            s2 += g * g;
        }
        let mean = s / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 0.5).abs() < 4.0 * se);

        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..16).map(|_| m.sample_estimate(1.0, &mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
        assert_ne!(draw(11), draw(12));

        let degenerate = FadingModel::new(
            GaussianEstimateLaw {
                mu: Complex64::new(1.0, 0.0),
                variance: EstimateVariance::Fixed(0.0),
            },
            ErrorProfile::Constant { vtilde: 0.0 },
            ErrorLaw::Gaussian,
        )
        .unwrap();
        for _ in 0..10 {
            assert_eq!(degenerate.sample_estimate(1.0, &mut rng).unwrap(), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn custom_sampler_is_used() {
        let m = FadingModel::constant(0.5, 0.5).with_sampler(Arc::new(|_| Complex64::new(2.0, 0.0)));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(m.sample_estimate(1.0, &mut rng).unwrap(), Complex64::new(2.0, 0.0));
        assert!(!m.is_centered_gaussian());
    }
}
