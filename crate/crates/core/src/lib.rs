//! Gaussian-input rate bounds for memoryless fading channels with imperfect
//! receiver channel-state information.
//!
//! The channel is `Y = (Ĥ + H̃)·X + Z`, where the receiver knows the estimate
//! `Ĥ` and the estimation error `H̃` has conditional variance `Ṽ(ĥ)`. The
//! crate evaluates:
//!
//! | Bound | Function |
//! |-------|----------|
//! | Médard's lower bound `R_M` | [`bounds::medard_bound`] |
//! | two-layer rate splitting `R1 + R2` | [`bounds::two_layer_bound`] |
//! | `L`-layer rate splitting `R[Q]` | [`bounds::layered_bound`] |
//! | optimized `L`-layer bound `R*(P,L)` | [`optimize::optimize_layers`] |
//! | infinite-layer supremum `R*(P)` | [`bounds::rate_splitting_supremum`] |
//! | coherent capacity `C_coh` | [`bounds::coherent_capacity`] |
//! | entropy-power upper bound `I_upper` | [`bounds::upper_bound_iupper`] |
//!
//! All rates are in nats; [`Units`] converts for presentation.
//!
//! ```
//! use ratesplit::{bounds, ChannelPoint, ExpectationSpec, FadingModel};
//!
//! let model = FadingModel::constant(0.5, 0.5);
//! let ch = ChannelPoint::new(10.0, 1.0).unwrap();
//! let spec = ExpectationSpec::default();
//! let rm = bounds::medard_bound(&model, &ch, &spec).unwrap();
//! let rs = bounds::rate_splitting_supremum(&model, &ch, &spec).unwrap();
//! assert!(rs.rate_nats > rm.rate_nats);
//! ```

pub mod bounds;
pub mod error;
pub mod estimator;
pub mod fading;
pub mod layering;
pub mod optimize;
pub mod quadrature;
pub mod special;

pub use bounds::{BoundKind, BoundValue, ChannelPoint, TwoLayerRates};
pub use error::{Error, Result};
pub use estimator::{AxisRule, EstimateResult, ExpectationSpec, Method};
pub use fading::{ErrorLaw, ErrorProfile, FadingModel, GaussianEstimateLaw};
pub use layering::{Layering, LayeringSpec};
pub use optimize::{OptimizedLayering, OptimizerConfig};

use serde::{Deserialize, Serialize};

/// Presentation units for rates. Everything is computed in nats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

impl std::str::FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nats" => Ok(Units::Nats),
            "bits" => Ok(Units::Bits),
            other => Err(Error::Parse(format!("unknown units '{other}' (expected bits|nats)"))),
        }
    }
}

/// Converts an SNR in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear SNR to dB.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
