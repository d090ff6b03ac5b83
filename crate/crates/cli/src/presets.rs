//! Frozen figure configurations.

use rayon::prelude::*;
use ratesplit::bounds::{medard_bound, two_layer_bound};
use ratesplit::ChannelPoint;

use crate::config::{parse_snr_grid, Kind, ModelKind, ModelSpec, Overrides, Settings};
use crate::output::{fraction_csv, metadata, sweep_csv, FractionRow, Normalize};
use crate::run::{in_pool, sweep};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig6,
}

/// Power and noise of the two-layer power-fraction figure.
pub const FIG1_POWER: f64 = 10.0;

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig4a => "fig4a",
            Preset::Fig4b => "fig4b",
            Preset::Fig6 => "fig6",
        }
    }

    pub fn model(self) -> ModelSpec {
        let base = ModelSpec::default();
        match self {
            Preset::Fig1 | Preset::Fig2 => base,
            Preset::Fig3a | Preset::Fig3b => ModelSpec {
                kind: ModelKind::Prediction,
                b: 0.25,
                ..base
            },
            Preset::Fig4a | Preset::Fig4b | Preset::Fig6 => ModelSpec {
                kind: ModelKind::Interpolation,
                b: 0.25,
                ..base
            },
        }
    }

    /// SNR grid in dB (unused by fig1).
    pub fn grid(self) -> &'static str {
        match self {
            Preset::Fig1 => "10",
            Preset::Fig2 => "-10:30:1",
            _ => "-10:40:1",
        }
    }

    /// What the renderer puts on the x axis.
    pub fn x_axis(self) -> &'static str {
        match self {
            Preset::Fig1 => "p1_fraction",
            Preset::Fig3b | Preset::Fig4b => "eb_n0_db_rstar",
            _ => "snr_db",
        }
    }
}

fn reject_frozen(flags: &Overrides) -> Result<(), CliError> {
    let frozen = [
        ("--model", flags.model.is_some()),
        ("--vtilde", flags.vtilde.is_some()),
        ("--vhat", flags.vhat.is_some()),
        ("--mu-re", flags.mu_re.is_some()),
        ("--mu-im", flags.mu_im.is_some()),
        ("--B", flags.b.is_some()),
        ("--snr-db", flags.snr_db.is_some()),
        ("--power", flags.power.is_some()),
        ("--n0", flags.n0.is_some()),
        ("--kinds", flags.kinds.is_some()),
        ("--layers", flags.layers.is_some()),
        ("--layering", flags.layering.is_some()),
        ("--config", flags.config.is_some()),
    ];
    match frozen.iter().find(|(_, given)| *given) {
        Some((flag, _)) => Err(CliError::Usage(format!("{flag} cannot be combined with a figure preset"))),
        None => Ok(()),
    }
}

/// Produces the preset's CSV and its failed-cell count.
pub fn run_figure(preset: Preset, flags: &Overrides) -> Result<(String, usize, Settings), CliError> {
    reject_frozen(flags)?;
    let settings = Settings::resolve(preset.model(), flags)?;
    let model = settings.model.build()?;
    let mut meta = metadata(&settings, &format!("figure {}", preset.name()));
    meta.push(("preset".into(), preset.name().into()));
    meta.push(("x_axis".into(), preset.x_axis().into()));
    if preset == Preset::Fig1 {
        let ch = ChannelPoint::new(FIG1_POWER, 1.0)?;
        let spec = settings.spec.clone();
        let rm = medard_bound(&model, &ch, &spec).map(|b| b.rate_nats).unwrap_or(f64::NAN);
        let rows: Vec<FractionRow> = in_pool(settings.jobs, || {
            (1..=99)
                .into_par_iter()
                .map(|i| {
                    let fraction = i as f64 / 100.0;
                    match two_layer_bound(&model, &ch, fraction * FIG1_POWER, &spec) {
                        Ok(t) => FractionRow {
                            fraction,
                            total: t.total.rate_nats,
                            r1: t.r1.value,
                            r2: t.r2.value,
                            r_m: rm,
                        },
                        Err(_) => FractionRow {
                            fraction,
                            total: f64::NAN,
                            r1: f64::NAN,
                            r2: f64::NAN,
                            r_m: rm,
                        },
                    }
                })
                .collect()
        })?;
        meta.push(("power".into(), FIG1_POWER.to_string()));
        let (text, failed) = fraction_csv(&rows, &settings, meta);
        return Ok((text, failed, settings));
    }
    let grid = parse_snr_grid(preset.grid())?;
    let points = sweep(&model, &grid, &Kind::SWEEP, &settings)?;
    let normalize = if preset == Preset::Fig6 {
        Normalize::ByMedard
    } else {
        Normalize::None
    };
    let (text, failed) = sweep_csv(&points, &settings, normalize, meta);
    Ok((text, failed, settings))
}
