use rayon::prelude::*;
use ratesplit::bounds::{
    coherent_capacity, layered_bound, medard_bound, rate_splitting_supremum, upper_bound_iupper, BoundValue,
};
use ratesplit::optimize::optimize_layers;
use ratesplit::{db_to_linear, ChannelPoint, FadingModel, OptimizerConfig};
use serde::Serialize;

use crate::config::{Kind, Settings};
use crate::CliError;

/// One bound at one SNR, in nats before unit conversion.
#[derive(Debug, Clone, Serialize)]
pub struct Evaluated {
    pub kind: Kind,
    pub outcome: Result<BoundValue, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Point {
    pub snr_db: f64,
    pub power: f64,
    pub n0: f64,
    pub bounds: Vec<Evaluated>,
}

impl Point {
    pub fn get(&self, kind: Kind) -> Option<&Result<BoundValue, String>> {
        self.bounds.iter().find(|e| e.kind == kind).map(|e| &e.outcome)
    }

    pub fn failures(&self) -> impl Iterator<Item = (Kind, &str)> {
        self.bounds.iter().filter_map(|e| e.outcome.as_ref().err().map(|m| (e.kind, m.as_str())))
    }
}

/// Checks that every requested kind can be computed with these settings.
pub fn check_kinds(kinds: &[Kind], settings: &Settings) -> Result<(), CliError> {
    if kinds.is_empty() {
        return Err(CliError::Usage("no bound kinds requested".into()));
    }
    if kinds.contains(&Kind::RLayered) && settings.layering.is_none() {
        return Err(CliError::Usage("r_layered needs --layering".into()));
    }
    if kinds.contains(&Kind::RStarL) && settings.layers.is_none() {
        return Err(CliError::Usage("r_star_l needs --layers".into()));
    }
    Ok(())
}

fn one(kind: Kind, model: &FadingModel, ch: &ChannelPoint, settings: &Settings) -> Result<BoundValue, String> {
    let spec = &settings.spec;
    let r = match kind {
        Kind::RM => medard_bound(model, ch, spec),
        Kind::RStar2 => optimize_layers(model, ch, 2, spec, &OptimizerConfig::default()).map(|o| o.bound),
        Kind::RStarL => {
            let l = settings.layers.expect("checked by check_kinds");
            optimize_layers(model, ch, l, spec, &OptimizerConfig::default()).map(|o| o.bound)
        }
        Kind::RLayered => {
            let q = settings.layering.as_ref().expect("checked by check_kinds");
            q.resolve(ch.power).and_then(|q| layered_bound(model, ch, &q, spec))
        }
        Kind::RStarInf => rate_splitting_supremum(model, ch, spec),
        Kind::IUpper => upper_bound_iupper(model, ch, spec),
        Kind::CCoh => coherent_capacity(model, ch, spec),
    };
    r.map_err(|e| e.to_string())
}

pub fn evaluate_point(model: &FadingModel, ch: &ChannelPoint, kinds: &[Kind], settings: &Settings) -> Point {
    let bounds = kinds
        .iter()
        .map(|&kind| Evaluated {
            kind,
            outcome: one(kind, model, ch, settings),
        })
        .collect();
    Point {
        snr_db: ratesplit::linear_to_db(ch.snr()),
        power: ch.power,
        n0: ch.n0,
        bounds,
    }
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j);
    }
    b.build().map_err(|e| CliError::Usage(format!("cannot start {jobs:?} workers: {e}")))
}

/// Evaluates every grid point (dB) concurrently; output follows grid order.
pub fn sweep(model: &FadingModel, grid_db: &[f64], kinds: &[Kind], settings: &Settings) -> Result<Vec<Point>, CliError> {
    let n0 = settings.n0;
    let points = pool(settings.jobs)?.install(|| {
        grid_db
            .par_iter()
            .map(|&db| {
                let ch = ChannelPoint::new(db_to_linear(db) * n0, n0)?;
                let mut p = evaluate_point(model, &ch, kinds, settings);
                p.snr_db = db;
                Ok(p)
            })
            .collect::<Result<Vec<_>, ratesplit::Error>>()
    })?;
    Ok(points)
}

/// Runs `f` on the configured worker pool.
pub fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    Ok(pool(jobs)?.install(f))
}
