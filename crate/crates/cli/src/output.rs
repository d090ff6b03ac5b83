//! CSV and JSON emission.

use ratesplit::estimator::{Method, RNG_NAME};
use serde_json::{json, Map, Value};

use crate::config::{Kind, Settings};
use crate::run::Point;

pub const SWEEP_HEADER: [&str; 9] = [
    "snr_db",
    "rate_units",
    "r_m",
    "r_star2",
    "r_star_inf",
    "i_upper",
    "c_coh",
    "eb_n0_db_rstar",
    "seed",
];

pub const FIG1_HEADER: [&str; 7] = ["p1_fraction", "rate_units", "r_two_layer", "r_1", "r_2", "r_m", "seed"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalize {
    None,
    /// Every rate column divided by `R_M` at the same SNR.
    ByMedard,
}

/// Key/value lines appended after the rows as `# key=value`.
pub fn metadata(settings: &Settings, command: &str) -> Vec<(String, String)> {
    let s = &settings.spec;
    let mut m = vec![
        ("generator".to_string(), format!("rsb {}", env!("CARGO_PKG_VERSION"))),
        ("command".to_string(), command.to_string()),
        ("model".to_string(), settings.model.describe()),
        ("n0".to_string(), settings.n0.to_string()),
    ];
    match s.method {
        Method::Quadrature => m.push((
            "estimator".into(),
            format!(
                "quadrature rule={:?} nodes={}x{} target_rel_tol={:e}",
                s.rule_g, s.nodes_g, s.nodes_w, s.target_rel_tol
            )
            .to_lowercase(),
        )),
        Method::MonteCarlo => {
            m.push(("estimator".into(), format!("monte-carlo samples={}", s.samples)));
            m.push(("rng".into(), RNG_NAME.to_string()));
        }
    }
    m.push(("seed".into(), s.seed.to_string()));
    m.push(("units".into(), settings.units.name().to_string()));
    let pilot = if settings.pilot_loss {
        format!("on factor={}", settings.rate_factor())
    } else {
        "off".into()
    };
    m.push(("pilot_loss".into(), pilot));
    m
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}

fn push_meta(out: &mut String, meta: &[(String, String)]) {
    for (k, v) in meta {
        out.push_str(&format!("# {k}={v}\n"));
    }
}

fn write_rows(header: &[&str], rows: &[Vec<String>], meta: &[(String, String)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    let mut out = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output");
    push_meta(&mut out, meta);
    out
}

/// Sweep CSV. Returns the text and the number of failed cells.
pub fn sweep_csv(points: &[Point], settings: &Settings, normalize: Normalize, mut meta: Vec<(String, String)>) -> (String, usize) {
    let units = settings.units;
    let factor = settings.rate_factor();
    let mut failed = 0;
    let mut rows = Vec::with_capacity(points.len());
    for p in points {
        let rm = p.get(Kind::RM).map(|r| r.as_ref().map(|b| b.rate_nats).unwrap_or(f64::NAN));
        let cell = |kind: Kind| -> Option<f64> {
            let r = p.get(kind)?;
            let nats = r.as_ref().map(|b| b.rate_nats).unwrap_or(f64::NAN);
            Some(match normalize {
                Normalize::None => units.from_nats(nats) * factor,
                Normalize::ByMedard => nats / rm.unwrap_or(f64::NAN),
            })
        };
        let mut row = vec![fmt(p.snr_db)];
        row.push(match normalize {
            Normalize::None => units.name().to_string(),
            Normalize::ByMedard => "ratio".to_string(),
        });
        for kind in Kind::SWEEP {
            row.push(cell(kind).map(fmt).unwrap_or_default());
        }
        let eb = p.get(Kind::RStarInf).map(|r| match r {
            Ok(b) => {
                let bits = b.rate_nats / std::f64::consts::LN_2 * factor;
                10.0 * (p.power / p.n0 / bits).log10()
            }
            Err(_) => f64::NAN,
        });
        row.push(eb.map(fmt).unwrap_or_default());
        row.push(settings.spec.seed.to_string());
        failed += p.failures().count();
        rows.push(row);
    }
    if normalize == Normalize::ByMedard {
        meta.push(("normalization".into(), "rates divided by r_m at the same snr".into()));
    }
    meta.push(("rows".into(), points.len().to_string()));
    meta.push(("failed_cells".into(), failed.to_string()));
    (write_rows(&SWEEP_HEADER, &rows, &meta), failed)
}

/// One row of the two-layer power-fraction sweep, in nats.
#[derive(Debug, Clone)]
pub struct FractionRow {
    pub fraction: f64,
    pub total: f64,
    pub r1: f64,
    pub r2: f64,
    pub r_m: f64,
}

pub fn fraction_csv(rows: &[FractionRow], settings: &Settings, mut meta: Vec<(String, String)>) -> (String, usize) {
    let u = settings.units;
    let f = settings.rate_factor();
    let conv = |v: f64| fmt(u.from_nats(v) * f);
    let mut failed = 0;
    let text_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            failed += [r.total, r.r1, r.r2, r.r_m].iter().filter(|v| v.is_nan()).count();
            vec![
                fmt(r.fraction),
                u.name().to_string(),
                conv(r.total),
                conv(r.r1),
                conv(r.r2),
                conv(r.r_m),
                settings.spec.seed.to_string(),
            ]
        })
        .collect();
    meta.push(("rows".into(), rows.len().to_string()));
    meta.push(("failed_cells".into(), failed.to_string()));
    (write_rows(&FIG1_HEADER, &text_rows, &meta), failed)
}

/// JSON record for a single point, with units and pilot factor applied.
pub fn point_json(p: &Point, settings: &Settings, command: &str) -> Value {
    let u = settings.units;
    let f = settings.rate_factor();
    let mut bounds = Map::new();
    for e in &p.bounds {
        let v = match &e.outcome {
            Ok(b) => json!({
                "rate": u.from_nats(b.rate_nats) * f,
                "error_estimate": u.from_nats(b.estimate.error_estimate) * f,
                "method": b.estimate.method,
                "unbounded": b.unbounded,
                "diagnostics": b.estimate.diagnostics,
            }),
            Err(msg) => json!({ "rate": Value::Null, "error": msg }),
        };
        bounds.insert(e.kind.name().to_string(), v);
    }
    let meta: Map<String, Value> = metadata(settings, command).into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    json!({
        "snr_db": p.snr_db,
        "power": p.power,
        "n0": p.n0,
        "units": u.name(),
        "bounds": bounds,
        "metadata": meta,
    })
}
