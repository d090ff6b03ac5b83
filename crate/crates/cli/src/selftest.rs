//! Quick invariant suite with a machine-readable report.

use ratesplit::bounds::{
    coherent_capacity, layered_bound, medard_bound, rate_splitting_supremum, upper_bound_iupper, BoundValue,
};
use ratesplit::estimator::expect_w;
use ratesplit::fading::error_variance;
use ratesplit::optimize::optimize_layers;
use ratesplit::special::{abs_log_moment, exp_int_e1, exp_scaled_e1, expected_log_affine, theta};
use ratesplit::{ChannelPoint, ErrorProfile, ExpectationSpec, FadingModel, Layering, OptimizerConfig};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub pass: bool,
    pub mc_samples: usize,
    pub checks: Vec<CheckResult>,
}

/// Θ without the small-argument series, as a mutation of the real one.
pub fn tampered_theta(x: f64) -> f64 {
    (1.0 + x).ln() / x
}

/// Θ must approach 1 smoothly at the origin: relative error `≤ 1e-12` at
/// `|x| = 1e-12 … 1e-5`.
pub fn theta_continuity(theta: impl Fn(f64) -> f64) -> Result<String, String> {
    let mut worst = 0.0f64;
    for k in 5..=12 {
        for sign in [1.0, -1.0] {
            let x = sign * 10f64.powi(-k);
            let exact = 1.0 - x / 2.0 + x * x / 3.0;
            worst = worst.max((theta(x) - exact).abs());
        }
    }
    if worst <= 1e-12 {
        Ok(format!("max deviation {worst:.1e}"))
    } else {
        Err(format!("max deviation {worst:.1e} near x = 0"))
    }
}

fn close(name: &str, got: f64, want: f64, rel: f64) -> Result<String, String> {
    let err = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
    let msg = format!("{name}: {got:.10} vs {want:.10} (rel {err:.1e})");
    if err <= rel {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn agree(name: &str, quad: &BoundValue, mc: &BoundValue) -> Result<String, String> {
    let sigma = mc.error_estimate();
    let z = (quad.rate_nats - mc.rate_nats).abs() / sigma;
    let msg = format!("{name}: quad {:.6} mc {:.6} ({z:.2} sigma)", quad.rate_nats, mc.rate_nats);
    if z <= 4.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn e(err: ratesplit::Error) -> String {
    err.to_string()
}

pub fn run(mc_samples: usize, seed: u64) -> Report {
    let fig1 = FadingModel::constant(0.5, 0.5);
    let ch10 = ChannelPoint::new(10.0, 1.0).expect("valid point");
    let quad = ExpectationSpec::default();
    let mc = ExpectationSpec::monte_carlo(mc_samples, seed);
    let mut checks: Vec<(&str, Result<String, String>)> = Vec::new();

    checks.push(("special.theta-continuity", theta_continuity(|x| theta(x).unwrap_or(f64::NAN))));
    checks.push((
        "special.theta-mutation-detected",
        match theta_continuity(tampered_theta) {
            Ok(d) => Err(format!("tampered Θ was not caught ({d})")),
            Err(d) => Ok(format!("tampered Θ rejected: {d}")),
        },
    ));
    checks.push((
        "special.e1",
        exp_int_e1(1.0).map_err(e).and_then(|v| close("E1(1)", v, 0.219_383_934_395_520_3, 1e-14)),
    ));
    checks.push(("special.k", close("K", abs_log_moment(), 1.015_983_5, 1e-7)));
    checks.push((
        "special.expected-log-affine",
        expected_log_affine(1.0, 1.0).map_err(e).and_then(|v| close("E log(1+W)", v, 0.596_347_4, 1e-7)),
    ));
    checks.push((
        "layering.examples",
        (|| {
            let u = Layering::uniform(10.0, 4).map_err(e)?;
            let ok = u.cumulative() == [2.5, 5.0, 7.5, 10.0]
                && u.powers() == [2.5; 4]
                && Layering::new(vec![5.0, 10.0]).map_err(e)?.refine(5.0).is_err();
            if ok {
                Ok("uniform/powers/refine".into())
            } else {
                Err("layering example mismatch".into())
            }
        })(),
    ));
    checks.push((
        "estimator.expect-w",
        expect_w(|w: f64| w, &quad).map_err(e).and_then(|r| close("E W", r.value, 1.0, 1e-12)),
    ));
    checks.push((
        "fading.profiles",
        (|| {
            let p = FadingModel::normalized(ErrorProfile::prediction(0.25).map_err(e)?).map_err(e)?;
            let i = FadingModel::normalized(ErrorProfile::interpolation(0.25).map_err(e)?).map_err(e)?;
            close("prediction B=1/4, rho=1", error_variance(&p, 1.0).map_err(e)?, 3f64.sqrt() - 1.0, 1e-12)?;
            close("interpolation BT=1/2, rho=1", error_variance(&i, 1.0).map_err(e)?, 0.5, 1e-12)
        })(),
    ));
    checks.push((
        "bounds.medard-closed-form",
        medard_bound(&fig1, &ch10, &quad)
            .map_err(e)
            .and_then(|b| close("R_M", b.rate_nats, exp_scaled_e1(1.2).map_err(e)?, 1e-6)),
    ));
    checks.push((
        "bounds.perfect-csi-collapse",
        (|| {
            let m = FadingModel::constant(1.0, 0.0);
            let rm = medard_bound(&m, &ch10, &quad).map_err(e)?;
            let rs = rate_splitting_supremum(&m, &ch10, &quad).map_err(e)?;
            let cc = coherent_capacity(&m, &ch10, &quad).map_err(e)?;
            close("R_M = C_coh", rm.rate_nats, cc.rate_nats, 1e-12)?;
            close("R* = C_coh", rs.rate_nats, cc.rate_nats, 1e-12)
        })(),
    ));
    checks.push((
        "bounds.ordering",
        (|| {
            for rho in [0.1, 10.0, 1000.0] {
                let ch = ChannelPoint::from_snr(rho).map_err(e)?;
                let rm = medard_bound(&fig1, &ch, &quad).map_err(e)?.rate_nats;
                let r2 = optimize_layers(&fig1, &ch, 2, &quad, &OptimizerConfig::default()).map_err(e)?.bound.rate_nats;
                let rs = rate_splitting_supremum(&fig1, &ch, &quad).map_err(e)?.rate_nats;
                let iu = upper_bound_iupper(&fig1, &ch, &quad).map_err(e)?.rate_nats;
                let cc = coherent_capacity(&fig1, &ch, &quad).map_err(e)?.rate_nats;
                let tol = 5e-6 * cc;
                if !(rm <= r2 + tol && r2 <= rs + tol && rs <= iu.min(cc) + tol) {
                    return Err(format!("rho={rho}: {rm} {r2} {rs} {iu} {cc}"));
                }
            }
            Ok("R_M <= R*(2) <= R* <= min(I_upper, C_coh) at 3 SNRs".into())
        })(),
    ));
    checks.push((
        "bounds.refinement-increases",
        (|| {
            let q = Layering::new(vec![5.0, 10.0]).map_err(e)?;
            let a = layered_bound(&fig1, &ch10, &q, &quad).map_err(e)?;
            let b = layered_bound(&fig1, &ch10, &q.refine(2.5).map_err(e)?, &quad).map_err(e)?;
            let margin = b.rate_nats - a.rate_nats;
            let tol = 3.0 * (a.error_estimate() + b.error_estimate());
            if margin > tol {
                Ok(format!("increase {margin:.3e} > {tol:.1e}"))
            } else {
                Err(format!("increase {margin:.3e} <= {tol:.1e}"))
            }
        })(),
    ));
    for (name, f) in [
        ("mc.medard", medard_bound as fn(&FadingModel, &ChannelPoint, &ExpectationSpec) -> ratesplit::Result<BoundValue>),
        ("mc.supremum", rate_splitting_supremum),
        ("mc.i-upper", upper_bound_iupper),
        ("mc.coherent", coherent_capacity),
    ] {
        checks.push((name, (|| agree(name, &f(&fig1, &ch10, &quad).map_err(e)?, &f(&fig1, &ch10, &mc).map_err(e)?))()));
    }

    let checks: Vec<CheckResult> = checks
        .into_iter()
        .map(|(name, r)| {
            let (pass, detail) = match r {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult {
                name: name.to_string(),
                pass,
                detail,
            }
        })
        .collect();
    Report {
        pass: checks.iter().all(|c| c.pass),
        mc_samples,
        checks,
    }
}
