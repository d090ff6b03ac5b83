//! Search for the best `L`-layer power allocation.
//!
//! Layer fractions are `softmax(z1, …, z_{L-1}, 0)`, so any real vector maps
//! to a valid layering. Each `L` is searched by Nelder–Mead from three
//! starting points: uniform, geometric (`pᵢ ∝ 2^{-i}`) and the previous
//! optimum refined at the midpoint of its widest gap.

use serde::{Deserialize, Serialize};

use crate::bounds::{layered_bound, layered_bound_value, BoundKind, BoundValue, ChannelPoint};
use crate::error::{Error, Result};
use crate::estimator::ExpectationSpec;
use crate::fading::FadingModel;
use crate::layering::Layering;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Iteration limit per start.
    pub max_iter: usize,
    /// Simplex diameter at convergence.
    pub x_tol: f64,
    /// Spread of simplex values at convergence, in nats.
    pub f_tol: f64,
    pub initial_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iter: 4000,
            x_tol: 1e-4,
            f_tol: 1e-7,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedLayering {
    pub layering: Layering,
    pub bound: BoundValue,
    /// False when the best start hit `max_iter`; the layering is then the
    /// best point seen.
    pub converged: bool,
    pub iterations: usize,
}

fn fractions(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(0.0, f64::max);
    let mut e: Vec<f64> = z.iter().map(|&v| (v - m).exp()).collect();
    e.push((-m).exp());
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

fn layering_from(z: &[f64], total: f64) -> Result<Layering> {
    let p = fractions(z);
    let mut acc = 0.0;
    let mut q: Vec<f64> = p
        .iter()
        .map(|f| {
            acc += f;
            acc * total
        })
        .collect();
    *q.last_mut().unwrap() = total;
    Layering::new(q)
}

fn logits_of(q: &Layering) -> Vec<f64> {
    let p = q.powers();
    let last = *p.last().unwrap();
    p[..p.len() - 1].iter().map(|v| (v / last).ln()).collect()
}

fn distance_to_uniform(q: &Layering) -> f64 {
    let l = q.len() as f64;
    let total = q.total();
    q.powers().iter().map(|p| (p / total - 1.0 / l).powi(2)).sum::<f64>().sqrt()
}

struct Outcome {
    z: Vec<f64>,
    value: f64,
    converged: bool,
    iterations: usize,
}

/// Maximizes `f` by Nelder–Mead.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, start: &[f64], cfg: &OptimizerConfig) -> Outcome {
    let n = start.len();
    let cost = |f: &mut F, x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            -v
        } else {
            f64::INFINITY
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let c0 = cost(&mut f, start);
    simplex.push((start.to_vec(), c0));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += cfg.initial_step;
        let c = cost(&mut f, &x);
        simplex.push((x, c));
    }
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let spread = simplex[n].1 - simplex[0].1;
        if diameter < cfg.x_tol && spread < cfg.f_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(1.0);
        let cr = cost(&mut f, &xr);
        if cr < simplex[0].1 {
            let xe = along(2.0);
            let ce = cost(&mut f, &xe);
            simplex[n] = if ce < cr { (xe, ce) } else { (xr, cr) };
            continue;
        }
        if cr < simplex[n - 1].1 {
            simplex[n] = (xr, cr);
            continue;
        }
        let (xc, cc) = if cr < worst.1 {
            let x = along(0.5);
            let c = cost(&mut f, &x);
            (x, c)
        } else {
            let x = along(-0.5);
            let c = cost(&mut f, &x);
            (x, c)
        };
        if cc < worst.1.min(cr) {
            simplex[n] = (xc, cc);
            continue;
        }
        let x0 = simplex[0].0.clone();
        for (x, c) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&x0) {
                *xi = bi + 0.5 * (*xi - bi);
            }
            *c = cost(&mut f, x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (z, c) = simplex.swap_remove(0);
    Outcome {
        z,
        value: -c,
        converged,
        iterations,
    }
}

fn finish(model: &FadingModel, ch: &ChannelPoint, q: Layering, spec: &ExpectationSpec, converged: bool, iterations: usize) -> Result<OptimizedLayering> {
    let mut bound = layered_bound(model, ch, &q, spec)?;
    bound.kind = BoundKind::RStarL;
    Ok(OptimizedLayering {
        layering: q,
        bound,
        converged,
        iterations,
    })
}

fn optimize_one(
    model: &FadingModel,
    ch: &ChannelPoint,
    l: usize,
    spec: &ExpectationSpec,
    cfg: &OptimizerConfig,
    previous: Option<&Layering>,
) -> Result<OptimizedLayering> {
    let total = ch.power;
    if l == 1 {
        return finish(model, ch, Layering::uniform(total, 1)?, spec, true, 0);
    }
    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; l - 1]];
    starts.push((1..l).map(|i| (l - i) as f64 * std::f64::consts::LN_2).collect());
    if let Some(prev) = previous {
        let prev = prev.rescale(total)?;
        let (lo, hi) = prev.widest_gap();
        let warm = prev.refine(0.5 * (lo + hi))?;
        starts.push(logits_of(&warm));
    }
    // the first failing evaluation is reported instead of being treated as -∞
    let mut failure: Option<Error> = None;
    let mut best: Option<(Layering, f64, bool, usize)> = None;
    for start in &starts {
        let out = nelder_mead(
            |z| match layering_from(z, total) {
                Ok(q) => match layered_bound_value(model, ch, &q, spec) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                },
                Err(_) => f64::NAN,
            },
            start,
            cfg,
        );
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let q = layering_from(&out.z, total)?;
        let replace = match &best {
            None => true,
            Some((bq, bv, _, _)) => {
                out.value > *bv + 1e-12 || ((out.value - bv).abs() <= 1e-12 && distance_to_uniform(&q) < distance_to_uniform(bq))
            }
        };
        if replace {
            best = Some((q, out.value, out.converged, out.iterations));
        }
    }
    let (q, _, converged, iterations) = best.expect("at least one start");
    finish(model, ch, q, spec, converged, iterations)
}

/// Optimized bounds `R*(P, 1), …, R*(P, max_layers)`.
pub fn optimize_layers_sequence(
    model: &FadingModel,
    ch: &ChannelPoint,
    max_layers: usize,
    spec: &ExpectationSpec,
    cfg: &OptimizerConfig,
) -> Result<Vec<OptimizedLayering>> {
    if max_layers == 0 {
        return Err(Error::InvalidLayering("the number of layers must be at least 1".into()));
    }
    let mut out: Vec<OptimizedLayering> = Vec::with_capacity(max_layers);
    for l in 1..=max_layers {
        let prev = out.last().map(|o| &o.layering);
        let r = optimize_one(model, ch, l, spec, cfg, prev)?;
        out.push(r);
    }
    Ok(out)
}

/// `R*(P, L)`: the best `L`-layer bound found.
pub fn optimize_layers(
    model: &FadingModel,
    ch: &ChannelPoint,
    layers: usize,
    spec: &ExpectationSpec,
    cfg: &OptimizerConfig,
) -> Result<OptimizedLayering> {
    Ok(optimize_layers_sequence(model, ch, layers, spec, cfg)?.pop().expect("nonempty"))
}
