//! One-dimensional quadrature rules.
//!
//! [`ExpRule`] holds nodes and weights for expectations under the unit-mean
//! exponential law, `E[f(U)] ≈ Σ wᵢ f(uᵢ)`. Two constructions exist:
//!
//! * plain Gauss–Laguerre with `n` nodes;
//! * a graded composite rule: Gauss–Legendre panels on `[0, 1]` with
//!   breakpoints `σ^J, …, σ², σ, 1` plus a shifted Laguerre tail on `[1, ∞)`.
//!
//! The graded rule resolves integrands with logarithmic near-singularities
//! just left of the origin, which is the typical shape of the bound
//! integrands at high SNR.
//!
//! [`adaptive_gk15`] is a plain adaptive Gauss–Kronrod integrator for finite
//! intervals.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Geometric ratio between consecutive panel breakpoints of the graded rule.
pub const GRADED_RATIO: f64 = 0.125;
/// Number of geometric levels below 1 (smallest breakpoint is `σ^J`).
pub const GRADED_LEVELS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct ExpRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ExpRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, z);
            pp = dp;
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, z);
        if dp != 0.0 {
            pp = dp;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
    }
    let nf = n as f64;
    let dp = nf * (z * p1 - p2) / (z * z - 1.0);
    (p1, dp)
}

/// Gauss–Laguerre nodes and weights for the weight `e^{-x}` on `[0, ∞)`.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let nf = n as f64;
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let mut z = 0.0f64;
    for i in 0..n {
        // asymptotic starting points, refined by Newton
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - x[i - 2])
            }
        };
        let mut p_prev = 0.0;
        let mut dp = 1.0;
        for _ in 0..200 {
            let (p, pm1) = laguerre_pair(n, z);
            dp = nf * (p - pm1) / z;
            p_prev = pm1;
            let z_old = z;
            z -= p / dp;
            if (z - z_old).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (p, pm1) = laguerre_pair(n, z);
        if p.is_finite() {
            dp = nf * (p - pm1) / z;
            p_prev = pm1;
        }
        x[i] = z;
        w[i] = -1.0 / (dp * nf * p_prev);
    }
    (x, w)
}

// (L_n(z), L_{n-1}(z)) via the three-term recurrence.
fn laguerre_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = ((2.0 * jf + 1.0 - z) * p2 - jf * p3) / (jf + 1.0);
    }
    (p1, p2)
}

/// Expectation rule: plain Gauss–Laguerre.
pub fn laguerre_rule(n: usize) -> ExpRule {
    let (nodes, weights) = gauss_laguerre(n);
    ExpRule { nodes, weights }
}

/// Expectation rule: graded Legendre panels on `[0,1]` plus a Laguerre tail.
///
/// `n` is the tail size; each panel uses `max(n/2, 4)` Legendre points.
pub fn graded_rule(n: usize) -> ExpRule {
    let m = (n / 2).max(4);
    let (gx, gw) = gauss_legendre(m);
    let mut breaks = Vec::with_capacity(GRADED_LEVELS + 2);
    breaks.push(0.0);
    for k in (1..=GRADED_LEVELS).rev() {
        breaks.push(GRADED_RATIO.powi(k as i32));
    }
    breaks.push(1.0);

    let mut nodes = Vec::with_capacity((breaks.len() - 1) * m + n);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (&x, &w) in gx.iter().zip(&gw) {
            let u = mid + half * x;
            nodes.push(u);
            weights.push(half * w * (-u).exp());
        }
    }
    let (lx, lw) = gauss_laguerre(n);
    let tail = (-1.0f64).exp();
    for (x, w) in lx.into_iter().zip(lw) {
        nodes.push(1.0 + x);
        weights.push(w * tail);
    }
    ExpRule { nodes, weights }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum RuleKey {
    Laguerre(usize),
    Graded(usize),
}

fn cache() -> &'static Mutex<HashMap<RuleKey, Arc<ExpRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<ExpRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(key: RuleKey) -> Arc<ExpRule> {
    let mut map = cache().lock().expect("quadrature cache poisoned");
    map.entry(key)
        .or_insert_with(|| {
            Arc::new(match key {
                RuleKey::Laguerre(n) => laguerre_rule(n),
                RuleKey::Graded(n) => graded_rule(n),
            })
        })
        .clone()
}

pub(crate) fn cached_laguerre(n: usize) -> Arc<ExpRule> {
    cached(RuleKey::Laguerre(n))
}

pub(crate) fn cached_graded(n: usize) -> Arc<ExpRule> {
    cached(RuleKey::Graded(n))
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = GK_WEIGHTS_K[7] * fc;
    let mut g = GK_WEIGHTS_G[3] * fc;
    for j in 0..7 {
        let dx = h * GK_NODES[j];
        let s = f(c - dx) + f(c + dx);
        k += GK_WEIGHTS_K[j] * s;
        if j % 2 == 1 {
            g += GK_WEIGHTS_G[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]` split at
/// the given interior breakpoints, to absolute tolerance `tol`.
pub fn adaptive_gk15<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breakpoints: &[f64], tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 10_000;
    let mut pts = vec![a];
    pts.extend(breakpoints.iter().copied().filter(|&p| p > a && p < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);

    let mut intervals: Vec<(f64, f64, f64, f64)> = pts
        .windows(2)
        .filter(|p| p[1] > p[0])
        .map(|p| {
            let (v, e) = gk15(&f, p[0], p[1]);
            (p[0], p[1], v, e)
        })
        .collect();

    loop {
        let total_err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if total_err <= tol {
            break;
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::IntegrationFailed {
                estimate: total_err,
                tolerance: tol,
            });
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Err(Error::IntegrationFailed {
                estimate: total_err,
                tolerance: tol,
            });
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    let value: f64 = intervals.iter().map(|iv| iv.2).sum();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::IntegrationFailed {
            estimate: f64::INFINITY,
            tolerance: tol,
        })
    }
}
