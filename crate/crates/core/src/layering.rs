//! Layerings: strictly increasing cumulative powers `0 < Q1 < … < QL = P`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance (in units of `P`) under which two cumulative powers
/// count as the same point.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Layering(Vec<f64>);

impl Layering {
    /// Validates and wraps a vector of cumulative powers.
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidLayering("a layering needs at least one layer".into()));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidLayering("cumulative powers must be finite".into()));
        }
        if !(q[0] > 0.0) {
            return Err(Error::InvalidLayering(format!("first cumulative power {} must be positive", q[0])));
        }
        if let Some(i) = q.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidLayering(format!(
                "cumulative powers must be strictly increasing (Q{} = {} >= Q{} = {})",
                i + 1,
                q[i],
                i + 2,
                q[i + 1]
            )));
        }
        Ok(Self(q))
    }

    /// `(P/K, 2P/K, …, P)`.
    pub fn uniform(total: f64, k: usize) -> Result<Self> {
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidLayering(format!("total power {total} must be positive")));
        }
        if k == 0 {
            return Err(Error::InvalidLayering("number of layers must be positive".into()));
        }
        let kf = k as f64;
        let mut q: Vec<f64> = (1..=k).map(|i| total * i as f64 / kf).collect();
        q[k - 1] = total;
        Self::new(q)
    }

    /// Inserts a new cumulative point strictly inside `(0, P)`.
    pub fn refine(&self, q_new: f64) -> Result<Self> {
        let total = self.total();
        if !(q_new > 0.0 && q_new < total) {
            return Err(Error::InvalidLayering(format!("insertion point {q_new} outside (0, {total})")));
        }
        let tol = DUPLICATE_TOLERANCE * total;
        if self.0.iter().any(|&q| (q - q_new).abs() <= tol) {
            return Err(Error::InvalidLayering(format!("insertion point {q_new} duplicates an existing layer")));
        }
        let pos = self.0.partition_point(|&q| q < q_new);
        let mut q = self.0.clone();
        q.insert(pos, q_new);
        Self::new(q)
    }

    /// Per-layer powers `Pℓ = Qℓ - Q_{ℓ-1}`.
    pub fn powers(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.0
            .iter()
            .map(|&q| {
                let p = q - prev;
                prev = q;
                p
            })
            .collect()
    }

    /// Image under a strictly increasing map with `F(P) = P`.
    pub fn map_monotone<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        let total = self.total();
        let image: Vec<f64> = self.0.iter().map(|&q| f(q)).collect();
        let end = image[image.len() - 1];
        if (end - total).abs() > DUPLICATE_TOLERANCE * total {
            return Err(Error::InvalidLayering(format!("monotone map must fix P = {total}, got F(P) = {end}")));
        }
        let mut image = image;
        let last = image.len() - 1;
        image[last] = total;
        Self::new(image).map_err(|e| Error::InvalidLayering(format!("map is not strictly increasing on the layering: {e}")))
    }

    pub fn total(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.0
    }

    /// Largest gap between consecutive cumulative points, counting `[0, Q1]`.
    pub fn widest_gap(&self) -> (f64, f64) {
        let mut lo = 0.0;
        let mut best = (0.0, self.0[0]);
        for &q in &self.0 {
            if q - lo > best.1 - best.0 {
                best = (lo, q);
            }
            lo = q;
        }
        best
    }

    /// Same fractions of a different total power.
    pub fn rescale(&self, total: f64) -> Result<Self> {
        let s = total / self.total();
        let mut q: Vec<f64> = self.0.iter().map(|v| v * s).collect();
        let last = q.len() - 1;
        q[last] = total;
        Self::new(q)
    }
}

impl TryFrom<Vec<f64>> for Layering {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Layering::new(v)
    }
}

impl From<Layering> for Vec<f64> {
    fn from(l: Layering) -> Self {
        l.0
    }
}

impl fmt::Display for Layering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|q| format!("{q}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Layering as given on the command line: `uniform:K` or `q1,q2,...,qL`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LayeringSpec {
    Uniform(usize),
    Explicit(Vec<f64>),
}

impl LayeringSpec {
    pub fn resolve(&self, total: f64) -> Result<Layering> {
        match self {
            LayeringSpec::Uniform(k) => Layering::uniform(total, *k),
            LayeringSpec::Explicit(q) => {
                let l = Layering::new(q.clone())?;
                if (l.total() - total).abs() > DUPLICATE_TOLERANCE * total.max(1.0) {
                    return Err(Error::InvalidLayering(format!(
                        "last cumulative power {} does not match the total power {total}",
                        l.total()
                    )));
                }
                Ok(l)
            }
        }
    }
}

impl FromStr for LayeringSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(k) = s.strip_prefix("uniform:") {
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad layer count in '{s}'")))?;
            if k == 0 {
                return Err(Error::Parse("uniform layering needs K >= 1".into()));
            }
            return Ok(LayeringSpec::Uniform(k));
        }
        let q = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad cumulative power '{p}'"))))
            .collect::<Result<Vec<_>>>()?;
        Layering::new(q.clone())?;
        Ok(LayeringSpec::Explicit(q))
    }
}
