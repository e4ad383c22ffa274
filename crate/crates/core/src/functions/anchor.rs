use crate::error::{Error, Result};
use crate::exact;
use crate::numerics::{distance, NormKind, Point};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Evaluate;

const ANCHOR_TOL: f64 = 1e-9;

/// One sample `(x, f(x))` of an anchor function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    #[serde(with = "exact::vec")]
    pub x: Vec<f64>,
    #[serde(with = "exact::vec")]
    pub v: Vec<f64>,
}

impl Anchor {
    pub fn new(x: Vec<f64>, v: Vec<f64>) -> Self {
        Anchor { x, v }
    }
}

/// A `lambda`-Lipschitz map `[0,1]^n -> [0,1]^m` given by finitely many
/// anchors and evaluated everywhere through the McShane extension
///
/// ```text
/// F(x)_i = clamp01( min_s ( v_s[i] + lambda * dist(x, s) ) )
/// ```
///
/// with `dist` the normalized norm `norm`. The anchors are required to be
/// `lambda`-Lipschitz coordinate by coordinate, which implies the vector
/// condition for every normalized norm. Under that condition the extension
/// agrees with every anchor and is `lambda`-Lipschitz in the chosen norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AnchorRepr", into = "AnchorRepr")]
pub struct AnchorFunction {
    in_dim: usize,
    out_dim: usize,
    anchors: Vec<Anchor>,
    lambda: f64,
    norm: NormKind,
}

#[derive(Clone, Serialize, Deserialize)]
struct AnchorRepr {
    n: usize,
    m: usize,
    p: NormKind,
    #[serde(with = "exact")]
    lambda: f64,
    anchors: Vec<Anchor>,
}

impl TryFrom<AnchorRepr> for AnchorFunction {
    type Error = Error;

    fn try_from(r: AnchorRepr) -> Result<Self> {
        AnchorFunction::new(r.n, r.m, r.anchors, r.lambda, r.p)
    }
}

impl From<AnchorFunction> for AnchorRepr {
    fn from(f: AnchorFunction) -> Self {
        AnchorRepr {
            n: f.in_dim,
            m: f.out_dim,
            p: f.norm,
            lambda: f.lambda,
            anchors: f.anchors,
        }
    }
}

impl AnchorFunction {
    pub fn new(
        in_dim: usize,
        out_dim: usize,
        anchors: Vec<Anchor>,
        lambda: f64,
        norm: NormKind,
    ) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::InvalidParameter(
                "dimensions must be positive".into(),
            ));
        }
        if anchors.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one anchor is required".into(),
            ));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda {lambda} must be >= 0"
            )));
        }
        for a in &anchors {
            check_unit(&a.x, in_dim)?;
            check_unit(&a.v, out_dim)?;
        }
        let f = AnchorFunction {
            in_dim,
            out_dim,
            anchors,
            lambda,
            norm,
        };
        f.check_lipschitz()?;
        Ok(f)
    }

    fn check_lipschitz(&self) -> Result<()> {
        for (i, s) in self.anchors.iter().enumerate() {
            for (j, t) in self.anchors.iter().enumerate().skip(i + 1) {
                let allowed = self.lambda * distance(&s.x, &t.x, self.norm) + ANCHOR_TOL;
                if let Some(coord) = (0..self.out_dim).find(|&c| (s.v[c] - t.v[c]).abs() > allowed)
                {
                    return Err(Error::LipschitzViolation {
                        first: i,
                        second: j,
                        coord,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    /// Largest pairwise ratio `||v_s - v_t|| / ||s - t||` over the anchors,
    /// measured in the function's own norm.
    pub fn anchor_lipschitz(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, s) in self.anchors.iter().enumerate() {
            for t in &self.anchors[i + 1..] {
                let dx = distance(&s.x, &t.x, self.norm);
                if dx > 0.0 {
                    best = best.max(distance(&s.v, &t.v, self.norm) / dx);
                }
            }
        }
        best
    }
}

fn check_unit(v: &[f64], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(Error::Dimension {
            expected: dim,
            got: v.len(),
        });
    }
    for (index, &value) in v.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfCube { index, value });
        }
    }
    Ok(())
}

impl Evaluate for AnchorFunction {
    fn in_dim(&self) -> usize {
        self.in_dim
    }

    fn out_dim(&self) -> usize {
        self.out_dim
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![f64::INFINITY; self.out_dim];
        for a in &self.anchors {
            let reach = self.lambda * distance(x, &a.x, self.norm);
            for (o, v) in out.iter_mut().zip(&a.v) {
                *o = o.min(v + reach);
            }
        }
        for o in &mut out {
            *o = o.clamp(0.0, 1.0);
        }
        out
    }
}

/// Evaluates the McShane extension of `f` at `x`.
pub fn mcshane_eval(f: &AnchorFunction, x: &Point) -> Result<Point> {
    Point::new(f.eval(x)?)
}

/// Lowers raw anchor values to the largest coordinatewise `lambda`-Lipschitz
/// values below them: `v_s[i] = min_t ( raw_t[i] + lambda * dist(s, t) )`.
/// Values that are already feasible are left unchanged.
pub fn lipschitz_regularize(
    raw: Vec<(Vec<f64>, Vec<f64>)>,
    lambda: f64,
    norm: NormKind,
) -> Result<AnchorFunction> {
    let first = raw
        .first()
        .ok_or_else(|| Error::InvalidParameter("no raw anchors".into()))?;
    let (in_dim, out_dim) = (first.0.len(), first.1.len());
    for (x, v) in &raw {
        check_unit(x, in_dim)?;
        check_unit(v, out_dim)?;
    }
    let anchors = raw
        .iter()
        .map(|(s, _)| {
            let mut v = vec![f64::INFINITY; out_dim];
            for (t, raw_t) in &raw {
                let reach = lambda * distance(s, t, norm);
                for (o, r) in v.iter_mut().zip(raw_t) {
                    *o = o.min(r + reach);
                }
            }
            Anchor::new(s.clone(), v)
        })
        .collect();
    AnchorFunction::new(in_dim, out_dim, anchors, lambda, norm)
}

/// A random `lambda`-Lipschitz function: uniform anchors and values, then
/// [`lipschitz_regularize`]. Deterministic in `seed`.
pub fn random_lipschitz(
    seed: u64,
    in_dim: usize,
    out_dim: usize,
    lambda: f64,
    norm: NormKind,
    anchor_count: usize,
) -> Result<AnchorFunction> {
    if anchor_count == 0 {
        return Err(Error::InvalidParameter("anchor_count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = (0..anchor_count)
        .map(|_| {
            let x = (0..in_dim).map(|_| rng.random::<f64>()).collect();
            let v = (0..out_dim).map(|_| rng.random::<f64>()).collect();
            (x, v)
        })
        .collect();
    lipschitz_regularize(raw, lambda, norm)
}
