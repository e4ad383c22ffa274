use crate::error::{Error, Result};
use crate::exact;
use crate::numerics::Point;
use crate::reductions::local::{LocalEncoder, LocalSelector};
use serde::{Deserialize, Serialize};

use super::{AnchorFunction, Evaluate};

/// A serializable expression for a map between cubes.
///
/// Player inputs of generated instances are [`Map::Anchor`]; the reductions
/// build their gadget functions out of the remaining combinators so that a
/// target instance can be written to disk and evaluated again later.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Map {
    Anchor(AnchorFunction),
    Identity {
        dim: usize,
    },
    Constant {
        in_dim: usize,
        #[serde(with = "exact::vec")]
        value: Vec<f64>,
    },
    /// `x -> x[start .. start + len]`.
    Block {
        in_dim: usize,
        start: usize,
        len: usize,
    },
    /// Concatenation of the outputs of `parts` on a shared input.
    Stack {
        parts: Vec<Map>,
    },
    /// `x -> second(first(x))`.
    Then {
        first: Box<Map>,
        second: Box<Map>,
    },
    Scale {
        #[serde(with = "exact")]
        factor: f64,
        inner: Box<Map>,
    },
    /// Coordinatewise sum of `parts` on a shared input.
    Sum {
        parts: Vec<Map>,
    },
    /// Coordinatewise clamp into `[0,1]`.
    Clamp {
        inner: Box<Map>,
    },
    LocalEncode(LocalEncoder),
    LocalSelect(LocalSelector),
}

impl Map {
    pub fn identity(dim: usize) -> Map {
        Map::Identity { dim }
    }

    pub fn constant(in_dim: usize, value: Vec<f64>) -> Map {
        Map::Constant { in_dim, value }
    }

    pub fn block(in_dim: usize, start: usize, len: usize) -> Map {
        Map::Block { in_dim, start, len }
    }

    pub fn stack(parts: Vec<Map>) -> Map {
        Map::Stack { parts }
    }

    pub fn then(first: Map, second: Map) -> Map {
        Map::Then {
            first: Box::new(first),
            second: Box::new(second),
        }
    }

    pub fn scale(factor: f64, inner: Map) -> Map {
        Map::Scale {
            factor,
            inner: Box::new(inner),
        }
    }

    pub fn sum(parts: Vec<Map>) -> Map {
        Map::Sum { parts }
    }

    pub fn clamp(inner: Map) -> Map {
        Map::Clamp {
            inner: Box::new(inner),
        }
    }

    /// `1 - f(x)` coordinatewise.
    pub fn complement(inner: Map) -> Map {
        let ones = vec![1.0; inner.out_dim()];
        let in_dim = inner.in_dim();
        Map::sum(vec![Map::constant(in_dim, ones), Map::scale(-1.0, inner)])
    }

    /// Checks that every combinator receives inputs of matching dimensions.
    pub fn validate(&self) -> Result<()> {
        let mismatch = |expected: usize, got: usize| Err(Error::Dimension { expected, got });
        match self {
            Map::Anchor(_) | Map::LocalEncode(_) | Map::LocalSelect(_) => Ok(()),
            Map::Identity { dim } if *dim == 0 => {
                Err(Error::InvalidParameter("identity of dimension 0".into()))
            }
            Map::Identity { .. } => Ok(()),
            Map::Constant { in_dim, value } => {
                if *in_dim == 0 || value.is_empty() {
                    Err(Error::InvalidParameter("empty constant map".into()))
                } else {
                    Ok(())
                }
            }
            Map::Block { in_dim, start, len } => {
                if *len == 0 || start + len > *in_dim {
                    Err(Error::InvalidParameter(format!(
                        "block {start}+{len} outside input of dimension {in_dim}"
                    )))
                } else {
                    Ok(())
                }
            }
            Map::Stack { parts } | Map::Sum { parts } => {
                let first = parts
                    .first()
                    .ok_or_else(|| Error::InvalidParameter("empty combinator".into()))?;
                for p in parts {
                    p.validate()?;
                    if p.in_dim() != first.in_dim() {
                        return mismatch(first.in_dim(), p.in_dim());
                    }
                    if matches!(self, Map::Sum { .. }) && p.out_dim() != first.out_dim() {
                        return mismatch(first.out_dim(), p.out_dim());
                    }
                }
                Ok(())
            }
            Map::Then { first, second } => {
                first.validate()?;
                second.validate()?;
                if first.out_dim() != second.in_dim() {
                    return mismatch(second.in_dim(), first.out_dim());
                }
                Ok(())
            }
            Map::Scale { inner, .. } | Map::Clamp { inner } => inner.validate(),
        }
    }
}

impl From<AnchorFunction> for Map {
    fn from(f: AnchorFunction) -> Self {
        Map::Anchor(f)
    }
}

impl Evaluate for Map {
    fn in_dim(&self) -> usize {
        match self {
            Map::Anchor(f) => f.in_dim(),
            Map::Identity { dim } => *dim,
            Map::Constant { in_dim, .. } | Map::Block { in_dim, .. } => *in_dim,
            Map::Stack { parts } | Map::Sum { parts } => parts.first().map_or(0, |p| p.in_dim()),
            Map::Then { first, .. } => first.in_dim(),
            Map::Scale { inner, .. } | Map::Clamp { inner } => inner.in_dim(),
            Map::LocalEncode(e) => e.in_dim(),
            Map::LocalSelect(s) => s.in_dim(),
        }
    }

    fn out_dim(&self) -> usize {
        match self {
            Map::Anchor(f) => f.out_dim(),
            Map::Identity { dim } => *dim,
            Map::Constant { value, .. } => value.len(),
            Map::Block { len, .. } => *len,
            Map::Stack { parts } => parts.iter().map(|p| p.out_dim()).sum(),
            Map::Sum { parts } => parts.first().map_or(0, |p| p.out_dim()),
            Map::Then { second, .. } => second.out_dim(),
            Map::Scale { inner, .. } | Map::Clamp { inner } => inner.out_dim(),
            Map::LocalEncode(e) => e.out_dim(),
            Map::LocalSelect(s) => s.out_dim(),
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Map::Anchor(f) => f.apply(x),
            Map::Identity { .. } => x.to_vec(),
            Map::Constant { value, .. } => value.clone(),
            Map::Block { start, len, .. } => x[*start..start + len].to_vec(),
            Map::Stack { parts } => parts.iter().flat_map(|p| p.apply(x)).collect(),
            Map::Then { first, second } => second.apply(&first.apply(x)),
            Map::Scale { factor, inner } => {
                inner.apply(x).into_iter().map(|v| factor * v).collect()
            }
            Map::Sum { parts } => {
                let mut acc = parts[0].apply(x);
                for p in &parts[1..] {
                    for (a, v) in acc.iter_mut().zip(p.apply(x)) {
                        *a += v;
                    }
                }
                acc
            }
            Map::Clamp { inner } => inner
                .apply(x)
                .into_iter()
                .map(|v| v.clamp(0.0, 1.0))
                .collect(),
            Map::LocalEncode(e) => e.apply(x),
            Map::LocalSelect(s) => s.apply(x),
        }
    }
}

/// How two player functions are combined into one self-map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineKind {
    /// `x -> right(left(x))`
    Compose,
    /// `x -> (left(x), right(x))`
    Concat,
    /// `x -> (left(x) + right(x)) / 2`
    Mean,
}

/// The self-map `f_Comp`, `f_Concat` or `f_Mean` built from two player maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinedFunction {
    pub kind: CombineKind,
    pub left: Map,
    pub right: Map,
}

impl CombinedFunction {
    pub fn new(kind: CombineKind, left: Map, right: Map) -> Result<Self> {
        left.validate()?;
        right.validate()?;
        let dim = left.in_dim();
        let want = |expected: usize, got: usize| {
            if expected == got {
                Ok(())
            } else {
                Err(Error::Dimension { expected, got })
            }
        };
        match kind {
            CombineKind::Compose => {
                want(left.out_dim(), right.in_dim())?;
                want(dim, right.out_dim())?;
            }
            CombineKind::Concat => {
                want(dim, right.in_dim())?;
                want(dim, left.out_dim() + right.out_dim())?;
            }
            CombineKind::Mean => {
                want(dim, left.out_dim())?;
                want(dim, right.in_dim())?;
                want(dim, right.out_dim())?;
            }
        }
        Ok(CombinedFunction { kind, left, right })
    }

    pub fn dim(&self) -> usize {
        self.left.in_dim()
    }
}

impl Evaluate for CombinedFunction {
    fn in_dim(&self) -> usize {
        self.left.in_dim()
    }

    fn out_dim(&self) -> usize {
        self.left.in_dim()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self.kind {
            CombineKind::Compose => self.right.apply(&self.left.apply(x)),
            CombineKind::Concat => {
                let mut out = self.left.apply(x);
                out.extend(self.right.apply(x));
                out
            }
            CombineKind::Mean => {
                let a = self.left.apply(x);
                let b = self.right.apply(x);
                a.iter().zip(&b).map(|(u, v)| (u + v) / 2.0).collect()
            }
        }
    }
}

/// Evaluates a combined function at a point of the cube.
pub fn combined_eval(c: &CombinedFunction, x: &Point) -> Result<Vec<f64>> {
    c.eval(x)
}
