//! Instance transformations that carry a solution back-map and the epsilon
//! arithmetic needed to use it.

mod cycle;
mod imitation;
pub mod local;

pub use cycle::{comp_to_concat, concat_to_mean, local_to_comp, mean_to_comp};
pub use imitation::{
    comp_to_imitation_game, enumerate_approx_pure_nash, nash_profile_to_point, ImitationGame,
    Profile, MAX_PROFILES,
};
pub use local::{local_eval, LocalEncoder, LocalFamily, LocalPublic, LocalSelector};

use crate::error::{Error, Result};
use crate::exact;
use crate::numerics::Point;
use crate::protocols::BrouwerInstance;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionKind {
    ConcatToMean,
    MeanToComp,
    CompToConcat,
    LocalToComp,
}

/// Source epsilon as a function of target epsilon: `source = factor * target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonMap {
    #[serde(with = "exact")]
    pub factor: f64,
}

impl EpsilonMap {
    pub const IDENTITY: EpsilonMap = EpsilonMap { factor: 1.0 };

    pub fn linear(factor: f64) -> Self {
        EpsilonMap { factor }
    }

    /// Epsilon at which the source is solved when the target is solved at
    /// `target_epsilon`.
    pub fn source_epsilon(&self, target_epsilon: f64) -> f64 {
        self.factor * target_epsilon
    }

    /// Target epsilon needed to solve the source at `source_epsilon`.
    pub fn target_epsilon(&self, source_epsilon: f64) -> f64 {
        source_epsilon / self.factor
    }

    /// `self` applied after `inner`: a target of `inner` solved at `e` solves
    /// the source of `self` at `self.factor * inner.factor * e`.
    pub fn then(self, inner: EpsilonMap) -> EpsilonMap {
        EpsilonMap {
            factor: self.factor * inner.factor,
        }
    }
}

/// How a target solution becomes a source solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Backmap {
    Identity,
    /// Keep coordinates `start .. start + len`.
    Block {
        start: usize,
        len: usize,
    },
    /// Apply each step in order.
    Chain {
        steps: Vec<Backmap>,
    },
}

impl Backmap {
    pub fn apply(&self, x: &Point) -> Result<Point> {
        match self {
            Backmap::Identity => Ok(x.clone()),
            Backmap::Block { start, len } => {
                if start + len > x.dim() {
                    return Err(Error::Dimension {
                        expected: start + len,
                        got: x.dim(),
                    });
                }
                Point::new(x.coords()[*start..start + len].to_vec())
            }
            Backmap::Chain { steps } => steps.iter().try_fold(x.clone(), |p, s| s.apply(&p)),
        }
    }
}

/// A constructed target instance with everything needed to map its
/// solutions back to the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RecordRepr", into = "RecordRepr")]
pub struct ReductionRecord {
    pub steps: Vec<ReductionKind>,
    pub source: BrouwerInstance,
    pub target: BrouwerInstance,
    pub backmap: Backmap,
    pub epsilon_map: EpsilonMap,
}

#[derive(Clone, Serialize, Deserialize)]
struct RecordRepr {
    format: u32,
    steps: Vec<ReductionKind>,
    source: BrouwerInstance,
    target: BrouwerInstance,
    backmap: Backmap,
    epsilon_map: EpsilonMap,
}

impl TryFrom<RecordRepr> for ReductionRecord {
    type Error = Error;

    fn try_from(r: RecordRepr) -> Result<Self> {
        if r.format != crate::FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported reduction format {}",
                r.format
            )));
        }
        Ok(ReductionRecord {
            steps: r.steps,
            source: r.source,
            target: r.target,
            backmap: r.backmap,
            epsilon_map: r.epsilon_map,
        })
    }
}

impl From<ReductionRecord> for RecordRepr {
    fn from(r: ReductionRecord) -> Self {
        RecordRepr {
            format: crate::FORMAT_VERSION,
            steps: r.steps,
            source: r.source,
            target: r.target,
            backmap: r.backmap,
            epsilon_map: r.epsilon_map,
        }
    }
}

impl ReductionRecord {
    /// Maps a target point to a source point.
    pub fn back(&self, target_solution: &Point) -> Result<Point> {
        if target_solution.dim() != self.target.dim() {
            return Err(Error::Dimension {
                expected: self.target.dim(),
                got: target_solution.dim(),
            });
        }
        self.backmap.apply(target_solution)
    }

    /// Source epsilon guaranteed by a target solution at `target_epsilon`.
    pub fn source_epsilon(&self, target_epsilon: f64) -> f64 {
        self.epsilon_map.source_epsilon(target_epsilon)
    }

    /// Follows `self` with `next`, whose source must be `self.target`.
    pub fn chain(self, next: ReductionRecord) -> Result<ReductionRecord> {
        if next.source != self.target {
            return Err(Error::Incompatible(
                "the next reduction does not start at this target".into(),
            ));
        }
        let mut steps = self.steps;
        steps.extend(next.steps);
        Ok(ReductionRecord {
            steps,
            source: self.source,
            target: next.target,
            backmap: Backmap::Chain {
                steps: vec![next.backmap, self.backmap],
            },
            epsilon_map: self.epsilon_map.then(next.epsilon_map),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_maps_compose() {
        let a = EpsilonMap::linear(2.0);
        let b = EpsilonMap::linear(8.0);
        let c = a.then(b);
        assert_eq!(c.source_epsilon(0.5), 8.0);
        assert_eq!(c.target_epsilon(8.0), 0.5);
        assert_eq!(EpsilonMap::IDENTITY.then(a), a);
    }

    #[test]
    fn backmaps_compose_in_order() {
        let x = Point::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let chain = Backmap::Chain {
            steps: vec![
                Backmap::Block { start: 1, len: 3 },
                Backmap::Block { start: 2, len: 1 },
            ],
        };
        assert_eq!(chain.apply(&x).unwrap().coords(), &[0.4]);
        assert!(Backmap::Block { start: 3, len: 2 }.apply(&x).is_err());
    }
}
