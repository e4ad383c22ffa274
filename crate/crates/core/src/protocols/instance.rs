use crate::error::{Error, Result};
use crate::exact;
use crate::functions::{CombineKind, CombinedFunction, Evaluate, Map};
use crate::numerics::{distance, NormKind, Point};
use crate::reductions::local::LocalFamily;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Comp,
    Concat,
    Mean,
    Local,
}

impl ProblemKind {
    fn combine(self) -> Option<CombineKind> {
        match self {
            ProblemKind::Comp => Some(CombineKind::Compose),
            ProblemKind::Concat => Some(CombineKind::Concat),
            ProblemKind::Mean => Some(CombineKind::Mean),
            ProblemKind::Local => None,
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProblemKind::Comp => "comp",
            ProblemKind::Concat => "concat",
            ProblemKind::Mean => "mean",
            ProblemKind::Local => "local",
        })
    }
}

/// What each player holds.
#[derive(Debug, Clone, PartialEq)]
pub enum PlayerInputs {
    /// `f_A` and `f_B` for the Comp, Concat and Mean problems.
    Maps { a: Map, b: Map },
    /// A local family; A holds its `x` bits, B its `y` bits.
    Local(LocalFamily),
}

/// A two-party fixed-point problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct BrouwerInstance {
    pub kind: ProblemKind,
    pub norm: NormKind,
    pub epsilon: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub inputs: PlayerInputs,
    combined: Option<CombinedFunction>,
}

#[derive(Clone, Serialize, Deserialize)]
struct InstanceRepr {
    format: u32,
    kind: ProblemKind,
    p: NormKind,
    #[serde(with = "exact")]
    epsilon: f64,
    #[serde(with = "exact")]
    lambda_a: f64,
    #[serde(with = "exact")]
    lambda_b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f_a: Option<Map>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f_b: Option<Map>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<LocalFamily>,
}

impl TryFrom<InstanceRepr> for BrouwerInstance {
    type Error = Error;

    fn try_from(r: InstanceRepr) -> Result<Self> {
        if r.format != crate::FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported instance format {}",
                r.format
            )));
        }
        let inputs = match (r.kind, r.f_a, r.f_b, r.family) {
            (ProblemKind::Local, None, None, Some(fam)) => PlayerInputs::Local(fam),
            (ProblemKind::Local, ..) => {
                return Err(Error::Format(
                    "local instances carry exactly a `family`".into(),
                ))
            }
            (_, Some(a), Some(b), None) => PlayerInputs::Maps { a, b },
            _ => return Err(Error::Format("instances carry `f_a` and `f_b`".into())),
        };
        BrouwerInstance::new(r.kind, r.p, r.epsilon, r.lambda_a, r.lambda_b, inputs)
    }
}

impl From<BrouwerInstance> for InstanceRepr {
    fn from(i: BrouwerInstance) -> Self {
        let (f_a, f_b, family) = match i.inputs {
            PlayerInputs::Maps { a, b } => (Some(a), Some(b), None),
            PlayerInputs::Local(fam) => (None, None, Some(fam)),
        };
        InstanceRepr {
            format: crate::FORMAT_VERSION,
            kind: i.kind,
            p: i.norm,
            epsilon: i.epsilon,
            lambda_a: i.lambda_a,
            lambda_b: i.lambda_b,
            f_a,
            f_b,
            family,
        }
    }
}

impl BrouwerInstance {
    pub fn new(
        kind: ProblemKind,
        norm: NormKind,
        epsilon: f64,
        lambda_a: f64,
        lambda_b: f64,
        inputs: PlayerInputs,
    ) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon {epsilon} must be > 0"
            )));
        }
        if !(lambda_a >= 0.0 && lambda_b >= 0.0) {
            return Err(Error::InvalidParameter("lambdas must be >= 0".into()));
        }
        let combined = match (&inputs, kind.combine()) {
            (PlayerInputs::Maps { a, b }, Some(ck)) => {
                certify(a, lambda_a, "f_a")?;
                certify(b, lambda_b, "f_b")?;
                if ck == CombineKind::Concat && a.in_dim() % 2 != 0 {
                    return Err(Error::InvalidParameter(
                        "concatenation instances need an even dimension".into(),
                    ));
                }
                Some(CombinedFunction::new(ck, a.clone(), b.clone())?)
            }
            (PlayerInputs::Local(_), None) => None,
            _ => {
                return Err(Error::Incompatible(format!(
                    "player inputs do not match kind {kind}"
                )))
            }
        };
        Ok(BrouwerInstance {
            kind,
            norm,
            epsilon,
            lambda_a,
            lambda_b,
            inputs,
            combined,
        })
    }

    /// Convenience constructor for the map-based kinds.
    pub fn from_maps(
        kind: ProblemKind,
        norm: NormKind,
        epsilon: f64,
        (a, lambda_a): (Map, f64),
        (b, lambda_b): (Map, f64),
    ) -> Result<Self> {
        BrouwerInstance::new(
            kind,
            norm,
            epsilon,
            lambda_a,
            lambda_b,
            PlayerInputs::Maps { a, b },
        )
    }

    /// Dimension `n` of the cube on which a fixed point is sought.
    pub fn dim(&self) -> usize {
        match &self.inputs {
            PlayerInputs::Maps { a, .. } => a.in_dim(),
            PlayerInputs::Local(fam) => fam.dim(),
        }
    }

    pub fn maps(&self) -> Option<(&Map, &Map)> {
        match &self.inputs {
            PlayerInputs::Maps { a, b } => Some((a, b)),
            PlayerInputs::Local(_) => None,
        }
    }

    pub fn combined(&self) -> Option<&CombinedFunction> {
        self.combined.as_ref()
    }

    pub fn family(&self) -> Option<&LocalFamily> {
        match &self.inputs {
            PlayerInputs::Local(f) => Some(f),
            PlayerInputs::Maps { .. } => None,
        }
    }

    /// Lipschitz bound of the combined self-map implied by the player
    /// bounds: `l_A l_B` (Comp), `||(l_A, l_B)||_p` (Concat), `(l_A + l_B)/2`
    /// (Mean), and the family bound `l_A` for Local.
    pub fn combined_lambda(&self) -> f64 {
        match self.kind {
            ProblemKind::Comp => self.lambda_a * self.lambda_b,
            ProblemKind::Concat => self.norm.pair(self.lambda_a, self.lambda_b),
            ProblemKind::Mean => (self.lambda_a + self.lambda_b) / 2.0,
            ProblemKind::Local => self.lambda_a,
        }
    }

    /// The self-map whose approximate fixed points solve the instance.
    pub fn image(&self, x: &[f64]) -> Vec<f64> {
        match (&self.combined, &self.inputs) {
            (Some(c), _) => c.apply(x),
            (None, PlayerInputs::Local(fam)) => fam.apply(x),
            (None, PlayerInputs::Maps { .. }) => unreachable!("map instances always combine"),
        }
    }

    /// `||f(x) - x||_p` for the instance's self-map `f`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        distance(&self.image(x), x, self.norm)
    }

    /// Same instance with a different target epsilon.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        BrouwerInstance::new(
            self.kind,
            self.norm,
            epsilon,
            self.lambda_a,
            self.lambda_b,
            self.inputs.clone(),
        )
    }
}

fn certify(map: &Map, lambda: f64, who: &str) -> Result<()> {
    map.validate()?;
    if let Map::Anchor(f) = map {
        if f.lambda() > lambda + crate::DEFAULT_TOL {
            return Err(Error::InvalidParameter(format!(
                "{who} is built {}-Lipschitz but declared {lambda}-Lipschitz",
                f.lambda()
            )));
        }
    }
    Ok(())
}

/// Referee verdict on a claimed solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub ok: bool,
    #[serde(with = "exact")]
    pub residual: f64,
    #[serde(with = "exact")]
    pub epsilon: f64,
}

/// Recomputes the residual of `x` with both players' inputs in hand and
/// compares it to `epsilon` with absolute tolerance `tol`.
pub fn verify_solution(
    inst: &BrouwerInstance,
    x: &Point,
    epsilon: f64,
    tol: f64,
) -> Result<Verdict> {
    if x.dim() != inst.dim() {
        return Err(Error::Dimension {
            expected: inst.dim(),
            got: x.dim(),
        });
    }
    let residual = inst.residual(x.coords());
    Ok(Verdict {
        ok: residual <= epsilon + tol,
        residual,
        epsilon,
    })
}
