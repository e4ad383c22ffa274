use super::channel::{Bits, Channel, Declared, Party, Transcript};
use super::instance::{BrouwerInstance, ProblemKind};
use crate::error::{Error, Result};
use crate::functions::Evaluate;
use crate::numerics::{distance, grid_points, GridSpec, Point};

/// Default precision of quantized real-valued messages.
pub const DEFAULT_BITS_PER_COORD: u32 = 16;

/// Largest grid the protocol will walk.
pub const MAX_GRID_POINTS: u64 = 50_000_000;

/// `(lambda_combined + 1) * alpha <= 2 * epsilon`: an exact fixed point lies
/// within `alpha / 2` of some grid point in every coordinate, so that grid
/// point has residual at most `(lambda + 1) * alpha / 2`.
pub fn total_regime_check(lambda_combined: f64, alpha: f64, epsilon: f64) -> bool {
    (lambda_combined + 1.0) * alpha <= 2.0 * epsilon
}

/// Fixed-point binary quantizer for values in `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quantizer {
    bits: u32,
}

impl Quantizer {
    pub fn new(bits: u32) -> Result<Self> {
        if !(1..=32).contains(&bits) {
            return Err(Error::InvalidParameter(format!(
                "bits_per_coord {bits} outside 1..=32"
            )));
        }
        Ok(Quantizer { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    fn levels(&self) -> f64 {
        ((1u64 << self.bits) - 1) as f64
    }

    pub fn encode(&self, v: f64) -> u64 {
        (v.clamp(0.0, 1.0) * self.levels()).round() as u64
    }

    pub fn decode(&self, code: u64) -> f64 {
        code as f64 / self.levels()
    }

    /// Upper bound `2^-bits` on the per-value rounding error.
    pub fn error_bound(&self) -> f64 {
        (-(self.bits as f64)).exp2()
    }

    fn write(&self, out: &mut Bits, values: &[f64]) {
        for &v in values {
            out.push_uint(self.encode(v), self.bits);
        }
    }

    fn read(&self, msg: &Bits, count: usize) -> Result<Vec<f64>> {
        (0..count)
            .map(|i| Ok(self.decode(msg.read_uint(i * self.bits as usize, self.bits)?)))
            .collect()
    }
}

/// Amount by which B's acceptance test may misjudge the true residual
/// because of quantized messages: `lambda_B 2^-b` (Comp), `2^-b / 2`
/// (Mean), `2^-b` (Concat).
pub fn quantization_slack(inst: &BrouwerInstance, bits_per_coord: u32) -> Result<f64> {
    let e = Quantizer::new(bits_per_coord)?.error_bound();
    match inst.kind {
        ProblemKind::Comp => Ok(inst.lambda_b * e),
        ProblemKind::Mean => Ok(e / 2.0),
        ProblemKind::Concat => Ok(e),
        ProblemKind::Local => Err(Error::Incompatible(
            "the grid protocol runs on comp, concat and mean instances".into(),
        )),
    }
}

/// Whether a run on `spec` is guaranteed to accept some grid point.
///
/// B tests against `epsilon - slack`, and its estimate can exceed the true
/// residual by another `slack`, so the regime condition is applied with the
/// budget `epsilon - 2 * slack`.
pub fn grid_guarantee(
    inst: &BrouwerInstance,
    spec: &GridSpec,
    bits_per_coord: u32,
) -> Result<bool> {
    let slack = quantization_slack(inst, bits_per_coord)?;
    let budget = inst.epsilon - 2.0 * slack;
    Ok(budget >= 0.0 && total_regime_check(inst.combined_lambda(), spec.alpha(), budget))
}

/// Result of a grid protocol run. Failure is an ordinary outcome.
#[derive(Debug, Clone, PartialEq)]
pub enum GridOutcome {
    Accepted {
        point: Point,
        candidates: u64,
        transcript: Transcript,
    },
    NoGridPointAccepted {
        candidates: u64,
        transcript: Transcript,
    },
}

impl GridOutcome {
    pub fn transcript(&self) -> &Transcript {
        match self {
            GridOutcome::Accepted { transcript, .. }
            | GridOutcome::NoGridPointAccepted { transcript, .. } => transcript,
        }
    }

    pub fn point(&self) -> Option<&Point> {
        match self {
            GridOutcome::Accepted { point, .. } => Some(point),
            GridOutcome::NoGridPointAccepted { .. } => None,
        }
    }

    pub fn candidates(&self) -> u64 {
        match self {
            GridOutcome::Accepted { candidates, .. }
            | GridOutcome::NoGridPointAccepted { candidates, .. } => *candidates,
        }
    }

    pub fn is_accepted(&self) -> bool {
        self.point().is_some()
    }
}

/// Grid search with spacing `alpha` (which must be `1/steps`).
pub fn run_grid_protocol(
    inst: &BrouwerInstance,
    alpha: f64,
    bits_per_coord: u32,
) -> Result<GridOutcome> {
    let spec = GridSpec::new(inst.dim(), alpha)?;
    run_grid_protocol_on(inst, &spec, bits_per_coord)
}

/// Walks the grid in lexicographic order. Per candidate `z`, A sends one
/// quantized message and B answers one accept bit:
///
/// * Comp: A sends `f_A(z)`; B accepts iff `||f_B(q) - z|| <= eps - slack`.
/// * Mean: A sends `f_A(z)`; B accepts iff `||(q + f_B(z))/2 - z|| <= eps - slack`.
/// * Concat: A sends the scalar `||f_A(z) - z_1||`; B combines it with its
///   own half `||f_B(z) - z_2||` through the two-entry normalized norm, which
///   equals the full residual.
pub fn run_grid_protocol_on(
    inst: &BrouwerInstance,
    spec: &GridSpec,
    bits_per_coord: u32,
) -> Result<GridOutcome> {
    let quant = Quantizer::new(bits_per_coord)?;
    let slack = quantization_slack(inst, bits_per_coord)?;
    let (f_a, f_b) = inst
        .maps()
        .ok_or_else(|| Error::Incompatible("grid protocol needs player maps".into()))?;
    if spec.dim != inst.dim() {
        return Err(Error::Dimension {
            expected: inst.dim(),
            got: spec.dim,
        });
    }
    match spec.count() {
        Some(c) if c <= MAX_GRID_POINTS => {}
        _ => {
            return Err(Error::SizeOverflow(format!(
                "grid with {} points per axis in dimension {}",
                spec.points_per_axis(),
                spec.dim
            )))
        }
    }
    let threshold = inst.epsilon - slack;
    let norm = inst.norm;
    let n = inst.dim();
    let half = n / 2;
    let mut channel = Channel::new();
    let mut candidates = 0u64;

    for z in grid_points(spec) {
        candidates += 1;
        let zc = z.coords();
        // Player A.
        let mut msg = Bits::new();
        let sent = match inst.kind {
            ProblemKind::Comp | ProblemKind::Mean => f_a.apply(zc),
            ProblemKind::Concat => vec![distance(&f_a.apply(zc), &zc[..half], norm)],
            ProblemKind::Local => unreachable!("rejected by quantization_slack"),
        };
        quant.write(&mut msg, &sent);
        let delivered = channel.send(Party::A, msg);
        // Player B.
        let q = quant.read(delivered, sent.len())?;
        let estimate = match inst.kind {
            ProblemKind::Comp => distance(&f_b.apply(&q), zc, norm),
            ProblemKind::Mean => {
                let fb = f_b.apply(zc);
                let mean: Vec<f64> = q.iter().zip(&fb).map(|(a, b)| (a + b) / 2.0).collect();
                distance(&mean, zc, norm)
            }
            ProblemKind::Concat => {
                let rho_b = distance(&f_b.apply(zc), &zc[half..], norm);
                norm.pair(q[0], rho_b)
            }
            ProblemKind::Local => unreachable!(),
        };
        let accept = estimate <= threshold;
        channel.send(Party::B, std::iter::once(accept).collect());
        if accept {
            let transcript = channel.finish(Declared::Point {
                coords: zc.to_vec(),
            });
            return Ok(GridOutcome::Accepted {
                point: z,
                candidates,
                transcript,
            });
        }
    }
    Ok(GridOutcome::NoGridPointAccepted {
        candidates,
        transcript: channel.finish(Declared::None),
    })
}
