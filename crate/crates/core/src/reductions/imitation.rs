use crate::error::{Error, Result};
use crate::functions::Evaluate;
use crate::numerics::{distance, grid_points, GridSpec, NormKind, Point};
use crate::protocols::{BrouwerInstance, ProblemKind};
use serde::{Deserialize, Serialize};

/// Largest number of pure profiles a game may have.
pub const MAX_PROFILES: u64 = 1_000_000;

/// The imitation game of a Comp instance on `alpha`-grids.
///
/// A plays `x` in the `n`-dimensional grid, B plays `y` in the
/// `m`-dimensional grid, `u_A(x, y) = -||f_A(x) - y||^2` and
/// `u_B(x, y) = -||x - f_B(y)||^2` in the normalized Euclidean norm.
/// Utilities are recomputed from the source maps, never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameRepr", into = "GameRepr")]
pub struct ImitationGame {
    source: BrouwerInstance,
    grid_a: GridSpec,
    grid_b: GridSpec,
}

#[derive(Clone, Serialize, Deserialize)]
struct GameRepr {
    format: u32,
    steps: u32,
    n: usize,
    m: usize,
    profiles: u64,
    source: BrouwerInstance,
}

impl TryFrom<GameRepr> for ImitationGame {
    type Error = Error;

    fn try_from(r: GameRepr) -> Result<Self> {
        if r.format != crate::FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported game format {}",
                r.format
            )));
        }
        let g = build(r.source, r.steps)?;
        if g.grid_a.dim != r.n || g.grid_b.dim != r.m {
            return Err(Error::Format(
                "game dimensions disagree with the source".into(),
            ));
        }
        Ok(g)
    }
}

impl From<ImitationGame> for GameRepr {
    fn from(g: ImitationGame) -> Self {
        GameRepr {
            format: crate::FORMAT_VERSION,
            steps: g.grid_a.steps,
            n: g.grid_a.dim,
            m: g.grid_b.dim,
            profiles: g.profile_count(),
            source: g.source,
        }
    }
}

/// A pure strategy profile on the game's grids.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    /// `x_rank * |Y| + y_rank` in lexicographic grid order.
    pub index: u64,
    pub x: Point,
    pub y: Point,
    pub u_a: f64,
    pub u_b: f64,
    /// Largest gain either player gets from a unilateral deviation.
    pub regret: f64,
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    let d = distance(a, b, NormKind::L2);
    d * d
}

fn build(source: BrouwerInstance, steps: u32) -> Result<ImitationGame> {
    if source.kind != ProblemKind::Comp {
        return Err(Error::Incompatible(
            "imitation games come from comp instances".into(),
        ));
    }
    if source.norm != NormKind::L2 {
        return Err(Error::Incompatible(
            "imitation games use the Euclidean norm".into(),
        ));
    }
    let (f_a, _) = source.maps().expect("comp instances carry maps");
    let grid_a = GridSpec::with_steps(f_a.in_dim(), steps)?;
    let grid_b = GridSpec::with_steps(f_a.out_dim(), steps)?;
    let count = grid_a
        .count()
        .zip(grid_b.count())
        .and_then(|(a, b)| a.checked_mul(b));
    match count {
        Some(c) if c <= MAX_PROFILES => Ok(ImitationGame {
            source,
            grid_a,
            grid_b,
        }),
        _ => Err(Error::SizeOverflow(format!(
            "more than {MAX_PROFILES} profiles at alpha = 1/{steps}"
        ))),
    }
}

/// Builds the imitation game of `src` with action grids of spacing `alpha`.
pub fn comp_to_imitation_game(src: &BrouwerInstance, alpha: f64) -> Result<ImitationGame> {
    let steps = GridSpec::new(1, alpha)?.steps;
    build(src.clone(), steps)
}

impl ImitationGame {
    pub fn source(&self) -> &BrouwerInstance {
        &self.source
    }

    pub fn alpha(&self) -> f64 {
        self.grid_a.alpha()
    }

    pub fn grid_a(&self) -> &GridSpec {
        &self.grid_a
    }

    pub fn grid_b(&self) -> &GridSpec {
        &self.grid_b
    }

    pub fn profile_count(&self) -> u64 {
        self.grid_a.count().unwrap() * self.grid_b.count().unwrap()
    }

    pub fn u_a(&self, x: &[f64], y: &[f64]) -> f64 {
        let (f_a, _) = self.source.maps().unwrap();
        -sq(&f_a.apply(x), y)
    }

    pub fn u_b(&self, x: &[f64], y: &[f64]) -> f64 {
        let (_, f_b) = self.source.maps().unwrap();
        -sq(x, &f_b.apply(y))
    }

    /// Regret of the profile `(x, y)` against deviations on the grids.
    pub fn regret(&self, x: &[f64], y: &[f64]) -> f64 {
        let (f_a, f_b) = self.source.maps().unwrap();
        let fby = f_b.apply(y);
        let best_a = grid_points(&self.grid_a)
            .map(|xx| -sq(&f_a.apply(xx.coords()), y))
            .fold(f64::NEG_INFINITY, f64::max);
        let best_b = grid_points(&self.grid_b)
            .map(|yy| -sq(x, &f_b.apply(yy.coords())))
            .fold(f64::NEG_INFINITY, f64::max);
        let ra = best_a - (-sq(&f_a.apply(x), y));
        let rb = best_b - (-sq(x, &fby));
        ra.max(rb)
    }
}

/// Every pure profile whose regret is at most `eps_regret`, by index.
pub fn enumerate_approx_pure_nash(game: &ImitationGame, eps_regret: f64) -> Vec<Profile> {
    let (f_a, f_b) = game.source.maps().unwrap();
    let xs: Vec<Point> = grid_points(&game.grid_a).collect();
    let ys: Vec<Point> = grid_points(&game.grid_b).collect();
    let fa: Vec<Vec<f64>> = xs.iter().map(|x| f_a.apply(x.coords())).collect();
    let fb: Vec<Vec<f64>> = ys.iter().map(|y| f_b.apply(y.coords())).collect();
    // u_a[i][j] and u_b[i][j] for x_i, y_j.
    let u_a: Vec<Vec<f64>> = fa
        .iter()
        .map(|v| ys.iter().map(|y| -sq(v, y.coords())).collect())
        .collect();
    let u_b: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| fb.iter().map(|w| -sq(x.coords(), w)).collect())
        .collect();
    let best_a: Vec<f64> = (0..ys.len())
        .map(|j| {
            u_a.iter()
                .map(|row| row[j])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let best_b: Vec<f64> = u_b
        .iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let mut out = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            let regret = (best_a[j] - u_a[i][j]).max(best_b[i] - u_b[i][j]);
            if regret <= eps_regret {
                out.push(Profile {
                    index: (i * ys.len() + j) as u64,
                    x: x.clone(),
                    y: y.clone(),
                    u_a: u_a[i][j],
                    u_b: u_b[i][j],
                    regret,
                });
            }
        }
    }
    out
}

/// The `x` part of a profile.
pub fn nash_profile_to_point(profile: &Profile) -> Point {
    profile.x.clone()
}
