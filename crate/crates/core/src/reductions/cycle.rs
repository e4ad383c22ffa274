use super::local::MAX_LOCALITY;
use super::{Backmap, EpsilonMap, ReductionKind, ReductionRecord};
use crate::error::{Error, Result};
use crate::functions::{Evaluate, Map};
use crate::protocols::{BrouwerInstance, ProblemKind};

fn expect_kind(src: &BrouwerInstance, kind: ProblemKind) -> Result<()> {
    if src.kind != kind {
        return Err(Error::Incompatible(format!(
            "expected a {kind} instance, got {}",
            src.kind
        )));
    }
    Ok(())
}

fn player_maps(src: &BrouwerInstance) -> (Map, Map) {
    let (a, b) = src.maps().expect("map-based kind");
    (a.clone(), b.clone())
}

/// Concat to Mean: `g_A(x) = (f_A(x), x_2)`, `g_B(x) = (x_1, f_B(x))`.
///
/// `g_Mean(x) - x` is exactly half of `f_Concat(x) - x`, so the target is
/// posed at `epsilon / 2` and solutions map back unchanged.
pub fn concat_to_mean(src: &BrouwerInstance) -> Result<ReductionRecord> {
    expect_kind(src, ProblemKind::Concat)?;
    let n = src.dim();
    if n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("odd dimension {n}")));
    }
    let h = n / 2;
    let (f_a, f_b) = player_maps(src);
    let g_a = Map::stack(vec![f_a, Map::block(n, h, h)]);
    let g_b = Map::stack(vec![Map::block(n, 0, h), f_b]);
    let eps = EpsilonMap::linear(2.0);
    let target = BrouwerInstance::from_maps(
        ProblemKind::Mean,
        src.norm,
        eps.target_epsilon(src.epsilon),
        (g_a, src.lambda_a + 1.0),
        (g_b, src.lambda_b + 1.0),
    )?;
    Ok(ReductionRecord {
        steps: vec![ReductionKind::ConcatToMean],
        source: src.clone(),
        target,
        backmap: Backmap::Identity,
        epsilon_map: eps,
    })
}

/// Mean to Comp: `g_A(x) = (f_A(x)/2, x)`, `g_B(x_1, x_2) = x_1 + f_B(x_2)/2`.
///
/// `g_B` is clamped into the cube; on the image of `g_A` the clamp is
/// inactive and `g_B(g_A(x)) = f_Mean(x)` for every `x`.
pub fn mean_to_comp(src: &BrouwerInstance) -> Result<ReductionRecord> {
    expect_kind(src, ProblemKind::Mean)?;
    let n = src.dim();
    let (f_a, f_b) = player_maps(src);
    let g_a = Map::stack(vec![Map::scale(0.5, f_a), Map::identity(n)]);
    let g_b = Map::clamp(Map::sum(vec![
        Map::block(2 * n, 0, n),
        Map::then(Map::block(2 * n, n, n), Map::scale(0.5, f_b)),
    ]));
    let target = BrouwerInstance::from_maps(
        ProblemKind::Comp,
        src.norm,
        src.epsilon,
        (g_a, src.lambda_a / 2.0 + 1.0),
        (g_b, src.lambda_b + 2.0),
    )?;
    Ok(ReductionRecord {
        steps: vec![ReductionKind::MeanToComp],
        source: src.clone(),
        target,
        backmap: Backmap::Identity,
        epsilon_map: EpsilonMap::IDENTITY,
    })
}

/// Comp to Concat on `[0,1]^{2(n+m)}` with blocks `(a, x_1, b, x_2)` of sizes
/// `n, m, m, n`: `g_A = (a, f_A(x_2))` and `g_B = (b, f_B(x_1))`.
///
/// A target solution at `e` yields `x_2` with source residual at most
/// `2 e (1 + c)(lambda_B + 1)` for any `c >= max(m/n, n/m)`.
pub fn comp_to_concat(src: &BrouwerInstance, c: f64) -> Result<ReductionRecord> {
    expect_kind(src, ProblemKind::Comp)?;
    let (f_a, f_b) = player_maps(src);
    let n = f_a.in_dim();
    let m = f_a.out_dim();
    let ratio = (m as f64 / n as f64).max(n as f64 / m as f64);
    if !(c >= ratio) {
        return Err(Error::InvalidParameter(format!(
            "c = {c} must be at least max(m/n, n/m) = {ratio}"
        )));
    }
    let dim = 2 * (n + m);
    let (a, x1, b, x2) = (0, n, n + m, n + 2 * m);
    let g_a = Map::stack(vec![
        Map::block(dim, a, n),
        Map::then(Map::block(dim, x2, n), f_a),
    ]);
    let g_b = Map::stack(vec![
        Map::block(dim, b, m),
        Map::then(Map::block(dim, x1, m), f_b),
    ]);
    // The stated 4(lambda + 1) covers balanced dimensions; for lopsided ones
    // the block-norm bookkeeping gives 2^{1/p} + lambda (2m/n)^{1/p}.
    let p = src.norm;
    let lam_a = (4.0 * (src.lambda_a + 1.0))
        .max(p.root(2.0) + src.lambda_a * p.root(2.0 * m as f64 / n as f64));
    let lam_b = (4.0 * (src.lambda_b + 1.0))
        .max(p.root(2.0) + src.lambda_b * p.root(2.0 * n as f64 / m as f64));
    let eps = EpsilonMap::linear(2.0 * (1.0 + c) * (src.lambda_b + 1.0));
    let target = BrouwerInstance::from_maps(
        ProblemKind::Concat,
        p,
        eps.target_epsilon(src.epsilon),
        (g_a, lam_a),
        (g_b, lam_b),
    )?;
    Ok(ReductionRecord {
        steps: vec![ReductionKind::CompToConcat],
        source: src.clone(),
        target,
        backmap: Backmap::Block { start: x2, len: n },
        epsilon_map: eps,
    })
}

/// Local to Comp: A encodes `z` as all `2^r` candidate values of `f'` plus
/// `z` itself; B selects the block named by its own bits. The composition
/// equals `f_{x,y}` pointwise.
///
/// Target bounds: `max(lambda, 1)` for A (the trailing `z` block is
/// 1-Lipschitz) and `(2^r + 1)^{1/p} (lambda + 1)` for B.
pub fn local_to_comp(src: &BrouwerInstance) -> Result<ReductionRecord> {
    expect_kind(src, ProblemKind::Local)?;
    let fam = src.family().expect("local kind carries a family");
    let r = fam.public().locality();
    if r > MAX_LOCALITY {
        return Err(Error::SizeOverflow(format!(
            "locality {r} > {MAX_LOCALITY}"
        )));
    }
    let lambda = src.lambda_a;
    let blocks = ((1u64 << r) + 1) as f64;
    let target = BrouwerInstance::from_maps(
        ProblemKind::Comp,
        src.norm,
        src.epsilon,
        (Map::LocalEncode(fam.encoder()), lambda.max(1.0)),
        (
            Map::LocalSelect(fam.selector()),
            src.norm.root(blocks) * (lambda + 1.0),
        ),
    )?;
    Ok(ReductionRecord {
        steps: vec![ReductionKind::LocalToComp],
        source: src.clone(),
        target,
        backmap: Backmap::Identity,
        epsilon_map: EpsilonMap::IDENTITY,
    })
}
