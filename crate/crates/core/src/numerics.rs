//! Normalized norms, points of the unit cube and uniform grids.
//!
//! Norms here carry the averaging factor: for finite `p` the norm of an
//! `n`-vector is `((1/n) * sum |x_i|^p)^(1/p)`. Consequently the all-ones
//! vector has norm 1 in every dimension and for every `p`.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Which normalized norm to use: a finite `p >= 1` or the max norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    P(f64),
    Inf,
}

impl NormKind {
    pub const L2: NormKind = NormKind::P(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(NormKind::Inf)
        } else if p.is_finite() && p >= 1.0 {
            Ok(NormKind::P(p))
        } else {
            Err(Error::InvalidParameter(format!(
                "norm exponent {p} must be >= 1"
            )))
        }
    }

    /// `p` as a real, with `f64::INFINITY` for the max norm.
    pub fn exponent(self) -> f64 {
        match self {
            NormKind::P(p) => p,
            NormKind::Inf => f64::INFINITY,
        }
    }

    /// `r^(1/p)`, which is 1 for the max norm.
    pub fn root(self, r: f64) -> f64 {
        match self {
            NormKind::P(p) => r.powf(1.0 / p),
            NormKind::Inf => 1.0,
        }
    }

    /// Normalized norm of the 2-vector `(a, b)`.
    pub fn pair(self, a: f64, b: f64) -> f64 {
        normalized_norm_unchecked(&[a, b], self)
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::P(p) => write!(f, "{p}"),
            NormKind::Inf => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "INF" | "max" => Ok(NormKind::Inf),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad norm {other:?}")))?;
                NormKind::new(p)
            }
        }
    }
}

impl Serialize for NormKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormKind::P(p) => s.serialize_f64(*p),
            NormKind::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for NormKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = crate::exact::deserialize(d)?;
        NormKind::new(p).map_err(serde::de::Error::custom)
    }
}

/// Normalized norm of `x`.
pub fn normalized_norm(x: &[f64], p: NormKind) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Empty);
    }
    Ok(normalized_norm_unchecked(x, p))
}

pub(crate) fn normalized_norm_unchecked(x: &[f64], p: NormKind) -> f64 {
    match p {
        NormKind::Inf => x.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        NormKind::P(1.0) => x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64,
        NormKind::P(2.0) => (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt(),
        NormKind::P(p) => {
            (x.iter().map(|v| v.abs().powf(p)).sum::<f64>() / x.len() as f64).powf(1.0 / p)
        }
    }
}

/// Normalized norm of `a - b`. Panics in debug builds on length mismatch.
pub fn distance(a: &[f64], b: &[f64], p: NormKind) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    match p {
        NormKind::Inf => a
            .iter()
            .zip(b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs())),
        NormKind::P(2.0) => {
            (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n).sqrt()
        }
        NormKind::P(1.0) => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / n,
        NormKind::P(p) => (a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs().powf(p))
            .sum::<f64>()
            / n)
            .powf(1.0 / p),
    }
}

/// A point of the unit cube `[0,1]^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct Point {
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct PointRepr(#[serde(with = "crate::exact::vec")] Vec<f64>);

impl TryFrom<PointRepr> for Point {
    type Error = Error;

    fn try_from(r: PointRepr) -> Result<Self> {
        Point::new(r.0)
    }
}

impl From<Point> for PointRepr {
    fn from(p: Point) -> Self {
        PointRepr(p.coords)
    }
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in coords.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfCube { index, value });
            }
        }
        Ok(Point { coords })
    }

    /// Builds a point after clamping every coordinate into `[0,1]`.
    pub fn clamped(mut coords: Vec<f64>) -> Result<Self> {
        for c in &mut coords {
            if c.is_nan() {
                return Err(Error::InvalidParameter("NaN coordinate".into()));
            }
            *c = c.clamp(0.0, 1.0);
        }
        Point::new(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point {
            coords: vec![0.0; dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

/// The uniform grid `{0, alpha, 2 alpha, ..., 1}^dim`.
///
/// The spacing is stored as an integer step count so that `1` is always a
/// grid value; with that, every point of the cube lies within `alpha / 2` of
/// the grid in each coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub steps: u32,
}

impl GridSpec {
    /// Grid with `steps` intervals per axis (spacing `1/steps`).
    pub fn with_steps(dim: usize, steps: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "grid dimension must be positive".into(),
            ));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter(
                "grid needs at least one step".into(),
            ));
        }
        Ok(GridSpec { dim, steps })
    }

    /// Grid with spacing `alpha`, which must divide 1.
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha {alpha} outside (0,1]"
            )));
        }
        let inv = 1.0 / alpha;
        let steps = inv.round();
        if (inv - steps).abs() > 1e-9 * inv.max(1.0) || steps > u32::MAX as f64 {
            return Err(Error::InvalidParameter(format!(
                "alpha {alpha} must be the reciprocal of an integer"
            )));
        }
        GridSpec::with_steps(dim, steps as u32)
    }

    /// Coarsest spacing `1/steps` with `(lambda + 1) * alpha <= 2 * budget`.
    pub fn fitting(dim: usize, lambda: f64, budget: f64) -> Result<Self> {
        if !(budget > 0.0) || !(lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cannot fit a grid for lambda {lambda}, budget {budget}"
            )));
        }
        let steps = ((lambda + 1.0) / (2.0 * budget)).ceil().max(1.0);
        if steps > u32::MAX as f64 {
            return Err(Error::SizeOverflow(format!("{steps} grid steps")));
        }
        GridSpec::with_steps(dim, steps as u32)
    }

    pub fn alpha(&self) -> f64 {
        1.0 / self.steps as f64
    }

    pub fn points_per_axis(&self) -> u64 {
        self.steps as u64 + 1
    }

    /// Total number of grid points, or `None` on overflow.
    pub fn count(&self) -> Option<u64> {
        let mut c: u64 = 1;
        for _ in 0..self.dim {
            c = c.checked_mul(self.points_per_axis())?;
        }
        Some(c)
    }

    pub fn value(&self, index: u32) -> f64 {
        index as f64 / self.steps as f64
    }

    /// Grid point with the given per-axis indices.
    pub fn point(&self, indices: &[u32]) -> Point {
        Point {
            coords: indices.iter().map(|&i| self.value(i)).collect(),
        }
    }

    /// Per-axis indices of the `rank`-th point in lexicographic order.
    pub fn indices_of(&self, mut rank: u64) -> Vec<u32> {
        let base = self.points_per_axis();
        let mut idx = vec![0u32; self.dim];
        for slot in idx.iter_mut().rev() {
            *slot = (rank % base) as u32;
            rank /= base;
        }
        idx
    }
}

/// Enumerates the grid in lexicographic order (first coordinate slowest).
pub fn grid_points(spec: &GridSpec) -> GridIter {
    GridIter {
        spec: *spec,
        next: Some(vec![0; spec.dim]),
    }
}

/// Iterator returned by [`grid_points`].
#[derive(Debug, Clone)]
pub struct GridIter {
    spec: GridSpec,
    next: Option<Vec<u32>>,
}

impl Iterator for GridIter {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        let current = self.next.take()?;
        let point = self.spec.point(&current);
        let mut succ = current;
        let mut axis = succ.len();
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            if succ[axis] < self.spec.steps {
                succ[axis] += 1;
                self.next = Some(succ);
                break;
            }
            succ[axis] = 0;
        }
        Some(point)
    }
}

/// Nearest grid point, coordinate by coordinate. Exact ties round toward the
/// smaller grid value.
pub fn nearest_grid(x: &Point, spec: &GridSpec) -> Result<Point> {
    if x.dim() != spec.dim {
        return Err(Error::Dimension {
            expected: spec.dim,
            got: x.dim(),
        });
    }
    Ok(spec.point(&nearest_grid_indices(x.coords(), spec)))
}

pub(crate) fn nearest_grid_indices(x: &[f64], spec: &GridSpec) -> Vec<u32> {
    let steps = spec.steps as f64;
    x.iter()
        .map(|&v| {
            let t = v * steps;
            let lo = t.floor();
            let j = if t - lo > 0.5 { lo + 1.0 } else { lo };
            j.clamp(0.0, steps) as u32
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn norm_examples() {
        let v = normalized_norm(&[1.0, 0.0], NormKind::L2).unwrap();
        assert!(close(v, 0.5f64.sqrt()));
        assert_eq!(
            normalized_norm(&[0.5, 0.5, 0.5], NormKind::Inf).unwrap(),
            0.5
        );
        for len in [1usize, 2, 7, 30] {
            for p in [
                NormKind::P(1.0),
                NormKind::P(1.5),
                NormKind::L2,
                NormKind::P(7.0),
                NormKind::Inf,
            ] {
                assert!(close(normalized_norm(&vec![1.0; len], p).unwrap(), 1.0));
            }
        }
    }

    #[test]
    fn empty_vector_is_a_dimension_error() {
        assert_eq!(normalized_norm(&[], NormKind::L2), Err(Error::Empty));
    }

    #[test]
    fn norm_kind_parsing() {
        assert_eq!("inf".parse::<NormKind>().unwrap(), NormKind::Inf);
        assert_eq!("2".parse::<NormKind>().unwrap(), NormKind::L2);
        assert!("0.5".parse::<NormKind>().is_err());
        let json = serde_json::to_string(&NormKind::Inf).unwrap();
        assert_eq!(
            serde_json::from_str::<NormKind>(&json).unwrap(),
            NormKind::Inf
        );
        assert_eq!(serde_json::from_str::<NormKind>("2").unwrap(), NormKind::L2);
    }

    #[test]
    fn grid_examples() {
        let g = GridSpec::new(1, 1.0).unwrap();
        let pts: Vec<_> = grid_points(&g).map(Point::into_coords).collect();
        assert_eq!(pts, vec![vec![0.0], vec![1.0]]);

        let g = GridSpec::new(1, 0.5).unwrap();
        let pts: Vec<_> = grid_points(&g).map(Point::into_coords).collect();
        assert_eq!(pts, vec![vec![0.0], vec![0.5], vec![1.0]]);
        // (1 + 2/delta)^n with delta = 1, n = 1
        assert_eq!(g.count(), Some(3));

        let g = GridSpec::new(2, 0.5).unwrap();
        assert_eq!(grid_points(&g).count(), 9);
        assert_eq!(g.count(), Some(9));
    }

    #[test]
    fn grid_order_is_lexicographic() {
        let g = GridSpec::with_steps(3, 2).unwrap();
        let pts: Vec<_> = grid_points(&g).map(Point::into_coords).collect();
        for w in pts.windows(2) {
            assert!(w[0] < w[1]);
        }
        for (rank, p) in pts.iter().enumerate() {
            assert_eq!(&g.point(&g.indices_of(rank as u64)).into_coords(), p);
        }
    }

    #[test]
    fn alpha_must_divide_one() {
        assert!(GridSpec::new(1, 0.35).is_err());
        assert!(GridSpec::new(1, 0.0).is_err());
        assert_eq!(GridSpec::new(2, 0.1).unwrap().steps, 10);
    }

    #[test]
    fn nearest_grid_examples() {
        let g = GridSpec::new(1, 0.5).unwrap();
        let p = |v: f64| Point::new(vec![v]).unwrap();
        assert_eq!(nearest_grid(&p(0.26), &g).unwrap(), p(0.5));
        assert_eq!(nearest_grid(&p(0.25), &g).unwrap(), p(0.0));
        for v in [0.0, 0.5, 1.0] {
            assert_eq!(nearest_grid(&p(v), &g).unwrap(), p(v));
        }
        assert!(nearest_grid(&Point::origin(2), &g).is_err());
    }

    #[test]
    fn points_reject_coordinates_outside_the_cube() {
        assert!(Point::new(vec![0.5, 1.5]).is_err());
        assert!(Point::new(vec![]).is_err());
        assert_eq!(
            Point::clamped(vec![-0.2, 1.3]).unwrap().coords(),
            &[0.0, 1.0]
        );
    }

    fn unit_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0f64..=1.0, len)
    }

    fn blocks() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>)> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, n)| (Just(n), unit_vec(r * n), unit_vec(r * n)))
    }

    fn norms() -> impl Strategy<Value = NormKind> {
        prop_oneof![Just(NormKind::Inf), (1.0f64..6.0).prop_map(NormKind::P),]
    }

    proptest! {
        #[test]
        fn norms_are_monotone_in_p(x in unit_vec(6), p in 1.0f64..4.0, dp in 0.0f64..4.0) {
            let lo = normalized_norm(&x, NormKind::P(p)).unwrap();
            let hi = normalized_norm(&x, NormKind::P(p + dp)).unwrap();
            let max = normalized_norm(&x, NormKind::Inf).unwrap();
            prop_assert!(lo <= hi + 1e-12);
            prop_assert!(hi <= max + 1e-12);
        }

        #[test]
        fn block_norms_dominate_whole_norm((n, x, y) in blocks(), p in norms()) {
            let whole = distance(&x, &y, p);
            let sum: f64 = x.chunks(n).zip(y.chunks(n)).map(|(a, b)| distance(a, b, p)).sum();
            prop_assert!(sum + 1e-12 >= whole);
        }

        #[test]
        fn single_block_is_bounded_by_scaled_whole((n, x, y) in blocks(), p in norms()) {
            let r = (x.len() / n) as f64;
            let whole = distance(&x, &y, p);
            for (a, b) in x.chunks(n).zip(y.chunks(n)) {
                prop_assert!(distance(a, b, p) <= p.root(r) * whole + 1e-12);
            }
        }

        #[test]
        fn nearest_grid_is_within_half_a_step(x in unit_vec(3), steps in 1u32..40) {
            let g = GridSpec::with_steps(3, steps).unwrap();
            let pt = Point::new(x).unwrap();
            let y = nearest_grid(&pt, &g).unwrap();
            prop_assert!(distance(pt.coords(), y.coords(), NormKind::Inf) <= g.alpha() / 2.0 + 1e-12);
        }
    }
}
