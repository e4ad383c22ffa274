use super::coloring::{SpernerInstance, UNCOLORED};
use super::triangulation::{Cell, Triangulation};
use crate::error::{Error, Result};
use crate::functions::Evaluate;

/// Index of the smallest barycentric difference, smallest index on ties.
///
/// `w` is a difference of two points of a simplex in barycentric
/// coordinates (entries sum to zero). Writing `w = sum mu_i (v_i - o)` with
/// `mu_i = w_i - min_j w_j >= 0`, the returned index has `mu_i = 0`.
pub fn mu_color(w: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in w.iter().enumerate() {
        if v < w[best] {
            best = i;
        }
    }
    best
}

/// The conical coefficients `mu_i = w_i - min_j w_j`.
pub fn mu_vector(w: &[f64]) -> Vec<f64> {
    let m = w.iter().copied().fold(f64::INFINITY, f64::min);
    w.iter().map(|&v| v - m).collect()
}

/// Level of the separating hyperplane for resolution `k`. It is an odd
/// multiple of `1/(2k)`, so no lattice vertex lies on it.
pub fn hyperplane_level(k: u32) -> f64 {
    (2 * (k / 2) + 1) as f64 / (2 * k) as f64
}

/// Splits a point of the cross-section `{mass of indices > a = t}` into
/// `(p, q)` with `x = (1 - t) p ++ t q`.
pub fn cross_section_coords(
    x: &[f64],
    a: usize,
    t_star: f64,
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if a + 1 >= x.len() {
        return Err(Error::Dimension {
            expected: a + 2,
            got: x.len(),
        });
    }
    let mass: f64 = x[a + 1..].iter().sum();
    if (mass - t_star).abs() > tol {
        return Err(Error::InvalidParameter(format!(
            "point has mass {mass} off the cross-section at {t_star}"
        )));
    }
    let p = x[..=a].iter().map(|v| v / (1.0 - t_star)).collect();
    let q = x[a + 1..].iter().map(|v| v / t_star).collect();
    Ok((p, q))
}

/// Inverse of [`cross_section_coords`].
pub fn cross_section_point(p: &[f64], q: &[f64], t_star: f64) -> Vec<f64> {
    p.iter()
        .map(|v| v * (1.0 - t_star))
        .chain(q.iter().map(|v| v * t_star))
        .collect()
}

/// Adapts a map of `[0, 1]` to itself to the segment in barycentric form:
/// `(1 - s, s) -> (1 - f(s), f(s))`.
#[derive(Debug, Clone)]
pub struct OnSegment<F>(pub F);

impl<F: Evaluate> Evaluate for OnSegment<F> {
    fn in_dim(&self) -> usize {
        2
    }

    fn out_dim(&self) -> usize {
        2
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let s = self.0.apply(&x[1..2])[0];
        vec![1.0 - s, s]
    }
}

/// A Sperner coloring of the `(a + b + 1)`-simplex built from a pair of maps
/// between `Δ^b` and `Δ^a`.
#[derive(Debug, Clone)]
pub struct SpernerEmbedding {
    instance: SpernerInstance,
    a: usize,
    t_star: f64,
}

/// Where a panchromatic cell maps back to.
#[derive(Debug, Clone, PartialEq)]
pub struct BackMapped {
    /// Canonical point of the cell on the cross-section.
    pub h: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

/// Colors the `(a + b + 1)`-simplex at resolution `k`.
///
/// Vertices with B-mass below the hyperplane level are A-side and take
/// colors `0 ..= a`; the rest take `a + 1 ..= a + b + 1`. A vertex of a cell
/// crossing the hyperplane is colored from the first such cell (in
/// lexicographic order) containing it: at that cell's canonical point
/// `(p, q)` an A-side vertex gets `mu_color(f_a(q) - p)` and a B-side vertex
/// gets `a + 1 + mu_color(f_b(p) - q)`. Every other vertex, and every vertex
/// whose rule color is outside its face, gets the largest barycentric
/// coordinate among its side's allowed colors.
///
/// `f_a` maps `Δ^b` to `Δ^a` and `f_b` maps `Δ^a` to `Δ^b`, both in
/// barycentric coordinates.
pub fn brouwer_to_sperner<FA, FB>(f_a: &FA, f_b: &FB, a: usize, k: u32) -> Result<SpernerEmbedding>
where
    FA: Evaluate + ?Sized,
    FB: Evaluate + ?Sized,
{
    let b = f_a.in_dim().checked_sub(1).ok_or(Error::Empty)?;
    if f_a.out_dim() != a + 1 || f_b.in_dim() != a + 1 || f_b.out_dim() != b + 1 {
        return Err(Error::Incompatible("maps do not fit the simplices".into()));
    }
    let d = a + b + 1;
    let tri = Triangulation::new(d, k)?;
    let t_star = hyperplane_level(k);
    let bary: Vec<Vec<u32>> = tri.vertices().map(|(_, y)| y).collect();
    let kf = k as f64;
    let mass = |y: &[u32]| y[a + 1..].iter().sum::<u32>() as f64 / kf;
    let a_side: Vec<bool> = bary.iter().map(|y| mass(y) < t_star).collect();
    let fallback = |v: usize| -> u8 {
        let y = &bary[v];
        let range = if a_side[v] { 0..=a } else { a + 1..=d };
        let mut best = None;
        for i in range {
            if y[i] > 0 && best.is_none_or(|j: usize| y[i] > y[j]) {
                best = Some(i);
            }
        }
        best.expect("each side has mass on its own indices") as u8
    };

    let mut colors = vec![UNCOLORED; bary.len()];
    for cell in tri.cells() {
        let ids = tri.cell_vertex_ids(&cell);
        if ids.iter().all(|&v| colors[v as usize] != UNCOLORED) {
            continue;
        }
        let Some(h) = crossing_mean(&ids, &bary, &a_side, a, t_star, kf) else {
            continue;
        };
        let (p, q) = cross_section_coords(&h, a, t_star, 1e-9)?;
        let mut wa: Option<Vec<f64>> = None;
        let mut wb: Option<Vec<f64>> = None;
        for &v in &ids {
            let v = v as usize;
            if colors[v] != UNCOLORED {
                continue;
            }
            let c = if a_side[v] {
                let w = wa.get_or_insert_with(|| sub(&f_a.apply(&q), &p));
                mu_color(w)
            } else {
                let w = wb.get_or_insert_with(|| sub(&f_b.apply(&p), &q));
                a + 1 + mu_color(w)
            };
            colors[v] = if bary[v][c] > 0 { c as u8 } else { fallback(v) };
        }
    }
    for (v, c) in colors.iter_mut().enumerate() {
        if *c == UNCOLORED {
            *c = fallback(v);
        }
    }
    let instance = SpernerInstance::from_colors(tri, a + 1, &colors)?;
    Ok(SpernerEmbedding {
        instance,
        a,
        t_star,
    })
}

fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(u, v)| u - v).collect()
}

/// Mean of the points where the cell's edges cross the hyperplane, in
/// normalized barycentric coordinates. `None` if the cell misses it.
fn crossing_mean(
    ids: &[u32],
    bary: &[Vec<u32>],
    a_side: &[bool],
    a: usize,
    t_star: f64,
    kf: f64,
) -> Option<Vec<f64>> {
    let dim = bary[0].len();
    let mut sum = vec![0.0; dim];
    let mut count = 0usize;
    for &u in ids {
        for &w in ids {
            let (u, w) = (u as usize, w as usize);
            if !(a_side[u] && !a_side[w]) {
                continue;
            }
            let mu = bary[u][a + 1..].iter().sum::<u32>() as f64 / kf;
            let mw = bary[w][a + 1..].iter().sum::<u32>() as f64 / kf;
            let s = (t_star - mu) / (mw - mu);
            for i in 0..dim {
                let (yu, yw) = (bary[u][i] as f64 / kf, bary[w][i] as f64 / kf);
                sum[i] += yu + s * (yw - yu);
            }
            count += 1;
        }
    }
    (count > 0).then(|| sum.into_iter().map(|v| v / count as f64).collect())
}

impl SpernerEmbedding {
    pub fn instance(&self) -> &SpernerInstance {
        &self.instance
    }

    pub fn into_instance(self) -> SpernerInstance {
        self.instance
    }

    pub fn hyperplane(&self) -> f64 {
        self.t_star
    }

    /// Canonical point `h(cell)` on the cross-section, if the cell meets it.
    pub fn canonical_point(&self, cell: &Cell) -> Option<Vec<f64>> {
        let tri = self.instance.triangulation();
        let ids = tri.cell_vertex_ids(cell);
        let bary: Vec<Vec<u32>> = ids
            .iter()
            .map(|&v| tri.vertex_bary(v).expect("valid id"))
            .collect();
        let local: Vec<u32> = (0..ids.len() as u32).collect();
        let kf = tri.resolution() as f64;
        let a_side: Vec<bool> = bary
            .iter()
            .map(|y| (y[self.a + 1..].iter().sum::<u32>() as f64 / kf) < self.t_star)
            .collect();
        crossing_mean(&local, &bary, &a_side, self.a, self.t_star, kf)
    }

    /// Maps a cell meeting the cross-section to `(h, p, q)`.
    pub fn back_map(&self, cell: &Cell) -> Result<BackMapped> {
        let h = self
            .canonical_point(cell)
            .ok_or_else(|| Error::InvalidParameter("cell misses the cross-section".into()))?;
        let (p, q) = cross_section_coords(&h, self.a, self.t_star, 1e-9)?;
        Ok(BackMapped { h, p, q })
    }
}
