use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest number of cells a triangulation may have.
pub const MAX_CELLS: u64 = 100_000_000;

/// `C(n, r)` for small `r`, saturating at `u64::MAX`.
pub fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// A full-dimensional cell of the Freudenthal subdivision.
///
/// Coordinates are "staircase" coordinates `k >= x_1 >= ... >= x_d >= 0` of
/// the lattice simplex. The cell's vertices are `w_0 = base` and
/// `w_i = w_{i-1} + e_{perm[i-1]}`; `perm` lists axes `0..d`.
/// Cells order lexicographically by `(base, perm)`, which is also the
/// enumeration order of [`Triangulation::cells`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub base: Vec<u32>,
    pub perm: Vec<u8>,
}

/// The Freudenthal (Kuhn) subdivision of the `d`-simplex into `k^d` cells.
///
/// Vertices are the lattice points `y` with `y_i >= 0` and `sum y_i = k`
/// (barycentric numerators), identified by their rank in lexicographic
/// order of `y`. Staircase and barycentric coordinates are related by
/// `y_0 = k - x_1`, `y_i = x_i - x_{i+1}`, `y_d = x_d`; corner `v_i` of the
/// simplex is `k e_i` in barycentric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangulation {
    d: usize,
    k: u32,
}

impl Triangulation {
    pub fn new(d: usize, k: u32) -> Result<Self> {
        if d == 0 || k == 0 {
            return Err(Error::InvalidParameter("need d >= 1 and k >= 1".into()));
        }
        let cells = (k as u64).checked_pow(d as u32);
        match cells {
            Some(c) if c <= MAX_CELLS => {}
            _ => {
                return Err(Error::SizeOverflow(format!(
                    "{k}^{d} cells exceeds {MAX_CELLS}"
                )))
            }
        }
        if binomial(k as u64 + d as u64, d as u64) > u32::MAX as u64 {
            return Err(Error::SizeOverflow("vertex ids exceed 32 bits".into()));
        }
        Ok(Triangulation { d, k })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn resolution(&self) -> u32 {
        self.k
    }

    /// `C(k + d, d)`.
    pub fn vertex_count(&self) -> u64 {
        binomial(self.k as u64 + self.d as u64, self.d as u64)
    }

    /// `k^d`.
    pub fn cell_count(&self) -> u64 {
        (self.k as u64).pow(self.d as u32)
    }

    pub fn to_bary(&self, x: &[u32]) -> Vec<u32> {
        let d = self.d;
        let mut y = Vec::with_capacity(d + 1);
        y.push(self.k - x[0]);
        for i in 1..d {
            y.push(x[i - 1] - x[i]);
        }
        y.push(x[d - 1]);
        y
    }

    pub fn to_staircase(&self, y: &[u32]) -> Vec<u32> {
        let mut x = Vec::with_capacity(self.d);
        let mut acc = 0;
        for &v in y[1..].iter().rev() {
            acc += v;
            x.push(acc);
        }
        x.reverse();
        x
    }

    /// Rank of a barycentric lattice point in lexicographic order.
    pub fn bary_id(&self, y: &[u32]) -> u32 {
        let d = self.d as u64;
        let mut rem = self.k as u64;
        let mut rank = 0u64;
        for (i, &yi) in y[..self.d].iter().enumerate() {
            // Points with this prefix and a smaller i-th entry: compositions
            // of rem - v into d - i parts, summed over v < y_i.
            let q = d - i as u64 - 1;
            rank += binomial(rem + q + 1, q + 1) - binomial(rem - yi as u64 + q + 1, q + 1);
            rem -= yi as u64;
        }
        rank as u32
    }

    /// Vertex id of a staircase point.
    pub fn vertex_id(&self, x: &[u32]) -> u32 {
        self.bary_id(&self.to_bary(x))
    }

    /// Inverse of [`Triangulation::bary_id`].
    pub fn vertex_bary(&self, id: u32) -> Result<Vec<u32>> {
        if id as u64 >= self.vertex_count() {
            return Err(Error::InvalidParameter(format!(
                "vertex id {id} out of range"
            )));
        }
        let d = self.d as u64;
        let mut rem = self.k as u64;
        let mut left = id as u64;
        let mut y = Vec::with_capacity(self.d + 1);
        for i in 0..self.d {
            let q = d - i as u64 - 1;
            // Largest v with (count of points whose i-th entry is < v) <= left.
            let below = |v: u64| binomial(rem + q + 1, q + 1) - binomial(rem - v + q + 1, q + 1);
            let (mut lo, mut hi) = (0u64, rem);
            while lo < hi {
                let mid = (lo + hi).div_ceil(2);
                if below(mid) <= left {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            left -= below(lo);
            y.push(lo as u32);
            rem -= lo;
        }
        y.push(rem as u32);
        Ok(y)
    }

    /// Id of corner `v_i`.
    pub fn corner_id(&self, i: usize) -> u32 {
        let mut y = vec![0; self.d + 1];
        y[i] = self.k;
        self.bary_id(&y)
    }

    /// Whether `cell` lies inside the simplex.
    pub fn is_valid(&self, cell: &Cell) -> bool {
        let d = self.d;
        if cell.base.len() != d || cell.perm.len() != d {
            return false;
        }
        let mut seen = vec![false; d];
        for &a in &cell.perm {
            let a = a as usize;
            if a >= d || seen[a] {
                return false;
            }
            seen[a] = true;
        }
        valid_parts(self.k, &cell.base, &cell.perm)
    }

    /// The `d + 1` vertices in staircase coordinates.
    pub fn cell_points(&self, cell: &Cell) -> Vec<Vec<u32>> {
        let mut w = cell.base.clone();
        let mut out = Vec::with_capacity(self.d + 1);
        out.push(w.clone());
        for &a in &cell.perm {
            w[a as usize] += 1;
            out.push(w.clone());
        }
        out
    }

    /// Vertex ids of `w_0, ..., w_d`.
    pub fn cell_vertex_ids(&self, cell: &Cell) -> Vec<u32> {
        let mut w = cell.base.clone();
        let mut out = Vec::with_capacity(self.d + 1);
        out.push(self.vertex_id(&w));
        for &a in &cell.perm {
            w[a as usize] += 1;
            out.push(self.vertex_id(&w));
        }
        out
    }

    /// The cell across the facet opposite `w_i`, or `None` if that facet is
    /// on the boundary of the simplex. The shared facet is opposite
    /// `w_{facet_in_neighbor(i)}` in the returned cell.
    pub fn neighbor(&self, cell: &Cell, i: usize) -> Option<Cell> {
        let d = self.d;
        let mut base = cell.base.clone();
        let mut perm = cell.perm.clone();
        if i == 0 {
            let a = perm[0] as usize;
            base[a] += 1;
            perm.rotate_left(1);
        } else if i == d {
            let a = perm[d - 1] as usize;
            if base[a] == 0 {
                return None;
            }
            base[a] -= 1;
            perm.rotate_right(1);
        } else {
            perm.swap(i - 1, i);
        }
        valid_parts(self.k, &base, &perm).then_some(Cell { base, perm })
    }

    /// Index of the shared facet in the neighbor found by
    /// [`Triangulation::neighbor`] across facet `i`.
    pub fn facet_in_neighbor(&self, i: usize) -> usize {
        if i == 0 {
            self.d
        } else if i == self.d {
            0
        } else {
            i
        }
    }

    /// The facet of `cell` lying in the simplex facet `{y_j = 0}`, if any.
    pub fn facet_on(&self, cell: &Cell, j: usize) -> Option<usize> {
        let d = self.d;
        let (b, p) = (&cell.base, &cell.perm);
        if j == 0 {
            (b[0] == self.k - 1 && p[0] == 0).then_some(0)
        } else if j == d {
            (b[d - 1] == 0 && p[d - 1] as usize == d - 1).then_some(d)
        } else {
            if b[j - 1] != b[j] {
                return None;
            }
            let q = p.iter().position(|&a| a as usize == j - 1)?;
            (q + 1 < d && p[q + 1] as usize == j).then_some(q + 1)
        }
    }

    /// Simplex facets `{y_j = 0}` containing facet `i` of `cell`.
    pub fn boundary_of_facet(&self, cell: &Cell, i: usize) -> Option<usize> {
        (0..=self.d).find(|&j| self.facet_on(cell, j) == Some(i))
    }

    /// All cells in lexicographic order.
    pub fn cells(&self) -> CellIter {
        CellIter {
            k: self.k,
            next: Some(Cell {
                base: vec![0; self.d],
                perm: (0..self.d as u8).collect(),
            }),
        }
    }

    /// All vertex ids `0 .. n` with their barycentric coordinates, in order.
    pub fn vertices(&self) -> impl Iterator<Item = (u32, Vec<u32>)> + '_ {
        let d = self.d;
        let k = self.k;
        let mut y = vec![0u32; d + 1];
        y[d] = k;
        let mut id = 0u32;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = (id, y.clone());
            id += 1;
            done = !next_composition(&mut y);
            Some(out)
        })
    }
}

/// Advances `y` to the next composition of the same total in lexicographic
/// order. Returns `false` after the last one.
fn next_composition(y: &mut [u32]) -> bool {
    let d = y.len() - 1;
    // Rightmost position before the last that can grow by taking from the tail.
    let Some(i) = (0..d).rev().find(|&i| y[i + 1..].iter().any(|&v| v > 0)) else {
        return false;
    };
    let tail: u32 = y[i + 1..].iter().sum();
    y[i] += 1;
    for v in &mut y[i + 1..] {
        *v = 0;
    }
    y[d] = tail - 1;
    true
}

fn valid_parts(k: u32, base: &[u32], perm: &[u8]) -> bool {
    let d = base.len();
    if base[0] + 1 > k {
        return false;
    }
    for j in 1..d {
        if base[j] > base[j - 1] {
            return false;
        }
        if base[j] == base[j - 1] {
            let pj = perm.iter().position(|&a| a as usize == j);
            let pi = perm.iter().position(|&a| a as usize == j - 1);
            if pj < pi {
                return false;
            }
        }
    }
    true
}

/// Iterator over the cells of a triangulation in lexicographic order.
#[derive(Debug, Clone)]
pub struct CellIter {
    k: u32,
    next: Option<Cell>,
}

impl CellIter {
    fn advance(&mut self) {
        let Some(cell) = self.next.as_mut() else {
            return;
        };
        if next_perm(&cell.base, &mut cell.perm) {
            return;
        }
        if next_base(self.k, &mut cell.base) {
            first_perm(&cell.base, &mut cell.perm);
        } else {
            self.next = None;
        }
    }
}

impl Iterator for CellIter {
    type Item = Cell;

    fn next(&mut self) -> Option<Cell> {
        let out = self.next.clone()?;
        self.advance();
        Some(out)
    }
}

fn tied_before(base: &[u32], j: usize) -> bool {
    j > 0 && base[j - 1] == base[j]
}

fn available(base: &[u32], used: &[bool], j: usize) -> bool {
    !used[j] && (!tied_before(base, j) || used[j - 1])
}

/// Fills `perm[from..]` with the lexicographically smallest valid tail.
fn fill_tail(base: &[u32], perm: &mut [u8], from: usize) {
    let d = base.len();
    let mut used = vec![false; d];
    for &a in &perm[..from] {
        used[a as usize] = true;
    }
    for slot in perm.iter_mut().skip(from) {
        let j = (0..d)
            .find(|&j| available(base, &used, j))
            .expect("a chain head is free");
        *slot = j as u8;
        used[j] = true;
    }
}

fn first_perm(base: &[u32], perm: &mut [u8]) {
    fill_tail(base, perm, 0);
}

/// Next valid permutation for `base` in lexicographic order.
fn next_perm(base: &[u32], perm: &mut [u8]) -> bool {
    let d = base.len();
    for i in (0..d.saturating_sub(1)).rev() {
        let mut used = vec![false; d];
        for &a in &perm[..i] {
            used[a as usize] = true;
        }
        let cur = perm[i] as usize;
        if let Some(j) = (cur + 1..d).find(|&j| available(base, &used, j)) {
            perm[i] = j as u8;
            fill_tail(base, perm, i + 1);
            return true;
        }
    }
    false
}

/// Next non-increasing base with entries below `k`, in lexicographic order.
fn next_base(k: u32, base: &mut [u32]) -> bool {
    for i in (0..base.len()).rev() {
        let cap = if i == 0 { k - 1 } else { base[i - 1] };
        if base[i] < cap {
            base[i] += 1;
            for v in &mut base[i + 1..] {
                *v = 0;
            }
            return true;
        }
    }
    false
}
