use super::triangulation::{Cell, Triangulation};
use crate::error::{Error, Result};
use crate::protocols::Party;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Marker for a vertex that no class contains.
pub const UNCOLORED: u8 = u8::MAX;

/// A Sperner coloring given as color classes, split between two players:
/// A holds classes `0 .. t`, B holds classes `t ..= d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ColoringRepr", into = "ColoringRepr")]
pub struct SpernerInstance {
    tri: Triangulation,
    t: usize,
    classes: Vec<Vec<u32>>,
    /// First class containing each vertex, or [`UNCOLORED`].
    colors: Vec<u8>,
    /// First vertex (by id) found in two classes, with both classes.
    duplicate: Option<(u32, u8, u8)>,
}

#[derive(Clone, Serialize, Deserialize)]
struct ColoringRepr {
    format: u32,
    d: usize,
    k: u32,
    t: usize,
    classes: Vec<Vec<u32>>,
}

impl TryFrom<ColoringRepr> for SpernerInstance {
    type Error = Error;

    fn try_from(r: ColoringRepr) -> Result<Self> {
        if r.format != crate::FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported coloring format {}",
                r.format
            )));
        }
        SpernerInstance::new(Triangulation::new(r.d, r.k)?, r.t, r.classes)
    }
}

impl From<SpernerInstance> for ColoringRepr {
    fn from(s: SpernerInstance) -> Self {
        ColoringRepr {
            format: crate::FORMAT_VERSION,
            d: s.tri.dim(),
            k: s.tri.resolution(),
            t: s.t,
            classes: s.classes,
        }
    }
}

impl SpernerInstance {
    /// Checks shape only: `d + 1` classes, ids in range, `t <= d + 1`.
    /// Coloring validity is left to [`validate_sperner`].
    pub fn new(tri: Triangulation, t: usize, mut classes: Vec<Vec<u32>>) -> Result<Self> {
        let d = tri.dim();
        if classes.len() != d + 1 {
            return Err(Error::Dimension {
                expected: d + 1,
                got: classes.len(),
            });
        }
        if t > d + 1 {
            return Err(Error::InvalidParameter(format!(
                "split {t} exceeds {} colors",
                d + 1
            )));
        }
        let n = tri.vertex_count();
        let mut colors = vec![UNCOLORED; n as usize];
        let mut duplicate: Option<(u32, u8, u8)> = None;
        for (c, class) in classes.iter_mut().enumerate() {
            class.sort_unstable();
            class.dedup();
            for &v in class.iter() {
                if v as u64 >= n {
                    return Err(Error::InvalidParameter(format!(
                        "vertex id {v} out of range"
                    )));
                }
                let slot = &mut colors[v as usize];
                if *slot == UNCOLORED {
                    *slot = c as u8;
                } else if duplicate.is_none_or(|(w, _, _)| v < w) {
                    duplicate = Some((v, *slot, c as u8));
                }
            }
        }
        Ok(SpernerInstance {
            tri,
            t,
            classes,
            colors,
            duplicate,
        })
    }

    /// Builds an instance from a total coloring indexed by vertex id.
    pub fn from_colors(tri: Triangulation, t: usize, colors: &[u8]) -> Result<Self> {
        let d = tri.dim();
        if colors.len() as u64 != tri.vertex_count() {
            return Err(Error::Dimension {
                expected: tri.vertex_count() as usize,
                got: colors.len(),
            });
        }
        let mut classes = vec![Vec::new(); d + 1];
        for (v, &c) in colors.iter().enumerate() {
            if c as usize > d {
                return Err(Error::InvalidParameter(format!("color {c} out of range")));
            }
            classes[c as usize].push(v as u32);
        }
        SpernerInstance::new(tri, t, classes)
    }

    /// A uniformly random valid coloring: each vertex draws its color from
    /// the support of its barycentric coordinates.
    pub fn random(d: usize, k: u32, t: usize, seed: u64) -> Result<Self> {
        let tri = Triangulation::new(d, k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut colors = Vec::with_capacity(tri.vertex_count() as usize);
        for (_, y) in tri.vertices() {
            let support: Vec<u8> = (0..=d).filter(|&i| y[i] > 0).map(|i| i as u8).collect();
            colors.push(support[rng.random_range(0..support.len())]);
        }
        SpernerInstance::from_colors(tri, t, &colors)
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn split(&self) -> usize {
        self.t
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    /// Color of every vertex (first class on duplicates).
    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn color(&self, v: u32) -> Option<u8> {
        self.colors
            .get(v as usize)
            .copied()
            .filter(|&c| c != UNCOLORED)
    }

    /// The player holding color class `c`.
    pub fn holder(&self, c: u8) -> Party {
        if (c as usize) < self.t {
            Party::A
        } else {
            Party::B
        }
    }

    /// Whether the vertices of `cell` carry all `d + 1` colors.
    pub fn is_panchromatic(&self, cell: &Cell) -> bool {
        let ids = self.tri.cell_vertex_ids(cell);
        panchromatic(&ids, &self.colors, self.tri.dim())
    }
}

pub(crate) fn panchromatic(ids: &[u32], colors: &[u8], d: usize) -> bool {
    let mut seen = 0u64;
    for &v in ids {
        let c = colors[v as usize];
        if c as usize > d {
            return false;
        }
        seen |= 1 << c;
    }
    seen.count_ones() as usize == d + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationReason {
    Uncolored,
    /// The vertex is in two classes, so the classes do not partition.
    Duplicate,
    /// A corner of the simplex has the wrong color.
    Corner,
    /// The color is not a vertex of the vertex's minimal face.
    Support,
}

impl fmt::Display for ViolationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationReason::Uncolored => "uncolored",
            ViolationReason::Duplicate => "duplicate",
            ViolationReason::Corner => "corner",
            ViolationReason::Support => "support",
        })
    }
}

/// A vertex at which the coloring breaks the Sperner conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub vertex: u32,
    pub reason: ViolationReason,
}

/// Checks the coloring and returns the violation of smallest vertex id.
pub fn validate_sperner(inst: &SpernerInstance) -> std::result::Result<(), Violation> {
    let tri = &inst.tri;
    let d = tri.dim();
    let corners: Vec<u32> = (0..=d).map(|i| tri.corner_id(i)).collect();
    let dup = inst.duplicate.map(|(v, _, _)| v);
    for (v, y) in tri.vertices() {
        let fail = |reason| Err(Violation { vertex: v, reason });
        if dup == Some(v) {
            return fail(ViolationReason::Duplicate);
        }
        let c = inst.colors[v as usize];
        if c == UNCOLORED {
            return fail(ViolationReason::Uncolored);
        }
        if let Some(i) = corners.iter().position(|&w| w == v) {
            if c as usize != i {
                return fail(ViolationReason::Corner);
            }
        }
        if y[c as usize] == 0 {
            return fail(ViolationReason::Support);
        }
    }
    Ok(())
}

/// Every panchromatic cell, in lexicographic order.
pub fn brute_force_panchromatic(inst: &SpernerInstance) -> Vec<Cell> {
    let d = inst.tri.dim();
    inst.tri
        .cells()
        .filter(|c| panchromatic(&inst.tri.cell_vertex_ids(c), &inst.colors, d))
        .collect()
}
