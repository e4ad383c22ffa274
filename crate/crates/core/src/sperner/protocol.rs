use super::coloring::{panchromatic, SpernerInstance, Violation, ViolationReason, UNCOLORED};
use super::surplus::{surplus_graph, surplus_path, SurplusPath};
use super::triangulation::{Cell, Triangulation};
use crate::error::{Error, Result};
use crate::protocols::{bits_for, Bits, Channel, Declared, Party, Transcript};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpernerOutcome {
    Panchromatic(Cell),
    Violation(Violation),
}

/// Result of a protocol run on a split coloring.
#[derive(Debug, Clone, PartialEq)]
pub struct SpernerRun {
    pub outcome: SpernerOutcome,
    pub transcript: Transcript,
    /// Number of cells on the surplus path, when one was built.
    pub path_len: Option<u64>,
}

impl SpernerRun {
    pub fn cell(&self) -> Option<&Cell> {
        match &self.outcome {
            SpernerOutcome::Panchromatic(c) => Some(c),
            SpernerOutcome::Violation(_) => None,
        }
    }

    /// The communication bound for this run's path, if it has one.
    pub fn bit_bound(&self, tri: &Triangulation) -> Option<u64> {
        self.path_len
            .map(|r| surplus_bit_bound(r, tri.vertex_count()))
    }
}

/// `(ceil(log2 r) + 1) * (ceil(log2 r) + ceil(log2 n) + 1)`.
pub fn surplus_bit_bound(r: u64, n: u64) -> u64 {
    let lr = bits_for(r) as u64;
    let ln = bits_for(n) as u64;
    (lr + 1) * (lr + ln + 1)
}

/// One player's knowledge: the colors of the classes it holds.
struct View {
    colors: Vec<u8>,
    duplicate: Option<u32>,
}

fn view(inst: &SpernerInstance, held: &[u8]) -> View {
    let n = inst.triangulation().vertex_count() as usize;
    let mut colors = vec![UNCOLORED; n];
    let mut duplicate: Option<u32> = None;
    for &c in held {
        for &v in &inst.classes()[c as usize] {
            let slot = &mut colors[v as usize];
            if *slot == UNCOLORED {
                *slot = c;
            } else if duplicate.is_none_or(|w| v < w) {
                duplicate = Some(v);
            }
        }
    }
    View { colors, duplicate }
}

/// The searcher's merged coloring: its own colors, and `keep` everywhere
/// else. Returns the first vertex where this cannot be a surplus coloring.
fn searcher_merge(
    tri: &Triangulation,
    own: &View,
    keep: u8,
    drop: u8,
) -> std::result::Result<Vec<u8>, Violation> {
    let d = tri.dim();
    let corners: Vec<u32> = (0..=d).map(|i| tri.corner_id(i)).collect();
    let mut merged = Vec::with_capacity(own.colors.len());
    for (v, y) in tri.vertices() {
        let fail = |reason| Err(Violation { vertex: v, reason });
        if own.duplicate == Some(v) {
            return fail(ViolationReason::Duplicate);
        }
        let c = own.colors[v as usize];
        let corner = corners.iter().position(|&w| w == v);
        if c != UNCOLORED {
            if corner.is_some_and(|i| i != c as usize) {
                return fail(ViolationReason::Corner);
            }
            if y[c as usize] == 0 {
                return fail(ViolationReason::Support);
            }
            merged.push(c);
        } else {
            if corner.is_some_and(|i| i != keep as usize && i != drop as usize) {
                return fail(ViolationReason::Corner);
            }
            if y[keep as usize] == 0 && y[drop as usize] == 0 {
                return fail(ViolationReason::Support);
            }
            merged.push(keep);
        }
    }
    Ok(merged)
}

fn violation_output(v: Violation) -> Declared {
    Declared::Violation {
        vertex: v.vertex,
        reason: v.reason.to_string(),
    }
}

fn cell_output(c: &Cell) -> Declared {
    Declared::Cell {
        base: c.base.clone(),
        perm: c.perm.clone(),
    }
}

/// Binary search over the path's edges. The searcher names an edge and its
/// doubled-color vertex; the answerer says whether that vertex is `drop`
/// (1) or `keep` (0), or replies `11` on a violation.
fn binary_search<F>(
    path: &SurplusPath,
    n: u64,
    searcher: Party,
    answerer: Party,
    answer: F,
) -> (SpernerOutcome, Transcript)
where
    F: Fn(u32) -> std::result::Result<bool, Violation>,
{
    let r = path.cells.len() as u64;
    let mut ch = Channel::new();
    // Edge 0 is labeled keep and edge r is labeled drop.
    let (mut lo, mut hi) = (0u64, r);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let v = path.edges[mid as usize].keep_vertex;
        let mut q = Bits::new();
        q.push_uint(mid, bits_for(r));
        q.push_uint(v as u64, bits_for(n));
        ch.send(searcher, q);
        match answer(v) {
            Ok(is_drop) => {
                let mut a = Bits::new();
                a.push(is_drop);
                ch.send(answerer, a);
                if is_drop {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Err(violation) => {
                ch.send(answerer, "11".parse().expect("literal bits"));
                let out = violation_output(violation);
                return (SpernerOutcome::Violation(violation), ch.finish(out));
            }
        }
    }
    let cell = path.cells[lo as usize].clone();
    let out = cell_output(&cell);
    (SpernerOutcome::Panchromatic(cell), ch.finish(out))
}

fn silent(v: Violation) -> SpernerRun {
    SpernerRun {
        outcome: SpernerOutcome::Violation(v),
        transcript: Channel::new().finish(violation_output(v)),
        path_len: None,
    }
}

/// Answers membership queries from the classes one player holds.
fn membership<'a>(
    tri: &'a Triangulation,
    mine: &'a View,
    keep: u8,
    drop: u8,
    drop_is_default: bool,
) -> impl Fn(u32) -> std::result::Result<bool, Violation> + 'a {
    move |v| {
        let c = mine.colors[v as usize];
        let fail = |reason| Err(Violation { vertex: v, reason });
        if mine.duplicate == Some(v) {
            return fail(ViolationReason::Duplicate);
        }
        if c != UNCOLORED {
            let y = tri.vertex_bary(v).expect("vertex id in range");
            if y[c as usize] == 0 {
                return fail(ViolationReason::Support);
            }
        }
        if c == keep {
            Ok(false)
        } else if c == drop || (c == UNCOLORED && drop_is_default) {
            Ok(true)
        } else {
            fail(ViolationReason::Uncolored)
        }
    }
}

/// Two-party protocol for colorings where A holds `d - 1` classes.
///
/// A holds classes `0 .. d-1` and B holds `d - 1` and `d`. A merges B's two
/// colors into `d - 1`, builds the surplus path alone and binary-searches
/// it, asking B for the true color of one vertex per round.
pub fn run_surplus_protocol(inst: &SpernerInstance) -> Result<SpernerRun> {
    let tri = inst.triangulation();
    let d = tri.dim();
    if inst.split() + 1 != d {
        return Err(Error::Incompatible(format!(
            "the surplus protocol needs A to hold {} classes, not {}",
            d - 1,
            inst.split()
        )));
    }
    let (keep, drop) = (d as u8 - 1, d as u8);
    let a_classes: Vec<u8> = (0..keep).collect();
    let a_view = view(inst, &a_classes);
    let merged = match searcher_merge(tri, &a_view, keep, drop) {
        Ok(m) => m,
        Err(v) => return Ok(silent(v)),
    };
    let g = surplus_graph(tri, merged, keep, drop)?;
    let path = surplus_path(&g)?;
    let b_view = view(inst, &[keep, drop]);
    let answer = membership(tri, &b_view, keep, drop, false);
    let (outcome, transcript) =
        binary_search(&path, tri.vertex_count(), Party::A, Party::B, answer);
    Ok(SpernerRun {
        outcome,
        transcript,
        path_len: Some(path.cells.len() as u64),
    })
}

/// Three-party broadcast protocol on the triangle. `P1`, `P2`, `P3` hold
/// classes 0, 1, 2. `P2` merges classes 0 and 2, builds the surplus path and
/// broadcasts queries; `P1` answers whether each queried vertex is in its
/// class.
pub fn run_three_player_protocol(inst: &SpernerInstance) -> Result<SpernerRun> {
    let tri = inst.triangulation();
    if tri.dim() != 2 {
        return Err(Error::Incompatible(
            "the three-party protocol is for d = 2".into(),
        ));
    }
    let (keep, drop) = (0u8, 2u8);
    let p2 = view(inst, &[1]);
    let merged = match searcher_merge(tri, &p2, keep, drop) {
        Ok(m) => m,
        Err(v) => return Ok(silent(v)),
    };
    let g = surplus_graph(tri, merged, keep, drop)?;
    let path = surplus_path(&g)?;
    let p1 = view(inst, &[0]);
    let answer = membership(tri, &p1, keep, drop, true);
    let (outcome, transcript) =
        binary_search(&path, tri.vertex_count(), Party::P2, Party::P1, answer);
    Ok(SpernerRun {
        outcome,
        transcript,
        path_len: Some(path.cells.len() as u64),
    })
}

/// A holds classes `0 .. d`, so B's class is everything else. A finds the
/// first panchromatic cell alone and announces its rank.
pub fn run_single_missing_color_protocol(inst: &SpernerInstance) -> Result<SpernerRun> {
    let tri = inst.triangulation();
    let d = tri.dim();
    if inst.split() != d {
        return Err(Error::Incompatible(format!(
            "A must hold {d} classes, not {}",
            inst.split()
        )));
    }
    let held: Vec<u8> = (0..d as u8).collect();
    // Inferring color d where A holds nothing is the same as merging with
    // keep = d and a drop color A never holds.
    let own = view(inst, &held);
    let corners: Vec<u32> = (0..=d).map(|i| tri.corner_id(i)).collect();
    let mut colors = Vec::with_capacity(own.colors.len());
    for (v, y) in tri.vertices() {
        let fail = |reason| Violation { vertex: v, reason };
        if own.duplicate == Some(v) {
            return Ok(silent(fail(ViolationReason::Duplicate)));
        }
        let c = match own.colors[v as usize] {
            UNCOLORED => d as u8,
            c => c,
        };
        if corners
            .iter()
            .position(|&w| w == v)
            .is_some_and(|i| i != c as usize)
        {
            return Ok(silent(fail(ViolationReason::Corner)));
        }
        if y[c as usize] == 0 {
            return Ok(silent(fail(ViolationReason::Support)));
        }
        colors.push(c);
    }
    let found = tri
        .cells()
        .enumerate()
        .find(|(_, c)| panchromatic(&tri.cell_vertex_ids(c), &colors, d));
    let (rank, cell) = found.ok_or_else(|| {
        Error::InvalidParameter("a valid coloring has a panchromatic cell".into())
    })?;
    let mut ch = Channel::new();
    let mut msg = Bits::new();
    msg.push_uint(rank as u64, bits_for(tri.cell_count()));
    ch.send(Party::A, msg);
    let out = cell_output(&cell);
    Ok(SpernerRun {
        outcome: SpernerOutcome::Panchromatic(cell),
        transcript: ch.finish(out),
        path_len: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRef {
    pub base: Vec<u32>,
    pub perm: Vec<u8>,
}

/// A protocol's answer with the referee's view of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub format: u32,
    pub cell: Option<CellRef>,
    pub vertices: Vec<u32>,
    /// Referee colors of `vertices`.
    pub colors: Vec<Option<u8>>,
    pub violation: Option<Violation>,
    pub transcript: Transcript,
}

impl SolutionReport {
    pub fn new(inst: &SpernerInstance, run: &SpernerRun) -> Self {
        let tri = inst.triangulation();
        let (cell, vertices, violation) = match &run.outcome {
            SpernerOutcome::Panchromatic(c) => (
                Some(CellRef {
                    base: c.base.clone(),
                    perm: c.perm.clone(),
                }),
                tri.cell_vertex_ids(c),
                None,
            ),
            SpernerOutcome::Violation(v) => (None, vec![v.vertex], Some(*v)),
        };
        let colors = vertices.iter().map(|&v| inst.color(v)).collect();
        SolutionReport {
            format: crate::FORMAT_VERSION,
            cell,
            vertices,
            colors,
            violation,
            transcript: run.transcript.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sperner::coloring::{brute_force_panchromatic, validate_sperner};

    #[test]
    fn bound_formula() {
        assert_eq!(surplus_bit_bound(1, 3), 3);
        assert_eq!(surplus_bit_bound(8, 45), 4 * 10);
    }

    #[test]
    fn one_cell_path_needs_no_messages() {
        let tri = Triangulation::new(2, 1).unwrap();
        let colors: Vec<u8> = tri
            .vertices()
            .map(|(_, y)| y.iter().position(|&v| v == 1).unwrap() as u8)
            .collect();
        let inst = SpernerInstance::from_colors(tri, 1, &colors).unwrap();
        let run = run_surplus_protocol(&inst).unwrap();
        assert_eq!(run.path_len, Some(1));
        assert_eq!(run.transcript.total_bits(), 0);
        assert!(inst.is_panchromatic(run.cell().unwrap()));
        let three = run_three_player_protocol(&inst).unwrap();
        assert_eq!(three.transcript.total_bits(), 0);
        assert!(inst.is_panchromatic(three.cell().unwrap()));
    }

    #[test]
    fn surplus_runs_find_brute_force_cells_within_budget() {
        for d in 2..=4 {
            for seed in 0..40 {
                let inst = SpernerInstance::random(d, 5, d - 1, seed).unwrap();
                let run = run_surplus_protocol(&inst).unwrap();
                let cell = run.cell().expect("valid instance").clone();
                assert!(brute_force_panchromatic(&inst).contains(&cell));
                let bound = run.bit_bound(inst.triangulation()).unwrap();
                assert!(run.transcript.total_bits() <= bound);
                assert_eq!(
                    run.transcript.bits_from(Party::B) * 2,
                    run.transcript.rounds()
                );
            }
        }
    }

    #[test]
    fn three_player_runs_are_panchromatic() {
        for seed in 0..40 {
            let inst = SpernerInstance::random(2, 9, 1, seed).unwrap();
            let run = run_three_player_protocol(&inst).unwrap();
            assert!(inst.is_panchromatic(run.cell().unwrap()));
            assert!(run.transcript.total_bits() <= run.bit_bound(inst.triangulation()).unwrap());
            assert_eq!(run.transcript.bits_from(Party::P3), 0);
        }
    }

    #[test]
    fn single_missing_color_matches_first_brute_force_cell() {
        for d in 1..=3 {
            for seed in 0..20 {
                let inst = SpernerInstance::random(d, 4, d, seed).unwrap();
                let run = run_single_missing_color_protocol(&inst).unwrap();
                assert_eq!(run.cell(), brute_force_panchromatic(&inst).first());
                assert_eq!(
                    run.transcript.total_bits(),
                    bits_for(inst.triangulation().cell_count()) as u64
                );
            }
        }
    }

    #[test]
    fn broken_promises_yield_witnesses() {
        let good = SpernerInstance::random(2, 4, 1, 3).unwrap();
        let tri = *good.triangulation();
        // A's corner v0 is moved into B's class 2.
        let v0 = tri.corner_id(0);
        let mut classes = good.classes().to_vec();
        classes[0].retain(|&v| v != v0);
        classes[2].push(v0);
        let bad = SpernerInstance::new(tri, 1, classes).unwrap();
        assert!(validate_sperner(&bad).is_err());
        let run = run_surplus_protocol(&bad).unwrap();
        assert_eq!(
            run.outcome,
            SpernerOutcome::Violation(Violation {
                vertex: v0,
                reason: ViolationReason::Corner
            })
        );
        assert_eq!(run.transcript.total_bits(), 0);

        // Vertices missing from every class are caught once B is asked
        // about one.
        let mut classes = good.classes().to_vec();
        for c in &mut classes[1..] {
            c.clear();
        }
        let bad = SpernerInstance::new(tri, 1, classes).unwrap();
        let run = run_surplus_protocol(&bad).unwrap();
        match run.outcome {
            SpernerOutcome::Violation(v) => assert_eq!(v.reason, ViolationReason::Uncolored),
            SpernerOutcome::Panchromatic(_) => assert_eq!(run.transcript.total_bits(), 0),
        }
    }

    #[test]
    fn wrong_split_is_incompatible() {
        let inst = SpernerInstance::random(3, 3, 1, 0).unwrap();
        assert!(run_surplus_protocol(&inst).is_err());
        assert!(run_single_missing_color_protocol(&inst).is_err());
        assert!(run_three_player_protocol(&inst).is_err());
    }

    #[test]
    fn report_serializes() {
        let inst = SpernerInstance::random(2, 6, 1, 1).unwrap();
        let run = run_surplus_protocol(&inst).unwrap();
        let rep = SolutionReport::new(&inst, &run);
        let text = serde_json::to_string(&rep).unwrap();
        assert!(text.starts_with("{\"format\":1,\"cell\":{\"base\":"));
        let back: SolutionReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);
        let mut colors = rep.colors.clone();
        colors.sort();
        assert_eq!(colors, vec![Some(0), Some(1), Some(2)]);
    }
}
