use super::triangulation::{Cell, Triangulation};
use crate::error::{Error, Result};

/// `c'(v) = c(v)` for `c(v) < d`, else `0`.
pub fn merge_coloring(colors: &[u8], d: usize) -> Vec<u8> {
    merge_colors(colors, 0, d as u8)
}

/// Recolors class `drop` as `keep`, leaving a coloring with `d` colors.
pub fn merge_colors(colors: &[u8], keep: u8, drop: u8) -> Vec<u8> {
    colors
        .iter()
        .map(|&c| if c == drop { keep } else { c })
        .collect()
}

/// A node of the surplus graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Node {
    /// Attached to cells with a panchromatic facet on `{y_drop = 0}`.
    Start,
    /// Attached to cells with a panchromatic facet on `{y_keep = 0}`.
    End,
    Cell(Cell),
}

/// The graph whose edges are facets carrying every merged color.
///
/// The merged coloring uses colors `0 ..= d` except `drop`; `keep` is the
/// doubled color. Nodes are cells plus two terminals, one for each simplex
/// facet that misses a color of the original coloring.
#[derive(Debug, Clone)]
pub struct SurplusGraph<'a> {
    tri: &'a Triangulation,
    merged: Vec<u8>,
    keep: u8,
    drop: u8,
}

/// Builds the surplus graph, checking the merged boundary conditions.
pub fn surplus_graph(
    tri: &Triangulation,
    merged: Vec<u8>,
    keep: u8,
    drop: u8,
) -> Result<SurplusGraph<'_>> {
    let d = tri.dim();
    if keep == drop || keep as usize > d || drop as usize > d {
        return Err(Error::InvalidParameter(
            "keep and drop must be distinct colors".into(),
        ));
    }
    if merged.len() as u64 != tri.vertex_count() {
        return Err(Error::Dimension {
            expected: tri.vertex_count() as usize,
            got: merged.len(),
        });
    }
    for (v, y) in tri.vertices() {
        let c = merged[v as usize];
        if c as usize > d || c == drop {
            return Err(Error::InvalidParameter(format!(
                "vertex {v} has merged color {c}"
            )));
        }
        // Color `keep` stands for keep or drop.
        let allowed = y[c as usize] > 0 || (c == keep && y[drop as usize] > 0);
        if !allowed {
            return Err(Error::InvalidParameter(format!(
                "vertex {v} breaks the surplus boundary rule"
            )));
        }
    }
    Ok(SurplusGraph {
        tri,
        merged,
        keep,
        drop,
    })
}

impl<'a> SurplusGraph<'a> {
    pub fn triangulation(&self) -> &Triangulation {
        self.tri
    }

    pub fn merged(&self) -> &[u8] {
        &self.merged
    }

    pub fn keep(&self) -> u8 {
        self.keep
    }

    pub fn drop_color(&self) -> u8 {
        self.drop
    }

    /// Indices `i` whose opposite facet carries all `d` merged colors.
    pub fn panchromatic_facets(&self, cell: &Cell) -> Vec<usize> {
        let ids = self.tri.cell_vertex_ids(cell);
        self.facets_of(&ids)
    }

    fn facets_of(&self, ids: &[u32]) -> Vec<usize> {
        let d = self.tri.dim();
        let mut count = vec![0usize; d + 1];
        for &v in ids {
            count[self.merged[v as usize] as usize] += 1;
        }
        let distinct = count.iter().filter(|&&c| c > 0).count();
        if distinct < d {
            return Vec::new();
        }
        // With d distinct colors among d + 1 vertices, exactly one color is
        // doubled and dropping either of its two vertices leaves a
        // panchromatic facet.
        (0..=d)
            .filter(|&i| count[self.merged[ids[i] as usize] as usize] == 2)
            .collect()
    }

    /// The simplex facet the terminal sits on.
    fn terminal_face(&self, node: &Node) -> Option<usize> {
        match node {
            Node::Start => Some(self.drop as usize),
            Node::End => Some(self.keep as usize),
            Node::Cell(_) => None,
        }
    }

    /// Neighbors of a node, sorted.
    pub fn neighbors(&self, node: &Node) -> Vec<Node> {
        match node {
            Node::Cell(cell) => {
                let mut out: Vec<Node> = self
                    .panchromatic_facets(cell)
                    .into_iter()
                    .map(|i| self.across(cell, i))
                    .collect();
                out.sort();
                out
            }
            terminal => {
                let j = self.terminal_face(terminal).unwrap();
                self.terminal_cells(j).into_iter().map(Node::Cell).collect()
            }
        }
    }

    pub fn degree(&self, node: &Node) -> usize {
        match node {
            Node::Cell(cell) => self.panchromatic_facets(cell).len(),
            _ => self.neighbors(node).len(),
        }
    }

    /// What lies across facet `i` of `cell`.
    fn across(&self, cell: &Cell, i: usize) -> Node {
        match self.tri.neighbor(cell, i) {
            Some(nb) => Node::Cell(nb),
            None => match self.tri.boundary_of_facet(cell, i) {
                Some(j) if j == self.drop as usize => Node::Start,
                Some(j) if j == self.keep as usize => Node::End,
                // Other boundary facets miss a merged color, so they are
                // never panchromatic under a valid coloring.
                _ => unreachable!("panchromatic facet on a closed boundary face"),
            },
        }
    }

    /// Cells with a panchromatic facet on the simplex facet `{y_j = 0}`,
    /// in lexicographic order.
    fn terminal_cells(&self, j: usize) -> Vec<Cell> {
        let mut out = Vec::new();
        for cell in self.tri.cells() {
            if let Some(i) = self.tri.facet_on(&cell, j) {
                if self.panchromatic_facets(&cell).contains(&i) {
                    out.push(cell);
                }
            }
        }
        out
    }

    pub fn start_cells(&self) -> Vec<Cell> {
        self.terminal_cells(self.drop as usize)
    }
}

/// One step of a surplus path: the shared facet between consecutive nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathEdge {
    /// Sorted vertex ids of the facet.
    pub facet: Vec<u32>,
    /// The facet's unique vertex with merged color `keep`.
    pub keep_vertex: u32,
}

/// A path `Start = p_0, p_1, ..., p_r, End` with its `r + 1` edges; edge `j`
/// joins `p_j` and `p_{j+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurplusPath {
    pub cells: Vec<Cell>,
    pub edges: Vec<PathEdge>,
}

impl SurplusPath {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

impl<'a> SurplusGraph<'a> {
    fn edge(&self, ids: &[u32], i: usize) -> PathEdge {
        let mut facet: Vec<u32> = ids
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        let keep_vertex = *facet
            .iter()
            .find(|&&v| self.merged[v as usize] == self.keep)
            .expect("panchromatic facet holds the doubled color");
        facet.sort_unstable();
        PathEdge { facet, keep_vertex }
    }

    /// Walks from `start` entering through facet `enter`; returns the path
    /// and whether it reached the end terminal.
    fn walk(&self, start: Cell, enter: usize) -> (SurplusPath, bool) {
        let ids = self.tri.cell_vertex_ids(&start);
        let mut path = SurplusPath {
            cells: Vec::new(),
            edges: vec![self.edge(&ids, enter)],
        };
        let (mut cell, mut ids, mut enter) = (start, ids, enter);
        loop {
            let out = self
                .facets_of(&ids)
                .into_iter()
                .find(|&i| i != enter)
                .expect("a cell with one panchromatic facet has a second");
            path.edges.push(self.edge(&ids, out));
            path.cells.push(cell.clone());
            match self.tri.neighbor(&cell, out) {
                Some(nb) => {
                    enter = self.tri.facet_in_neighbor(out);
                    ids = self.tri.cell_vertex_ids(&nb);
                    cell = nb;
                }
                None => {
                    let reached =
                        self.tri.boundary_of_facet(&cell, out) == Some(self.keep as usize);
                    return (path, reached);
                }
            }
        }
    }
}

/// The first path from the start terminal that reaches the end terminal,
/// trying start cells in lexicographic order and skipping those already
/// seen as the far end of a returning path.
pub fn surplus_path(g: &SurplusGraph<'_>) -> Result<SurplusPath> {
    let drop_face = g.drop as usize;
    let mut used: Vec<Cell> = Vec::new();
    for cell in g.start_cells() {
        if used.contains(&cell) {
            continue;
        }
        let enter = g.tri.facet_on(&cell, drop_face).expect("start cell");
        let (path, reached) = g.walk(cell, enter);
        if reached {
            return Ok(path);
        }
        used.push(path.cells.last().expect("nonempty").clone());
    }
    Err(Error::InvalidParameter(
        "no path reaches the end terminal".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sperner::coloring::{validate_sperner, SpernerInstance};

    #[test]
    fn merge_examples() {
        assert_eq!(merge_coloring(&[3, 0, 2, 1], 3), vec![0, 0, 2, 1]);
        assert_eq!(merge_colors(&[3, 0, 2, 1], 2, 3), vec![2, 0, 2, 1]);
    }

    #[test]
    fn merged_corners_follow_the_surplus_rule() {
        let inst = SpernerInstance::random(3, 5, 1, 4).unwrap();
        let tri = inst.triangulation();
        let merged = merge_coloring(inst.colors(), 3);
        for i in 0..3 {
            assert_eq!(merged[tri.corner_id(i) as usize], i as u8);
        }
        assert_eq!(merged[tri.corner_id(3) as usize], 0);
    }

    #[test]
    fn single_edge_has_one_cell_path() {
        let tri = Triangulation::new(1, 1).unwrap();
        let inst = SpernerInstance::from_colors(tri, 1, &[1, 0]).unwrap();
        let g = surplus_graph(&tri, merge_coloring(inst.colors(), 1), 0, 1).unwrap();
        let cell = tri.cells().next().unwrap();
        assert_eq!(
            g.neighbors(&Node::Cell(cell.clone())),
            vec![Node::Start, Node::End]
        );
        let p = surplus_path(&g).unwrap();
        assert_eq!(p.cells, vec![cell]);
        assert_eq!(p.edges.len(), 2);
    }

    fn check_graph(inst: &SpernerInstance, keep: u8, drop: u8) {
        let tri = inst.triangulation();
        let d = tri.dim();
        let g = surplus_graph(tri, merge_colors(inst.colors(), keep, drop), keep, drop).unwrap();
        for cell in tri.cells() {
            let deg = g.degree(&Node::Cell(cell.clone()));
            assert!(deg == 0 || deg == 2);
            // Adjacency is symmetric.
            for nb in g.neighbors(&Node::Cell(cell.clone())) {
                if let Node::Cell(other) = &nb {
                    assert!(g.neighbors(&nb).contains(&Node::Cell(cell.clone())));
                    assert_ne!(other, &cell);
                }
            }
        }
        assert_eq!(g.degree(&Node::Start) % 2, 1);
        assert_eq!(g.degree(&Node::End) % 2, 1);
        let p = surplus_path(&g).unwrap();
        assert_eq!(p.edges.len(), p.cells.len() + 1);
        assert_eq!(
            tri.boundary_of_facet(&p.cells[0], {
                tri.facet_on(&p.cells[0], drop as usize).unwrap()
            }),
            Some(drop as usize)
        );
        let last = p.cells.last().unwrap();
        assert!(tri.facet_on(last, keep as usize).is_some());
        for w in p.cells.windows(2) {
            let a = tri.cell_vertex_ids(&w[0]);
            let b = tri.cell_vertex_ids(&w[1]);
            let shared: Vec<u32> = a.iter().copied().filter(|v| b.contains(v)).collect();
            assert_eq!(shared.len(), d);
        }
        // Exactly one cell along the path is panchromatic under the
        // original coloring at the point where labels switch, and any cell
        // whose two edges have differently colored keep vertices qualifies.
        for (j, cell) in p.cells.iter().enumerate() {
            let l = inst.colors()[p.edges[j].keep_vertex as usize];
            let r = inst.colors()[p.edges[j + 1].keep_vertex as usize];
            if l != r {
                assert!(inst.is_panchromatic(cell));
            }
        }
    }

    #[test]
    fn random_surplus_graphs_are_well_formed() {
        for d in 1..=4 {
            for seed in 0..10 {
                let inst = SpernerInstance::random(d, 4, 1, seed).unwrap();
                assert_eq!(validate_sperner(&inst), Ok(()));
                check_graph(&inst, 0, d as u8);
                if d >= 2 {
                    check_graph(&inst, d as u8 - 1, d as u8);
                }
            }
        }
    }

    #[test]
    fn invalid_merged_coloring_is_rejected() {
        let tri = Triangulation::new(1, 2).unwrap();
        // v1 (id 0) must carry color 1 or the doubled color's partner.
        assert!(surplus_graph(&tri, vec![0, 0, 0], 1, 0).is_err());
        assert!(surplus_graph(&tri, vec![1, 1, 0], 0, 0).is_err());
    }
}
