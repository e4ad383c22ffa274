//! Freudenthal triangulations of the simplex, Sperner colorings, the
//! surplus-path protocols and the embedding of Brouwer pairs into colorings.

mod coloring;
mod embedding;
mod protocol;
mod surplus;
mod triangulation;

pub use coloring::{
    brute_force_panchromatic, validate_sperner, SpernerInstance, Violation, ViolationReason,
    UNCOLORED,
};
pub use embedding::{
    brouwer_to_sperner, cross_section_coords, cross_section_point, hyperplane_level, mu_color,
    mu_vector, BackMapped, OnSegment, SpernerEmbedding,
};
pub use protocol::{
    run_single_missing_color_protocol, run_surplus_protocol, run_three_player_protocol,
    surplus_bit_bound, CellRef, SolutionReport, SpernerOutcome, SpernerRun,
};
pub use surplus::{
    merge_coloring, merge_colors, surplus_graph, surplus_path, Node, PathEdge, SurplusGraph,
    SurplusPath,
};
pub use triangulation::{binomial, Cell, CellIter, Triangulation, MAX_CELLS};
