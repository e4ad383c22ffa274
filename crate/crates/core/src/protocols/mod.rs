//! Bit-metered channel, problem instances and the grid-search protocol.

mod channel;
mod grid;
mod instance;

pub use channel::{bits_for, Bits, Channel, Declared, Message, Party, Transcript};
pub use grid::{
    grid_guarantee, quantization_slack, run_grid_protocol, run_grid_protocol_on,
    total_regime_check, GridOutcome, Quantizer, DEFAULT_BITS_PER_COORD, MAX_GRID_POINTS,
};
pub use instance::{verify_solution, BrouwerInstance, PlayerInputs, ProblemKind, Verdict};
