//! The direct problem: given `G₀`, find `p` with `Lp − E₀ = G₀(p)`.
//!
//! `p` is sought as a polygon `Σ x_k hat_k` on the nodes `R_k = kR/n`; collocation at
//! the nodes gives the nonlinear system `A x = G₀(x)` with `A_{ik} = B_{ik} − C_k`,
//! `B_{ik} = L(hat_k)(R_i)`, `C_k = L(hat_k)(R)`, all in closed form.

mod assembly;
mod chart;
mod gzero;
mod ladder;
mod newton;

pub use assembly::{assemble_b, assemble_c, hat_potential, segment_potential, SegmentKind};
pub use chart::{chart_csv, format_sig6, ChartLayout, CHART_ROWS};
pub use gzero::{GZeroMap, GZeroProvenance, NUMERIC_GRID};
pub use ladder::{
    l2_error, l2_norm, polygon_to_density, refinement_ladder, solve_single_node, LadderOptions,
    L2_PANELS_PER_SEGMENT,
};
pub use newton::{
    kantorovich_check, newton_solve, AnsSystem, KantorovichReport, KantorovichStatus,
    NewtonOptions, SolveReport, POSITIVITY_FLOOR,
};
