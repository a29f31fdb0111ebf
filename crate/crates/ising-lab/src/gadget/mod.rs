//! Gadget machinery: straight-line programs, their compilation to
//! bounded-degree graphs, the fixed-point analysis at 1, the contraction
//! cover, and the escape construction implementing arbitrary weights.

pub mod approach;
pub mod cover;
pub mod dynamics;
pub mod implement;
pub mod program;

pub use approach::approach_one;
pub use cover::{build_cover, navigate_to, CoverFamily};
pub use implement::{figure8_graph, implement_target, minus_one_from_zero, ImplementOutcome};
pub use dynamics::{
    closed_form_iterate, dynamics_info, f_map, g_map, h_map, no_exceptional_points_check,
    DynamicsInfo, IterMap,
};
pub use program::{
    program_compile, program_compile_verified, program_eval, IsingProgram, ProgramTrace,
};
