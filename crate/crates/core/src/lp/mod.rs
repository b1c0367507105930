//! Linear-program assembly: the robustified operational constraints, the
//! hypograph rows that linearize each event's overlap time, and the
//! effective-energy objective.

mod build;
mod format;
mod program;
mod sigma;
mod var;

pub use build::{build_lp, robustify, BuildError};
pub use format::{read_lp, write_lp, FormatError};
pub use program::{LinearProgram, Row, RowBound};
pub use sigma::{evaluate_sigma, phase_blocks};
pub use var::{EventVars, VarKind, VarTable};
