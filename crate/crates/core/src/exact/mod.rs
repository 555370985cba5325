//! Exact solvers: an ILP encoding solved out of process, and brute force for tiny instances.

mod brute;
mod ilp;
mod lp;
mod solve;

pub use brute::{brute_force_msp, brute_force_with_budget, BruteForceResult, DEFAULT_BUDGET};
pub use ilp::{build_ilp, candidate_pairs, IlpModel, Row, RowTag, Sense, VarKind, Variant};
pub use lp::{lp_string, read_lp, write_lp, write_lp_to, LpSummary};
pub use solve::{solve_external, SolveOutcome, SolveStatus};
