//! Shortcutting weighted graphs into (k, ρ)-graphs.
//!
//! A node has a (k, ρ)-ball when its ρ nearest nodes (by weight) are all reachable along a
//! shortest path of at most k edges. This crate computes small shortcut sets that give every
//! node such a ball:
//!
//! * [`graph`], [`paths`], [`ball`], [`shortcut`]: graph representation, hop-minimal shortest
//!   path trees, ball profiling, verification and shortcut insertion.
//! * [`heuristics`]: greedy, per-source dynamic programming and its pair-shortcutting,
//!   set-alignment and MinHash-filtered refinements, plus the exact k = 1 solver.
//! * [`exact`]: ILP encoding, LP-file output, external solver driver and a brute-force oracle.
//! * [`generators`]: random graph models and the vertex-cover / lower-bound gadget graphs.
//! * [`harness`]: experiment campaigns producing CSV result rows.

pub mod ball;
pub mod error;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod heuristics;
pub mod io;
pub mod paths;
pub mod shortcut;

pub use ball::{ball_profile, is_krho_graph, verify_krho, BallProfile, ViolationReport};
pub use error::{Error, Result};
pub use graph::{NodeId, WeightedGraph};
pub use paths::{closest_path_tree, AllPairs, ClosestPathTree};
pub use shortcut::{apply_shortcuts, Shortcut, ShortcutSet};
