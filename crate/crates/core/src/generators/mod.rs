//! Instance generators. All outputs are simple graphs and bit-identical per parameters and seed.

mod random;
mod reduction;
mod weights;

pub use random::{
    degree_preserving_swaps, gen_gilbert, gen_hyperbolic, gen_mc_powerlaw, havel_hakimi,
    hyperbolic_expected_degree, hyperbolic_radius, is_graphical, powerlaw_degree_sequence,
};
pub use reduction::{
    default_gamma, is_vertex_cover, lowerbound_star, vc_to_msp_transform, LowerBoundStar, Role,
    TransformArtifacts,
};
pub use weights::{assign_weights, WeightMode, WEIGHT_SCALE};
