use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Denominator of random weights. Weights are `m / 2^32` with `m ∈ 1..=2^32`, so sums of a few
/// thousand of them are exact in `f64`.
pub const WEIGHT_SCALE: f64 = 4_294_967_296.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    #[default]
    Unit,
    /// Uniform on `(0, 1]`, dyadic.
    Uniform01,
}

impl FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(WeightMode::Unit),
            "uniform01" => Ok(WeightMode::Uniform01),
            other => Err(Error::param(format!("unknown weight mode '{other}'"))),
        }
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::Unit => "unit",
            WeightMode::Uniform01 => "uniform01",
        })
    }
}

pub(crate) fn uniform01(rng: &mut impl Rng) -> f64 {
    (rng.gen::<u32>() as f64 + 1.0) / WEIGHT_SCALE
}

/// Reweights `g` per `mode`, visiting edges in `(u, v)` order. The weight stream is independent
/// of whatever stream built the topology.
pub fn assign_weights(g: &WeightedGraph, mode: WeightMode, seed: u64) -> WeightedGraph {
    match mode {
        WeightMode::Unit => g.reweighted(|_, _| 1.0),
        WeightMode::Uniform01 => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1);
            g.reweighted(|_, _| uniform01(&mut rng))
        }
    }
}
