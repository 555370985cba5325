use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinHashConfig {
    pub c: usize,
    pub max_collision_fraction: f64,
    pub seed: u64,
}

impl Default for MinHashConfig {
    fn default() -> Self {
        MinHashConfig {
            c: 64,
            max_collision_fraction: 0.5,
            seed: 0x5eed_0f_4a11,
        }
    }
}

/// `c` multiply-shift hash functions `x ↦ ((a·x + b) mod 2^128) >> 64`.
#[derive(Debug, Clone)]
pub struct MinHasher {
    params: Vec<(u128, u128)>,
}

impl MinHasher {
    pub fn new(c: usize, seed: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::param("MinHash needs at least one hash function"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = (0..c)
            .map(|_| (rng.gen::<u128>() | 1, rng.gen::<u128>()))
            .collect();
        Ok(MinHasher { params })
    }

    pub fn c(&self) -> usize {
        self.params.len()
    }

    pub fn hash(&self, j: usize, x: u64) -> u64 {
        let (a, b) = self.params[j];
        (a.wrapping_mul(x as u128).wrapping_add(b) >> 64) as u64
    }

    /// Per-function minima; `u64::MAX` everywhere for the empty set.
    pub fn fingerprint(&self, set: &[u64]) -> Vec<u64> {
        (0..self.c())
            .map(|j| set.iter().map(|&x| self.hash(j, x)).min().unwrap_or(u64::MAX))
            .collect()
    }
}

/// Fingerprint of a union from the fingerprints of its parts.
pub fn merge_fingerprints(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| x.min(y)).collect()
}

/// Fraction of positions where two fingerprints agree.
pub fn collision_fraction(a: &[u64], b: &[u64]) -> f64 {
    let same = a.iter().zip(b).filter(|(x, y)| x == y).count();
    same as f64 / a.len() as f64
}

/// Sequential redundancy filter over candidate benefit sets.
///
/// Keeps, per hash function, the minima of every accepted set. A candidate is rejected when its
/// benefit set is empty or when more than `max_collision_fraction` of its minima were seen before.
#[derive(Debug, Clone)]
pub struct MinHashFilter {
    hasher: MinHasher,
    max_collision_fraction: f64,
    seen: Vec<HashSet<u64>>,
}

impl MinHashFilter {
    pub fn new(cfg: &MinHashConfig) -> Result<Self> {
        if !(0.0..=1.0).contains(&cfg.max_collision_fraction) {
            return Err(Error::param("max_collision_fraction must lie in [0, 1]"));
        }
        let hasher = MinHasher::new(cfg.c, cfg.seed)?;
        Ok(MinHashFilter {
            seen: vec![HashSet::new(); hasher.c()],
            hasher,
            max_collision_fraction: cfg.max_collision_fraction,
        })
    }

    /// Fraction of this set's minima already registered.
    pub fn collisions(&self, benefit: &[u64]) -> f64 {
        let fp = self.hasher.fingerprint(benefit);
        let hit = fp
            .iter()
            .zip(&self.seen)
            .filter(|(h, seen)| seen.contains(h))
            .count();
        hit as f64 / fp.len() as f64
    }

    /// Accepts and registers the set, or rejects it without side effects.
    pub fn offer(&mut self, benefit: &[u64]) -> bool {
        if benefit.is_empty() {
            return false;
        }
        let fp = self.hasher.fingerprint(benefit);
        let hit = fp
            .iter()
            .zip(&self.seen)
            .filter(|(h, seen)| seen.contains(h))
            .count();
        if hit as f64 / fp.len() as f64 > self.max_collision_fraction {
            return false;
        }
        for (h, seen) in fp.into_iter().zip(&mut self.seen) {
            seen.insert(h);
        }
        true
    }
}
