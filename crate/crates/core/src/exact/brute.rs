use rayon::prelude::*;

use crate::ball::{limited_profile, validate_params, verify_krho};
use crate::error::{Error, Result};
use crate::exact::ilp::candidate_pairs;
use crate::graph::{NodeId, WeightedGraph};
use crate::shortcut::ShortcutSet;

/// Subsets the oracle may examine before giving up.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

const CHUNK: usize = 4096;

/// Outcome of an exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub shortcuts: ShortcutSet,
    /// Number of candidate shortcuts searched over.
    pub candidates: usize,
    /// Subsets checked, including the winner.
    pub evaluated: u64,
}

fn binomial(m: usize, j: usize) -> u64 {
    if j > m {
        return 0;
    }
    let j = j.min(m - j);
    let mut acc: u128 = 1;
    for i in 0..j {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Advances `idx` to the next `j`-combination of `0..m` in lexicographic order.
fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let j = idx.len();
    let Some(i) = (0..j).rev().find(|&i| idx[i] < m - j + i) else {
        return false;
    };
    idx[i] += 1;
    for t in i + 1..j {
        idx[t] = idx[t - 1] + 1;
    }
    true
}

/// Minimum shortcut set with the default budget. See [`brute_force_with_budget`].
pub fn brute_force_msp(
    g: &WeightedGraph,
    k: u32,
    rho: usize,
    max_card: Option<usize>,
) -> Result<ShortcutSet> {
    Ok(brute_force_with_budget(g, k, rho, max_card, DEFAULT_BUDGET)?.shortcuts)
}

/// Exhaustive search over cardinalities `0, 1, 2, …`.
///
/// Candidates are the pairs of [`candidate_pairs`] in `(u, v)` order and subsets are visited in
/// lexicographic combination order, so the answer is the first valid subset of minimum size.
/// A cardinality level is only entered if all of its subsets fit in the remaining budget.
/// Adding shortcuts never removes a ball, so only the original violators are re-checked.
pub fn brute_force_with_budget(
    g: &WeightedGraph,
    k: u32,
    rho: usize,
    max_card: Option<usize>,
    budget: u64,
) -> Result<BruteForceResult> {
    validate_params(g, k, rho)?;
    let cands = candidate_pairs(g, rho);
    let m = cands.len();
    let violators: Vec<NodeId> = verify_krho(g, k, rho)?.nodes();
    let mut evaluated = 1u64;
    if violators.is_empty() {
        return Ok(BruteForceResult {
            shortcuts: ShortcutSet::for_graph(g),
            candidates: m,
            evaluated,
        });
    }
    let valid = |idx: &[usize]| {
        let mut h = g.clone();
        for &i in idx {
            let (u, v, w) = cands[i];
            h.upsert_edge(u, v, w);
        }
        violators
            .iter()
            .all(|&v| limited_profile(&h, v, k, rho).0.has_ball)
    };
    let top = max_card.unwrap_or(m).min(m);
    for j in 1..=top {
        let level = binomial(m, j);
        if level > budget.saturating_sub(evaluated) {
            return Err(Error::OracleBudget(format!(
                "{m} candidates, cardinality {j} needs {level} more subsets, budget {budget}"
            )));
        }
        let mut idx: Vec<usize> = (0..j).collect();
        let mut more = true;
        while more {
            let mut chunk = Vec::with_capacity(CHUNK);
            while more && chunk.len() < CHUNK {
                chunk.push(idx.clone());
                more = next_combination(&mut idx, m);
            }
            if let Some(pos) = chunk.par_iter().position_first(|c| valid(c)) {
                evaluated += pos as u64 + 1;
                let mut set = ShortcutSet::for_graph(g);
                for &i in &chunk[pos] {
                    let (u, v, w) = cands[i];
                    set.insert(u, v, w);
                }
                return Ok(BruteForceResult {
                    shortcuts: set,
                    candidates: m,
                    evaluated,
                });
            }
            evaluated += chunk.len() as u64;
        }
    }
    Err(Error::OracleBudget(format!(
        "no valid set with at most {top} of {m} candidate shortcuts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shortcut::apply_shortcuts;

    fn path(n: usize) -> WeightedGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        WeightedGraph::unit(n, &edges).unwrap()
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut idx = vec![0, 1];
        let mut seen = vec![idx.clone()];
        while next_combination(&mut idx, 4) {
            seen.push(idx.clone());
        }
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(20, 0), 1);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn krho_graph_needs_nothing() {
        let g = WeightedGraph::unit(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(brute_force_msp(&g, 1, 2, None).unwrap().is_empty());
    }

    #[test]
    fn path5_needs_two() {
        let g = path(5);
        let s = brute_force_msp(&g, 2, 4, None).unwrap();
        assert_eq!(s.len(), 2);
        let h = apply_shortcuts(&g, &s).unwrap();
        assert!(verify_krho(&h, 2, 4).unwrap().is_empty());
    }

    #[test]
    fn path3_single_shortcut_serves_both_ends() {
        let s = brute_force_msp(&path(3), 1, 2, None).unwrap();
        let pairs: Vec<_> = s.iter().map(|s| (s.u, s.v)).collect();
        assert_eq!(pairs, vec![(0, 2)]);
    }

    #[test]
    fn budget_is_explicit() {
        let g = path(8);
        let err = brute_force_with_budget(&g, 1, 7, None, 10).unwrap_err();
        assert!(matches!(err, Error::OracleBudget(_)));
        assert!(err.to_string().contains("oracle out of budget"));
    }

    #[test]
    fn max_card_caps_the_search() {
        let err = brute_force_msp(&path(5), 2, 4, Some(1)).unwrap_err();
        assert!(matches!(err, Error::OracleBudget(_)));
    }
}
