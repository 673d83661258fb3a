//! Trapping-set candidates grown from unions of short cycles.
//!
//! This is a bounded heuristic: seeds are single cycles, and sets grow by
//! absorbing overlapping cycles while they stay within `a_max` variables.
//! The `(a, b)` of every reported set is exact.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::cycles::{enumerate_cycles, CycleIndex, DEFAULT_CYCLE_CAP};
use super::TannerGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TsConfig {
    pub a_max: usize,
    pub b_max: usize,
    /// Longest cycle used as a building block.
    pub max_cycle_len: usize,
    pub per_vn_cap: usize,
    /// Bound on distinct variable sets explored.
    pub max_sets: usize,
}

impl Default for TsConfig {
    fn default() -> Self {
        TsConfig {
            a_max: 12,
            b_max: 8,
            max_cycle_len: 12,
            per_vn_cap: DEFAULT_CYCLE_CAP,
            max_sets: 50_000,
        }
    }
}

/// A candidate TS(a, b).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrappingSetRecord {
    pub variables: Vec<usize>,
    pub a: usize,
    pub b: usize,
    /// Ids (into the cycle index) of the cycles whose union produced the set.
    pub cycles: Vec<usize>,
}

impl TrappingSetRecord {
    pub fn ratio(&self) -> f64 {
        self.b as f64 / self.a as f64
    }

    /// TS(a, 0): the indicator vector of the set is a codeword.
    pub fn is_codeword(&self) -> bool {
        self.b == 0
    }
}

/// Checks adjacent to `vars` an odd number of times.
pub fn induced_odd_checks(graph: &TannerGraph, vars: &[usize]) -> Vec<usize> {
    let mut deg: HashMap<usize, usize> = HashMap::new();
    for &v in vars {
        for &c in graph.var_neighbors(v) {
            *deg.entry(c).or_insert(0) += 1;
        }
    }
    let mut odd: Vec<usize> = deg
        .into_iter()
        .filter(|&(_, k)| k % 2 == 1)
        .map(|(c, _)| c)
        .collect();
    odd.sort_unstable();
    odd
}

/// Enumerates cycles up to `config.max_cycle_len` and grows candidate sets.
pub fn ts_candidates(graph: &TannerGraph, config: &TsConfig) -> (CycleIndex, Vec<TrappingSetRecord>) {
    let index = enumerate_cycles(graph, config.max_cycle_len, config.per_vn_cap);
    let records = ts_from_index(graph, &index, config);
    (index, records)
}

pub(crate) fn ts_from_index(
    graph: &TannerGraph,
    index: &CycleIndex,
    config: &TsConfig,
) -> Vec<TrappingSetRecord> {
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut sets: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut frontier: Vec<usize> = Vec::new();

    for (id, cycle) in index.cycles().iter().enumerate() {
        let mut vars: Vec<usize> = cycle.variables().collect();
        vars.sort_unstable();
        if vars.len() <= config.a_max && sets.len() < config.max_sets && seen.insert(vars.clone()) {
            frontier.push(sets.len());
            sets.push((vars, vec![id]));
        }
    }

    while !frontier.is_empty() && sets.len() < config.max_sets {
        let mut next = Vec::new();
        'grow: for &si in &frontier {
            let (vars, gens) = sets[si].clone();
            let mut candidates: Vec<usize> = vars.iter().flat_map(|&v| index.all_through(v)).collect();
            candidates.sort_unstable();
            candidates.dedup();
            for id in candidates {
                let mut union = vars.clone();
                union.extend(index.cycle(id).variables());
                union.sort_unstable();
                union.dedup();
                if union.len() == vars.len() || union.len() > config.a_max {
                    continue;
                }
                if seen.insert(union.clone()) {
                    let mut g = gens.clone();
                    g.push(id);
                    next.push(sets.len());
                    sets.push((union, g));
                    if sets.len() >= config.max_sets {
                        break 'grow;
                    }
                }
            }
        }
        frontier = next;
    }

    let mut records: Vec<TrappingSetRecord> = sets
        .into_iter()
        .filter_map(|(vars, cycles)| {
            let b = induced_odd_checks(graph, &vars).len();
            (b <= config.b_max).then(|| TrappingSetRecord {
                a: vars.len(),
                b,
                variables: vars,
                cycles,
            })
        })
        .collect();
    records.sort_by(|x, y| {
        (x.b * y.a)
            .cmp(&(y.b * x.a))
            .then(x.a.cmp(&y.a))
            .then_with(|| x.variables.cmp(&y.variables))
    });
    records
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ParityCheckMatrix;

    #[test]
    fn isolated_eight_cycle_is_codeword() {
        let h = ParityCheckMatrix::from_dense(&[
            vec![1, 1, 0, 0],
            vec![0, 1, 1, 0],
            vec![0, 0, 1, 1],
            vec![1, 0, 0, 1],
        ])
        .unwrap();
        let g = TannerGraph::new(&h);
        let (_, recs) = ts_candidates(&g, &TsConfig::default());
        assert_eq!(recs.len(), 1);
        assert_eq!((recs[0].a, recs[0].b), (4, 0));
        assert!(recs[0].is_codeword());
        assert!(h.is_codeword(&[1, 1, 1, 1]));
    }

    #[test]
    fn odd_checks() {
        let h = ParityCheckMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let g = TannerGraph::new(&h);
        assert_eq!(induced_odd_checks(&g, &[0, 1]), vec![1]);
        assert_eq!(induced_odd_checks(&g, &[1]), vec![0, 1]);
    }
}
