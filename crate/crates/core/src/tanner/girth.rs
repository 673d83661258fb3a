use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::TannerGraph;
use crate::error::Result;
use crate::qc::{BaseMatrix, MaskMatrix};

/// Length of the shortest cycle, or infinite for forests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Girth {
    pub fn finite(self) -> Option<usize> {
        match self {
            Girth::Finite(g) => Some(g),
            Girth::Infinite => None,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Girth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Girth::Finite(g) => s.serialize_u64(*g as u64),
            Girth::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Shortest cycle through BFS from every node.
///
/// A non-tree edge `(u, w)` met during the BFS from `root` closes a closed
/// walk of length `dist[u] + dist[w] + 1` containing a cycle at most that
/// long; the minimum over all roots is exact.
pub fn girth(graph: &TannerGraph) -> Girth {
    let best = (0..graph.num_nodes())
        .into_par_iter()
        .map(|root| shortest_cycle_from(graph, root, usize::MAX))
        .min()
        .unwrap_or(usize::MAX);
    if best == usize::MAX {
        Girth::Infinite
    } else {
        Girth::Finite(best)
    }
}

fn shortest_cycle_from(graph: &TannerGraph, root: usize, limit: usize) -> usize {
    let total = graph.num_nodes();
    let mut dist = vec![usize::MAX; total];
    let mut parent = vec![usize::MAX; total];
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    let mut best = limit;
    while let Some(u) = queue.pop_front() {
        if 2 * dist[u] + 1 >= best {
            break;
        }
        for w in graph.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                parent[w] = u;
                queue.push_back(w);
            } else if parent[u] != w {
                best = best.min(dist[u] + dist[w] + 1);
            }
        }
    }
    best
}

/// Result of the block-domain girth computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcGirth {
    Exactly(usize),
    /// No cycle of length up to the requested limit.
    AboveLimit,
}

/// Girth of a lifted QC code computed on the protograph.
///
/// A cycle of length `l` in the lifted graph exists iff the protograph has a
/// closed walk of `l` edges that never reuses an edge on consecutive steps
/// (including across the wrap-around) whose alternating shift sum is
/// `0 mod p`. Walks are tracked as (last directed edge, sum mod p) states.
pub fn qc_girth(base: &BaseMatrix, mask: &MaskMatrix, p: usize, max_len: usize) -> Result<QcGirth> {
    base.validate_for(p)?;
    if base.rows() != mask.rows() || base.cols() != mask.cols() {
        return Err(crate::error::Error::Dimension(
            "base and mask dimensions differ".into(),
        ));
    }
    let edges = mask.ones_positions();
    let num_edges = edges.len();
    let mut by_row: Vec<Vec<usize>> = vec![Vec::new(); base.rows()];
    let mut by_col: Vec<Vec<usize>> = vec![Vec::new(); base.cols()];
    for (e, &(j, l)) in edges.iter().enumerate() {
        by_row[j].push(e);
        by_col[l].push(e);
    }
    let shift = |e: usize| {
        let (j, l) = edges[e];
        base.shift(j, l)
    };

    // State index: (edge, direction, sum). Direction 0 = check->variable
    // (adds the shift), 1 = variable->check (subtracts it).
    let state = |e: usize, dir: usize, s: usize| (e * 2 + dir) * p + s;
    let num_states = num_edges * 2 * p;

    let best = (0..num_edges)
        .into_par_iter()
        .map(|first| {
            let (j0, _) = edges[first];
            let mut cur = vec![false; num_states];
            let mut next = vec![false; num_states];
            cur[state(first, 0, shift(first) % p)] = true;
            for len in 2..=max_len {
                next.iter_mut().for_each(|x| *x = false);
                let mut any = false;
                for e in 0..num_edges {
                    for dir in 0..2 {
                        for s in 0..p {
                            if !cur[state(e, dir, s)] {
                                continue;
                            }
                            let (j, l) = edges[e];
                            if dir == 0 {
                                // at variable block l, leave via another edge
                                for &f in &by_col[l] {
                                    if f != e {
                                        let ns = (s + p - shift(f)) % p;
                                        next[state(f, 1, ns)] = true;
                                        any = true;
                                    }
                                }
                            } else {
                                for &f in &by_row[j] {
                                    if f != e {
                                        let ns = (s + shift(f)) % p;
                                        next[state(f, 0, ns)] = true;
                                        any = true;
                                    }
                                }
                            }
                        }
                    }
                }
                std::mem::swap(&mut cur, &mut next);
                if !any {
                    return usize::MAX;
                }
                if len % 2 == 0 {
                    // closing step arrives at check block j0 on an edge other than `first`
                    for &f in &by_row[j0] {
                        if f != first && cur[state(f, 1, 0)] {
                            return len;
                        }
                    }
                }
            }
            usize::MAX
        })
        .min()
        .unwrap_or(usize::MAX);
    Ok(if best == usize::MAX {
        QcGirth::AboveLimit
    } else {
        QcGirth::Exactly(best)
    })
}

/// Diameter and girth-derived iteration figures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiameterReport {
    /// Maximum over components of the component diameter.
    pub diameter: usize,
    pub component_diameters: Vec<usize>,
    pub girth: Girth,
    /// `floor((g - 1) / 4)`; `None` for an acyclic graph.
    pub independent_iterations: Option<usize>,
    /// `diameter < floor((g - 1) / 2)`.
    pub diameter_below_half_girth: bool,
}

pub fn diameter(graph: &TannerGraph) -> DiameterReport {
    let g = girth(graph);
    let component_diameters: Vec<usize> = graph
        .components()
        .iter()
        .map(|comp| {
            comp.par_iter()
                .map(|&root| eccentricity(graph, root))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let diameter = component_diameters.iter().copied().max().unwrap_or(0);
    let (independent_iterations, below) = match g {
        Girth::Finite(g) => (Some((g - 1) / 4), diameter < (g - 1) / 2),
        Girth::Infinite => (None, true),
    };
    DiameterReport {
        diameter,
        component_diameters,
        girth: g,
        independent_iterations,
        diameter_below_half_girth: below,
    }
}

fn eccentricity(graph: &TannerGraph, root: usize) -> usize {
    let mut dist = vec![usize::MAX; graph.num_nodes()];
    let mut queue = VecDeque::from([root]);
    dist[root] = 0;
    let mut far = 0;
    while let Some(u) = queue.pop_front() {
        far = far.max(dist[u]);
        for w in graph.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    far
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ParityCheckMatrix;
    use crate::qc::lift;

    fn graph(rows: &[Vec<u8>]) -> TannerGraph {
        TannerGraph::new(&ParityCheckMatrix::from_dense(rows).unwrap())
    }

    #[test]
    fn four_cycle() {
        let g = graph(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(girth(&g), Girth::Finite(4));
        let d = diameter(&g);
        assert_eq!(d.diameter, 2);
        assert_eq!(d.independent_iterations, Some(0));
        assert!(!d.diameter_below_half_girth);
    }

    #[test]
    fn tree_and_single_edge() {
        let g = graph(&[vec![1, 1, 0], vec![0, 1, 1]]);
        assert_eq!(girth(&g), Girth::Infinite);
        let g = graph(&[vec![1]]);
        assert_eq!(girth(&g), Girth::Infinite);
        assert_eq!(diameter(&g).diameter, 1);
    }

    #[test]
    fn six_cycle() {
        let g = graph(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]);
        assert_eq!(girth(&g), Girth::Finite(6));
        assert_eq!(diameter(&g).diameter, 3);
    }

    #[test]
    fn disconnected_components() {
        let g = graph(&[vec![1, 1, 0, 0], vec![1, 1, 0, 0], vec![0, 0, 1, 0]]);
        let d = diameter(&g);
        assert_eq!(d.component_diameters.len(), 3);
        assert_eq!(d.diameter, 2);
        assert_eq!(d.girth, Girth::Finite(4));
    }

    #[test]
    fn qc_condition_examples() {
        let mask = MaskMatrix::ones(2, 2).unwrap();
        let b = BaseMatrix::new(vec![vec![0, 0], vec![0, 1]]).unwrap();
        let q = qc_girth(&b, &mask, 2, 12).unwrap();
        assert_ne!(q, QcGirth::Exactly(4));
        let bfs = girth(&TannerGraph::new(&lift(&b, &mask, 2).unwrap()));
        assert_eq!(q, QcGirth::Exactly(bfs.finite().unwrap()));

        let b = BaseMatrix::zeros(2, 2).unwrap();
        for p in [1, 3, 7] {
            assert_eq!(qc_girth(&b, &mask, p, 12).unwrap(), QcGirth::Exactly(4));
        }
    }

    #[test]
    fn qc_single_row_is_acyclic() {
        let b = BaseMatrix::new(vec![vec![0, 1, 2]]).unwrap();
        let mask = MaskMatrix::ones(1, 3).unwrap();
        assert_eq!(qc_girth(&b, &mask, 5, 20).unwrap(), QcGirth::AboveLimit);
    }
}
