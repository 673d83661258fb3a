//! Tanner graph audits: girth, diameter, cycles, ACE/EMD, trapping-set
//! candidates, the spectral bound and brute-force distance oracles.

mod cycles;
mod distance;
mod girth;
mod report;
mod spectral;
mod trapping;

pub use cycles::{
    ace, ace_spectrum, emd, enumerate_cycles, AceSpectrum, AceSpectrumEntry, Cycle, CycleIndex,
    EmdBreakdown, DEFAULT_CYCLE_CAP,
};
pub use distance::{min_distance_bruteforce, MAX_BRUTEFORCE_LENGTH};
pub use girth::{diameter, girth, qc_girth, DiameterReport, Girth, QcGirth};
pub use report::{audit, AuditConfig, AuditReport};
pub use spectral::{leading_eigenvalues, spectral_bound, SpectralBoundResult};
pub use trapping::{induced_odd_checks, ts_candidates, TrappingSetRecord, TsConfig};

use crate::matrix::ParityCheckMatrix;

/// Bipartite graph of variable nodes (columns) and check nodes (rows).
///
/// Nodes also have a unified index: variable `v` is `v`, check `c` is `n + c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    var_adj: Vec<Vec<usize>>,
    chk_adj: Vec<Vec<usize>>,
}

impl TannerGraph {
    pub fn new(h: &ParityCheckMatrix) -> Self {
        TannerGraph {
            var_adj: h.cols().to_vec(),
            chk_adj: h.rows().to_vec(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.var_adj.len()
    }

    pub fn num_checks(&self) -> usize {
        self.chk_adj.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.var_adj.len() + self.chk_adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.var_adj.iter().map(Vec::len).sum()
    }

    /// Checks adjacent to variable `v`.
    pub fn var_neighbors(&self, v: usize) -> &[usize] {
        &self.var_adj[v]
    }

    /// Variables adjacent to check `c`.
    pub fn check_neighbors(&self, c: usize) -> &[usize] {
        &self.chk_adj[c]
    }

    /// d(v).
    pub fn var_degree(&self, v: usize) -> usize {
        self.var_adj[v].len()
    }

    pub fn is_var(&self, node: usize) -> bool {
        node < self.var_adj.len()
    }

    /// Neighbors of a unified node index, as unified indices.
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.var_adj.len();
        let (list, offset) = if node < n {
            (&self.var_adj[node], n)
        } else {
            (&self.chk_adj[node - n], 0)
        };
        list.iter().map(move |&x| x + offset)
    }

    /// Connected components as lists of unified node indices.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let total = self.num_nodes();
        let mut seen = vec![false; total];
        let mut out = Vec::new();
        for start in 0..total {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.num_nodes() > 0 && self.components().len() == 1
    }
}

impl From<&ParityCheckMatrix> for TannerGraph {
    fn from(h: &ParityCheckMatrix) -> Self {
        TannerGraph::new(h)
    }
}
