//! Simple-cycle enumeration and the ACE / EMD cycle metrics.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::girth::{girth, Girth};
use super::TannerGraph;

/// Default bound on stored cycles per (variable node, length).
pub const DEFAULT_CYCLE_CAP: usize = 10_000;

/// A simple cycle in unified node indices, alternating variable/check and
/// starting at a variable node. The closing edge runs from the last node
/// back to the first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cycle {
    nodes: Vec<usize>,
}

impl Cycle {
    /// Canonicalizes a closed node sequence: rotate to the smallest variable
    /// node, then pick the direction with the smaller second element.
    pub fn new(graph: &TannerGraph, nodes: Vec<usize>) -> Option<Self> {
        let len = nodes.len();
        if len < 4 || len % 2 != 0 {
            return None;
        }
        let mut seen = nodes.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        for i in 0..len {
            let (a, b) = (nodes[i], nodes[(i + 1) % len]);
            if graph.is_var(a) == graph.is_var(b) || !graph.neighbors(a).any(|x| x == b) {
                return None;
            }
        }
        let start = (0..len)
            .filter(|&i| graph.is_var(nodes[i]))
            .min_by_key(|&i| nodes[i])?;
        let fwd: Vec<usize> = (0..len).map(|k| nodes[(start + k) % len]).collect();
        let rev: Vec<usize> = (0..len).map(|k| nodes[(start + len - k) % len]).collect();
        Some(Cycle {
            nodes: if fwd[1] <= rev[1] { fwd } else { rev },
        })
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// V_c, the variable nodes of the cycle.
    pub fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().step_by(2).copied()
    }

    /// Check nodes of the cycle as check indices.
    pub fn checks(&self, graph: &TannerGraph) -> impl Iterator<Item = usize> + '_ {
        let n = graph.num_vars();
        self.nodes.iter().skip(1).step_by(2).map(move |&c| c - n)
    }
}

/// Cycles of length up to `max_len`, indexed by the variable nodes they pass through.
#[derive(Debug, Clone)]
pub struct CycleIndex {
    pub max_len: usize,
    pub per_vn_cap: usize,
    cycles: Vec<Cycle>,
    // per variable node: length -> stored cycle ids
    by_var: Vec<BTreeMap<usize, Vec<usize>>>,
    // per variable node: length -> number of cycles found (stored or not)
    counts: Vec<BTreeMap<usize, usize>>,
}

impl CycleIndex {
    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn cycle(&self, id: usize) -> &Cycle {
        &self.cycles[id]
    }

    /// Stored cycles of length `len` through `v`.
    pub fn through(&self, v: usize, len: usize) -> &[usize] {
        self.by_var[v].get(&len).map_or(&[], Vec::as_slice)
    }

    /// All stored cycle ids through `v`, shortest first.
    pub fn all_through(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.by_var[v].values().flatten().copied()
    }

    /// Exact number of length-`len` cycles through `v`.
    pub fn count(&self, v: usize, len: usize) -> usize {
        self.counts[v].get(&len).copied().unwrap_or(0)
    }

    /// `true` when some length-`len` cycle through `v` was not stored.
    pub fn truncated(&self, v: usize, len: usize) -> bool {
        self.count(v, len) > self.through(v, len).len()
    }

    pub fn any_truncated(&self) -> bool {
        (0..self.by_var.len())
            .any(|v| self.counts[v].keys().any(|&len| self.truncated(v, len)))
    }
}

/// Enumerates all simple cycles of length `<= max_len`.
///
/// Each cycle is generated once, from its smallest variable node, in the
/// direction whose first check is smaller than its last. Every stored cycle
/// is canonical, so the lists are duplicate-free.
pub fn enumerate_cycles(graph: &TannerGraph, max_len: usize, per_vn_cap: usize) -> CycleIndex {
    let n = graph.num_vars();
    let found: Vec<Vec<Vec<usize>>> = (0..n)
        .into_par_iter()
        .map(|root| cycles_rooted_at(graph, root, max_len))
        .collect();

    let mut index = CycleIndex {
        max_len,
        per_vn_cap,
        cycles: Vec::new(),
        by_var: vec![BTreeMap::new(); n],
        counts: vec![BTreeMap::new(); n],
    };
    for nodes in found.into_iter().flatten() {
        let len = nodes.len();
        let vars: Vec<usize> = nodes.iter().step_by(2).copied().collect();
        let mut room = false;
        for &v in &vars {
            *index.counts[v].entry(len).or_insert(0) += 1;
            room |= index.by_var[v].get(&len).map_or(0, Vec::len) < per_vn_cap;
        }
        if !room {
            continue;
        }
        let id = index.cycles.len();
        for &v in &vars {
            let list = index.by_var[v].entry(len).or_default();
            if list.len() < per_vn_cap {
                list.push(id);
            }
        }
        index.cycles.push(Cycle { nodes });
    }
    // Stable order: by length, then node sequence.
    let mut order: Vec<usize> = (0..index.cycles.len()).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (&index.cycles[a], &index.cycles[b]);
        (ca.len(), &ca.nodes).cmp(&(cb.len(), &cb.nodes))
    });
    let mut remap = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let mut cycles = vec![Cycle { nodes: Vec::new() }; order.len()];
    for (old, c) in index.cycles.drain(..).enumerate() {
        cycles[remap[old]] = c;
    }
    index.cycles = cycles;
    for lists in &mut index.by_var {
        for ids in lists.values_mut() {
            ids.iter_mut().for_each(|id| *id = remap[*id]);
            ids.sort_unstable();
        }
    }
    index
}

fn cycles_rooted_at(graph: &TannerGraph, root: usize, max_len: usize) -> Vec<Vec<usize>> {
    let n = graph.num_vars();
    let mut out = Vec::new();
    let mut on_path = vec![false; graph.num_nodes()];
    let mut path = vec![root];
    on_path[root] = true;
    extend(graph, root, max_len, n, &mut path, &mut on_path, &mut out);
    out
}

fn extend(
    graph: &TannerGraph,
    root: usize,
    max_len: usize,
    n: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let last = *path.last().unwrap();
    let at_check = last >= n;
    if at_check && path.len() >= 4 && path[1] < last {
        // closing edge back to the root
        if graph.check_neighbors(last - n).binary_search(&root).is_ok() {
            out.push(path.clone());
        }
    }
    // path.len() nodes so far; the cycle length equals the node count at closing
    let room = if at_check {
        path.len() + 2 <= max_len
    } else {
        path.len() < max_len
    };
    if !room {
        return;
    }
    let next: Vec<usize> = graph.neighbors(last).collect();
    for w in next {
        if on_path[w] || (at_check && w <= root) {
            continue;
        }
        on_path[w] = true;
        path.push(w);
        extend(graph, root, max_len, n, path, on_path, out);
        path.pop();
        on_path[w] = false;
    }
}

/// ACE(C) = sum over cycle variables of `d(v) - 2`.
pub fn ace(cycle: &Cycle, graph: &TannerGraph) -> usize {
    cycle.variables().map(|v| graph.var_degree(v) - 2).sum()
}

/// Classification of the checks and edges around a cycle's variable set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EmdBreakdown {
    /// |E^ext|, edges into checks connected to V_c exactly once.
    pub emd: usize,
    pub cycle_checks: usize,
    pub cut_checks: usize,
    pub ext_checks: usize,
    /// Edges from V_c into cycle checks (including chords).
    pub cycle_edges: usize,
    pub cut_edges: usize,
    pub ext_edges: usize,
}

/// Extrinsic message degree of a cycle.
pub fn emd(cycle: &Cycle, graph: &TannerGraph) -> EmdBreakdown {
    let on_cycle: Vec<usize> = cycle.checks(graph).collect();
    let mut conn: HashMap<usize, usize> = HashMap::new();
    for v in cycle.variables() {
        for &c in graph.var_neighbors(v) {
            *conn.entry(c).or_insert(0) += 1;
        }
    }
    let mut out = EmdBreakdown {
        emd: 0,
        cycle_checks: 0,
        cut_checks: 0,
        ext_checks: 0,
        cycle_edges: 0,
        cut_edges: 0,
        ext_edges: 0,
    };
    for (&c, &k) in &conn {
        if on_cycle.contains(&c) {
            out.cycle_checks += 1;
            out.cycle_edges += k;
        } else if k >= 2 {
            out.cut_checks += 1;
            out.cut_edges += k;
        } else {
            out.ext_checks += 1;
            out.ext_edges += k;
        }
    }
    out.emd = out.ext_edges;
    out
}

/// Spectrum row for one cycle length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AceSpectrumEntry {
    pub length: usize,
    /// Smallest ACE over all stored cycles of this length.
    pub min_ace: Option<usize>,
    /// Per variable node, the smallest ACE among stored cycles of this
    /// length through it.
    pub per_vn: Vec<Option<usize>>,
    /// Number of variable nodes whose smallest ACE equals each value.
    pub histogram: BTreeMap<usize, usize>,
    pub cycles: usize,
    pub truncated: bool,
}

/// ACE spectrum over even lengths from the girth up to `max_len`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AceSpectrum {
    pub girth: Girth,
    pub max_len: usize,
    pub entries: Vec<AceSpectrumEntry>,
}

impl AceSpectrum {
    pub fn entry(&self, length: usize) -> Option<&AceSpectrumEntry> {
        self.entries.iter().find(|e| e.length == length)
    }

    pub fn truncated(&self) -> bool {
        self.entries.iter().any(|e| e.truncated)
    }
}

/// Builds the ACE spectrum. `max_len` defaults to girth + 6.
pub fn ace_spectrum(graph: &TannerGraph, max_len: Option<usize>, per_vn_cap: usize) -> AceSpectrum {
    let g = girth(graph);
    let Girth::Finite(gv) = g else {
        return AceSpectrum {
            girth: g,
            max_len: max_len.unwrap_or(0),
            entries: Vec::new(),
        };
    };
    let max_len = max_len.unwrap_or(gv + 6);
    let index = enumerate_cycles(graph, max_len, per_vn_cap);
    spectrum_from_index(graph, &index, g)
}

pub(crate) fn spectrum_from_index(graph: &TannerGraph, index: &CycleIndex, g: Girth) -> AceSpectrum {
    let n = graph.num_vars();
    let aces: Vec<usize> = index.cycles().iter().map(|c| ace(c, graph)).collect();
    let start = g.finite().unwrap_or(index.max_len + 2);
    let entries = (start..=index.max_len)
        .step_by(2)
        .map(|len| {
            let per_vn: Vec<Option<usize>> = (0..n)
                .map(|v| index.through(v, len).iter().map(|&id| aces[id]).min())
                .collect();
            let mut histogram = BTreeMap::new();
            for a in per_vn.iter().flatten() {
                *histogram.entry(*a).or_insert(0) += 1;
            }
            let cycles = index.cycles().iter().filter(|c| c.len() == len).count();
            AceSpectrumEntry {
                length: len,
                min_ace: per_vn.iter().flatten().copied().min(),
                per_vn,
                histogram,
                cycles,
                truncated: (0..n).any(|v| index.truncated(v, len)),
            }
        })
        .collect();
    AceSpectrum {
        girth: g,
        max_len: index.max_len,
        entries,
    }
}
