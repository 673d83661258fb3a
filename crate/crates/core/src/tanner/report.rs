//! Combined structural audit of a parity-check matrix.

use std::fmt::Write as _;

use serde::Serialize;

use super::cycles::{enumerate_cycles, spectrum_from_index, AceSpectrum, DEFAULT_CYCLE_CAP};
use super::girth::{diameter, DiameterReport, Girth};
use super::spectral::{spectral_bound, SpectralBoundResult};
use super::trapping::{ts_from_index, TrappingSetRecord, TsConfig};
use super::TannerGraph;
use crate::matrix::ParityCheckMatrix;

#[derive(Debug, Clone, Serialize)]
pub struct AuditConfig {
    /// Longest cycle enumerated; defaults to girth + 6.
    pub max_cycle_len: Option<usize>,
    pub per_vn_cap: usize,
    pub a_max: usize,
    pub b_max: usize,
    pub max_ts_sets: usize,
    /// Largest `n + r` for which the spectral bound is attempted.
    pub spectral_max_nodes: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            max_cycle_len: None,
            per_vn_cap: DEFAULT_CYCLE_CAP,
            a_max: 12,
            b_max: 8,
            max_ts_sets: 50_000,
            spectral_max_nodes: 20_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub n: usize,
    pub r: usize,
    pub edges: usize,
    pub girth: Girth,
    pub diameter: DiameterReport,
    pub ace_spectrum: AceSpectrum,
    pub trapping_sets: Vec<TrappingSetRecord>,
    pub cycles_truncated: bool,
    pub spectral: Option<SpectralBoundResult>,
    /// Reason the spectral section is missing.
    pub spectral_error: Option<String>,
}

pub fn audit(h: &ParityCheckMatrix, config: &AuditConfig) -> AuditReport {
    let graph = TannerGraph::new(h);
    let diam = diameter(&graph);
    let g = diam.girth;
    let max_len = config
        .max_cycle_len
        .unwrap_or_else(|| g.finite().map_or(0, |g| g + 6));
    let index = enumerate_cycles(&graph, max_len, config.per_vn_cap);
    let ace_spectrum = spectrum_from_index(&graph, &index, g);
    let ts_config = TsConfig {
        a_max: config.a_max,
        b_max: config.b_max,
        max_cycle_len: max_len,
        per_vn_cap: config.per_vn_cap,
        max_sets: config.max_ts_sets,
    };
    let trapping_sets = ts_from_index(&graph, &index, &ts_config);
    let (spectral, spectral_error) = if h.n() + h.r() > config.spectral_max_nodes {
        (None, Some("graph too large for the spectral solver".to_string()))
    } else {
        match spectral_bound(h) {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    AuditReport {
        n: h.n(),
        r: h.r(),
        edges: h.num_nonzeros(),
        girth: g,
        diameter: diam,
        ace_spectrum,
        trapping_sets,
        cycles_truncated: index.any_truncated(),
        spectral,
        spectral_error,
    }
}

impl AuditReport {
    /// Human-readable rendering.
    pub fn to_text(&self, max_ts_rows: usize) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "code: n={} r={} edges={}", self.n, self.r, self.edges);
        let _ = writeln!(s, "girth: {}", self.girth);
        let d = &self.diameter;
        let _ = writeln!(s, "diameter: {}", d.diameter);
        match d.independent_iterations {
            Some(m) => {
                let _ = writeln!(s, "independent iterations: {m}");
            }
            None => {
                let _ = writeln!(s, "independent iterations: unbounded");
            }
        }
        let _ = writeln!(
            s,
            "diameter below floor((g-1)/2): {}",
            d.diameter_below_half_girth
        );
        let _ = writeln!(s, "\nACE spectrum (up to length {}):", self.ace_spectrum.max_len);
        let _ = writeln!(s, "  len  cycles  min_ace  truncated  histogram(ace:count)");
        for e in &self.ace_spectrum.entries {
            let hist: Vec<String> = e.histogram.iter().map(|(a, c)| format!("{a}:{c}")).collect();
            let _ = writeln!(
                s,
                "  {:>3}  {:>6}  {:>7}  {:>9}  {}",
                e.length,
                e.cycles,
                e.min_ace.map_or("-".to_string(), |v| v.to_string()),
                e.truncated,
                hist.join(" ")
            );
        }
        let _ = writeln!(
            s,
            "\ntrapping-set candidates: {} (showing up to {max_ts_rows})",
            self.trapping_sets.len()
        );
        let _ = writeln!(s, "  a   b   b/a     variables");
        for t in self.trapping_sets.iter().take(max_ts_rows) {
            let _ = writeln!(
                s,
                "  {:<3} {:<3} {:<7.4} {:?}",
                t.a,
                t.b,
                t.ratio(),
                t.variables
            );
        }
        let _ = writeln!(s);
        match (&self.spectral, &self.spectral_error) {
            (Some(sp), _) => {
                let _ = writeln!(s, "mu1: {:.9}", sp.mu1);
                let _ = writeln!(s, "mu2: {:.9}", sp.mu2);
                match sp.bound {
                    Some(b) => {
                        let _ = writeln!(s, "pseudoweight bound: {b:.6}");
                    }
                    None => {
                        let _ = writeln!(s, "pseudoweight bound: not applicable");
                    }
                }
            }
            (None, Some(err)) => {
                let _ = writeln!(s, "spectral: {err}");
            }
            (None, None) => {}
        }
        s
    }
}
