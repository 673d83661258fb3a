use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-12;

/// Edge-perspective degree distribution pair.
///
/// Both sides are stored as `(degree, fraction)` sorted by degree with
/// zero-fraction entries dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    variable: Vec<(usize, f64)>,
    check: Vec<(usize, f64)>,
}

fn collect_side(side: &str, pairs: &[(usize, f64)]) -> Result<Vec<(usize, f64)>> {
    let mut map = BTreeMap::new();
    for &(degree, fraction) in pairs {
        if degree < 2 {
            return Err(Error::Distribution(format!(
                "{side} degree {degree} is below 2"
            )));
        }
        if !fraction.is_finite() || fraction < 0.0 {
            return Err(Error::Distribution(format!(
                "{side} fraction {fraction} for degree {degree} is not a non-negative number"
            )));
        }
        *map.entry(degree).or_insert(0.0) += fraction;
    }
    let out: Vec<(usize, f64)> = map.into_iter().filter(|&(_, f)| f > 0.0).collect();
    if out.is_empty() {
        return Err(Error::Distribution(format!("{side} distribution is empty")));
    }
    let sum: f64 = out.iter().map(|&(_, f)| f).sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::Distribution(format!(
            "{side} fractions sum to {sum}, not 1"
        )));
    }
    Ok(out)
}

fn inverse_mean(side: &[(usize, f64)]) -> f64 {
    side.iter().map(|&(d, f)| f / d as f64).sum()
}

impl DegreeDistribution {
    /// Validates sums, degrees and the design rate.
    pub fn new(variable: &[(usize, f64)], check: &[(usize, f64)]) -> Result<Self> {
        let dist = DegreeDistribution {
            variable: collect_side("variable", variable)?,
            check: collect_side("check", check)?,
        };
        let rate = dist.design_rate();
        if !(rate > 0.0 && rate < 1.0) {
            return Err(Error::Distribution(format!(
                "design rate {rate} is outside (0, 1)"
            )));
        }
        Ok(dist)
    }

    /// `(j, k)`-regular ensemble.
    pub fn regular(variable_degree: usize, check_degree: usize) -> Result<Self> {
        Self::new(&[(variable_degree, 1.0)], &[(check_degree, 1.0)])
    }

    pub fn variable(&self) -> &[(usize, f64)] {
        &self.variable
    }

    pub fn check(&self) -> &[(usize, f64)] {
        &self.check
    }

    /// Average variable degree `1 / sum(lambda_i / i)`.
    pub fn variable_average(&self) -> f64 {
        1.0 / inverse_mean(&self.variable)
    }

    /// Average check degree `1 / sum(rho_i / i)`.
    pub fn check_average(&self) -> f64 {
        1.0 / inverse_mean(&self.check)
    }

    pub fn design_rate(&self) -> f64 {
        1.0 - inverse_mean(&self.check) / inverse_mean(&self.variable)
    }

    pub fn max_variable_degree(&self) -> usize {
        self.variable.last().map_or(0, |&(d, _)| d)
    }

    pub fn max_check_degree(&self) -> usize {
        self.check.last().map_or(0, |&(d, _)| d)
    }

    /// Parses lines `V degree fraction` and `C degree fraction`. Blank lines
    /// and lines starting with `#` are ignored.
    pub fn parse(reader: impl Read) -> Result<Self> {
        let mut variable = Vec::new();
        let mut check = Vec::new();
        for (idx, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let ln = idx + 1;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = text.split_whitespace().collect();
            let [side, degree, fraction] = toks[..] else {
                return Err(Error::parse(ln, "expected `V|C degree fraction`"));
            };
            let degree: usize = degree
                .parse()
                .map_err(|_| Error::parse(ln, format!("bad degree {degree:?}")))?;
            let fraction: f64 = fraction
                .parse()
                .map_err(|_| Error::parse(ln, format!("bad fraction {fraction:?}")))?;
            match side {
                "V" | "v" => variable.push((degree, fraction)),
                "C" | "c" => check.push((degree, fraction)),
                other => {
                    return Err(Error::parse(ln, format!("unknown side {other:?}")));
                }
            }
        }
        Self::new(&variable, &check)
    }

    /// Text form accepted by [`DegreeDistribution::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for &(d, f) in &self.variable {
            let _ = writeln!(out, "V {d} {f:.17}");
        }
        for &(d, f) in &self.check {
            let _ = writeln!(out, "C {d} {f:.17}");
        }
        out
    }
}
