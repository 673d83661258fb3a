//! Labeling search: choose circulant shifts for a fixed mask.
//!
//! Guess-and-test with hill climbing. Each step changes one unmasked shift
//! uniformly at random and keeps the change unless the objective gets
//! worse; after `4 J L` consecutive rejected moves the walk restarts from a
//! fresh random labeling. The best labeling seen is returned.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{lift, BaseMatrix, MaskMatrix};
use crate::error::{Error, Result};
use crate::tanner::{ace_spectrum, qc_girth, QcGirth, TannerGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Objective {
    MaxGirth,
    /// Maximize girth, then minimize the number of (variable node, cycle
    /// length) pairs with length `<= max_len` whose smallest ACE is below `eta`.
    MaxGirthThenMinAceViolations { max_len: usize, eta: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchConfig {
    pub objective: Objective,
    /// Maximum number of candidate evaluations.
    pub budget: usize,
    pub seed: u64,
    /// Cycles longer than this are not distinguished.
    pub girth_limit: usize,
}

impl SearchConfig {
    pub fn new(objective: Objective, budget: usize, seed: u64) -> Self {
        SearchConfig {
            objective,
            budget,
            seed,
            girth_limit: 16,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    pub base: BaseMatrix,
    /// `None` when no cycle up to `girth_limit` exists.
    pub girth: Option<usize>,
    pub ace_violations: Option<usize>,
    pub evaluations: usize,
    pub restarts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Score {
    girth: usize,
    // negated violation count so that larger is better
    neg_violations: i64,
}

struct Evaluator<'a> {
    mask: &'a MaskMatrix,
    p: usize,
    config: &'a SearchConfig,
}

impl Evaluator<'_> {
    fn score(&self, base: &BaseMatrix) -> Result<(Score, Option<usize>, Option<usize>)> {
        let g = qc_girth(base, self.mask, self.p, self.config.girth_limit)?;
        let (girth_value, girth) = match g {
            QcGirth::Exactly(g) => (g, Some(g)),
            QcGirth::AboveLimit => (self.config.girth_limit + 2, None),
        };
        let violations = match self.config.objective {
            Objective::MaxGirth => None,
            Objective::MaxGirthThenMinAceViolations { max_len, eta } => {
                let h = lift(base, self.mask, self.p)?;
                let graph = TannerGraph::new(&h);
                let spectrum = ace_spectrum(&graph, Some(max_len), crate::tanner::DEFAULT_CYCLE_CAP);
                Some(
                    spectrum
                        .entries
                        .iter()
                        .flat_map(|e| e.per_vn.iter().flatten())
                        .filter(|&&a| a < eta)
                        .count(),
                )
            }
        };
        Ok((
            Score {
                girth: girth_value,
                neg_violations: -(violations.unwrap_or(0) as i64),
            },
            girth,
            violations,
        ))
    }
}

fn random_labeling(mask: &MaskMatrix, p: usize, rng: &mut ChaCha8Rng) -> BaseMatrix {
    let shifts = mask
        .bits()
        .iter()
        .map(|row| {
            row.iter()
                .map(|&b| if b { rng.gen_range(0..p) } else { 0 })
                .collect()
        })
        .collect();
    BaseMatrix { shifts }
}

/// Searches shifts for `mask` at lifting size `p`. Deterministic per seed.
pub fn label_search(mask: &MaskMatrix, p: usize, config: &SearchConfig) -> Result<SearchOutcome> {
    if config.budget == 0 {
        return Err(Error::param("search budget must be at least 1"));
    }
    if p == 0 {
        return Err(Error::param("lifting size p must be positive"));
    }
    mask.check_columns()?;
    let positions = mask.ones_positions();
    if positions.is_empty() {
        return Err(Error::param("mask has no nonzero blocks"));
    }
    let eval = Evaluator { mask, p, config };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let patience = 4 * mask.rows() * mask.cols();

    let mut current = random_labeling(mask, p, &mut rng);
    let mut current_score = eval.score(&current)?;
    let mut best = (current.clone(), current_score);
    let mut evaluations = 1;
    let mut rejected = 0;
    let mut restarts = 0;

    while evaluations < config.budget {
        let (candidate, score) = if rejected >= patience {
            restarts += 1;
            rejected = 0;
            let c = random_labeling(mask, p, &mut rng);
            let s = eval.score(&c)?;
            current = c.clone();
            current_score = s;
            (c, s)
        } else {
            let (j, l) = positions[rng.gen_range(0..positions.len())];
            let mut c = current.clone();
            if p > 1 {
                let old = c.shift(j, l);
                let new = (old + rng.gen_range(1..p)) % p;
                c.set_shift(j, l, new);
            }
            let s = eval.score(&c)?;
            if s.0 >= current_score.0 {
                current = c.clone();
                current_score = s;
                rejected = 0;
            } else {
                rejected += 1;
            }
            (c, s)
        };
        evaluations += 1;
        if score.0 > best.1 .0 {
            best = (candidate, score);
        }
    }

    let (base, (_, girth, ace_violations)) = best;
    Ok(SearchOutcome {
        base,
        girth,
        ace_violations,
        evaluations,
        restarts,
    })
}
