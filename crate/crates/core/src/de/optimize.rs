//! Differential-evolution search over degree distributions.
//!
//! Every member is a pair of weight vectors over fixed degree supports. A
//! generation mutates each member into `best + F (x1 - x2 + x3 - x4)` with
//! four distinct other members, repairs it (clip, renormalize, move check
//! mass between the extreme check degrees to hit the rate) and keeps it if
//! its fitness is no worse. Fitness is the error probability left after a
//! fixed number of density-evolution iterations. Once the best member
//! converges, sigma is raised and the population re-scored.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::distribution::DegreeDistribution;
use super::evolution::{DeConfig, DensityEvolution, ThresholdReport};
use crate::error::{Error, Result};

const INIT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerConfig {
    /// Population size, at least 6.
    pub population: usize,
    /// Mutation scale in `(0, 1]`.
    pub scale: f64,
    pub variable_degrees: Vec<usize>,
    pub check_degrees: Vec<usize>,
    pub rate: f64,
    pub sigma_start: f64,
    /// Increment applied to sigma whenever the best member converges.
    pub sigma_step: f64,
    pub generations: usize,
    /// Density-evolution iterations per fitness evaluation.
    pub inner_iterations: usize,
    pub seed: u64,
    /// Grid and epsilon for fitness; also used to certify the result.
    pub de: DeConfig,
}

impl OptimizerConfig {
    pub fn new(variable_degrees: Vec<usize>, check_degrees: Vec<usize>, rate: f64) -> Self {
        OptimizerConfig {
            population: 20,
            scale: 0.5,
            variable_degrees,
            check_degrees,
            rate,
            sigma_start: 0.8,
            sigma_step: 0.005,
            generations: 100,
            inner_iterations: 100,
            seed: 0,
            de: DeConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub sigma: f64,
    pub best_fitness: f64,
    /// Members replaced by their trial this generation.
    pub replaced: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeResult {
    pub best: DegreeDistribution,
    pub threshold: ThresholdReport,
    /// Highest sigma at which some member converged within the inner iterations.
    pub sigma_reached: Option<f64>,
    pub history: Vec<GenerationRecord>,
    pub population: Vec<DegreeDistribution>,
}

#[derive(Debug, Clone)]
struct Member {
    variable: Vec<f64>,
    check: Vec<f64>,
    dist: DegreeDistribution,
}

struct Repair<'a> {
    variable_degrees: &'a [usize],
    check_degrees: &'a [usize],
    rate: f64,
}

fn inverse_mean(degrees: &[usize], weights: &[f64]) -> f64 {
    degrees.iter().zip(weights).map(|(&d, w)| w / d as f64).sum()
}

/// Moves mass between the first and last entries so that `sum w_i / d_i`
/// equals `target`. `None` if that needs negative mass.
fn shift_extremes(degrees: &[usize], weights: &mut [f64], target: f64) -> Option<()> {
    let last = degrees.len() - 1;
    let current = inverse_mean(degrees, weights);
    let span = 1.0 / degrees[0] as f64 - 1.0 / degrees[last] as f64;
    let t = (target - current) / span;
    weights[0] += t;
    weights[last] -= t;
    for w in [0, last] {
        if weights[w] < -1e-12 {
            return None;
        }
        weights[w] = weights[w].max(0.0);
    }
    Some(())
}

fn clip_normalize(weights: &mut [f64]) -> Option<()> {
    weights.iter_mut().for_each(|w| *w = w.max(0.0));
    let sum: f64 = weights.iter().sum();
    if !(sum > 0.0 && sum.is_finite()) {
        return None;
    }
    weights.iter_mut().for_each(|w| *w /= sum);
    Some(())
}

impl Repair<'_> {
    fn apply(&self, mut variable: Vec<f64>, mut check: Vec<f64>) -> Option<Member> {
        clip_normalize(&mut variable)?;
        clip_normalize(&mut check)?;
        let variable_inv = inverse_mean(self.variable_degrees, &variable);
        if self.check_degrees.len() >= 2 {
            shift_extremes(self.check_degrees, &mut check, (1.0 - self.rate) * variable_inv)?;
        } else if self.variable_degrees.len() >= 2 {
            let check_inv = inverse_mean(self.check_degrees, &check);
            shift_extremes(self.variable_degrees, &mut variable, check_inv / (1.0 - self.rate))?;
        }
        let pairs = |degrees: &[usize], w: &[f64]| -> Vec<(usize, f64)> {
            degrees.iter().copied().zip(w.iter().copied()).collect()
        };
        let dist = DegreeDistribution::new(
            &pairs(self.variable_degrees, &variable),
            &pairs(self.check_degrees, &check),
        )
        .ok()?;
        if (dist.design_rate() - self.rate).abs() > 1e-9 {
            return None;
        }
        Some(Member {
            variable,
            check,
            dist,
        })
    }
}

fn validate(config: &OptimizerConfig) -> Result<()> {
    if config.population < 6 {
        return Err(Error::param("population must be at least 6"));
    }
    if !(config.scale > 0.0 && config.scale <= 1.0) {
        return Err(Error::param("mutation scale must be in (0, 1]"));
    }
    if config.variable_degrees.is_empty() || config.check_degrees.is_empty() {
        return Err(Error::Distribution("empty degree support".into()));
    }
    for degrees in [&config.variable_degrees, &config.check_degrees] {
        if degrees.iter().any(|&d| d < 2) {
            return Err(Error::Distribution("degrees must be at least 2".into()));
        }
        if degrees.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Distribution(
                "degree supports must be strictly increasing".into(),
            ));
        }
    }
    if !(config.rate > 0.0 && config.rate < 1.0) {
        return Err(Error::param("rate target must be in (0, 1)"));
    }
    // sum(rho/d) = (1 - r) sum(lambda/d) must be reachable
    let v = &config.variable_degrees;
    let c = &config.check_degrees;
    let keep = 1.0 - config.rate;
    let v_range = (keep / *v.last().unwrap() as f64, keep / v[0] as f64);
    let c_range = (1.0 / *c.last().unwrap() as f64, 1.0 / c[0] as f64);
    if v_range.1 < c_range.0 - 1e-15 || c_range.1 < v_range.0 - 1e-15 {
        return Err(Error::Distribution(format!(
            "rate {} is unreachable with these degree supports",
            config.rate
        )));
    }
    if !(config.sigma_start > 0.0 && config.sigma_step >= 0.0) {
        return Err(Error::param("sigma start must be positive and sigma step non-negative"));
    }
    if config.inner_iterations == 0 {
        return Err(Error::param("inner iterations must be at least 1"));
    }
    config.de.validate()
}

/// Optimizes from a random initial population.
pub fn diff_evolution(config: &OptimizerConfig) -> Result<OptimizeResult> {
    validate(config)?;
    let repair = Repair {
        variable_degrees: &config.variable_degrees,
        check_degrees: &config.check_degrees,
        rate: config.rate,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population = Vec::with_capacity(config.population);
    let mut attempts = 0;
    while population.len() < config.population {
        if attempts == INIT_ATTEMPTS {
            return Err(Error::Distribution(
                "could not draw feasible initial distributions".into(),
            ));
        }
        attempts += 1;
        let v: Vec<f64> = config.variable_degrees.iter().map(|_| rng.gen()).collect();
        let c: Vec<f64> = config.check_degrees.iter().map(|_| rng.gen()).collect();
        if let Some(m) = repair.apply(v, c) {
            population.push(m);
        }
    }
    evolve(config, population, rng)
}

/// Optimizes from a given initial population, whose members must lie on the
/// configured degree supports.
pub fn diff_evolution_from(
    config: &OptimizerConfig,
    initial: &[DegreeDistribution],
) -> Result<OptimizeResult> {
    validate(config)?;
    if initial.len() != config.population {
        return Err(Error::param(format!(
            "initial population has {} members, expected {}",
            initial.len(),
            config.population
        )));
    }
    let weights = |support: &[usize], side: &[(usize, f64)]| -> Result<Vec<f64>> {
        if let Some(&(d, _)) = side.iter().find(|(d, _)| !support.contains(d)) {
            return Err(Error::Distribution(format!("degree {d} is outside the support")));
        }
        Ok(support
            .iter()
            .map(|d| side.iter().find(|(e, _)| e == d).map_or(0.0, |&(_, f)| f))
            .collect())
    };
    let population = initial
        .iter()
        .map(|dist| {
            Ok(Member {
                variable: weights(&config.variable_degrees, dist.variable())?,
                check: weights(&config.check_degrees, dist.check())?,
                dist: dist.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    evolve(config, population, ChaCha8Rng::seed_from_u64(config.seed))
}

fn evolve(
    config: &OptimizerConfig,
    mut population: Vec<Member>,
    mut rng: ChaCha8Rng,
) -> Result<OptimizeResult> {
    let de = DensityEvolution::new(config.de)?;
    let epsilon = config.de.epsilon;
    let repair = Repair {
        variable_degrees: &config.variable_degrees,
        check_degrees: &config.check_degrees,
        rate: config.rate,
    };
    let fitness_of = |members: &[Option<Member>], sigma: f64| -> Result<Vec<f64>> {
        members
            .par_iter()
            .map(|m| match m {
                Some(m) => Ok(de
                    .run_for(&m.dist, sigma, config.inner_iterations, false)?
                    .final_error_probability()),
                None => Ok(f64::INFINITY),
            })
            .collect()
    };
    let wrap = |p: &[Member]| p.iter().cloned().map(Some).collect::<Vec<_>>();

    let mut sigma = config.sigma_start;
    let mut fitness = fitness_of(&wrap(&population), sigma)?;
    let mut reached: Option<(f64, DegreeDistribution)> = None;
    let mut history = Vec::with_capacity(config.generations);
    let np = population.len();

    for generation in 0..config.generations {
        let best = argmin(&fitness);
        if fitness[best] < epsilon {
            reached = Some((sigma, population[best].dist.clone()));
            sigma += config.sigma_step;
            fitness = fitness_of(&wrap(&population), sigma)?;
            history.push(GenerationRecord {
                generation,
                sigma,
                best_fitness: fitness[argmin(&fitness)],
                replaced: 0,
            });
            continue;
        }

        let trials: Vec<Option<Member>> = (0..np)
            .map(|s| {
                let picks: Vec<usize> = sample(&mut rng, np - 1, 4)
                    .into_iter()
                    .map(|k| if k >= s { k + 1 } else { k })
                    .collect();
                let mutate = |get: fn(&Member) -> &Vec<f64>| -> Vec<f64> {
                    let base = get(&population[best]);
                    (0..base.len())
                        .map(|i| {
                            let [a, b, c, d] =
                                [0, 1, 2, 3].map(|k| get(&population[picks[k]])[i]);
                            base[i] + config.scale * (a - b + c - d)
                        })
                        .collect()
                };
                repair.apply(mutate(|m| &m.variable), mutate(|m| &m.check))
            })
            .collect();
        let trial_fitness = fitness_of(&trials, sigma)?;
        let mut replaced = 0;
        for (s, trial) in trials.into_iter().enumerate() {
            if let Some(trial) = trial {
                if trial_fitness[s] <= fitness[s] {
                    population[s] = trial;
                    fitness[s] = trial_fitness[s];
                    replaced += 1;
                }
            }
        }
        history.push(GenerationRecord {
            generation,
            sigma,
            best_fitness: fitness[argmin(&fitness)],
            replaced,
        });
    }

    let best_now = argmin(&fitness);
    if fitness[best_now] < epsilon {
        reached = Some((sigma, population[best_now].dist.clone()));
    }
    let (sigma_reached, best) = match reached {
        Some((s, d)) => (Some(s), d),
        None => (None, population[best_now].dist.clone()),
    };
    let threshold = de.threshold(&best)?;
    Ok(OptimizeResult {
        best,
        threshold,
        sigma_reached,
        history,
        population: population.into_iter().map(|m| m.dist).collect(),
    })
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}
