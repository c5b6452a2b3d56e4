//! Real-coded generational GA: binary tournament, elitism, arithmetic
//! crossover and per-gene uniform-reset mutation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    check_unit_interval, random_population, rng_from_seed, uniform_in, Algorithm, Evaluator,
    Objective, Point, Progress, RunResult,
};
use crate::transform::ParamBounds;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub pop_size: usize,
    pub iterations: usize,
    pub mutation_rate: f64,
    pub crossover_prob: f64,
    pub elite_count: usize,
    pub parallel: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            pop_size: 60,
            iterations: 50,
            mutation_rate: 0.03,
            crossover_prob: 1.0,
            elite_count: 6,
            parallel: false,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "GA pop_size {} < 2",
                self.pop_size
            )));
        }
        if self.elite_count >= self.pop_size {
            return Err(Error::InvalidConfig(format!(
                "GA elite_count {} must be below pop_size {}",
                self.elite_count, self.pop_size
            )));
        }
        check_unit_interval("GA mutation_rate", self.mutation_rate)?;
        check_unit_interval("GA crossover_prob", self.crossover_prob)
    }
}

/// `(r*p1 + (1-r)*p2, r*p2 + (1-r)*p1)`.
pub fn arithmetic_crossover(p1: &Point, p2: &Point, r: f64) -> (Point, Point) {
    let a = std::array::from_fn(|d| r * p1[d] + (1.0 - r) * p2[d]);
    let b = std::array::from_fn(|d| r * p2[d] + (1.0 - r) * p1[d]);
    (a, b)
}

/// Index of the fitter of two individuals drawn with replacement; ties go to the first draw.
pub fn tournament_select<R: Rng>(fitness: &[f64], rng: &mut R) -> usize {
    let i = rng.random_range(0..fitness.len());
    let j = rng.random_range(0..fitness.len());
    if fitness[j] > fitness[i] {
        j
    } else {
        i
    }
}

fn mutate<R: Rng>(x: &mut Point, rate: f64, bounds: &ParamBounds, rng: &mut R) {
    for (d, v) in x.iter_mut().enumerate() {
        if rng.random::<f64>() < rate {
            *v = uniform_in(bounds, d, rng);
        }
    }
}

pub fn ga_run<O: Objective + ?Sized>(
    obj: &O,
    bounds: &ParamBounds,
    cfg: &GaConfig,
    seed: u64,
) -> Result<RunResult> {
    cfg.validate()?;
    bounds.validate()?;
    let mut rng = rng_from_seed(seed);
    let mut eval = Evaluator::new(obj, cfg.parallel);

    let mut pop = random_population(bounds, cfg.pop_size, &mut rng)?;
    let mut fit = eval.batch(&pop);
    let mut progress = Progress::new(&pop, &fit);
    let n_offspring = cfg.pop_size - cfg.elite_count;

    for generation in 1..=cfg.iterations {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&i, &j| fit[j].total_cmp(&fit[i]));

        let mut children = Vec::with_capacity(n_offspring + 1);
        while children.len() < n_offspring {
            let p1 = pop[tournament_select(&fit, &mut rng)];
            let p2 = pop[tournament_select(&fit, &mut rng)];
            let (mut c1, mut c2) = if rng.random::<f64>() < cfg.crossover_prob {
                arithmetic_crossover(&p1, &p2, rng.random::<f64>())
            } else {
                (p1, p2)
            };
            mutate(&mut c1, cfg.mutation_rate, bounds, &mut rng);
            mutate(&mut c2, cfg.mutation_rate, bounds, &mut rng);
            children.push(c1);
            children.push(c2);
        }
        children.truncate(n_offspring);
        let child_fit = eval.batch(&children);

        let mut next_pop = Vec::with_capacity(cfg.pop_size);
        let mut next_fit = Vec::with_capacity(cfg.pop_size);
        for &i in order.iter().take(cfg.elite_count) {
            next_pop.push(pop[i]);
            next_fit.push(fit[i]);
        }
        for (c, f) in children.into_iter().zip(child_fit) {
            progress.offer(&c, f);
            next_pop.push(c);
            next_fit.push(f);
        }
        pop = next_pop;
        fit = next_fit;
        progress.end_iteration(generation);
    }
    Ok(progress.finish(Algorithm::Ga, seed, eval.count))
}
