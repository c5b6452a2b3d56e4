//! Differential evolution with binomial crossover, a decaying scale factor
//! and greedy one-to-one replacement.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    check_unit_interval, random_population, rng_from_seed, Algorithm, Evaluator, Objective, Point,
    Progress, RunResult,
};
use crate::transform::ParamBounds;
use crate::{Error, Result};

/// How the scale factor evolves over the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleSchedule {
    /// Linear decay from `f_max` at the first generation to `f_min` at `max_iter`.
    #[default]
    Linear,
    /// `(f_max - f_min) * (max_iter - i) / max_iter`, which decays to 0
    /// rather than to `f_min`. Kept for comparison experiments.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeConfig {
    pub pop_size: usize,
    pub iterations: usize,
    pub cr: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub schedule: ScaleSchedule,
    pub parallel: bool,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            pop_size: 60,
            iterations: 50,
            cr: 0.2,
            f_min: 0.4,
            f_max: 1.0,
            schedule: ScaleSchedule::Linear,
            parallel: false,
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 4 {
            return Err(Error::InvalidConfig(format!(
                "DE pop_size {} < 4 (three distinct parents plus the target)",
                self.pop_size
            )));
        }
        check_unit_interval("DE cr", self.cr)?;
        if !(self.f_min > 0.0 && self.f_min <= self.f_max && self.f_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "DE needs 0 < f_min <= f_max, got {} and {}",
                self.f_min, self.f_max
            )));
        }
        Ok(())
    }

    /// Scale factor for the 0-based generation `i`.
    pub fn scale_factor(&self, i: usize) -> f64 {
        let max = self.iterations;
        if max == 0 {
            return self.f_max;
        }
        let remaining = max.saturating_sub(i) as f64 / max as f64;
        match self.schedule {
            ScaleSchedule::Linear => self.f_min + (self.f_max - self.f_min) * remaining,
            ScaleSchedule::Literal => (self.f_max - self.f_min) * remaining,
        }
    }
}

/// Default schedule: `0.4 + 0.6 * (max_iter - i) / max_iter`.
pub fn de_scale_factor(i: usize, max_iter: usize) -> f64 {
    DeConfig {
        iterations: max_iter,
        ..DeConfig::default()
    }
    .scale_factor(i)
}

/// Binomial crossover between `target` and the mutant `p3 + f * (p1 - p2)`,
/// clamped to `bounds`.
#[allow(clippy::too_many_arguments)]
pub fn de_recombine<R: Rng>(
    target: &Point,
    p1: &Point,
    p2: &Point,
    p3: &Point,
    f: f64,
    cr: f64,
    bounds: &ParamBounds,
    rng: &mut R,
) -> Point {
    let mut out = *target;
    for d in 0..out.len() {
        if rng.random::<f64>() <= cr {
            out[d] = p3[d] + f * (p1[d] - p2[d]);
        }
    }
    bounds.clamp(out)
}

/// Three distinct indices, all different from `target`.
fn pick_parents<R: Rng>(n: usize, target: usize, rng: &mut R) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    for k in 0..3 {
        loop {
            let c = rng.random_range(0..n);
            if c != target && !picked[..k].contains(&c) {
                picked[k] = c;
                break;
            }
        }
    }
    picked
}

pub fn de_run<O: Objective + ?Sized>(
    obj: &O,
    bounds: &ParamBounds,
    cfg: &DeConfig,
    seed: u64,
) -> Result<RunResult> {
    de_drive(obj, bounds, cfg, seed, |_| {})
}

/// Runs DE, reporting the population fitness after every generation.
fn de_drive<O: Objective + ?Sized>(
    obj: &O,
    bounds: &ParamBounds,
    cfg: &DeConfig,
    seed: u64,
    mut on_generation: impl FnMut(&[f64]),
) -> Result<RunResult> {
    cfg.validate()?;
    bounds.validate()?;
    let mut rng = rng_from_seed(seed);
    let mut eval = Evaluator::new(obj, cfg.parallel);

    let mut pop = random_population(bounds, cfg.pop_size, &mut rng)?;
    let mut fit = eval.batch(&pop);
    let mut progress = Progress::new(&pop, &fit);

    for generation in 1..=cfg.iterations {
        let f = cfg.scale_factor(generation - 1);
        // Trial vectors are built from the population as it stood at the
        // start of the generation, then all are scored together.
        let trials: Vec<Point> = (0..pop.len())
            .map(|i| {
                let [a, b, c] = pick_parents(pop.len(), i, &mut rng);
                de_recombine(
                    &pop[i], &pop[a], &pop[b], &pop[c], f, cfg.cr, bounds, &mut rng,
                )
            })
            .collect();
        let trial_fit = eval.batch(&trials);
        for (i, (t, tf)) in trials.into_iter().zip(trial_fit).enumerate() {
            if tf > fit[i] {
                pop[i] = t;
                fit[i] = tf;
                progress.offer(&t, tf);
            }
        }
        on_generation(&fit);
        progress.end_iteration(generation);
    }
    Ok(progress.finish(Algorithm::De, seed, eval.count))
}
