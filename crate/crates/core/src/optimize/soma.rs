//! Self-organizing migrating algorithm, All-to-One strategy.
//!
//! In each migration loop the fittest individual is the leader. Every other
//! individual samples positions `start + (leader - start) * t * mask` for
//! `t = step, 2*step, ..` up to `path_length`, with a fresh PRT mask per
//! step. With probability `gaussian_rate` the step term is further scaled by
//! a standard normal draw. The individual moves to the best position on its
//! path if that beats where it started; the leader does not move.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{
    argmax, check_unit_interval, random_population, rng_from_seed, Algorithm, Evaluator, Objective,
    Point, Progress, RunResult,
};
use crate::transform::ParamBounds;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SomaConfig {
    pub pop_size: usize,
    pub migration_loops: usize,
    pub prt: f64,
    pub path_length: f64,
    pub step: f64,
    /// Probability that a step term is scaled by a standard normal draw.
    pub gaussian_rate: f64,
    pub parallel: bool,
}

impl Default for SomaConfig {
    fn default() -> Self {
        Self {
            pop_size: 25,
            migration_loops: 50,
            prt: 0.1,
            path_length: 2.0,
            step: 0.21,
            gaussian_rate: 0.5,
            parallel: false,
        }
    }
}

impl SomaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "SOMA pop_size {} < 2",
                self.pop_size
            )));
        }
        if !(self.prt > 0.0 && self.prt <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "SOMA prt {} not in (0, 1]",
                self.prt
            )));
        }
        if !(self.path_length > 0.0 && self.path_length.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "SOMA path_length {} must be positive",
                self.path_length
            )));
        }
        if !(self.step > 0.0 && self.step <= self.path_length) {
            return Err(Error::InvalidConfig(format!(
                "SOMA step {} not in (0, path_length]",
                self.step
            )));
        }
        check_unit_interval("SOMA gaussian_rate", self.gaussian_rate)
    }

    /// Path positions `t` after the start: `step, 2*step, ..` while `t <= path_length`.
    pub fn path_steps(&self) -> impl Iterator<Item = f64> + '_ {
        let tol = 1e-9 * self.path_length;
        (1..)
            .map(move |s| s as f64 * self.step)
            .take_while(move |&t| t <= self.path_length + tol)
    }
}

/// 0/1 mask of length `nd`; component `d` is 1 iff a uniform draw is below `prt`.
pub fn prt_vector<R: Rng>(prt: f64, nd: usize, rng: &mut R) -> Vec<u8> {
    (0..nd)
        .map(|_| u8::from(rng.random::<f64>() < prt))
        .collect()
}

/// Candidate positions along the path from `start` toward `leader`, one per
/// step of [`SomaConfig::path_steps`], clamped to `bounds`.
pub fn migration_path<R: Rng>(
    start: &Point,
    leader: &Point,
    cfg: &SomaConfig,
    bounds: &ParamBounds,
    rng: &mut R,
) -> Vec<Point> {
    cfg.path_steps()
        .map(|t| {
            let mask = prt_vector(cfg.prt, start.len(), rng);
            let scale = if rng.random::<f64>() < cfg.gaussian_rate {
                rng.sample::<f64, _>(StandardNormal)
            } else {
                1.0
            };
            let x = std::array::from_fn(|d| {
                start[d] + (leader[d] - start[d]) * t * f64::from(mask[d]) * scale
            });
            bounds.clamp(x)
        })
        .collect()
}

/// Best of `start` and the path candidates; moves only on strict improvement.
fn best_on_path(start: &Point, start_fitness: f64, path: &[Point], scores: &[f64]) -> (Point, f64) {
    let mut best = (*start, start_fitness);
    for (x, &f) in path.iter().zip(scores) {
        if f > best.1 {
            best = (*x, f);
        }
    }
    best
}

/// Migrates one individual toward `leader` and returns its new position and fitness.
#[allow(clippy::too_many_arguments)]
pub fn soma_migrate<O: Objective + ?Sized, R: Rng>(
    individual: &Point,
    fitness: f64,
    leader: &Point,
    cfg: &SomaConfig,
    obj: &O,
    bounds: &ParamBounds,
    rng: &mut R,
) -> (Point, f64) {
    let path = migration_path(individual, leader, cfg, bounds, rng);
    let scores: Vec<f64> = path.iter().map(|x| obj.evaluate(x)).collect();
    best_on_path(individual, fitness, &path, &scores)
}

pub fn soma_run<O: Objective + ?Sized>(
    obj: &O,
    bounds: &ParamBounds,
    cfg: &SomaConfig,
    seed: u64,
) -> Result<RunResult> {
    soma_drive(obj, bounds, cfg, seed, |_, _, _| {})
}

/// Runs SOMA, reporting `(leader index, positions before, positions after)` per loop.
fn soma_drive<O: Objective + ?Sized>(
    obj: &O,
    bounds: &ParamBounds,
    cfg: &SomaConfig,
    seed: u64,
    mut on_loop: impl FnMut(usize, &[Point], &[Point]),
) -> Result<RunResult> {
    cfg.validate()?;
    bounds.validate()?;
    let mut rng = rng_from_seed(seed);
    let mut eval = Evaluator::new(obj, cfg.parallel);

    let mut pop = random_population(bounds, cfg.pop_size, &mut rng)?;
    let mut fit = eval.batch(&pop);
    let mut progress = Progress::new(&pop, &fit);
    let steps = cfg.path_steps().count();

    for ml in 1..=cfg.migration_loops {
        let leader = argmax(&fit);
        let leader_pos = pop[leader];
        let movers: Vec<usize> = (0..pop.len()).filter(|&i| i != leader).collect();

        // All paths are drawn up front and scored as one batch.
        let candidates: Vec<Point> = movers
            .iter()
            .flat_map(|&i| migration_path(&pop[i], &leader_pos, cfg, bounds, &mut rng))
            .collect();
        let scores = eval.batch(&candidates);

        let before = pop.clone();
        for (k, &i) in movers.iter().enumerate() {
            let span = k * steps..(k + 1) * steps;
            let (x, f) = best_on_path(&pop[i], fit[i], &candidates[span.clone()], &scores[span]);
            pop[i] = x;
            fit[i] = f;
            progress.offer(&x, f);
        }
        on_loop(leader, &before, &pop);
        progress.end_iteration(ml);
    }
    Ok(progress.finish(Algorithm::Soma, seed, eval.count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(step: f64) -> SomaConfig {
        SomaConfig {
            prt: 1.0,
            gaussian_rate: 0.0,
            step,
            ..Default::default()
        }
    }

    #[test]
    fn path_steps_default() {
        let steps: Vec<f64> = SomaConfig::default().path_steps().collect();
        assert_eq!(steps.len(), 9);
        assert!((steps[8] - 1.89).abs() < 1e-12);
        let exact: Vec<f64> = plain(0.5).path_steps().collect();
        assert_eq!(exact, vec![0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn prt_vector_cases() {
        let mut rng = rng_from_seed(1);
        assert_eq!(prt_vector(1.0, 4, &mut rng), vec![1, 1, 1, 1]);
        assert!((0..100).all(|_| prt_vector(1e-12, 4, &mut rng) == vec![0; 4]));

        let n = 10_000;
        let mut ones = [0usize; 4];
        for _ in 0..n {
            for (d, v) in prt_vector(0.1, 4, &mut rng).into_iter().enumerate() {
                ones[d] += v as usize;
            }
        }
        let se = (0.1f64 * 0.9 / n as f64).sqrt();
        for c in ones {
            assert!((c as f64 / n as f64 - 0.1).abs() < 3.0 * se, "{c}");
        }
    }

    #[test]
    fn full_mask_reaches_and_reflects_past_leader() {
        let b = ParamBounds::default();
        let start = [0.2, 0.2, 0.1, 0.8];
        let leader = [0.6, 0.4, 0.2, 1.0];
        let path = migration_path(&start, &leader, &plain(1.0), &b, &mut rng_from_seed(0));
        assert_eq!(path.len(), 2);
        for d in 0..4 {
            assert!((path[0][d] - leader[d]).abs() < 1e-12);
            assert!((path[1][d] - (2.0 * leader[d] - start[d])).abs() < 1e-12);
        }
        // The reflection is clamped when it leaves the box.
        let far = migration_path(
            &[0.0, 0.0, 0.0, 0.5],
            &[1.4, 0.9, 0.4, 1.4],
            &plain(1.0),
            &b,
            &mut rng_from_seed(0),
        );
        assert_eq!(far[1], b.hi);
    }

    #[test]
    fn zero_mask_keeps_individual() {
        let cfg = SomaConfig {
            prt: 1e-300,
            ..Default::default()
        };
        let start = [0.7, 0.3, 0.2, 1.1];
        let obj = |x: &Point| x[0];
        let (x, f) = soma_migrate(
            &start,
            0.7,
            &[1.5, 1.0, 0.5, 1.5],
            &cfg,
            &obj,
            &ParamBounds::default(),
            &mut rng_from_seed(4),
        );
        assert_eq!(x, start);
        assert_eq!(f, 0.7);
    }

    #[test]
    fn migration_keeps_best_path_position() {
        let obj = |x: &Point| -(x[0] - 1.0).powi(2);
        let start = [0.0, 0.5, 0.25, 1.0];
        let leader = [0.5, 0.5, 0.25, 1.0];
        let (x, f) = soma_migrate(
            &start,
            obj(&start),
            &leader,
            &plain(0.5),
            &obj,
            &ParamBounds::default(),
            &mut rng_from_seed(0),
        );
        assert_eq!(x[0], 1.0);
        assert_eq!(f, 0.0);
    }

    #[test]
    fn individual_at_leader_is_fixed_point() {
        let p = [0.4, 0.6, 0.1, 0.9];
        let path = migration_path(
            &p,
            &p,
            &SomaConfig::default(),
            &ParamBounds::default(),
            &mut rng_from_seed(3),
        );
        assert!(path.iter().all(|x| *x == p));
    }

    #[test]
    fn leader_stays_put_within_a_loop() {
        let obj = |x: &Point| -x.iter().map(|v| (v - 0.45).powi(2)).sum::<f64>();
        let mut loops = 0;
        soma_drive(
            &obj,
            &ParamBounds::default(),
            &SomaConfig::default(),
            12,
            |leader, before, after| {
                assert_eq!(before[leader], after[leader]);
                loops += 1;
            },
        )
        .unwrap();
        assert_eq!(loops, 50);
    }

    #[test]
    fn constant_objective_two_individuals() {
        let cfg = SomaConfig {
            pop_size: 2,
            ..Default::default()
        };
        let r = soma_run(&|_: &Point| 1.0, &ParamBounds::default(), &cfg, 0).unwrap();
        assert_eq!(r.best_fitness, 1.0);
        assert_eq!(r.trace.len(), 51);
        assert_eq!(r.evaluations, 2 + 50 * 9);
    }

    #[test]
    fn invalid_configs() {
        let obj = |_: &Point| 0.0;
        let b = ParamBounds::default();
        for cfg in [
            SomaConfig {
                pop_size: 1,
                ..Default::default()
            },
            SomaConfig {
                prt: 0.0,
                ..Default::default()
            },
            SomaConfig {
                step: 3.0,
                ..Default::default()
            },
            SomaConfig {
                path_length: -1.0,
                ..Default::default()
            },
        ] {
            assert!(soma_run(&obj, &b, &cfg, 0).is_err());
        }
    }
}
