//! Population-based maximizers over box-bounded 4-vectors.
//!
//! All three drivers share the [`Objective`] contract and return a
//! [`RunResult`] carrying the best-ever point and a best-so-far trace with one
//! entry for the initial population plus one per generation (or migration
//! loop). Every random draw is made by the driver from a ChaCha stream seeded
//! with the run seed, before any batch of evaluations is dispatched, so
//! results are bit-identical whether evaluations run serially or on the rayon
//! pool.

mod de;
mod ga;
mod soma;

pub use de::{de_recombine, de_run, de_scale_factor, DeConfig, ScaleSchedule};
pub use ga::{arithmetic_crossover, ga_run, tournament_select, GaConfig};
pub use soma::{migration_path, prt_vector, soma_migrate, soma_run, SomaConfig};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::transform::{EnhanceParams, ParamBounds};
use crate::{Error, Result};

/// A candidate solution `(a, b, c, k)`.
pub type Point = [f64; 4];

/// Random stream used by every optimizer.
pub type OptRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> OptRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Function to maximize. Must be deterministic; it is shared across threads.
pub trait Objective: Sync {
    fn evaluate(&self, x: &Point) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&Point) -> f64 + Sync,
{
    fn evaluate(&self, x: &Point) -> f64 {
        self(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Algorithm {
    Ga,
    De,
    Soma,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ga => "GA",
            Algorithm::De => "DE",
            Algorithm::Soma => "SOMA",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub best_fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub best_params: EnhanceParams,
    pub best_fitness: f64,
    /// Best-so-far fitness; entry 0 is the initial population.
    pub trace: Vec<TracePoint>,
    pub evaluations: u64,
}

impl RunResult {
    /// Trace as `iteration,best_fitness` CSV with a header line.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,best_fitness\n");
        for p in &self.trace {
            out.push_str(&format!("{},{}\n", p.iteration, p.best_fitness));
        }
        out
    }
}

/// `size` points drawn uniformly inside `bounds`.
pub fn random_population<R: Rng>(
    bounds: &ParamBounds,
    size: usize,
    rng: &mut R,
) -> Result<Vec<Point>> {
    if size < 2 {
        return Err(Error::InvalidConfig(format!("population size {size} < 2")));
    }
    Ok((0..size).map(|_| random_point(bounds, rng)).collect())
}

pub(crate) fn random_point<R: Rng>(bounds: &ParamBounds, rng: &mut R) -> Point {
    std::array::from_fn(|d| uniform_in(bounds, d, rng))
}

pub(crate) fn uniform_in<R: Rng>(bounds: &ParamBounds, d: usize, rng: &mut R) -> f64 {
    let (lo, hi) = (bounds.lo[d], bounds.hi[d]);
    (lo + (hi - lo) * rng.random::<f64>()).min(hi)
}

/// Counts and dispatches objective calls; NaN scores are mapped to -inf.
pub(crate) struct Evaluator<'a, O: Objective + ?Sized> {
    obj: &'a O,
    parallel: bool,
    pub count: u64,
}

impl<'a, O: Objective + ?Sized> Evaluator<'a, O> {
    pub fn new(obj: &'a O, parallel: bool) -> Self {
        Self {
            obj,
            parallel,
            count: 0,
        }
    }

    /// Evaluates in index order; parallel dispatch preserves that order.
    pub fn batch(&mut self, xs: &[Point]) -> Vec<f64> {
        self.count += xs.len() as u64;
        if self.parallel {
            xs.par_iter()
                .map(|x| sanitize(self.obj.evaluate(x)))
                .collect()
        } else {
            xs.iter().map(|x| sanitize(self.obj.evaluate(x))).collect()
        }
    }
}

fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::NEG_INFINITY
    } else {
        f
    }
}

/// Index of the first maximum.
pub(crate) fn argmax(fitness: &[f64]) -> usize {
    let mut best = 0;
    for (i, &f) in fitness.iter().enumerate().skip(1) {
        if f > fitness[best] {
            best = i;
        }
    }
    best
}

/// Best-ever bookkeeping shared by the drivers.
pub(crate) struct Progress {
    best: Point,
    best_fitness: f64,
    trace: Vec<TracePoint>,
}

impl Progress {
    pub fn new(pop: &[Point], fitness: &[f64]) -> Self {
        let i = argmax(fitness);
        Self {
            best: pop[i],
            best_fitness: fitness[i],
            trace: vec![TracePoint {
                iteration: 0,
                best_fitness: fitness[i],
            }],
        }
    }

    pub fn offer(&mut self, x: &Point, f: f64) {
        if f > self.best_fitness {
            self.best = *x;
            self.best_fitness = f;
        }
    }

    pub fn end_iteration(&mut self, iteration: usize) {
        self.trace.push(TracePoint {
            iteration,
            best_fitness: self.best_fitness,
        });
    }

    pub fn finish(self, algorithm: Algorithm, seed: u64, evaluations: u64) -> RunResult {
        RunResult {
            algorithm,
            seed,
            best_params: EnhanceParams::from_array(self.best),
            best_fitness: self.best_fitness,
            trace: self.trace,
            evaluations,
        }
    }
}

pub(crate) fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "{name} = {v} is outside [0, 1]"
        )))
    }
}
