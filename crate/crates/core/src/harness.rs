//! Experiment driver: single enhancement runs and multi-run comparisons.
//!
//! Output layout of [`run_experiment`] under `output_dir`:
//!
//! ```text
//! report.json
//! <image-stem>/<ALGO>_best.pgm          enhanced image of the best run
//! <image-stem>/<ALGO>/runs.csv          run_index,seed,fitness,seconds
//! <image-stem>/<ALGO>/run_<i>.csv       iteration,best_fitness
//! ```
//!
//! Run `i` of every algorithm uses seed `base_seed + i`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::equalize::equalize;
use crate::evaluation::{dv_bv, fitness, DvBv, FitnessBreakdown};
use crate::image::GrayImage;
use crate::kruskal::kruskal_wallis;
use crate::optimize::{
    de_run, ga_run, soma_run, DeConfig, GaConfig, Objective, Point, RunResult, SomaConfig,
};
use crate::transform::{apply_transform, EnhanceParams, ParamBounds};
use crate::window::{local_stats, StatMaps, DEFAULT_WINDOW};
use crate::{Error, Result};

/// Enhancement method: the histogram-equalization baseline or one of the optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    He,
    Ga,
    De,
    Soma,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::He => "HE",
            Method::Ga => "GA",
            Method::De => "DE",
            Method::Soma => "SOMA",
        }
    }

    pub fn is_evolutionary(self) -> bool {
        self != Method::He
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "he" => Ok(Method::He),
            "ga" => Ok(Method::Ga),
            "de" => Ok(Method::De),
            "soma" => Ok(Method::Soma),
            _ => Err(Error::UnknownAlgorithm(s.to_string())),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Settings shared by every optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    /// Window side for the local statistics of the transform.
    pub window: usize,
    /// Score candidates of a generation on the rayon pool.
    pub parallel: bool,
    pub bounds: ParamBounds,
    pub ga: GaConfig,
    pub de: DeConfig,
    pub soma: SomaConfig,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            parallel: false,
            bounds: ParamBounds::default(),
            ga: GaConfig::default(),
            de: DeConfig::default(),
            soma: SomaConfig::default(),
        }
    }
}

impl OptimizerSettings {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(Error::InvalidWindow(self.window));
        }
        self.bounds.validate()?;
        self.ga.validate()?;
        self.de.validate()?;
        self.soma.validate()
    }
}

/// The optimization objective for one image: fitness of the transformed image.
pub struct EnhancementObjective<'a> {
    image: &'a GrayImage,
    stats: StatMaps,
}

impl<'a> EnhancementObjective<'a> {
    pub fn new(image: &'a GrayImage, window: usize) -> Result<Self> {
        Ok(Self {
            image,
            stats: local_stats(image, window)?,
        })
    }

    pub fn enhance(&self, params: &EnhanceParams) -> GrayImage {
        apply_transform(self.image, params, &self.stats)
            .expect("stats were computed from this image")
    }
}

impl Objective for EnhancementObjective<'_> {
    fn evaluate(&self, x: &Point) -> f64 {
        fitness(&self.enhance(&EnhanceParams::from_array(*x))).fitness
    }
}

/// Fitness breakdown and DV/BV of one image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageMetrics {
    pub fitness: FitnessBreakdown,
    pub dv_bv: DvBv,
}

impl ImageMetrics {
    pub fn of(img: &GrayImage) -> Self {
        Self {
            fitness: fitness(img),
            dv_bv: dv_bv(img),
        }
    }
}

/// Result of enhancing one image once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnhanceOutcome {
    pub algorithm: Method,
    pub seed: u64,
    /// Optimizer result; absent for histogram equalization.
    pub run: Option<RunResult>,
    pub original: ImageMetrics,
    pub enhanced: ImageMetrics,
}

impl EnhanceOutcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("outcome is serializable")
    }
}

/// Enhances an in-memory image and measures before/after.
pub fn enhance_image(
    img: &GrayImage,
    method: Method,
    settings: &OptimizerSettings,
    seed: u64,
) -> Result<(GrayImage, EnhanceOutcome)> {
    settings.validate()?;
    let (enhanced, run) = match method {
        Method::He => (equalize(img), None),
        _ => {
            let obj = EnhancementObjective::new(img, settings.window)?;
            let run = run_optimizer(&obj, method, settings, seed)?;
            (obj.enhance(&run.best_params), Some(run))
        }
    };
    let outcome = EnhanceOutcome {
        algorithm: method,
        seed,
        run,
        original: ImageMetrics::of(img),
        enhanced: ImageMetrics::of(&enhanced),
    };
    Ok((enhanced, outcome))
}

fn run_optimizer<O: Objective + ?Sized>(
    obj: &O,
    method: Method,
    s: &OptimizerSettings,
    seed: u64,
) -> Result<RunResult> {
    match method {
        Method::Ga => {
            let cfg = GaConfig {
                parallel: s.parallel || s.ga.parallel,
                ..s.ga
            };
            ga_run(obj, &s.bounds, &cfg, seed)
        }
        Method::De => {
            let cfg = DeConfig {
                parallel: s.parallel || s.de.parallel,
                ..s.de
            };
            de_run(obj, &s.bounds, &cfg, seed)
        }
        Method::Soma => {
            let cfg = SomaConfig {
                parallel: s.parallel || s.soma.parallel,
                ..s.soma
            };
            soma_run(obj, &s.bounds, &cfg, seed)
        }
        Method::He => Err(Error::InvalidConfig("HE is not an optimizer".to_string())),
    }
}

/// Where [`enhance_once`] writes its outputs.
#[derive(Debug, Clone, Default)]
pub struct EnhanceOutputs {
    pub image: PathBuf,
    pub trace: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

/// Loads `input`, enhances it, and writes the enhanced PGM plus optional
/// trace CSV and JSON report.
pub fn enhance_once(
    input: &Path,
    method: Method,
    settings: &OptimizerSettings,
    seed: u64,
    outputs: &EnhanceOutputs,
) -> Result<EnhanceOutcome> {
    let img = GrayImage::load(input)?;
    let (enhanced, outcome) = enhance_image(&img, method, settings, seed)?;
    enhanced.save(&outputs.image)?;
    if let Some(path) = &outputs.trace {
        let csv = match &outcome.run {
            Some(run) => run.trace_csv(),
            None => "iteration,best_fitness\n".to_string(),
        };
        write_file(path, csv.as_bytes())?;
    }
    if let Some(path) = &outputs.report {
        write_file(path, outcome.to_json().as_bytes())?;
    }
    Ok(outcome)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn default_runs() -> usize {
    35
}

/// A multi-image, multi-algorithm comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub input_images: Vec<PathBuf>,
    pub algorithms: Vec<Method>,
    #[serde(default = "default_runs")]
    pub runs_per_algorithm: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub output_dir: PathBuf,
    /// Execute independent runs concurrently.
    #[serde(default)]
    pub parallel_runs: bool,
    #[serde(flatten)]
    pub settings: OptimizerSettings,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_images.is_empty() {
            return Err(Error::InvalidConfig("no input images".to_string()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("no algorithms".to_string()));
        }
        if self.runs_per_algorithm == 0 {
            return Err(Error::InvalidConfig(
                "runs_per_algorithm must be >= 1".to_string(),
            ));
        }
        self.settings.validate()
    }
}

/// Outcome of one seeded run inside an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_index: usize,
    pub seed: u64,
    pub fitness: f64,
    pub params: Option<EnhanceParams>,
    pub seconds: f64,
    pub edge_count: u64,
    pub dv_bv: DvBv,
    #[serde(skip)]
    trace_csv: Option<String>,
    #[serde(skip)]
    enhanced: Option<GrayImage>,
}

/// Per image x algorithm aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: Method,
    pub runs: usize,
    pub mean_fitness: f64,
    /// Sample standard deviation (0 for a single run).
    pub fitness_std: f64,
    pub fitness_samples: Vec<f64>,
    pub best_run: RunRecord,
    pub seconds_mean: f64,
    pub seconds_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageReport {
    pub image: PathBuf,
    pub original: ImageMetrics,
    pub algorithms: Vec<AlgorithmSummary>,
    /// Two-sample Kruskal-Wallis p-values keyed `"A-B"` for every pair of
    /// optimizers with at least two runs each.
    pub p_values: BTreeMap<String, f64>,
    pub h_statistics: BTreeMap<String, f64>,
}

impl ImageReport {
    pub fn summary(&self, method: Method) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|s| s.algorithm == method)
    }

    /// p-value for a pair in either order.
    pub fn p_value(&self, a: Method, b: Method) -> Option<f64> {
        self.p_values
            .get(&pair_key(a, b))
            .or_else(|| self.p_values.get(&pair_key(b, a)))
            .copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub base_seed: u64,
    pub seed_rule: String,
    pub runs_per_algorithm: usize,
    pub images: Vec<ImageReport>,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

fn pair_key(a: Method, b: Method) -> String {
    format!("{a}-{b}")
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn image_stem(path: &Path, index: usize) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".to_string());
    format!("{index:02}_{stem}")
}

fn single_run(
    img: &GrayImage,
    method: Method,
    settings: &OptimizerSettings,
    run_index: usize,
    seed: u64,
) -> Result<RunRecord> {
    let started = Instant::now();
    let (enhanced, outcome) = enhance_image(img, method, settings, seed)?;
    let seconds = started.elapsed().as_secs_f64();
    Ok(RunRecord {
        run_index,
        seed,
        fitness: outcome.enhanced.fitness.fitness,
        params: outcome.run.as_ref().map(|r| r.best_params),
        seconds,
        edge_count: outcome.enhanced.fitness.edge_count,
        dv_bv: outcome.enhanced.dv_bv,
        trace_csv: outcome.run.as_ref().map(RunResult::trace_csv),
        enhanced: Some(enhanced),
    })
}

/// Runs every (image, algorithm, run) cell, writes all artifacts and the
/// JSON report, and returns the report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    cfg.validate()?;
    // Every image must load before any optimization starts.
    let images = cfg
        .input_images
        .iter()
        .map(GrayImage::load)
        .collect::<Result<Vec<_>>>()?;
    create_dir(&cfg.output_dir)?;

    let mut reports = Vec::with_capacity(images.len());
    for (index, (path, img)) in cfg.input_images.iter().zip(&images).enumerate() {
        let image_dir = cfg.output_dir.join(image_stem(path, index));
        let mut summaries = Vec::new();
        for &method in &cfg.algorithms {
            // The baseline is deterministic, so a single run represents it.
            let runs = if method.is_evolutionary() {
                cfg.runs_per_algorithm
            } else {
                1
            };
            let job = |i: usize| {
                single_run(
                    img,
                    method,
                    &cfg.settings,
                    i,
                    cfg.base_seed.wrapping_add(i as u64),
                )
            };
            let records: Vec<RunRecord> = if cfg.parallel_runs {
                (0..runs).into_par_iter().map(job).collect::<Result<_>>()?
            } else {
                (0..runs).map(job).collect::<Result<_>>()?
            };
            summaries.push(summarize(method, records, &image_dir)?);
        }

        let mut p_values = BTreeMap::new();
        let mut h_statistics = BTreeMap::new();
        let eas: Vec<&AlgorithmSummary> = summaries
            .iter()
            .filter(|s| s.algorithm.is_evolutionary() && s.runs >= 2)
            .collect();
        for (i, a) in eas.iter().enumerate() {
            for b in &eas[i + 1..] {
                let kw = kruskal_wallis(&a.fitness_samples, &b.fitness_samples)?;
                let key = pair_key(a.algorithm, b.algorithm);
                p_values.insert(key.clone(), kw.p_value);
                h_statistics.insert(key, kw.h);
            }
        }
        reports.push(ImageReport {
            image: path.clone(),
            original: ImageMetrics::of(img),
            algorithms: summaries,
            p_values,
            h_statistics,
        });
    }

    let report = ComparisonReport {
        base_seed: cfg.base_seed,
        seed_rule: "base_seed + run_index".to_string(),
        runs_per_algorithm: cfg.runs_per_algorithm,
        images: reports,
    };
    write_file(
        &cfg.output_dir.join("report.json"),
        report.to_json().as_bytes(),
    )?;
    Ok(report)
}

fn summarize(
    method: Method,
    mut records: Vec<RunRecord>,
    image_dir: &Path,
) -> Result<AlgorithmSummary> {
    let algo_dir = image_dir.join(method.name());
    create_dir(&algo_dir)?;

    let mut runs_csv = String::from("run_index,seed,fitness,seconds\n");
    for r in &mut records {
        runs_csv.push_str(&format!(
            "{},{},{},{}\n",
            r.run_index, r.seed, r.fitness, r.seconds
        ));
        if let Some(trace) = r.trace_csv.take() {
            write_file(
                &algo_dir.join(format!("run_{}.csv", r.run_index)),
                trace.as_bytes(),
            )?;
        }
    }
    write_file(&algo_dir.join("runs.csv"), runs_csv.as_bytes())?;

    let samples: Vec<f64> = records.iter().map(|r| r.fitness).collect();
    let seconds: Vec<f64> = records.iter().map(|r| r.seconds).collect();
    let (mean_fitness, fitness_std) = mean_std(&samples);
    let (seconds_mean, seconds_std) = mean_std(&seconds);

    let best = (1..records.len()).fold(0, |b, i| {
        if records[i].fitness > records[b].fitness {
            i
        } else {
            b
        }
    });
    let mut best_run = records.swap_remove(best);
    if let Some(img) = best_run.enhanced.take() {
        img.save(image_dir.join(format!("{}_best.pgm", method.name())))?;
    }
    Ok(AlgorithmSummary {
        algorithm: method,
        runs: samples.len(),
        mean_fitness,
        fitness_std,
        fitness_samples: samples,
        best_run,
        seconds_mean,
        seconds_std,
    })
}
