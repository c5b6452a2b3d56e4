//! Command-line front end: enhance one image, run a comparison experiment,
//! or print quality metrics.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use evoenhance::harness::{
    enhance_once, run_experiment, EnhanceOutputs, ExperimentConfig, ImageMetrics, Method,
    OptimizerSettings,
};
use evoenhance::GrayImage;

#[derive(Parser)]
#[command(
    name = "evoenhance",
    version,
    about = "Evolutionary contrast enhancement for gray-scale images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enhance one image with an optimizer or histogram equalization.
    Enhance {
        #[arg(long)]
        input: PathBuf,
        /// he, ga, de or soma
        #[arg(long)]
        algo: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON file with optimizer settings.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Evaluate candidates on all cores.
        #[arg(long)]
        parallel: bool,
        /// Enhanced image, written as binary PGM.
        #[arg(long)]
        out: PathBuf,
        /// Convergence trace CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// JSON report with before/after metrics.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run every configured algorithm on every image and write a report.
    Compare {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print fitness and DV/BV metrics of an image as JSON.
    Metrics {
        #[arg(long)]
        input: PathBuf,
    },
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Enhance {
            input,
            algo,
            seed,
            config,
            parallel,
            out,
            trace,
            report,
        } => {
            let mut settings = match config {
                Some(path) => OptimizerSettings::from_json(&read_text(&path)?)
                    .with_context(|| format!("invalid settings in {}", path.display()))?,
                None => OptimizerSettings::default(),
            };
            settings.parallel |= parallel;
            let outputs = EnhanceOutputs {
                image: out,
                trace,
                report,
            };
            let outcome = enhance_once(&input, algo, &settings, seed, &outputs)?;
            println!(
                "{}: fitness {:.4} -> {:.4}",
                outcome.algorithm,
                outcome.original.fitness.fitness,
                outcome.enhanced.fitness.fitness
            );
        }
        Command::Compare { config } => {
            let cfg = ExperimentConfig::from_json(&read_text(&config)?)
                .with_context(|| format!("invalid experiment config {}", config.display()))?;
            let report = run_experiment(&cfg)?;
            for img in &report.images {
                for s in &img.algorithms {
                    println!(
                        "{} {}: mean {:.4} sd {:.4} ({} runs)",
                        img.image.display(),
                        s.algorithm,
                        s.mean_fitness,
                        s.fitness_std,
                        s.runs
                    );
                }
            }
            println!(
                "report written to {}",
                cfg.output_dir.join("report.json").display()
            );
        }
        Command::Metrics { input } => {
            let img = GrayImage::load(&input)?;
            let json = serde_json::to_string_pretty(&ImageMetrics::of(&img))?;
            println!("{json}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
