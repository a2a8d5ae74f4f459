//! Reproducible experiment runner over the `vorperc` estimators.

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod output;

use std::time::Instant;

pub use config::{ConfigError, ExperimentConfig};
pub use experiments::{Ctx, Experiment};
pub use output::{write_report, Report, Row};

/// Thread count: the config value, then `VORPERC_THREADS`, then all cores.
pub fn threads(cfg: &ExperimentConfig) -> usize {
    cfg.threads
        .or_else(|| std::env::var("VORPERC_THREADS").ok().and_then(|s| s.parse().ok()).filter(|&n| n > 0))
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs the experiment on its own thread pool.
pub fn execute(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads(cfg)).build()?;
    let t0 = Instant::now();
    let mut rep = pool.install(|| cfg.experiment.run(&Ctx { seed: cfg.seed, replicas: cfg.replicas }))?;
    for r in &mut rep.rows {
        if r.experiment.is_empty() {
            r.experiment = cfg.id.clone();
        }
    }
    if rep.timing.is_empty() {
        rep.timing.push((cfg.id.clone(), t0.elapsed().as_secs_f64()));
    }
    Ok(rep)
}
