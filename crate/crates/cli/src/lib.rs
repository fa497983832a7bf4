//! Configuration, artifact writers and mode drivers behind the `seqar`
//! binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod artifacts;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod modes;

pub use config::{ExperimentConfig, Mode};
pub use error::CliError;
pub use modes::run;

/// Environment variable overriding `run.workers`.
pub const WORKERS_ENV: &str = "SEQAR_WORKERS";

/// Size the global thread pool: the environment wins over the config, and
/// zero keeps the default.
pub fn init_workers(config_workers: usize) -> Result<(), CliError> {
    let workers = match std::env::var(WORKERS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            CliError::Config(format!(
                "{WORKERS_ENV}: expected a non-negative integer, got {v:?}"
            ))
        })?,
        Err(_) => config_workers,
    };
    if workers > 0 {
        // A pool that already exists (e.g. in tests) is left alone.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    Ok(())
}
