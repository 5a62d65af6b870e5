use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

/// Everything needed to regenerate an output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// Command line after the program name; rerunning it reproduces the data.
    pub args: Vec<String>,
    pub params: Value,
    pub seed: u64,
    pub rng: &'static str,
    pub version: &'static str,
    pub threads: usize,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(
        command: &str,
        args: &[String],
        params: Value,
        seed: u64,
        elapsed: Duration,
    ) -> Self {
        Self {
            command: command.to_owned(),
            args: args.to_vec(),
            params,
            seed,
            rng: ranch_core::RNG_NAME,
            version: env!("CARGO_PKG_VERSION"),
            threads: ranch_core::par::num_threads(),
            wall_clock_seconds: elapsed.as_secs_f64(),
        }
    }
}
