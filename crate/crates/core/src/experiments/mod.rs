//! Verification suites and the path-norm fitter.
//!
//! Each `run_*` function takes a validated config and returns a
//! [`SuiteOutput`]: a CSV table, measured constants and named pass/fail
//! flags. Suites are deterministic functions of their config.

pub mod config;
pub mod decay;
pub mod embedding;
pub mod fit;
pub mod mc_rate;
pub mod moments;
pub mod output;
pub mod remark2;
pub mod stats;
pub mod tightness;

pub use config::{ExperimentConfig, FitConfig, FitTarget, Suite};
pub use decay::run_decay_suite;
pub use embedding::run_embedding_suite;
pub use fit::{fit_network, FitResult};
pub use mc_rate::run_mc_rate_suite;
pub use moments::run_moment_suite;
pub use output::SuiteOutput;
pub use remark2::run_remark2_probe;
pub use tightness::run_tightness_suite;

/// Derives an independent stream seed from a base seed and a path of
/// integers (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    let mut h = seed;
    for &p in path {
        h = h.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(p);
        h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 31;
    }
    h
}

/// Runs a suite by kind.
pub fn run_suite(suite: Suite, cfg: &ExperimentConfig) -> crate::Result<SuiteOutput> {
    match suite {
        Suite::Decay => run_decay_suite(cfg),
        Suite::Moment => run_moment_suite(cfg),
        Suite::Embed => run_embedding_suite(cfg),
        Suite::Tight => run_tightness_suite(cfg),
        Suite::McRate => run_mc_rate_suite(cfg),
        Suite::Remark2 => run_remark2_probe(cfg),
    }
}
