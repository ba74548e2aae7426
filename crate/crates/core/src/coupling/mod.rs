//! Random-walk simulation, the reflection coupling on the lamplighter group,
//! and the oscillation-failure experiment.
//!
//! Every trial draws from its own ChaCha8 stream selected by
//! `(seed, stream id)`, so results do not depend on how trials are scheduled
//! across threads.

mod lamps;
mod oscillation;
mod reflection;
mod walk;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use lamps::FastLamp;
pub use oscillation::{osc_failure_exact, osc_failure_experiment, OscFailureReport, EXACT_MAX_RADIUS, OSC_MIN_TRIALS};
pub use reflection::{
    hard_pair, random_pairs, reflection_couple, reflection_couple_observed, uc_estimate, uc_estimate_pairs,
    CouplingOutcome, PairEstimate, UcReport, UC_MIN_TRIALS,
};
pub use walk::{jump, simulate_ctsrw, simulate_lamplighter_discrete, WalkPath};

/// Hard cap on steps per trial.
pub const STEP_CAP: u64 = 10_000_000;

const Z95: f64 = 1.959_963_984_540_054;

/// Independent generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn stream_id(tag: u64, group: u64, trial: u64) -> u64 {
    debug_assert!(group < 1 << 16 && trial < 1 << 32);
    (tag << 48) | (group << 32) | trial
}

/// Wilson score interval at 95% for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Binomial proportion with standard error and Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub interval: (f64, f64),
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        let p = successes as f64 / trials as f64;
        Self {
            successes,
            trials,
            estimate: p,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
            interval: wilson_interval(successes, trials),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn wilson_brackets_estimate_and_shrinks() {
        let (lo, hi) = wilson_interval(30, 100);
        assert!(lo < 0.3 && 0.3 < hi);
        let (lo4, hi4) = wilson_interval(3000, 10_000);
        let ratio = (hi - lo) / (hi4 - lo4);
        assert!((8.0..12.0).contains(&ratio), "{ratio}");
        assert_eq!(wilson_interval(100, 100).1, 1.0);
        assert!(wilson_interval(0, 100).0 == 0.0);
    }

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: u64 = stream_rng(5, 1).random();
        let b: u64 = stream_rng(5, 2).random();
        let c: u64 = stream_rng(5, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
