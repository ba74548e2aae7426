//! Failure of the oscillation inequality on the lamplighter group for K < 3.
//!
//! With δ = (3 − K)/3 and λ = 1 − δ, the discrete-time walk runs until
//! τ = min{n : d(x₀, X_n) > KR}, and G is the event that some lamp in the
//! integer window [λR, R] is lit at time τ. h(y) = P^y(G) is harmonic on
//! B(x₀, KR); the pair y₁ = (−R, 1_[−R,0]), y₂ = (R, 1_[0,R]) gives
//! h(y₁) ≤ 2^{−δR} while h(y₂) is close to 1.

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::lamps::FastLamp;
use super::reflection::hard_pair;
use super::{stream_id, stream_rng, Proportion, STEP_CAP};
use crate::error::{Error, Result};
use crate::generators::{lamplighter_ball, LampState};

pub const OSC_MIN_TRIALS: u64 = 10_000;
/// Largest R accepted by [`osc_failure_exact`].
pub const EXACT_MAX_RADIUS: u32 = 4;

const TAG_OSC: u64 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct OscFailureReport {
    pub radius: u32,
    pub k: f64,
    pub delta: f64,
    pub lambda: f64,
    pub trials: u64,
    pub seed: u64,
    pub y1: LampState,
    pub y2: LampState,
    pub h_y1: Proportion,
    pub h_y2: Proportion,
    /// 2^{−δR}.
    pub bound_y1: f64,
    /// ĥ(y₂) − ĥ(y₁), a lower estimate of Osc(h, B̄(x₀, R)).
    pub osc_lower: f64,
    pub cap_hits: (u64, u64),
}

impl OscFailureReport {
    pub fn to_json(&self) -> serde_json::Value {
        let est = |p: &Proportion| json!({"estimate": p.estimate, "std_error": p.std_error, "successes": p.successes});
        json!({
            "params": {"R": self.radius, "K": self.k, "delta": self.delta, "lambda": self.lambda,
                       "trials": self.trials, "y1": self.y1.label(), "y2": self.y2.label()},
            "seed": self.seed,
            "estimates": {"h_y1": est(&self.h_y1), "h_y2": est(&self.h_y2),
                          "osc_lower_bound": self.osc_lower, "bound_y1": self.bound_y1,
                          "y1_within_bound_3se": self.h_y1.estimate <= self.bound_y1 + 3.0 * self.h_y1.std_error},
            "intervals": {"h_y1": [self.h_y1.interval.0, self.h_y1.interval.1],
                          "h_y2": [self.h_y2.interval.0, self.h_y2.interval.1]},
            "cap_hits": {"y1": self.cap_hits.0, "y2": self.cap_hits.1},
        })
    }
}

struct Window {
    kr: f64,
    lo: i64,
    hi: i64,
    half: i64,
}

fn window(radius: u32, k: f64) -> Result<(f64, f64, Window)> {
    if radius < 1 {
        return Err(Error::pre("R must be at least 1"));
    }
    if !(k > 1.0 && k < 3.0) {
        return Err(Error::pre(format!("K = {k} must lie in (1, 3)")));
    }
    let delta = (3.0 - k) / 3.0;
    let lambda = 1.0 - delta;
    let r = radius as f64;
    let dr = delta * r;
    if (dr - dr.round()).abs() > 1e-9 {
        return Err(Error::pre(format!("δR = {dr} must be an integer (for K = 2 take R a multiple of 3)")));
    }
    let kr = k * r;
    Ok((delta, lambda, Window { kr, lo: (lambda * r).round() as i64, hi: radius as i64, half: kr.floor() as i64 + 2 }))
}

// One trial: Some(G occurred) or None when capped.
fn trial<G: Rng + ?Sized>(start: &LampState, w: &Window, step_cap: u64, rng: &mut G) -> Result<Option<bool>> {
    let mut s = FastLamp::from_state(start, w.half)?;
    let mut n = 0u64;
    while (s.word_length() as f64) <= w.kr {
        if n == step_cap {
            return Ok(None);
        }
        let k: u8 = rng.random_range(0..4);
        s.step(k & 1 == 1, if k < 2 { -1 } else { 1 })?;
        n += 1;
    }
    Ok(Some(s.any_lit_in(w.lo, w.hi)))
}

/// Monte Carlo estimates of h(y₁), h(y₂).
pub fn osc_failure_experiment(radius: u32, k: f64, trials: u64, seed: u64) -> Result<OscFailureReport> {
    let (delta, lambda, w) = window(radius, k)?;
    if trials < OSC_MIN_TRIALS {
        return Err(Error::pre(format!("trials = {trials} is below {OSC_MIN_TRIALS}")));
    }
    let (y1, y2) = hard_pair(radius);
    let run = |group: u64, y: &LampState| -> Result<(Proportion, u64)> {
        let res: Vec<Option<bool>> = (0..trials)
            .into_par_iter()
            .map(|t| trial(y, &w, STEP_CAP, &mut stream_rng(seed, stream_id(TAG_OSC, group, t))))
            .collect::<Result<_>>()?;
        let wins = res.iter().filter(|r| **r == Some(true)).count() as u64;
        let caps = res.iter().filter(|r| r.is_none()).count() as u64;
        Ok((Proportion::new(wins, trials), caps))
    };
    let (h1, c1) = run(0, &y1)?;
    let (h2, c2) = run(1, &y2)?;
    Ok(OscFailureReport {
        radius,
        k,
        delta,
        lambda,
        trials,
        seed,
        bound_y1: 2f64.powf(-delta * radius as f64),
        osc_lower: h2.estimate - h1.estimate,
        h_y1: h1,
        h_y2: h2,
        y1,
        y2,
        cap_hits: (c1, c2),
    })
}

/// Exact h(y₁), h(y₂) for small R: Gauss–Seidel iteration of
/// h(x) = ¼ Σ_{x→x'} [h(x') if d(x₀,x') ≤ KR else 1_G(x')] over the
/// enumerated ball B̄(x₀, ⌊KR⌋).
pub fn osc_failure_exact(radius: u32, k: f64) -> Result<(f64, f64)> {
    let (_, _, w) = window(radius, k)?;
    if radius > EXACT_MAX_RADIUS {
        return Err(Error::pre(format!("exact mode supports R <= {EXACT_MAX_RADIUS}")));
    }
    let ball = lamplighter_ball(w.kr.floor() as u32)?;
    let inside = |i: usize| (ball.distance[i] as f64) <= w.kr;
    let hit_g = |i: usize| ball.states[i].lamps.range(w.lo..=w.hi).next().is_some();
    let mut h: Vec<f64> = (0..ball.len()).map(|i| if !inside(i) && hit_g(i) { 1.0 } else { 0.0 }).collect();
    let interior: Vec<usize> = (0..ball.len()).filter(|&i| inside(i)).collect();
    let mut converged = false;
    for _ in 0..1_000_000 {
        let mut change = 0.0f64;
        for &i in &interior {
            let mut sum = 0.0;
            for s in &ball.successors[i] {
                let j = s.ok_or_else(|| Error::Solver("successor missing from enumerated ball".into()))?;
                sum += h[j];
            }
            let v = sum / 4.0;
            change = change.max((v - h[i]).abs());
            h[i] = v;
        }
        if change < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Solver("value iteration did not converge".into()));
    }
    let (y1, y2) = hard_pair(radius);
    let at = |y: &LampState| {
        ball.index_of(y)
            .map(|i| h[i])
            .ok_or_else(|| Error::Solver(format!("state `{}` outside the enumerated ball", y.label())))
    };
    Ok((at(&y1)?, at(&y2)?))
}
