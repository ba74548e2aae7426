//! Single-walker simulations.

use rand::Rng;
use rand_distr::Exp1;

use super::lamps::FastLamp;
use crate::error::{Error, Result};
use crate::generators::LampState;
use crate::graph::WeightedGraph;

/// A simulated trajectory. Discrete-time walks use times 0, 1, 2, …
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPath<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
}

impl<S> WalkPath<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<(&f64, &S)> {
        self.times.last().zip(self.states.last())
    }
}

/// Next vertex of the walk from `x`, drawn with probability ν_xy/μ(x).
#[inline]
pub fn jump<R: Rng + ?Sized>(g: &WeightedGraph, x: usize, rng: &mut R) -> usize {
    let u = rng.random::<f64>() * g.measure(x);
    let mut acc = 0.0;
    let mut last = x;
    for (y, w) in g.neighbors(x) {
        acc += w;
        last = y;
        if u < acc {
            return y;
        }
    }
    last
}

/// Continuous-time walk: exponential(1) holding times, jumps by ν_xy/μ(x).
///
/// `stop(state, time)` is evaluated at the start and after every jump; the
/// walk ends the first time it returns true. Exceeding `time_cap` is an error.
pub fn simulate_ctsrw<R: Rng + ?Sized>(
    g: &WeightedGraph,
    start: usize,
    mut stop: impl FnMut(usize, f64) -> bool,
    time_cap: f64,
    rng: &mut R,
) -> Result<WalkPath<usize>> {
    g.check_vertex(start)?;
    let mut path = WalkPath { times: vec![0.0], states: vec![start] };
    let (mut x, mut t) = (start, 0.0);
    while !stop(x, t) {
        let hold: f64 = rng.sample(Exp1);
        t += hold;
        if t > time_cap {
            return Err(Error::CapExceeded(format!("walk did not stop before time {time_cap}")));
        }
        x = jump(g, x, rng);
        path.times.push(t);
        path.states.push(x);
    }
    Ok(path)
}

/// Discrete-time switch-then-walk chain: each step picks one of the four
/// neighbours uniformly, i.e. a fair lamp bit at the current site and a fair
/// direction. Lamps and positions must stay within `[-margin, margin]`.
pub fn simulate_lamplighter_discrete<R: Rng + ?Sized>(
    start: &LampState,
    mut stop: impl FnMut(&LampState, u64) -> bool,
    margin: i64,
    step_cap: u64,
    rng: &mut R,
) -> Result<WalkPath<LampState>> {
    let mut state = FastLamp::from_state(start, margin)?;
    let mut path = WalkPath { times: vec![0.0], states: vec![start.clone()] };
    let mut n = 0u64;
    while !stop(path.states.last().unwrap(), n) {
        if n == step_cap {
            return Err(Error::CapExceeded(format!("walk did not stop within {step_cap} steps")));
        }
        let k: u8 = rng.random_range(0..4);
        state.step(k & 1 == 1, if k < 2 { -1 } else { 1 })?;
        n += 1;
        path.times.push(n as f64);
        path.states.push(state.to_state());
    }
    Ok(path)
}
