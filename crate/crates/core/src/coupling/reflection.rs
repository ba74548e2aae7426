//! Co-adapted reflection coupling of two continuous-time switch-then-walk
//! walkers on the lamplighter group.
//!
//! Each walker is a CTSRW: rate-1 exponential clock, then a fair lamp bit at
//! its site and a fair step left or right. The joint dynamics depend only on
//! the current pair of states, so both walkers are Markov for the joint
//! filtration:
//!
//! * positions differ by an odd amount — independent clocks (one rate-2
//!   clock choosing the mover fairly), independent moves; after one jump the
//!   difference is even;
//! * positions differ by an even nonzero amount — one shared clock, mirrored
//!   directions about the fixed midpoint, independent lamp bits;
//! * positions equal — one shared clock, identical direction and lamp bit,
//!   so lamp configurations agree on every site visited from then on.
//!
//! τ_C is the first time the full states agree, τ_E the first time either
//! walker is at distance greater than KR from the base point. The walk runs
//! until τ_E so both times are observed.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use super::lamps::FastLamp;
use super::{stream_id, stream_rng, Proportion, STEP_CAP};
use crate::error::{Error, Result};
use crate::generators::LampState;

pub const UC_MIN_TRIALS: u64 = 100;

const TAG_COUPLE: u64 = 1;
const TAG_PAIRS: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingOutcome {
    /// First time the two states agree, or ∞ if they never do before τ_E.
    pub tau_c: f64,
    /// First time either walker leaves B(x₀, KR); ∞ only when capped.
    pub tau_e: f64,
    pub coupled_first: bool,
    /// Positions met inside I(ε), then the common walk reached both ±R(1+ε)
    /// before leaving I(2ε).
    pub f1_and_f2: bool,
    /// Largest distance from x₀ of either walker up to the exit from I(2ε)
    /// on F₁∩F₂ (zero otherwise).
    pub window_max_distance: u64,
    pub capped: bool,
}

fn check_params(radius: u32, k: f64, eps: f64) -> Result<()> {
    if radius < 1 {
        return Err(Error::pre("R must be at least 1"));
    }
    if !(k > 4.0) {
        return Err(Error::pre(format!("K = {k} must exceed 4")));
    }
    if !(eps > 0.0 && eps < (k - 4.0) / 8.0) {
        return Err(Error::pre(format!("eps = {eps} must lie in (0, (K-4)/8) = (0, {})", (k - 4.0) / 8.0)));
    }
    Ok(())
}

// What the argument uses about y ∈ B(x₀, R): |n| ≤ R and lamps in [−R, R].
fn check_start(y: &LampState, radius: u32) -> Result<()> {
    let r = radius as i64;
    if y.position.abs() > r || y.lamps.iter().any(|l| l.abs() > r) {
        return Err(Error::pre(format!("start `{}` must have position and lamps within [-{r}, {r}]", y.label())));
    }
    Ok(())
}

/// One coupled trial. `y1`, `y2` need position and lamps in `[−R, R]`
/// (which holds on B(x₀, R)); `K > 4` and `0 < ε < (K − 4)/8`.
pub fn reflection_couple<G: Rng + ?Sized>(
    y1: &LampState,
    y2: &LampState,
    radius: u32,
    k: f64,
    eps: f64,
    rng: &mut G,
) -> Result<CouplingOutcome> {
    check_params(radius, k, eps)?;
    check_start(y1, radius)?;
    check_start(y2, radius)?;
    couple_trial(y1, y2, radius, k, eps, STEP_CAP, rng, &mut |_, _, _| {})
}

/// [`reflection_couple`] with `observe(t, y¹, y²)` called on the initial
/// pair and after every jump, up to and including τ_E.
pub fn reflection_couple_observed<G: Rng + ?Sized>(
    y1: &LampState,
    y2: &LampState,
    radius: u32,
    k: f64,
    eps: f64,
    rng: &mut G,
    mut observe: impl FnMut(f64, &FastLamp, &FastLamp),
) -> Result<CouplingOutcome> {
    check_params(radius, k, eps)?;
    check_start(y1, radius)?;
    check_start(y2, radius)?;
    couple_trial(y1, y2, radius, k, eps, STEP_CAP, rng, &mut observe)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn couple_trial<G: Rng + ?Sized>(
    y1: &LampState,
    y2: &LampState,
    radius: u32,
    k: f64,
    eps: f64,
    step_cap: u64,
    rng: &mut G,
    observe: &mut dyn FnMut(f64, &FastLamp, &FastLamp),
) -> Result<CouplingOutcome> {
    let kr = k * radius as f64;
    let half = kr.ceil() as i64 + 2;
    let r = radius as f64;
    let r1 = r * (1.0 + eps);
    let r2 = r * (1.0 + 2.0 * eps);
    let bound = 4.0 * r2;

    let mut a = FastLamp::from_state(y1, half)?;
    let mut b = FastLamp::from_state(y2, half)?;
    let mut t = 0.0f64;
    observe(t, &a, &b);
    let mut tau_c = if a == b { Some(0.0) } else { None };

    // F₁∩F₂ bookkeeping: 0 = before meeting, 1 = met inside I(ε),
    // 2 = confirmed (both ends hit), 3 = ruled out, 4 = finished at T₂.
    let mut phase = 0u8;
    let (mut hit_lo, mut hit_hi) = (false, false);
    let mut window_max = a.word_length().max(b.word_length());
    let mut f12 = false;
    let out_r1 = |p: i64| (p.abs() as f64) > r1;
    if out_r1(a.position) || out_r1(b.position) {
        phase = 3;
    }
    if phase == 0 && a.position == b.position {
        phase = 1;
    }

    if (window_max as f64) > kr {
        return Ok(CouplingOutcome {
            tau_c: tau_c.unwrap_or(f64::INFINITY),
            tau_e: 0.0,
            coupled_first: false,
            f1_and_f2: false,
            window_max_distance: 0,
            capped: false,
        });
    }

    let mut steps = 0u64;
    let tau_e = loop {
        if steps == step_cap {
            return Ok(CouplingOutcome {
                tau_c: tau_c.unwrap_or(f64::INFINITY),
                tau_e: f64::INFINITY,
                coupled_first: tau_c.is_some(),
                f1_and_f2: f12,
                window_max_distance: if f12 { window_max } else { 0 },
                capped: true,
            });
        }
        steps += 1;
        let gap = b.position - a.position;
        if gap == 0 {
            t += rng.sample::<f64, _>(Exp1);
            let on = rng.random_bool(0.5);
            let dir = if rng.random_bool(0.5) { 1 } else { -1 };
            a.step(on, dir)?;
            b.step(on, dir)?;
        } else if gap % 2 != 0 {
            t += rng.sample::<f64, _>(Exp1) / 2.0;
            let mover = if rng.random_bool(0.5) { &mut a } else { &mut b };
            let on = rng.random_bool(0.5);
            let dir = if rng.random_bool(0.5) { 1 } else { -1 };
            mover.step(on, dir)?;
        } else {
            t += rng.sample::<f64, _>(Exp1);
            let dir = if rng.random_bool(0.5) { 1 } else { -1 };
            a.step(rng.random_bool(0.5), dir)?;
            b.step(rng.random_bool(0.5), -dir)?;
        }

        observe(t, &a, &b);
        let (da, db) = (a.word_length(), b.word_length());
        if tau_c.is_none() && a == b {
            tau_c = Some(t);
        }

        if phase <= 2 {
            window_max = window_max.max(da).max(db);
        }
        match phase {
            0 => {
                if out_r1(a.position) || out_r1(b.position) {
                    phase = 3;
                } else if a.position == b.position {
                    phase = 1;
                }
            }
            1 | 2 => {
                let u = a.position as f64;
                if u >= r1 {
                    hit_hi = true;
                }
                if u <= -r1 {
                    hit_lo = true;
                }
                if phase == 1 && hit_lo && hit_hi {
                    phase = 2;
                }
                if u.abs() > r2 {
                    // T₂: exit from I(2ε)
                    if phase == 2 {
                        f12 = true;
                        if a != b {
                            return Err(Error::Residual("F1∩F2 holds but the walkers differ at T2".into()));
                        }
                        if (window_max as f64) > bound {
                            return Err(Error::Residual(format!(
                                "F1∩F2 holds but a walker reached distance {window_max} > 4(1+2ε)R = {bound}"
                            )));
                        }
                        phase = 4;
                    } else {
                        phase = 3;
                    }
                }
            }
            _ => {}
        }

        if (da as f64) > kr || (db as f64) > kr {
            if phase == 2 {
                return Err(Error::Residual("a walker left B(x0, KR) before T2 on F1∩F2".into()));
            }
            break t;
        }
    };
    let tau_c = tau_c.unwrap_or(f64::INFINITY);
    Ok(CouplingOutcome {
        tau_c,
        tau_e,
        coupled_first: tau_c < tau_e,
        f1_and_f2: f12,
        window_max_distance: if f12 { window_max } else { 0 },
        capped: false,
    })
}

/// The hard pair `(−R, 1_[−R,0])`, `(R, 1_[0,R])`.
pub fn hard_pair(radius: u32) -> (LampState, LampState) {
    let r = radius as i64;
    (LampState::new(-r, -r..=0), LampState::new(r, 0..=r))
}

/// `count` pairs of endpoints of independent R-step discrete walks from the
/// base point; every endpoint lies in B(x₀, R).
pub fn random_pairs(radius: u32, count: usize, seed: u64) -> Vec<(LampState, LampState)> {
    let walk = |stream: u64| {
        let mut rng = stream_rng(seed, stream);
        let mut s = FastLamp::new(radius as i64 + 1);
        for _ in 0..radius {
            let k: u8 = rng.random_range(0..4);
            s.step(k & 1 == 1, if k < 2 { -1 } else { 1 }).expect("R steps stay in the window");
        }
        s.to_state()
    };
    (0..count as u64).map(|i| (walk(stream_id(TAG_PAIRS, i, 0)), walk(stream_id(TAG_PAIRS, i, 1)))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairEstimate {
    pub y1: LampState,
    pub y2: LampState,
    pub success: Proportion,
    pub f1_and_f2: u64,
    pub cap_hits: u64,
    pub max_window_distance: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UcReport {
    pub radius: u32,
    pub k: f64,
    pub eps: f64,
    pub trials: u64,
    pub seed: u64,
    pub pairs: Vec<PairEstimate>,
    /// Index of the pair with the smallest estimate (first on ties).
    pub worst: usize,
}

impl UcReport {
    /// p̂₁: the smallest per-pair success estimate.
    pub fn p1(&self) -> Proportion {
        self.pairs[self.worst].success
    }

    pub fn cap_hits(&self) -> u64 {
        self.pairs.iter().map(|p| p.cap_hits).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pairs: Vec<_> = self
            .pairs
            .iter()
            .map(|p| {
                serde_json::json!({
                    "y1": p.y1.label(),
                    "y2": p.y2.label(),
                    "estimate": p.success.estimate,
                    "successes": p.success.successes,
                    "interval": [p.success.interval.0, p.success.interval.1],
                    "f1_and_f2": p.f1_and_f2,
                    "cap_hits": p.cap_hits,
                    "max_window_distance": p.max_window_distance,
                })
            })
            .collect();
        let p1 = self.p1();
        serde_json::json!({
            "params": {"R": self.radius, "K": self.k, "eps": self.eps, "trials": self.trials},
            "seed": self.seed,
            "estimates": {"p1": p1.estimate, "worst_pair": self.worst, "pairs": pairs},
            "intervals": {"p1": [p1.interval.0, p1.interval.1]},
            "cap_hits": self.cap_hits(),
        })
    }
}

/// Success probability P(τ_C < τ_E) for each pair; capped trials count as
/// failures and are reported.
pub fn uc_estimate_pairs(
    pairs: &[(LampState, LampState)],
    radius: u32,
    k: f64,
    eps: f64,
    trials: u64,
    seed: u64,
) -> Result<UcReport> {
    check_params(radius, k, eps)?;
    if trials < UC_MIN_TRIALS {
        return Err(Error::pre(format!("trials = {trials} is below {UC_MIN_TRIALS}")));
    }
    if pairs.is_empty() {
        return Err(Error::pre("no starting pairs"));
    }
    for (y1, y2) in pairs {
        check_start(y1, radius)?;
        check_start(y2, radius)?;
    }
    let mut out = Vec::with_capacity(pairs.len());
    for (i, (y1, y2)) in pairs.iter().enumerate() {
        let outcomes: Vec<CouplingOutcome> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = stream_rng(seed, stream_id(TAG_COUPLE, i as u64, t));
                couple_trial(y1, y2, radius, k, eps, STEP_CAP, &mut rng, &mut |_, _, _| {})
            })
            .collect::<Result<_>>()?;
        let wins = outcomes.iter().filter(|o| o.coupled_first && !o.capped).count() as u64;
        out.push(PairEstimate {
            y1: y1.clone(),
            y2: y2.clone(),
            success: Proportion::new(wins, trials),
            f1_and_f2: outcomes.iter().filter(|o| o.f1_and_f2).count() as u64,
            cap_hits: outcomes.iter().filter(|o| o.capped).count() as u64,
            max_window_distance: outcomes.iter().map(|o| o.window_max_distance).max().unwrap_or(0),
        });
    }
    let worst = (0..out.len())
        .min_by(|&i, &j| out[i].success.estimate.total_cmp(&out[j].success.estimate).then(i.cmp(&j)))
        .unwrap();
    Ok(UcReport { radius, k, eps, trials, seed, pairs: out, worst })
}

/// UC(K) estimate over the hard pair and ten random pairs in B(x₀, R).
pub fn uc_estimate(radius: u32, k: f64, eps: f64, trials: u64, seed: u64) -> Result<UcReport> {
    let mut pairs = vec![hard_pair(radius)];
    pairs.extend(random_pairs(radius, 10, seed));
    uc_estimate_pairs(&pairs, radius, k, eps, trials, seed)
}
