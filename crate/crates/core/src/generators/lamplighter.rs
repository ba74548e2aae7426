//! The lamplighter group Z ≀ Z₂ with the switch-then-walk step set.
//!
//! A state is `(n, ξ)`: the lamplighter's position and the finite set of lit
//! lamps. One step sets the lamp at the current site to 0 or 1 and then moves
//! one site left or right, so every state has four successors
//! `(n ± 1, T_{n,k}(ξ))`. The step set is not closed under inversion: the
//! reverse of a step switches the lamp at the *arrival* site. Distances below
//! are word lengths for the step set, i.e. the fewest steps from the base
//! point `(0, ∅)`. This is the metric in which the distance formula
//! `2a + b + |b − x′|` holds (up to the lit-final-site correction documented
//! on [`LampState::word_length`]).

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, WeightedGraph};

pub const MAX_LAMPLIGHTER_STATES: usize = 10_000_000;

/// Lamplighter configuration: position and the set of lit lamps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LampState {
    pub position: i64,
    pub lamps: BTreeSet<i64>,
}

impl LampState {
    pub fn new(position: i64, lamps: impl IntoIterator<Item = i64>) -> Self {
        Self { position, lamps: lamps.into_iter().collect() }
    }

    /// The base point x₀ = (0, all lamps off).
    pub fn origin() -> Self {
        Self::default()
    }

    /// T_{n,k}: lamp `site` set to `on`.
    pub fn with_lamp(&self, site: i64, on: bool) -> Self {
        let mut s = self.clone();
        if on {
            s.lamps.insert(site);
        } else {
            s.lamps.remove(&site);
        }
        s
    }

    pub fn lit(&self, site: i64) -> bool {
        self.lamps.contains(&site)
    }

    /// The four switch-then-walk successors, ordered
    /// `(n−1, off), (n−1, on), (n+1, off), (n+1, on)`.
    pub fn moves(&self) -> [LampState; 4] {
        let n = self.position;
        let step = |dir: i64, on: bool| {
            let mut s = self.with_lamp(n, on);
            s.position = n + dir;
            s
        };
        [step(-1, false), step(-1, true), step(1, false), step(1, true)]
    }

    /// States from which one switch-then-walk step reaches `self`.
    pub fn predecessors(&self) -> [LampState; 4] {
        let n = self.position;
        let pre = |from: i64, on: bool| {
            let mut s = self.with_lamp(from, on);
            s.position = from;
            s
        };
        [pre(n - 1, false), pre(n - 1, true), pre(n + 1, false), pre(n + 1, true)]
    }

    /// Exact word length from (0, ∅).
    ///
    /// A step sequence reaches `(x′, ξ)` iff every lit site is *departed* at
    /// least once, so the shortest walk covers `[lo, hi]` (the hull of 0, x′
    /// and the lit lamps) and ends at x′. It is one of the two sweeps
    /// `0 → lo → hi → x′` or `0 → hi → lo → x′`, plus two extra steps when
    /// x′ itself is lit and the sweep only reaches x′ at the very end.
    pub fn word_length(&self) -> u64 {
        let pos = self.position;
        let lo = self.lamps.first().copied().unwrap_or(0).min(0).min(pos);
        let hi = self.lamps.last().copied().unwrap_or(0).max(0).max(pos);
        let lit_here = self.lit(pos);
        let left = (-lo) + (hi - lo) + (hi - pos);
        let right = hi + (hi - lo) + (pos - lo);
        let left_ok = !lit_here || pos < hi || (pos == 0 && lo < 0);
        let right_ok = !lit_here || pos > lo || (pos == 0 && hi > 0);
        let l = left + if left_ok { 0 } else { 2 };
        let r = right + if right_ok { 0 } else { 2 };
        l.min(r) as u64
    }

    /// `2a + b + |b − x′|` with a = max(0, −min ξ), b = max(0, max ξ) for
    /// x′ ≥ 0, and its mirror image for x′ < 0.
    ///
    /// This undercounts by exactly 2 when the lamp at x′ is lit and x′ is the
    /// far end of the sweep; [`Self::word_length`] is exact.
    pub fn sweep_distance(&self) -> u64 {
        let (pos, min, max) = if self.position >= 0 {
            (self.position, self.lamps.first().copied(), self.lamps.last().copied())
        } else {
            (-self.position, self.lamps.last().map(|m| -m), self.lamps.first().map(|m| -m))
        };
        let a = (-min.unwrap_or(0)).max(0);
        let b = max.unwrap_or(0).max(0);
        (2 * a + b + (b - pos).abs()) as u64
    }

    /// Reporting label: `position|lamp,lamp,...`.
    pub fn label(&self) -> String {
        let lamps: Vec<String> = self.lamps.iter().map(|l| l.to_string()).collect();
        format!("{}|{}", self.position, lamps.join(","))
    }

    pub fn parse_label(s: &str) -> Option<Self> {
        let (p, l) = s.split_once('|')?;
        let position = p.trim().parse().ok()?;
        let lamps = l
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse().ok())
            .collect::<Option<BTreeSet<i64>>>()?;
        Some(Self { position, lamps })
    }
}

/// The closed ball B̄(x₀, r_max) of the lamplighter group.
///
/// `states` are in breadth-first discovery order from the base point, so
/// `distance` is nondecreasing along the vector. `successors[i]` gives the
/// index of each of the four steps from state `i`, or `None` when the step
/// leaves the enumerated set (only possible at distance `r_max + 1`).
///
/// `graph` is the undirected support of the step relation on the enumerated
/// states with unit weights: every interior state has six undirected
/// neighbours (four successors and four predecessors, two of which coincide).
#[derive(Debug, Clone)]
pub struct LamplighterBall {
    pub r_max: u32,
    pub states: Vec<LampState>,
    pub distance: Vec<u32>,
    pub successors: Vec<[Option<usize>; 4]>,
    pub base: usize,
    pub graph: WeightedGraph,
    index: HashMap<LampState, usize>,
}

impl LamplighterBall {
    pub fn index_of(&self, s: &LampState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `{kind, r_max, base, labels: {label: {position, lamps, distance}}}`.
    pub fn sidecar(&self) -> Value {
        let labels: Map<String, Value> = self
            .states
            .iter()
            .zip(&self.distance)
            .map(|(s, d)| {
                (s.label(), json!({"position": s.position, "lamps": s.lamps.iter().collect::<Vec<_>>(), "distance": d}))
            })
            .collect();
        json!({
            "kind": "lamplighter",
            "r_max": self.r_max,
            "base": self.states[self.base].label(),
            "labels": labels,
        })
    }
}

/// Enumerates B̄(x₀, r_max) by breadth-first search over the step set.
pub fn lamplighter_ball(r_max: u32) -> Result<LamplighterBall> {
    if r_max < 1 {
        return Err(Error::pre("lamplighter r_max must be at least 1"));
    }
    let limit = r_max + 1;
    let origin = LampState::origin();
    let mut states = vec![origin.clone()];
    let mut distance = vec![0u32];
    let mut index = HashMap::from([(origin, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let d = distance[i];
        if d == limit {
            continue;
        }
        for next in states[i].moves() {
            if index.contains_key(&next) {
                continue;
            }
            if states.len() >= MAX_LAMPLIGHTER_STATES {
                return Err(Error::pre(format!(
                    "lamplighter ball of radius {r_max} exceeds {MAX_LAMPLIGHTER_STATES} states"
                )));
            }
            index.insert(next.clone(), states.len());
            queue.push_back(states.len());
            states.push(next);
            distance.push(d + 1);
        }
    }

    let successors: Vec<[Option<usize>; 4]> =
        states.iter().map(|s| s.moves().map(|m| index.get(&m).copied())).collect();

    let mut b = GraphBuilder::new();
    for s in &states {
        b.vertex(&s.label());
    }
    for (i, succ) in successors.iter().enumerate() {
        for j in succ.iter().flatten() {
            b.edge_idx(i, *j, 1.0)?;
        }
    }
    for (i, s) in states.iter().enumerate() {
        let complete =
            successors[i].iter().all(Option::is_some) && s.predecessors().iter().all(|p| index.contains_key(p));
        if !complete {
            b.mark_halo(i);
        }
    }
    let graph = b.build()?;
    Ok(LamplighterBall { r_max, states, distance, successors, base: 0, graph, index })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_distinct_successors() {
        let s = LampState::new(2, [0, 2, 5]);
        let m = s.moves();
        let set: BTreeSet<_> = m.iter().cloned().collect();
        assert_eq!(set.len(), 4);
        assert_eq!(m[1], LampState::new(1, [0, 2, 5]));
        assert_eq!(m[2], LampState::new(3, [0, 5]));
        for p in s.predecessors() {
            assert!(p.moves().contains(&s));
        }
    }

    #[test]
    fn base_point_has_distance_zero() {
        assert_eq!(LampState::origin().word_length(), 0);
        assert_eq!(LampState::origin().sweep_distance(), 0);
    }

    #[test]
    fn formula_examples() {
        // lamps on [−a, b] with x′ ≥ 0 off the far end
        let s = LampState::new(1, [-2, 0, 3]);
        assert_eq!(s.sweep_distance(), 2 * 2 + 3 + 2);
        assert_eq!(s.word_length(), 9);
        // lit final site at the far end needs a detour
        let s = LampState::new(0, [0]);
        assert_eq!(s.sweep_distance(), 0);
        assert_eq!(s.word_length(), 2);
    }

    #[test]
    fn label_roundtrip() {
        let s = LampState::new(-3, [-1, 4]);
        assert_eq!(s.label(), "-3|-1,4");
        assert_eq!(LampState::parse_label(&s.label()), Some(s));
        assert_eq!(LampState::parse_label("0|"), Some(LampState::origin()));
    }

    #[test]
    fn small_ball_structure() {
        let ball = lamplighter_ball(3).unwrap();
        assert_eq!(ball.states[ball.base], LampState::origin());
        for (i, s) in ball.states.iter().enumerate() {
            assert_eq!(ball.distance[i] as u64, s.word_length(), "{}", s.label());
            if ball.distance[i] <= 3 {
                assert!(ball.successors[i].iter().all(Option::is_some));
            }
        }
        // the base point: four successors, six undirected neighbours
        assert_eq!(ball.graph.degree(ball.base), 6);
        assert!(!ball.graph.is_halo(ball.base));
    }
}
