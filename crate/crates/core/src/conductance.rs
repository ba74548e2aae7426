//! Dirichlet energy, effective conductance, and the dumbbell ratio.
//!
//! Energies use the double sum `Σ_{x∈D} Σ_{y∈D} ν_xy (f(x) − f(y))²`, so each
//! edge inside D contributes twice; a path of n unit edges has conductance
//! 2/n between its ends. The infimum defining `C_D(A, B)` ranges over all
//! functions on D, which leaves the minimiser free (Neumann-like) at D's
//! frontier: only edges with both ends in D enter the form.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{VertexField, VertexSet, WeightedGraph};
use crate::linalg::{SpdSolver, SymmetricMatrix};

/// Number of random feasible functions in the variational cross-check.
pub const VARIATIONAL_SAMPLES: usize = 20;
/// Default pair-count cap for [`dumbbell_ratio`].
pub const DEFAULT_PAIR_CAP: usize = 20_000;

const VARIATIONAL_SEED: u64 = 0x5eed_c0de;

pub fn dirichlet_energy(g: &WeightedGraph, d: &VertexSet, f: &VertexField) -> Result<f64> {
    let mut e = 0.0;
    for &x in d {
        let fx = f.get(x)?;
        for (y, w) in g.neighbors(x) {
            if d.contains(y) {
                let diff = fx - f.get(y)?;
                e += w * diff * diff;
            }
        }
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConductanceResult {
    pub value: f64,
    /// Minimiser on D: 1 on A, 0 on B.
    pub potential: VertexField,
    /// |E(f*) − 2·(flux of f* out of A)| / max(E, tiny); zero up to rounding
    /// for the true minimiser.
    pub energy_residual: f64,
    /// min over random feasible f of E(f) − value; ≥ −1e−9 expected.
    pub variational_gap: f64,
}

/// C_D(A, B) = inf { E_D(f, f) : f = 1 on A, f = 0 on B }.
pub fn effective_conductance(
    g: &WeightedGraph,
    d: &VertexSet,
    a: &VertexSet,
    b: &VertexSet,
) -> Result<ConductanceResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::pre("A and B must be nonempty"));
    }
    if !a.is_disjoint(b) {
        return Err(Error::pre("A and B overlap"));
    }
    if !a.is_subset(d) || !b.is_subset(d) {
        return Err(Error::pre("A and B must lie inside D"));
    }
    for &v in d {
        g.check_vertex(v)?;
    }
    let n = d.len();
    // 0 = A, 1 = B, 2 = free and reachable from A ∪ B inside D, 3 = free, cut off
    let mut kind = vec![3u8; n];
    let mut queue = VecDeque::new();
    for (i, &v) in d.iter().enumerate() {
        if a.contains(v) {
            kind[i] = 0;
            queue.push_back(v);
        } else if b.contains(v) {
            kind[i] = 1;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for (y, _) in g.neighbors(v) {
            if let Some(j) = d.position(y) {
                if kind[j] == 3 {
                    kind[j] = 2;
                    queue.push_back(y);
                }
            }
        }
    }
    let free: Vec<usize> = (0..n).filter(|&i| kind[i] == 2).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &i) in free.iter().enumerate() {
        slot[i] = k;
    }
    let members = d.as_slice();
    let mut rows = Vec::with_capacity(free.len());
    let mut rhs = vec![0.0; free.len()];
    for (k, &i) in free.iter().enumerate() {
        let x = members[i];
        let mut diag = 0.0;
        let mut row = Vec::new();
        for (y, w) in g.neighbors(x) {
            let Some(j) = d.position(y) else { continue };
            diag += w;
            match kind[j] {
                0 => rhs[k] += w,
                2 => row.push((slot[j], -w)),
                _ => {}
            }
        }
        row.push((k, diag));
        rows.push(row);
    }
    let mut values: Vec<f64> = kind.iter().map(|&k| if k == 0 { 1.0 } else { 0.0 }).collect();
    if !free.is_empty() {
        let sol = SpdSolver::new(SymmetricMatrix::from_rows(rows))?.solve(&rhs)?;
        for (k, &i) in free.iter().enumerate() {
            values[i] = sol[k].clamp(0.0, 1.0);
        }
    }
    let potential = VertexField::new(d.clone(), values)?;
    let value = dirichlet_energy(g, d, &potential)?;

    let mut flux = 0.0;
    for &x in a {
        for (y, w) in g.neighbors(x) {
            if d.contains(y) {
                flux += w * (1.0 - potential.get(y)?);
            }
        }
    }
    let energy_residual = (value - 2.0 * flux).abs() / value.max(f64::MIN_POSITIVE);
    let variational_gap = variational_check(g, d, &potential, &kind, value)?;
    Ok(ConductanceResult { value, potential, energy_residual, variational_gap })
}

// Energies of random feasible functions: half are perturbations of the
// minimiser, half are uniform noise on the free vertices.
fn variational_check(g: &WeightedGraph, d: &VertexSet, opt: &VertexField, kind: &[u8], value: f64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(VARIATIONAL_SEED);
    let mut gap = f64::INFINITY;
    for s in 0..VARIATIONAL_SAMPLES {
        let amp = 10f64.powi(-((s % 10) as i32));
        let vals: Vec<f64> = opt
            .values()
            .iter()
            .zip(kind)
            .map(|(&v, &k)| match k {
                0 => 1.0,
                1 => 0.0,
                _ if s % 2 == 0 => (v + amp * (rng.random::<f64>() - 0.5)).clamp(0.0, 1.0),
                _ => rng.random::<f64>(),
            })
            .collect();
        let f = VertexField::new(d.clone(), vals)?;
        gap = gap.min(dirichlet_energy(g, d, &f)? - value);
    }
    Ok(gap)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairConductance {
    pub x: usize,
    pub y: usize,
    pub distance: u32,
    pub conductance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DumbbellReport {
    pub center: usize,
    pub radius: u32,
    pub head_radius: u32,
    /// Admissible pairs before any subsampling.
    pub pairs_total: usize,
    /// Pairs whose heads intersect; excluded and counted.
    pub overlapping: usize,
    pub sampled: bool,
    pub pairs: Vec<PairConductance>,
    pub max: f64,
    pub min: f64,
    pub ratio: f64,
    pub argmax: (usize, usize),
    pub argmin: (usize, usize),
}

impl DumbbellReport {
    pub fn to_json(&self, g: &WeightedGraph) -> serde_json::Value {
        serde_json::json!({
            "center": g.label(self.center),
            "R": self.radius,
            "head_radius": self.head_radius,
            "pairs_total": self.pairs_total,
            "pairs_evaluated": self.pairs.len(),
            "overlapping_excluded": self.overlapping,
            "sampled": self.sampled,
            "max": self.max,
            "min": self.min,
            "ratio": self.ratio,
            "witnesses": {
                "max": [g.label(self.argmax.0), g.label(self.argmax.1)],
                "min": [g.label(self.argmin.0), g.label(self.argmin.1)],
            },
            "convention": "heads B(x, floor(R/10)); pairs with 2 d(x,x0) <= R, 2 d(y,x0) <= R, 3 d(x,y) >= R; D = B(x0,R)",
        })
    }

    pub fn to_csv(&self, g: &WeightedGraph) -> String {
        let mut out = String::from("x,y,conductance\n");
        for p in &self.pairs {
            out.push_str(&format!("\"{}\",\"{}\",{:.16e}\n", g.label(p.x), g.label(p.y), p.conductance));
        }
        out
    }
}

/// Ratio max/min of `C_D(B(x, ⌊R/10⌋), B(y, ⌊R/10⌋))` over the pairs of
/// `𝒟(x₀, R)` with `D = B(x₀, R)`.
///
/// Above `cap` admissible pairs a deterministic subsample stratified by
/// `d(x, y)` is evaluated; every distance shell keeps at least one pair.
pub fn dumbbell_ratio(g: &WeightedGraph, x0: usize, radius: u32, cap: usize) -> Result<DumbbellReport> {
    g.check_vertex(x0)?;
    if radius < 10 {
        return Err(Error::pre(format!("R = {radius} must be at least 10")));
    }
    if cap == 0 {
        return Err(Error::pre("pair cap must be positive"));
    }
    let margin = g.halo_margin(x0);
    if g.has_halo() && radius > margin {
        return Err(Error::Clipped(format!(
            "B({}, {radius}) reaches the truncation; margin from centre is {margin}",
            g.label(x0)
        )));
    }
    let d = g.ball(x0, radius)?;
    let head = radius / 10;
    let from0 = g.distances_within(x0, radius);
    let centres: Vec<usize> = d.iter().copied().filter(|&v| 2 * from0[v] <= radius).collect();

    let mut overlapping = 0;
    let mut shells: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for (i, &x) in centres.iter().enumerate() {
        let dist = g.distances_within(x, radius);
        for &y in &centres[i + 1..] {
            let dxy = dist[y];
            if 3 * dxy < radius {
                continue;
            }
            if dxy <= 2 * head {
                overlapping += 1;
                continue;
            }
            shells.entry(dxy).or_default().push((x, y));
        }
    }
    let pairs_total: usize = shells.values().map(Vec::len).sum();
    if pairs_total == 0 {
        return Err(Error::pre("no admissible dumbbell pairs"));
    }
    let sampled = pairs_total > cap;
    let mut chosen: Vec<(u32, usize, usize)> = Vec::new();
    for (&dist, list) in &shells {
        let take = if sampled { ((list.len() * cap) / pairs_total).max(1).min(list.len()) } else { list.len() };
        for k in 0..take {
            let (x, y) = list[k * list.len() / take];
            chosen.push((dist, x, y));
        }
    }

    let pairs: Vec<PairConductance> = chosen
        .par_iter()
        .map(|&(distance, x, y)| {
            let ha = g.ball(x, head)?;
            let hb = g.ball(y, head)?;
            let c = effective_conductance(g, &d, &ha, &hb)?;
            Ok(PairConductance { x, y, distance, conductance: c.value })
        })
        .collect::<Result<_>>()?;

    let mut imax = 0;
    let mut imin = 0;
    for (i, p) in pairs.iter().enumerate() {
        if p.conductance > pairs[imax].conductance {
            imax = i;
        }
        if p.conductance < pairs[imin].conductance {
            imin = i;
        }
    }
    let (max, min) = (pairs[imax].conductance, pairs[imin].conductance);
    if !(min > 0.0) {
        return Err(Error::Solver("a dumbbell conductance vanished".into()));
    }
    Ok(DumbbellReport {
        center: x0,
        radius,
        head_radius: head,
        pairs_total,
        overlapping,
        sampled,
        argmax: (pairs[imax].x, pairs[imax].y),
        argmin: (pairs[imin].x, pairs[imin].y),
        pairs,
        max,
        min,
        ratio: max / min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::lattice_box;
    use crate::graph::build_graph;

    fn path(n: usize) -> WeightedGraph {
        let labels: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        build_graph((0..n).map(|i| (labels[i].as_str(), labels[i + 1].as_str(), 1.0))).unwrap()
    }

    fn all(g: &WeightedGraph) -> VertexSet {
        VertexSet::new(0..g.len())
    }

    #[test]
    fn energy_conventions() {
        let g = path(1);
        let d = all(&g);
        let f = VertexField::new(d.clone(), vec![1.0, 0.0]).unwrap();
        assert_eq!(dirichlet_energy(&g, &d, &f).unwrap(), 2.0);
        let c = VertexField::constant(d.clone(), 3.0);
        assert_eq!(dirichlet_energy(&g, &d, &c).unwrap(), 0.0);
        let n = 8;
        let g = path(n);
        let d = all(&g);
        let lin = VertexField::from_fn(d.clone(), |v| g.label(v).parse::<f64>().unwrap() / n as f64);
        assert!((dirichlet_energy(&g, &d, &lin).unwrap() - 2.0 / n as f64).abs() < 1e-15);
    }

    #[test]
    fn series_law() {
        for n in [1usize, 2, 5, 17] {
            let g = path(n);
            let a = VertexSet::singleton(g.vertex("0").unwrap());
            let b = VertexSet::singleton(g.vertex(&n.to_string()).unwrap());
            let r = effective_conductance(&g, &all(&g), &a, &b).unwrap();
            assert!((r.value - 2.0 / n as f64).abs() < 1e-12);
            assert!(r.energy_residual < 1e-9);
            assert!(r.variational_gap >= -1e-9);
        }
    }

    #[test]
    fn disconnected_heads_have_zero_conductance() {
        let g = path(6);
        let d = VertexSet::new([0, 1, 4, 5, 6].map(|s| g.vertex(&s.to_string()).unwrap()));
        let a = VertexSet::singleton(g.vertex("0").unwrap());
        let b = VertexSet::singleton(g.vertex("6").unwrap());
        assert_eq!(effective_conductance(&g, &d, &a, &b).unwrap().value, 0.0);
    }

    #[test]
    fn rejects_bad_sets() {
        let g = path(3);
        let d = all(&g);
        let a = VertexSet::new([0, 1]);
        assert!(effective_conductance(&g, &d, &a, &VertexSet::new([1])).is_err());
        assert!(effective_conductance(&g, &d, &a, &VertexSet::new([])).is_err());
    }

    #[test]
    fn dumbbell_small_lattice() {
        let g = lattice_box(2, 14).unwrap();
        let o = g.vertex("0,0").unwrap();
        let r = dumbbell_ratio(&g, o, 10, DEFAULT_PAIR_CAP).unwrap();
        assert!(r.ratio >= 1.0);
        assert_eq!(r.head_radius, 1);
        assert_eq!(r.overlapping, 0);
        assert!(!r.sampled);
        assert!(dumbbell_ratio(&g, o, 9, DEFAULT_PAIR_CAP).is_err());
        assert!(matches!(dumbbell_ratio(&g, o, 15, DEFAULT_PAIR_CAP), Err(Error::Clipped(_))));
        let s = dumbbell_ratio(&g, o, 10, 50).unwrap();
        assert!(s.sampled && s.pairs.len() < r.pairs.len());
        assert_eq!(s.pairs_total, r.pairs_total);
    }
}
