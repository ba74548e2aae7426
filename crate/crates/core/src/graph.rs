//! Immutable weighted graphs with metric operations and the Laplacian.
//!
//! Vertices are dense indices `0..n` assigned at build time; every vertex also
//! carries a string label used for reporting and file I/O. Adjacency is stored
//! in compressed rows with neighbours in ascending index order, which fixes the
//! summation order of every per-vertex sum (in particular the measure).
//!
//! Infinite graphs are handled through finite truncations. A generator marks
//! the vertices whose neighbourhood was cut by the truncation as *halo*
//! vertices; operations that impose harmonicity on a domain refuse domains
//! containing halo vertices (see [`WeightedGraph::check_unclipped`]).

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};

/// A finite, connected graph with symmetric positive conductances.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    measure: Vec<f64>,
    halo: Vec<bool>,
}

/// Incremental constructor for [`WeightedGraph`].
///
/// Vertex indices follow first insertion. Duplicate edges are accepted when
/// the weights agree bit for bit and rejected otherwise.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: BTreeMap<(usize, usize), f64>,
    halo: Vec<usize>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the index of `label`, inserting it if new.
    pub fn vertex(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), i);
        i
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn edge(&mut self, u: &str, v: &str, weight: f64) -> Result<()> {
        let a = self.vertex(u);
        let b = self.vertex(v);
        self.edge_idx(a, b, weight)
    }

    pub fn edge_idx(&mut self, u: usize, v: usize, weight: f64) -> Result<()> {
        if u >= self.labels.len() {
            return Err(Error::VertexIndex(u));
        }
        if v >= self.labels.len() {
            return Err(Error::VertexIndex(v));
        }
        if u == v {
            return Err(Error::SelfLoop(self.labels[u].clone()));
        }
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::NonPositiveWeight(self.labels[u].clone(), self.labels[v].clone(), weight));
        }
        let key = (u.min(v), u.max(v));
        match self.edges.get(&key) {
            Some(&w) if w.to_bits() != weight.to_bits() => {
                Err(Error::ConflictingEdge(self.labels[key.0].clone(), self.labels[key.1].clone(), w, weight))
            }
            Some(_) => Ok(()),
            None => {
                self.edges.insert(key, weight);
                Ok(())
            }
        }
    }

    /// Marks a vertex whose neighbourhood is incomplete because of truncation.
    pub fn mark_halo(&mut self, v: usize) {
        self.halo.push(v);
    }

    pub fn build(self) -> Result<WeightedGraph> {
        let n = self.labels.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if self.edges.is_empty() {
            return Err(Error::pre("graph needs at least one edge"));
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (&(u, v), &w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(2 * self.edges.len());
        let mut weights = Vec::with_capacity(2 * self.edges.len());
        let mut measure = Vec::with_capacity(n);
        offsets.push(0);
        for row in &mut adj {
            row.sort_by_key(|&(t, _)| t);
            let mut mu = 0.0;
            for &(t, w) in row.iter() {
                targets.push(t);
                weights.push(w);
                mu += w;
            }
            measure.push(mu);
            offsets.push(targets.len());
        }
        let mut halo = vec![false; n];
        for v in self.halo {
            if v >= n {
                return Err(Error::VertexIndex(v));
            }
            halo[v] = true;
        }
        let g = WeightedGraph { labels: self.labels, index: self.index, offsets, targets, weights, measure, halo };
        let comps = g.component_count();
        if comps != 1 {
            return Err(Error::Disconnected(comps));
        }
        Ok(g)
    }
}

/// `build_graph`: construct from `(u, v, weight)` triples with string labels.
pub fn build_graph<'a, I>(edges: I) -> Result<WeightedGraph>
where
    I: IntoIterator<Item = (&'a str, &'a str, f64)>,
{
    let mut b = GraphBuilder::new();
    for (u, v, w) in edges {
        b.edge(u, v, w)?;
    }
    b.build()
}

impl WeightedGraph {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Looks up a vertex by label.
    pub fn vertex(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::VertexIndex(v))
        }
    }

    /// Neighbours of `v` with their conductances, ascending by index.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.targets[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// μ(v) = Σ_y ν_vy.
    pub fn measure(&self, v: usize) -> f64 {
        self.measure[v]
    }

    /// ν_uv, zero when not adjacent.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        let r = self.offsets[u]..self.offsets[u + 1];
        match self.targets[r.clone()].binary_search(&v) {
            Ok(k) => self.weights[r.start + k],
            Err(_) => 0.0,
        }
    }

    /// Each undirected edge once, as `(u, v, weight)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.len()).flat_map(move |u| self.neighbors(u).filter(move |&(v, _)| v > u).map(move |(v, w)| (u, v, w)))
    }

    pub fn is_halo(&self, v: usize) -> bool {
        self.halo[v]
    }

    pub fn halo_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&v| self.halo[v])
    }

    pub fn has_halo(&self) -> bool {
        self.halo.iter().any(|&h| h)
    }

    /// One-step transition probability p_xy = ν_xy / μ(x).
    pub fn transition_prob(&self, x: usize, y: usize) -> Result<f64> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        Ok(self.weight(x, y) / self.measure[x])
    }

    fn component_count(&self) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for (v, _) in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }

    /// Breadth-first distances from `x`, stopping after `limit` layers.
    /// Unreached vertices get `u32::MAX`.
    pub fn distances_within(&self, x: usize, limit: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        let mut queue = VecDeque::new();
        dist[x] = 0;
        queue.push_back(x);
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            if du == limit {
                continue;
            }
            for (v, _) in self.neighbors(u) {
                if dist[v] == u32::MAX {
                    dist[v] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Graph distances from `x` to every vertex.
    pub fn distances_from(&self, x: usize) -> Vec<u32> {
        self.distances_within(x, u32::MAX)
    }

    pub fn distance(&self, x: usize, y: usize) -> Result<u32> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        Ok(self.distances_from(x)[y])
    }

    /// B(x, r) = {y : d(x, y) ≤ r}, tagged with its centre and radius.
    pub fn ball(&self, x: usize, r: u32) -> Result<VertexSet> {
        self.check_vertex(x)?;
        let dist = self.distances_within(x, r);
        let members = (0..self.len()).filter(|&v| dist[v] <= r).collect();
        Ok(VertexSet { members, ball: Some(BallTag { center: x, radius: r }) })
    }

    /// {y : d(x, y) = r}.
    pub fn sphere(&self, x: usize, r: u32) -> Result<VertexSet> {
        self.check_vertex(x)?;
        let dist = self.distances_within(x, r);
        Ok(VertexSet::from_sorted((0..self.len()).filter(|&v| dist[v] == r).collect()))
    }

    /// ∂A: vertices outside `a` adjacent to some member of `a`.
    pub fn exterior_boundary(&self, a: &VertexSet) -> VertexSet {
        let mut inside = vec![false; self.len()];
        for &v in a.iter() {
            inside[v] = true;
        }
        let mut mark = vec![false; self.len()];
        for &u in a.iter() {
            for (v, _) in self.neighbors(u) {
                if !inside[v] {
                    mark[v] = true;
                }
            }
        }
        VertexSet::from_sorted((0..self.len()).filter(|&v| mark[v]).collect())
    }

    /// Ā = A ∪ ∂A.
    pub fn closure(&self, a: &VertexSet) -> VertexSet {
        a.union(&self.exterior_boundary(a))
    }

    /// A shortest path from `x` to `y`.
    ///
    /// Distances are taken from `y`; walking from `x`, each step goes to the
    /// smallest-index neighbour one step closer. The result is the
    /// lexicographically least geodesic as a sequence of vertex indices.
    pub fn geodesic(&self, x: usize, y: usize) -> Result<Vec<usize>> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        let dist = self.distances_from(y);
        let mut path = vec![x];
        let mut cur = x;
        while cur != y {
            let next = self
                .neighbors(cur)
                .map(|(v, _)| v)
                .find(|&v| dist[v] + 1 == dist[cur])
                .ok_or_else(|| Error::Solver("geodesic: BFS tree broken".into()))?;
            path.push(next);
            cur = next;
        }
        Ok(path)
    }

    /// Largest p with ν_xy/μ(x) ≥ p for every ordered adjacent pair.
    pub fn controlled_weights_p0(&self) -> f64 {
        self.edges().map(|(u, v, w)| (w / self.measure[u]).min(w / self.measure[v])).fold(f64::INFINITY, f64::min)
    }

    /// Same as [`Self::controlled_weights_p0`] restricted to transitions
    /// leaving a vertex of `region`.
    pub fn controlled_weights_p0_on(&self, region: &VertexSet) -> f64 {
        region
            .iter()
            .flat_map(|&x| self.neighbors(x).map(move |(_, w)| w / self.measure[x]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Δf(x) = (1/μ_x) Σ_y ν_xy (f(y) − f(x)).
    pub fn laplacian_apply(&self, f: &VertexField, x: usize) -> Result<f64> {
        self.check_vertex(x)?;
        let fx = f.get(x)?;
        let mut acc = 0.0;
        for (y, w) in self.neighbors(x) {
            acc += w * (f.get(y)? - fx);
        }
        Ok(acc / self.measure[x])
    }

    /// Fails when a member of `a` is a halo vertex: harmonicity on `a` would
    /// then be imposed with a neighbourhood the truncation cut off.
    pub fn check_unclipped(&self, a: &VertexSet, what: &str) -> Result<()> {
        let Some(&bad) = a.iter().find(|&&v| self.halo[v]) else {
            return Ok(());
        };
        let detail = match a.ball_tag() {
            Some(tag) => {
                let margin = self.halo_margin(tag.center);
                format!(
                    "{what}: ball B({}, {}) contains truncation vertex `{}`; margin from centre is {} so the radius must be at most {}",
                    self.label(tag.center),
                    tag.radius,
                    self.label(bad),
                    margin,
                    margin.saturating_sub(1)
                )
            }
            None => format!("{what}: domain contains truncation vertex `{}`", self.label(bad)),
        };
        Err(Error::Clipped(detail))
    }

    /// Distance from `x` to the nearest halo vertex (`u32::MAX` without halo).
    pub fn halo_margin(&self, x: usize) -> u32 {
        if !self.has_halo() {
            return u32::MAX;
        }
        let dist = self.distances_from(x);
        self.halo_vertices().map(|v| dist[v]).min().unwrap_or(u32::MAX)
    }

    /// Copy with every weight multiplied by `factor(u, v, weight)`.
    pub fn map_weights(&self, mut factor: impl FnMut(usize, usize, f64) -> f64) -> Result<Self> {
        let mut b = GraphBuilder::new();
        for l in &self.labels {
            b.vertex(l);
        }
        for (u, v, w) in self.edges() {
            b.edge_idx(u, v, w * factor(u, v, w))?;
        }
        for h in self.halo_vertices() {
            b.mark_halo(h);
        }
        b.build()
    }

    /// Copy with vertex `v` moved to index `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return Err(Error::pre("permutation length mismatch"));
        }
        let mut inv = vec![usize::MAX; self.len()];
        for (v, &p) in perm.iter().enumerate() {
            if p >= self.len() || inv[p] != usize::MAX {
                return Err(Error::pre("not a permutation"));
            }
            inv[p] = v;
        }
        let mut b = GraphBuilder::new();
        for &old in &inv {
            b.vertex(&self.labels[old]);
        }
        for (u, v, w) in self.edges() {
            b.edge_idx(perm[u], perm[v], w)?;
        }
        for h in self.halo_vertices() {
            b.mark_halo(perm[h]);
        }
        b.build()
    }
}

/// Centre and radius of a set produced by [`WeightedGraph::ball`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallTag {
    pub center: usize,
    pub radius: u32,
}

/// A sorted set of vertex indices, optionally remembering it is a ball.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexSet {
    members: Vec<usize>,
    ball: Option<BallTag>,
}

impl VertexSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Self { members, ball: None }
    }

    fn from_sorted(members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Self { members, ball: None }
    }

    pub fn singleton(v: usize) -> Self {
        Self::from_sorted(vec![v])
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Position of `v` among the sorted members.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.members.binary_search(&v).ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.members.iter()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn ball_tag(&self) -> Option<BallTag> {
        self.ball
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::new(self.members.iter().chain(other.members.iter()).copied())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet::from_sorted(self.members.iter().copied().filter(|&v| !other.contains(v)).collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.members.iter().all(|&v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.members.iter().all(|&v| !other.contains(v))
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        VertexSet::new(iter)
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// Real values on a vertex set. Reading outside the domain is an error.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexField {
    domain: VertexSet,
    values: Vec<f64>,
}

impl VertexField {
    pub fn new(domain: VertexSet, values: Vec<f64>) -> Result<Self> {
        if domain.len() != values.len() {
            return Err(Error::pre(format!("field has {} values for {} vertices", values.len(), domain.len())));
        }
        Ok(Self { domain, values })
    }

    pub fn from_fn(domain: VertexSet, mut f: impl FnMut(usize) -> f64) -> Self {
        let values = domain.iter().map(|&v| f(v)).collect();
        Self { domain, values }
    }

    pub fn constant(domain: VertexSet, c: f64) -> Self {
        Self::from_fn(domain, |_| c)
    }

    pub fn domain(&self) -> &VertexSet {
        &self.domain
    }

    /// Values in the order of `domain().iter()`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, v: usize) -> Result<f64> {
        self.domain.position(v).map(|k| self.values[k]).ok_or_else(|| Error::MissingValue(format!("#{v}")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.domain.iter().copied().zip(self.values.iter().copied())
    }

    /// Largest value on `set ∩ domain` (NaN-free input assumed).
    pub fn max_on(&self, set: &VertexSet) -> Result<f64> {
        set.iter().try_fold(f64::NEG_INFINITY, |m, &v| Ok(m.max(self.get(v)?)))
    }

    pub fn min_on(&self, set: &VertexSet) -> Result<f64> {
        set.iter().try_fold(f64::INFINITY, |m, &v| Ok(m.min(self.get(v)?)))
    }

    /// Pointwise `alpha * self + beta * other` on a shared domain.
    pub fn combine(&self, alpha: f64, other: &VertexField, beta: f64) -> Result<VertexField> {
        if self.domain != other.domain && self.domain.as_slice() != other.domain.as_slice() {
            return Err(Error::pre("fields live on different domains"));
        }
        Ok(VertexField {
            domain: self.domain.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> WeightedGraph {
        let labels: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        build_graph((0..n).map(|i| (labels[i].as_str(), labels[i + 1].as_str(), 1.0))).unwrap()
    }

    fn square() -> WeightedGraph {
        build_graph([("a", "b", 1.0), ("b", "d", 1.0), ("d", "c", 1.0), ("c", "a", 1.0)]).unwrap()
    }

    #[test]
    fn single_edge_measure() {
        let g = build_graph([("a", "b", 1.0)]).unwrap();
        assert_eq!(g.measure(0), 1.0);
        assert_eq!(g.measure(1), 1.0);
        assert_eq!(g.controlled_weights_p0(), 1.0);
    }

    #[test]
    fn corner_of_2x2_fragment() {
        let g = square();
        assert_eq!(g.measure(g.vertex("a").unwrap()), 2.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(build_graph([("a", "b", 0.0)]), Err(Error::NonPositiveWeight(..))));
        assert!(matches!(build_graph([("a", "a", 1.0)]), Err(Error::SelfLoop(_))));
        assert!(matches!(build_graph([("a", "b", 1.0), ("c", "d", 1.0)]), Err(Error::Disconnected(2))));
        assert!(matches!(build_graph([("a", "b", 1.0), ("b", "a", 2.0)]), Err(Error::ConflictingEdge(..))));
        // same weight twice is fine
        assert!(build_graph([("a", "b", 1.0), ("b", "a", 1.0)]).is_ok());
    }

    #[test]
    fn transition_probabilities() {
        let g = square();
        let a = g.vertex("a").unwrap();
        let b = g.vertex("b").unwrap();
        let d = g.vertex("d").unwrap();
        assert_eq!(g.transition_prob(a, b).unwrap(), 0.5);
        assert_eq!(g.transition_prob(a, d).unwrap(), 0.0);
        assert!(g.transition_prob(a, 17).is_err());
    }

    #[test]
    fn path_boundary_and_closure() {
        let g = path(10);
        let a = VertexSet::new([3, 4, 5]);
        assert_eq!(g.exterior_boundary(&a).as_slice(), &[2, 6]);
        assert_eq!(g.closure(&a).as_slice(), &[2, 3, 4, 5, 6]);
        let all = VertexSet::new(0..g.len());
        assert!(g.exterior_boundary(&all).is_empty());
    }

    #[test]
    fn ball_radius_zero_and_path_geodesic() {
        let g = path(10);
        assert_eq!(g.ball(4, 0).unwrap().as_slice(), &[4]);
        let p = g.geodesic(0, 5).unwrap();
        assert_eq!(p, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(g.geodesic(3, 3).unwrap(), vec![3]);
    }

    #[test]
    fn laplacian_of_linear_and_constant() {
        let g = path(10);
        let dom = VertexSet::new(0..g.len());
        let lin = VertexField::from_fn(dom.clone(), |v| v as f64);
        assert_eq!(g.laplacian_apply(&lin, 5).unwrap(), 0.0);
        let c = VertexField::constant(dom, 3.5);
        assert_eq!(g.laplacian_apply(&c, 0).unwrap(), 0.0);
        let partial = VertexField::constant(VertexSet::new([4, 5]), 1.0);
        assert!(matches!(g.laplacian_apply(&partial, 5), Err(Error::MissingValue(_))));
    }

    #[test]
    fn field_outside_domain_is_error() {
        let f = VertexField::constant(VertexSet::new([1, 2]), 0.0);
        assert!(f.get(3).is_err());
        assert!(VertexField::new(VertexSet::new([1, 2]), vec![1.0]).is_err());
    }

    #[test]
    fn permutation_roundtrip_preserves_weights() {
        let g = build_graph([("a", "b", 1.5), ("b", "c", 2.0), ("c", "a", 0.25)]).unwrap();
        let h = g.permuted(&[2, 0, 1]).unwrap();
        for (u, v, w) in g.edges() {
            let hu = h.vertex(g.label(u)).unwrap();
            let hv = h.vertex(g.label(v)).unwrap();
            assert_eq!(h.weight(hu, hv), w);
        }
    }
}
