//! Harmonic extension, harmonic measure and Green's functions on finite
//! domains.
//!
//! For a domain `A` the Dirichlet problem reduces to the SPD system
//! `M h = b` with `M = diag(μ) − ν` restricted to `A` and `b(x) = Σ_{z∈∂A}
//! ν_xz f(z)`. The same `M` gives the Green's function: the expected number
//! of visits `v(y)` to `y` before leaving `A`, started at `x₀`, satisfies
//! `v(y) = δ_{x₀}(y) + Σ_x v(x) ν_xy/μ(x)`, so `g = v/μ` solves `M g = e_{x₀}`.
//!
//! Two independent routes lead to harmonic measure:
//! * column route ([`DirichletSolver::exit_column`]): solve with indicator
//!   boundary data, one solve per boundary vertex;
//! * Green route ([`harmonic_measure`]): last-exit decomposition
//!   `h_z(x) = Σ_{y∈A} g_A(x, y) ν_yz`, one solve per starting point.

use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::graph::{VertexField, VertexSet, WeightedGraph};
use crate::linalg::{SpdSolver, SymmetricMatrix};

/// Relative tolerance on |Δh| for a computed harmonic extension.
pub const HARMONIC_RESIDUAL_TOL: f64 = 1e-10;
/// Allowed deviation of Σ_z h_z(x) from 1.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Exit distribution P^x(X_τ = z) over the exterior boundary of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitDistribution {
    pub start: usize,
    pub boundary: VertexSet,
    pub probs: Vec<f64>,
}

impl ExitDistribution {
    pub fn prob(&self, z: usize) -> f64 {
        self.boundary.position(z).map_or(0.0, |k| self.probs[k])
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// JSON object keyed by vertex label.
    pub fn to_json(&self, g: &WeightedGraph) -> Value {
        labelled(g, self.boundary.iter().copied().zip(self.probs.iter().copied()))
    }
}

/// g_D(x₀, ·) on a finite domain `D`; zero off `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenColumn {
    pub domain: VertexSet,
    pub source: usize,
    pub values: Vec<f64>,
}

impl GreenColumn {
    pub fn get(&self, y: usize) -> f64 {
        self.domain.position(y).map_or(0.0, |k| self.values[k])
    }

    /// The column as a field on the closure `D̄` (zero on ∂D).
    pub fn to_field(&self, g: &WeightedGraph) -> VertexField {
        let closure = g.closure(&self.domain);
        VertexField::from_fn(closure, |v| self.get(v))
    }
}

/// Serializes a field as a JSON object keyed by vertex label.
pub fn field_to_json(g: &WeightedGraph, f: &VertexField) -> Value {
    labelled(g, f.iter())
}

fn labelled(g: &WeightedGraph, items: impl Iterator<Item = (usize, f64)>) -> Value {
    let map: Map<String, Value> = items.map(|(v, x)| (g.label(v).to_string(), Value::from(x))).collect();
    Value::Object(map)
}

/// Values of h_z(u) for a set of points `u` and every boundary vertex `z`.
#[derive(Debug, Clone)]
pub struct ExitKernel {
    pub points: VertexSet,
    pub boundary: VertexSet,
    /// Row-major: `values[i * boundary.len() + j]` = h_{boundary[j]}(points[i]).
    pub values: Vec<f64>,
}

impl ExitKernel {
    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.boundary.len();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.boundary.len() + j]
    }
}

/// A factored Dirichlet problem on a fixed domain.
#[derive(Debug)]
pub struct DirichletSolver<'g> {
    graph: &'g WeightedGraph,
    domain: VertexSet,
    boundary: VertexSet,
    solver: SpdSolver,
}

impl<'g> DirichletSolver<'g> {
    /// Factors `diag(μ) − ν` on `domain`. Fails for empty domains, domains
    /// with no exterior boundary, and domains touching the truncation halo.
    pub fn new(graph: &'g WeightedGraph, domain: &VertexSet) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::pre("domain is empty"));
        }
        if let Some(&v) = domain.iter().find(|&&v| v >= graph.len()) {
            return Err(Error::VertexIndex(v));
        }
        graph.check_unclipped(domain, "Dirichlet domain")?;
        let boundary = graph.exterior_boundary(domain);
        if boundary.is_empty() {
            return Err(Error::pre("domain has no exterior boundary (whole graph): exit time undefined"));
        }
        let rows = domain
            .iter()
            .map(|&x| {
                let mut row = vec![(domain.position(x).unwrap(), graph.measure(x))];
                for (y, w) in graph.neighbors(x) {
                    if let Some(k) = domain.position(y) {
                        row.push((k, -w));
                    }
                }
                row
            })
            .collect();
        let solver = SpdSolver::new(SymmetricMatrix::from_rows(rows))
            .map_err(|e| Error::Solver(format!("Dirichlet matrix: {e}")))?;
        Ok(Self { graph, domain: domain.clone(), boundary, solver })
    }

    pub fn domain(&self) -> &VertexSet {
        &self.domain
    }

    pub fn boundary(&self) -> &VertexSet {
        &self.boundary
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    /// Unique harmonic extension of boundary data, as a field on Ā.
    pub fn extend(&self, boundary_values: &VertexField) -> Result<VertexField> {
        let g = self.graph;
        let mut rhs = vec![0.0; self.domain.len()];
        for (k, &x) in self.domain.iter().enumerate() {
            for (y, w) in g.neighbors(x) {
                if !self.domain.contains(y) {
                    rhs[k] += w * boundary_values.get(y).map_err(|_| Error::MissingValue(g.label(y).to_string()))?;
                }
            }
        }
        let h = self.solver.solve(&rhs)?;
        let closure = self.domain.union(&self.boundary);
        let field = VertexField::from_fn(closure, |v| match self.domain.position(v) {
            Some(k) => h[k],
            None => boundary_values.get(v).unwrap_or(f64::NAN),
        });
        let scale =
            self.boundary.iter().map(|&z| boundary_values.get(z).map(f64::abs).unwrap_or(0.0)).fold(0.0, f64::max);
        let tol = HARMONIC_RESIDUAL_TOL * scale;
        let check = is_harmonic(g, &field, &self.domain, tol)?;
        if !check.harmonic {
            return Err(Error::Residual(format!(
                "harmonic extension residual {:e} exceeds {tol:e}",
                check.max_residual
            )));
        }
        Ok(field)
    }

    /// h_z on the domain: the harmonic extension of the indicator of `z`.
    pub fn exit_column(&self, z: usize) -> Result<Vec<f64>> {
        if !self.boundary.contains(z) {
            return Err(Error::pre(format!("`{}` is not on the exterior boundary", self.graph.label(z))));
        }
        let rhs: Vec<f64> = self.domain.iter().map(|&x| self.graph.weight(x, z)).collect();
        self.solver.solve(&rhs)
    }

    /// h_z(u) for every `u ∈ points` and `z ∈ ∂A`, one solve per `z`.
    pub fn exit_kernel(&self, points: &VertexSet) -> Result<ExitKernel> {
        let pos: Vec<usize> = points
            .iter()
            .map(|&u| {
                self.domain
                    .position(u)
                    .ok_or_else(|| Error::pre(format!("`{}` is not in the domain", self.graph.label(u))))
            })
            .collect::<Result<_>>()?;
        let columns: Vec<Vec<f64>> =
            self.boundary.as_slice().par_iter().map(|&z| self.exit_column(z)).collect::<Result<_>>()?;
        let m = self.boundary.len();
        let mut values = vec![0.0; pos.len() * m];
        for (j, col) in columns.iter().enumerate() {
            for (i, &p) in pos.iter().enumerate() {
                values[i * m + j] = col[p];
            }
        }
        for i in 0..pos.len() {
            let s: f64 = values[i * m..(i + 1) * m].iter().sum();
            if (s - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::Residual(format!("exit kernel row sums to {s}")));
            }
        }
        Ok(ExitKernel { points: points.clone(), boundary: self.boundary.clone(), values })
    }

    /// g_A(x₀, ·) on the domain.
    pub fn green(&self, x0: usize) -> Result<GreenColumn> {
        let k = self
            .domain
            .position(x0)
            .ok_or_else(|| Error::pre(format!("source `{}` is not in the domain", self.graph.label(x0))))?;
        let mut rhs = vec![0.0; self.domain.len()];
        rhs[k] = 1.0;
        let values = self.solver.solve(&rhs)?;
        Ok(GreenColumn { domain: self.domain.clone(), source: x0, values })
    }

    /// Exit distribution from `x` through the Green route.
    pub fn harmonic_measure(&self, x: usize) -> Result<ExitDistribution> {
        let green = self.green(x)?;
        let mut probs = vec![0.0; self.boundary.len()];
        for (&y, &gy) in self.domain.iter().zip(&green.values) {
            for (z, w) in self.graph.neighbors(y) {
                if let Some(j) = self.boundary.position(z) {
                    probs[j] += gy * w;
                }
            }
        }
        for p in &mut probs {
            if *p < 0.0 {
                if *p < -NORMALIZATION_TOL {
                    return Err(Error::Residual(format!("negative exit probability {p:e}")));
                }
                *p = 0.0;
            }
        }
        let dist = ExitDistribution { start: x, boundary: self.boundary.clone(), probs };
        let total = dist.total();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Residual(format!("exit probabilities sum to {total}")));
        }
        Ok(dist)
    }
}

/// Solves the Dirichlet problem on `a` with the given boundary data.
pub fn harmonic_extension(g: &WeightedGraph, a: &VertexSet, boundary_values: &VertexField) -> Result<VertexField> {
    DirichletSolver::new(g, a)?.extend(boundary_values)
}

/// Harmonic measure of the domain `b` seen from `x ∈ b`.
pub fn harmonic_measure(g: &WeightedGraph, b: &VertexSet, x: usize) -> Result<ExitDistribution> {
    if !b.contains(x) {
        return Err(Error::pre(format!("start `{}` is not in the domain", label_or_index(g, x))));
    }
    DirichletSolver::new(g, b)?.harmonic_measure(x)
}

/// Green's function column g_D(x₀, ·).
pub fn green_column(g: &WeightedGraph, d: &VertexSet, x0: usize) -> Result<GreenColumn> {
    if !d.contains(x0) {
        return Err(Error::pre(format!("source `{}` is not in D", label_or_index(g, x0))));
    }
    DirichletSolver::new(g, d)?.green(x0)
}

fn label_or_index(g: &WeightedGraph, v: usize) -> String {
    if v < g.len() {
        g.label(v).to_string()
    } else {
        format!("#{v}")
    }
}

/// Σ_{n ≤ n_max} P^{x₀}(X_n = y, n < τ_D)/μ(y), by iterating the killed
/// kernel. Independent of the linear solver; used as a cross-check.
pub fn green_series_oracle(g: &WeightedGraph, d: &VertexSet, x0: usize, n_max: usize) -> Result<VertexField> {
    let k0 = d.position(x0).ok_or_else(|| Error::pre(format!("source `{}` is not in D", label_or_index(g, x0))))?;
    let members = d.as_slice();
    // killed transition lists: for each y in D, incoming (x, p_xy) from x in D
    let incoming: Vec<Vec<(usize, f64)>> = members
        .iter()
        .map(|&y| g.neighbors(y).filter_map(|(x, w)| d.position(x).map(|kx| (kx, w / g.measure(x)))).collect())
        .collect();
    let mut q = vec![0.0; members.len()];
    q[k0] = 1.0;
    let mut acc: Vec<f64> = members.iter().zip(&q).map(|(&y, p)| p / g.measure(y)).collect();
    let mut next = vec![0.0; members.len()];
    for _ in 0..n_max {
        for (k, inc) in incoming.iter().enumerate() {
            next[k] = inc.iter().map(|&(kx, p)| q[kx] * p).sum();
        }
        std::mem::swap(&mut q, &mut next);
        for (k, &y) in members.iter().enumerate() {
            acc[k] += q[k] / g.measure(y);
        }
    }
    VertexField::new(d.clone(), acc)
}

/// Outcome of [`is_harmonic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicCheck {
    pub harmonic: bool,
    pub max_residual: f64,
}

/// max_{x∈A} |Δf(x)| compared against `tol`.
pub fn is_harmonic(g: &WeightedGraph, f: &VertexField, a: &VertexSet, tol: f64) -> Result<HarmonicCheck> {
    let mut max_residual: f64 = 0.0;
    for &x in a {
        max_residual = max_residual.max(g.laplacian_apply(f, x)?.abs());
    }
    Ok(HarmonicCheck { harmonic: max_residual <= tol, max_residual })
}
