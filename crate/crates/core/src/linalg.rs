//! Sparse symmetric positive definite solves.
//!
//! Dirichlet problems on graph domains produce matrices of the form
//! `diag(μ) − ν` restricted to the domain. Up to [`DIRECT_LIMIT`] unknowns we
//! factor once with an envelope (profile) Cholesky after reverse
//! Cuthill–McKee reordering and reuse the factor for every right-hand side.
//! Larger systems fall back to Jacobi-preconditioned conjugate gradients.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub const DIRECT_LIMIT: usize = 200_000;

/// Relative residual target of the iterative path.
pub const CG_TOLERANCE: f64 = 1e-11;

/// Symmetric matrix in compressed rows, both triangles stored.
#[derive(Debug, Clone)]
pub struct SymmetricMatrix {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds from per-row `(column, value)` lists. The caller supplies both
    /// triangles; rows are sorted here.
    pub fn from_rows(mut rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        offsets.push(0);
        for row in &mut rows {
            row.sort_by_key(|&(c, _)| c);
            for &(c, v) in row.iter() {
                cols.push(c);
                vals.push(v);
            }
            offsets.push(cols.len());
        }
        Self { n, offsets, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn mul(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).map(|(c, v)| v * x[c]).sum();
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).find(|&(c, _)| c == i).map_or(0.0, |(_, v)| v)).collect()
    }
}

/// Reverse Cuthill–McKee ordering; `order[k]` is the original index placed
/// at position `k`.
pub fn reverse_cuthill_mckee(m: &SymmetricMatrix) -> Vec<usize> {
    let n = m.n;
    let degree: Vec<usize> = (0..n).map(|i| m.row(i).filter(|&(c, _)| c != i).count()).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    let mut level = vec![usize::MAX; n];
    for &seed in &by_degree {
        if placed[seed] {
            continue;
        }
        let start = pseudo_peripheral(m, seed, &degree, &mut level);
        let mut queue = VecDeque::from([start]);
        placed[start] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nb: Vec<usize> = m.row(u).map(|(c, _)| c).filter(|&c| c != u && !placed[c]).collect();
            nb.sort_by_key(|&c| (degree[c], c));
            for c in nb {
                placed[c] = true;
                queue.push_back(c);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(m: &SymmetricMatrix, start: usize, level: &mut [usize]) -> Vec<usize> {
    let mut visited = vec![start];
    level[start] = 0;
    let mut head = 0;
    while head < visited.len() {
        let u = visited[head];
        head += 1;
        for (c, _) in m.row(u) {
            if level[c] == usize::MAX {
                level[c] = level[u] + 1;
                visited.push(c);
            }
        }
    }
    visited
}

// George–Liu: hop to a minimum-degree vertex of the last BFS level until
// the eccentricity stops growing.
fn pseudo_peripheral(m: &SymmetricMatrix, seed: usize, degree: &[usize], level: &mut [usize]) -> usize {
    let mut start = seed;
    let mut ecc = 0;
    loop {
        let visited = bfs_levels(m, start, level);
        let depth = visited.iter().map(|&v| level[v]).max().unwrap_or(0);
        let candidate =
            visited.iter().copied().filter(|&v| level[v] == depth).min_by_key(|&v| (degree[v], v)).unwrap_or(start);
        for &v in &visited {
            level[v] = usize::MAX;
        }
        if depth <= ecc || candidate == start {
            return start;
        }
        ecc = depth;
        start = candidate;
    }
}

#[derive(Debug, Clone)]
struct Envelope {
    order: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl Envelope {
    fn factor(m: &SymmetricMatrix) -> Result<Self> {
        let n = m.n;
        let order = reverse_cuthill_mckee(m);
        let mut position = vec![0; n];
        for (k, &o) in order.iter().enumerate() {
            position[o] = k;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (i, &o) in order.iter().enumerate() {
            for (c, _) in m.row(o) {
                first[i] = first[i].min(position[c]);
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i] + 1));
        }
        let mut data = vec![0.0; start[n]];
        for (i, &o) in order.iter().enumerate() {
            for (c, v) in m.row(o) {
                let j = position[c];
                if j <= i {
                    data[start[i] + j - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let (head, row_i) = data.split_at_mut(start[i]);
                let li = &row_i[..=i - fi];
                let dot: f64 = if j < i {
                    let lj = &head[start[j]..start[j + 1]];
                    (k0..j).map(|k| li[k - fi] * lj[k - fj]).sum()
                } else {
                    li[k0 - fi..j - fi].iter().map(|x| x * x).sum()
                };
                let s = row_i[j - fi] - dot;
                if j < i {
                    let ljj = head[start[j + 1] - 1];
                    row_i[j - fi] = s / ljj;
                } else {
                    if !(s > 0.0) {
                        return Err(Error::Solver(format!("matrix not positive definite (pivot {s:e} at row {i})")));
                    }
                    row_i[j - fi] = s.sqrt();
                }
            }
        }
        Ok(Self { order, first, start, data })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.order.len();
        let mut y: Vec<f64> = self.order.iter().map(|&o| b[o]).collect();
        // L y = b
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let mut s = y[i];
            for k in fi..i {
                s -= row[k - fi] * y[k];
            }
            y[i] = s / row[i - fi];
        }
        // Lᵀ x = y, column-oriented
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for k in fi..i {
                y[k] -= row[k - fi] * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (k, &o) in self.order.iter().enumerate() {
            x[o] = y[k];
        }
        x
    }

    fn stored(&self) -> usize {
        self.data.len()
    }
}

#[derive(Debug, Clone)]
enum Backend {
    Direct(Envelope),
    Iterative { inv_diag: Vec<f64> },
}

/// A reusable solver for `A x = b` with a fixed SPD matrix `A`.
#[derive(Debug, Clone)]
pub struct SpdSolver {
    matrix: SymmetricMatrix,
    backend: Backend,
}

impl SpdSolver {
    pub fn new(matrix: SymmetricMatrix) -> Result<Self> {
        Self::with_direct_limit(matrix, DIRECT_LIMIT)
    }

    /// Factors directly when the dimension is at most `limit`.
    pub fn with_direct_limit(matrix: SymmetricMatrix, limit: usize) -> Result<Self> {
        let backend = if matrix.n <= limit {
            Backend::Direct(Envelope::factor(&matrix)?)
        } else {
            let d = matrix.diagonal();
            if let Some(i) = d.iter().position(|&x| !(x > 0.0)) {
                return Err(Error::Solver(format!("non-positive diagonal at row {i}")));
            }
            Backend::Iterative { inv_diag: d.iter().map(|x| 1.0 / x).collect() }
        };
        Ok(Self { matrix, backend })
    }

    pub fn dim(&self) -> usize {
        self.matrix.n
    }

    pub fn is_direct(&self) -> bool {
        matches!(self.backend, Backend::Direct(_))
    }

    /// Entries held by the envelope factor (0 on the iterative path).
    pub fn factor_size(&self) -> usize {
        match &self.backend {
            Backend::Direct(e) => e.stored(),
            Backend::Iterative { .. } => 0,
        }
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.matrix
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.matrix.n {
            return Err(Error::Solver(format!("rhs length {} for dimension {}", b.len(), self.matrix.n)));
        }
        match &self.backend {
            Backend::Direct(e) => Ok(e.solve(b)),
            Backend::Iterative { inv_diag } => self.cg(b, inv_diag),
        }
    }

    fn cg(&self, b: &[f64], inv_diag: &[f64]) -> Result<Vec<f64>> {
        let n = b.len();
        let bnorm = norm(b);
        let mut x = vec![0.0; n];
        if bnorm == 0.0 {
            return Ok(x);
        }
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(a, d)| a * d).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        let max_iter = 10 * n + 1000;
        for _ in 0..max_iter {
            self.matrix.mul(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if norm(&r) <= CG_TOLERANCE * bnorm {
                return Ok(x);
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::Solver(format!("conjugate gradients did not reach {CG_TOLERANCE:e} in {max_iter} iterations")))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    // 1-D Dirichlet Laplacian of size n: tridiagonal (2, -1).
    fn tridiag(n: usize) -> SymmetricMatrix {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![(i, 2.0)];
                if i > 0 {
                    r.push((i - 1, -1.0));
                }
                if i + 1 < n {
                    r.push((i + 1, -1.0));
                }
                r
            })
            .collect();
        SymmetricMatrix::from_rows(rows)
    }

    fn grid(k: usize) -> SymmetricMatrix {
        let id = |x: usize, y: usize| x * k + y;
        let mut rows = vec![Vec::new(); k * k];
        for x in 0..k {
            for y in 0..k {
                let i = id(x, y);
                rows[i].push((i, 4.0));
                if x > 0 {
                    rows[i].push((id(x - 1, y), -1.0));
                }
                if x + 1 < k {
                    rows[i].push((id(x + 1, y), -1.0));
                }
                if y > 0 {
                    rows[i].push((id(x, y - 1), -1.0));
                }
                if y + 1 < k {
                    rows[i].push((id(x, y + 1), -1.0));
                }
            }
        }
        SymmetricMatrix::from_rows(rows)
    }

    fn residual(m: &SymmetricMatrix, x: &[f64], b: &[f64]) -> f64 {
        let mut ax = vec![0.0; b.len()];
        m.mul(x, &mut ax);
        ax.iter().zip(b).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn tridiagonal_solution_is_linear_profile() {
        // boundary values 0 and 1 enter as rhs e_{n-1}; solution x_i = (i+1)/(n+1)
        let n = 9;
        let s = SpdSolver::new(tridiag(n)).unwrap();
        let mut b = vec![0.0; n];
        b[n - 1] = 1.0;
        let x = s.solve(&b).unwrap();
        for (i, xi) in x.iter().enumerate() {
            assert!((xi - (i + 1) as f64 / (n + 1) as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn direct_and_iterative_agree_on_grid() {
        let m = grid(12);
        let b: Vec<f64> = (0..m.dim()).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let d = SpdSolver::new(m.clone()).unwrap();
        let it = SpdSolver::with_direct_limit(m.clone(), 0).unwrap();
        assert!(d.is_direct() && !it.is_direct());
        let xd = d.solve(&b).unwrap();
        let xi = it.solve(&b).unwrap();
        assert!(residual(&m, &xd, &b) < 1e-12);
        assert!(residual(&m, &xi, &b) < 1e-9);
        for (a, c) in xd.iter().zip(&xi) {
            assert!((a - c).abs() < 1e-9);
        }
    }

    #[test]
    fn rcm_is_a_permutation_and_shrinks_profile() {
        let m = grid(10);
        let mut order = reverse_cuthill_mckee(&m);
        let env = Envelope::factor(&m).unwrap();
        // natural ordering of a k×k grid has bandwidth k: profile ≈ n·k
        assert!(env.stored() <= 100 * 11);
        order.sort_unstable();
        assert_eq!(order, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let m = SymmetricMatrix::from_rows(vec![vec![(0, 1.0), (1, 2.0)], vec![(0, 2.0), (1, 1.0)]]);
        assert!(matches!(SpdSolver::new(m), Err(Error::Solver(_))));
    }

    #[test]
    fn disconnected_blocks_factor_independently() {
        let m = SymmetricMatrix::from_rows(vec![vec![(0, 2.0)], vec![(1, 4.0)]]);
        let x = SpdSolver::new(m).unwrap().solve(&[1.0, 1.0]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && (x[1] - 0.25).abs() < 1e-15);
    }
}
