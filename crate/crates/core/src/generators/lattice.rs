use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, WeightedGraph};

pub const MAX_LATTICE_VERTICES: usize = 5_000_000;

/// Label of a lattice point: coordinates joined by commas, e.g. `"-1,2"`.
pub fn lattice_label(coords: &[i64]) -> String {
    coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_label(label: &str) -> Vec<i64> {
    label.split(',').filter_map(|s| s.parse().ok()).collect()
}

/// The box [−w, w]^d of Z^d with unit nearest-neighbour weights.
///
/// Vertices are indexed in lexicographic coordinate order. Vertices on the
/// faces of the box are halo vertices.
pub fn lattice_box(dim: usize, half_width: i64) -> Result<WeightedGraph> {
    if !(1..=3).contains(&dim) {
        return Err(Error::pre(format!("lattice dimension must be 1, 2 or 3 (got {dim})")));
    }
    if half_width < 1 {
        return Err(Error::pre("half_width must be at least 1"));
    }
    let side = (2 * half_width + 1) as usize;
    let count = side
        .checked_pow(dim as u32)
        .filter(|&c| c <= MAX_LATTICE_VERTICES)
        .ok_or_else(|| Error::pre(format!("lattice box {side}^{dim} exceeds {MAX_LATTICE_VERTICES} vertices")))?;

    let coords_of = |mut k: usize| -> Vec<i64> {
        let mut c = vec![0; dim];
        for slot in c.iter_mut().rev() {
            *slot = (k % side) as i64 - half_width;
            k /= side;
        }
        c
    };
    let mut b = GraphBuilder::new();
    for k in 0..count {
        b.vertex(&lattice_label(&coords_of(k)));
    }
    let stride: Vec<usize> = (0..dim).map(|a| side.pow((dim - 1 - a) as u32)).collect();
    for k in 0..count {
        let c = coords_of(k);
        for a in 0..dim {
            if c[a] < half_width {
                b.edge_idx(k, k + stride[a], 1.0)?;
            }
        }
        if c.iter().any(|x| x.abs() == half_width) {
            b.mark_halo(k);
        }
    }
    b.build()
}

/// JSON description of lattice labels: `{kind, labels: {label: [coords]}}`.
pub fn lattice_sidecar(g: &WeightedGraph, dim: usize, half_width: i64) -> Value {
    let labels: Map<String, Value> = g.labels().iter().map(|l| (l.clone(), json!(parse_label(l)))).collect();
    json!({"kind": "lattice", "dim": dim, "half_width": half_width, "labels": labels})
}
