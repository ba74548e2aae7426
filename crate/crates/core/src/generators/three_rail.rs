use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, WeightedGraph};

pub fn three_rail_label(n: i64, i: u8) -> String {
    format!("{n},{i}")
}

/// The graph on Z × {0,1,2} truncated to |n| ≤ n_max.
///
/// Rail 0 is a path; at every n the three vertices form a triangle. The rung
/// {(n,1),(n,2)} has weight 2^−|n|, every other edge weight 1. The endpoints
/// (±n_max, 0) lose a rail neighbour and are the halo.
pub fn three_rail(n_max: i64) -> Result<WeightedGraph> {
    if n_max < 1 {
        return Err(Error::pre("n_max must be at least 1"));
    }
    let mut b = GraphBuilder::new();
    for n in -n_max..=n_max {
        for i in 0..3 {
            b.vertex(&three_rail_label(n, i));
        }
    }
    let id = |n: i64, i: usize| 3 * (n + n_max) as usize + i;
    for n in -n_max..=n_max {
        if n < n_max {
            b.edge_idx(id(n, 0), id(n + 1, 0), 1.0)?;
        }
        b.edge_idx(id(n, 0), id(n, 1), 1.0)?;
        b.edge_idx(id(n, 0), id(n, 2), 1.0)?;
        b.edge_idx(id(n, 1), id(n, 2), 2f64.powi(-(n.abs() as i32)))?;
    }
    b.mark_halo(id(-n_max, 0));
    b.mark_halo(id(n_max, 0));
    b.build()
}

pub fn three_rail_sidecar(g: &WeightedGraph, n_max: i64) -> Value {
    let labels: Map<String, Value> = g
        .labels()
        .iter()
        .map(|l| {
            let parts: Vec<i64> = l.split(',').filter_map(|s| s.parse().ok()).collect();
            (l.clone(), json!(parts))
        })
        .collect();
    json!({"kind": "three_rail", "n_max": n_max, "labels": labels})
}
