use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// ν′_xy = factor(x, y) · ν_xy with every factor inside [1/c₁, c₁].
pub fn perturb_weights(
    g: &WeightedGraph,
    c1: f64,
    mut factor: impl FnMut(usize, usize) -> f64,
) -> Result<WeightedGraph> {
    if !(c1 >= 1.0) {
        return Err(Error::pre(format!("perturbation band c1 = {c1} must be at least 1")));
    }
    let mut bad = None;
    let out = g.map_weights(|u, v, _| {
        let f = factor(u, v);
        if !(f >= 1.0 / c1 && f <= c1) && bad.is_none() {
            bad = Some((u, v, f));
        }
        f.clamp(1.0 / c1, c1)
    })?;
    match bad {
        Some((u, v, f)) => {
            Err(Error::pre(format!("factor {f} on edge ({}, {}) outside [1/{c1}, {c1}]", g.label(u), g.label(v))))
        }
        None => Ok(out),
    }
}
