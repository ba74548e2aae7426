//! Finite truncations of the graph families used in the experiments.
//!
//! Every generator marks the vertices cut by its truncation as halo vertices
//! (see [`crate::graph::WeightedGraph::check_unclipped`]) and can describe
//! its vertex labels as a JSON sidecar.

mod lamplighter;
mod lattice;
mod perturb;
mod three_rail;

pub use lamplighter::{lamplighter_ball, LampState, LamplighterBall, MAX_LAMPLIGHTER_STATES};
pub use lattice::{lattice_box, lattice_label, lattice_sidecar, MAX_LATTICE_VERTICES};
pub use perturb::perturb_weights;
pub use three_rail::{three_rail, three_rail_label, three_rail_sidecar};
