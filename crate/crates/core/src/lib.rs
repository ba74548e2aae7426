//! Discrete potential theory on weighted graphs.
//!
//! The crate computes harmonic measure, Green's functions, Harnack-type
//! constants (elliptic Harnack, Green-function Harnack, annulus ratios and
//! oscillation decay), effective conductances, and simulates coupled random
//! walks, including the switch-then-walk chain on the lamplighter group.
//!
//! Graphs are finite; the infinite families (Z^d, the three-rail graph, the
//! lamplighter group) are represented by truncations whose cut vertices are
//! tracked, and every operation that imposes harmonicity refuses domains
//! touching them.

// `!(x > 0.0)` is how NaN gets rejected along with the rest
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conductance;
pub mod coupling;
pub mod error;
pub mod generators;
pub mod graph;
pub mod harnack;
pub mod io;
pub mod linalg;
pub mod potential;

pub use error::{Error, Result};
pub use graph::{build_graph, BallTag, GraphBuilder, VertexField, VertexSet, WeightedGraph};
