//! Graph sources: `lattice:<d>:<w>`, `three-rail:<n>`, `lamplighter:<R>`
//! or a path to a TSV edge list.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;

use harnack_core::generators::{
    lamplighter_ball, lattice_box, lattice_label, lattice_sidecar, three_rail, three_rail_label, three_rail_sidecar,
};
use harnack_core::io::read_graph_tsv;
use harnack_core::{Error, Result, WeightedGraph};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSource {
    Lattice { dim: usize, half_width: i64 },
    ThreeRail { n_max: i64 },
    Lamplighter { r_max: u32 },
    File(PathBuf),
}

/// A materialised source with its default centre and label sidecar.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: WeightedGraph,
    pub default_center: Option<String>,
    pub sidecar: Value,
}

impl FromStr for GraphSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| Error::Precondition(format!("graph spec `{s}`: {what}"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["lattice", d, w] => {
                let dim: usize = d.parse().map_err(|_| bad("dimension must be a positive integer"))?;
                let half_width: i64 = w.parse().map_err(|_| bad("half-width must be an integer"))?;
                Ok(GraphSource::Lattice { dim, half_width })
            }
            ["three-rail", n] => {
                Ok(GraphSource::ThreeRail { n_max: n.parse().map_err(|_| bad("n_max must be an integer"))? })
            }
            ["lamplighter", r] => Ok(GraphSource::Lamplighter {
                r_max: r.parse().map_err(|_| bad("radius must be a nonnegative integer"))?,
            }),
            [kind, ..] if matches!(*kind, "lattice" | "three-rail" | "lamplighter") => {
                Err(bad("wrong number of `:`-separated fields"))
            }
            _ => Ok(GraphSource::File(PathBuf::from(s))),
        }
    }
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSource::Lattice { dim, half_width } => write!(f, "lattice:{dim}:{half_width}"),
            GraphSource::ThreeRail { n_max } => write!(f, "three-rail:{n_max}"),
            GraphSource::Lamplighter { r_max } => write!(f, "lamplighter:{r_max}"),
            GraphSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl GraphSource {
    /// File-name stem for generated artifacts.
    pub fn slug(&self) -> String {
        match self {
            GraphSource::Lattice { dim, half_width } => format!("lattice-{dim}-{half_width}"),
            GraphSource::ThreeRail { n_max } => format!("three-rail-{n_max}"),
            GraphSource::Lamplighter { r_max } => format!("lamplighter-{r_max}"),
            GraphSource::File(p) => p.file_stem().map_or("graph".into(), |s| s.to_string_lossy().into_owned()),
        }
    }

    pub fn load(&self) -> Result<LoadedGraph> {
        match *self {
            GraphSource::Lattice { dim, half_width } => {
                let graph = lattice_box(dim, half_width)?;
                let sidecar = lattice_sidecar(&graph, dim, half_width);
                Ok(LoadedGraph { graph, default_center: Some(lattice_label(&vec![0; dim])), sidecar })
            }
            GraphSource::ThreeRail { n_max } => {
                let graph = three_rail(n_max)?;
                let sidecar = three_rail_sidecar(&graph, n_max);
                Ok(LoadedGraph { graph, default_center: Some(three_rail_label(0, 0)), sidecar })
            }
            GraphSource::Lamplighter { r_max } => {
                let ball = lamplighter_ball(r_max)?;
                let sidecar = ball.sidecar();
                let default_center = Some(ball.states[ball.base].label());
                Ok(LoadedGraph { graph: ball.graph, default_center, sidecar })
            }
            GraphSource::File(ref path) => {
                let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let graph = read_graph_tsv(BufReader::new(file))?;
                let sidecar = json!({"kind": "file", "path": path.display().to_string(), "vertices": graph.len()});
                Ok(LoadedGraph { graph, default_center: None, sidecar })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["lattice:2:24", "three-rail:60", "lamplighter:6", "data/g.tsv"] {
            let src: GraphSource = s.parse().unwrap();
            assert_eq!(src.to_string(), s);
        }
        assert!("lattice:2".parse::<GraphSource>().is_err());
        assert!("three-rail:x".parse::<GraphSource>().is_err());
    }

    #[test]
    fn default_centres_exist() {
        for s in ["lattice:2:3", "three-rail:4", "lamplighter:2"] {
            let l = s.parse::<GraphSource>().unwrap().load().unwrap();
            assert!(l.graph.vertex(l.default_center.as_deref().unwrap()).is_ok());
        }
    }
}
