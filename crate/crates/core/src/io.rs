//! Graph files: UTF-8, one edge per line as `u<TAB>v<TAB>weight`, `#` starts
//! a comment line. Weights are written with 17 significant digits, which
//! round-trips every f64 exactly.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, WeightedGraph};

pub fn read_graph_tsv(reader: impl BufRead) -> Result<WeightedGraph> {
    let mut b = GraphBuilder::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let text = line.trim_end_matches('\r');
        if text.trim().is_empty() || text.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let w: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|e| Error::Parse { line: lineno, msg: format!("bad weight `{}`: {e}", fields[2]) })?;
        let (u, v) = (fields[0].trim(), fields[1].trim());
        if u.is_empty() || v.is_empty() {
            return Err(Error::Parse { line: lineno, msg: "empty vertex label".into() });
        }
        b.edge(u, v, w)?;
    }
    b.build()
}

pub fn write_graph_tsv(g: &WeightedGraph, mut out: impl Write) -> Result<()> {
    for l in g.labels() {
        if l.contains(['\t', '\n', '\r']) || l.trim() != l || l.starts_with('#') {
            return Err(Error::pre(format!("label `{l}` cannot be written to a TSV graph file")));
        }
    }
    writeln!(out, "# u\tv\tweight")?;
    for (u, v, w) in g.edges() {
        writeln!(out, "{}\t{}\t{:.16e}", g.label(u), g.label(v), w)?;
    }
    Ok(())
}

pub fn graph_to_tsv(g: &WeightedGraph) -> Result<String> {
    let mut buf = Vec::new();
    write_graph_tsv(g, &mut buf)?;
    Ok(String::from_utf8(buf).expect("labels are UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn roundtrip_is_bit_exact() {
        let w = [0.1, 1.0 / 3.0, 2f64.powi(-60), 1e300, 7.0];
        let g = build_graph([("a", "b", w[0]), ("b", "c", w[1]), ("c", "d", w[2]), ("d", "a", w[3]), ("a", "c", w[4])])
            .unwrap();
        let text = graph_to_tsv(&g).unwrap();
        let h = read_graph_tsv(text.as_bytes()).unwrap();
        for (u, v, x) in g.edges() {
            let (hu, hv) = (h.vertex(g.label(u)).unwrap(), h.vertex(g.label(v)).unwrap());
            assert_eq!(h.weight(hu, hv).to_bits(), x.to_bits());
        }
        assert_eq!(h.edge_count(), g.edge_count());
    }

    #[test]
    fn comments_and_errors() {
        let g = read_graph_tsv("# header\n\na\tb\t1\n# more\nb\tc\t2.5\n".as_bytes()).unwrap();
        assert_eq!(g.len(), 3);
        assert!(matches!(read_graph_tsv("a\tb\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_graph_tsv("a\tb\t1\nb\tc\tx\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_graph_tsv("a\tb\t0\n".as_bytes()), Err(Error::NonPositiveWeight(..))));
        assert!(matches!(read_graph_tsv("a\tb\t1\nc\td\t1\n".as_bytes()), Err(Error::Disconnected(2))));
    }
}
