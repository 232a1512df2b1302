//! Weighted multigraph dump format: a header line `n m` followed by one
//! `edgeId u v lF lR` line per edge, weights at 17 significant digits.

use std::io::Write;
use std::path::Path;

use newsrace_core::graph::{MultiGraph, WeightedMultiGraph};

use crate::csv::format_float;
use crate::HarnessError;

pub fn render_graph(wg: &WeightedMultiGraph) -> String {
    let g = wg.graph();
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", g.n(), g.edge_count()));
    for e in 0..g.edge_count() as u32 {
        let (u, v) = g.edge(e);
        let (lf, lr) = wg.weight(e);
        out.push_str(&format!(
            "{e} {u} {v} {} {}\n",
            format_float(lf),
            format_float(lr)
        ));
    }
    out
}

pub fn write_graph(wg: &WeightedMultiGraph, path: &Path) -> Result<(), HarnessError> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(render_graph(wg).as_bytes())?;
    Ok(())
}

/// Parses the dump format back; weights round-trip bit-exactly.
pub fn parse_graph(text: &str) -> Result<WeightedMultiGraph, HarnessError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| HarnessError::Config("empty graph dump".into()))?;
    let mut it = header.split_whitespace();
    let bad_header = || HarnessError::Config(format!("bad graph header '{header}'"));
    let n: usize = it.next().ok_or_else(bad_header)?.parse().map_err(|_| bad_header())?;
    let m: usize = it.next().ok_or_else(bad_header)?.parse().map_err(|_| bad_header())?;
    let mut edges = vec![(0u32, 0u32); m];
    let mut weights = vec![(0.0, 0.0); m];
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(HarnessError::Config(format!("bad edge line '{line}'")));
        }
        let bad = || HarnessError::Config(format!("bad edge line '{line}'"));
        let e: usize = toks[0].parse().map_err(|_| bad())?;
        if e >= m {
            return Err(bad());
        }
        edges[e] = (
            toks[1].parse().map_err(|_| bad())?,
            toks[2].parse().map_err(|_| bad())?,
        );
        weights[e] = (
            toks[3].parse().map_err(|_| bad())?,
            toks[4].parse().map_err(|_| bad())?,
        );
    }
    Ok(WeightedMultiGraph::from_parts(
        MultiGraph::from_edges(n, edges),
        weights,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use newsrace_core::degree::DegreeSequence;
    use newsrace_core::graph::{assign_weights, build_cm};
    use newsrace_core::rng::Stream;
    use newsrace_core::traversal::{Coupling, JointTraversalModel, Marginal};

    #[test]
    fn dump_round_trips_bit_exactly() {
        let seq = DegreeSequence::normalize(&[3, 2, 4, 1, 2]).unwrap();
        let mut s = Stream::from_seed(123);
        let g = build_cm(&seq, &mut s);
        let model = JointTraversalModel::new(
            Marginal::exponential(1.0).unwrap(),
            Marginal::pareto(2.0, 0.5).unwrap(),
            Coupling::Independent,
        )
        .unwrap();
        let wg = assign_weights(g, &model, &mut s);
        let text = render_graph(&wg);
        let back = parse_graph(&text).unwrap();
        assert_eq!(back.graph().edges(), wg.graph().edges());
        for e in 0..wg.graph().edge_count() as u32 {
            let (a, b) = wg.weight(e);
            let (c, d) = back.weight(e);
            assert_eq!(a.to_bits(), c.to_bits());
            assert_eq!(b.to_bits(), d.to_bits());
        }
    }
}
