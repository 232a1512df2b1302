//! Configuration-model multigraph construction and per-edge weight
//! assignment.
//!
//! The builder materializes the half-edge list, applies one uniform shuffle
//! and pairs consecutive entries, which induces the uniform perfect matching.
//! Self-loops and parallel edges are retained; degrees are preserved exactly
//! (self-loops count twice).

use alloc::vec;
use alloc::vec::Vec;

use crate::degree::DegreeSequence;
use crate::rng::Stream;
use crate::traversal::JointTraversalModel;

/// A multigraph on vertices `0..n` with explicit edge identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
    /// CSR incidence: `adj[offsets[v]..offsets[v+1]]` lists `(edge_id, other
    /// endpoint)` for every half-edge at `v`; self-loops appear twice.
    offsets: Vec<usize>,
    adj: Vec<(u32, u32)>,
}

impl MultiGraph {
    /// Builds a multigraph from an explicit edge list (used by tests, file
    /// loaders and oracles; random graphs come from [`build_cm`]).
    pub fn from_edges(n: usize, edges: Vec<(u32, u32)>) -> Self {
        assert!(
            edges.iter().all(|&(u, v)| (u as usize) < n && (v as usize) < n),
            "edge endpoint out of range"
        );
        let mut degrees = vec![0usize; n];
        for &(u, v) in &edges {
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degrees[v];
        }
        let mut cursor = offsets.clone();
        let mut adj = vec![(0u32, 0u32); offsets[n]];
        for (e, &(u, v)) in edges.iter().enumerate() {
            adj[cursor[u as usize]] = (e as u32, v);
            cursor[u as usize] += 1;
            adj[cursor[v as usize]] = (e as u32, u);
            cursor[v as usize] += 1;
        }
        MultiGraph {
            n,
            edges,
            offsets,
            adj,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Endpoints of edge `e` (may be equal for a self-loop).
    pub fn edge(&self, e: u32) -> (u32, u32) {
        self.edges[e as usize]
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// `(edge_id, other_endpoint)` pairs incident to `v`; self-loops listed
    /// twice so the slice length is the multigraph degree of `v`.
    pub fn incident(&self, v: u32) -> &[(u32, u32)] {
        &self.adj[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    /// Multigraph degree (self-loops counted twice).
    pub fn degree(&self, v: u32) -> usize {
        self.incident(v).len()
    }
}

/// Builds a uniform configuration-model multigraph from a normalized degree
/// sequence: shuffle the half-edge list, pair consecutive entries.
pub fn build_cm(seq: &DegreeSequence, stream: &mut Stream) -> MultiGraph {
    let n = seq.n();
    let total = seq.total() as usize;
    let mut half_edges: Vec<u32> = Vec::with_capacity(total);
    for (v, &d) in seq.degrees().iter().enumerate() {
        for _ in 0..d {
            half_edges.push(v as u32);
        }
    }
    stream.shuffle(&mut half_edges);

    let m = total / 2;
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        edges.push((half_edges[2 * i], half_edges[2 * i + 1]));
    }

    let mut offsets = vec![0usize; n + 1];
    for (v, &d) in seq.degrees().iter().enumerate() {
        offsets[v + 1] = offsets[v] + d as usize;
    }
    let mut cursor = offsets.clone();
    let mut adj = vec![(0u32, 0u32); total];
    for (e, &(u, v)) in edges.iter().enumerate() {
        adj[cursor[u as usize]] = (e as u32, v);
        cursor[u as usize] += 1;
        adj[cursor[v as usize]] = (e as u32, u);
        cursor[v as usize] += 1;
    }

    MultiGraph {
        n,
        edges,
        offsets,
        adj,
    }
}

/// A multigraph together with one traversal-time pair per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMultiGraph {
    graph: MultiGraph,
    /// `(l_fake, l_correct)` per edge id.
    weights: Vec<(f64, f64)>,
}

impl WeightedMultiGraph {
    /// Pairs a graph with explicit weights; lengths must agree.
    pub fn from_parts(graph: MultiGraph, weights: Vec<(f64, f64)>) -> Self {
        assert_eq!(graph.edge_count(), weights.len(), "one weight pair per edge");
        assert!(
            weights.iter().all(|&(f, r)| f >= 0.0 && r >= 0.0),
            "weights must be non-negative"
        );
        WeightedMultiGraph { graph, weights }
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn weight(&self, e: u32) -> (f64, f64) {
        self.weights[e as usize]
    }

    pub fn weights(&self) -> &[(f64, f64)] {
        &self.weights
    }
}

/// Draws one independent weight pair per edge id, in edge-id order.
pub fn assign_weights(
    graph: MultiGraph,
    model: &JointTraversalModel,
    stream: &mut Stream,
) -> WeightedMultiGraph {
    let weights: Vec<(f64, f64)> = (0..graph.edge_count())
        .map(|_| model.sample_pair(stream))
        .collect();
    WeightedMultiGraph { graph, weights }
}

/// Connected components by union-find.
///
/// Returns per-vertex component ids (numbered by first vertex occurrence),
/// component sizes, and the id of the largest component (ties broken by the
/// smallest id).
pub fn largest_component(g: &MultiGraph) -> (Vec<u32>, Vec<usize>, u32) {
    let n = g.n();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut rank = vec![0u8; n];

    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let grand = parent[parent[x as usize] as usize];
            parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    for &(u, v) in g.edges() {
        let ru = find(&mut parent, u);
        let rv = find(&mut parent, v);
        if ru != rv {
            match rank[ru as usize].cmp(&rank[rv as usize]) {
                core::cmp::Ordering::Less => parent[ru as usize] = rv,
                core::cmp::Ordering::Greater => parent[rv as usize] = ru,
                core::cmp::Ordering::Equal => {
                    parent[rv as usize] = ru;
                    rank[ru as usize] += 1;
                }
            }
        }
    }

    let mut membership = vec![u32::MAX; n];
    let mut root_to_id = vec![u32::MAX; n];
    let mut sizes: Vec<usize> = Vec::new();
    for v in 0..n as u32 {
        let root = find(&mut parent, v);
        let id = if root_to_id[root as usize] == u32::MAX {
            let id = sizes.len() as u32;
            root_to_id[root as usize] = id;
            sizes.push(0);
            id
        } else {
            root_to_id[root as usize]
        };
        membership[v as usize] = id;
        sizes[id as usize] += 1;
    }

    let mut largest = 0u32;
    for (id, &size) in sizes.iter().enumerate() {
        if size > sizes[largest as usize] {
            largest = id as u32;
        }
    }
    (membership, sizes, largest)
}
