//! The two-epidemic race on a weighted multigraph.
//!
//! The correct news spreads as plain first-passage percolation: its arrival
//! time at `v` is the delay `d` plus the shortest-path distance from the
//! source under the correct-news weights. The fake news runs a gated
//! shortest-path sweep on the fake-news weights: a vertex relays fake news
//! only if it is the source or it heard fake news strictly before the
//! correction (ties kill). A relay transmits along every incident edge even
//! if the correction reaches it before the transmission completes; this
//! in-flight semantics is what reduces the race to two shortest-path passes.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::WeightedMultiGraph;

/// Heap entry ordered by smallest tentative time.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Visit {
    time: f64,
    vertex: u32,
}

impl Eq for Visit {}

impl Ord for Visit {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        // Reverse on time for a min-heap; tie-break on vertex id to keep the
        // settle order fully deterministic.
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Visit {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Correct-news arrival times: `d` plus shortest-path distance under the
/// correct-news weights; `+inf` off the source's component. Self-loops are
/// skipped.
pub fn correct_arrivals(wg: &WeightedMultiGraph, source: u32, delay: f64) -> Vec<f64> {
    assert!(delay >= 0.0, "delay must be non-negative");
    let n = wg.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = delay;
    heap.push(Visit {
        time: delay,
        vertex: source,
    });
    while let Some(Visit { time, vertex }) = heap.pop() {
        if time > dist[vertex as usize] {
            continue;
        }
        for &(e, other) in wg.graph().incident(vertex) {
            if other == vertex {
                continue;
            }
            let next = time + wg.weight(e).1;
            if next < dist[other as usize] {
                dist[other as usize] = next;
                heap.push(Visit {
                    time: next,
                    vertex: other,
                });
            }
        }
    }
    dist
}

/// Outcome of the race from one source.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureResult {
    pub source: u32,
    pub delay: f64,
    /// Correct-news arrival time per vertex (`delay` at the source).
    pub correct: Vec<f64>,
    /// Fake-news arrival time per vertex along gated relays; finite only if
    /// some chain of exposed relays reaches the vertex.
    pub fake: Vec<f64>,
    /// A vertex is exposed iff it is the source or heard fake news strictly
    /// first.
    pub exposed: Vec<bool>,
    /// Number of exposed vertices.
    pub n_fake: usize,
}

/// The arrival map passed to [`fake_exposure`] does not match the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct InconsistentArrivalMap {
    pub expected_len: usize,
    pub got_len: usize,
    pub source_entry: f64,
    pub delay: f64,
}

impl core::fmt::Display for InconsistentArrivalMap {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "arrival map disagrees with graph: len {} (expected {}), source entry {} (expected {})",
            self.got_len, self.expected_len, self.source_entry, self.delay
        )
    }
}

impl core::error::Error for InconsistentArrivalMap {}

/// Gated shortest-path sweep of the fake news.
///
/// `correct` must come from [`correct_arrivals`] on the same graph, source
/// and delay. Vertices settle in increasing fake time, so each gate
/// `F(u) < C(u)` is decided before `u` relays; equality blocks (the
/// correction wins ties) and the source relays unconditionally.
pub fn fake_exposure(
    wg: &WeightedMultiGraph,
    source: u32,
    delay: f64,
    correct: &[f64],
) -> Result<ExposureResult, InconsistentArrivalMap> {
    let n = wg.n();
    if correct.len() != n || correct[source as usize] != delay {
        return Err(InconsistentArrivalMap {
            expected_len: n,
            got_len: correct.len(),
            source_entry: correct.get(source as usize).copied().unwrap_or(f64::NAN),
            delay,
        });
    }

    let mut fake = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    fake[source as usize] = 0.0;
    heap.push(Visit {
        time: 0.0,
        vertex: source,
    });
    while let Some(Visit { time, vertex }) = heap.pop() {
        if settled[vertex as usize] || time > fake[vertex as usize] {
            continue;
        }
        settled[vertex as usize] = true;
        let relays = vertex == source || time < correct[vertex as usize];
        if !relays {
            continue;
        }
        for &(e, other) in wg.graph().incident(vertex) {
            if other == vertex {
                continue;
            }
            let next = time + wg.weight(e).0;
            if next < fake[other as usize] {
                fake[other as usize] = next;
                heap.push(Visit {
                    time: next,
                    vertex: other,
                });
            }
        }
    }

    let mut exposed = vec![false; n];
    let mut n_fake = 0usize;
    for v in 0..n {
        exposed[v] = v == source as usize || fake[v] < correct[v];
        if exposed[v] {
            n_fake += 1;
        }
    }
    Ok(ExposureResult {
        source,
        delay,
        correct: correct.to_vec(),
        fake,
        exposed,
        n_fake,
    })
}

/// Fraction of vertices exposed by each time on a sorted grid; entries are
/// non-decreasing and reach `n_fake / n` beyond the last exposure.
pub fn epidemic_curve(res: &ExposureResult, grid: &[f64]) -> Vec<f64> {
    debug_assert!(grid.windows(2).all(|w| w[0] <= w[1]), "grid must be sorted");
    let mut times: Vec<f64> = res
        .fake
        .iter()
        .zip(&res.exposed)
        .filter(|&(_, &e)| e)
        .map(|(&t, _)| t)
        .collect();
    times.sort_unstable_by(f64::total_cmp);
    let n = res.exposed.len() as f64;
    grid.iter()
        .map(|&t| times.partition_point(|&x| x <= t) as f64 / n)
        .collect()
}

/// Time at which the fake news reaches its `a`-th vertex (`a = 1` is the
/// source); `+inf` when fewer than `a` vertices are ever exposed.
pub fn time_to_reach(res: &ExposureResult, a: usize) -> f64 {
    assert!(a >= 1, "a must be at least 1");
    let mut times: Vec<f64> = res
        .fake
        .iter()
        .zip(&res.exposed)
        .filter(|&(_, &e)| e)
        .map(|(&t, _)| t)
        .collect();
    if times.len() < a {
        return f64::INFINITY;
    }
    times.sort_unstable_by(f64::total_cmp);
    times[a - 1]
}
