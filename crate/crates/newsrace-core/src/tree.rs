//! Branching random walks with killing: the tree form of the news race.
//!
//! Along every lineage the walk accumulates increments
//! `l_correct - l_fake`; fake news reaches a generation-`k` vertex exactly
//! when every prefix sum stays strictly above `-d`. Generation sizes `Z_k`
//! count the whole tree, `Z^F_k` only the vertices the fake news reaches.
//! Killed vertices still spawn descendants for the `Z_k` tally, but those
//! subtrees carry no walk values, so they are evolved as plain counts.

use alloc::vec;
use alloc::vec::Vec;

use crate::degree::DegreeDistribution;
use crate::numeric::binomial_stderr;
use crate::rng::Stream;
use crate::traversal::JointTraversalModel;

/// How offspring counts are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffspringMode {
    /// One offspring law for every vertex, including the root.
    GaltonWatson,
    /// The root draws `D`; every other vertex draws `D* - 1`.
    Unimodular,
}

impl OffspringMode {
    pub fn name(&self) -> &'static str {
        match self {
            OffspringMode::GaltonWatson => "galton-watson",
            OffspringMode::Unimodular => "unimodular",
        }
    }
}

/// Per-generation totals of one simulated tree race.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeCompetitionResult {
    pub mode: OffspringMode,
    pub delay: f64,
    /// `z[k]` counts all generation-`k` vertices, `k = 0..=max_generation`.
    pub z: Vec<u64>,
    /// `z_fake[k]` counts the surviving (fake-reached) vertices.
    pub z_fake: Vec<u64>,
    /// Set when the population cap stopped the evolution early; `z` and
    /// `z_fake` then cover only the completed generations.
    pub truncated: bool,
}

impl TreeCompetitionResult {
    /// Number of fully evolved generations (the largest valid `k`).
    pub fn last_generation(&self) -> usize {
        self.z.len() - 1
    }
}

/// Population cap reached; carries the partial result.
#[derive(Debug, Clone, PartialEq)]
pub struct CapExceeded {
    pub partial: TreeCompetitionResult,
    pub cap: u64,
}

impl core::fmt::Display for CapExceeded {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "population cap {} exceeded after generation {}",
            self.cap,
            self.partial.last_generation()
        )
    }
}

impl core::error::Error for CapExceeded {}

fn draw_offspring(
    dist: &DegreeDistribution,
    mode: OffspringMode,
    is_root: bool,
    stream: &mut Stream,
) -> u32 {
    match mode {
        OffspringMode::GaltonWatson => dist.sample(stream),
        OffspringMode::Unimodular => dist.sample_offspring(is_root, stream),
    }
}

/// Evolves the killed-and-surviving tree for `k_max` generations.
///
/// Surviving vertices carry walk values and spawn weighted children; killed
/// vertices contribute to `Z_k` through a count-only recursion, so memory
/// stays proportional to the surviving population plus counters. When any
/// generation would exceed `cap`, the partial result is returned inside
/// [`CapExceeded`].
pub fn simulate_tree(
    dist: &DegreeDistribution,
    mode: OffspringMode,
    model: &JointTraversalModel,
    k_max: usize,
    delay: f64,
    cap: u64,
    stream: &mut Stream,
) -> Result<TreeCompetitionResult, CapExceeded> {
    assert!(delay >= 0.0, "delay must be non-negative");
    assert!(cap >= 1);

    let const_offspring = constant_offspring(dist, mode);

    let mut survivors: Vec<f64> = vec![0.0];
    let mut killed: u64 = 0;
    let mut z = vec![1u64];
    let mut z_fake = vec![1u64];
    let mut truncated = false;

    'generations: for gen in 0..k_max {
        let is_root = gen == 0;
        let mut next_survivors: Vec<f64> = Vec::new();
        let mut next_killed: u64 = 0;

        for &walk in &survivors {
            let c = draw_offspring(dist, mode, is_root, stream);
            for _ in 0..c {
                let (l_fake, l_correct) = model.sample_pair(stream);
                let child = walk + (l_correct - l_fake);
                if child > -delay {
                    next_survivors.push(child);
                } else {
                    next_killed += 1;
                }
            }
            if next_survivors.len() as u64 + next_killed > cap {
                truncated = true;
                break 'generations;
            }
        }

        if let Some(c) = const_offspring {
            next_killed = next_killed.saturating_add(killed.saturating_mul(u64::from(c)));
            if next_survivors.len() as u64 + next_killed > cap {
                truncated = true;
                break 'generations;
            }
        } else {
            for _ in 0..killed {
                next_killed += u64::from(draw_offspring(dist, mode, false, stream));
                if next_survivors.len() as u64 + next_killed > cap {
                    truncated = true;
                    break 'generations;
                }
            }
        }

        z.push(next_survivors.len() as u64 + next_killed);
        z_fake.push(next_survivors.len() as u64);
        survivors = next_survivors;
        killed = next_killed;
    }

    let result = TreeCompetitionResult {
        mode,
        delay,
        z,
        z_fake,
        truncated,
    };
    if truncated {
        Err(CapExceeded {
            partial: result,
            cap,
        })
    } else {
        Ok(result)
    }
}

/// Non-root offspring is a constant for a degenerate law; lets killed-count
/// evolution skip per-individual draws.
fn constant_offspring(dist: &DegreeDistribution, mode: OffspringMode) -> Option<u32> {
    let k = dist.min_degree();
    if dist.prob(k) == 1.0 {
        Some(match mode {
            OffspringMode::GaltonWatson => k,
            OffspringMode::Unimodular => k - 1,
        })
    } else {
        None
    }
}

/// Monte Carlo estimate of the first-passage tail `P(tau_d > k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauTailEstimate {
    pub k: usize,
    pub delay: f64,
    pub p_hat: f64,
    pub stderr: f64,
    pub replications: u64,
}

/// Runs `reps` independent walks of length `k_max` and reports, for every
/// `k <= k_max`, the fraction whose running minimum stayed strictly above
/// `-delay`. The estimates are non-increasing in `k` by construction.
pub fn estimate_tau_tail(
    model: &JointTraversalModel,
    delay: f64,
    k_max: usize,
    reps: u64,
    stream: &mut Stream,
) -> Vec<TauTailEstimate> {
    assert!(reps >= 1);
    let mut deaths = vec![0u64; k_max + 1];
    for _ in 0..reps {
        let mut s = 0.0;
        for death in deaths.iter_mut().skip(1) {
            let (l_fake, l_correct) = model.sample_pair(stream);
            s += l_correct - l_fake;
            if s <= -delay {
                *death += 1;
                break;
            }
        }
    }
    let mut alive = reps;
    let mut out = Vec::with_capacity(k_max + 1);
    for (k, &d) in deaths.iter().enumerate() {
        alive -= d;
        let p_hat = alive as f64 / reps as f64;
        out.push(TauTailEstimate {
            k,
            delay,
            p_hat,
            stderr: binomial_stderr(p_hat, reps),
            replications: reps,
        });
    }
    out
}
