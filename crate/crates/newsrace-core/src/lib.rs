//! Core algorithms for the race between a misinformation epidemic and the
//! correction that chases it.
//!
//! Both processes spread as first-passage percolation from a common source:
//! every edge carries a pair of traversal times `(l_fake, l_correct)`, the
//! correction spreads unimpeded, and a vertex relays the fake news only if it
//! heard it strictly before the correction. The crate provides
//!
//! * joint traversal-time models with exact transforms ([`traversal`]),
//! * degree sequences and size-biased offspring laws ([`degree`]),
//! * configuration-model multigraph construction ([`graph`]),
//! * the gated two-epidemic race on a weighted multigraph ([`competition`]),
//! * branching random walks with killing on trees ([`tree`]),
//! * numerical survival classifiers (`rho`, Malthusian parameters, stable-age
//!   quantities) in [`survival`].
//!
//! The crate is `no_std` + `alloc`; all randomness flows through the explicit
//! deterministic streams of [`rng`], so every computation is reproducible from
//! a seed alone.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod competition;
pub mod degree;
pub mod graph;
pub mod numeric;
pub mod rng;
pub mod survival;
pub mod traversal;
pub mod tree;

pub use competition::{correct_arrivals, epidemic_curve, fake_exposure, time_to_reach, ExposureResult};
pub use degree::{DegreeDistribution, DegreeSequence, RegularityReport};
pub use graph::{assign_weights, build_cm, largest_component, MultiGraph, WeightedMultiGraph};
pub use rng::Stream;
pub use survival::{
    classify_strong_graph, classify_strong_tree, classify_weak, solve_malthusian, solve_rho,
    MalthusReport, RhoResult, StableAgeReport, StrongVerdict, WeakVerdict,
};
pub use traversal::{Coupling, JointTraversalModel, Marginal};
pub use tree::{estimate_tau_tail, simulate_tree, OffspringMode, TauTailEstimate, TreeCompetitionResult};
