//! Exact equivalence of the gated shortest-path sweep against a relaxation
//! fixpoint oracle on small random weighted multigraphs, plus the structural
//! race properties (monotonicity in the delay, degenerate competition,
//! blocking dominance).

use newsrace_core::competition::{correct_arrivals, fake_exposure};
use newsrace_core::degree::DegreeSequence;
use newsrace_core::graph::{assign_weights, build_cm, largest_component, WeightedMultiGraph};
use newsrace_core::rng::Stream;
use newsrace_core::traversal::{Coupling, JointTraversalModel, Marginal};

/// Reference race semantics: repeatedly relax every edge out of every
/// currently-allowed relay until no fake time decreases.
fn oracle_race(wg: &WeightedMultiGraph, source: u32, delay: f64) -> (Vec<f64>, Vec<bool>, usize) {
    let n = wg.n();

    // Correct news: plain relaxation fixpoint.
    let mut correct = vec![f64::INFINITY; n];
    correct[source as usize] = delay;
    loop {
        let mut changed = false;
        for e in 0..wg.graph().edge_count() as u32 {
            let (u, v) = wg.graph().edge(e);
            if u == v {
                continue;
            }
            let w = wg.weight(e).1;
            if correct[u as usize] + w < correct[v as usize] {
                correct[v as usize] = correct[u as usize] + w;
                changed = true;
            }
            if correct[v as usize] + w < correct[u as usize] {
                correct[u as usize] = correct[v as usize] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Fake news: gated relaxation fixpoint. A vertex relays only while its
    // current fake time beats its correct time (or it is the source); the
    // gate is re-evaluated every round on the current values.
    let mut fake = vec![f64::INFINITY; n];
    fake[source as usize] = 0.0;
    loop {
        let mut changed = false;
        for e in 0..wg.graph().edge_count() as u32 {
            let (u, v) = wg.graph().edge(e);
            if u == v {
                continue;
            }
            let w = wg.weight(e).0;
            let u_relays = u == source || fake[u as usize] < correct[u as usize];
            if u_relays && fake[u as usize] + w < fake[v as usize] {
                fake[v as usize] = fake[u as usize] + w;
                changed = true;
            }
            let v_relays = v == source || fake[v as usize] < correct[v as usize];
            if v_relays && fake[v as usize] + w < fake[u as usize] {
                fake[u as usize] = fake[v as usize] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut exposed = vec![false; n];
    let mut n_fake = 0;
    for v in 0..n {
        exposed[v] = v == source as usize || fake[v] < correct[v];
        if exposed[v] {
            n_fake += 1;
        }
    }
    (fake, exposed, n_fake)
}

fn random_models() -> Vec<JointTraversalModel> {
    let exp = |r: f64| Marginal::exponential(r).unwrap();
    let det = |v: f64| Marginal::deterministic(v).unwrap();
    let unif = |a: f64, b: f64| Marginal::uniform(a, b).unwrap();
    vec![
        JointTraversalModel::new(exp(1.0), exp(1.5), Coupling::Independent).unwrap(),
        JointTraversalModel::new(exp(2.0), exp(1.0), Coupling::Comonotone).unwrap(),
        JointTraversalModel::new(unif(0.0, 1.0), exp(1.0), Coupling::Countermonotone).unwrap(),
        // Atomic weights exercise the tie-breaking rule.
        JointTraversalModel::new_unchecked(det(1.0), det(1.0), Coupling::Independent),
        JointTraversalModel::new(det(0.5), unif(0.25, 1.25), Coupling::Independent).unwrap(),
        JointTraversalModel::new(
            Marginal::pareto(2.0, 0.25).unwrap(),
            exp(0.8),
            Coupling::Independent,
        )
        .unwrap(),
    ]
}

fn random_instance(stream: &mut Stream, idx: usize) -> (WeightedMultiGraph, u32, f64) {
    let n = 2 + (stream.below(7) as usize); // 2..=8 vertices
    let raw: Vec<u32> = (0..n).map(|_| 1 + stream.below(4) as u32).collect();
    let seq = DegreeSequence::normalize(&raw).unwrap();
    let g = build_cm(&seq, stream);
    let models = random_models();
    let model = &models[idx % models.len()];
    let wg = assign_weights(g, model, stream);
    let source = stream.below(n as u64) as u32;
    let delay = [0.0, 0.3, 1.0][idx % 3];
    (wg, source, delay)
}

#[test]
fn gated_sweep_matches_fixpoint_oracle_exactly() {
    let mut stream = Stream::from_seed(0xFEED);
    for idx in 0..1000 {
        let (wg, source, delay) = random_instance(&mut stream, idx);
        let correct = correct_arrivals(&wg, source, delay);
        let res = fake_exposure(&wg, source, delay, &correct).unwrap();
        let (fake_o, exposed_o, n_fake_o) = oracle_race(&wg, source, delay);
        assert_eq!(res.fake, fake_o, "instance {idx}: fake times differ");
        assert_eq!(res.exposed, exposed_o, "instance {idx}: exposure flags differ");
        assert_eq!(res.n_fake, n_fake_o, "instance {idx}: counts differ");
    }
}

#[test]
fn exposure_count_monotone_in_delay() {
    let mut stream = Stream::from_seed(0xD31A);
    for idx in 0..200 {
        let (wg, source, _) = random_instance(&mut stream, idx);
        let mut prev = 0usize;
        for d in [0.0, 0.2, 0.5, 1.0, 3.0] {
            let correct = correct_arrivals(&wg, source, d);
            let res = fake_exposure(&wg, source, d, &correct).unwrap();
            assert!(
                res.n_fake >= prev,
                "instance {idx}: n_fake dropped from {prev} to {} at d = {d}",
                res.n_fake
            );
            prev = res.n_fake;
        }
    }
}

#[test]
fn huge_delay_exposes_the_whole_component() {
    let mut stream = Stream::from_seed(0xC0FFEE);
    for idx in 0..100 {
        let (wg, source, _) = random_instance(&mut stream, idx);
        // Larger than any possible fake path: n * max finite fake weight.
        let max_fake: f64 = wg
            .weights()
            .iter()
            .map(|&(f, _)| f)
            .fold(0.0, f64::max);
        let d = (wg.n() as f64) * max_fake + 1.0;
        let correct = correct_arrivals(&wg, source, d);
        let res = fake_exposure(&wg, source, d, &correct).unwrap();
        let (membership, sizes, _) = largest_component(wg.graph());
        let comp = membership[res.source as usize];
        assert_eq!(res.n_fake, sizes[comp as usize], "instance {idx}");
    }
}

#[test]
fn gating_only_removes_exposure_relative_to_free_spread() {
    // n_fake <= #{v : unrestricted fake distance < C(v)} + 1.
    let mut stream = Stream::from_seed(0xB10C);
    for idx in 0..300 {
        let (wg, source, delay) = random_instance(&mut stream, idx);
        let correct = correct_arrivals(&wg, source, delay);
        let res = fake_exposure(&wg, source, delay, &correct).unwrap();

        // Unrestricted fake spread is a plain shortest-path sweep with the
        // fake weights: reuse correct_arrivals by swapping weight roles.
        let swapped = WeightedMultiGraph::from_parts(
            wg.graph().clone(),
            wg.weights().iter().map(|&(f, r)| (r, f)).collect(),
        );
        let free_fake = correct_arrivals(&swapped, source, 0.0);
        let bound = free_fake
            .iter()
            .zip(&correct)
            .filter(|&(&f, &c)| f < c)
            .count()
            + 1;
        assert!(
            res.n_fake <= bound,
            "instance {idx}: n_fake {} exceeds dominance bound {bound}",
            res.n_fake
        );
    }
}
