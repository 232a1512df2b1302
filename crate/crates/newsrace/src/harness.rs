//! Monte Carlo orchestration.
//!
//! Every replication draws from a substream keyed by
//! `(masterSeed, kind, n, repIndex)` and rows are aggregated in `(n, rep)`
//! order, so output is byte-identical no matter how many worker threads run
//! the jobs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use newsrace_core::competition::{correct_arrivals, epidemic_curve, fake_exposure, time_to_reach};
use newsrace_core::degree::DegreeDistribution;
use newsrace_core::graph::{assign_weights, build_cm, largest_component, WeightedMultiGraph};
use newsrace_core::rng::Stream;
use newsrace_core::survival::{
    classify_strong_graph, classify_strong_tree, classify_weak, solve_rho, RhoStatus,
    StrongOutcome, WeakOutcome,
};
use newsrace_core::traversal::{check_feasibility, JointTraversalModel};
use newsrace_core::tree::{estimate_tau_tail, simulate_tree, OffspringMode};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::csv::{CsvValue, RecordRow};
use crate::grammar::{parse_coupling, parse_degree_spec, parse_marginal, parse_offspring_spec};
use crate::HarnessError;

const DEFAULT_TREE_CAP: u64 = 10_000_000;
const MAX_SURVIVAL_RESAMPLES: u64 = 1_000;

/// Index-parallel map with deterministic output order.
pub fn parallel_map<T, F>(count: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = if threads == 0 {
        std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)
    } else {
        threads
    }
    .min(count.max(1));

    if threads <= 1 {
        return (0..count).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..count).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let value = f(i);
                *slots[i].lock().expect("slot poisoned") = Some(value);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot poisoned").expect("job skipped"))
        .collect()
}

fn parse_model(cfg: &ExperimentConfig) -> Result<JointTraversalModel, HarnessError> {
    let f = parse_marginal(cfg.dist_f.as_deref().ok_or_else(|| missing("distF"))?)?;
    let r = parse_marginal(cfg.dist_r.as_deref().ok_or_else(|| missing("distR"))?)?;
    let coupling = parse_coupling(cfg.coupling.as_deref().ok_or_else(|| missing("coupling"))?)?;
    // Simulations stay well defined for dominated races, so the feasibility
    // gate is not applied here; the theory runners check it themselves.
    Ok(JointTraversalModel::new_unchecked(f, r, coupling))
}

fn missing(field: &str) -> HarnessError {
    HarnessError::Config(format!("missing required field '{field}'"))
}

/// One graph replication: everything the CSV row carries.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphRow {
    pub n: usize,
    pub rep: u64,
    pub seed: u64,
    pub source: u32,
    pub n_fake: usize,
    pub frac_exposed: f64,
    pub component_size: usize,
    pub a_n: usize,
    pub time_to_reach: f64,
    /// Exposure-curve value half a time unit before `time_to_reach`.
    pub curve_before: f64,
    /// Exposure-curve value half a time unit after `time_to_reach`.
    pub curve_after: f64,
}

pub const GRAPH_HEADER: [&str; 11] = [
    "n",
    "rep",
    "seed",
    "source",
    "nFake",
    "fracExposed",
    "componentSize",
    "aN",
    "timeToReach",
    "curveBefore",
    "curveAfter",
];

impl GraphRow {
    pub fn record(&self) -> RecordRow {
        RecordRow::new(vec![
            ("n", CsvValue::UInt(self.n as u64)),
            ("rep", CsvValue::UInt(self.rep)),
            ("seed", CsvValue::UInt(self.seed)),
            ("source", CsvValue::UInt(self.source as u64)),
            ("nFake", CsvValue::UInt(self.n_fake as u64)),
            ("fracExposed", CsvValue::Float(self.frac_exposed)),
            ("componentSize", CsvValue::UInt(self.component_size as u64)),
            ("aN", CsvValue::UInt(self.a_n as u64)),
            ("timeToReach", CsvValue::Float(self.time_to_reach)),
            ("curveBefore", CsvValue::Float(self.curve_before)),
            ("curveAfter", CsvValue::Float(self.curve_after)),
        ])
    }
}

/// Builds one weighted replication graph and runs the race from a uniform
/// source conditioned on the largest component.
pub fn graph_replication(
    cfg_kind: ExperimentKind,
    master_seed: u64,
    degrees: &crate::grammar::DegreeSpec,
    model: &JointTraversalModel,
    delay: f64,
    n: usize,
    rep: u64,
) -> Result<GraphRow, HarnessError> {
    let mut stream = Stream::substream(master_seed, &[cfg_kind.stream_tag(), n as u64, rep]);
    let seed = stream.seed();
    let seq = degrees.realize(n, &mut stream)?;
    let n = seq.n();
    let graph = build_cm(&seq, &mut stream);
    let (membership, sizes, largest) = largest_component(&graph);
    let wg = assign_weights(graph, model, &mut stream);
    let source = loop {
        let candidate = stream.below(n as u64) as u32;
        if membership[candidate as usize] == largest {
            break candidate;
        }
    };
    let correct = correct_arrivals(&wg, source, delay);
    let res = fake_exposure(&wg, source, delay, &correct)
        .expect("arrival map built from the same inputs");
    let a_n = (n as f64).sqrt().ceil() as usize;
    let t_reach = time_to_reach(&res, a_n);
    let curve = epidemic_curve(&res, &[t_reach - 0.5, t_reach + 0.5]);
    Ok(GraphRow {
        n,
        rep,
        seed,
        source,
        n_fake: res.n_fake,
        frac_exposed: res.n_fake as f64 / n as f64,
        component_size: sizes[largest as usize],
        a_n,
        time_to_reach: t_reach,
        curve_before: curve[0],
        curve_after: curve[1],
    })
}

/// Same construction, returning the graph itself (used by `--dump-graph`).
pub fn graph_replication_graph(
    cfg_kind: ExperimentKind,
    master_seed: u64,
    degrees: &crate::grammar::DegreeSpec,
    model: &JointTraversalModel,
    n: usize,
    rep: u64,
) -> Result<WeightedMultiGraph, HarnessError> {
    let mut stream = Stream::substream(master_seed, &[cfg_kind.stream_tag(), n as u64, rep]);
    let seq = degrees.realize(n, &mut stream)?;
    let graph = build_cm(&seq, &mut stream);
    Ok(assign_weights(graph, model, &mut stream))
}

/// Runs a graph sweep (or explosive scenario) and returns rows sorted by
/// `(n, rep)`.
pub fn run_graph_sweep(cfg: &ExperimentConfig) -> Result<Vec<GraphRow>, HarnessError> {
    if !matches!(cfg.kind, ExperimentKind::GraphSweep | ExperimentKind::Explosive) {
        return Err(HarnessError::Config(format!(
            "run_graph_sweep cannot execute kind {:?}",
            cfg.kind
        )));
    }
    let degrees = parse_degree_spec(cfg.degrees.as_deref().ok_or_else(|| missing("degrees"))?)?;
    let model = parse_model(cfg)?;
    let delay = cfg.delay.unwrap_or(0.0);
    let n_grid = match &cfg.n_grid {
        Some(grid) if !grid.is_empty() => grid.clone(),
        _ => vec![degrees.default_n()],
    };
    for &n in &n_grid {
        if n == 0 {
            return Err(HarnessError::Config("nGrid entries must be positive".into()));
        }
        // Surface file-spec size mismatches before spawning workers.
        if let crate::grammar::DegreeSpec::File { degrees: d } = &degrees {
            if d.len() != n {
                return Err(HarnessError::Config(format!(
                    "file-backed degree sequence has {} entries, cannot realize n = {n}",
                    d.len()
                )));
            }
        }
    }

    let jobs: Vec<(usize, u64)> = n_grid
        .iter()
        .flat_map(|&n| (0..cfg.replications).map(move |rep| (n, rep)))
        .collect();
    let results = parallel_map(jobs.len(), cfg.threads.unwrap_or(0), |i| {
        let (n, rep) = jobs[i];
        graph_replication(cfg.kind, cfg.master_seed, &degrees, &model, delay, n, rep)
    });
    results.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeRow {
    pub rep: u64,
    /// Runs discarded by the survival conditioning before this one.
    pub resamples: u64,
    pub k: usize,
    pub z: u64,
    pub z_fake: u64,
    pub ratio: f64,
    pub truncated: bool,
}

pub const TREE_HEADER: [&str; 7] = ["rep", "resamples", "k", "Zk", "ZkF", "ratio", "truncated"];

impl TreeRow {
    pub fn record(&self) -> RecordRow {
        RecordRow::new(vec![
            ("rep", CsvValue::UInt(self.rep)),
            ("resamples", CsvValue::UInt(self.resamples)),
            ("k", CsvValue::UInt(self.k as u64)),
            ("Zk", CsvValue::UInt(self.z)),
            ("ZkF", CsvValue::UInt(self.z_fake)),
            ("ratio", CsvValue::Float(self.ratio)),
            ("truncated", CsvValue::UInt(u64::from(self.truncated))),
        ])
    }
}

fn parse_mode(cfg: &ExperimentConfig) -> Result<OffspringMode, HarnessError> {
    match cfg.mode.as_deref() {
        None | Some("galton-watson") => Ok(OffspringMode::GaltonWatson),
        Some("unimodular") => Ok(OffspringMode::Unimodular),
        Some(other) => Err(HarnessError::Config(format!(
            "unknown offspring mode '{other}' (expected galton-watson or unimodular)"
        ))),
    }
}

/// Tree sweep: per replication, evolve the killed branching walk to the
/// configured generation, conditioning on survival of the underlying tree by
/// resampling (each discarded run is counted in `resamples`).
pub fn run_tree_sweep(cfg: &ExperimentConfig) -> Result<Vec<TreeRow>, HarnessError> {
    if cfg.kind != ExperimentKind::TreeSweep {
        return Err(HarnessError::Config(format!(
            "run_tree_sweep cannot execute kind {:?}",
            cfg.kind
        )));
    }
    let offspring =
        parse_offspring_spec(cfg.offspring.as_deref().ok_or_else(|| missing("offspring"))?)?;
    let mode = parse_mode(cfg)?;
    let model = parse_model(cfg)?;
    let delay = cfg.delay.unwrap_or(0.0);
    let generations = cfg.max_k.ok_or_else(|| missing("maxK"))?;
    let cap = cfg.cap.unwrap_or(DEFAULT_TREE_CAP);

    let results = parallel_map(cfg.replications as usize, cfg.threads.unwrap_or(0), |i| {
        let rep = i as u64;
        tree_replication(cfg, &offspring, mode, &model, delay, generations, cap, rep)
    });
    let mut rows = Vec::new();
    for rep_rows in results {
        rows.extend(rep_rows);
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn tree_replication(
    cfg: &ExperimentConfig,
    offspring: &DegreeDistribution,
    mode: OffspringMode,
    model: &JointTraversalModel,
    delay: f64,
    generations: usize,
    cap: u64,
    rep: u64,
) -> Vec<TreeRow> {
    let tag = cfg.kind.stream_tag();
    let mut resamples = 0u64;
    loop {
        let mut stream =
            Stream::substream(cfg.master_seed, &[tag, rep, resamples]);
        let outcome = simulate_tree(offspring, mode, model, generations, delay, cap, &mut stream);
        let (result, truncated) = match outcome {
            Ok(res) => {
                let survived = *res.z.last().expect("at least the root generation") > 0;
                if !survived && resamples < MAX_SURVIVAL_RESAMPLES {
                    resamples += 1;
                    continue;
                }
                (res, false)
            }
            // A capped run is kept and flagged rather than resampled.
            Err(cap_hit) => (cap_hit.partial, true),
        };
        let mut rows = Vec::with_capacity(result.z.len());
        for k in 0..result.z.len() {
            rows.push(TreeRow {
                rep,
                resamples,
                k,
                z: result.z[k],
                z_fake: result.z_fake[k],
                ratio: result.z_fake[k] as f64 / result.z[k] as f64,
                truncated,
            });
        }
        return rows;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauRow {
    pub k: usize,
    pub p_hat: f64,
    pub stderr: f64,
    pub replications: u64,
}

pub const TAU_HEADER: [&str; 4] = ["k", "pHat", "stderr", "replications"];

impl TauRow {
    pub fn record(&self) -> RecordRow {
        RecordRow::new(vec![
            ("k", CsvValue::UInt(self.k as u64)),
            ("pHat", CsvValue::Float(self.p_hat)),
            ("stderr", CsvValue::Float(self.stderr)),
            ("replications", CsvValue::UInt(self.replications)),
        ])
    }
}

/// Direct Monte Carlo of the first-passage tail `P(tau_d > k)`.
pub fn run_tau_tail(cfg: &ExperimentConfig) -> Result<Vec<TauRow>, HarnessError> {
    if cfg.kind != ExperimentKind::TauTail {
        return Err(HarnessError::Config(format!(
            "run_tau_tail cannot execute kind {:?}",
            cfg.kind
        )));
    }
    let model = parse_model(cfg)?;
    let delay = cfg.delay.unwrap_or(0.0);
    let k_max = cfg.max_k.ok_or_else(|| missing("maxK"))?;
    let mut stream = Stream::substream(cfg.master_seed, &[cfg.kind.stream_tag()]);
    let estimates = estimate_tau_tail(&model, delay, k_max, cfg.replications, &mut stream);
    Ok(estimates
        .into_iter()
        .map(|e| TauRow {
            k: e.k,
            p_hat: e.p_hat,
            stderr: e.stderr,
            replications: e.replications,
        })
        .collect())
}

pub const THEORY_HEADER: [&str; 17] = [
    "distF",
    "distR",
    "coupling",
    "nu",
    "feasible",
    "meanF",
    "meanR",
    "sMax",
    "rhoStatus",
    "h",
    "rho",
    "lambdaF",
    "lambdaR",
    "weak",
    "weakCase",
    "strongGraph",
    "strongTree",
];

/// Full classification of one model, as CSV-ready text fields.
pub fn theory_row(
    dist_f: &str,
    dist_r: &str,
    coupling: &str,
    nu: f64,
    tol: f64,
) -> Result<RecordRow, HarnessError> {
    let f = parse_marginal(dist_f)?;
    let r = parse_marginal(dist_r)?;
    let c = parse_coupling(coupling)?;
    if nu.is_nan() || nu <= 1.0 {
        return Err(HarnessError::Config(format!("nu must exceed 1, got {nu}")));
    }
    let feas = check_feasibility(&f, &r, c);
    let mut fields: Vec<(&'static str, CsvValue)> = vec![
        ("distF", CsvValue::Text(dist_f.to_string())),
        ("distR", CsvValue::Text(dist_r.to_string())),
        ("coupling", CsvValue::Text(coupling.to_string())),
        ("nu", CsvValue::Float(nu)),
        ("feasible", CsvValue::Text(feas.feasible.to_string())),
    ];
    if !feas.feasible {
        for key in &THEORY_HEADER[5..] {
            fields.push((key, CsvValue::Text(String::new())));
        }
        return Ok(RecordRow::new(fields));
    }
    let model = JointTraversalModel::new_unchecked(f, r, c);
    let rho_res = solve_rho(&model, tol.min(1e-9));
    let weak = classify_weak(&model, nu, tol.min(1e-9));
    let strong_graph = classify_strong_graph(&model, nu, tol);
    let strong_tree = classify_strong_tree(&model);

    fields.push(("meanF", CsvValue::Float(model.fake().mean())));
    fields.push(("meanR", CsvValue::Float(model.correct().mean())));
    fields.push(("sMax", CsvValue::Float(rho_res.s_max)));
    let status = match rho_res.status {
        RhoStatus::InteriorMin { .. } => "interior-min",
        RhoStatus::DriftPositive => "drift-positive",
        RhoStatus::DivergentAll => "divergent-all",
        RhoStatus::BoundaryNotCovered => "boundary-not-covered",
    };
    fields.push(("rhoStatus", CsvValue::Text(status.to_string())));
    fields.push(("h", option_float(rho_res.h())));
    fields.push(("rho", option_float(rho_res.rho())));
    let (lf, lr, strong_graph_label) = match &strong_graph {
        Ok(v) => (
            option_float(v.lambda_fake),
            option_float(v.lambda_correct),
            strong_label(v.outcome).to_string(),
        ),
        Err(_) => (
            CsvValue::Text(String::new()),
            CsvValue::Text(String::new()),
            "no-root".to_string(),
        ),
    };
    fields.push(("lambdaF", lf));
    fields.push(("lambdaR", lr));
    let (weak_label, weak_case) = match weak.outcome {
        WeakOutcome::Survives(case) => ("survives", case.label()),
        WeakOutcome::Dies => ("dies", "ii"),
        WeakOutcome::NotCovered => ("not-covered", ""),
    };
    fields.push(("weak", CsvValue::Text(weak_label.to_string())));
    fields.push(("weakCase", CsvValue::Text(weak_case.to_string())));
    fields.push(("strongGraph", CsvValue::Text(strong_graph_label)));
    fields.push((
        "strongTree",
        CsvValue::Text(strong_label(strong_tree.outcome).to_string()),
    ));
    Ok(RecordRow::new(fields))
}

fn strong_label(outcome: StrongOutcome) -> &'static str {
    match outcome {
        StrongOutcome::Survives => "survives",
        StrongOutcome::Dies => "dies",
        StrongOutcome::Boundary => "boundary",
    }
}

fn option_float(v: Option<f64>) -> CsvValue {
    match v {
        Some(x) => CsvValue::Float(x),
        None => CsvValue::Text(String::new()),
    }
}

/// Theory-table runner: one classified row per configured model.
pub fn run_theory_table(cfg: &ExperimentConfig) -> Result<Vec<RecordRow>, HarnessError> {
    if cfg.kind != ExperimentKind::TheoryTable {
        return Err(HarnessError::Config(format!(
            "run_theory_table cannot execute kind {:?}",
            cfg.kind
        )));
    }
    let models = cfg
        .models
        .as_ref()
        .ok_or_else(|| missing("models"))?;
    models
        .iter()
        .map(|m| theory_row(&m.dist_f, &m.dist_r, &m.coupling, m.nu, 1e-9))
        .collect()
}

/// Least-squares slope of `log(median nFake)` against `log n`, with the
/// regression standard error of the slope.
pub fn estimate_intermediate_exponent(rows: &[GraphRow]) -> Result<(f64, f64), HarnessError> {
    use std::collections::BTreeMap;
    let mut by_n: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for row in rows {
        by_n.entry(row.n).or_default().push(row.n_fake as u64);
    }
    if by_n.len() < 3 {
        return Err(HarnessError::InsufficientData(format!(
            "need at least 3 distinct n, got {}",
            by_n.len()
        )));
    }
    let mut points = Vec::with_capacity(by_n.len());
    for (n, mut counts) in by_n {
        counts.sort_unstable();
        let m = counts.len();
        let median = if m % 2 == 1 {
            counts[m / 2] as f64
        } else {
            (counts[m / 2 - 1] as f64 + counts[m / 2] as f64) / 2.0
        };
        if median <= 0.0 {
            return Err(HarnessError::InsufficientData(format!(
                "median nFake at n = {n} is zero"
            )));
        }
        points.push(((n as f64).ln(), median.ln()));
    }
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|p| {
            let e = p.1 - (intercept + slope * p.0);
            e * e
        })
        .sum();
    let stderr = if points.len() > 2 {
        (ss_res / (m - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok((slope, stderr))
}

/// Fraction of replications with `nFake >= eta * n` (strong-survival
/// estimator at level `eta`).
pub fn survival_fraction_eta(rows: &[GraphRow], eta: f64) -> f64 {
    if rows.is_empty() {
        return f64::NAN;
    }
    rows.iter()
        .filter(|r| r.n_fake as f64 >= eta * r.n as f64)
        .count() as f64
        / rows.len() as f64
}

/// Fraction of replications with `nFake >= k` (weak-survival estimator at
/// count `k`).
pub fn survival_fraction_count(rows: &[GraphRow], k: u64) -> f64 {
    if rows.is_empty() {
        return f64::NAN;
    }
    rows.iter().filter(|r| r.n_fake as u64 >= k).count() as f64 / rows.len() as f64
}
