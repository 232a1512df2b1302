//! Cross-runner consistency: the tree-sweep surviving ratio agrees with the
//! independently estimated first-passage tail.

use newsrace::config::{ExperimentConfig, ExperimentKind};
use newsrace::harness::{run_tau_tail, run_tree_sweep};

fn cfg(kind: ExperimentKind, reps: u64, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: 1,
        kind,
        degrees: None,
        offspring: Some("regular:2".into()),
        mode: None,
        dist_f: Some("exp:1".into()),
        dist_r: Some("exp:1".into()),
        coupling: Some("independent".into()),
        delay: Some(0.0),
        n_grid: None,
        max_k: Some(8),
        replications: reps,
        eta: None,
        big_k: None,
        cap: None,
        master_seed: seed,
        out: "unused.csv".into(),
        threads: Some(2),
        models: None,
    }
}

#[test]
fn tree_ratio_tracks_tau_tail() {
    let tree_reps = 20_000u64;
    let tree_rows = run_tree_sweep(&cfg(ExperimentKind::TreeSweep, tree_reps, 31)).unwrap();
    let tau_rows = run_tau_tail(&cfg(ExperimentKind::TauTail, 200_000, 32)).unwrap();

    for (k, tau) in tau_rows.iter().enumerate().skip(1) {
        let ratios: Vec<f64> = tree_rows
            .iter()
            .filter(|r| r.k == k)
            .map(|r| r.ratio)
            .collect();
        assert_eq!(ratios.len(), tree_reps as usize);
        let mean: f64 = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let var: f64 = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>()
            / (ratios.len() as f64 - 1.0);
        let se_tree = (var / ratios.len() as f64).sqrt();
        let combined = (se_tree * se_tree + tau.stderr * tau.stderr).sqrt();
        assert!(
            (mean - tau.p_hat).abs() <= 3.0 * combined,
            "k = {k}: ratio {mean} vs p_hat {} (3 se = {})",
            tau.p_hat,
            3.0 * combined
        );
    }
}

#[test]
fn tree_sweep_counts_survival_resamples() {
    // Unimodular with p_1 mass: non-root offspring can be zero, so the
    // underlying tree dies with positive probability and the conditioning
    // must resample.
    let mut config = cfg(ExperimentKind::TreeSweep, 200, 77);
    config.offspring = Some("pk:1@0.6,3@0.4".into());
    config.mode = Some("unimodular".into());
    config.max_k = Some(4);
    let rows = run_tree_sweep(&config).unwrap();
    // Every surviving replication ends with Z_K > 0.
    for row in rows.iter().filter(|r| r.k == 4) {
        assert!(row.z > 0, "rep {} not conditioned on survival", row.rep);
    }
    let total_resamples: u64 = rows.iter().filter(|r| r.k == 0).map(|r| r.resamples).sum();
    assert!(
        total_resamples > 0,
        "subcritical-prone offspring should trigger at least one resample"
    );
}
