//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on IO errors.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use newsrace::config::{ExperimentConfig, ExperimentKind, SCHEMA_VERSION};
use newsrace::csv::{emit_csv, format_float};
use newsrace::grammar::{parse_coupling, parse_marginal};
use newsrace::harness::{
    self, estimate_intermediate_exponent, run_graph_sweep, run_tau_tail, run_theory_table,
    run_tree_sweep, survival_fraction_count, survival_fraction_eta,
};
use newsrace::HarnessError;
use newsrace_core::survival::{
    classify_strong_graph, classify_strong_tree, classify_weak, solve_rho, RhoStatus,
    StrongOutcome, WeakOutcome,
};
use newsrace_core::traversal::{check_feasibility, JointTraversalModel};

#[derive(Parser)]
#[command(
    name = "newsrace",
    about = "Race a fake-news epidemic against its correction on random graphs and trees",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytical classifiers (no simulation).
    #[command(subcommand)]
    Theory(TheoryCommand),
    /// Monte Carlo simulation of the race.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// First-passage tail of the lineage walk.
    TauTail(TauTailArgs),
    /// Run an experiment described by a JSON config file.
    Sweep(SweepArgs),
}

#[derive(Subcommand)]
enum TheoryCommand {
    /// Classify one model: feasibility, rho, Malthusian rates, verdicts.
    Classify(ClassifyArgs),
    /// Stable-age quantities: tilted means, lifetime profile, p*.
    StableAge(StableAgeArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Fake-news marginal, e.g. exp:1, det:2, unif:0:1, pareto:2.5:1
    #[arg(long = "dist-f")]
    dist_f: String,
    /// Correct-news marginal.
    #[arg(long = "dist-r")]
    dist_r: String,
    /// independent | comonotone | countermonotone
    #[arg(long, default_value = "independent")]
    coupling: String,
    /// Head start of the fake news.
    #[arg(long, default_value_t = 0.0)]
    delay: f64,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Mean forward branching factor (accepts `inf`).
    #[arg(long)]
    nu: f64,
    /// Absolute tolerance for the Malthusian boundary comparison; defaults
    /// to 1e-9 relative to the larger rate.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct StableAgeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Mean forward branching factor (finite, > 1).
    #[arg(long)]
    nu: f64,
    /// Comma list of lifetime-profile evaluation points.
    #[arg(long = "h-grid", default_value = "0.5,1,2")]
    h_grid: String,
    /// Comma list of blocking horizons T for p*_T.
    #[arg(long = "t-grid", default_value = "")]
    t_grid: String,
    #[arg(long, default_value_t = 10_000)]
    reps: u64,
    /// Steps of the tilted walk per replication.
    #[arg(long, default_value_t = 10_000)]
    horizon: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum SimulateCommand {
    /// Configuration-model race at a single size.
    Graph(SimulateGraphArgs),
    /// Branching-walk race on a tree.
    Tree(SimulateTreeArgs),
}

#[derive(Args)]
struct SimulateGraphArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Degree spec: regular:<r>:<n>, iid:<pk>:<n>, pareto-degree:<tau>:<min>:<n>, file:<path>
    #[arg(long)]
    degrees: String,
    #[arg(long, default_value_t = 100)]
    reps: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Strong-survival fraction threshold for the printed summary.
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    /// Weak-survival count threshold for the printed summary.
    #[arg(long = "big-k", default_value_t = 100)]
    big_k: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Dump the first replication's weighted graph to this path.
    #[arg(long = "dump-graph")]
    dump_graph: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateTreeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Offspring spec: regular:<r>, pk:<pk>, pareto-degree:<tau>:<min>
    #[arg(long)]
    offspring: String,
    /// galton-watson | unimodular
    #[arg(long, default_value = "galton-watson")]
    mode: String,
    /// Number of generations.
    #[arg(long)]
    gens: usize,
    #[arg(long, default_value_t = 1000)]
    reps: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Per-generation population cap.
    #[arg(long, default_value_t = 10_000_000)]
    cap: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct TauTailArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Walk length.
    #[arg(long)]
    kmax: usize,
    #[arg(long, default_value_t = 100_000)]
    reps: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Theory(TheoryCommand::Classify(args)) => theory_classify(args),
        Command::Theory(TheoryCommand::StableAge(args)) => theory_stable_age(args),
        Command::Simulate(SimulateCommand::Graph(args)) => simulate_graph(args),
        Command::Simulate(SimulateCommand::Tree(args)) => simulate_tree_cmd(args),
        Command::TauTail(args) => tau_tail_cmd(args),
        Command::Sweep(args) => sweep_cmd(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn theory_classify(args: ClassifyArgs) -> Result<(), HarnessError> {
    let fake = parse_marginal(&args.model.dist_f)?;
    let correct = parse_marginal(&args.model.dist_r)?;
    let coupling = parse_coupling(&args.model.coupling)?;
    let nu = args.nu;
    if nu.is_nan() || nu <= 1.0 {
        return Err(HarnessError::Config(format!("nu must exceed 1, got {nu}")));
    }

    println!("schemaVersion={SCHEMA_VERSION}");
    println!("distF={}", args.model.dist_f);
    println!("distR={}", args.model.dist_r);
    println!("coupling={}", args.model.coupling);
    println!("nu={}", format_float(nu));

    let feas = check_feasibility(&fake, &correct, coupling);
    println!("feasible={}", feas.feasible);
    println!("feasibilityReason={}", feas.reason);
    if !feas.feasible {
        return Ok(());
    }
    let model = JointTraversalModel::new_unchecked(fake, correct, coupling);
    println!("meanF={}", format_float(model.fake().mean()));
    println!("meanR={}", format_float(model.correct().mean()));

    let rho_res = solve_rho(&model, 1e-10);
    println!("sMax={}", format_float(rho_res.s_max));
    let status = match rho_res.status {
        RhoStatus::InteriorMin { .. } => "interior-min",
        RhoStatus::DriftPositive => "drift-positive",
        RhoStatus::DivergentAll => "divergent-all",
        RhoStatus::BoundaryNotCovered => "boundary-not-covered",
    };
    println!("rhoStatus={status}");
    println!("h={}", rho_res.h().map(format_float).unwrap_or_else(|| "none".into()));
    println!("rho={}", rho_res.rho().map(format_float).unwrap_or_else(|| "none".into()));
    if let Some(note) = rho_res.note {
        println!("rhoNote={note}");
    }

    let weak = classify_weak(&model, nu, 1e-10);
    println!("invNu={}", format_float(weak.inv_nu));
    let (weak_label, weak_case) = match weak.outcome {
        WeakOutcome::Survives(case) => ("survives", case.label()),
        WeakOutcome::Dies => ("dies", "ii"),
        WeakOutcome::NotCovered => ("not-covered", "none"),
    };
    println!("weak={weak_label}");
    println!("weakCase={weak_case}");

    if nu.is_finite() {
        let lambda_max = {
            // Relative default boundary tolerance needs the rates first.
            let lf = newsrace_core::survival::solve_malthusian(model.fake(), nu, 1e-9);
            let lr = newsrace_core::survival::solve_malthusian(model.correct(), nu, 1e-9);
            match (&lf, &lr) {
                (Ok(a), Ok(b)) => a.lambda.max(b.lambda),
                _ => 1.0,
            }
        };
        let tol = args.tol.unwrap_or(1e-9 * lambda_max);
        println!("strongTol={}", format_float(tol));
        match classify_strong_graph(&model, nu, tol) {
            Ok(v) => {
                println!("lambdaF={}", format_float(v.lambda_fake.unwrap()));
                println!("lambdaR={}", format_float(v.lambda_correct.unwrap()));
                println!("strongGraph={}", strong_label(v.outcome));
            }
            Err(e) => {
                println!("lambdaF=none");
                println!("lambdaR=none");
                println!("strongGraph=no-root");
                println!("strongGraphReason={e}");
            }
        }
    } else {
        println!("lambdaF=none");
        println!("lambdaR=none");
        println!("strongGraph=undefined-infinite-nu");
    }
    let tree = classify_strong_tree(&model);
    println!("strongTree={}", strong_label(tree.outcome));
    Ok(())
}

fn strong_label(outcome: StrongOutcome) -> &'static str {
    match outcome {
        StrongOutcome::Survives => "survives",
        StrongOutcome::Dies => "dies",
        StrongOutcome::Boundary => "boundary",
    }
}

fn parse_grid(text: &str, what: &str) -> Result<Vec<f64>, HarnessError> {
    let mut grid = Vec::new();
    for token in text.split(',').filter(|t| !t.trim().is_empty()) {
        let v: f64 = token
            .trim()
            .parse()
            .map_err(|_| HarnessError::Config(format!("bad {what} entry '{token}'")))?;
        grid.push(v);
    }
    Ok(grid)
}

fn theory_stable_age(args: StableAgeArgs) -> Result<(), HarnessError> {
    let fake = parse_marginal(&args.model.dist_f)?;
    let correct = parse_marginal(&args.model.dist_r)?;
    let coupling = parse_coupling(&args.model.coupling)?;
    if !args.nu.is_finite() || args.nu <= 1.0 {
        return Err(HarnessError::Config(format!(
            "stable-age quantities need finite nu > 1, got {}",
            args.nu
        )));
    }
    let feas = check_feasibility(&fake, &correct, coupling);
    if !feas.feasible {
        return Err(HarnessError::Config(format!("infeasible model: {}", feas.reason)));
    }
    let model = JointTraversalModel::new_unchecked(fake, correct, coupling);
    let h_grid = parse_grid(&args.h_grid, "h-grid")?;
    let t_grid = parse_grid(&args.t_grid, "t-grid")?;
    let mut stream = newsrace_core::rng::Stream::substream(args.seed, &[6]);
    let report = newsrace_core::survival::stable_age_report(
        &model,
        args.nu,
        &h_grid,
        &t_grid,
        args.reps,
        args.horizon,
        &mut stream,
    )
    .map_err(|e| HarnessError::Config(format!("no Malthusian root: {e}")))?;

    println!("schemaVersion={SCHEMA_VERSION}");
    println!("lambdaF={}", format_float(report.lambda_fake));
    println!("nuBarF={}", format_float(report.nu_bar_fake));
    println!("eLbarR={}", format_float(report.e_lbar_correct));
    for (x, h) in &report.h_values {
        println!("H[{}]={}", format_float(*x), format_float(*h));
    }
    println!("hInfinity={}", format_float(report.h_infinity));
    println!("pStarHat={}", format_float(report.p_star_hat));
    println!("pStarStderr={}", format_float(report.p_star_stderr));
    println!("horizon={}", report.horizon);
    println!("replications={}", report.replications);
    println!(
        "truncationBiasBound={}",
        format_float(report.truncation_bias_bound)
    );
    for (t, p) in &report.p_star_t {
        println!("pStarT[{}]={}", format_float(*t), format_float(*p));
    }
    println!("acceptanceRate={}", format_float(report.acceptance_rate));
    println!("acceptanceStderr={}", format_float(report.acceptance_stderr));
    Ok(())
}

fn base_config(kind: ExperimentKind, model: &ModelArgs, seed: u64, out: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        kind,
        degrees: None,
        offspring: None,
        mode: None,
        dist_f: Some(model.dist_f.clone()),
        dist_r: Some(model.dist_r.clone()),
        coupling: Some(model.coupling.clone()),
        delay: Some(model.delay),
        n_grid: None,
        max_k: None,
        replications: 1,
        eta: None,
        big_k: None,
        cap: None,
        master_seed: seed,
        out: out.display().to_string(),
        threads: None,
        models: None,
    }
}

fn simulate_graph(args: SimulateGraphArgs) -> Result<(), HarnessError> {
    let started = Instant::now();
    let mut cfg = base_config(ExperimentKind::GraphSweep, &args.model, args.seed, &args.out);
    cfg.degrees = Some(args.degrees.clone());
    cfg.replications = args.reps;
    cfg.threads = Some(args.threads);

    let rows = run_graph_sweep(&cfg)?;
    if let Some(path) = &args.dump_graph {
        let degrees = newsrace::grammar::parse_degree_spec(&args.degrees)?;
        let fake = parse_marginal(&args.model.dist_f)?;
        let correct = parse_marginal(&args.model.dist_r)?;
        let coupling = parse_coupling(&args.model.coupling)?;
        let model = JointTraversalModel::new_unchecked(fake, correct, coupling);
        let wg = harness::graph_replication_graph(
            cfg.kind,
            cfg.master_seed,
            &degrees,
            &model,
            degrees.default_n(),
            0,
        )?;
        newsrace::dump::write_graph(&wg, path)?;
    }
    let records: Vec<_> = rows.iter().map(|r| r.record()).collect();
    emit_csv(&harness::GRAPH_HEADER, &records, &args.out)?;

    println!("rows={}", rows.len());
    println!(
        "survivalFractionEta eta={} value={}",
        args.eta,
        format_float(survival_fraction_eta(&rows, args.eta))
    );
    println!(
        "survivalFractionCount K={} value={}",
        args.big_k,
        format_float(survival_fraction_count(&rows, args.big_k))
    );
    println!("wallMs={}", started.elapsed().as_millis());
    Ok(())
}

fn simulate_tree_cmd(args: SimulateTreeArgs) -> Result<(), HarnessError> {
    let started = Instant::now();
    let mut cfg = base_config(ExperimentKind::TreeSweep, &args.model, args.seed, &args.out);
    cfg.offspring = Some(args.offspring.clone());
    cfg.mode = Some(args.mode.clone());
    cfg.max_k = Some(args.gens);
    cfg.replications = args.reps;
    cfg.cap = Some(args.cap);
    cfg.threads = Some(args.threads);

    let rows = run_tree_sweep(&cfg)?;
    let records: Vec<_> = rows.iter().map(|r| r.record()).collect();
    emit_csv(&harness::TREE_HEADER, &records, &args.out)?;

    let resampled: u64 = rows
        .iter()
        .filter(|r| r.k == 0)
        .map(|r| r.resamples)
        .sum();
    let truncated = rows.iter().filter(|r| r.k == 0 && r.truncated).count();
    println!("rows={}", rows.len());
    println!("survivalResamples={resampled}");
    println!("truncatedReplications={truncated}");
    println!("wallMs={}", started.elapsed().as_millis());
    Ok(())
}

fn tau_tail_cmd(args: TauTailArgs) -> Result<(), HarnessError> {
    let started = Instant::now();
    let mut cfg = base_config(ExperimentKind::TauTail, &args.model, args.seed, &args.out);
    cfg.max_k = Some(args.kmax);
    cfg.replications = args.reps;

    let rows = run_tau_tail(&cfg)?;
    let records: Vec<_> = rows.iter().map(|r| r.record()).collect();
    emit_csv(&harness::TAU_HEADER, &records, &args.out)?;
    println!("rows={}", rows.len());
    println!("wallMs={}", started.elapsed().as_millis());
    Ok(())
}

fn sweep_cmd(args: SweepArgs) -> Result<(), HarnessError> {
    let started = Instant::now();
    let cfg = ExperimentConfig::load(&args.config)?;
    let out = PathBuf::from(&cfg.out);
    let rows_written = match cfg.kind {
        ExperimentKind::GraphSweep | ExperimentKind::Explosive => {
            let rows = run_graph_sweep(&cfg)?;
            let records: Vec<_> = rows.iter().map(|r| r.record()).collect();
            emit_csv(&harness::GRAPH_HEADER, &records, &out)?;
            if let Some(eta) = cfg.eta {
                println!(
                    "survivalFractionEta eta={eta} value={}",
                    format_float(survival_fraction_eta(&rows, eta))
                );
            }
            if let Some(k) = cfg.big_k {
                println!(
                    "survivalFractionCount K={k} value={}",
                    format_float(survival_fraction_count(&rows, k))
                );
            }
            if let Ok((slope, stderr)) = estimate_intermediate_exponent(&rows) {
                println!(
                    "intermediateExponent slope={} stderr={}",
                    format_float(slope),
                    format_float(stderr)
                );
            }
            rows.len()
        }
        ExperimentKind::TreeSweep => {
            let rows = run_tree_sweep(&cfg)?;
            let records: Vec<_> = rows.iter().map(|r| r.record()).collect();
            emit_csv(&harness::TREE_HEADER, &records, &out)?;
            rows.len()
        }
        ExperimentKind::TauTail => {
            let rows = run_tau_tail(&cfg)?;
            let records: Vec<_> = rows.iter().map(|r| r.record()).collect();
            emit_csv(&harness::TAU_HEADER, &records, &out)?;
            rows.len()
        }
        ExperimentKind::TheoryTable => {
            let records = run_theory_table(&cfg)?;
            emit_csv(&harness::THEORY_HEADER, &records, &out)?;
            records.len()
        }
    };
    println!("rows={rows_written}");
    println!("out={}", out.display());
    println!("wallMs={}", started.elapsed().as_millis());
    Ok(())
}
