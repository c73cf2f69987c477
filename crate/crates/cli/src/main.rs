//! Command-line front end: catalog listing, single-query moments, genealogy
//! simulation, c_N convergence curves and the full verification battery.
//!
//! Exit codes: 0 success / all tests pass, 1 test failure or empty match,
//! 2 execution error (bad arguments, unreadable config, quadrature failure).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cannings::catalog::demo_catalog;
use cannings::limits::classify;
use cannings::moments::{phi_closed_form, phi_exact, QuadratureConfig};
use cannings::sim::{estimate_phi, simulate_coalescent};
use cannings::verifier::{cn_curve, run_report, RunConfig};
use cannings::Model;

#[derive(Parser)]
#[command(
    name = "cannings",
    version,
    about = "Genealogy simulation and coalescent-limit verification for \
             mixed multinomial population models with heavy-tailed fitness"
)]
struct Cli {
    /// Worker threads (default: available parallelism). Results do not
    /// depend on this value.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the model catalog with tail index, moments and limiting regime
    Catalog {
        /// Substring filter on the model spec
        filter: Option<String>,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a transition functional Phi_j^(N)(k1,..,kj)
    Moments {
        /// Model spec, e.g. pareto:alpha=1.5
        #[arg(long)]
        model: String,
        /// Population size
        #[arg(long = "N")]
        n_pop: u64,
        /// Query j:k1,k2,..  (j block groups of the given sizes)
        #[arg(long)]
        query: String,
        /// integral | closed-form | mc | both
        #[arg(long, default_value = "integral")]
        method: String,
        /// Monte Carlo replicates (mc / both)
        #[arg(long, default_value_t = 256)]
        reps: u64,
        #[arg(long, default_value_t = 0x5eed_cafe)]
        seed: u64,
        /// Split point of the integral representation
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Relative quadrature tolerance
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Simulate the discrete-time n-coalescent and report block counts
    Simulate {
        #[arg(long)]
        model: String,
        #[arg(long = "N")]
        n_pop: u64,
        /// Sample size (number of lineages at generation 0)
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        horizon: usize,
        #[arg(long, default_value_t = 0x5eed_cafe)]
        seed: u64,
        /// Write the per-generation summary CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// c_N convergence curve against the predicted asymptotics
    CnCurve {
        #[arg(long)]
        model: String,
        /// Comma-separated population sizes, strictly increasing
        #[arg(long = "N", value_delimiter = ',')]
        n_grid: Vec<u64>,
        #[arg(long, default_value_t = 64)]
        reps: u64,
        #[arg(long, default_value_t = 0x5eed_cafe)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Write the curve CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification battery from a JSON config; writes report.json
    /// and curves.csv
    Verify {
        /// Path to the run configuration (omit with --demo)
        config: Option<PathBuf>,
        /// Use the bundled six-regime demonstration configuration
        #[arg(long)]
        demo: bool,
        /// Override the output directory
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the Monte Carlo replicate count
        #[arg(long)]
        reps: Option<u64>,
        /// Print the effective configuration and exit
        #[arg(long)]
        print_config: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
        {
            eprintln!("error: cannot configure {workers} workers: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode, String> {
    match cmd {
        Command::Catalog { filter, json } => cmd_catalog(filter.as_deref(), json),
        Command::Moments {
            model,
            n_pop,
            query,
            method,
            reps,
            seed,
            delta,
            tol,
            json,
        } => cmd_moments(&model, n_pop, &query, &method, reps, seed, delta, tol, json),
        Command::Simulate {
            model,
            n_pop,
            n,
            horizon,
            seed,
            out,
        } => cmd_simulate(&model, n_pop, n, horizon, seed, out),
        Command::CnCurve {
            model,
            n_grid,
            reps,
            seed,
            delta,
            tol,
            out,
        } => cmd_cn_curve(&model, &n_grid, reps, seed, delta, tol, out),
        Command::Verify {
            config,
            demo,
            out,
            seed,
            reps,
            print_config,
        } => cmd_verify(config, demo, out, seed, reps, print_config),
    }
}

fn cmd_catalog(filter: Option<&str>, json: bool) -> Result<ExitCode, String> {
    let entries: Vec<Model> = demo_catalog()
        .into_iter()
        .filter(|m| filter.is_none_or(|f| m.spec_string().contains(f)))
        .collect();
    if entries.is_empty() {
        eprintln!("no catalog entry matches {:?}", filter.unwrap_or(""));
        return Ok(ExitCode::from(1));
    }
    let fmt_moment = |v: Option<f64>| v.map_or("inf".to_string(), |x| format!("{x:.6}"));
    if json {
        let items: Vec<serde_json::Value> = entries
            .iter()
            .map(|m| {
                let regime = classify(m).map(|r| r.label()).unwrap_or_else(|e| e.to_string());
                serde_json::json!({
                    "spec": m.spec_string(),
                    "family": m.family(),
                    "alpha": match m.tail_index() {
                        cannings::TailIndex::Index(a) => serde_json::json!(a),
                        cannings::TailIndex::FiniteSecondMoment =>
                            serde_json::json!("finite-second-moment"),
                    },
                    "mean": m.mean(),
                    "second_moment": m.second_moment(),
                    "regime": regime,
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&items).map_err(|e| e.to_string())?);
    } else {
        for m in &entries {
            let regime = classify(m).map(|r| r.label()).unwrap_or_else(|e| e.to_string());
            let alpha = match m.tail_index() {
                cannings::TailIndex::Index(a) => format!("{a}"),
                cannings::TailIndex::FiniteSecondMoment => "finite-2nd-moment".into(),
            };
            println!(
                "{:<32} alpha={:<18} mu={:<10} rho={:<10} -> {}",
                m.spec_string(),
                alpha,
                fmt_moment(m.mean()),
                fmt_moment(m.second_moment()),
                regime
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_query(query: &str) -> Result<Vec<u32>, String> {
    let (j_str, ks_str) = query
        .split_once(':')
        .ok_or_else(|| format!("query must look like j:k1,k2,.. got {query:?}"))?;
    let j: usize = j_str.trim().parse().map_err(|_| format!("bad j in {query:?}"))?;
    let ks: Result<Vec<u32>, _> = ks_str.split(',').map(|k| k.trim().parse::<u32>()).collect();
    let ks = ks.map_err(|_| format!("bad group sizes in {query:?}"))?;
    if ks.len() != j {
        return Err(format!("query says j={j} but lists {} group sizes", ks.len()));
    }
    Ok(ks)
}

#[allow(clippy::too_many_arguments)]
fn cmd_moments(
    model: &str,
    n_pop: u64,
    query: &str,
    method: &str,
    reps: u64,
    seed: u64,
    delta: f64,
    tol: f64,
    json: bool,
) -> Result<ExitCode, String> {
    let m = Model::parse(model).map_err(|e| e.to_string())?;
    let ks = parse_query(query)?;
    let cfg = QuadratureConfig {
        delta,
        rel_tol: tol,
        ..Default::default()
    };
    let label = format!("Phi_{}^({})({:?})", ks.len(), n_pop, ks);
    let mut out = serde_json::Map::new();
    out.insert("model".into(), model.into());
    out.insert("query".into(), query.into());
    out.insert("n_pop".into(), n_pop.into());
    match method {
        "integral" | "closed-form" | "mc" | "both" => {}
        other => return Err(format!("unknown method {other:?}")),
    }
    let mut exact_val = None;
    if method == "integral" || method == "both" {
        let r = phi_exact(&m, n_pop, &ks, &cfg).map_err(|e| e.to_string())?;
        if !json {
            println!("{label} = {:.12e}  (method=integral, err<={:.3e})", r.value, r.error);
        }
        out.insert("integral".into(), serde_json::json!({"value": r.value, "error": r.error}));
        exact_val = Some(r);
    }
    if method == "closed-form" {
        match phi_closed_form(&m, n_pop, &ks) {
            Some(r) => {
                if !json {
                    println!("{label} = {:.12e}  (method=closed-form)", r.value);
                }
                out.insert("closed_form".into(), serde_json::json!({"value": r.value}));
            }
            None => return Err(format!("{model} has no closed-form moments")),
        }
    }
    let mut mc_val = None;
    if method == "mc" || method == "both" {
        let r = estimate_phi(&m, n_pop, &ks, reps, seed).map_err(|e| e.to_string())?;
        if !json {
            println!(
                "{label} = {:.12e}  (method=monte-carlo, se={:.3e}, reps={}, seed={})",
                r.value, r.std_error, r.replicates, r.seed
            );
        }
        out.insert(
            "monte_carlo".into(),
            serde_json::json!({
                "value": r.value, "std_error": r.std_error,
                "replicates": r.replicates, "seed": r.seed
            }),
        );
        mc_val = Some(r);
    }
    if let (Some(a), Some(b)) = (&exact_val, &mc_val) {
        let denom = (b.std_error * b.std_error + a.error * a.error).sqrt().max(1e-300);
        let z = (a.value - b.value) / denom;
        if !json {
            println!("agreement z-score = {z:.3}");
        }
        out.insert("z_score".into(), serde_json::json!(z));
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&out).map_err(|e| e.to_string())?);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(
    model: &str,
    n_pop: u64,
    n: usize,
    horizon: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<ExitCode, String> {
    let m = Model::parse(model).map_err(|e| e.to_string())?;
    let path = simulate_coalescent(&m, n_pop, n, horizon, seed).map_err(|e| e.to_string())?;
    let mut csv = String::from("generation,blocks,partition\n");
    for (r, p) in path.partitions.iter().enumerate() {
        csv.push_str(&format!("{r},{},{}\n", p.block_count(), p));
    }
    match &out {
        Some(f) => std::fs::write(f, &csv).map_err(|e| e.to_string())?,
        None => print!("{csv}"),
    }
    match path.absorbed_at {
        Some(r) => println!("# MRCA reached at generation {r} (seed={seed})"),
        None => println!("# horizon {horizon} reached without absorption (seed={seed})"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_cn_curve(
    model: &str,
    n_grid: &[u64],
    reps: u64,
    seed: u64,
    delta: f64,
    tol: f64,
    out: Option<PathBuf>,
) -> Result<ExitCode, String> {
    if n_grid.is_empty() {
        return Err("--N needs at least one population size".into());
    }
    let m = Model::parse(model).map_err(|e| e.to_string())?;
    let regime = classify(&m).map_err(|e| e.to_string())?;
    let cfg = QuadratureConfig {
        delta,
        rel_tol: tol,
        ..Default::default()
    };
    let rows = cn_curve(&m, n_grid, &cfg, reps, 200_000_000, seed).map_err(|e| e.to_string())?;
    let mut csv = String::from("model,N,cn_exact,cn_mc,cn_mc_se,cn_predicted,ratio,regime\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{}\n",
            model,
            r.n_pop,
            r.cn_exact,
            r.cn_mc,
            r.cn_mc_se,
            r.predicted,
            r.ratio,
            regime.label()
        ));
    }
    match &out {
        Some(f) => std::fs::write(f, &csv).map_err(|e| e.to_string())?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    config: Option<PathBuf>,
    demo: bool,
    out: Option<PathBuf>,
    seed: Option<u64>,
    reps: Option<u64>,
    print_config: bool,
) -> Result<ExitCode, String> {
    let mut cfg: RunConfig = match (&config, demo) {
        (Some(path), false) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        (None, true) => RunConfig::six_regime_demo(),
        (Some(_), true) => return Err("pass either a config path or --demo, not both".into()),
        (None, false) => return Err("pass a config path or --demo".into()),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(r) = reps {
        cfg.reps = r;
    }
    if let Some(dir) = out {
        cfg.output_dir = dir.display().to_string();
    }
    if print_config {
        println!("{}", serde_json::to_string_pretty(&cfg).map_err(|e| e.to_string())?);
        return Ok(ExitCode::SUCCESS);
    }
    let report = run_report(&cfg).map_err(|e| e.to_string())?;
    for m in &report.models {
        println!("[{}] {} (battery at N={})", m.regime, m.model, m.transition_n);
        for t in m.transitions.iter().chain(m.trend_checks.iter()) {
            println!(
                "  {} {}: observed {:.6e}{}",
                if t.pass { "PASS" } else { "FAIL" },
                t.label,
                t.observed,
                if t.tolerance > 0.0 {
                    format!(" (target {:.6e}, tol {})", t.target, t.tolerance)
                } else {
                    String::new()
                }
            );
        }
    }
    let dir = PathBuf::from(&report.config.output_dir);
    let (json_path, csv_path) = report.write_outputs(&dir).map_err(|e| e.to_string())?;
    println!(
        "wrote {} and {} (seed={})",
        json_path.display(),
        csv_path.display(),
        report.config.seed
    );
    if report.all_pass {
        println!("verdict: PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verdict: FAIL");
        Ok(ExitCode::from(1))
    }
}
