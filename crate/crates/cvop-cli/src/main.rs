//! `cvop`: generate benchmark instances, run the primal/dual solvers,
//! compute performance metrics over exported runs, and convert between the
//! polyhedral representations of the geometric duality.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cvop_core::cones::{NormSpec, OrderingCone};
use cvop_core::duality::{
    conic_from_heyde, heyde_from_conic, lower_from_upper, upper_from_lower, HeydeDual, LowerCone,
    UpperSet,
};
use cvop_core::harness::{export_run, gen_instance, run_experiment, worker_count, Protocol};
use cvop_core::metrics::{bounding_polytope, hypervolume, primal_error};
use cvop_core::poly::{
    enumerate_vertices, polyhedron_from_json, polyhedron_to_json,
};
use cvop_core::scalar::{instance_from_json, instance_to_json, ProblemInstance};
use cvop_core::solve::Algorithm;
use cvop_core::StoppingRule;

#[derive(Parser)]
#[command(name = "cvop", about = "Convex vector optimization solver toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random benchmark instances.
    Gen(GenArgs),
    /// Solve one instance with the primal or dual algorithm.
    Solve(SolveArgs),
    /// Compute the metrics table over a directory of exported runs.
    Metrics(MetricsArgs),
    /// Convert between upper, lower and fixed-direction dual representations.
    Dualize(DualizeArgs),
    /// Run a batch experiment from a JSON config.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "C1")]
    cone: String,
    #[arg(long, default_value = "l2")]
    norm: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    alg: String,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = false)]
    break_variant: bool,
    /// Override the instance's ordering cone.
    #[arg(long)]
    cone: Option<String>,
    /// Override the instance's norm.
    #[arg(long)]
    norm: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    runs: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DualizeArgs {
    #[arg(long, value_name = "FILE")]
    r#in: PathBuf,
    /// One of: lower, upper, heyde, conic.
    #[arg(long)]
    to: String,
    /// Interior direction for the fixed-direction frame, comma separated.
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Metrics(a) => metrics(a),
        Command::Dualize(a) => dualize(a),
        Command::Experiment(a) => experiment(a),
    }
}

fn gen(a: GenArgs) -> Result<()> {
    let norm = NormSpec::parse(&a.norm).map_err(|e| anyhow!("{e}"))?;
    let cone = OrderingCone::preset(&a.cone, a.q, &norm).map_err(|e| anyhow!("{e}"))?;
    fs::create_dir_all(&a.out)?;
    for k in 0..a.count {
        let seed = a.seed.wrapping_add(k as u64);
        let inst = gen_instance(a.n, a.q, seed, cone.clone(), norm.clone())
            .map_err(|e| anyhow!("{e}"))?;
        let doc = instance_to_json(&inst).map_err(|e| anyhow!("{e}"))?;
        let path = a.out.join(format!("{}.json", inst.id));
        fs::write(&path, serde_json::to_string_pretty(&doc)?)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn load_instance(path: &Path, cone: &Option<String>, norm: &Option<String>) -> Result<ProblemInstance> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut doc: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(c) = cone {
        doc["cone"] = serde_json::json!({ "preset": c });
    }
    if let Some(n) = norm {
        doc["norm"] = serde_json::json!(n);
    }
    instance_from_json(&doc).map_err(|e| anyhow!("{e}"))
}

fn solve(a: SolveArgs) -> Result<()> {
    let problem = load_instance(&a.instance, &a.cone, &a.norm)?;
    let alg = match a.alg.as_str() {
        "primal" => Algorithm::Primal,
        "dual" => Algorithm::Dual,
        other => bail!("unknown algorithm `{other}`"),
    };
    let stop = match (a.eps, a.time_limit) {
        (Some(eps), None) => StoppingRule::epsilon(eps),
        (None, Some(t)) => StoppingRule::time_limit(t),
        _ => bail!("exactly one of --eps and --time-limit is required"),
    }
    .with_break(a.break_variant);
    let outcome = run_experiment(&[problem], &Protocol::Simple(vec![(alg, stop)]), 1);
    fs::create_dir_all(&a.out)?;
    for bundle in &outcome.bundles {
        let dir = export_run(&a.out, bundle)?;
        println!("{}", dir.display());
        println!("{}", bundle.report.csv_row());
    }
    Ok(())
}

/// One exported run directory read back for the metrics table.
struct LoadedRun {
    instance: String,
    alg: String,
    problem: ProblemInstance,
    outer_vertices: Vec<nalgebra::DVector<f64>>,
    inner_vertices: Vec<nalgebra::DVector<f64>>,
}

fn load_runs(dir: &Path) -> Result<Vec<LoadedRun>> {
    let mut runs = Vec::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    entries.sort();
    for path in entries {
        let report = path.join("report.csv");
        if !report.exists() {
            continue;
        }
        let text = fs::read_to_string(&report)?;
        let row = text
            .lines()
            .nth(1)
            .ok_or_else(|| anyhow!("empty report in {}", path.display()))?;
        let mut fields = row.split(',');
        let instance = fields.next().unwrap_or("").to_string();
        let alg = fields.next().unwrap_or("").to_string();
        let inst_doc: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(path.join("instance.json"))?)?;
        let problem = instance_from_json(&inst_doc).map_err(|e| anyhow!("{e}"))?;
        let (_, outer_vrep) = polyhedron_from_json(&serde_json::from_str(&fs::read_to_string(
            path.join("outer.json"),
        )?)?)
        .map_err(|e| anyhow!("{e}"))?;
        let (_, inner_vrep) = polyhedron_from_json(&serde_json::from_str(&fs::read_to_string(
            path.join("inner.json"),
        )?)?)
        .map_err(|e| anyhow!("{e}"))?;
        runs.push(LoadedRun {
            instance,
            alg,
            problem,
            outer_vertices: outer_vrep.vertices,
            inner_vertices: inner_vrep.vertices,
        });
    }
    Ok(runs)
}

fn metrics(a: MetricsArgs) -> Result<()> {
    let mut runs = load_runs(&a.runs)?;
    runs.sort_by(|x, y| (x.instance.clone(), x.alg.clone()).cmp(&(y.instance.clone(), y.alg.clone())));
    let mut csv = String::from("instance,alg,PE,HV_outer,HV_inner,HV_percent\n");
    let ids: Vec<String> = {
        let mut ids: Vec<String> = runs.iter().map(|r| r.instance.clone()).collect();
        ids.dedup();
        ids
    };
    for id in ids {
        let group: Vec<&LoadedRun> = runs.iter().filter(|r| r.instance == id).collect();
        let mut all_points = Vec::new();
        for r in &group {
            all_points.extend(r.outer_vertices.iter().cloned());
            all_points.extend(r.inner_vertices.iter().cloned());
        }
        let cone = &group[0].problem.cone;
        let q_polytope = bounding_polytope(&all_points, cone).map_err(|e| anyhow!("{e}"))?;
        for r in &group {
            let pe = primal_error(&r.outer_vertices, &r.problem)
                .map(|rep| rep.pe)
                .unwrap_or(f64::NAN);
            let hv_o = hypervolume(&r.outer_vertices, &q_polytope, cone).unwrap_or(f64::NAN);
            let hv_i = hypervolume(&r.inner_vertices, &q_polytope, cone).unwrap_or(f64::NAN);
            let hv_pct = if hv_o > 0.0 {
                (100.0 * (hv_o - hv_i) / hv_o).clamp(0.0, 100.0)
            } else {
                f64::NAN
            };
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.instance, r.alg, pe, hv_o, hv_i, hv_pct
            ));
        }
    }
    fs::write(&a.out, &csv)?;
    println!("{}", a.out.display());
    Ok(())
}

fn parse_c(s: &str) -> Result<nalgebra::DVector<f64>> {
    let vals: Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    Ok(nalgebra::DVector::from_column_slice(&vals?))
}

fn dualize(a: DualizeArgs) -> Result<()> {
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&a.r#in)?)?;
    let (hrep, _) = polyhedron_from_json(&doc).map_err(|e| anyhow!("{e}"))?;
    let dd = enumerate_vertices(&hrep).map_err(|e| anyhow!("{e}"))?;
    let out_doc = match a.to.as_str() {
        "lower" => {
            let lower = lower_from_upper(&UpperSet::from_dd(dd)).map_err(|e| anyhow!("{e}"))?;
            polyhedron_to_json(lower.dd.hrep(), lower.dd.vrep())
        }
        "upper" => {
            let upper = upper_from_lower(&LowerCone::from_dd(dd)).map_err(|e| anyhow!("{e}"))?;
            polyhedron_to_json(upper.dd.hrep(), upper.dd.vrep())
        }
        "heyde" => {
            let c = parse_c(
                a.c.as_deref()
                    .ok_or_else(|| anyhow!("--c is required for the fixed-direction frame"))?,
            )?;
            let heyde = heyde_from_conic(&LowerCone::from_dd(dd), &c).map_err(|e| anyhow!("{e}"))?;
            let mut doc = polyhedron_to_json(heyde.dd.hrep(), heyde.dd.vrep());
            doc["c"] = serde_json::json!(heyde.c.iter().copied().collect::<Vec<f64>>());
            doc
        }
        "conic" => {
            let c = parse_c(
                a.c.as_deref()
                    .ok_or_else(|| anyhow!("--c is required for the fixed-direction frame"))?,
            )?;
            let c = &c / c.norm();
            let e_frame =
                cvop_core::duality::orthogonal_frame(&c).map_err(|e| anyhow!("{e}"))?;
            let heyde = HeydeDual { c, e_frame, dd };
            let lower = conic_from_heyde(&heyde).map_err(|e| anyhow!("{e}"))?;
            polyhedron_to_json(lower.dd.hrep(), lower.dd.vrep())
        }
        other => bail!("unknown target `{other}` (lower|upper|heyde|conic)"),
    };
    let text = serde_json::to_string_pretty(&out_doc)?;
    match &a.out {
        Some(path) => {
            fs::write(path, text)?;
            println!("{}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

#[derive(serde::Deserialize)]
struct ExperimentConfig {
    #[serde(default)]
    instances: Vec<String>,
    gen: Option<GenSpec>,
    #[serde(default = "default_cone")]
    cone: String,
    #[serde(default = "default_norm")]
    norm: String,
    protocol: ProtocolSpec,
    out: Option<String>,
}

fn default_cone() -> String {
    "C1".into()
}

fn default_norm() -> String {
    "l2".into()
}

#[derive(serde::Deserialize)]
struct GenSpec {
    n: usize,
    q: usize,
    count: usize,
    seed: u64,
}

#[derive(serde::Deserialize)]
#[serde(tag = "kind")]
enum ProtocolSpec {
    #[serde(rename = "chained")]
    Chained { eps1: f64 },
    #[serde(rename = "simple")]
    Simple { runs: Vec<RunSpec> },
}

#[derive(serde::Deserialize)]
struct RunSpec {
    alg: String,
    eps: Option<f64>,
    time_limit: Option<f64>,
    #[serde(default)]
    break_variant: bool,
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    let cfg: ExperimentConfig = serde_json::from_str(&fs::read_to_string(&a.config)?)?;
    let norm = NormSpec::parse(&cfg.norm).map_err(|e| anyhow!("{e}"))?;
    let mut problems: Vec<ProblemInstance> = Vec::new();
    for path in &cfg.instances {
        problems.push(load_instance(Path::new(path), &Some(cfg.cone.clone()), &Some(cfg.norm.clone()))?);
    }
    if let Some(g) = &cfg.gen {
        let cone = OrderingCone::preset(&cfg.cone, g.q, &norm).map_err(|e| anyhow!("{e}"))?;
        for k in 0..g.count {
            problems.push(
                gen_instance(g.n, g.q, g.seed.wrapping_add(k as u64), cone.clone(), norm.clone())
                    .map_err(|e| anyhow!("{e}"))?,
            );
        }
    }
    if problems.is_empty() {
        bail!("no instances configured");
    }
    let protocol = match &cfg.protocol {
        ProtocolSpec::Chained { eps1 } => Protocol::Chained { eps1: *eps1 },
        ProtocolSpec::Simple { runs } => {
            let mut cells = Vec::new();
            for r in runs {
                let alg = match r.alg.as_str() {
                    "primal" => Algorithm::Primal,
                    "dual" => Algorithm::Dual,
                    other => bail!("unknown algorithm `{other}`"),
                };
                let stop = match (r.eps, r.time_limit) {
                    (Some(eps), None) => StoppingRule::epsilon(eps),
                    (None, Some(t)) => StoppingRule::time_limit(t),
                    _ => bail!("run spec needs exactly one of eps/time_limit"),
                }
                .with_break(r.break_variant);
                cells.push((alg, stop));
            }
            Protocol::Simple(cells)
        }
    };
    let outcome = run_experiment(&problems, &protocol, worker_count());
    let out_dir = a
        .out
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"));
    fs::create_dir_all(&out_dir)?;
    for bundle in &outcome.bundles {
        export_run(&out_dir, bundle)?;
    }
    fs::write(out_dir.join("table.csv"), &outcome.csv)?;
    print!("{}", outcome.csv);
    Ok(())
}
