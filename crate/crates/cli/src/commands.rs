use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use pcalabi::dynamics::FlowSummary;
use pcalabi::geometry::GeometryState;
use pcalabi::mesh::check_euclidean_condition_with;
use pcalabi::{
    curvatures, energy_dirichlet, energy_p_calabi, euler_characteristic, fixtures, integrate, newton_solve,
    parse_mesh, parse_radii, write_mesh, Background, Execution, Exit, FlowError, FlowKind, FlowSpec,
    IntegratorConfig, NewtonConfig, PackingMetric, PotentialContext, SolveStatus, Trajectory, WeightedMesh,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::output::{radii_text, sha256_hex, to_json, write_json};
use crate::{
    EnergyArgs, FixturesArgs, FlowArgs, FlowOptions, InitArgs, SolveArgs, SweepArgs, ValidateArgs, EXIT_USAGE,
};

const RANDOM_RADIUS_RANGE: (f64, f64) = (0.5, 2.0);
const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) | CliError::Io { .. } => 1,
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

/// Exit status of a flow run.
fn flow_exit_code(exit: Exit) -> u8 {
    match exit {
        Exit::Converged => 0,
        Exit::HorizonReached => 2,
        Exit::BlowUp | Exit::Degenerate => 3,
    }
}

/// Existing path, or a fixture name under `$CPM_FIXTURES` (with or without `.cpmesh`).
fn resolve_mesh(path: &Path) -> Result<PathBuf, CliError> {
    if path.exists() {
        return Ok(path.to_path_buf());
    }
    if let Some(dir) = std::env::var_os("CPM_FIXTURES") {
        let base = PathBuf::from(dir).join(path);
        for candidate in [base.clone(), base.with_extension("cpmesh")] {
            if candidate.is_file() {
                return Ok(candidate);
            }
        }
    }
    Err(CliError::Input(format!(
        "mesh `{}` not found (fixture names are looked up in $CPM_FIXTURES)",
        path.display()
    )))
}

struct LoadedMesh {
    path: PathBuf,
    sha256: String,
    mesh: WeightedMesh,
}

fn load_mesh(path: &Path) -> Result<LoadedMesh, CliError> {
    let path = resolve_mesh(path)?;
    let bytes = fs::read(&path).map_err(io_err(format!("reading {}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Input(format!("{}: mesh file is not UTF-8", path.display())))?;
    let mesh = parse_mesh(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(LoadedMesh { sha256: sha256_hex(&bytes), path, mesh })
}

/// How the initial radii were chosen, as recorded in the manifest.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "source", rename_all = "camelCase")]
enum InitRecord {
    File { path: String, sha256: String },
    Uniform { value: f64 },
    Random { seed: u64, low: f64, high: f64 },
}

fn random_radii(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(RANDOM_RADIUS_RANGE.0..RANDOM_RADIUS_RANGE.1)).collect()
}

fn read_radii(path: &Path, n: usize) -> Result<(Vec<f64>, InitRecord), CliError> {
    let bytes = fs::read(path).map_err(io_err(format!("reading {}", path.display())))?;
    let text = String::from_utf8_lossy(&bytes);
    let radii = parse_radii(&text, n).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((radii, InitRecord::File { path: path.display().to_string(), sha256: sha256_hex(&bytes) }))
}

fn initial_radii(init: &InitArgs, n: usize, random_by_default: bool) -> Result<(Vec<f64>, InitRecord), CliError> {
    if let Some(path) = &init.radii {
        return read_radii(path, n);
    }
    if let Some(value) = init.uniform {
        if !(value.is_finite() && value > 0.0) {
            return Err(CliError::Usage(format!("--uniform must be positive, got {value}")));
        }
        return Ok((vec![value; n], InitRecord::Uniform { value }));
    }
    if init.random || random_by_default {
        let (low, high) = RANDOM_RADIUS_RANGE;
        return Ok((random_radii(n, init.seed), InitRecord::Random { seed: init.seed, low, high }));
    }
    Ok((vec![1.0; n], InitRecord::Uniform { value: 1.0 }))
}

fn metric(radii: Vec<f64>, bg: Background) -> Result<PackingMetric, CliError> {
    PackingMetric::new(radii, bg).map_err(|e| CliError::Input(format!("initial metric: {e}")))
}

pub fn validate(args: &ValidateArgs) -> Result<u8, CliError> {
    let loaded = match load_mesh(&args.mesh) {
        Ok(l) => l,
        Err(e) => {
            println!("invalid: {e}");
            return Ok(1);
        }
    };
    let m = &loaded.mesh;
    let t = m.topology();
    println!(
        "N={} E={} F={} chi={} ok",
        t.vertex_count(),
        t.edge_count(),
        t.face_count(),
        euler_characteristic(t)
    );
    let (lo, hi) = m.weights().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &w| (a.min(w), b.max(w)));
    println!("weights: min={lo} max={hi}");
    println!("manifold: closed, every edge borders exactly two face sides");
    if args.euclidean {
        match check_euclidean_condition_with(m, args.cap, Execution::default()) {
            Ok(rep) if rep.holds => {
                println!("existence condition: holds ({} subsets checked)", rep.subsets_checked)
            }
            Ok(rep) => println!("existence condition: violated by subset {:?}", rep.witness.unwrap_or_default()),
            Err(e) => println!("existence condition: skipped ({e})"),
        }
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    command_line: &'a [String],
    tool_version: &'static str,
    mesh_path: String,
    mesh_sha256: &'a str,
    flow: FlowKind,
    p: f64,
    background: Background,
    normalized_initial_product: bool,
    integrator: IntegratorConfig,
    initial_radii: InitRecord,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct FlowReport {
    #[serde(flatten)]
    summary: FlowSummary,
    rejected_steps: usize,
    target_curvature: f64,
    final_time: f64,
    final_radii: Vec<f64>,
    final_curvatures: Vec<f64>,
}

fn check_p(p: f64) -> Result<(), CliError> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--p must be a finite number greater than 1, got {p}")))
    }
}

fn integrator_config(o: &FlowOptions) -> IntegratorConfig {
    let a = &o.integrator;
    IntegratorConfig {
        method: a.method,
        dt: a.dt,
        t_max: a.t_max,
        abs_tol: a.abs_tol,
        rel_tol: a.rel_tol,
        stop_curvature_tol: a.tol,
        sample_every: a.sample_every,
        max_steps: a.max_steps,
    }
}

fn classify(e: FlowError) -> CliError {
    match e {
        FlowError::Initial(g) => CliError::Input(format!("initial metric: {g}")),
        FlowError::NonFinite => CliError::Input(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

/// Everything one flow run needs besides the mesh.
struct FlowJob {
    p: f64,
    radii: Vec<f64>,
    init: InitRecord,
    seed: u64,
    out: PathBuf,
}

struct FlowOutcome {
    trajectory: Trajectory,
    report: FlowReport,
}

fn run_flow(
    loaded: &LoadedMesh,
    options: &FlowOptions,
    job: &FlowJob,
    argv: &[String],
) -> Result<FlowOutcome, CliError> {
    let m = &loaded.mesh;
    let bg = options.background;
    let kind = options.flow;
    let p_family = matches!(kind, FlowKind::PCalabi | FlowKind::PCalabiNormalized | FlowKind::GraphPCalabi);
    let normalize = bg == Background::Euclidean && p_family && !options.no_normalize;

    let mut start = metric(job.radii.clone(), bg)?;
    if normalize {
        start = start.normalized_product();
    }
    let spec = match kind {
        FlowKind::GraphPCalabi => {
            if bg != Background::Euclidean {
                return Err(CliError::Usage("graph-p-calabi runs in the Euclidean background only".into()));
            }
            let b = GeometryState::assemble(m, &start).map_err(|e| CliError::Input(format!("initial metric: {e}")))?.b;
            FlowSpec::graph(job.p, b, None)
        }
        _ => FlowSpec::new(kind, job.p, bg),
    };
    spec.validate(m).map_err(classify)?;
    let cfg = integrator_config(options);
    let u0 = start.to_u();
    let tr = integrate(m, &u0, &spec, &cfg).map_err(classify)?;

    fs::create_dir_all(&job.out).map_err(io_err(format!("creating {}", job.out.display())))?;
    let manifest = RunManifest {
        command_line: argv,
        tool_version: TOOL_VERSION,
        mesh_path: loaded.path.display().to_string(),
        mesh_sha256: &loaded.sha256,
        flow: kind,
        p: job.p,
        background: bg,
        normalized_initial_product: normalize,
        integrator: cfg,
        initial_radii: job.init.clone(),
        seed: job.seed,
    };
    let path = job.out.join("manifest.json");
    write_json(&path, &manifest).map_err(io_err(format!("writing {}", path.display())))?;

    let path = job.out.join("trajectory.csv");
    let file = fs::File::create(&path).map_err(io_err(format!("creating {}", path.display())))?;
    tr.write_csv(BufWriter::new(file)).map_err(io_err(format!("writing {}", path.display())))?;

    let last = tr.last();
    let final_radii = pcalabi::geometry::metric_from_u(&last.u, bg)
        .map(|m| m.radii().to_vec())
        .map_err(|e| CliError::Input(format!("final metric: {e}")))?;
    let path = job.out.join("final.radii");
    fs::write(&path, radii_text(&final_radii)).map_err(io_err(format!("writing {}", path.display())))?;

    let report = FlowReport {
        summary: tr.summary(),
        rejected_steps: tr.rejected_steps,
        target_curvature: tr.target,
        final_time: last.t,
        final_radii,
        final_curvatures: last.k.clone(),
    };
    let path = job.out.join("summary.json");
    write_json(&path, &report).map_err(io_err(format!("writing {}", path.display())))?;
    Ok(FlowOutcome { trajectory: tr, report })
}

pub fn flow(args: &FlowArgs, argv: &[String]) -> Result<u8, CliError> {
    check_p(args.p)?;
    let loaded = load_mesh(&args.mesh)?;
    let (radii, init) = initial_radii(&args.init, loaded.mesh.vertex_count(), true)?;
    let job = FlowJob { p: args.p, radii, init, seed: args.init.seed, out: args.out.clone() };
    let outcome = run_flow(&loaded, &args.options, &job, argv)?;
    print!("{}", to_json(&outcome.report));
    Ok(flow_exit_code(outcome.trajectory.exit))
}

#[derive(Debug, Serialize)]
struct SweepEntry {
    directory: String,
    p: f64,
    seed: u64,
    exit: Option<Exit>,
    steps_taken: Option<usize>,
    final_max_curvature_error: Option<f64>,
    error: Option<String>,
}

pub fn sweep(args: &SweepArgs, argv: &[String]) -> Result<u8, CliError> {
    for &p in &args.p {
        check_p(p)?;
    }
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let loaded = load_mesh(&args.mesh)?;
    let n = loaded.mesh.vertex_count();
    let mut jobs = Vec::new();
    for &p in &args.p {
        for seed in args.seed..args.seed + args.runs {
            let dir = args.out.join(format!("run_{:03}_p{p}_seed{seed}", jobs.len()));
            let init = InitRecord::Random { seed, low: RANDOM_RADIUS_RANGE.0, high: RANDOM_RADIUS_RANGE.1 };
            jobs.push(FlowJob { p, radii: random_radii(n, seed), init, seed, out: dir });
        }
    }
    let results = run_batch(&jobs, args.jobs, |job| run_flow(&loaded, &args.options, job, argv));

    let mut worst = 0u8;
    let entries: Vec<SweepEntry> = jobs
        .iter()
        .zip(results)
        .map(|(job, res)| (job.out.display().to_string(), job.p, job.seed, res))
        .map(|(directory, p, seed, res)| match res {
            Ok(o) => {
                worst = worst.max(flow_exit_code(o.trajectory.exit));
                SweepEntry {
                    directory,
                    p,
                    seed,
                    exit: Some(o.trajectory.exit),
                    steps_taken: Some(o.trajectory.steps_taken),
                    final_max_curvature_error: Some(o.trajectory.final_max_curvature_error),
                    error: None,
                }
            }
            Err(e) => {
                worst = worst.max(e.exit_code());
                SweepEntry {
                    directory,
                    p,
                    seed,
                    exit: None,
                    steps_taken: None,
                    final_max_curvature_error: None,
                    error: Some(e.to_string()),
                }
            }
        })
        .collect();
    fs::create_dir_all(&args.out).map_err(io_err(format!("creating {}", args.out.display())))?;
    let path = args.out.join("sweep.json");
    write_json(&path, &entries).map_err(io_err(format!("writing {}", path.display())))?;
    print!("{}", to_json(&entries));
    Ok(worst)
}

/// Runs independent jobs, on `threads` workers when the parallel feature is on.
fn run_batch<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if threads > 1 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            return pool.install(|| Execution::Parallel.map(items, f));
        }
    }
    #[cfg(not(feature = "parallel"))]
    if threads > 1 {
        eprintln!("warning: built without the parallel feature; running {} jobs sequentially", items.len());
    }
    Execution::Sequential.map(items, f)
}

#[derive(Debug, Serialize)]
struct SolveOutput {
    status: SolveStatus,
    background: Background,
    iterations: usize,
    final_gradient_norm: f64,
    max_curvature_error: Option<f64>,
    solution_radii: Option<Vec<f64>>,
    regularized: bool,
    mesh_sha256: String,
}

pub fn solve(args: &SolveArgs) -> Result<u8, CliError> {
    let loaded = load_mesh(&args.mesh)?;
    let m = &loaded.mesh;
    let n = m.vertex_count();
    let bg = args.background;
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", args.tol)));
    }
    let radii = match args.init.as_str() {
        "uniform" => vec![1.0; n],
        "random" => random_radii(n, args.seed),
        path => read_radii(Path::new(path), n)?.0,
    };
    let u0 = metric(radii, bg)?.to_u();
    let ctx = PotentialContext::new(m, bg);
    let cfg = NewtonConfig { tol: args.tol, max_iter: args.max_iter, ..Default::default() };
    let rep = newton_solve(&ctx, &u0, &cfg).map_err(|e| CliError::Input(e.to_string()))?;
    let radii = rep.solution_radii();
    let max_curvature_error = match &radii {
        Some(r) => Some(
            curvatures(m, &metric(r.clone(), bg)?)
                .map_err(|e| CliError::Input(e.to_string()))?
                .max_curvature_error(),
        ),
        None => None,
    };
    let out = SolveOutput {
        status: rep.status,
        background: bg,
        iterations: rep.iterations,
        final_gradient_norm: rep.final_gradient_norm,
        max_curvature_error,
        solution_radii: radii,
        regularized: rep.regularized,
        mesh_sha256: loaded.sha256.clone(),
    };
    let text = to_json(&out);
    if let Some(path) = &args.out {
        fs::write(path, &text).map_err(io_err(format!("writing {}", path.display())))?;
    }
    print!("{text}");
    Ok(if rep.status == SolveStatus::Found { 0 } else { 4 })
}

#[derive(Debug, Serialize)]
struct EnergyOutput {
    #[serde(rename = "K")]
    k: Vec<f64>,
    k_av: f64,
    target_curvature: f64,
    #[serde(rename = "E_p")]
    e_p: f64,
    dirichlet_e: f64,
    gauss_bonnet_residual: f64,
    p: f64,
    background: Background,
}

pub fn energy(args: &EnergyArgs) -> Result<u8, CliError> {
    check_p(args.p)?;
    let loaded = load_mesh(&args.mesh)?;
    let m = &loaded.mesh;
    let (radii, _) = initial_radii(&args.init, m.vertex_count(), false)?;
    let metric = metric(radii, args.background)?;
    let state = GeometryState::assemble(m, &metric).map_err(|e| CliError::Input(e.to_string()))?;
    let c = &state.curvatures;
    let target = c.target();
    let out = EnergyOutput {
        k: c.k.clone(),
        k_av: c.k_av,
        target_curvature: target,
        e_p: energy_p_calabi(&c.k, target, args.p),
        dirichlet_e: energy_dirichlet(m.topology(), &c.k, &state.b, args.p),
        gauss_bonnet_residual: c.gauss_bonnet_residual(euler_characteristic(m.topology())),
        p: args.p,
        background: args.background,
    };
    print!("{}", to_json(&out));
    Ok(0)
}

pub fn fixtures(args: &FixturesArgs) -> Result<u8, CliError> {
    fs::create_dir_all(&args.out).map_err(io_err(format!("creating {}", args.out.display())))?;
    for (name, mesh) in fixtures::catalog() {
        let path = args.out.join(format!("{name}.cpmesh"));
        fs::write(&path, write_mesh(&mesh)).map_err(io_err(format!("writing {}", path.display())))?;
        println!("{}", path.display());
    }
    let path = args.out.join("tetrahedron_perturbed.radii");
    fs::write(&path, pcalabi::write_radii(&fixtures::PERTURBED_TETRA_RADII))
        .map_err(io_err(format!("writing {}", path.display())))?;
    println!("{}", path.display());
    Ok(0)
}
