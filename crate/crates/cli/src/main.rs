mod error;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use loopcut::basis::{basis_for, RootChoice, GLOBAL_VERTEX_CAP};
use loopcut::bench::{fit_exponent, growth_bench, GrowthConfig, GROWTH_HEADER};
use loopcut::detach::{detach_all, loops_are_disjoint, RefineConfig, Strategy};
use loopcut::mesh::{load_mesh, save_mesh, MeshError};
use loopcut::metrics::{hausdorff, TableRow, DEFAULT_SAMPLE_DENSITY, TABLE_HEADER};
use loopcut::par::{self, Execution};
use loopcut::schema::{cut_along, layout_canonical, map_point, LoopCopy, SchemaLayout};
use loopcut::{synth, LoopSystem, TriMesh};

use error::{CliError, EXIT_CODES_HELP};

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\nalgorithm defaults:",
    "\n  strategy           hybrid",
    "\n  planarity-deg      5",
    "\n  lambda             0.75 (halved up to 30 times)",
    "\n  root               random, seed 0",
    "\n  global vertex cap  5000",
    "\n  hausdorff density  10 samples per average triangle area, plus every vertex",
    "\n  layout weights     uniform (Tutte)",
    "\n  snap epsilon       1e-12",
);

#[derive(Parser, Debug)]
#[command(name = "loopcut", version, long_version = LONG_VERSION, after_help = EXIT_CODES_HELP)]
/// Greedy homotopy bases, loop detachment and canonical polygonal schemas.
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a greedy system of loops.
    Basis(BasisArgs),
    /// Refine the mesh until the loops meet only at the origin.
    Detach(DetachArgs),
    /// Cut the mesh open along disjoint loops.
    Cut(CutArgs),
    /// Embed the cut mesh on the regular 4g-gon.
    Layout(LayoutArgs),
    /// Map points from one layout to another through the shared polygon.
    Map(MapArgs),
    /// Sampled symmetric Hausdorff distance between two meshes.
    Hausdorff(HausdorffArgs),
    /// Generate a polycube chain of the given genus.
    GenPolycube(GenArgs),
    /// Growth sweep over polycube chains.
    Bench(BenchArgs),
    /// Print mesh, loop and report statistics as JSON.
    Stats(StatsArgs),
}

#[derive(Args, Debug)]
struct RootArgs {
    /// Vertex index, `random` or `global`.
    #[arg(long, default_value = "random")]
    root: String,
    /// Seed for `--root random`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Vertex cap for `--root global`.
    #[arg(long, default_value_t = GLOBAL_VERTEX_CAP)]
    global_cap: usize,
}

impl RootArgs {
    fn choice(&self) -> Result<RootChoice, CliError> {
        match self.root.as_str() {
            "random" => Ok(RootChoice::Random(self.seed)),
            "global" => Ok(RootChoice::Global),
            s => s
                .parse()
                .map(RootChoice::Index)
                .map_err(|_| CliError::Usage(format!("--root expects a vertex index, `random` or `global`, got {s:?}"))),
        }
    }
}

#[derive(Args, Debug)]
struct BasisArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[command(flatten)]
    root: RootArgs,
    /// Loop file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RefineArgs {
    #[arg(long, default_value = "hybrid", value_parser = parse_strategy)]
    strategy: Strategy,
    #[arg(long, default_value_t = 5.0)]
    planarity_deg: f64,
    #[arg(long, default_value_t = 0.75)]
    lambda: f64,
    /// Abort when the estimated mesh size passes this many MiB.
    #[arg(long)]
    mem_cap_mb: Option<usize>,
    /// Abort after this many operators.
    #[arg(long)]
    max_ops: Option<usize>,
}

impl RefineArgs {
    fn config(&self, record_ops: bool) -> RefineConfig {
        RefineConfig {
            strategy: self.strategy,
            planarity_threshold_deg: self.planarity_deg,
            lambda_init: self.lambda,
            mem_cap_bytes: self.mem_cap_mb.map(|m| m.saturating_mul(1 << 20)),
            max_operations: self.max_ops,
            record_ops,
        }
    }
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

#[derive(Args, Debug)]
struct DetachArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    loops: PathBuf,
    #[command(flatten)]
    refine: RefineArgs,
    #[arg(long)]
    out_mesh: PathBuf,
    #[arg(long)]
    out_loops: PathBuf,
    /// Refinement report (JSON).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Include the per-operator log in the report.
    #[arg(long)]
    ops: bool,
    /// Append a results-table row to this CSV (header written when new).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Model name for the CSV row; defaults to the mesh file stem.
    #[arg(long)]
    model: Option<String>,
    /// Skip the Hausdorff columns of the CSV row.
    #[arg(long)]
    no_hausdorff: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_DENSITY)]
    density: f64,
}

#[derive(Args, Debug)]
struct CutArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    loops: PathBuf,
    /// Opened disk mesh to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct LayoutArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    loops: PathBuf,
    /// Layout OBJ (z = 0).
    #[arg(long)]
    out: PathBuf,
    /// Provenance sidecar; defaults to the OBJ path with a `.json` extension.
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MapArgs {
    #[arg(long)]
    from: PathBuf,
    #[arg(long)]
    from_sidecar: Option<PathBuf>,
    #[arg(long)]
    to: PathBuf,
    #[arg(long)]
    to_sidecar: Option<PathBuf>,
    /// Rotate by this many polygon sides; taken modulo 4g.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    rotation: i64,
    /// CSV of `u,v` polygon points on the source layout.
    #[arg(long, conflicts_with = "samples")]
    points: Option<PathBuf>,
    /// Map this many random points of the source layout instead.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct HausdorffArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_DENSITY)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    genus: usize,
    #[arg(long, default_value_t = 1)]
    cells: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value_t = 1)]
    genus_min: usize,
    #[arg(long, default_value_t = 20)]
    genus_max: usize,
    #[arg(long, default_value_t = 1)]
    cells: usize,
    /// Comma-separated strategies.
    #[arg(long, default_value = "vertex,hybrid,edge", value_delimiter = ',', value_parser = parse_strategy)]
    strategies: Vec<Strategy>,
    #[arg(long, default_value_t = 5.0)]
    planarity_deg: f64,
    #[arg(long, default_value_t = 0.75)]
    lambda: f64,
    /// Per-run cap on the estimated mesh size, in MiB.
    #[arg(long)]
    mem_cap_mb: Option<usize>,
    #[command(flatten)]
    root: RootArgs,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Parallel jobs; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    loops: Option<PathBuf>,
    /// Refinement report to check against the cost model.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn load(path: &Path) -> Result<TriMesh, CliError> {
    load_mesh(path, None).map_err(|e| match e {
        MeshError::Io(io) => CliError::io(path, io),
        e => CliError::Mesh(e),
    })
}

fn read_loops(path: &Path, mesh: &TriMesh) -> Result<LoopSystem, CliError> {
    Ok(LoopSystem::from_text(&read(path)?)?.with_lengths(mesh))
}

fn sidecar(obj: &Path, explicit: &Option<PathBuf>) -> PathBuf {
    explicit.clone().unwrap_or_else(|| obj.with_extension("json"))
}

fn print_json(value: &impl Serialize) -> Result<(), CliError> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn cmd_basis(a: &BasisArgs) -> Result<(), CliError> {
    let mesh = load(&a.mesh)?;
    let system = basis_for(&mesh, a.root.choice()?, a.root.global_cap, Execution::Parallel)?;
    write(&a.out, &system.to_text())?;
    print_json(&json!({
        "origin": system.origin,
        "loops": system.loops.len(),
        "total_length": system.total_length(),
    }))
}

fn cmd_detach(a: &DetachArgs) -> Result<(), CliError> {
    let config = a.refine.config(a.ops);
    config.validate()?;
    let mesh = load(&a.mesh)?;
    let system = read_loops(&a.loops, &mesh)?;
    let start = Instant::now();
    let (out, out_system, report) = detach_all(&mesh, &system, &config)?;
    let runtime = start.elapsed().as_secs_f64();
    save_mesh(&out, &a.out_mesh, None)?;
    write(&a.out_loops, &out_system.to_text())?;
    if let Some(path) = &a.report {
        write(path, &serde_json::to_string_pretty(&report)?)?;
    }
    if let Some(path) = &a.csv {
        let h = if a.no_hausdorff {
            None
        } else {
            Some(hausdorff(&mesh, &out, a.density, a.seed, Execution::Parallel)?)
        };
        let model = a
            .model
            .clone()
            .unwrap_or_else(|| a.mesh.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
        let row =
            TableRow::from_run(&model, &mesh, mesh.genus()?, &out, &report, config.planarity_threshold_deg, h, runtime);
        append_row(path, &row.to_csv())?;
    }
    print_json(&json!({
        "vertices": [mesh.num_vertices(), out.num_vertices()],
        "triangles": [mesh.num_triangles(), out.num_triangles()],
        "operations": report.operations(),
        "disjoint": loops_are_disjoint(&out_system),
    }))
}

fn append_row(path: &Path, row: &str) -> Result<(), CliError> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path).map_err(|e| CliError::io(path, e))?;
    let mut text = String::new();
    if fresh {
        text.push_str(TABLE_HEADER);
        text.push('\n');
    }
    text.push_str(row);
    text.push('\n');
    f.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))
}

fn cmd_cut(a: &CutArgs) -> Result<(), CliError> {
    let mesh = load(&a.mesh)?;
    let system = read_loops(&a.loops, &mesh)?;
    let cut = cut_along(&mesh, &system)?;
    save_mesh(&cut.disk, &a.out, None)?;
    let word: Vec<String> = cut
        .word()
        .iter()
        .map(|(l, c)| if *c == LoopCopy::Forward { l.to_string() } else { format!("{l}'") })
        .collect();
    print_json(&json!({
        "euler_characteristic": cut.disk.euler_characteristic(),
        "boundary_vertices": cut.boundary.len(),
        "arcs": cut.arcs.len(),
        "word": word.join(" "),
        "canonical_word": cut.is_canonical_word(),
        "corner_classes": cut.glued_corner_classes(),
    }))
}

fn cmd_layout(a: &LayoutArgs) -> Result<(), CliError> {
    let mesh = load(&a.mesh)?;
    let system = read_loops(&a.loops, &mesh)?;
    let cut = cut_along(&mesh, &system)?;
    let layout = layout_canonical(&cut)?;
    layout.save(&a.out, sidecar(&a.out, &a.sidecar))?;
    print_json(&json!({
        "sides": layout.sides(),
        "vertices": layout.uv.len(),
        "triangles": layout.num_triangles(),
        "flipped": layout.flipped_triangles(),
    }))
}

fn cmd_map(a: &MapArgs) -> Result<(), CliError> {
    let la = SchemaLayout::load(&a.from, sidecar(&a.from, &a.from_sidecar))?;
    let lb = SchemaLayout::load(&a.to, sidecar(&a.to, &a.to_sidecar))?;
    let sources: Vec<(usize, [f64; 3])> = match &a.points {
        Some(path) => parse_points(&read(path)?)?
            .into_iter()
            .map(|p| la.grid().locate(p).ok_or(CliError::Input(format!("point ({}, {}) is outside the polygon", p[0], p[1]))))
            .collect::<Result<_, _>>()?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..a.samples)
                .map(|_| {
                    let t = rng.random_range(0..la.num_triangles());
                    let (mut r1, mut r2) = (rng.random::<f64>(), rng.random::<f64>());
                    if r1 + r2 > 1.0 {
                        r1 = 1.0 - r1;
                        r2 = 1.0 - r2;
                    }
                    (t, [1.0 - r1 - r2, r1, r2])
                })
                .collect()
        }
    };
    let mut out = String::from("t_a,a0,a1,a2,u_a,v_a,x_a,y_a,z_a,t_b,b0,b1,b2,u_b,v_b,x_b,y_b,z_b\n");
    for &(t, w) in &sources {
        let (tb, wb) = map_point(&la, &lb, (t, w), a.rotation)?;
        let (pa, pb) = (la.point_2d(t, w), lb.point_2d(tb, wb));
        let (qa, qb) = (la.point_3d(t, w), lb.point_3d(tb, wb));
        let fields: Vec<String> = [t as f64]
            .into_iter()
            .chain(w)
            .chain(pa)
            .chain(qa)
            .chain([tb as f64])
            .chain(wb)
            .chain(pb)
            .chain(qb)
            .map(|x| x.to_string())
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    write(&a.out, &out)?;
    print_json(&json!({ "points": sources.len(), "rotation": a.rotation.rem_euclid(la.sides() as i64) }))
}

fn parse_points(text: &str) -> Result<Vec<[f64; 2]>, CliError> {
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match f.as_slice() {
            [u, v] => u.parse::<f64>().ok().zip(v.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some((u, v)) => pts.push([u, v]),
            // tolerate a header line
            None if i == 0 => {}
            None => return Err(CliError::Input(format!("points line {}: expected `u,v`", i + 1))),
        }
    }
    Ok(pts)
}

fn cmd_hausdorff(a: &HausdorffArgs) -> Result<(), CliError> {
    let ma = load(&a.a)?;
    let mb = load(&a.b)?;
    print_json(&hausdorff(&ma, &mb, a.density, a.seed, Execution::Parallel)?)
}

fn cmd_gen(a: &GenArgs) -> Result<(), CliError> {
    let mesh = synth::polycube_chain(a.genus, a.cells)?;
    save_mesh(&mesh, &a.out, None)?;
    print_json(&json!({ "genus": a.genus, "vertices": mesh.num_vertices(), "triangles": mesh.num_triangles() }))
}

fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    if a.genus_min == 0 || a.genus_min > a.genus_max {
        return Err(CliError::Usage(format!("bad genus range {}..={}", a.genus_min, a.genus_max)));
    }
    let refine = RefineConfig {
        planarity_threshold_deg: a.planarity_deg,
        lambda_init: a.lambda,
        mem_cap_bytes: a.mem_cap_mb.map(|m| m.saturating_mul(1 << 20)),
        ..Default::default()
    };
    refine.validate()?;
    let cfg = GrowthConfig {
        genus_min: a.genus_min,
        genus_max: a.genus_max,
        cells_per_edge: a.cells,
        strategies: a.strategies.clone(),
        refine,
        root: a.root.choice()?,
    };
    let exec = if a.jobs == Some(1) { Execution::Sequential } else { Execution::Parallel };
    let rows = par::with_threads(a.jobs, || growth_bench(&cfg, exec));
    let mut csv = format!("{GROWTH_HEADER}\n");
    for r in &rows {
        csv.push_str(&r.to_csv());
        csv.push('\n');
    }
    match &a.csv {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    let fits: Vec<_> = cfg
        .strategies
        .iter()
        .map(|s| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.strategy == *s)
                .filter_map(|r| r.growth_pct.map(|y| (r.genus as f64, y)))
                .unzip();
            let failed = rows.iter().filter(|r| r.strategy == *s && !r.is_ok()).count();
            json!({ "strategy": s.name(), "exponent": fit_exponent(&xs, &ys), "failed_runs": failed })
        })
        .collect();
    let summary = serde_json::to_string_pretty(&fits)?;
    if a.csv.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn cmd_stats(a: &StatsArgs) -> Result<(), CliError> {
    let mesh = load(&a.mesh)?;
    let mut out = json!({
        "vertices": mesh.num_vertices(),
        "triangles": mesh.num_triangles(),
        "edges": mesh.num_edges(),
        "euler_characteristic": mesh.euler_characteristic(),
        "genus": mesh.genus()?,
    });
    if let Some(path) = &a.loops {
        let system = read_loops(path, &mesh)?;
        out["loops"] = json!({
            "origin": system.origin,
            "count": system.loops.len(),
            "total_length": system.total_length(),
            "valid": system.validate(&mesh).is_ok(),
            "disjoint": loops_are_disjoint(&system),
        });
    }
    if let Some(path) = &a.report {
        let report: loopcut::RefinementReport = serde_json::from_str(&read(path)?)?;
        let mut r = serde_json::to_value(&report)?;
        r["operations"] = json!(report.operations());
        r["cost_model_ok"] = json!(report.new_triangles == 2 * report.new_vertices);
        out["report"] = r;
    }
    print_json(&out)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Basis(a) => cmd_basis(a),
        Command::Detach(a) => cmd_detach(a),
        Command::Cut(a) => cmd_cut(a),
        Command::Layout(a) => cmd_layout(a),
        Command::Map(a) => cmd_map(a),
        Command::Hausdorff(a) => cmd_hausdorff(a),
        Command::GenPolycube(a) => cmd_gen(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Stats(a) => cmd_stats(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
