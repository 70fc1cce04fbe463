use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use symcomp::bounds::{self, BoundCurvePoint};
use symcomp::combinatorics::PartitionShape;
use symcomp::compression;
use symcomp::entanglement::{gme, GmeOptions};
use symcomp::noise::{self, NoiseParams};
use symcomp::optimizer::{self, OptimizerConfig};
use symcomp::states::WeightedDickeState;

#[derive(Parser)]
#[command(name = "symcomp", version, about = "Entanglement and compression of symmetric multiqubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entanglement-rate curves: optimized, comb, Dicke and bound series.
    Curve(CurveArgs),
    /// Per-partition geometric entanglement of optimized and Dicke states.
    Table(TableArgs),
    /// Geometric entanglement of a state file across one partition.
    Gme(GmeArgs),
    /// Log-negativity sweep under depolarizing transmission noise.
    Noise(NoiseArgs),
    /// Upper, lower and AME bound points.
    Bounds(BoundsArgs),
    /// Compression isometry or its unitary completion for one block size.
    Isometry(IsometryArgs),
}

#[derive(Args, Serialize)]
struct SearchArgs {
    #[arg(long, default_value_t = 3)]
    kmax: usize,
    /// Ascent restarts per support.
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SearchArgs {
    fn config(&self, n: usize, m: usize) -> OptimizerConfig {
        OptimizerConfig { k_max: self.kmax, inner_restarts: self.restarts, seed: self.seed, ..OptimizerConfig::new(n, m) }
    }
}

#[derive(Args, Serialize)]
struct CurveArgs {
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[command(flatten)]
    #[serde(flatten)]
    search: SearchArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct TableArgs {
    #[arg(long, default_value_t = 3)]
    n_min: usize,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[command(flatten)]
    #[serde(flatten)]
    search: SearchArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct GmeArgs {
    #[arg(long)]
    state_file: PathBuf,
    /// Block sizes, comma separated, e.g. `1,2,3`.
    #[arg(long)]
    lambda: String,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct NoiseArgs {
    /// Hardware parameters as JSON; defaults to the built-in device.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input state as JSON; defaults to the bipartite optimizer's best n=6 state.
    #[arg(long)]
    state_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    p_min: f64,
    #[arg(long, default_value_t = 0.3)]
    p_max: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the ideal encoded register state in plain-text matrix form.
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// GME restarts for the lower-bound oracle when m > 2.
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct IsometryArgs {
    #[arg(long)]
    c: usize,
    /// Dump the full unitary completion instead of the isometry.
    #[arg(long)]
    unitary: bool,
    #[arg(long)]
    dump_matrix: PathBuf,
}

type CliResult<T> = Result<T, String>;

#[derive(Serialize)]
struct RunManifest {
    command: String,
    config: Value,
    seed: Option<u64>,
    version: &'static str,
    duration_s: f64,
    outputs: Vec<String>,
}

/// Writes through a sibling temp file and renames over the target.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let name = path.file_name().ok_or_else(|| format!("{}: not a file path", path.display()))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| format!("{}: {e}", tmp.display()))?;
    fs::rename(&tmp, path).map_err(|e| format!("{}: {e}", path.display()))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

struct Run {
    command: &'static str,
    started: Instant,
    outputs: Vec<PathBuf>,
}

impl Run {
    fn new(command: &'static str) -> Self {
        Run { command, started: Instant::now(), outputs: Vec::new() }
    }

    fn emit(&mut self, out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
        match out {
            Some(path) => {
                write_atomic(path, bytes)?;
                self.outputs.push(path.to_path_buf());
                Ok(())
            }
            None => std::io::stdout().write_all(bytes).map_err(|e| e.to_string()),
        }
    }

    /// Writes `<first output>.manifest.json` when any file was produced.
    fn finish(self, config: Value, seed: Option<u64>) -> CliResult<()> {
        let Some(first) = self.outputs.first() else { return Ok(()) };
        let manifest = RunManifest {
            command: self.command.into(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            duration_s: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs.iter().map(|p| p.display().to_string()).collect(),
        };
        let body = serde_json::to_vec_pretty(&manifest).map_err(|e| e.to_string())?;
        write_atomic(&manifest_path(first), &body)
    }
}

fn lib(e: symcomp::Error) -> String {
    e.to_string()
}

fn csv<F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>>(f: F) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| e.to_string())?;
    Ok(buf)
}

fn echo<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

fn check_range(n_min: usize, n_max: usize, m: usize) -> CliResult<()> {
    if n_min > n_max {
        return Err(format!("--n-min {n_min} exceeds --n-max {n_max}"));
    }
    if m < 2 || m > n_min {
        return Err(format!("--m {m} must satisfy 2 <= m <= n-min ({n_min})"));
    }
    Ok(())
}

fn read_state(path: &Path) -> CliResult<WeightedDickeState> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_curve(args: &CurveArgs) -> CliResult<()> {
    check_range(args.n_min, args.n_max, args.m)?;
    let mut run = Run::new("curve");
    let points = optimizer::curve(args.n_min..=args.n_max, args.m, &args.search.config(args.n_min, args.m)).map_err(lib)?;
    run.emit(args.out.as_deref(), &csv(|b| optimizer::write_curve_csv(b, &points))?)?;
    run.finish(echo(args), Some(args.search.seed))
}

fn cmd_table(args: &TableArgs) -> CliResult<()> {
    check_range(args.n_min, args.n_max, args.m)?;
    let mut run = Run::new("table");
    let mut rows = Vec::new();
    for n in args.n_min..=args.n_max {
        rows.extend(optimizer::table(&args.search.config(n, args.m)).map_err(lib)?.1);
    }
    run.emit(args.out.as_deref(), &csv(|b| optimizer::write_table_csv(b, &rows))?)?;
    run.finish(echo(args), Some(args.search.seed))
}

fn cmd_gme(args: &GmeArgs) -> CliResult<()> {
    let state = read_state(&args.state_file)?;
    let shape: PartitionShape = args.lambda.parse().map_err(lib)?;
    let opts = GmeOptions::default().with_restarts(args.restarts).with_seed(args.seed);
    let result = gme(&state, &shape, &opts).map_err(lib)?;
    println!("{}", serde_json::to_string_pretty(&result).map_err(|e| e.to_string())?);
    Ok(())
}

fn cmd_noise(args: &NoiseArgs) -> CliResult<()> {
    if !(args.p_min <= args.p_max) {
        return Err(format!("--p-min {} exceeds --p-max {}", args.p_min, args.p_max));
    }
    if args.points < 2 {
        return Err("--points must be at least 2".into());
    }
    let mut run = Run::new("noise");
    let params: NoiseParams = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => NoiseParams::default(),
    };
    let (state, seed) = match &args.state_file {
        Some(path) => (read_state(path)?, None),
        None => {
            let config = OptimizerConfig::new(6, 2);
            (optimizer::search_support(&config).map_err(lib)?.best_state, Some(config.seed))
        }
    };
    let grid = noise::linear_grid(args.p_min, args.p_max, args.points);
    let sweep = noise::sweep_and_crossover(&state, &grid, &params).map_err(lib)?;
    run.emit(args.out.as_deref(), &csv(|b| noise::write_csv(b, &sweep))?)?;
    if let Some(path) = &args.dump_matrix {
        let rho = noise::encoded_state(&state, None).map_err(lib)?;
        write_atomic(path, &csv(|b| compression::write_matrix(b, rho.matrix()))?)?;
        run.outputs.push(path.clone());
    }
    let report = json!({
        "state": state,
        "crossover": sweep.crossover,
        "crossings": sweep.crossings,
        "gate_noise": sweep.gate_noise,
    });
    let line = serde_json::to_string(&report).map_err(|e| e.to_string())?;
    if args.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    let mut config = echo(args);
    config["hardware"] = echo(&params);
    config["state"] = echo(&state);
    run.finish(config, seed)
}

fn cmd_bounds(args: &BoundsArgs) -> CliResult<()> {
    let (n, m) = (args.n, args.m);
    let mut run = Run::new("bounds");
    let mut points: Vec<BoundCurvePoint> = Vec::new();
    if m == 2 {
        points.push(bounds::upper_bound_m2(n, &bounds::universal_rates_m2(n).map_err(lib)?).map_err(lib)?);
        points.push(bounds::lower_bound_m2(n).map_err(lib)?);
        points.push(bounds::ame_curve(n).map_err(lib)?);
    } else {
        points.push(bounds::upper_bound_m(n, m, &bounds::universal_rates(n, m).map_err(lib)?).map_err(lib)?);
        let half = WeightedDickeState::dicke(n, n / 2).map_err(lib)?;
        let opts = GmeOptions::default().with_restarts(args.restarts).with_seed(args.seed);
        points.push(bounds::lower_bound_m(n, m, |s| Ok(gme(&half, s, &opts)?.e_g)).map_err(lib)?);
    }
    run.emit(args.out.as_deref(), &csv(|b| bounds::write_csv(b, &points))?)?;
    run.finish(echo(args), (m > 2).then_some(args.seed))
}

fn cmd_isometry(args: &IsometryArgs) -> CliResult<()> {
    let mut run = Run::new("isometry");
    let matrix = if args.unitary {
        compression::unitary_completion(args.c).map_err(lib)?.unitary
    } else {
        compression::build_isometry(args.c).map_err(lib)?.matrix
    };
    run.emit(Some(&args.dump_matrix), &csv(|b| compression::write_matrix(b, &matrix))?)?;
    run.finish(echo(args), None)
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("SYMCOMP_THREADS") else { return Ok(()) };
    let threads: usize = raw.trim().parse().map_err(|_| format!("SYMCOMP_THREADS={raw:?} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Curve(a) => cmd_curve(a),
        Command::Table(a) => cmd_table(a),
        Command::Gme(a) => cmd_gme(a),
        Command::Noise(a) => cmd_noise(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Isometry(a) => cmd_isometry(a),
    }
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            eprintln!("symcomp: {}", one_line(text.lines().next().unwrap_or("usage error")));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("symcomp: error: {}", one_line(&msg));
            ExitCode::FAILURE
        }
    }
}
