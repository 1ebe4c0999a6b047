use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qapswarm::core::{
    buffer_bytes, evaluate_cost, Assignment, PsoCoefficients, QapInstance, SolverConfig, StatsOptions, SvMode, SxMode,
};
use qapswarm::export::export_swarm_csv;
use qapswarm::{export_csv, io, run, RunResult};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "qapswarm", version, about = "Multi-swarm discrete PSO for the quadratic assignment problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance, once per seed repeat.
    Solve(SolveArgs),
    /// Check a solution file's declared cost against the instance.
    Validate {
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Run every line of a run list; each line is an instance path followed
    /// by `solve` flags. Blank lines and lines starting with `#` are skipped.
    Sweep {
        runs: PathBuf,
        /// Directory receiving sweep_results.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Reference solution (.sln) used for the gap. Defaults to the `.sln`
    /// file next to the instance, if present.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Reference value used for the gap; overrides --reference.
    #[arg(long)]
    known_best: Option<f64>,
    /// Output directory. With several repeats each run writes to `seed-<seed>/`.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Number of runs, with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    repeats: u64,
    /// Refuse to run when the population buffers would exceed this size
    /// (bytes, or with a K/M/G/KiB/MiB/GiB suffix).
    #[arg(long, default_value = "4GiB", value_parser = parse_size)]
    mem_cap: u64,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 10)]
    swarms: usize,
    #[arg(long, default_value_t = 50)]
    swarm_size: usize,
    /// Inertia.
    #[arg(long, default_value_t = 0.5)]
    c1: f64,
    /// Attraction to the particle's own best.
    #[arg(long, default_value_t = 0.5)]
    c2: f64,
    /// Attraction to the swarm best.
    #[arg(long, default_value_t = 0.5)]
    c3: f64,
    #[arg(long, value_enum, default_value_t = SvArg::Norm)]
    sv: SvArg,
    #[arg(long, value_enum, default_value_t = SxArg::SecondTarget)]
    sx: SxArg,
    /// Selection rounds that avoid the current assignment (second-target only).
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, default_value_t = 4.0)]
    vmax: f64,
    /// Migration factor in [0, 0.5).
    #[arg(long, default_value_t = 0.0)]
    migration: f64,
    #[arg(long, default_value_t = 200)]
    max_iters: u64,
    /// Stop once the best cost is at or below this value.
    #[arg(long)]
    target: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "QAPSWARM_WORKERS", default_value_t = default_workers())]
    workers: usize,
    /// Record every k-th iteration in the statistics.
    #[arg(long, default_value_t = 1)]
    stats_stride: u64,
    #[arg(long, default_value_t = 60)]
    pmf_bins: usize,
    /// Record percentiles of every swarm, not only the one holding the best.
    #[arg(long)]
    all_swarm_percentiles: bool,
    /// Write measured iteration times to stats.csv (otherwise zero).
    #[arg(long)]
    record_timing: bool,
    /// Initial velocities are uniform in [-a, a].
    #[arg(long, default_value_t = 1.0)]
    init_velocity: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SvArg {
    Raw,
    Norm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SxArg {
    GlobalMax,
    PickColumn,
    SecondTarget,
}

/// A sweep line: an instance path and solve flags.
#[derive(Debug, Parser)]
#[command(name = "run", no_binary_name = true)]
struct RunLine {
    #[command(flatten)]
    solve: SolveArgs,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_size(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let split = s.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let value: f64 = num.parse().map_err(|_| format!("invalid size `{s}`"))?;
    let scale: u64 = match unit.trim().to_ascii_lowercase().as_str() {
        "" | "b" => 1,
        "k" | "kib" | "kb" => 1 << 10,
        "m" | "mib" | "mb" => 1 << 20,
        "g" | "gib" | "gb" => 1 << 30,
        "t" | "tib" | "tb" => 1 << 40,
        _ => return Err(format!("unknown size unit in `{s}`")),
    };
    Ok((value * scale as f64) as u64)
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            swarms: self.swarms,
            swarm_size: self.swarm_size,
            coefficients: PsoCoefficients {
                c1: self.c1,
                c2: self.c2,
                c3: self.c3,
                v_max: self.vmax,
                sv_mode: match self.sv {
                    SvArg::Raw => SvMode::Raw,
                    SvArg::Norm => SvMode::Norm,
                },
                sx_mode: match self.sx {
                    SxArg::GlobalMax => SxMode::GlobalMax,
                    SxArg::PickColumn => SxMode::PickColumn,
                    SxArg::SecondTarget => SxMode::SecondTarget,
                },
                depth: self.depth,
            },
            migration_factor: self.migration,
            max_iterations: self.max_iters,
            target_cost: self.target,
            seed: self.seed,
            workers: self.workers,
            stats: StatsOptions {
                stride: self.stats_stride,
                pmf_bins: self.pmf_bins,
                all_swarm_percentiles: self.all_swarm_percentiles,
                record_timing: self.record_timing,
            },
            init_velocity_amplitude: self.init_velocity,
        }
    }
}

fn sv_name(mode: SvMode) -> &'static str {
    match mode {
        SvMode::Raw => "raw",
        SvMode::Norm => "norm",
    }
}

fn sx_name(mode: SxMode) -> &'static str {
    match mode {
        SxMode::GlobalMax => "global-max",
        SxMode::PickColumn => "pick-column",
        SxMode::SecondTarget => "second-target",
    }
}

fn fingerprint(c: &SolverConfig) -> String {
    let k = &c.coefficients;
    let mut s = format!(
        "{}x{} c={}/{}/{} sv={} sx={}",
        c.swarms,
        c.swarm_size,
        k.c1,
        k.c2,
        k.c3,
        sv_name(k.sv_mode),
        sx_name(k.sx_mode)
    );
    if k.sx_mode == SxMode::SecondTarget {
        let _ = write!(s, " depth={}", k.depth);
    }
    let _ = write!(s, " vmax={} mig={} iters={} seed={}", k.v_max, c.migration_factor, c.max_iterations, c.seed);
    s
}

fn format_gap(gap: Option<f64>) -> String {
    gap.map_or_else(|| "n/a".to_string(), |g| format!("{:.2}%", g * 100.0))
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self { code: EXIT_USAGE, message: message.to_string() }
    }

    fn io(message: impl ToString) -> Self {
        Self { code: EXIT_IO, message: message.to_string() }
    }
}

/// Loads the instance and attaches the reference value for gap reporting.
fn load(args: &SolveArgs) -> Result<QapInstance, Failure> {
    let instance = io::read_instance(&args.instance).map_err(Failure::io)?;
    let known_best = match (args.known_best, &args.reference) {
        (Some(v), _) => Some(v),
        (None, Some(path)) => Some(io::read_reference_solution(path).map_err(Failure::io)?.cost),
        (None, None) => match io::sibling_solution(&args.instance) {
            Some(path) => Some(io::read_reference_solution(&path).map_err(Failure::io)?.cost),
            None => None,
        },
    };
    Ok(instance.with_known_best(known_best))
}

/// Validates the configuration and applies the memory cap.
fn prepare(args: &SolveArgs, instance: &QapInstance) -> Result<SolverConfig, Failure> {
    let config = args.solver.config();
    config.validate(instance.n()).map_err(Failure::usage)?;
    let bytes = buffer_bytes(instance.n(), config.particles(), config.swarms);
    eprintln!(
        "{}: {} particles, projected buffers {:.1} MiB",
        instance.name(),
        config.particles(),
        bytes as f64 / (1u64 << 20) as f64
    );
    let depth = config.migration_depth().map_err(Failure::usage)?;
    if depth > 0 {
        eprintln!("{}: migration depth {depth} of {} swarms", instance.name(), config.swarms);
    }
    if bytes > args.mem_cap {
        return Err(Failure::usage(format!(
            "projected buffers of {bytes} bytes exceed the memory cap of {} bytes",
            args.mem_cap
        )));
    }
    Ok(config)
}

/// Runs once and re-checks the reported cost against the solution.
fn solve_once(config: &SolverConfig, instance: &QapInstance) -> Result<RunResult, Failure> {
    let result = run(config, instance).map_err(Failure::usage)?;
    let check = evaluate_cost(instance, &result.best).map_err(|e| Failure::io(format!("internal error: {e}")))?;
    if check != result.cost {
        return Err(Failure::io(format!("internal error: reported cost {} but solution costs {check}", result.cost)));
    }
    Ok(result)
}

fn write_outputs(dir: &Path, result: &RunResult) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
    export_csv(&result.stats, dir).map_err(Failure::io)?;
    export_swarm_csv(&result.stats, dir).map_err(Failure::io)?;
    let path = dir.join("solution.txt");
    io::write_solution(&path, &result.solution()).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn solve(args: &SolveArgs) -> Result<(), Failure> {
    let instance = load(args)?;
    let base = prepare(args, &instance)?;
    for r in 0..args.repeats {
        let config = SolverConfig { seed: base.seed.wrapping_add(r), ..base.clone() };
        let result = solve_once(&config, &instance)?;
        let dir = if args.repeats == 1 { args.out.clone() } else { args.out.join(format!("seed-{}", config.seed)) };
        write_outputs(&dir, &result)?;
        println!(
            "{} {} goal={} gap={} iter={} ms/iter={:.3}",
            instance.name(),
            fingerprint(&config),
            result.cost,
            format_gap(result.gap),
            result.iteration,
            result.mean_iteration_ms()
        );
    }
    Ok(())
}

fn validate(instance: &Path, solution: &Path) -> Result<ExitCode, Failure> {
    let inst = io::read_instance(instance).map_err(Failure::io)?;
    let sln = io::read_reference_solution(solution).map_err(Failure::io)?;
    if sln.n != inst.n() {
        return Err(Failure::io(format!(
            "{}: solution has size {} but the instance has size {}",
            solution.display(),
            sln.n,
            inst.n()
        )));
    }
    let assignment = Assignment::from_perm(sln.permutation).map_err(Failure::io)?;
    let cost = evaluate_cost(&inst, &assignment).map_err(Failure::io)?;
    let matches = (cost - sln.cost).abs() <= 1e-9 * sln.cost.abs().max(1.0);
    if matches {
        println!("{}: cost {cost} matches", inst.name());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{}: declared cost {} but the permutation costs {cost}", inst.name(), sln.cost);
        Ok(ExitCode::from(EXIT_MISMATCH))
    }
}

const SWEEP_HEADER: [&str; 16] = [
    "instance",
    "swarms",
    "swarm_size",
    "particles",
    "c1",
    "c2",
    "c3",
    "sv",
    "sx",
    "migration",
    "seed",
    "goal",
    "reference",
    "gap_pct",
    "iteration",
    "error",
];

fn sweep_row(instance: &str, config: Option<&SolverConfig>, outcome: Result<(&QapInstance, &RunResult), &str>) -> Vec<String> {
    let mut row = vec![instance.to_string()];
    match config {
        Some(c) => {
            let k = &c.coefficients;
            row.extend([
                c.swarms.to_string(),
                c.swarm_size.to_string(),
                c.particles().to_string(),
                k.c1.to_string(),
                k.c2.to_string(),
                k.c3.to_string(),
                sv_name(k.sv_mode).to_string(),
                sx_name(k.sx_mode).to_string(),
                c.migration_factor.to_string(),
                c.seed.to_string(),
            ]);
        }
        None => row.extend(std::iter::repeat_n(String::new(), 10)),
    }
    match outcome {
        Ok((inst, result)) => row.extend([
            result.cost.to_string(),
            inst.known_best().map(|v| v.to_string()).unwrap_or_default(),
            result.gap.map(|g| format!("{:.2}", g * 100.0)).unwrap_or_default(),
            result.iteration.to_string(),
            String::new(),
        ]),
        Err(message) => {
            row.extend(std::iter::repeat_n(String::new(), 4));
            row.push(format!("ERROR: {message}"));
        }
    }
    row
}

fn sweep(runs: &Path, out: &Path) -> Result<ExitCode, Failure> {
    let text = fs::read_to_string(runs).map_err(|e| Failure::io(format!("{}: {e}", runs.display())))?;
    let base_dir = runs.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(out).map_err(|e| Failure::io(format!("{}: {e}", out.display())))?;
    let results_path = out.join("sweep_results.csv");
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&results_path)
        .map_err(|e| Failure::io(format!("{}: {e}", results_path.display())))?;
    let write_err = |e: csv::Error| Failure::io(format!("{}: {e}", results_path.display()));
    writer.write_record(SWEEP_HEADER).map_err(write_err)?;

    let mut completed = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(tokens) = shlex::split(line) else {
            writer.write_record(sweep_row(line, None, Err("unbalanced quotes"))).map_err(write_err)?;
            continue;
        };
        let mut args = match RunLine::try_parse_from(&tokens) {
            Ok(parsed) => parsed.solve,
            Err(e) => {
                let first = tokens.first().map(String::as_str).unwrap_or_default();
                let message = format!("line {}: {}", lineno + 1, e.kind());
                writer.write_record(sweep_row(first, None, Err(&message))).map_err(write_err)?;
                continue;
            }
        };
        if args.instance.is_relative() {
            args.instance = base_dir.join(&args.instance);
        }
        let label = args.instance.display().to_string();
        let prepared = load(&args).and_then(|inst| prepare(&args, &inst).map(|c| (inst, c)));
        let (instance, base) = match prepared {
            Ok(p) => p,
            Err(f) => {
                writer.write_record(sweep_row(&label, Some(&args.solver.config()), Err(&f.message))).map_err(write_err)?;
                continue;
            }
        };
        for r in 0..args.repeats {
            let config = SolverConfig { seed: base.seed.wrapping_add(r), ..base.clone() };
            let row = match solve_once(&config, &instance) {
                Ok(result) => {
                    completed += 1;
                    println!(
                        "{} {} goal={} gap={} iter={} ms/iter={:.3}",
                        instance.name(),
                        fingerprint(&config),
                        result.cost,
                        format_gap(result.gap),
                        result.iteration,
                        result.mean_iteration_ms()
                    );
                    sweep_row(instance.name(), Some(&config), Ok((&instance, &result)))
                }
                Err(f) => sweep_row(instance.name(), Some(&config), Err(&f.message)),
            };
            writer.write_record(row).map_err(write_err)?;
        }
        writer.flush().map_err(|e| Failure::io(format!("{}: {e}", results_path.display())))?;
    }
    writer.flush().map_err(|e| Failure::io(format!("{}: {e}", results_path.display())))?;
    if completed == 0 {
        return Err(Failure::io("no run in the sweep completed"));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match &cli.command {
        Command::Solve(args) => solve(args).map(|()| ExitCode::SUCCESS),
        Command::Validate { instance, solution } => validate(instance, solution),
        Command::Sweep { runs, out } => sweep(runs, out),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
