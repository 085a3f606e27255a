//! `huddle`: run, sweep, verify and render shape-assembly trials.
//!
//! Exit codes: 0 success, 1 invariant violation or failed trial, 2 bad input.

mod render;

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use huddle_core::assembly::{read_event_log, replay, write_event_log, LogError, ReplayOptions};
use huddle_core::protocol::SignalOptions;
use huddle_core::shape::{generate_random_shape, parse_shape, write_shape};
use huddle_core::sim::{run_monte_carlo, run_trial_logged, MonteCarloConfig, TrialConfig};
use huddle_core::ShapeSpec;

use render::{render_svg, RenderStyle};

#[derive(Parser)]
#[command(name = "huddle", version, about = "Decentralized hexagonal shape assembly")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trial and print its report as JSON.
    Run(RunArgs),
    /// Run a Monte Carlo sweep over generated shapes.
    Sweep(SweepArgs),
    /// Replay an event log through the checkers.
    Verify(VerifyArgs),
    /// Draw the assembly at one step of an event log.
    Render(RenderArgs),
    /// Write a generated shape file.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Shape file.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    shape: Option<PathBuf>,
    /// Generate the shape instead: seed and cell count.
    #[arg(long, num_args = 2, value_names = ["SEED", "SIZE"])]
    random: Option<Vec<u64>>,
    /// Attachments per step, 1 to 4.
    #[arg(long = "attach", default_value_t = 1)]
    attach: u8,
    #[arg(long, env = "HUDDLE_SEED", default_value_t = 0)]
    seed: u64,
    /// Defaults to the shape size.
    #[arg(long)]
    max_steps: Option<u64>,
    /// Event log output (JSON lines).
    #[arg(long)]
    log: Option<PathBuf>,
    /// Write an SVG snapshot every this many steps.
    #[arg(long)]
    svg_every: Option<u64>,
    #[arg(long, default_value = ".")]
    svg_dir: PathBuf,
    /// Disable the special flank-signal condition.
    #[arg(long)]
    ablate_special: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 1000)]
    shapes: usize,
    /// Shape sizes as `lo..hi` (inclusive).
    #[arg(long, default_value = "2..256", value_parser = parse_range::<usize>)]
    sizes: RangeInclusive<usize>,
    /// Attachments per step as `lo..hi` (inclusive).
    #[arg(long = "attach", default_value = "1..4", value_parser = parse_range::<u8>)]
    attach: RangeInclusive<u8>,
    #[arg(long, env = "HUDDLE_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    ablate_special: bool,
}

#[derive(Args)]
struct VerifyArgs {
    log: PathBuf,
    shape: PathBuf,
    /// Also recompute every signal round and require it to match the log.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    ablate_special: bool,
}

#[derive(Args)]
struct RenderArgs {
    log: PathBuf,
    #[arg(long)]
    shape: PathBuf,
    #[arg(long)]
    step: u64,
    #[arg(long)]
    out: PathBuf,
    /// Hex side length in SVG units.
    #[arg(long, default_value_t = 10.0)]
    side: f64,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, env = "HUDDLE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    size: usize,
    /// Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    /// Exit 1.
    Violation(String),
    /// Exit 2.
    BadInput(String),
}

fn bad(e: impl ToString) -> Failure {
    Failure::BadInput(e.to_string())
}

fn parse_range<T: std::str::FromStr + Copy>(s: &str) -> Result<RangeInclusive<T>, String>
where
    T::Err: std::fmt::Display,
{
    let parse = |t: &str| t.trim().parse::<T>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((lo, hi)) => Ok(parse(lo)?..=parse(hi.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            Ok(v..=v)
        }
    }
}

fn load_shape(path: &Path) -> Result<ShapeSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    parse_shape(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let shape = match (&args.shape, &args.random) {
        (Some(path), _) => load_shape(path)?,
        (None, Some(r)) => {
            if r[1] == 0 {
                return Err(bad("shape size must be at least 1"));
            }
            generate_random_shape(r[0], r[1] as usize)
        }
        (None, None) => return Err(bad("a shape file or --random is required")),
    };
    let mut cfg = TrialConfig::new(&shape, args.attach, args.seed);
    if let Some(m) = args.max_steps {
        cfg.max_steps = m;
    }
    cfg.ablate_special_condition = args.ablate_special;
    cfg.event_log_path = args.log.clone();
    let (report, events) = run_trial_logged(&cfg).map_err(bad)?;
    if let Some(path) = &args.log {
        let f = fs::File::create(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        write_event_log(&events, std::io::BufWriter::new(f)).map_err(bad)?;
    }
    if let Some(every) = args.svg_every.filter(|&m| m > 0) {
        fs::create_dir_all(&args.svg_dir).map_err(bad)?;
        let style = RenderStyle::default();
        let opts = SignalOptions {
            special_condition: !args.ablate_special,
        };
        let mut t = 0;
        while t <= report.steps_used {
            let ropts = ReplayOptions {
                until_step: Some(t),
                check_every_step: false,
                signal_options: opts,
                ..Default::default()
            };
            let snap = replay(&shape, &events, ropts).map_err(bad)?;
            let path = args.svg_dir.join(format!("step_{t:05}.svg"));
            fs::write(&path, render_svg(&snap.state, &snap.signals, &style)).map_err(bad)?;
            t += every;
        }
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if report.completed {
        Ok(())
    } else {
        match report.invariant_failures.first() {
            Some(v) => Err(Failure::Violation(v.to_string())),
            None => Err(Failure::Violation(format!(
                "step limit {} reached with {} of {} robots",
                cfg.max_steps,
                report.robots_placed,
                shape.len()
            ))),
        }
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    if args.sizes.is_empty() || *args.sizes.start() == 0 {
        return Err(bad("sizes must be a nonempty range of positive sizes"));
    }
    let cfg = MonteCarloConfig {
        n_shapes: args.shapes,
        sizes: args.sizes,
        attachments: args.attach,
        base_seed: args.seed,
        check_every_step: true,
        ablate_special_condition: args.ablate_special,
    };
    let report = match args.jobs {
        None => run_monte_carlo(&cfg),
        Some(0) => return Err(bad("--jobs must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(bad)?;
            pool.install(|| run_monte_carlo(&cfg))
        }
    }
    .map_err(bad)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    eprintln!(
        "{}/{} trials completed in {:.1}s",
        report.completed, report.trials, report.wall_time_seconds
    );
    if report.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(format!("{} trials failed", report.failures.len())))
    }
}

fn read_log(path: &Path) -> Result<Vec<huddle_core::assembly::Event>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    read_event_log(&text).map_err(|e| Failure::Violation(e.to_string()))
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let shape = load_shape(&args.shape)?;
    let events = read_log(&args.log)?;
    let opts = ReplayOptions {
        strict: args.strict,
        signal_options: SignalOptions {
            special_condition: !args.ablate_special,
        },
        check_every_step: true,
        until_step: None,
    };
    match replay(&shape, &events, opts) {
        Ok(r) => {
            println!("ok: {} robots, {} steps", r.state.len(), r.state.step());
            Ok(())
        }
        Err(LogError::Violation(v)) => Err(Failure::Violation(format!(
            "step {}: {}: {}",
            v.step, v.checker, v.detail
        ))),
        Err(e) => Err(Failure::Violation(e.to_string())),
    }
}

fn cmd_render(args: RenderArgs) -> Result<(), Failure> {
    let style = RenderStyle {
        side: args.side,
        ..Default::default()
    };
    style.validate().map_err(bad)?;
    let shape = load_shape(&args.shape)?;
    let text = fs::read_to_string(&args.log).map_err(|e| bad(format!("{}: {e}", args.log.display())))?;
    let events = read_event_log(&text).map_err(bad)?;
    let opts = ReplayOptions {
        until_step: Some(args.step),
        check_every_step: false,
        ..Default::default()
    };
    let snap = replay(&shape, &events, opts).map_err(bad)?;
    fs::write(&args.out, render_svg(&snap.state, &snap.signals, &style)).map_err(bad)?;
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    if args.size == 0 {
        return Err(bad("--size must be at least 1"));
    }
    let text = write_shape(&generate_random_shape(args.seed, args.size));
    match args.out {
        Some(path) => fs::write(path, text).map_err(bad),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Render(a) => cmd_render(a),
        Command::Generate(a) => cmd_generate(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::BadInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
