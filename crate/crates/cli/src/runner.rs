//! Process boundary: argument parsing, file I/O, and exit codes.
//!
//! Three subcommands. `simulate` resolves a preset or config document
//! (command-line flags winning over document keys), runs the sweep, and
//! writes each requested output atomically (write to a sibling `.tmp`,
//! then rename) so a failed run never leaves a partial file. `validate`
//! parses and resolves a document without running it. `oracle` samples a
//! tiny random scenario and checks the whole optimizer ladder against
//! the exhaustive binary optimum.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ris_core::channel::Channel;
use ris_core::experiment::{run_sweep, sample_scenario, SweepResult};
use ris_core::optimize::{
    exhaustive_binary_oracle, run_strategy, upper_bound_power, StrategyId, StrategyParams,
    EXHAUSTIVE_CELL_CAP,
};

use crate::config::{parse_config, resolve, Overrides, OutputFormat, Preset, ResolvedRun, RunConfig};
use crate::{csv, svg};

#[derive(Debug, Parser)]
#[command(
    name = "ris-sim",
    version,
    about = "Deterministic link-budget simulator for a reflective surface with a direct path",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a sweep and write CSV/SVG outputs.
    Simulate(SimulateArgs),
    /// Parse and validate a config document without running it.
    Validate(ValidateArgs),
    /// Cross-check the optimizer ladder against the exhaustive binary
    /// optimum on a small randomly sampled scenario.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
#[command(after_help = "Exactly one of --preset and --config selects the run. \
Every other flag overrides the matching config-file key; flags win.")]
struct SimulateArgs {
    /// Built-in sweep to run: fig3a, fig3b, or fig5.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Path to a TOML config document.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed for the randomized strategies.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (created if missing). Defaults to `results`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Output formats, comma-separated: csv, svg. Defaults to both.
    #[arg(long, value_delimiter = ',', value_name = "FMT,...")]
    format: Option<Vec<String>>,
    /// Strategies to run, comma-separated (e.g. ris0,ris2-analytic,ris4).
    #[arg(long = "strategy", value_delimiter = ',', value_name = "NAME,...")]
    strategy: Option<Vec<String>>,
    /// Candidate draws for ris3-random.
    #[arg(long)]
    iterations: Option<u64>,
    /// Phase grid step for ris2-grid, in degrees within (0, 180].
    #[arg(long, value_name = "DEG")]
    grid_step_deg: Option<f64>,
    /// Sweep budget for ris3-greedy.
    #[arg(long)]
    max_sweeps: Option<u64>,
    /// Additive correction applied to reported dBm values.
    #[arg(long, value_name = "DB")]
    calibration_offset_db: Option<f64>,
    /// Print per-distance progress to stderr while running.
    #[arg(long, short = 'v')]
    verbose: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Path to the TOML config document to check.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Surface size as ROWSxCOLS, at most 20 cells total.
    #[arg(long, default_value = "2x2")]
    grid: String,
    /// Seed for both the sampled scenario and ris3-random.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Candidate draws for ris3-random.
    #[arg(long, default_value_t = 500)]
    iterations: u64,
}

/// Parses the command line, runs it, and maps the outcome to an exit
/// status: 0 on success, 1 on any runtime or config error, and clap's
/// own codes for usage errors and `--help`.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Validate(args) => validate(args),
        Command::Oracle(args) => oracle(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".to_string())
}

/// Loads the document named by the flags and picks the output stem.
fn load_config(preset: &Option<String>, config: &Option<PathBuf>) -> Result<(RunConfig, String), String> {
    match (preset, config) {
        (Some(name), None) => {
            let preset: Preset = name.parse().map_err(|e| format!("{e}"))?;
            let cfg = RunConfig {
                preset: Some(preset),
                ..RunConfig::default()
            };
            Ok((cfg, preset.name().to_string()))
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("read {}: {e}", path.display()))?;
            let cfg = parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok((cfg, file_stem(path)))
        }
        (None, None) => Err("pass --preset <name> or --config <path>".to_string()),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    }
}

fn simulate(args: SimulateArgs) -> Result<(), String> {
    let (cfg, name) = load_config(&args.preset, &args.config)?;
    let overrides = Overrides {
        seed: args.seed,
        strategies: args.strategy,
        iterations: args.iterations,
        grid_step_deg: args.grid_step_deg,
        max_sweeps: args.max_sweeps,
        calibration_offset_db: args.calibration_offset_db,
        out_dir: args.out,
        formats: args.format,
        verbose: args.verbose,
    };
    let run = resolve(&cfg, &name, &overrides).map_err(|e| e.to_string())?;
    let result = execute(&run)?;
    write_outputs(&run, &result)
}

/// Runs the sweep, either in one shot or, when verbose, one distance at a
/// time with progress lines. Child seeds depend only on the sweep seed
/// and the distance value, so the stitched result matches the one-shot
/// sweep exactly.
fn execute(run: &ResolvedRun) -> Result<SweepResult, String> {
    if !run.verbose {
        return run_sweep(&run.spec).map_err(|e| format!("sweep failed: {e}"));
    }
    let total = run.spec.d2_values.len();
    let width = total.to_string().len();
    let mut rows = Vec::with_capacity(total);
    for (k, &d2) in run.spec.d2_values.iter().enumerate() {
        let mut single = run.spec.clone();
        single.d2_values = vec![d2];
        let partial =
            run_sweep(&single).map_err(|e| format!("sweep failed at d2 = {d2} m: {e}"))?;
        let row = partial.rows.into_iter().next().expect("one row per distance");
        let mut line = format!("[{:>width$}/{total}] d2 = {:.5e} m:", k + 1, row.d2);
        for (id, outcome) in run.spec.strategies.iter().zip(&row.outcomes) {
            line.push_str(&format!(" {} = {:.5e} dBm", id.name(), outcome.reported_dbm));
        }
        eprintln!("{line}");
        rows.push(row);
    }
    Ok(SweepResult {
        strategies: run.spec.strategies.clone(),
        rows,
    })
}

fn write_outputs(run: &ResolvedRun, result: &SweepResult) -> Result<(), String> {
    fs::create_dir_all(&run.out_dir)
        .map_err(|e| format!("create {}: {e}", run.out_dir.display()))?;
    for format in &run.formats {
        let path = run
            .out_dir
            .join(format!("{}.{}", run.name, format.extension()));
        let bytes = match format {
            OutputFormat::Csv => csv::csv_bytes(result).into_bytes(),
            OutputFormat::Svg => svg::svg_bytes(result, &run.name).into_bytes(),
        };
        let n = write_atomic(&path, &bytes).map_err(|e| format!("write {}: {e}", path.display()))?;
        println!("wrote {} ({n} bytes)", path.display());
    }
    Ok(())
}

/// Writes through a sibling temporary file and renames it into place, so
/// the destination either keeps its old content or holds the full new
/// content, never a truncated mix.
fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<usize> {
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    let outcome = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(bytes.len())
    })();
    if outcome.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    outcome
}

fn validate(args: ValidateArgs) -> Result<(), String> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| format!("read {}: {e}", args.config.display()))?;
    let cfg = parse_config(&text).map_err(|e| format!("{}: {e}", args.config.display()))?;
    let name = file_stem(&args.config);
    let run = resolve(&cfg, &name, &Overrides::default())
        .map_err(|e| format!("{}: {e}", args.config.display()))?;
    let strategies: Vec<&str> = run.spec.strategies.iter().map(|s| s.name()).collect();
    println!(
        "OK: {} ({} x {} cells, {} distances, strategies: {}, seed {})",
        args.config.display(),
        run.spec.template.rows,
        run.spec.template.cols,
        run.spec.d2_values.len(),
        strategies.join(", "),
        run.spec.seed,
    );
    Ok(())
}

fn parse_grid(text: &str) -> Result<(usize, usize), String> {
    let bad = || format!("--grid wants ROWSxCOLS (e.g. 2x2), got `{text}`");
    let (r, c) = text
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(bad)?;
    let rows: usize = r.trim().parse().map_err(|_| bad())?;
    let cols: usize = c.trim().parse().map_err(|_| bad())?;
    if rows == 0 || cols == 0 {
        return Err(bad());
    }
    if rows * cols > EXHAUSTIVE_CELL_CAP {
        return Err(format!(
            "--grid {rows}x{cols} has {} cells; the exhaustive oracle caps at {EXHAUSTIVE_CELL_CAP}",
            rows * cols
        ));
    }
    Ok((rows, cols))
}

/// Relative comparison helper: `a` is at least `b` up to rounding noise.
fn at_least(a: f64, b: f64) -> bool {
    a >= b - b.abs() * 1e-12
}

fn oracle(args: OracleArgs) -> Result<(), String> {
    let (rows, cols) = parse_grid(&args.grid)?;
    if args.iterations == 0 {
        return Err("--iterations must be at least 1".to_string());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let scenario = sample_scenario(rows, cols, &mut rng);
    println!(
        "sampled scenario: {rows} x {cols} cells, d1 = {:.4} m, d2 = {:.4} m, f = {:.4} GHz, seed {}",
        scenario.geometry.d1,
        scenario.geometry.d2,
        scenario.geometry.frequency_hz / 1e9,
        args.seed,
    );
    let channel = Channel::new(scenario.clone()).map_err(|e| format!("channel setup: {e}"))?;
    let params = StrategyParams {
        ris3_iterations: args.iterations as usize,
        ..StrategyParams::default()
    };

    println!("{:<18} {:>16} {:>13}", "strategy", "reported dBm", "evaluations");
    let mut ladder = Vec::new();
    for id in StrategyId::ALL {
        if id == StrategyId::ExhaustiveBinary {
            continue;
        }
        let result = run_strategy(&channel, id, &params, args.seed)
            .map_err(|e| format!("{id} failed: {e}"))?;
        println!(
            "{:<18} {:>16.6} {:>13}",
            id.name(),
            scenario.reported_dbm(result.power),
            result.evaluations,
        );
        ladder.push(result);
    }
    let exhaustive = exhaustive_binary_oracle(&channel).map_err(|e| format!("oracle failed: {e}"))?;
    println!(
        "{:<18} {:>16.6} {:>13}",
        "exhaustive-binary",
        scenario.reported_dbm(exhaustive.power),
        exhaustive.evaluations,
    );
    let bound = upper_bound_power(&channel, scenario.gamma_magnitude)
        .map_err(|e| format!("bound failed: {e}"))?;
    println!("{:<18} {:>16.6}", "upper bound", scenario.reported_dbm(bound));

    // The exhaustive optimum must dominate every strategy confined to
    // two-level phases, and the continuous per-cell alignment must sit
    // between it and the amplitude-sum bound.
    let binary: [StrategyId; 4] = [
        StrategyId::Ris0,
        StrategyId::Ris1,
        StrategyId::Ris3Random,
        StrategyId::Ris3Greedy,
    ];
    for result in &ladder {
        if binary.contains(&result.strategy) && !at_least(exhaustive.power, result.power) {
            return Err(format!(
                "oracle violation: {} ({:.17e} W) beats the exhaustive optimum ({:.17e} W)",
                result.strategy, result.power, exhaustive.power
            ));
        }
        if result.strategy == StrategyId::Ris4 {
            if !at_least(result.power, exhaustive.power) {
                return Err(format!(
                    "oracle violation: exhaustive optimum ({:.17e} W) beats ris4 ({:.17e} W)",
                    exhaustive.power, result.power
                ));
            }
            if !at_least(bound, result.power) {
                return Err(format!(
                    "oracle violation: ris4 ({:.17e} W) beats the upper bound ({:.17e} W)",
                    result.power, bound
                ));
            }
        }
    }
    println!("oracle OK: binary strategies bounded by the exhaustive optimum, ris4 between it and the bound");
    Ok(())
}
