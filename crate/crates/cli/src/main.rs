//! Command-line front end: resolves a scenario from a preset or a flat
//! key=value config file, runs the synthesis / accounting / trajectory
//! pipeline, and writes the artifacts plus a content-hashed run manifest.

use clap::{Args, Parser, Subcommand, ValueEnum};
use klein_pilot::accounting::build_ledger;
use klein_pilot::dirac_modes::{Case, Geometry};
use klein_pilot::export::{
    write_appendix_json, write_ensemble_json, write_field_csv, write_ledger_json,
    write_trajectories_csv,
};
use klein_pilot::multiscattering::{kappa_bound_check, ScatteringSeries};
use klein_pilot::scenario::{SamplingMode, Scenario};
use klein_pilot::trajectories::{check_no_crossing, integrate_ensemble, sample_ensemble};
use klein_pilot::wavepacket::SynthesizedField;
use serde_json::json;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const DEFAULT_LEDGER_TOL: f64 = 5e-3;
const APPENDIX_TERMS: u32 = 8;

#[derive(Parser)]
#[command(
    name = "klein-pilot",
    version,
    about = "Pilot-wave simulator for relativistic Klein scattering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario end to end and write its artifacts.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Preset name: step-case0..step-case3 or barrier-case1..barrier-case3.
    preset: Option<String>,
    /// Flat key=value config file; must contain a `preset=` base key that
    /// later keys override.
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Output directory for the artifacts.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Override the ensemble size.
    #[arg(long, value_name = "N")]
    ensemble: Option<usize>,
    /// Override the seed-sampling mode.
    #[arg(long, value_enum)]
    sampling: Option<SamplingArg>,
    /// Override the RNG seed.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Override the Gauss-Legendre order per energy domain.
    #[arg(long, value_name = "N")]
    quadrature: Option<usize>,
    /// Also write appendix.json with the multiple-scattering series; the
    /// scenario must be a Klein barrier.
    #[arg(long)]
    check_appendix: bool,
    /// Grid refinement level: 2 is the scenario's full resolution; each
    /// lower level halves the quadrature order and doubles dx.
    #[arg(long, value_name = "K", default_value_t = 2,
          value_parser = clap::value_parser!(u32).range(0..=2))]
    refine: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Gaussian,
    Born,
}

impl From<SamplingArg> for SamplingMode {
    fn from(mode: SamplingArg) -> SamplingMode {
        match mode {
            SamplingArg::Gaussian => SamplingMode::Gaussian,
            SamplingArg::Born => SamplingMode::Born,
        }
    }
}

enum Failure {
    Config(String),
    Invariant(String),
    Residual(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 4,
            Failure::Invariant(_) => 2,
            Failure::Residual(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Invariant(m) | Failure::Residual(m) => m,
        }
    }
}

fn config_err(e: klein_pilot::Error) -> Failure {
    Failure::Config(e.to_string())
}

fn invariant_err(e: klein_pilot::Error) -> Failure {
    Failure::Invariant(e.to_string())
}

fn main() -> ExitCode {
    // Usage mistakes are config errors (exit 4), not clap's default exit 2,
    // which is reserved for invariant failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 4,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let Command::Run(args) = cli.command;
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("KLEIN_PILOT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        Failure::Config(format!(
            "KLEIN_PILOT_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    if threads == 0 {
        return Err(Failure::Config(
            "KLEIN_PILOT_THREADS must be at least 1".into(),
        ));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Config(e.to_string()))
}

#[derive(Clone, Copy)]
struct Tuning {
    ledger_tol: f64,
}

impl Default for Tuning {
    fn default() -> Self {
        Tuning { ledger_tol: DEFAULT_LEDGER_TOL }
    }
}

fn load_config(path: &Path) -> Result<(Scenario, Tuning), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Failure::Config(format!(
                "{}:{}: expected key=value",
                path.display(),
                lineno + 1
            )));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    let preset = pairs
        .iter()
        .find(|(key, _)| key == "preset")
        .map(|(_, value)| value.clone())
        .ok_or_else(|| {
            Failure::Config("config file must set preset=<name> as the base scenario".into())
        })?;
    let mut scenario = Scenario::preset(&preset).map_err(config_err)?;
    let mut tuning = Tuning::default();
    for (key, value) in &pairs {
        if key != "preset" {
            apply_key(&mut scenario, &mut tuning, key, value)?;
        }
    }
    Ok((scenario, tuning))
}

fn apply_key(
    scenario: &mut Scenario,
    tuning: &mut Tuning,
    key: &str,
    value: &str,
) -> Result<(), Failure> {
    let bad = |what: &str| {
        Failure::Config(format!("key {key}: cannot parse {value:?} as {what}"))
    };
    let real = || value.parse::<f64>().map_err(|_| bad("a number"));
    let count = || value.parse::<usize>().map_err(|_| bad("an integer"));
    match key {
        "m" => scenario.m = real()?,
        "v" => scenario.v = real()?,
        "l" => scenario.l = real()?,
        "k0" => scenario.k0 = real()?,
        "x0" => scenario.x0 = real()?,
        "lambda" => scenario.lambda = real()?,
        "amplitude" => scenario.amplitude = real()?,
        "quadrature_n" => scenario.quadrature_n = count()?,
        "box_half" => scenario.box_half = real()?,
        "dx" => scenario.dx = real()?,
        "n_t" => scenario.n_t = count()?,
        "tau_f" => scenario.tau_f = real()?,
        "dt" => scenario.dt = real()?,
        "record_every" => scenario.record_every = count()?,
        "ensemble" => scenario.ensemble = count()?,
        "rng_seed" => scenario.rng_seed = value.parse().map_err(|_| bad("an integer"))?,
        "support_sigmas" => scenario.support_sigmas = real()?,
        "quadrature_tol" => scenario.quadrature_tol = real()?,
        "sampling" => {
            scenario.sampling = match value {
                "gaussian" => SamplingMode::Gaussian,
                "born" => SamplingMode::Born,
                _ => return Err(bad("gaussian or born")),
            }
        }
        "ledger_tol" => tuning.ledger_tol = real()?,
        _ => return Err(Failure::Config(format!("unknown config key {key:?}"))),
    }
    Ok(())
}

fn resolve_scenario(args: &RunArgs) -> Result<(Scenario, Tuning), Failure> {
    let (mut scenario, tuning) = match (&args.preset, &args.config) {
        (Some(name), None) => (Scenario::preset(name).map_err(config_err)?, Tuning::default()),
        (None, Some(path)) => load_config(path)?,
        _ => {
            return Err(Failure::Config(
                "pass exactly one of <preset> or --config FILE".into(),
            ))
        }
    };
    if let Some(n) = args.ensemble {
        scenario.ensemble = n;
    }
    if let Some(mode) = args.sampling {
        scenario.sampling = mode.into();
    }
    if let Some(seed) = args.seed {
        scenario.rng_seed = seed;
    }
    if let Some(n) = args.quadrature {
        scenario.quadrature_n = n;
    }
    if args.refine < 2 {
        scenario = scenario.coarsened(2 - args.refine);
    }
    scenario.validate().map_err(config_err)?;
    Ok((scenario, tuning))
}

fn is_klein_barrier(scenario: &Scenario) -> bool {
    scenario.geometry() == Geometry::Barrier
        && matches!(scenario.case(), Ok(Case::Case3))
}

fn sha256_hex(path: &Path) -> Result<String, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Invariant(format!("{}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn run(args: RunArgs) -> Result<(), Failure> {
    configure_threads()?;
    let (scenario, tuning) = resolve_scenario(&args)?;
    if args.check_appendix && !is_klein_barrier(&scenario) {
        return Err(Failure::Config(
            "--check-appendix needs a Klein barrier scenario (barrier geometry, case3)".into(),
        ));
    }
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Config(format!("--out {}: {e}", args.out.display())))?;

    let started = Instant::now();
    let case = scenario.case().map_err(config_err)?;
    println!(
        "scenario {} ({:?} {}), quadrature {}, box \u{b1}{}, dx {}",
        scenario.name,
        scenario.geometry(),
        case.name(),
        scenario.quadrature_n,
        scenario.box_half,
        scenario.dx
    );

    let field = SynthesizedField::new(&scenario).map_err(invariant_err)?;
    let grid = field.grid();
    println!("field: {} time slices x {} nodes, quadrature check ok", grid.nt(), grid.nx());

    let mut invariant_failures: Vec<String> = Vec::new();

    // |J1| <= J0 everywhere, up to rounding slack.
    let causality_excess = grid
        .density
        .iter()
        .zip(&grid.current)
        .map(|(&d, &j)| j.abs() - d * (1.0 + 1e-12))
        .fold(f64::NEG_INFINITY, f64::max);
    if causality_excess > 0.0 {
        invariant_failures.push(format!(
            "causality bound violated: |J1| exceeds J0 by {causality_excess:.3e}"
        ));
    }

    let ledger = build_ledger(&scenario, &grid).map_err(invariant_err)?;
    println!(
        "ledger: {} residual {:.3e} (P_A={:.6e}, P_R={:.6e}, P_T={:.6e}, P_B={:.6e})",
        ledger.identity.equation(),
        ledger.residual,
        ledger.p_a,
        ledger.p_r,
        ledger.p_t,
        ledger.p_b
    );

    let seeds = sample_ensemble(&field, scenario.ensemble, scenario.rng_seed)
        .map_err(invariant_err)?;
    let trajectories = integrate_ensemble(&seeds, &field);
    let crossing = check_no_crossing(&trajectories);
    println!(
        "ensemble: {} trajectories, {} crossing violations over {} compared pairs",
        trajectories.len(),
        crossing.violations.len(),
        crossing.compared_pairs
    );
    if !crossing.ok() {
        let first = &crossing.violations[0];
        invariant_failures.push(format!(
            "{} trajectory crossing violations (first at t={}, trajectories {} and {})",
            crossing.violations.len(),
            first.t,
            first.id_a,
            first.id_b
        ));
    }
    let max_speed = trajectories
        .iter()
        .map(|t| t.max_speed)
        .fold(0.0, f64::max);
    if max_speed > 1.0 + 1e-9 {
        invariant_failures.push(format!("superluminal sample speed {max_speed}"));
    }

    let mut outputs: Vec<(&str, PathBuf)> = vec![
        ("field.csv", args.out.join("field.csv")),
        ("trajectories.csv", args.out.join("trajectories.csv")),
        ("ledger.json", args.out.join("ledger.json")),
        ("ensemble.json", args.out.join("ensemble.json")),
    ];
    write_field_csv(&outputs[0].1, &grid).map_err(invariant_err)?;
    write_trajectories_csv(&outputs[1].1, &trajectories).map_err(invariant_err)?;
    write_ledger_json(&outputs[2].1, &scenario, &ledger).map_err(invariant_err)?;
    write_ensemble_json(&outputs[3].1, &trajectories).map_err(invariant_err)?;

    if args.check_appendix {
        let sol = scenario.mean_solution().map_err(invariant_err)?;
        let series = ScatteringSeries::from_solution(&sol).map_err(invariant_err)?;
        let kappa2 = kappa_bound_check(scenario.m, scenario.mean_energy(), scenario.v)
            .map_err(invariant_err)?;
        let path = args.out.join("appendix.json");
        write_appendix_json(&path, &series, kappa2, APPENDIX_TERMS).map_err(invariant_err)?;
        println!(
            "appendix: q={:.6e}, kappa^2={:.6e}, sums R={:.6e} T={:.6e}",
            series.q,
            kappa2,
            series.total_reflection(),
            series.total_transmission()
        );
        outputs.push(("appendix.json", path));
    }

    let mut hashes = serde_json::Map::new();
    for (name, path) in &outputs {
        hashes.insert((*name).to_string(), json!(sha256_hex(path)?));
    }
    let wall = started.elapsed().as_secs_f64();
    let manifest = json!({
        "config": {
            "scenario": scenario,
            "ledger_tol": tuning.ledger_tol,
            "refine": args.refine,
            "check_appendix": args.check_appendix,
        },
        "outputs": hashes,
        "wall_time_seconds": wall,
    });
    let manifest_path = args.out.join("run_manifest.json");
    let mut writer = std::io::BufWriter::new(
        std::fs::File::create(&manifest_path)
            .map_err(|e| Failure::Invariant(format!("{}: {e}", manifest_path.display())))?,
    );
    serde_json::to_writer_pretty(&mut writer, &manifest)
        .map_err(|e| Failure::Invariant(e.to_string()))?;
    use std::io::Write as _;
    writeln!(writer).map_err(|e| Failure::Invariant(e.to_string()))?;
    println!(
        "wrote {} files to {} in {:.1} s",
        outputs.len() + 1,
        args.out.display(),
        wall
    );

    if let Some(first) = invariant_failures.first() {
        return Err(Failure::Invariant(first.clone()));
    }
    if ledger.residual > tuning.ledger_tol {
        return Err(Failure::Residual(format!(
            "ledger residual {:.3e} exceeds tolerance {:.1e}",
            ledger.residual, tuning.ledger_tol
        )));
    }
    Ok(())
}
