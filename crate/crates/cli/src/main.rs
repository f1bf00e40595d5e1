use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use phasectl_core::{
    emit_csv, emit_plot, parse_config_with, phase_axis, scan_phase, scan_z, single_atom_yield,
    snapshot_envelopes, wrap_phase, Error, Preset, RunConfig, RunManifest, RunMode,
};

#[derive(Parser)]
#[command(
    name = "phasectl",
    version,
    about = "Phase-controlled photoabsorption in an optically dense medium"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ion yield versus launch phase at the medium entrance
    ScanPhase(Common),
    /// March both fields through the medium and record theta, S_h, Q versus z
    Propagate(Common),
    /// Harmonic envelopes at the configured distances
    Snapshots(Common),
    /// Ion yield of one atom at the launch phase
    SingleAtom(Common),
    /// Parse and check a configuration, then print the resolved parameters
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory [default: $PHASECTL_OUT_DIR, else outputs.dir]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Intensity preset: I1e10, I3e10 or I8e10
    #[arg(long)]
    preset: Option<String>,
    /// Launch relative phase, e.g. "0.5 pi" or "1.2 rad"
    #[arg(long, allow_hyphen_values = true)]
    theta0: Option<String>,
    /// Override a configuration value, as section.key=value (repeatable)
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    /// Skip SVG output
    #[arg(long)]
    no_plots: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            e if e.is_numerical() => 3,
            Error::Config(_) | Error::InvalidInput(_) | Error::GridMismatch(_) => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(args: &Common, mode: RunMode) -> Result<(RunConfig, Option<Preset>), Failure> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut overrides = args.set.clone();
    if let Some(t) = &args.theta0 {
        overrides.push(format!("pulses.theta0={t}"));
    }
    let mut cfg = parse_config_with(&text, &overrides)
        .map_err(|e| Failure::config(format!("{}:\n{e}", args.config.display())))?;
    let preset = match &args.preset {
        Some(name) => Some(name.parse::<Preset>().map_err(Failure::usage)?),
        None => None,
    };
    if let Some(p) = preset {
        cfg = cfg.with_preset(p);
    }
    cfg.mode = mode;
    Ok((cfg, preset))
}

fn out_dir(args: &Common, cfg: &RunConfig) -> Result<PathBuf, Failure> {
    let dir = args
        .out
        .clone()
        .or_else(|| std::env::var_os("PHASECTL_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| cfg.outputs.dir.clone());
    std::fs::create_dir_all(&dir)
        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn finish(mut manifest: RunManifest, dir: &Path, started: Instant) -> Result<(), Failure> {
    manifest.wall_clock_s = started.elapsed().as_secs_f64();
    let path = dir.join(format!("{}.manifest.json", manifest.mode));
    manifest.write(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let started = Instant::now();
    let (args, mode) = match &cli.command {
        Command::ScanPhase(a) => (a, RunMode::ScanPhase),
        Command::Propagate(a) => (a, RunMode::Propagate),
        Command::Snapshots(a) => (a, RunMode::Snapshots),
        Command::SingleAtom(a) => (a, RunMode::SingleAtom),
        Command::Validate(a) => (a, RunMode::Propagate),
    };
    let (cfg, preset) = load(args, mode)?;
    let sim = cfg.simulation()?;
    let preset_name = preset.map(Preset::name);
    let label = preset_name.unwrap_or("config").to_string();

    if let Command::Validate(_) = cli.command {
        let manifest = RunManifest::new(&cfg, &sim, "validate", preset_name);
        println!("{}", manifest.to_json());
        return Ok(());
    }

    let dir = out_dir(args, &cfg)?;
    let mut manifest = RunManifest::new(&cfg, &sim, mode.name(), preset_name);
    let mut written = Vec::new();
    match mode {
        RunMode::ScanPhase => {
            let thetas = phase_axis(cfg.outputs.theta_points);
            let presets: Vec<Option<Preset>> = match preset {
                Some(p) => vec![Some(p)],
                None => Preset::ALL.into_iter().map(Some).collect(),
            };
            let mut results = Vec::new();
            for p in presets.into_iter().flatten() {
                let s = cfg.with_preset(p).simulation()?;
                let mut r = scan_phase(&s, &thetas, p.name())?;
                r.provenance.config_digest = cfg.with_preset(p).digest();
                let path = dir.join(format!("scan_phase_{}.csv", p.name()));
                emit_csv(&r, &path)?;
                written.push(path);
                results.push(r);
            }
            if !args.no_plots {
                let path = dir.join("scan_phase.svg");
                emit_plot(&results, &path)?;
                written.push(path);
            }
        }
        RunMode::Propagate => {
            let r = scan_z(&sim, &label)?;
            if let Some(d) = &r.diagnostics {
                manifest.max_yield_disagreement = Some(d.max_yield_disagreement);
            }
            manifest.diagnostics = r.diagnostics.clone();
            let path = dir.join("propagate.csv");
            emit_csv(&r, &path)?;
            written.push(path);
            if !args.no_plots {
                let path = dir.join("propagate.svg");
                emit_plot(std::slice::from_ref(&r), &path)?;
                written.push(path);
            }
            if let Some(last) = r.points.last() {
                println!(
                    "z = {} cm: theta = {:.6} pi, S_h/S_h(0) = {:.6}, Q = {:.6e}",
                    last.z,
                    wrap_phase(last.theta) / PI,
                    r.sh_norm().last().copied().unwrap_or(f64::NAN),
                    last.q
                );
            }
        }
        RunMode::Snapshots => {
            let r = snapshot_envelopes(&sim, &label)?;
            manifest.diagnostics = r.diagnostics.clone();
            manifest.max_yield_disagreement =
                r.diagnostics.as_ref().map(|d| d.max_yield_disagreement);
            let path = dir.join("snapshots.csv");
            emit_csv(&r, &path)?;
            written.push(path);
            if !args.no_plots {
                let path = dir.join("snapshots.svg");
                emit_plot(std::slice::from_ref(&r), &path)?;
                written.push(path);
            }
            for s in &r.snapshots {
                println!(
                    "z = {:8.4} cm  centroid = {:+.5} ns  tail fraction = {:.5}",
                    s.z, s.centroid_h, s.tail_fraction
                );
            }
        }
        RunMode::SingleAtom => {
            let q = single_atom_yield(&sim, sim.theta0)?;
            let r = scan_phase(&sim, &[sim.theta0], &label)?;
            let path = dir.join("single_atom.csv");
            emit_csv(&r, &path)?;
            written.push(path);
            println!("theta0 = {:.6} pi: Q = {q:.12e}", sim.theta0 / PI);
        }
    }
    for p in &written {
        println!("wrote {}", p.display());
    }
    manifest.outputs = written.iter().map(|p| p.display().to_string()).collect();
    finish(manifest, &dir, started)
}
