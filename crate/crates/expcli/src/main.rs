use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use v2x_core::pointprocess::{NetworkRealization, RngSeed};
use v2x_core::simulator::auto_window_radius;
use v2x_expcli::config::{parse_mode, OutputFormat, WindowSetting};
use v2x_expcli::output::{csv_string, write_text};
use v2x_expcli::plot::render_svg;
use v2x_expcli::sample::write_realization;
use v2x_expcli::sweep::{run_with_progress, Row};
use v2x_expcli::{load_spec, ExperimentSpec, Preset, SpecError};

#[derive(Parser)]
#[command(
    name = "v2x",
    version,
    about = "Success probability of V2X links on random road networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file or a preset and write CSV/SVG outputs.
    Run {
        /// TOML experiment file.
        spec: Option<PathBuf>,
        /// Preset to use when no file is given (fig3..fig9).
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Analytic values only.
        #[arg(long)]
        no_sim: bool,
        /// origin or physical
        #[arg(long)]
        mode: Option<String>,
    },
    /// Write one sampled network as CSV.
    Sample {
        spec: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List presets with their sweep parameter and grid size.
    Presets,
}

#[cfg(feature = "parallel")]
fn configure_threads() {
    if let Some(n) = std::env::var("V2X_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() {}

fn resolve_spec(spec: Option<&Path>, preset: Option<&str>) -> Result<ExperimentSpec, SpecError> {
    match (spec, preset) {
        (Some(path), None) => load_spec(path),
        (Some(path), Some(name)) => {
            let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let mut table: toml::Table = text
                .parse()
                .map_err(|e: toml::de::Error| SpecError::Syntax(e.to_string()))?;
            table.insert("preset".into(), toml::Value::String(name.into()));
            ExperimentSpec::from_toml_str(&table.to_string())
        }
        (None, Some(name)) => Ok(ExperimentSpec::preset(name.parse()?)),
        (None, None) => Err(SpecError::MissingKey {
            key: "spec file or --preset".into(),
        }),
    }
}

fn describe(row: &Row) -> String {
    match &row.outcome {
        Ok(_) => format!(
            "{:>12e}  ok  ({:.2?}, window {} Km)",
            row.value, row.elapsed, row.window_km
        ),
        Err(e) => format!("{:>12e}  FAILED: {e}", row.value),
    }
}

fn run_command(
    spec_path: Option<PathBuf>,
    preset: Option<String>,
    trials: Option<u64>,
    seed: Option<u64>,
    out: PathBuf,
    no_sim: bool,
    mode: Option<String>,
) -> Result<bool, Box<dyn std::error::Error>> {
    let mut spec = resolve_spec(spec_path.as_deref(), preset.as_deref())?;
    if let Some(t) = trials {
        spec.sim.trials = t;
    }
    if let Some(s) = seed {
        spec.sim.seed = s;
    }
    if no_sim {
        spec.sim.trials = 0;
    }
    if let Some(m) = mode {
        spec.sim.mode = parse_mode("--mode", &m)?;
    }
    spec.validate()?;
    std::fs::create_dir_all(&out)?;
    eprintln!(
        "{}: sweeping {} over {} values, {} trials per point",
        spec.name,
        spec.sweep.parameter.key(),
        spec.sweep.values.len(),
        spec.sim.trials
    );
    let result = run_with_progress(&spec, |row| eprintln!("  {}", describe(row)));
    for format in &spec.outputs {
        let (path, text) = match format {
            OutputFormat::Csv => (out.join(format!("{}.csv", spec.name)), csv_string(&result)),
            OutputFormat::Svg => (out.join(format!("{}.svg", spec.name)), render_svg(&result)),
        };
        write_text(&text, &path)?;
        eprintln!("wrote {}", path.display());
    }
    let failed = result.rows.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", result.rows.len());
    }
    Ok(failed == 0)
}

fn sample_command(
    spec_path: Option<PathBuf>,
    preset: Option<String>,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<(), Box<dyn std::error::Error>> {
    let preset = preset.or_else(|| spec_path.is_none().then(|| "fig4".to_string()));
    let spec = resolve_spec(spec_path.as_deref(), preset.as_deref())?;
    let params = spec.sweep.parameter.apply(&spec.base, spec.sweep.values[0]);
    let window = match spec.sim.window {
        WindowSetting::Fixed(w) => w,
        WindowSetting::Auto => auto_window_radius(&params)?,
    };
    let real = NetworkRealization::sample(&params, window, &mut RngSeed(seed).stream(0));
    match out {
        Some(path) => write_realization(&real, std::fs::File::create(path)?)?,
        None => write_realization(&real, std::io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            spec,
            preset,
            trials,
            seed,
            out,
            no_sim,
            mode,
        } => match run_command(spec, preset, trials, seed, out, no_sim, mode) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Sample {
            spec,
            preset,
            seed,
            out,
        } => match sample_command(spec, preset, seed, out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Presets => {
            for p in Preset::ALL.into_iter().filter(|p| *p != Preset::Custom) {
                let s = ExperimentSpec::preset(p);
                println!(
                    "{:<6} {:<9} {} points",
                    p.name(),
                    s.sweep.parameter.key(),
                    s.sweep.values.len()
                );
            }
            ExitCode::SUCCESS
        }
    }
}
