use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ratesplit::{db_to_linear, ChannelPoint};
use ratesplit_cli::config::{Kind, ModelSpec, Overrides, Settings};
use ratesplit_cli::output::{metadata, point_json, sweep_csv, Normalize};
use ratesplit_cli::presets::{run_figure, Preset};
use ratesplit_cli::run::{check_kinds, evaluate_point, in_pool, sweep};
use ratesplit_cli::{selftest, CliError};

#[derive(Parser, Debug)]
#[command(name = "rsb", version, about = "Rate bounds for fading channels with imperfect CSI")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// All requested bounds at one channel point, as JSON.
    Bound(Overrides),
    /// Bounds over an SNR grid, as CSV.
    Sweep(Overrides),
    /// Reproduce a figure's data set.
    Figure {
        #[arg(value_enum)]
        preset: Preset,
        #[command(flatten)]
        flags: Overrides,
    },
    /// Run the invariant suite and print a JSON report.
    Selftest {
        /// Monte-Carlo samples for the agreement checks.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, env = "RSB_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn numeric_status(failed: usize) -> Result<(), CliError> {
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Numeric(format!("{failed} value(s) failed and were written as NaN")))
    }
}

fn bound(flags: &Overrides) -> Result<(), CliError> {
    let settings = Settings::resolve(ModelSpec::default(), flags)?;
    let model = settings.model.build()?;
    let ch = match (&settings.grid, settings.power) {
        (Some(g), _) if g.len() != 1 => return Err(CliError::Usage("bound takes a single --snr-db value".into())),
        (Some(g), None) => ChannelPoint::new(db_to_linear(g[0]) * settings.n0, settings.n0)?,
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --snr-db or --power, not both".into())),
        (None, Some(p)) => ChannelPoint::new(p, settings.n0)?,
        (None, None) => return Err(CliError::Usage("bound needs --power or --snr-db".into())),
    };
    let kinds = settings.kinds.clone().unwrap_or_else(|| {
        let mut k = Kind::SWEEP.to_vec();
        if settings.layering.is_some() {
            k.push(Kind::RLayered);
        }
        if settings.layers.is_some() {
            k.push(Kind::RStarL);
        }
        k
    });
    check_kinds(&kinds, &settings)?;
    let point = in_pool(settings.jobs, || evaluate_point(&model, &ch, &kinds, &settings))?;
    for (k, msg) in point.failures() {
        eprintln!("rsb: {} failed: {msg}", k.name());
    }
    let mut text = serde_json::to_string_pretty(&point_json(&point, &settings, "bound")).expect("serializable");
    text.push('\n');
    emit(&text, settings.out.as_deref())?;
    numeric_status(point.failures().count())
}

fn sweep_cmd(flags: &Overrides) -> Result<(), CliError> {
    let settings = Settings::resolve(ModelSpec::default(), flags)?;
    let model = settings.model.build()?;
    let grid = settings.grid.clone().ok_or_else(|| CliError::Usage("sweep needs --snr-db".into()))?;
    if settings.power.is_some() {
        return Err(CliError::Usage("sweep sets the power from --snr-db; drop --power".into()));
    }
    let kinds = settings.kinds.clone().unwrap_or_else(|| Kind::SWEEP.to_vec());
    if let Some(k) = kinds.iter().find(|k| !Kind::SWEEP.contains(k)) {
        return Err(CliError::Usage(format!("{} has no sweep column; use `bound`", k.name())));
    }
    check_kinds(&kinds, &settings)?;
    let points = sweep(&model, &grid, &kinds, &settings)?;
    for p in &points {
        for (k, msg) in p.failures() {
            eprintln!("rsb: {} at {} dB failed: {msg}", k.name(), p.snr_db);
        }
    }
    let (text, failed) = sweep_csv(&points, &settings, Normalize::None, metadata(&settings, "sweep"));
    emit(&text, settings.out.as_deref())?;
    numeric_status(failed)
}

fn figure(preset: Preset, flags: &Overrides) -> Result<(), CliError> {
    let (text, failed, settings) = run_figure(preset, flags)?;
    emit(&text, settings.out.as_deref())?;
    numeric_status(failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bound(flags) => bound(flags),
        Command::Sweep(flags) => sweep_cmd(flags),
        Command::Figure { preset, flags } => figure(*preset, flags),
        Command::Selftest { samples, seed } => {
            if *samples < 1_000 {
                Err(CliError::Usage("selftest needs --samples >= 1000".into()))
            } else {
                let report = selftest::run(*samples, *seed);
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
                if report.pass {
                    Ok(())
                } else {
                    return ExitCode::from(1);
                }
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rsb: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
