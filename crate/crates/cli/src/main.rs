use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use obstring::config::{self, presets, ProbeKind};
use obstring::error::CliError;
use obstring::manifest::RunManifest;
use obstring::sweep::{self, Axis};
use obstring::{probe, runner};

/// Penalized obstacle problem for a viscoelastic string.
#[derive(Debug, Parser)]
#[command(name = "obstring", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory; overrides `[output].dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniform fall onto the obstacle.
    Example1(PresetArgs),
    /// Piecewise profile whose contact set splits.
    Example2(PresetArgs),
    /// Run one config per value of a parameter and compare the results.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated, strictly sorted; `1/500` style fractions allowed.
        #[arg(long)]
        values: String,
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate diagnostic probes on a finished run.
    Probe {
        run_dir: PathBuf,
        /// Probe to evaluate; repeatable. Defaults to the configured set.
        #[arg(long = "probe", value_parser = parse_probe)]
        probes: Vec<ProbeKind>,
    },
    /// Redraw the heatmaps of a finished run from its CSV files.
    Render { run_dir: PathBuf },
}

#[derive(Debug, clap::Args)]
struct PresetArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cells (and steps per unit time); defaults to the full resolution of 5000.
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Stored-level stride.
    #[arg(long)]
    stride: Option<usize>,
}

fn parse_probe(s: &str) -> Result<ProbeKind, String> {
    ProbeKind::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = ProbeKind::ALL.iter().map(|p| p.name()).collect();
        format!("unknown probe {s:?}; expected one of {}", names.join(", "))
    })
}

fn run_experiment(exp: &config::Experiment, out: &Path) -> Result<(), CliError> {
    let result = runner::execute(exp, out)?;
    report_manifest(&result.manifest, out);
    Ok(())
}

fn report_manifest(m: &RunManifest, out: &Path) {
    println!("output: {}", out.display());
    if let Some(t) = m.first_contact_time {
        println!("first contact: t = {t}");
    }
    for s in &m.snapshots {
        println!("snapshot: requested t = {}, stored t = {}", s.requested, s.actual);
    }
    for p in &m.phases {
        println!("phase {}: {:.3} s", p.name, p.seconds);
    }
    for n in &m.notes {
        println!("note: {n}");
    }
    println!("{} files written", m.files.len());
}

fn preset(text: &str, args: &PresetArgs) -> Result<(config::Experiment, PathBuf), CliError> {
    let mut file = config::parse_file(text)?;
    if let Some(n) = args.cells {
        file.time.m = (file.time.horizon * n as f64).round() as usize;
        file.grid.n = n;
    }
    if let Some(e) = args.epsilon {
        file.physics.epsilon = e;
    }
    if args.stride.is_some() {
        file.output.stride = args.stride;
    }
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(&file.output.dir));
    let text = config::emit(&file);
    Ok((config::build(file, &text, Path::new(""))?, out))
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config, out } => {
            let exp = config::load(&config)?;
            let out = out.unwrap_or_else(|| PathBuf::from(&exp.file.output.dir));
            run_experiment(&exp, &out)
        }
        Command::Example1(args) => {
            let (exp, out) = preset(presets::EXAMPLE1, &args)?;
            run_experiment(&exp, &out)
        }
        Command::Example2(args) => {
            let (exp, out) = preset(presets::EXAMPLE2, &args)?;
            run_experiment(&exp, &out)
        }
        Command::Sweep {
            axis,
            values,
            config,
            out,
        } => {
            let values = sweep::parse_values(&values)?;
            let exp = config::load(&config)?;
            let out = out.unwrap_or_else(|| PathBuf::from(&exp.file.output.dir));
            let rows = sweep::sweep(&exp.file, axis, &values, &out)?;
            print!("{}", sweep::sweep_text(axis, &rows));
            println!("wrote {}", out.join(sweep::SWEEP_FILE).display());
            Ok(())
        }
        Command::Probe { run_dir, probes } => {
            let rows = probe::probe_dir(&run_dir, &probes)?;
            let violated = rows.iter().filter(|r| !r.ok).count();
            for kind in ProbeKind::ALL {
                let of_kind: Vec<_> = rows.iter().filter(|r| r.probe == kind).collect();
                if !of_kind.is_empty() {
                    let bad = of_kind.iter().filter(|r| !r.ok).count();
                    println!("{}: {} evaluations, {bad} outside tolerance", kind.name(), of_kind.len());
                }
            }
            println!("{violated} of {} evaluations outside tolerance; details in {}", rows.len(), probe::PROBE_FILE);
            Ok(())
        }
        Command::Render { run_dir } => {
            for name in runner::render_dir(&run_dir)? {
                println!("{}", run_dir.join(name).display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
