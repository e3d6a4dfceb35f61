mod commands;
mod config;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use commands::{Failure, Output};
use config::{documented_sections, Config};
use qpgsim_core::export::Metadata;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_COMPUTE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

/// Simulates dispersion-engineered sum-frequency conversion of single photons.
#[derive(Parser)]
#[command(name = "qpgsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML file layered over the built-in defaults
    #[arg(short, long)]
    config: Option<PathBuf>,

    /// Override one key, e.g. `--set process.length_mm=13.5` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output directory
    #[arg(short, long, default_value = ".")]
    out: PathBuf,

    /// Worker threads (default: one per core)
    #[arg(long)]
    threads: Option<usize>,

    /// Also write a gnuplot script for the data files
    #[arg(long)]
    plot_script: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Group-velocity mismatch maps with zero contours and target lines
    GvmMap(Common),
    /// Phasematching function of the converter over input and pump wavelength
    Phasematching(Common),
    /// Source joint spectrum, Schmidt coefficients, marginals and the converted spectrum
    Jsa(Common),
    /// Full chain summary as key = value lines
    Report(Common),
    /// Group-velocity-matched operating point for a target output wavelength
    FindPoint(Common),
    /// Operating points over a temperature range
    Sweep(Common),
    /// Print the built-in default configuration
    Defaults,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("gvm-map", &["gvm-map"]),
    ("phasematching", &["process", "phasematching"]),
    ("jsa", &["source", "process", "jsa"]),
    ("report", &["seed", "source", "process", "efficiency", "photonstats", "report"]),
    ("find-point", &["find-point"]),
    ("sweep", &["find-point", "sweep"]),
];

fn cli() -> clap::Command {
    let mut cmd = Cli::command();
    for (name, sections) in SECTIONS {
        let help = format!("Configuration keys and defaults:\n\n{}", documented_sections(sections));
        cmd = cmd.mut_subcommand(*name, |c| c.after_long_help(help));
    }
    cmd
}

type Runner = fn(&Config, &Metadata) -> Result<Vec<Output>, Failure>;

/// Writes every file or none: anything written before a failure is removed.
fn write_all(dir: &Path, files: &[Output]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for f in files {
        let path = dir.join(&f.name);
        if let Err(e) = std::fs::write(&path, &f.contents) {
            let _ = std::fs::remove_file(&path);
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(e);
        }
        written.push(path);
    }
    Ok(())
}

fn execute(name: &str, run: Runner, common: &Common) -> ExitCode {
    let cfg = match Config::load(common.config.as_deref(), &common.set) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(n) = common.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("global pool is configured once");
    }
    let seed = cfg.u64("seed").unwrap_or_default();
    let meta = Metadata::new()
        .with("tool", format!("qpgsim {}", env!("CARGO_PKG_VERSION")))
        .with("command", name)
        .with("config_sha256", cfg.sha256())
        .with("seed", seed);

    let mut files = match run(&cfg, &meta) {
        Ok(f) => f,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_COMPUTE);
        }
    };
    // The effective configuration reproduces every file carrying its hash.
    files.push(Output {
        name: "config.toml".into(),
        contents: meta.header() + &cfg.render(),
    });
    if common.plot_script {
        files.extend(commands::plot_script(name, &files));
    }
    if let Err(e) = write_all(&common.out, &files) {
        eprintln!("error: writing to {}: {e}", common.out.display());
        return ExitCode::from(EXIT_COMPUTE);
    }
    if name == "report" {
        print!("{}", files[0].contents);
    } else {
        for f in &files {
            println!("{}", common.out.join(&f.name).display());
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let parsed = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let (name, run, common): (&str, Runner, _) = match &parsed.command {
        Command::GvmMap(c) => ("gvm-map", commands::cmd_gvm_map, c),
        Command::Phasematching(c) => ("phasematching", commands::cmd_phasematching, c),
        Command::Jsa(c) => ("jsa", commands::cmd_jsa, c),
        Command::Report(c) => ("report", commands::cmd_report, c),
        Command::FindPoint(c) => ("find-point", commands::cmd_find_point, c),
        Command::Sweep(c) => ("sweep", commands::cmd_sweep, c),
        Command::Defaults => {
            print!("{}", config::DEFAULTS);
            return ExitCode::SUCCESS;
        }
    };
    execute(name, run, common)
}
