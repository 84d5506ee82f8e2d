//! `antomap`: simulate sonar traces, build occupancy maps and score them.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use antomap_core::config::{RunConfig, SEED_ENV_VAR};
use antomap_core::eval::{evaluate, sweep_alphas, tcr_sweep, Method};
use antomap_core::geometry::{RangeTag, ScalarGrid};
use antomap_core::io::{self, MapFormat};
use antomap_core::pipeline::{self, Mapped};
use antomap_core::{Error, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "antomap", version, about = "Sonar occupancy-grid mapping with antonym-based fuzzy maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one configuration key; repeatable and applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a trace, its ground-truth tags and the reference map.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Build the maps of one method from a trace.
    Map {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "FILE")]
        trace: PathBuf,
        /// prob, fuzzy or antonym; defaults to the configured method.
        #[arg(long)]
        method: Option<String>,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// csv, pgm or ppm; repeatable.
        #[arg(long = "format", default_value = "csv")]
        formats: Vec<String>,
    },
    /// Score a signed map against a reference map.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "FILE")]
        map: PathBuf,
        #[arg(long, value_name = "FILE")]
        reference: PathBuf,
        /// Cut level; defaults to the configured alpha.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// TCR of a signed map over evenly spaced cut levels.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "FILE")]
        map: PathBuf,
        #[arg(long, value_name = "FILE")]
        reference: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run all three methods on one trace and summarise them.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Use this trace instead of simulating one.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long = "format", default_value = "csv")]
        formats: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("antomap: {}", first.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("antomap: {}", e.to_string().replace('\n', " "));
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Unknown { .. } => 1,
        Error::Io { .. } => 2,
        Error::Parse { .. } | Error::Invalid { .. } => 3,
    }
}

/// Defaults, then the file, then the seed variable, then `--set` flags.
fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_text(&io::read_text(path)?, &path.display().to_string())?,
        None => RunConfig::default(),
    };
    cfg.apply_seed_override(std::env::var(SEED_ENV_VAR).ok().as_deref())?;
    cfg.apply_overrides(common.sets.iter().map(String::as_str))?;
    cfg.validate()?;
    Ok(cfg)
}

fn formats(names: &[String]) -> Result<Vec<MapFormat>> {
    names.iter().map(|n| MapFormat::from_name(n)).collect()
}

fn read_signed(path: &Path) -> Result<ScalarGrid> {
    let grid = io::read_grid(path)?;
    if grid.range() != RangeTag::Signed {
        return Err(Error::Invalid {
            what: "map",
            message: format!("{} is not a signed map", path.display()),
        });
    }
    Ok(grid)
}

fn write_maps(mapped: &Mapped, dir: &Path, formats: &[MapFormat]) -> Result<()> {
    for (name, grid) in mapped.grids() {
        for &f in formats {
            io::export_map(&grid, f, &dir.join(format!("{name}.{}", f.extension())))?;
        }
    }
    let signed = mapped.signed();
    for &f in formats {
        io::export_map(&signed, f, &dir.join(format!("signed.{}", f.extension())))?;
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate { common, out } => {
            let cfg = load_config(&common)?;
            let sc = pipeline::scenario(&cfg)?;
            let trace = pipeline::simulate(&cfg, &sc)?;
            io::write_trace(&out.join("trace.txt"), &trace.records)?;
            io::write_text(&out.join("tags.txt"), &io::format_tags(&trace.tags))?;
            io::export_map(&sc.reference, MapFormat::Csv, &out.join("reference.csv"))?;
            io::write_text(&out.join("config.txt"), &cfg.to_text())?;
            println!("{} records written to {}", trace.records.len(), out.display());
        }
        Command::Map {
            common,
            trace,
            method,
            out,
            formats: names,
        } => {
            let method = method.map(|m| Method::from_name(&m)).transpose()?;
            let formats = formats(&names)?;
            let cfg = load_config(&common)?;
            let method = method.unwrap_or(cfg.method);
            let sc = pipeline::scenario(&cfg)?;
            let records = io::read_trace(&trace)?;
            let mapped = pipeline::map_trace(method, &cfg, sc.spec, &records);
            write_maps(&mapped, &out, &formats)?;
            println!("{} maps written to {}", method.name(), out.display());
        }
        Command::Eval {
            common,
            map,
            reference,
            alpha,
            out,
        } => {
            let cfg = load_config(&common)?;
            let report = evaluate(&read_signed(&map)?, &io::read_grid(&reference)?, alpha.unwrap_or(cfg.alpha))?;
            let text = report.to_key_value();
            match out {
                Some(path) => io::write_text(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Sweep {
            common,
            map,
            reference,
            out,
        } => {
            let cfg = load_config(&common)?;
            let sweep = tcr_sweep(&read_signed(&map)?, &io::read_grid(&reference)?, &sweep_alphas(cfg.sweep_points))?;
            let mut text = String::from("alpha,tcr\n");
            for (a, t) in sweep {
                text.push_str(&format!("{a:.6},{t:.6}\n"));
            }
            match out {
                Some(path) => io::write_text(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Compare {
            common,
            trace,
            out,
            formats: names,
        } => {
            let formats = formats(&names)?;
            let cfg = load_config(&common)?;
            let sc = pipeline::scenario(&cfg)?;
            let records = match trace {
                Some(path) => io::read_trace(&path)?,
                None => {
                    let sim = pipeline::simulate(&cfg, &sc)?;
                    io::write_text(&out.join("tags.txt"), &io::format_tags(&sim.tags))?;
                    sim.records
                }
            };
            io::write_trace(&out.join("trace.txt"), &records)?;
            io::export_map(&sc.reference, MapFormat::Csv, &out.join("reference.csv"))?;
            let cmp = pipeline::compare(&cfg, &cfg.environment.label(), sc.spec, &records, &sc.reference)?;
            for r in &cmp.results {
                let name = r.method.name();
                write_maps(&r.mapped, &out.join("maps").join(name), &formats)?;
                io::write_text(&out.join(format!("report_{name}.txt")), &r.report.to_key_value())?;
            }
            io::write_text(&out.join("summary.csv"), &cmp.summary_csv())?;
            io::write_text(&out.join("sweep.csv"), &cmp.sweep_csv())?;
            print!("{}", cmp.summary_csv());
        }
    }
    Ok(())
}
