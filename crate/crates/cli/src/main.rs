use std::path::PathBuf;
use std::process::ExitCode;

use ab_lab::bounds::{cutoff_energy, cutoff_mass_defect, CutoffParams};
use ab_lab::geometry::{generate_mesh, io, mesh_quality, DomainSpec, DEFAULT_DISK_SEGMENTS};
use ab_lab::harness::{emit_report, run_sweep, ReportFormat, SweepConfig};
use ab_lab::{oracle, Error};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "ab-lab",
    version,
    about = "Spectral laboratory for two-pole Aharonov-Bohm operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep over the pole separation and write reports.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mesh a domain without poles and write it as text.
    Mesh {
        #[arg(long, value_enum, default_value = "disk")]
        domain: DomainKind,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = DEFAULT_DISK_SEGMENTS)]
        segments: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print reference values.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
    /// Numerical self-checks.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainKind {
    Disk,
    Square,
}

#[derive(Subcommand)]
enum OracleCommand {
    Bessel {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(oracle::NAMED))]
        which: String,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Compare the cut-off energy with its closed form.
    Cutoff {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        tau: f64,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Sweep { config, out } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Parse(format!("{}: {e}", config.display())))?;
            let mut cfg = SweepConfig::parse(&text)?;
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            eprintln!("domain: {}", cfg.domain.describe());
            let outcome = run_sweep(&cfg)?;
            for r in &outcome.records {
                for f in &r.failures {
                    eprintln!("a = {}: {f}", r.a);
                }
            }
            let files = emit_report(
                &outcome,
                &cfg.output_dir,
                &[ReportFormat::Csv, ReportFormat::Json, ReportFormat::Svg],
            )?;
            match (&outcome.fit, &outcome.fit_error) {
                (Some(f), _) => println!(
                    "slope {:.6} predicted {:.6} relative error {:.4}",
                    f.slope, f.predicted, f.relative_error
                ),
                (None, Some(e)) => println!("no fit: {e}"),
                (None, None) => {}
            }
            for f in files {
                println!("wrote {}", f.display());
            }
            if outcome.records.iter().all(|r| !r.failures.is_empty()) {
                return Err(Error::InvalidParameter("every record failed".into()));
            }
        }
        Command::Mesh {
            domain,
            h,
            radius,
            segments,
            out,
        } => {
            let spec = match domain {
                DomainKind::Disk => DomainSpec::disk(radius, segments)?,
                DomainKind::Square => DomainSpec::polygon(vec![
                    [-radius, -radius],
                    [radius, -radius],
                    [radius, radius],
                    [-radius, radius],
                ])?,
            };
            let mesh = generate_mesh(&spec, None, None, h, None)?;
            io::write(&mesh, &out)?;
            let q = mesh_quality(&mesh);
            println!(
                "{} vertices, {} triangles, h in [{:.4}, {:.4}], min angle {:.2} deg",
                q.vertex_count,
                q.triangle_count,
                q.h_min,
                q.h_max,
                q.min_angle.to_degrees()
            );
        }
        Command::Oracle {
            which: OracleCommand::Bessel { which },
        } => println!("{}", oracle::named(&which)?),
        Command::Check {
            what: CheckCommand::Cutoff { eps, tau },
        } => {
            let p = CutoffParams::new(eps, tau)?;
            let e = cutoff_energy(&p);
            println!("closed form  {:.15e}", e.closed_form);
            println!("quadrature   {:.15e}", e.quadrature);
            println!("relative err {:.3e}", e.relative_error());
            println!(
                "mass defect  {:.6e} (bound {:.6e})",
                cutoff_mass_defect(&p),
                std::f64::consts::PI * eps.powf(2.0 * tau)
            );
        }
    }
    Ok(())
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
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config { .. } | Error::Parse(_) => ExitCode::from(1),
                e if e.is_precondition() => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
