//! `moricone` command line.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use moricone::ratcone::Budget;

use commands::CliError;
use report::{Outcome, ReportDocument};

#[derive(Parser)]
#[command(
    name = "moricone",
    version,
    about = "Exact nef and Mori cone verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Abort a dualization once it holds this many intermediate rays.
    #[arg(long, global = true, value_name = "N")]
    budget_rays: Option<usize>,
    /// Abort a dualization after this many seconds.
    #[arg(long, global = true, value_name = "S", env = "MORICONE_BUDGET_SECONDS")]
    budget_seconds: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Relative cones of the two-step blowup.
    Cones {
        #[command(subcommand)]
        command: ConesCommand,
    },
    /// Contraction type of a two-step blowup of linear centers.
    Classify {
        #[command(subcommand)]
        command: ClassifyCommand,
    },
    /// Scenarios over products of del Pezzo surfaces.
    Dp {
        #[command(subcommand)]
        command: DpCommand,
    },
    /// Nefness certificates.
    Cert {
        #[command(subcommand)]
        command: CertCommand,
    },
}

#[derive(Subcommand)]
enum ConesCommand {
    /// Check that Nef and NE of the relative blowup are mutually dual.
    Relative,
}

#[derive(Subcommand)]
enum ClassifyCommand {
    Construction {
        /// Codimension of the first center.
        #[arg(long)]
        a: u32,
        /// Codimension of the second center.
        #[arg(long)]
        b: u32,
        /// Defects of the intersection components.
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<u32>,
        /// The first center lies inside the second.
        #[arg(long)]
        a_in_b: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GridFormat {
    Md,
    Json,
}

#[derive(Subcommand)]
enum DpCommand {
    /// Cones and classification for one pair of point counts.
    Scenario {
        #[arg(long)]
        r1: usize,
        #[arg(long)]
        r2: usize,
        /// Check the claimed nef generators against the dual of the cone of curves.
        #[arg(long)]
        verify_cones: bool,
        /// Fano, weak Fano and Fano type verdicts.
        #[arg(long)]
        classify: bool,
    },
    /// The 4 x 9 classification grid.
    ClassifyAll {
        #[arg(long, value_enum, default_value = "md")]
        format: GridFormat,
    },
    /// The (-1)-classes on the plane blown up at `r` points.
    MinusOne {
        #[arg(long)]
        r: usize,
    },
}

#[derive(Subcommand)]
enum CertCommand {
    /// Check a certificate file.
    Verify { file: PathBuf },
    /// Build the certificates for a point times a hypersurface in a product of projective spaces.
    ExampleTsukioka {
        #[arg(long)]
        n1: u32,
        #[arg(long)]
        n2: u32,
        #[arg(long)]
        d: u32,
        /// Write the certificates as JSON files into this directory.
        #[arg(long, value_name = "DIR")]
        write: Option<PathBuf>,
    },
}

impl Cli {
    fn budget(&self) -> Result<Budget, CliError> {
        let max_time = self
            .budget_seconds
            .map(|s| {
                Duration::try_from_secs_f64(s).map_err(|_| {
                    CliError::Input(format!(
                        "--budget-seconds must be a nonnegative number, got {s}"
                    ))
                })
            })
            .transpose()?;
        Ok(Budget {
            max_rays: self.budget_rays,
            max_time,
        })
    }

    fn execute(&self) -> Result<Outcome, CliError> {
        match &self.command {
            Command::Cones {
                command: ConesCommand::Relative,
            } => commands::cones_relative(),
            Command::Classify {
                command: ClassifyCommand::Construction { a, b, c, a_in_b },
            } => commands::classify_construction(*a, *b, c.clone(), *a_in_b),
            Command::Dp { command } => match command {
                DpCommand::Scenario {
                    r1,
                    r2,
                    verify_cones,
                    classify,
                } => commands::dp_scenario(*r1, *r2, *verify_cones, *classify, &self.budget()?),
                DpCommand::ClassifyAll { .. } => commands::dp_classify_all(),
                DpCommand::MinusOne { r } => commands::dp_minus_one(*r),
            },
            Command::Cert { command } => match command {
                CertCommand::Verify { file } => commands::cert_verify(file),
                CertCommand::ExampleTsukioka { n1, n2, d, write } => {
                    commands::cert_example_tsukioka(*n1, *n2, *d, write.as_deref())
                }
            },
        }
    }

    fn wants_json(&self) -> bool {
        self.json
            || matches!(
                self.command,
                Command::Dp {
                    command: DpCommand::ClassifyAll {
                        format: GridFormat::Json
                    }
                }
            )
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    let started = Instant::now();
    let outcome = match cli.execute() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let command = &argv[1..];
    let doc = ReportDocument::new(command, &outcome, started.elapsed().as_millis()).render();
    if cli.wants_json() {
        print!("{doc}");
    } else {
        print!("{}", outcome.text);
    }
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &doc) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(outcome.status.exit_code())
}
