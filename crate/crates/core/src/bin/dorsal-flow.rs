use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dorsal_flow::cli::{self, RunConfig};
use dorsal_flow::Result;

#[derive(Parser)]
#[command(name = "dorsal-flow", version, about = "Leading-edge curvature flow solver")]
struct Args {
    /// JSON run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Run even if the step-size, domain or gradient hypotheses fail.
    #[arg(long, global = true)]
    allow_unstable: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time-step the configured profile and write snapshots and diagnostics.
    Simulate,
    /// Nested-grid refinement study against the finest level.
    Converge {
        #[arg(long, default_value_t = 20)]
        base_n: usize,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        /// Defaults to the configured final time.
        #[arg(long)]
        eval_time: Option<f64>,
    },
    /// Write the initial profile as profile.csv.
    Profile,
    /// Print the stability report and profile warnings.
    Validate,
}

fn execute(args: &Args) -> Result<i32> {
    let config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match args.command {
        Command::Simulate => {
            let out = cli::simulate(&config, args.allow_unstable)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            for f in &out.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Converge {
            base_n,
            levels,
            eval_time,
        } => {
            let report = cli::converge(&config, base_n, levels, eval_time, args.allow_unstable)?;
            print!("{report}");
        }
        Command::Profile => {
            let path = cli::emit_profile(&config)?;
            println!("wrote {}", path.display());
        }
        Command::Validate => {
            let (report, warnings) = cli::validate(&config)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            print!("{report}");
            if !report.is_stable() {
                return Ok(2);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::exit_code(&err) as u8)
        }
    }
}
