//! Command implementations behind the `dorsal-flow` binary, and the CSV
//! formats they write.
//!
//! Floats are written with Rust's shortest round-tripping representation,
//! so every CSV value parses back to the identical `f64`.

mod config;

pub use config::{DtPolicy, RunConfig};

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::convergence::{refinement_study, ConvergenceReport, StudyOptions};
use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::mesh::MeshProfile;
use crate::profiles::{validate_profile, ProfileWarning};
use crate::solver::{run, validate_stability, Snapshot, StabilityPolicy, StabilityReport};

pub const SNAPSHOTS_CSV: &str = "snapshots.csv";
pub const DIAGNOSTICS_CSV: &str = "diagnostics.csv";
pub const CONVERGENCE_CSV: &str = "convergence.csv";
pub const STABILITY_TXT: &str = "stability.txt";
pub const PROFILE_CSV: &str = "profile.csv";

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    Ok(BufWriter::new(fs::File::create(path)?))
}

pub fn write_snapshots(path: &Path, snapshots: &[Snapshot]) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "t,u,h")?;
    for snap in snapshots {
        let grid = snap.profile.grid();
        for (k, h) in snap.profile.values().iter().enumerate() {
            writeln!(out, "{},{},{}", snap.t, grid.node(k), h)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_diagnostics(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "t,sup_h,sup_dplus,length,area")?;
    for r in records {
        writeln!(out, "{},{},{},{},{}", r.t, r.sup_h, r.sup_dplus, r.length, r.area)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_convergence(path: &Path, report: &ConvergenceReport) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "level,n,delta_u,log2_linf_error,rate")?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.level,
            row.n,
            row.delta_u,
            opt(row.log2_linf_error),
            opt(row.rate)
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_profile(path: &Path, profile: &MeshProfile) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "u,h")?;
    for (k, h) in profile.values().iter().enumerate() {
        writeln!(out, "{},{}", profile.grid().node(k), h)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_stability(path: &Path, report: &StabilityReport) -> Result<()> {
    let mut out = create(path)?;
    write!(out, "{report}")?;
    out.flush()?;
    Ok(())
}

/// Builds and checks the initial profile on the configured grid.
pub fn initial_profile(config: &RunConfig) -> Result<(MeshProfile, Vec<ProfileWarning>)> {
    let grid = config.grid()?;
    let w0 = config.profile.build(grid)?;
    let warnings = validate_profile(&w0)?;
    Ok((w0, warnings))
}

#[derive(Debug)]
pub struct SimulateOutput {
    pub report: StabilityReport,
    pub warnings: Vec<ProfileWarning>,
    pub files: Vec<PathBuf>,
}

/// Runs the configured simulation and writes `snapshots.csv`,
/// `diagnostics.csv` and `stability.txt` into the output directory.
///
/// A stability rejection still writes `stability.txt`.
pub fn simulate(config: &RunConfig, allow_unstable: bool) -> Result<SimulateOutput> {
    config.check()?;
    let grid = config.grid()?;
    let (w0, warnings) = initial_profile(config)?;
    let report = validate_stability(&grid, &w0, config.derivative_bound);
    let dir = &config.output_dir;
    let stability_path = dir.join(STABILITY_TXT);
    if !(allow_unstable || config.allow_unstable) && !report.is_stable() {
        write_stability(&stability_path, &report)?;
        return Err(Error::Unstable(Box::new(report)));
    }
    let out = run(&grid, &w0, &config.snapshot_times(), StabilityPolicy::AllowUnstable)?;

    let files = vec![dir.join(SNAPSHOTS_CSV), dir.join(DIAGNOSTICS_CSV), stability_path];
    write_snapshots(&files[0], &out.snapshots)?;
    write_diagnostics(&files[1], &out.diagnostics)?;
    write_stability(&files[2], &report)?;
    Ok(SimulateOutput {
        report,
        warnings,
        files,
    })
}

/// Refinement study over `base_n * 2^i`, `i < levels`, written to `convergence.csv`.
pub fn converge(
    config: &RunConfig,
    base_n: usize,
    levels: usize,
    eval_time: Option<f64>,
    allow_unstable: bool,
) -> Result<ConvergenceReport> {
    let eval_time = eval_time.unwrap_or(config.t_final);
    if eval_time > config.t_final || eval_time < 0.0 {
        return Err(Error::Config(format!(
            "eval time {eval_time} outside [0, {}]",
            config.t_final
        )));
    }
    let policy = if allow_unstable || config.allow_unstable {
        StabilityPolicy::AllowUnstable
    } else {
        StabilityPolicy::Enforce
    };
    let report = refinement_study(
        &config.profile,
        config.rho0,
        config.t_final,
        base_n,
        levels,
        eval_time,
        StudyOptions {
            policy,
            parallel: true,
        },
    )?;
    write_convergence(&config.output_dir.join(CONVERGENCE_CSV), &report)?;
    Ok(report)
}

/// Writes the configured initial profile as `profile.csv`.
pub fn emit_profile(config: &RunConfig) -> Result<PathBuf> {
    let (w0, _) = initial_profile(config)?;
    let path = config.output_dir.join(PROFILE_CSV);
    write_profile(&path, &w0)?;
    Ok(path)
}

/// Stability report and profile warnings without running anything.
pub fn validate(config: &RunConfig) -> Result<(StabilityReport, Vec<ProfileWarning>)> {
    config.check()?;
    let grid = config.grid()?;
    let (w0, warnings) = initial_profile(config)?;
    Ok((validate_stability(&grid, &w0, config.derivative_bound), warnings))
}

/// Process exit code for an error: 2 for stability rejections, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Unstable(_) => 2,
        Error::Level { source, .. } => exit_code(source),
        _ => 1,
    }
}
