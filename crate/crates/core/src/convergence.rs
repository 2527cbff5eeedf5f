//! Nested-grid refinement studies: runs `n_i = base_n * 2^i`, measures the
//! max-norm distance to the finest level by injection, and reports base-2
//! log errors with consecutive rates.

use std::fmt;

use crate::error::{Error, Result};
use crate::mesh::{GridSpec, MeshProfile};
use crate::profiles::ProfileSpec;
use crate::solver::{validate_stability, Solver, SolverState, StabilityPolicy};

/// Largest step count accepted from [`choose_time_step`].
pub const MAX_TIME_STEPS: f64 = 1e12;

/// `m = ceil(2T / du^2)` and `dt = T / m`, so that `2 dt <= du^2` and `T`
/// is an exact multiple of `dt`.
pub fn choose_time_step(delta_u: f64, t_final: f64) -> Result<(usize, f64)> {
    let overflow = || Error::TimeStepOverflow { delta_u, t_final };
    if !(delta_u > 0.0 && t_final > 0.0 && delta_u.is_finite() && t_final.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "need delta_u > 0 and T > 0, got {delta_u} and {t_final}"
        )));
    }
    let steps = (2.0 * t_final / (delta_u * delta_u)).ceil();
    if !steps.is_finite() || steps > MAX_TIME_STEPS {
        return Err(overflow());
    }
    let mut m = (steps as usize).max(1);
    // the ceiling is computed in floating point; nudge until the CFL check agrees
    while delta_u * delta_u - 2.0 * (t_final / m as f64) < 0.0 {
        m = m.checked_add(1).ok_or_else(overflow)?;
    }
    Ok((m, t_final / m as f64))
}

/// Grid at `n` cells on `[0, rho0]` over `[0, T]` with the automatic step.
pub fn auto_grid(rho0: f64, n: usize, t_final: f64) -> Result<GridSpec> {
    let probe = GridSpec::new(rho0, n, t_final, 1)?;
    if t_final == 0.0 {
        return Ok(probe);
    }
    let (m, _) = choose_time_step(probe.delta_u(), t_final)?;
    probe.with_time(t_final, m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub n: usize,
    pub delta_u: f64,
    /// `None` on the reference row.
    pub log2_linf_error: Option<f64>,
    /// `None` on the first comparison row and the reference row.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub profile: ProfileSpec,
    pub rho0: f64,
    pub t_final: f64,
    pub eval_time: f64,
    pub base_n: usize,
    pub levels: usize,
    pub reference_level: usize,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Rates in level order, skipping rows without one.
    pub fn rates(&self) -> Vec<(usize, f64)> {
        self.rows.iter().filter_map(|r| r.rate.map(|x| (r.level, x))).collect()
    }

    pub fn rate_at(&self, level: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.level == level).and_then(|r| r.rate)
    }
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>16}  {:>14}  {:>8}", "delta_u", "log2 Linf err", "rate")?;
        for row in &self.rows {
            let err = row.log2_linf_error.map_or("reference".into(), |e| format!("{e:.6}"));
            let rate = row.rate.map_or(String::new(), |r| format!("{r:.4}"));
            writeln!(f, "{:>16}  {:>14}  {:>8}", row.delta_u, err, rate)?;
        }
        Ok(())
    }
}

/// `rate_i = e_{i-1} - e_i` for consecutive base-2 log errors.
pub fn compute_rates(log2_errors: &[f64]) -> Vec<f64> {
    log2_errors.windows(2).map(|w| w[0] - w[1]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StudyOptions {
    pub policy: StabilityPolicy,
    /// Run levels on separate threads.
    pub parallel: bool,
}

/// Runs one level to the first time level at or after `eval_time`.
fn run_level(spec: &ProfileSpec, rho0: f64, t_final: f64, n: usize, eval_time: f64, policy: StabilityPolicy) -> Result<MeshProfile> {
    let grid = auto_grid(rho0, n, t_final)?;
    let w0 = spec.build(grid)?;
    let report = validate_stability(&grid, &w0, None);
    if policy == StabilityPolicy::Enforce && !report.is_stable() {
        return Err(Error::Unstable(Box::new(report)));
    }
    let target = grid.level_at_or_after(eval_time);
    let mut solver = Solver::new(SolverState::initial(w0)?);
    solver.advance_to(target)?;
    Ok(solver.state().profile().clone())
}

pub fn refinement_study(
    profile: &ProfileSpec,
    rho0: f64,
    t_final: f64,
    base_n: usize,
    levels: usize,
    eval_time: f64,
    options: StudyOptions,
) -> Result<ConvergenceReport> {
    if levels < 2 {
        return Err(Error::Config(format!("need at least 2 levels, got {levels}")));
    }
    if !(eval_time >= 0.0 && eval_time <= t_final) {
        return Err(Error::Config(format!("eval_time {eval_time} outside [0, {t_final}]")));
    }
    let ns: Vec<usize> = (0..levels)
        .map(|i| {
            u32::try_from(i)
                .ok()
                .and_then(|i| 2usize.checked_pow(i))
                .and_then(|p| base_n.checked_mul(p))
                .ok_or_else(|| Error::Config(format!("grid size overflow at level {i}")))
        })
        .collect::<Result<_>>()?;

    let solve = |level: usize| {
        run_level(profile, rho0, t_final, ns[level], eval_time, options.policy).map_err(|e| Error::Level {
            level,
            n: ns[level],
            source: Box::new(e),
        })
    };
    let finals: Vec<Result<MeshProfile>> = if options.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..levels).map(|i| scope.spawn(move || solve(i))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("level thread panicked"))
                .collect()
        })
    } else {
        (0..levels).map(solve).collect()
    };
    let finals: Vec<MeshProfile> = finals.into_iter().collect::<Result<_>>()?;

    let reference = &finals[levels - 1];
    let mut log2_errors = Vec::with_capacity(levels - 1);
    for (i, coarse) in finals[..levels - 1].iter().enumerate() {
        let injected = reference.restrict(1 << (levels - 1 - i))?;
        let err = coarse
            .values()
            .iter()
            .zip(injected.values())
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        log2_errors.push(err.log2());
    }
    let rates = compute_rates(&log2_errors);

    let rows = (0..levels)
        .map(|i| ConvergenceRow {
            level: i,
            n: ns[i],
            delta_u: finals[i].grid().delta_u(),
            log2_linf_error: log2_errors.get(i).copied(),
            rate: i.checked_sub(1).and_then(|p| rates.get(p).copied()),
        })
        .collect();

    Ok(ConvergenceReport {
        profile: profile.clone(),
        rho0,
        t_final,
        eval_time,
        base_n,
        levels,
        reference_level: levels - 1,
        rows,
    })
}
