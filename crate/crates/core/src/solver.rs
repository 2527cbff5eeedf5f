//! Fully explicit time stepping for
//!
//! ```text
//! h_t = h_uu / (1 + h_u^2) + h_u / ((1 + h_u^2) L[h]),   h_u(0) = 0,  h(rho0) = 0
//! ```
//!
//! Interior nodes use `D0`/`D2` with the level-global discrete length; the
//! right node is pinned to zero and the left node copies the increment of
//! node 1, which keeps `D+ w_0` fixed in time.

use std::fmt;

use crate::diagnostics::{record, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::mesh::{dplus_sup_of, length_of, GridSpec, MeshProfile};

/// One time level of the scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    grid: GridSpec,
    j: usize,
    profile: MeshProfile,
}

impl SolverState {
    /// Level 0 from an initial profile; the Dirichlet node must already be zero.
    pub fn initial(w0: MeshProfile) -> Result<Self> {
        Self::at_level(w0, 0)
    }

    pub fn at_level(profile: MeshProfile, j: usize) -> Result<Self> {
        let grid = *profile.grid();
        let last = profile.values()[grid.n()];
        if last != 0.0 {
            return Err(Error::Dirichlet { value: last });
        }
        if j > grid.m() {
            return Err(Error::StepPastEnd { m: grid.m() });
        }
        Ok(Self { grid, j, profile })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn time(&self) -> f64 {
        self.grid.time_at(self.j)
    }

    pub fn profile(&self) -> &MeshProfile {
        &self.profile
    }
}

/// Right-hand side at an interior node from the three stencil values.
#[inline(always)]
fn interior_rhs(left: f64, centre: f64, right: f64, inv_2du: f64, inv_du2: f64, inv_len: f64) -> f64 {
    let d0 = (right - left) * inv_2du;
    let d2 = (right - 2.0 * centre + left) * inv_du2;
    (d2 + d0 * inv_len) / (1.0 + d0 * d0)
}

/// `(D_t w)_k = A_k ((D2 w)_k + (D0 w)_k / L)` with `A_k = 1 / (1 + (D0 w)_k^2)`.
pub fn dt_interior(f: &MeshProfile, k: usize, length: f64) -> Result<f64> {
    let n = f.n();
    if k == 0 || k >= n {
        return Err(Error::IndexOutOfRange { op: "D_t", k, n });
    }
    let du = f.grid().delta_u();
    let v = f.values();
    Ok(interior_rhs(v[k - 1], v[k], v[k + 1], 0.5 / du, 1.0 / (du * du), 1.0 / length))
}

/// Writes level `j+1` into `next` from level `j` in `cur`.
pub(crate) fn advance_level(cur: &[f64], next: &mut [f64], du: f64, dt: f64) {
    let n = cur.len() - 1;
    let inv_len = 1.0 / length_of(cur, du);
    let inv_2du = 0.5 / du;
    let inv_du2 = 1.0 / (du * du);
    let (left, centre, right) = (&cur[..n - 1], &cur[1..n], &cur[2..]);
    let out = &mut next[1..n];
    for k in 0..n - 1 {
        out[k] = centre[k] + dt * interior_rhs(left[k], centre[k], right[k], inv_2du, inv_du2, inv_len);
    }
    next[n] = 0.0;
    next[0] = cur[0] + (next[1] - cur[1]);
}

/// One step of the scheme. Fails at the final level.
pub fn step(state: &SolverState) -> Result<SolverState> {
    let grid = state.grid;
    if state.j >= grid.m() {
        return Err(Error::StepPastEnd { m: grid.m() });
    }
    let mut next = vec![0.0; grid.n() + 1];
    advance_level(state.profile.values(), &mut next, grid.delta_u(), grid.delta_t());
    Ok(SolverState {
        grid,
        j: state.j + 1,
        profile: MeshProfile::new(grid, next)?,
    })
}

/// In-place stepper with double buffering; used by long runs.
#[derive(Debug, Clone)]
pub struct Solver {
    grid: GridSpec,
    j: usize,
    cur: Vec<f64>,
    next: Vec<f64>,
}

impl Solver {
    pub fn new(state: SolverState) -> Self {
        let grid = state.grid;
        let next = vec![0.0; grid.n() + 1];
        Self {
            grid,
            j: state.j,
            cur: state.profile.into_values(),
            next,
        }
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn values(&self) -> &[f64] {
        &self.cur
    }

    pub fn advance(&mut self) -> Result<()> {
        if self.j >= self.grid.m() {
            return Err(Error::StepPastEnd { m: self.grid.m() });
        }
        advance_level(&self.cur, &mut self.next, self.grid.delta_u(), self.grid.delta_t());
        std::mem::swap(&mut self.cur, &mut self.next);
        self.j += 1;
        Ok(())
    }

    /// Steps until level `j` is reached.
    pub fn advance_to(&mut self, j: usize) -> Result<()> {
        if j > self.grid.m() {
            return Err(Error::StepPastEnd { m: self.grid.m() });
        }
        while self.j < j {
            self.advance()?;
        }
        Ok(())
    }

    pub fn state(&self) -> SolverState {
        SolverState {
            grid: self.grid,
            j: self.j,
            profile: MeshProfile::new(self.grid, self.cur.clone())
                .expect("solver keeps n + 1 finite values"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionStatus {
    Pass,
    Fail,
    NotEvaluated,
}

impl fmt::Display for ConditionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::NotEvaluated => "NOT-EVALUATED",
        })
    }
}

/// A single hypothesis with its margin; `margin >= 0` passes (`> 0` when strict).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub margin: Option<f64>,
    pub strict: bool,
}

impl Condition {
    fn evaluated(name: &'static str, margin: f64) -> Self {
        Self { name, margin: Some(margin), strict: false }
    }

    pub fn status(&self) -> ConditionStatus {
        match self.margin {
            None => ConditionStatus::NotEvaluated,
            Some(m) if m > 0.0 || (!self.strict && m == 0.0) => ConditionStatus::Pass,
            Some(_) => ConditionStatus::Fail,
        }
    }

    pub fn passed(&self) -> bool {
        self.status() == ConditionStatus::Pass
    }
}

/// Every hypothesis of the stability and convergence results, with margins.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// `du^2 - 2 dt`
    pub cfl: Condition,
    /// `2 rho0 - du`
    pub domain: Condition,
    /// `rho0 - du (1 + |D+ w^0|^2)`
    pub gradient: Condition,
    /// `|D0 w^0|`, must be strictly positive
    pub d0_nonvanishing: Condition,
    /// `1 - 1/(1 + |D0 w^0|^2) - du`; needs a derivative bound
    pub convergence_cond1: Condition,
    /// second convergence inequality, lhs minus rhs; needs a derivative bound
    pub convergence_cond2: Condition,
}

impl StabilityReport {
    pub fn conditions(&self) -> [&Condition; 6] {
        [
            &self.cfl,
            &self.domain,
            &self.gradient,
            &self.d0_nonvanishing,
            &self.convergence_cond1,
            &self.convergence_cond2,
        ]
    }

    /// The hypotheses every run depends on: CFL, domain and gradient.
    pub fn is_stable(&self) -> bool {
        self.cfl.passed() && self.domain.passed() && self.gradient.passed()
    }

    /// Failed hard conditions, as "NAME margin=..." strings.
    pub fn failures(&self) -> Vec<String> {
        [&self.cfl, &self.domain, &self.gradient]
            .into_iter()
            .filter(|c| !c.passed())
            .map(|c| format!("{} margin={}", c.name, c.margin.unwrap_or(f64::NAN)))
            .collect()
    }
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.conditions() {
            match c.margin {
                Some(m) => writeln!(f, "{} {} {}", c.name, c.status(), m)?,
                None => writeln!(f, "{} {} -", c.name, c.status())?,
            }
        }
        Ok(())
    }
}

/// Evaluates the step-size, domain and initial-gradient hypotheses, plus the
/// two convergence inequalities when a derivative bound is supplied.
pub fn validate_stability(
    grid: &GridSpec,
    w0: &MeshProfile,
    derivative_bound: Option<f64>,
) -> StabilityReport {
    let du = grid.delta_u();
    let rho0 = grid.rho0();
    let dplus = dplus_sup_of(w0.values(), du);
    let dzero = w0.dzero_sup_norm();
    let a0 = 1.0 / (1.0 + dzero * dzero);

    let (cond1, cond2) = match derivative_bound {
        Some(b) => {
            let rhs = du / 2.0 / rho0
                + du / 2.0 * (1.0 / rho0 * (1.0 + du * du / 6.0) * b + (1.0 + du * du / 12.0) * b);
            (Some(1.0 - a0 - du), Some(a0 - rhs))
        }
        None => (None, None),
    };

    StabilityReport {
        cfl: Condition::evaluated("CFL", du * du - 2.0 * grid.delta_t()),
        domain: Condition::evaluated("DOMAIN", 2.0 * rho0 - du),
        gradient: Condition::evaluated("GRADIENT", rho0 - du * (1.0 + dplus * dplus)),
        d0_nonvanishing: Condition {
            name: "D0-NONVANISHING",
            margin: Some(dzero),
            strict: true,
        },
        convergence_cond1: Condition { name: "CONVERGENCE-1", margin: cond1, strict: false },
        convergence_cond2: Condition { name: "CONVERGENCE-2", margin: cond2, strict: false },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StabilityPolicy {
    #[default]
    Enforce,
    AllowUnstable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub j: usize,
    pub profile: MeshProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: StabilityReport,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<DiagnosticsRecord>,
}

/// Drives the scheme from `w0` to `T`.
///
/// Each requested time is recorded at the first level at or after it
/// (requests that land on the same level are recorded once). Diagnostics are
/// taken at level 0, at every snapshot, and at the final level.
pub fn run(
    grid: &GridSpec,
    w0: &MeshProfile,
    snapshot_times: &[f64],
    policy: StabilityPolicy,
) -> Result<RunOutput> {
    if w0.grid().rho0() != grid.rho0() || w0.n() != grid.n() {
        return Err(Error::GridMismatch);
    }
    if let Some(&t) = snapshot_times
        .iter()
        .find(|&&t| !(t >= 0.0 && t <= grid.t_final()))
    {
        return Err(Error::InvalidGrid(format!(
            "snapshot time {t} outside [0, {}]",
            grid.t_final()
        )));
    }
    let report = validate_stability(grid, w0, None);
    if policy == StabilityPolicy::Enforce && !report.is_stable() {
        return Err(Error::Unstable(Box::new(report)));
    }

    let w0 = MeshProfile::new(*grid, w0.values().to_vec())?;
    let last = if grid.t_final() == 0.0 { 0 } else { grid.m() };
    let mut snap_levels: Vec<usize> = snapshot_times
        .iter()
        .map(|&t| grid.level_at_or_after(t))
        .collect();
    snap_levels.sort_unstable();
    snap_levels.dedup();
    let mut diag_levels = snap_levels.clone();
    diag_levels.extend([0, last]);
    diag_levels.sort_unstable();
    diag_levels.dedup();

    let mut solver = Solver::new(SolverState::initial(w0)?);
    let mut snapshots = Vec::with_capacity(snap_levels.len());
    let mut diagnostics = Vec::with_capacity(diag_levels.len());
    for &level in &diag_levels {
        solver.advance_to(level)?;
        let state = solver.state();
        diagnostics.push(record(&state));
        if snap_levels.binary_search(&level).is_ok() {
            snapshots.push(Snapshot {
                t: state.time(),
                j: level,
                profile: state.profile,
            });
        }
    }
    Ok(RunOutput {
        report,
        snapshots,
        diagnostics,
    })
}
