//! Scalar observables per snapshot and monitors built on them: the
//! `D_t D+` commutation identity, the exponential area bound, log-linear
//! decay fits and length monotonicity.

use crate::error::{Error, Result};
use crate::mesh::{d_zero_at, length_of, MeshProfile};
use crate::solver::SolverState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub sup_h: f64,
    pub sup_dplus: f64,
    pub length: f64,
    pub area: f64,
}

impl DiagnosticsRecord {
    pub fn from_profile(t: f64, f: &MeshProfile) -> Self {
        Self {
            t,
            sup_h: f.sup_norm(),
            sup_dplus: f.dplus_sup_norm(),
            length: f.discrete_length(),
            area: f.discrete_area(),
        }
    }

    /// Graphicality constant `1 / sqrt(1 + |D+ w|^2)` of this record.
    pub fn graphicality(&self) -> f64 {
        1.0 / (1.0 + self.sup_dplus * self.sup_dplus).sqrt()
    }
}

pub fn record(state: &SolverState) -> DiagnosticsRecord {
    DiagnosticsRecord::from_profile(state.time(), state.profile())
}

#[inline]
fn coefficient_a(v: &[f64], du: f64, k: usize) -> f64 {
    let d0 = d_zero_at(v, du, k);
    1.0 / (1.0 + d0 * d0)
}

/// Coefficients `(X_k, Y_k)` of
/// `D_t D+ w = X D2 D+ w + Y D0 D+ w` at node `k`, for `1 <= k <= n-2`.
pub fn dtdplus_coefficients(f: &MeshProfile, k: usize, length: f64) -> Result<(f64, f64)> {
    let n = f.n();
    if k == 0 || k + 2 > n {
        return Err(Error::IndexOutOfRange { op: "D_t D+", k, n });
    }
    let v = f.values();
    let du = f.grid().delta_u();
    let a_k = coefficient_a(v, du, k);
    let a_k1 = coefficient_a(v, du, k + 1);
    let d0_sum = d_zero_at(v, du, k + 1) + d_zero_at(v, du, k);
    let x = 0.5 * (a_k + a_k1);
    let y = (a_k1 - a_k) / du + (a_k + a_k1) / (2.0 * length)
        - d0_sum * d0_sum * a_k * a_k1 / (2.0 * length);
    Ok((x, y))
}

/// Largest residual of the commutation identity between two consecutive
/// levels, over `1 <= k <= n-2`. `None` when that range is empty.
///
/// The left side is `(D+ w^{j+1} - D+ w^j) / dt`; every right-side term is
/// taken at level `j`.
pub fn check_dtdplus_identity(state_j: &SolverState, state_j1: &SolverState) -> Result<Option<f64>> {
    if state_j1.j() != state_j.j() + 1 {
        return Err(Error::NotConsecutive {
            from: state_j.j(),
            to: state_j1.j(),
        });
    }
    if state_j.grid() != state_j1.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = state_j.grid();
    let n = grid.n();
    if n < 3 {
        return Ok(None);
    }
    let (du, dt) = (grid.delta_u(), grid.delta_t());
    let old = state_j.profile();
    let new = state_j1.profile();
    let dp_old = old.d_plus_all();
    let dp_new = new.d_plus_all();
    let length = length_of(old.values(), du);

    let mut worst: f64 = 0.0;
    for k in 1..=n - 2 {
        let lhs = (dp_new[k] - dp_old[k]) / dt;
        let d2dp = (dp_old[k + 1] - 2.0 * dp_old[k] + dp_old[k - 1]) / (du * du);
        let d0dp = (dp_old[k + 1] - dp_old[k - 1]) / (2.0 * du);
        let (x, y) = dtdplus_coefficients(old, k, length)?;
        worst = worst.max((lhs - (x * d2dp + y * d0dp)).abs());
    }
    Ok(Some(worst))
}

/// Smallest slack of `1.1 * A(0) exp(-C_G^2 t / (rho0 L0)) - A(t)` over the
/// history, with `C_G` taken from the first record. Positive means the
/// bound holds everywhere.
pub fn area_decay_margin(history: &[DiagnosticsRecord], rho0: f64, l0: f64) -> f64 {
    const SLACK: f64 = 1.1;
    let Some(first) = history.first() else {
        return f64::INFINITY;
    };
    let rate = decay_floor(first, rho0, l0);
    history
        .iter()
        .map(|r| SLACK * first.area * (-rate * (r.t - first.t)).exp() - r.area)
        .fold(f64::INFINITY, f64::min)
}

/// The guaranteed exponential area decay rate `C_G^2 / (rho0 L0)`.
pub fn decay_floor(initial: &DiagnosticsRecord, rho0: f64, l0: f64) -> f64 {
    let cg = initial.graphicality();
    cg * cg / (rho0 * l0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares fit of `ln A` against `t` over `[T/4, T]`, `T` being the
/// last recorded time.
pub fn fit_decay_rate(history: &[DiagnosticsRecord]) -> Result<DecayFit> {
    let t_end = history
        .last()
        .ok_or_else(|| Error::DegenerateFit("empty history".into()))?
        .t;
    fit_decay_rate_window(history, t_end / 4.0, t_end)
}

pub fn fit_decay_rate_window(history: &[DiagnosticsRecord], t0: f64, t1: f64) -> Result<DecayFit> {
    let window: Vec<&DiagnosticsRecord> = history.iter().filter(|r| r.t >= t0 && r.t <= t1).collect();
    let pts: Vec<(f64, f64)> = window
        .iter()
        .filter(|r| r.area > 0.0)
        .map(|r| (r.t, r.area.ln()))
        .collect();
    if pts.len() < 3 {
        let reason = if !window.is_empty() && window.iter().all(|r| r.area <= 0.0) {
            "area vanished in the window (closure achieved)".to_string()
        } else {
            format!("{} positive-area records in [{t0}, {t1}], need 3", pts.len())
        };
        return Err(Error::DegenerateFit(reason));
    }
    let count = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / count;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        let (dt, dy) = (t - mean_t, y - mean_y);
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if stt == 0.0 {
        return Err(Error::DegenerateFit("all window records share one time".into()));
    }
    let slope = sty / stt;
    let intercept = mean_y - slope * mean_t;
    let ss_res: f64 = pts
        .iter()
        .map(|&(t, y)| {
            let e = y - (intercept + slope * t);
            e * e
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(DecayFit {
        rate: -slope,
        r_squared,
        points: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthViolation {
    pub index: usize,
    pub t: f64,
    pub increase: f64,
}

/// Records whose length exceeds the previous record's by more than `1e-9`.
pub fn check_length_monotone(history: &[DiagnosticsRecord]) -> Vec<LengthViolation> {
    history
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| {
            let increase = w[1].length - w[0].length;
            (increase > 1e-9).then_some(LengthViolation {
                index: i + 1,
                t: w[1].t,
                increase,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::GridSpec;
    use crate::solver::step;
    use approx::assert_relative_eq;

    fn rec(t: f64, area: f64, length: f64) -> DiagnosticsRecord {
        DiagnosticsRecord { t, sup_h: 0.0, sup_dplus: 0.0, length, area }
    }

    #[test]
    fn record_examples() {
        let zero = MeshProfile::zeros(GridSpec::new(3.0, 10, 1.0, 100).unwrap());
        let r = DiagnosticsRecord::from_profile(0.0, &zero);
        assert_eq!((r.sup_h, r.sup_dplus, r.area), (0.0, 0.0, 0.0));
        assert_relative_eq!(r.length, 3.0, max_relative = 4.0 * f64::EPSILON);

        let tent = MeshProfile::new(GridSpec::new(2.0, 2, 1.0, 2).unwrap(), vec![0.0, 1.0, 0.0]).unwrap();
        let r = DiagnosticsRecord::from_profile(0.0, &tent);
        assert_eq!(r.sup_h, 1.0);
        assert_eq!(r.sup_dplus, 1.0);
        assert_relative_eq!(r.length, 2.0 * 2f64.sqrt());
        assert_eq!(r.area, 1.0);
    }

    #[test]
    fn coefficients_on_zero_and_constant_slope() {
        let grid = GridSpec::new(3.0, 10, 1.0, 100).unwrap();
        let zero = MeshProfile::zeros(grid);
        let (x, y) = dtdplus_coefficients(&zero, 3, 3.0).unwrap();
        assert_eq!(x, 1.0);
        assert_relative_eq!(y, 1.0 / 3.0);
        assert!(dtdplus_coefficients(&zero, 0, 3.0).is_err());
        assert!(dtdplus_coefficients(&zero, 9, 3.0).is_err());

        let s = 0.5;
        let lin = MeshProfile::from_fn(grid, |u| 2.0 - s * u).unwrap();
        let l = lin.discrete_length();
        let (x, y) = dtdplus_coefficients(&lin, 4, l).unwrap();
        let a = 1.0 / (1.0 + s * s);
        assert_relative_eq!(x, a, max_relative = 1e-14);
        assert_relative_eq!(y, a / l - (2.0 * s) * (2.0 * s) * a * a / (2.0 * l), max_relative = 1e-12);
    }

    #[test]
    fn identity_edge_cases() {
        let grid = GridSpec::new(3.0, 10, 1.0, 100).unwrap();
        let s0 = SolverState::initial(MeshProfile::zeros(grid)).unwrap();
        let s1 = step(&s0).unwrap();
        assert_eq!(check_dtdplus_identity(&s0, &s1).unwrap(), Some(0.0));
        assert!(matches!(check_dtdplus_identity(&s1, &s0), Err(Error::NotConsecutive { .. })));

        let tiny = GridSpec::new(2.0, 2, 1.0, 2).unwrap();
        let t0 = SolverState::initial(MeshProfile::new(tiny, vec![1.0, 1.0, 0.0]).unwrap()).unwrap();
        let t1 = step(&t0).unwrap();
        assert_eq!(check_dtdplus_identity(&t0, &t1).unwrap(), None);
    }

    #[test]
    fn area_margin_examples() {
        let zeros = [rec(0.0, 0.0, 3.0), rec(1.0, 0.0, 3.0)];
        assert!(area_decay_margin(&zeros, 3.0, 3.0) >= 0.0);
        let single = [rec(0.0, 2.0, 4.0)];
        assert_relative_eq!(area_decay_margin(&single, 3.0, 4.0), 0.2, max_relative = 1e-12);
    }

    #[test]
    fn decay_fit_examples() {
        let h: Vec<_> = (0..=40).map(|i| {
            let t = i as f64 * 0.1;
            rec(t, (-2.0 * t).exp(), 3.0)
        }).collect();
        let fit = fit_decay_rate(&h).unwrap();
        assert_relative_eq!(fit.rate, 2.0, max_relative = 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-10);

        let flat: Vec<_> = (0..=8).map(|i| rec(i as f64 * 0.5, 0.7, 3.0)).collect();
        let fit = fit_decay_rate(&flat).unwrap();
        assert_eq!(fit.rate, 0.0);

        let closed: Vec<_> = (0..=8).map(|i| rec(i as f64 * 0.5, 0.0, 3.0)).collect();
        let err = fit_decay_rate(&closed).unwrap_err();
        assert!(err.to_string().contains("closure"));
    }

    #[test]
    fn length_monotone_examples() {
        let flat: Vec<_> = (0..5).map(|i| rec(i as f64, 0.0, 3.0)).collect();
        assert!(check_length_monotone(&flat).is_empty());
        let rising = [rec(0.0, 0.0, 3.0), rec(1.0, 0.0, 3.1), rec(2.0, 0.0, 3.05), rec(3.0, 0.0, 3.2)];
        let v = check_length_monotone(&rising);
        assert_eq!(v.iter().map(|x| x.index).collect::<Vec<_>>(), vec![1, 3]);
    }
}
