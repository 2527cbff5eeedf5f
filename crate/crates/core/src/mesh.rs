//! Uniform node-indexed grids, mesh functions, and the finite-difference
//! operators and functionals the scheme is built from.
//!
//! Operators are pointwise: they take a node index and return a scalar, and
//! they refuse nodes where the stencil does not exist (`D+` at `n`, `D-` at
//! `0`, `D0` and `D2` on either boundary).

use crate::error::{Error, Result};

/// Space and time discretisation of `[0, rho0] x [0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    rho0: f64,
    n: usize,
    delta_u: f64,
    t_final: f64,
    m: usize,
    delta_t: f64,
}

impl GridSpec {
    /// Builds a grid with `n` spatial cells and `m` time steps.
    ///
    /// `t_final == 0` is allowed and yields `delta_t == 0`; such a grid
    /// admits no steps.
    pub fn new(rho0: f64, n: usize, t_final: f64, m: usize) -> Result<Self> {
        if !(rho0.is_finite() && rho0 > 0.0) {
            return Err(Error::InvalidGrid(format!("rho0 must be positive, got {rho0}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("n must be at least 2, got {n}")));
        }
        if !(t_final.is_finite() && t_final >= 0.0) {
            return Err(Error::InvalidGrid(format!("T must be non-negative, got {t_final}")));
        }
        if m < 1 {
            return Err(Error::InvalidGrid("m must be at least 1".into()));
        }
        Ok(Self {
            rho0,
            n,
            delta_u: rho0 / n as f64,
            t_final,
            m,
            delta_t: t_final / m as f64,
        })
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta_u(&self) -> f64 {
        self.delta_u
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    /// Spatial coordinate of node `k`.
    pub fn node(&self, k: usize) -> f64 {
        k as f64 * self.delta_u
    }

    /// Time of level `j`. The last level reports `T` itself so that
    /// `m * delta_t` rounding never shows up in outputs.
    pub fn time_at(&self, j: usize) -> f64 {
        if j >= self.m {
            self.t_final
        } else {
            j as f64 * self.delta_t
        }
    }

    /// First time level whose time is at or after `t`, clamped to `[0, m]`.
    pub fn level_at_or_after(&self, t: f64) -> usize {
        if self.delta_t == 0.0 || t <= 0.0 {
            return 0;
        }
        // relative slack so that t = j*dt computed elsewhere lands on j
        let ratio = t / self.delta_t;
        let j = (ratio - 1e-9 * ratio.max(1.0)).ceil().max(0.0);
        if j >= self.m as f64 {
            self.m
        } else {
            j as usize
        }
    }

    /// Same spatial grid with a different time discretisation.
    pub fn with_time(&self, t_final: f64, m: usize) -> Result<Self> {
        Self::new(self.rho0, self.n, t_final, m)
    }

    fn same_space(&self, other: &GridSpec) -> bool {
        self.rho0 == other.rho0 && self.n == other.n
    }
}

/// Heights `w_0..w_n` at the nodes of a grid at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshProfile {
    grid: GridSpec,
    values: Vec<f64>,
}

impl MeshProfile {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n + 1 {
            return Err(Error::LengthMismatch {
                expected: grid.n + 1,
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { k });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n + 1],
        }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..=grid.n).map(|k| f(grid.node(k))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    fn check(&self, op: &'static str, k: usize, lo: usize, hi: usize) -> Result<()> {
        if k < lo || k > hi {
            Err(Error::IndexOutOfRange { op, k, n: self.grid.n })
        } else {
            Ok(())
        }
    }

    /// `(f_{k+1} - f_k) / du`, defined for `0 <= k <= n-1`.
    pub fn d_plus(&self, k: usize) -> Result<f64> {
        self.check("D+", k, 0, self.grid.n - 1)?;
        Ok(d_plus_at(&self.values, self.grid.delta_u, k))
    }

    /// `(f_k - f_{k-1}) / du`, defined for `1 <= k <= n`.
    pub fn d_minus(&self, k: usize) -> Result<f64> {
        self.check("D-", k, 1, self.grid.n)?;
        Ok((self.values[k] - self.values[k - 1]) / self.grid.delta_u)
    }

    /// `(f_{k+1} - f_{k-1}) / (2 du)`, interior nodes only.
    pub fn d_zero(&self, k: usize) -> Result<f64> {
        self.check("D0", k, 1, self.grid.n - 1)?;
        Ok(d_zero_at(&self.values, self.grid.delta_u, k))
    }

    /// `(f_{k+1} - 2 f_k + f_{k-1}) / du^2`, interior nodes only.
    pub fn d_second(&self, k: usize) -> Result<f64> {
        self.check("D2", k, 1, self.grid.n - 1)?;
        Ok(d_second_at(&self.values, self.grid.delta_u, k))
    }

    /// `D+` at every node where it is defined (`n` entries).
    pub fn d_plus_all(&self) -> Vec<f64> {
        (0..self.grid.n)
            .map(|k| d_plus_at(&self.values, self.grid.delta_u, k))
            .collect()
    }

    /// `D0` at every interior node (`n - 1` entries, node `k` at index `k - 1`).
    pub fn d_zero_all(&self) -> Vec<f64> {
        (1..self.grid.n)
            .map(|k| d_zero_at(&self.values, self.grid.delta_u, k))
            .collect()
    }

    /// `L[v] = du * sum_{i<n} sqrt(1 + (D+v)_i^2)`, summed left to right.
    pub fn discrete_length(&self) -> f64 {
        length_of(&self.values, self.grid.delta_u)
    }

    /// Trapezoid-rule area under the profile.
    pub fn discrete_area(&self) -> f64 {
        let v = &self.values;
        let n = self.grid.n;
        let mut sum = 0.5 * v[0];
        for &x in &v[1..n] {
            sum += x;
        }
        sum += 0.5 * v[n];
        self.grid.delta_u * sum
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn dplus_sup_norm(&self) -> f64 {
        dplus_sup_of(&self.values, self.grid.delta_u)
    }

    /// Maximum of `|D0 w|` over interior nodes.
    pub fn dzero_sup_norm(&self) -> f64 {
        (1..self.grid.n).fold(0.0, |acc, k| {
            acc.max(d_zero_at(&self.values, self.grid.delta_u, k).abs())
        })
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Nodewise difference `self - other` on a shared grid.
    pub fn difference(&self, other: &MeshProfile) -> Result<MeshProfile> {
        if !self.grid.same_space(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        MeshProfile::new(self.grid, values)
    }

    /// Injection onto the grid with `n / factor` cells: `coarse_k = fine_{k * factor}`.
    pub fn restrict(&self, factor: usize) -> Result<MeshProfile> {
        let n = self.grid.n;
        if factor == 0 || n % factor != 0 || n / factor < 2 {
            return Err(Error::Restriction { factor, n });
        }
        let grid = GridSpec::new(self.grid.rho0, n / factor, self.grid.t_final, self.grid.m)?;
        let values = self.values.iter().step_by(factor).copied().collect();
        MeshProfile::new(grid, values)
    }
}

#[inline]
pub(crate) fn d_plus_at(v: &[f64], du: f64, k: usize) -> f64 {
    (v[k + 1] - v[k]) / du
}

#[inline]
pub(crate) fn d_zero_at(v: &[f64], du: f64, k: usize) -> f64 {
    (v[k + 1] - v[k - 1]) / (2.0 * du)
}

#[inline]
pub(crate) fn d_second_at(v: &[f64], du: f64, k: usize) -> f64 {
    (v[k + 1] - 2.0 * v[k] + v[k - 1]) / (du * du)
}

/// `du * sqrt(1 + (d/du)^2)` summed as `sqrt(du^2 + d^2)`, which needs no division.
pub(crate) fn length_of(v: &[f64], du: f64) -> f64 {
    let du2 = du * du;
    let mut sum = 0.0;
    for pair in v.windows(2) {
        let d = pair[1] - pair[0];
        sum += (du2 + d * d).sqrt();
    }
    sum
}

pub(crate) fn dplus_sup_of(v: &[f64], du: f64) -> f64 {
    v.windows(2)
        .fold(0.0, |acc, p| acc.max(((p[1] - p[0]) / du).abs()))
}
