//! Initial leading-edge profiles: the one-inflection sinusoid, its bump
//! perturbation, and curves ingested from digitised point data.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{GridSpec, MeshProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Inflection,
    Bump,
    /// Digitised `x,y` points, rescaled onto `[0, rho0]` and interpolated.
    Experimental,
    /// Nodal `u,h` values as written by the `profile` subcommand.
    File,
}

/// How the sinusoid argument is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SinusoidScaling {
    /// `B = pi / (2 r1 rho0)`: single inflection at `u = r1 rho0`.
    #[default]
    Normalised,
    /// `B = pi / (2 r1)` with `A` built from `cos(B)`, taken at face value.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    #[serde(default = "default_r1")]
    pub r1: f64,
    #[serde(default = "default_r2")]
    pub r2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub scaling: SinusoidScaling,
}

fn default_r1() -> f64 {
    0.7
}

fn default_r2() -> f64 {
    2.0
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self::inflection(default_r1(), default_r2())
    }
}

impl ProfileSpec {
    pub fn inflection(r1: f64, r2: f64) -> Self {
        Self {
            kind: ProfileKind::Inflection,
            r1,
            r2,
            path: None,
            scaling: SinusoidScaling::Normalised,
        }
    }

    pub fn bump(r1: f64, r2: f64) -> Self {
        Self {
            kind: ProfileKind::Bump,
            ..Self::inflection(r1, r2)
        }
    }

    pub fn experimental(path: impl Into<PathBuf>) -> Self {
        Self {
            kind: ProfileKind::Experimental,
            path: Some(path.into()),
            ..Self::default()
        }
    }

    pub fn file(path: impl Into<PathBuf>) -> Self {
        Self {
            kind: ProfileKind::File,
            path: Some(path.into()),
            ..Self::default()
        }
    }

    /// Samples the profile on `grid`.
    pub fn build(&self, grid: GridSpec) -> Result<MeshProfile> {
        match self.kind {
            ProfileKind::Inflection => {
                Sinusoid::new(grid.rho0(), self.r1, self.r2, self.scaling)?.sample(grid)
            }
            ProfileKind::Bump => bump_profile_with(grid, self.r1, self.r2, self.scaling),
            ProfileKind::Experimental => load_experimental(self.require_path()?, grid),
            ProfileKind::File => load_nodal(self.require_path()?, grid),
        }
    }

    fn require_path(&self) -> Result<&Path> {
        self.path.as_deref().ok_or_else(|| {
            Error::InvalidParameter(format!("profile kind {:?} needs a path", self.kind))
        })
    }
}

/// Closed form `g1(u) = A cos(B u) + D` with `g1(rho0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinusoid {
    pub amplitude: f64,
    pub frequency: f64,
    pub offset: f64,
}

impl Sinusoid {
    pub fn new(rho0: f64, r1: f64, r2: f64, scaling: SinusoidScaling) -> Result<Self> {
        check_params(r1, r2)?;
        let frequency = match scaling {
            SinusoidScaling::Normalised => PI / (2.0 * r1 * rho0),
            SinusoidScaling::Literal => PI / (2.0 * r1),
        };
        let amplitude = match scaling {
            SinusoidScaling::Normalised => rho0 / (r2 * (1.0 + (frequency * rho0).cos().abs())),
            SinusoidScaling::Literal => rho0 / (r2 * (1.0 + frequency.cos().abs())),
        };
        let offset = -amplitude * (frequency * rho0).cos();
        Ok(Self {
            amplitude,
            frequency,
            offset,
        })
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.amplitude * (self.frequency * u).cos() + self.offset
    }

    fn sample(&self, grid: GridSpec) -> Result<MeshProfile> {
        let mut values: Vec<f64> = (0..=grid.n()).map(|k| self.eval(grid.node(k))).collect();
        // the closed form vanishes at rho0; remove the rounding residue
        values[grid.n()] = 0.0;
        MeshProfile::new(grid, values)
    }
}

fn check_params(r1: f64, r2: f64) -> Result<()> {
    if !(r1 > 0.5 && r1 < 1.0) {
        return Err(Error::InvalidParameter(format!("r1 must lie in (0.5, 1), got {r1}")));
    }
    if !(r2.is_finite() && r2 > 0.0) {
        return Err(Error::InvalidParameter(format!("r2 must be positive, got {r2}")));
    }
    Ok(())
}

pub fn inflection_profile(grid: GridSpec, r1: f64, r2: f64) -> Result<MeshProfile> {
    Sinusoid::new(grid.rho0(), r1, r2, SinusoidScaling::Normalised)?.sample(grid)
}

/// Compactly supported bump `m exp(-r / (r - (u - c)^2))` centred at
/// `c = rho0/2` with `r = (rho0 - c)/3` and `m = 2e`; zero off its support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub centre: f64,
    pub radius: f64,
    pub height: f64,
}

impl Bump {
    pub fn for_domain(rho0: f64) -> Self {
        let centre = rho0 / 2.0;
        Self {
            centre,
            radius: (rho0 - centre) / 3.0,
            height: 2.0 * 1f64.exp(),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let d = u - self.centre;
        let gap = self.radius - d * d;
        if gap <= 0.0 {
            0.0
        } else {
            self.height * (-self.radius / gap).exp()
        }
    }
}

pub fn bump_profile(grid: GridSpec, r1: f64, r2: f64) -> Result<MeshProfile> {
    bump_profile_with(grid, r1, r2, SinusoidScaling::Normalised)
}

fn bump_profile_with(
    grid: GridSpec,
    r1: f64,
    r2: f64,
    scaling: SinusoidScaling,
) -> Result<MeshProfile> {
    let base = Sinusoid::new(grid.rho0(), r1, r2, scaling)?;
    let bump = Bump::for_domain(grid.rho0());
    let mut values: Vec<f64> = (0..=grid.n())
        .map(|k| {
            let u = grid.node(k);
            base.eval(u) + bump.eval(u)
        })
        .collect();
    values[grid.n()] = 0.0;
    MeshProfile::new(grid, values)
}

fn read_pairs(path: &Path, header: [&str; 2]) -> Result<Vec<(f64, f64)>> {
    let data_err = |reason: String| Error::Data {
        path: path.to_path_buf(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let got: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if got != header {
        return Err(data_err(format!(
            "expected header \"{}\", found \"{}\"",
            header.join(","),
            got.join(",")
        )));
    }
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(data_err(format!("row {} has {} fields", row + 1, record.len())));
        }
        let parse = |field: &str| -> Result<f64> {
            field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| data_err(format!("row {}: non-numeric field {field:?}", row + 1)))
        };
        points.push((parse(&record[0])?, parse(&record[1])?));
    }
    Ok(points)
}

/// Ingests digitised `x,y` points: sorts by `x`, maps the `x` range affinely
/// onto `[0, rho0]`, shifts `y` so the right-most point sits at height 0,
/// interpolates linearly onto the nodes, clamps negatives to 0 and pins
/// `w_n = 0`.
pub fn load_experimental(path: &Path, grid: GridSpec) -> Result<MeshProfile> {
    let mut points = read_pairs(path, ["x", "y"])?;
    resample_points(&mut points, grid).map_err(|reason| Error::Data {
        path: path.to_path_buf(),
        reason,
    })
}

/// The ingestion pipeline behind [`load_experimental`], on in-memory points.
pub fn resample_points(
    points: &mut [(f64, f64)],
    grid: GridSpec,
) -> std::result::Result<MeshProfile, String> {
    if points.len() < 2 {
        return Err(format!("need at least 2 points, got {}", points.len()));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(format!("duplicate x value {}", w[0].0));
    }
    let (x0, x1) = (points[0].0, points[points.len() - 1].0);
    let y_last = points[points.len() - 1].1;
    let rho0 = grid.rho0();
    let mapped: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| ((x - x0) / (x1 - x0) * rho0, y - y_last))
        .collect();

    let mut values = Vec::with_capacity(grid.n() + 1);
    let mut seg = 0;
    for k in 0..=grid.n() {
        let u = grid.node(k).clamp(0.0, rho0);
        while seg + 2 < mapped.len() && mapped[seg + 1].0 < u {
            seg += 1;
        }
        let (xa, ya) = mapped[seg];
        let (xb, yb) = mapped[seg + 1];
        let y = if u == xa {
            ya
        } else if u == xb {
            yb
        } else {
            let s = ((u - xa) / (xb - xa)).clamp(0.0, 1.0);
            ya + s * (yb - ya)
        };
        values.push(y.max(0.0));
    }
    values[grid.n()] = 0.0;
    MeshProfile::new(grid, values).map_err(|e| e.to_string())
}

/// Reads nodal `u,h` rows (one per grid node) and takes the heights verbatim.
pub fn load_nodal(path: &Path, grid: GridSpec) -> Result<MeshProfile> {
    let points = read_pairs(path, ["u", "h"])?;
    let data_err = |reason: String| Error::Data {
        path: path.to_path_buf(),
        reason,
    };
    if points.len() != grid.n() + 1 {
        return Err(data_err(format!(
            "expected {} nodal rows, found {}",
            grid.n() + 1,
            points.len()
        )));
    }
    let tol = 1e-9 * grid.rho0();
    for (k, &(u, _)) in points.iter().enumerate() {
        if (u - grid.node(k)).abs() > tol {
            return Err(data_err(format!("row {k}: u = {u} is not grid node {}", grid.node(k))));
        }
    }
    MeshProfile::new(grid, points.into_iter().map(|(_, h)| h).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileWarning {
    /// `|D+ w_0|` exceeds `10 du`; the discrete Neumann condition at the axis is poorly met.
    NeumannMismatch { slope: f64, limit: f64 },
    /// Some height is negative.
    Negative { k: usize, value: f64 },
}

impl std::fmt::Display for ProfileWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NeumannMismatch { slope, limit } => {
                write!(f, "|D+ w_0| = {slope} exceeds {limit} (Neumann compatibility)")
            }
            Self::Negative { k, value } => write!(f, "negative height {value} at node {k}"),
        }
    }
}

/// Checks a profile against the boundary conditions `h_u(0) = 0`, `h(rho0) = 0`.
pub fn validate_profile(f: &MeshProfile) -> Result<Vec<ProfileWarning>> {
    let n = f.n();
    let last = f.values()[n];
    if last != 0.0 {
        return Err(Error::Dirichlet { value: last });
    }
    let mut warnings = Vec::new();
    let slope = f.d_plus(0)?.abs();
    let limit = 10.0 * f.grid().delta_u();
    if slope > limit {
        warnings.push(ProfileWarning::NeumannMismatch { slope, limit });
    }
    if let Some((k, &value)) = f.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
        warnings.push(ProfileWarning::Negative { k, value });
    }
    Ok(warnings)
}
