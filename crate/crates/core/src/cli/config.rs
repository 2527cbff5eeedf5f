use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::convergence::auto_grid;
use crate::error::{Error, Result};
use crate::mesh::GridSpec;
use crate::profiles::ProfileSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AutoKeyword {
    Auto,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum RawDt {
    Keyword(AutoKeyword),
    Value(f64),
}

/// Time step selection: `"auto"` or an explicit `dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawDt", into = "RawDt")]
pub enum DtPolicy {
    Auto,
    Explicit(f64),
}

impl From<RawDt> for DtPolicy {
    fn from(raw: RawDt) -> Self {
        match raw {
            RawDt::Keyword(AutoKeyword::Auto) => Self::Auto,
            RawDt::Value(dt) => Self::Explicit(dt),
        }
    }
}

impl From<DtPolicy> for RawDt {
    fn from(p: DtPolicy) -> Self {
        match p {
            DtPolicy::Auto => RawDt::Keyword(AutoKeyword::Auto),
            DtPolicy::Explicit(dt) => RawDt::Value(dt),
        }
    }
}

impl Default for DtPolicy {
    fn default() -> Self {
        Self::Auto
    }
}

/// One JSON document describing a simulation. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub rho0: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub n: usize,
    pub dt_policy: DtPolicy,
    pub profile: ProfileSpec,
    pub snapshots: usize,
    pub output_dir: PathBuf,
    pub allow_unstable: bool,
    #[serde(rename = "derivative_bound_B", skip_serializing_if = "Option::is_none")]
    pub derivative_bound: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            rho0: 3.0,
            t_final: 4.0,
            n: 160,
            dt_policy: DtPolicy::Auto,
            profile: ProfileSpec::default(),
            snapshots: 9,
            output_dir: PathBuf::from("."),
            allow_unstable: false,
            derivative_bound: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfig = serde_json::from_str(&text)?;
        config.check()?;
        Ok(config)
    }

    pub fn check(&self) -> Result<()> {
        if self.snapshots < 2 {
            return Err(Error::Config(format!("snapshots must be at least 2, got {}", self.snapshots)));
        }
        if let DtPolicy::Explicit(dt) = self.dt_policy {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::Config(format!("explicit dt must be positive, got {dt}")));
            }
        }
        Ok(())
    }

    /// The simulation grid; an explicit `dt` must divide `T` to within one ulp.
    pub fn grid(&self) -> Result<GridSpec> {
        match self.dt_policy {
            DtPolicy::Auto => auto_grid(self.rho0, self.n, self.t_final),
            DtPolicy::Explicit(_) if self.t_final == 0.0 => GridSpec::new(self.rho0, self.n, 0.0, 1),
            DtPolicy::Explicit(dt) => {
                let steps = (self.t_final / dt).round();
                let ulp = self.t_final.next_up() - self.t_final;
                if steps < 1.0 || (steps * dt - self.t_final).abs() > ulp {
                    return Err(Error::Config(format!(
                        "dt = {dt} does not divide T = {} into whole steps",
                        self.t_final
                    )));
                }
                GridSpec::new(self.rho0, self.n, self.t_final, steps as usize)
            }
        }
    }

    /// `snapshots` equally spaced times on `[0, T]`, endpoints included.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let last = self.snapshots - 1;
        (0..=last)
            .map(|i| {
                if i == last {
                    self.t_final
                } else {
                    self.t_final * i as f64 / last as f64
                }
            })
            .collect()
    }
}
