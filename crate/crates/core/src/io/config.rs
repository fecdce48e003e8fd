//! JSON run configuration. Keys mirror the library types; everything except
//! `qubit_a` has a default.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::analysis::{time_grid, SweepSpec, ThresholdSearch};
use crate::entanglement::{EwlFamily, EwlState};
use crate::noise::RtnParams;
use crate::telegraph::McConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// End of the grid in units of `γ_A t`.
    pub t_max: f64,
    pub n_points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            t_max: 30.0,
            n_points: 3001,
        }
    }
}

impl GridSpec {
    pub fn times(&self) -> crate::Result<Vec<f64>> {
        time_grid(self.t_max, self.n_points)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// Qubit parameters as written in a config file; `omega`, `gamma` and
/// `delta_p0` default to 0, 1 and 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSpec {
    #[serde(default)]
    pub omega: f64,
    pub v: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default)]
    pub delta_p0: f64,
}

fn one() -> f64 {
    1.0
}

impl QubitSpec {
    pub fn params(&self) -> crate::Result<RtnParams> {
        RtnParams::new(self.omega, self.v, self.gamma, self.delta_p0)
    }
}

impl From<RtnParams> for QubitSpec {
    fn from(p: RtnParams) -> Self {
        Self {
            omega: p.omega,
            v: p.v,
            gamma: p.gamma,
            delta_p0: p.delta_p0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    pub n_trajectories: usize,
    #[serde(default)]
    pub seed: u64,
    /// Times in units of `γ_A t`; defaults to the run grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<Vec<f64>>,
    #[serde(default = "one")]
    pub flip_rate_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_mod: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_p0: Option<f64>,
    /// When present, one threshold per entry (the `g_th(r)` curve).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub search: Option<ThresholdSearch>,
}

fn default_state() -> EwlState {
    EwlState {
        family: EwlFamily::OneExcitation,
        r: 0.91,
        a_mod: FRAC_1_SQRT_2,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub qubit_a: QubitSpec,
    /// Defaults to a copy of `qubit_a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit_b: Option<QubitSpec>,
    #[serde(default = "default_state")]
    pub state: EwlState,
    #[serde(default)]
    pub grid: GridSpec,
    /// Horizon for event detection, in units of `γ_A t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration used when only a preset is given.
    pub fn preset_base() -> Self {
        Self {
            qubit_a: QubitSpec {
                omega: 0.0,
                v: 0.0,
                gamma: 1.0,
                delta_p0: 0.0,
            },
            qubit_b: None,
            state: default_state(),
            grid: GridSpec::default(),
            horizon: None,
            mc: None,
            threshold: None,
            sweep: None,
            output: OutputSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.qubit_a.params()?;
        self.qubit_b().params()?;
        self.state.validate()?;
        self.grid.times()?;
        if let Some(h) = self.horizon {
            if !(h.is_finite() && h > 0.0) {
                return Err(CliError::Config(format!(
                    "horizon must be positive, got {h}"
                )));
            }
        }
        Ok(())
    }

    pub fn qubit_b(&self) -> QubitSpec {
        self.qubit_b.unwrap_or(self.qubit_a)
    }

    pub fn params(&self) -> crate::Result<(RtnParams, RtnParams)> {
        Ok((self.qubit_a.params()?, self.qubit_b().params()?))
    }

    /// Monte Carlo settings with times converted from `γ_A t` to `t`.
    pub fn mc_config(&self) -> Result<McConfig, CliError> {
        let spec = self
            .mc
            .as_ref()
            .ok_or_else(|| CliError::Config("mc-validate needs an `mc` section".into()))?;
        let gamma_a = self.qubit_a.gamma;
        let grid = match &spec.time_grid {
            Some(g) => g.clone(),
            None => self.grid.times()?,
        };
        let cfg = McConfig {
            n_trajectories: spec.n_trajectories,
            seed: spec.seed,
            time_grid: grid.iter().map(|x| x / gamma_a).collect(),
            flip_rate_scale: spec.flip_rate_scale,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
