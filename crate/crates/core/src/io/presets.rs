//! Built-in parameter sets for `--preset`: `r = 0.91`, `a = b = 1/√2`,
//! `γ = 1` for both impurities and the listed couplings.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use super::config::GridSpec;
use crate::entanglement::{EwlFamily, EwlState};
use crate::noise::RtnParams;

pub const R_EXP: f64 = 0.91;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Identical qubits at g = 0.5, δp0 = 0 and ±1.
    Fig1a,
    /// Identical qubits at g = 5, δp0 = 0 and ±1.
    Fig1b,
    /// ESD time versus g for r = 0.91, 0.8, 0.7.
    Fig2,
    /// g_B = 0 and g_A in {0.5, 1.1, 2, 5}.
    Fig3a,
    /// g_B = 2 and g_A in {0.5, 1.1, 2, 5}.
    Fig3b,
    /// g_B = 5 and g_A in {1.1, 5, 10}.
    #[value(name = "fig3b-inset")]
    Fig3bInset,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub label: String,
    pub state: EwlState,
    pub qubit_a: RtnParams,
    pub qubit_b: RtnParams,
}

pub fn experimental_state() -> EwlState {
    EwlState {
        family: EwlFamily::OneExcitation,
        r: R_EXP,
        a_mod: FRAC_1_SQRT_2,
    }
}

fn qubit(g: f64, delta_p0: f64) -> RtnParams {
    RtnParams::from_ratio(g, 1.0, delta_p0).expect("preset parameters are valid")
}

fn identical(g: f64, delta_p0: f64, label: &str) -> Curve {
    Curve {
        label: label.to_string(),
        state: experimental_state(),
        qubit_a: qubit(g, delta_p0),
        qubit_b: qubit(g, delta_p0),
    }
}

fn pair(g_a: f64, g_b: f64) -> Curve {
    Curve {
        label: format!("gA={g_a}_gB={g_b}"),
        state: experimental_state(),
        qubit_a: qubit(g_a, 0.0),
        qubit_b: qubit(g_b, 0.0),
    }
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1a => "fig1a",
            Preset::Fig1b => "fig1b",
            Preset::Fig2 => "fig2",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig3bInset => "fig3b-inset",
        }
    }

    /// Concurrence curves of the preset; empty for `fig2`.
    pub fn curves(self) -> Vec<Curve> {
        match self {
            Preset::Fig1a => vec![identical(0.5, 0.0, "dp0=0"), identical(0.5, 1.0, "dp0=pm1")],
            Preset::Fig1b => vec![identical(5.0, 0.0, "dp0=0"), identical(5.0, 1.0, "dp0=pm1")],
            Preset::Fig2 => Vec::new(),
            Preset::Fig3a => [0.5, 1.1, 2.0, 5.0].iter().map(|&g| pair(g, 0.0)).collect(),
            Preset::Fig3b => [0.5, 1.1, 2.0, 5.0].iter().map(|&g| pair(g, 2.0)).collect(),
            Preset::Fig3bInset => [1.1, 5.0, 10.0].iter().map(|&g| pair(g, 5.0)).collect(),
        }
    }

    pub fn grid(self) -> GridSpec {
        let (t_max, n_points) = match self {
            Preset::Fig1a => (40.0, 4001),
            Preset::Fig1b => (6.0, 6001),
            Preset::Fig2 => (1000.0, 2),
            Preset::Fig3a | Preset::Fig3b => (30.0, 3001),
            Preset::Fig3bInset => (4.0, 4001),
        };
        GridSpec { t_max, n_points }
    }
}

/// Couplings and mixing values of the ESD-time table.
pub fn fig2_axes() -> (Vec<f64>, Vec<f64>) {
    let g = (10..=90).map(|k| k as f64 / 100.0).collect();
    (g, vec![R_EXP, 0.8, 0.7])
}

/// Mixing values for the `g_th(r)` curve.
pub fn threshold_r_grid() -> Vec<f64> {
    (0..=20).map(|k| (60 + 2 * k) as f64 / 100.0).collect()
}
