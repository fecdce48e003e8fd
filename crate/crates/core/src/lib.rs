//! Exact entanglement dynamics of two independent qubits, each dephased by a
//! bistable impurity producing random telegraph noise (RTN).
//!
//! The crate is organised bottom-up:
//!
//! - [`noise`]: closed-form single-qubit coherence `q(t)` and spectral helpers.
//! - [`telegraph`]: event-driven Monte Carlo of the telegraph process, used as
//!   an independent oracle for the closed form.
//! - [`entanglement`]: extended Werner-like initial states, X-state propagation
//!   and concurrence (X-state formula plus the general Wootters construction).
//! - [`analysis`]: sudden death, revivals, final death, the revival threshold
//!   `g_th` and parameter sweeps.
//! - [`io`]: run configuration, presets and deterministic CSV/JSON output
//!   used by the `rtn-entangle` binary.
//!
//! Library functions take physical time `t` and rates in the same units; the
//! CLI reports the dimensionless `γ_A t`.

pub mod analysis;
pub mod entanglement;
mod error;
pub mod io;
pub mod noise;
pub mod telegraph;

pub use error::{Error, Result};
pub use num_complex::Complex64 as Complex;

pub use analysis::{
    concurrence_series, detect_events, esd_time_analytic, esd_time_numeric, find_g_threshold,
    sweep, EventReport, ThresholdResult,
};
pub use entanglement::{
    concurrence_wootters, concurrence_x, evolve_xstate, initial_concurrence, k_function, make_ewl,
    purity_ewl, r_star, EwlFamily, EwlState, XState,
};
pub use noise::{
    alpha_of, coherence_modulus, coherence_q, coherence_terms, golden_rule_rate, power_spectrum,
    CoherenceTerms, RtnParams,
};
pub use telegraph::{ensemble_coherence, sample_trajectory_phase, EnsembleEstimate, McConfig};
