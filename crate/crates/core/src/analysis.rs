//! Dynamical events of the concurrence: sudden death (ESD), dark periods,
//! revivals and final death, plus the revival threshold `g_th` and sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::{initial_concurrence, k_unchecked, r_star, EwlFamily, EwlState};
use crate::error::{ensure, Error, Result};
use crate::noise::{coherence_terms, undamped_bracket, RtnParams};

/// Default classification threshold for "zero" concurrence.
pub const ZERO_TOL: f64 = 1e-9;
/// Default horizon in units of `1/γ_A` when some coupling is strong.
pub const BASE_HORIZON: f64 = 30.0;
/// Minimum samples per coherence oscillation period.
pub const MIN_POINTS_PER_PERIOD: f64 = 20.0;

const GOLDEN_ITERS: usize = 80;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcurrenceSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Shortest coherence oscillation period of the two qubits, if any
    /// coupling is strong. Used to check that event detection is resolved.
    pub min_period: Option<f64>,
}

/// `n_points` equally spaced times on `[0, t_max]`.
pub fn time_grid(t_max: f64, n_points: usize) -> Result<Vec<f64>> {
    ensure(
        t_max.is_finite() && t_max > 0.0,
        "t_max",
        t_max,
        "must be finite and positive",
    )?;
    ensure(
        n_points >= 2,
        "n_points",
        n_points as f64,
        "at least two points are required",
    )?;
    let last = (n_points - 1) as f64;
    Ok((0..n_points).map(|k| t_max * k as f64 / last).collect())
}

fn min_period(p_a: &RtnParams, p_b: &RtnParams) -> Option<f64> {
    [p_a.oscillation_period(), p_b.oscillation_period()]
        .into_iter()
        .flatten()
        .reduce(f64::min)
}

fn validate_inputs(state: &EwlState, p_a: &RtnParams, p_b: &RtnParams) -> Result<()> {
    state.validate()?;
    p_a.validate()?;
    p_b.validate()
}

pub fn concurrence_series(
    state: &EwlState,
    p_a: &RtnParams,
    p_b: &RtnParams,
    times: &[f64],
) -> Result<ConcurrenceSeries> {
    validate_inputs(state, p_a, p_b)?;
    crate::telegraph::validate_grid(times)?;
    let values = times
        .iter()
        .map(|&t| 2.0 * k_unchecked(t, state, p_a, p_b).max(0.0))
        .collect();
    Ok(ConcurrenceSeries {
        times: times.to_vec(),
        values,
        min_period: min_period(p_a, p_b),
    })
}

/// Scan-and-bisect settings for [`esd_time_numeric`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsdSearch {
    pub horizon: f64,
    pub grid_step: f64,
    pub refine_tol: f64,
}

/// First time at which `K` reaches zero, or `None` if `K > 0` on the whole
/// horizon. A state that is not entangled at `t = 0` reports `Some(0.0)`.
pub fn esd_time_numeric(
    state: &EwlState,
    p_a: &RtnParams,
    p_b: &RtnParams,
    search: &EsdSearch,
) -> Result<Option<f64>> {
    validate_inputs(state, p_a, p_b)?;
    let EsdSearch {
        horizon,
        grid_step,
        refine_tol,
    } = *search;
    ensure(
        horizon.is_finite() && horizon > 0.0,
        "horizon",
        horizon,
        "must be positive",
    )?;
    ensure(grid_step > 0.0, "grid_step", grid_step, "must be positive")?;
    ensure(
        refine_tol > 0.0,
        "refine_tol",
        refine_tol,
        "must be positive",
    )?;

    let k = |t: f64| k_unchecked(t, state, p_a, p_b);
    if k(0.0) <= 0.0 {
        return Ok(Some(0.0));
    }
    let steps = (horizon / grid_step).ceil() as usize;
    let mut prev = 0.0;
    for i in 1..=steps {
        let t = (i as f64 * grid_step).min(horizon);
        if k(t) <= 0.0 {
            let (mut lo, mut hi) = (prev, t);
            while hi - lo > refine_tol {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if k(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev = t;
    }
    Ok(None)
}

/// Weak-coupling ESD estimate for identical qubits at `δp0 = 0`, keeping only
/// the slow exponential of the coherence:
///
/// ```text
/// γ t_ESD = −2/(1 − α) · ln( sqrt((1 − g²)(1 − r) / (r|ab|)) / (1 + α) )
/// ```
///
/// Returns `t_ESD` (divide-out of `γ`).
pub fn esd_time_analytic(g: f64, r: f64, a_mod: f64, gamma: f64) -> Result<f64> {
    ensure(g > 0.0 && g < 1.0, "g", g, "the estimate needs 0 < g < 1")?;
    ensure(gamma > 0.0, "gamma", gamma, "must be positive")?;
    ensure(
        (0.0..=1.0).contains(&a_mod),
        "a_mod",
        a_mod,
        "must lie in [0, 1]",
    )?;
    let rs = r_star(a_mod)?;
    ensure(
        r > rs.value && r < 1.0 && !rs.product_family,
        "r",
        r,
        "the estimate needs r* < r < 1",
    )?;
    let alpha = ((1.0 - g) * (1.0 + g)).sqrt();
    let one_minus_alpha = g * g / (1.0 + alpha);
    let ab = a_mod * (1.0 - a_mod * a_mod).sqrt();
    let arg = ((1.0 - g * g) * (1.0 - r) / (r * ab)).sqrt() / (1.0 + alpha);
    Ok(-2.0 / one_minus_alpha * arg.ln() / gamma)
}

/// Horizon for event detection: `30/γ_A`, extended to three times the
/// slow-exponential ESD estimate when both couplings are weak.
pub fn default_horizon(state: &EwlState, p_a: &RtnParams, p_b: &RtnParams) -> f64 {
    let base = BASE_HORIZON / p_a.gamma;
    let (Some(ra), Some(rb)) = (slow_rate_or_zero(p_a), slow_rate_or_zero(p_b)) else {
        return base;
    };
    let rate = ra + rb;
    let mixed = (1.0 - state.r) / 4.0;
    if rate <= 0.0 || mixed <= 0.0 {
        return base;
    }
    let amp = |p: &RtnParams| {
        if p.v == 0.0 {
            1.0
        } else {
            coherence_terms(p).map(|t| t.big_a.norm()).unwrap_or(1.0)
        }
    };
    let ratio = state.r * state.ab() * amp(p_a) * amp(p_b) / mixed;
    if ratio <= 1.0 {
        return base;
    }
    (3.0 * ratio.ln() / rate).clamp(base, 1e6)
}

fn slow_rate_or_zero(p: &RtnParams) -> Option<f64> {
    if p.v == 0.0 {
        Some(0.0)
    } else {
        p.slow_rate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Revival {
    pub t_peak: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventReport {
    /// First sampled time with zero concurrence.
    pub esd_time: Option<f64>,
    pub revivals: Vec<Revival>,
    /// Start of the dark interval that extends to the horizon; `None` if the
    /// state is still entangled at the horizon.
    pub final_death_time: Option<f64>,
    pub dark_intervals: Vec<(f64, f64)>,
    pub horizon: f64,
    pub grid_step: f64,
}

struct Run {
    dark: bool,
    start: usize,
    end: usize,
}

fn runs(values: &[f64], zero_tol: f64) -> Vec<Run> {
    let mut out: Vec<Run> = Vec::new();
    for (i, &c) in values.iter().enumerate() {
        let dark = c <= zero_tol;
        match out.last_mut() {
            Some(run) if run.dark == dark => run.end = i,
            _ => out.push(Run {
                dark,
                start: i,
                end: i,
            }),
        }
    }
    out
}

/// Classifies a sampled concurrence series.
///
/// Dark intervals are maximal runs with `C ≤ zero_tol`. A revival is the peak
/// of a bright run that follows a dark run of at least two samples.
pub fn detect_events(series: &ConcurrenceSeries, zero_tol: f64) -> Result<EventReport> {
    let times = &series.times;
    if times.len() < 2 || times.len() != series.values.len() {
        return Err(Error::Grid(
            "series needs at least two samples with matching values",
        ));
    }
    crate::telegraph::validate_grid(times)?;
    let grid_step = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if let Some(period) = series.min_period {
        let max_step = period / MIN_POINTS_PER_PERIOD;
        if grid_step > max_step * (1.0 + 1e-12) {
            return Err(Error::Resolution {
                step: grid_step,
                max_step,
            });
        }
    }

    let runs = runs(&series.values, zero_tol);
    let dark_intervals: Vec<(f64, f64)> = runs
        .iter()
        .filter(|r| r.dark)
        .map(|r| (times[r.start], times[r.end]))
        .collect();
    let esd_time = dark_intervals.first().map(|d| d.0);
    let final_death_time = runs.last().filter(|r| r.dark).map(|r| times[r.start]);

    let mut revivals = Vec::new();
    for pair in runs.windows(2) {
        let (dark, bright) = (&pair[0], &pair[1]);
        if !dark.dark || dark.end - dark.start + 1 < 2 {
            continue;
        }
        let (k, amplitude) = (bright.start..=bright.end)
            .map(|k| (k, series.values[k]))
            .fold((bright.start, f64::MIN), |best, x| {
                if x.1 > best.1 {
                    x
                } else {
                    best
                }
            });
        revivals.push(Revival {
            t_peak: times[k],
            amplitude,
        });
    }

    Ok(EventReport {
        esd_time,
        revivals,
        final_death_time,
        dark_intervals,
        horizon: *times.last().unwrap(),
        grid_step,
    })
}

/// Step that resolves both qubits' oscillations over `horizon`.
pub fn resolved_step(p_a: &RtnParams, p_b: &RtnParams, horizon: f64) -> f64 {
    let coarse = horizon / 4000.0;
    match min_period(p_a, p_b) {
        Some(period) => coarse.min(period / (2.0 * MIN_POINTS_PER_PERIOD)),
        None => coarse,
    }
}

/// Samples the concurrence at a resolving step and runs [`detect_events`].
pub fn events_for(
    state: &EwlState,
    p_a: &RtnParams,
    p_b: &RtnParams,
    horizon: Option<f64>,
    zero_tol: f64,
) -> Result<EventReport> {
    validate_inputs(state, p_a, p_b)?;
    let horizon = horizon.unwrap_or_else(|| default_horizon(state, p_a, p_b));
    let step = resolved_step(p_a, p_b, horizon);
    let n = (horizon / step).ceil() as usize + 1;
    let series = concurrence_series(state, p_a, p_b, &time_grid(horizon, n)?)?;
    detect_events(&series, zero_tol)
}

/// Golden-section minimisation of `f` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd).min(f(a)).min(f(b))
}

/// Whether entanglement dies and later reappears within `horizon`.
///
/// Works on `K(t) e^{(γ_A+γ_B)t/2}`, which has the sign of `K` but does not
/// decay, so late and tiny revivals are seen. Sampled local extrema are
/// refined by golden-section search; this catches isolated zeros such as those
/// of a pure initial state, where `C` only touches zero.
pub fn has_revival(
    state: &EwlState,
    p_a: &RtnParams,
    p_b: &RtnParams,
    horizon: f64,
    step: f64,
    zero_tol: f64,
) -> bool {
    let weight = state.r * state.ab();
    let mixed = (1.0 - state.r) / 4.0;
    let decay = (p_a.gamma + p_b.gamma) / 2.0;
    let scaled_k = |t: f64| {
        let coherent = weight * undamped_bracket(t, p_a).norm() * undamped_bracket(t, p_b).norm();
        if mixed == 0.0 {
            coherent
        } else {
            coherent - mixed * (decay * t).exp()
        }
    };
    let tol = zero_tol / 2.0;
    let n = (horizon / step).ceil() as usize;
    let ts: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(horizon)).collect();
    let f: Vec<f64> = ts.iter().map(|&t| scaled_k(t)).collect();

    let mut dark_seen = false;
    for k in 0..f.len() {
        let interior = k > 0 && k + 1 < f.len();
        if !dark_seen {
            if f[k] <= tol {
                dark_seen = true;
            } else if interior && f[k - 1] >= f[k] && f[k] <= f[k + 1] {
                dark_seen = golden_min(scaled_k, ts[k - 1], ts[k + 1]) <= tol;
            }
        } else if f[k] > tol
            || (interior
                && f[k - 1] <= f[k]
                && f[k] >= f[k + 1]
                && -golden_min(|t| -scaled_k(t), ts[k - 1], ts[k + 1]) > tol)
        {
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdPredicate {
    RevivalExists,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdSearch {
    pub bracket: (f64, f64),
    pub tol: f64,
    pub horizon: f64,
    pub step: f64,
    pub zero_tol: f64,
}

impl Default for ThresholdSearch {
    fn default() -> Self {
        Self {
            bracket: (1.0, 8.0),
            tol: 1e-3,
            horizon: 200.0,
            step: 0.01,
            zero_tol: ZERO_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub g_th: f64,
    pub bracket: (f64, f64),
    pub tolerance: f64,
    pub predicate: ThresholdPredicate,
}

/// Bisects on `g` (identical qubits, `γ = 1`) for the onset of revivals.
pub fn find_g_threshold(
    r: f64,
    a_mod: f64,
    delta_p0: f64,
    search: &ThresholdSearch,
) -> Result<ThresholdResult> {
    let state = EwlState::new(EwlFamily::OneExcitation, r, a_mod)?;
    let rs = r_star(a_mod)?;
    ensure(
        !rs.product_family && r > rs.value,
        "r",
        r,
        "must exceed r* (initially entangled)",
    )?;
    let (lo0, hi0) = search.bracket;
    ensure(
        lo0.is_finite() && lo0 >= 0.0 && hi0 > lo0,
        "bracket",
        hi0 - lo0,
        "needs 0 <= g_lo < g_hi",
    )?;
    ensure(search.tol > 0.0, "tol", search.tol, "must be positive")?;
    ensure(search.step > 0.0, "step", search.step, "must be positive")?;
    ensure(
        search.horizon > 0.0 && search.horizon <= 1000.0,
        "horizon",
        search.horizon,
        "must lie in (0, 1000]",
    )?;

    let predicate = |g: f64| -> Result<bool> {
        let p = RtnParams::from_ratio(g, 1.0, delta_p0)?;
        Ok(has_revival(
            &state,
            &p,
            &p,
            search.horizon,
            search.step,
            search.zero_tol,
        ))
    };
    let (at_lo, at_hi) = (predicate(lo0)?, predicate(hi0)?);
    if at_lo || !at_hi {
        return Err(Error::Bracket {
            lo: lo0,
            hi: hi0,
            value: at_lo,
        });
    }
    let (mut lo, mut hi) = (lo0, hi0);
    while hi - lo > search.tol {
        let mid = 0.5 * (lo + hi);
        if predicate(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdResult {
        g_th: hi,
        bracket: (lo, hi),
        tolerance: search.tol,
        predicate: ThresholdPredicate::RevivalExists,
    })
}

fn default_family() -> EwlFamily {
    EwlFamily::OneExcitation
}

fn default_zero_tol() -> f64 {
    ZERO_TOL
}

fn default_refine_tol() -> f64 {
    1e-9
}

/// Cartesian grid of parameters. `g_b`/`delta_p0_b` default to the qubit-A
/// value of the same cell (identical qubits). `γ = 1` for both qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub g_a: Vec<f64>,
    #[serde(default)]
    pub g_b: Option<Vec<f64>>,
    pub r: Vec<f64>,
    pub a_mod: Vec<f64>,
    pub delta_p0_a: Vec<f64>,
    #[serde(default)]
    pub delta_p0_b: Option<Vec<f64>>,
    #[serde(default = "default_family")]
    pub family: EwlFamily,
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default = "default_zero_tol")]
    pub zero_tol: f64,
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub g_a: f64,
    pub g_b: f64,
    pub r: f64,
    pub a_mod: f64,
    pub delta_p0_a: f64,
    pub delta_p0_b: f64,
    pub c0: f64,
    pub horizon: f64,
    pub esd_time_numeric: Option<f64>,
    pub esd_time_analytic: Option<f64>,
    /// `|analytic − numeric| / numeric`
    pub esd_rel_diff: Option<f64>,
    pub revival_count: usize,
    pub final_death_time: Option<f64>,
    pub dark_interval_count: usize,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    g_a: f64,
    g_b: f64,
    r: f64,
    a_mod: f64,
    dp_a: f64,
    dp_b: f64,
}

impl SweepSpec {
    fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &g_a in &self.g_a {
            let gbs = self.g_b.clone().unwrap_or_else(|| vec![f64::NAN]);
            for &gb in &gbs {
                let g_b = if gb.is_nan() { g_a } else { gb };
                for &r in &self.r {
                    for &a_mod in &self.a_mod {
                        for &dp_a in &self.delta_p0_a {
                            let dbs = self.delta_p0_b.clone().unwrap_or_else(|| vec![f64::NAN]);
                            for &db in &dbs {
                                let dp_b = if db.is_nan() { dp_a } else { db };
                                out.push(Cell {
                                    g_a,
                                    g_b,
                                    r,
                                    a_mod,
                                    dp_a,
                                    dp_b,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

fn sweep_row(index: usize, cell: Cell, spec: &SweepSpec) -> Result<SweepRow> {
    let state = EwlState::new(spec.family, cell.r, cell.a_mod)?;
    let p_a = RtnParams::from_ratio(cell.g_a, 1.0, cell.dp_a)?;
    let p_b = RtnParams::from_ratio(cell.g_b, 1.0, cell.dp_b)?;
    let horizon = spec
        .horizon
        .unwrap_or_else(|| default_horizon(&state, &p_a, &p_b));
    let events = events_for(&state, &p_a, &p_b, Some(horizon), spec.zero_tol)?;
    let esd = esd_time_numeric(
        &state,
        &p_a,
        &p_b,
        &EsdSearch {
            horizon,
            grid_step: resolved_step(&p_a, &p_b, horizon),
            refine_tol: spec.refine_tol,
        },
    )?;
    let analytic_applies = cell.g_a == cell.g_b && cell.dp_a == 0.0 && cell.dp_b == 0.0;
    let analytic = if analytic_applies {
        esd_time_analytic(cell.g_a, cell.r, cell.a_mod, 1.0).ok()
    } else {
        None
    };
    let rel = match (analytic, esd) {
        (Some(a), Some(n)) if n > 0.0 => Some((a - n).abs() / n),
        _ => None,
    };
    Ok(SweepRow {
        index,
        g_a: cell.g_a,
        g_b: cell.g_b,
        r: cell.r,
        a_mod: cell.a_mod,
        delta_p0_a: cell.dp_a,
        delta_p0_b: cell.dp_b,
        c0: initial_concurrence(cell.r, cell.a_mod)?,
        horizon,
        esd_time_numeric: esd,
        esd_time_analytic: analytic,
        esd_rel_diff: rel,
        revival_count: events.revivals.len(),
        final_death_time: events.final_death_time,
        dark_interval_count: events.dark_intervals.len(),
    })
}

/// Evaluates every grid cell; rows are ordered by cell index.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.cells()
        .into_par_iter()
        .enumerate()
        .map(|(i, cell)| sweep_row(i, cell, spec))
        .collect()
}
