//! Subcommand bodies. Each returns the full output as one string so the
//! binary can write it in a single step.

use serde::Serialize;

use super::config::{Format, RunConfig};
use super::format::{fmt_f64, fmt_opt, CsvTable};
use super::presets::{self, Curve, Preset};
use super::CliError;
use crate::analysis::{
    concurrence_series, default_horizon, esd_time_analytic, esd_time_numeric, events_for,
    find_g_threshold, resolved_step, sweep, EsdSearch, EventReport, Revival, SweepRow, SweepSpec,
    ThresholdResult, ZERO_TOL,
};
use crate::entanglement::{EwlFamily, EwlState};
use crate::noise::{coherence_q, RtnParams};
use crate::telegraph::ensemble_coherence;

/// Absolute floor added to the `4σ` band in `mc-validate`.
pub const MC_ABS_FLOOR: f64 = 1e-3;
/// Number of standard errors tolerated in `mc-validate`.
pub const MC_Z_LIMIT: f64 = 4.0;
/// Bracket used by the `g_th(r)` preset; low `r` pushes the threshold well above 8.
const PRESET_BRACKET: (f64, f64) = (1.0, 20.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Coherence,
    Concurrence,
    Events,
    Threshold,
    Sweep,
    McValidate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Coherence => "coherence",
            Command::Concurrence => "concurrence",
            Command::Events => "events",
            Command::Threshold => "threshold",
            Command::Sweep => "sweep",
            Command::McValidate => "mc-validate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: String,
    /// `false` only when `mc-validate` finds a disagreement.
    pub passed: bool,
    pub summary: Option<String>,
}

impl Report {
    fn ok(body: String) -> Self {
        Self {
            body,
            passed: true,
            summary: None,
        }
    }
}

/// Parameter echo placed at the top of every output.
#[derive(Serialize)]
struct Echo<'a> {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<&'static str>,
    /// Parameters of every preset curve.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    curves: Vec<Curve>,
    config: &'a RunConfig,
}

fn echo(command: Command, preset: Option<Preset>, cfg: &RunConfig) -> String {
    serde_json::to_string(&Echo {
        command: command.name(),
        preset: preset.map(Preset::name),
        curves: preset.map(Preset::curves).unwrap_or_default(),
        config: cfg,
    })
    .expect("echo serializes")
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn unsupported(command: Command, preset: Preset) -> CliError {
    CliError::Config(format!(
        "preset {} has no {} output",
        preset.name(),
        command.name()
    ))
}

pub fn run(command: Command, cfg: &RunConfig, preset: Option<Preset>) -> Result<Report, CliError> {
    cfg.validate()?;
    if cfg.mc.is_some() && command != Command::McValidate {
        return Err(CliError::Config(
            "the `mc` section is only accepted by mc-validate".into(),
        ));
    }
    let fmt = cfg.output.format;
    let head = echo(command, preset, cfg);
    match command {
        Command::Coherence => {
            if let Some(p) = preset {
                return Err(unsupported(command, p));
            }
            coherence(cfg, fmt, head).map(Report::ok)
        }
        Command::Concurrence => concurrence(cfg, preset, fmt, head).map(Report::ok),
        Command::Events => events(cfg, preset, fmt, head).map(Report::ok),
        Command::Threshold => threshold(cfg, preset, fmt, head).map(Report::ok),
        Command::Sweep => sweep_cmd(cfg, preset, fmt, head).map(Report::ok),
        Command::McValidate => {
            if let Some(p) = preset {
                return Err(unsupported(command, p));
            }
            mc_validate(cfg, fmt, head)
        }
    }
}

/// Times in units of `γ_A t` and the matching physical times.
fn grids(cfg: &RunConfig) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let scaled = cfg.grid.times()?;
    let gamma_a = cfg.qubit_a.gamma;
    let t = scaled.iter().map(|x| x / gamma_a).collect();
    Ok((scaled, t))
}

#[derive(Serialize)]
struct CoherenceOut<'a> {
    echo: serde_json::Value,
    gamma_t: &'a [f64],
    re_q: Vec<f64>,
    im_q: Vec<f64>,
    abs_q: Vec<f64>,
}

fn coherence(cfg: &RunConfig, fmt: Format, head: String) -> Result<String, CliError> {
    let p = cfg.qubit_a.params()?;
    let (scaled, t) = grids(cfg)?;
    let q = t
        .iter()
        .map(|&t| coherence_q(t, &p))
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(match fmt {
        Format::Csv => {
            let mut table = CsvTable::new(["gamma_t", "re_q", "im_q", "abs_q"]).with_comment(head);
            for (x, q) in scaled.iter().zip(&q) {
                table.push(vec![
                    fmt_f64(*x),
                    fmt_f64(q.re),
                    fmt_f64(q.im),
                    fmt_f64(q.norm()),
                ]);
            }
            table.render()
        }
        Format::Json => to_json(&CoherenceOut {
            echo: serde_json::from_str(&head)?,
            gamma_t: &scaled,
            re_q: q.iter().map(|q| q.re).collect(),
            im_q: q.iter().map(|q| q.im).collect(),
            abs_q: q.iter().map(|q| q.norm()).collect(),
        }),
    })
}

fn config_curve(cfg: &RunConfig) -> Result<Curve, CliError> {
    let (qubit_a, qubit_b) = cfg.params()?;
    Ok(Curve {
        label: "concurrence".into(),
        state: cfg.state,
        qubit_a,
        qubit_b,
    })
}

#[derive(Serialize)]
struct LabeledSeries {
    label: String,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct ConcurrenceOut<'a> {
    echo: serde_json::Value,
    gamma_t: &'a [f64],
    curves: Vec<LabeledSeries>,
}

fn concurrence(
    cfg: &RunConfig,
    preset: Option<Preset>,
    fmt: Format,
    head: String,
) -> Result<String, CliError> {
    let (curves, grid) = match preset {
        Some(Preset::Fig2) => return Err(unsupported(Command::Concurrence, Preset::Fig2)),
        Some(p) => (p.curves(), p.grid()),
        None => (vec![config_curve(cfg)?], cfg.grid.clone()),
    };
    let gamma_a = curves[0].qubit_a.gamma;
    let scaled = grid.times()?;
    let t: Vec<f64> = scaled.iter().map(|x| x / gamma_a).collect();
    let mut series = Vec::with_capacity(curves.len());
    for c in &curves {
        let s = concurrence_series(&c.state, &c.qubit_a, &c.qubit_b, &t)?;
        let label = if preset.is_some() {
            format!("c_{}", c.label)
        } else {
            c.label.clone()
        };
        series.push(LabeledSeries {
            label,
            values: s.values,
        });
    }
    Ok(match fmt {
        Format::Csv => {
            let header = std::iter::once("gamma_t".to_string())
                .chain(series.iter().map(|s| s.label.clone()));
            let mut table = CsvTable::new(header).with_comment(head);
            for (k, x) in scaled.iter().enumerate() {
                let mut row = vec![fmt_f64(*x)];
                row.extend(series.iter().map(|s| fmt_f64(s.values[k])));
                table.push(row);
            }
            table.render()
        }
        Format::Json => to_json(&ConcurrenceOut {
            echo: serde_json::from_str(&head)?,
            gamma_t: &scaled,
            curves: series,
        }),
    })
}

/// Event report of one curve, times in units of `γ_A t`.
#[derive(Debug, Clone, Serialize)]
struct CurveEvents {
    label: String,
    c0: f64,
    events: EventReport,
    esd_time_numeric: Option<f64>,
    esd_time_analytic: Option<f64>,
    /// `|analytic − numeric| / numeric`
    esd_rel_diff: Option<f64>,
}

fn scale_report(r: EventReport, gamma_a: f64) -> EventReport {
    let s = |x: f64| x * gamma_a;
    EventReport {
        esd_time: r.esd_time.map(s),
        revivals: r
            .revivals
            .into_iter()
            .map(|v| Revival {
                t_peak: s(v.t_peak),
                amplitude: v.amplitude,
            })
            .collect(),
        final_death_time: r.final_death_time.map(s),
        dark_intervals: r
            .dark_intervals
            .into_iter()
            .map(|(a, b)| (s(a), s(b)))
            .collect(),
        horizon: s(r.horizon),
        grid_step: s(r.grid_step),
    }
}

fn curve_events(c: &Curve, horizon_scaled: Option<f64>) -> Result<CurveEvents, CliError> {
    let gamma_a = c.qubit_a.gamma;
    let horizon = horizon_scaled
        .map(|h| h / gamma_a)
        .unwrap_or_else(|| default_horizon(&c.state, &c.qubit_a, &c.qubit_b));
    let report = events_for(&c.state, &c.qubit_a, &c.qubit_b, Some(horizon), ZERO_TOL)?;
    let numeric = esd_time_numeric(
        &c.state,
        &c.qubit_a,
        &c.qubit_b,
        &EsdSearch {
            horizon,
            grid_step: resolved_step(&c.qubit_a, &c.qubit_b, horizon),
            refine_tol: 1e-9 * horizon,
        },
    )?;
    let analytic = analytic_esd(&c.state, &c.qubit_a, &c.qubit_b);
    let rel = match (analytic, numeric) {
        (Some(a), Some(n)) if n > 0.0 => Some((a - n).abs() / n),
        _ => None,
    };
    Ok(CurveEvents {
        label: c.label.clone(),
        c0: 2.0 * crate::entanglement::k_function(0.0, &c.state, &c.qubit_a, &c.qubit_b)?.max(0.0),
        events: scale_report(report, gamma_a),
        esd_time_numeric: numeric.map(|t| t * gamma_a),
        esd_time_analytic: analytic.map(|t| t * gamma_a),
        esd_rel_diff: rel,
    })
}

/// The weak-coupling estimate covers identical qubits at `δp0 = 0` only.
fn analytic_esd(state: &EwlState, a: &RtnParams, b: &RtnParams) -> Option<f64> {
    let same = a.v == b.v && a.gamma == b.gamma && a.delta_p0 == 0.0 && b.delta_p0 == 0.0;
    if !same {
        return None;
    }
    esd_time_analytic(a.g(), state.r, state.a_mod, a.gamma).ok()
}

#[derive(Serialize)]
struct EventsOut {
    echo: serde_json::Value,
    curves: Vec<CurveEvents>,
}

fn events(
    cfg: &RunConfig,
    preset: Option<Preset>,
    fmt: Format,
    head: String,
) -> Result<String, CliError> {
    let curves = match preset {
        Some(Preset::Fig2) => return fig2_table(fmt, head),
        Some(p) => p.curves(),
        None => vec![config_curve(cfg)?],
    };
    let reports = curves
        .iter()
        .map(|c| curve_events(c, cfg.horizon))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match fmt {
        Format::Json => to_json(&EventsOut {
            echo: serde_json::from_str(&head)?,
            curves: reports,
        }),
        Format::Csv => {
            let mut table =
                CsvTable::new(["curve", "event", "gamma_t", "value"]).with_comment(head);
            for r in &reports {
                let mut push = |event: &str, t: Option<f64>, v: Option<f64>| {
                    table.push(vec![r.label.clone(), event.into(), fmt_opt(t), fmt_opt(v)]);
                };
                push("esd_numeric", r.esd_time_numeric, None);
                push("esd_analytic", r.esd_time_analytic, r.esd_rel_diff);
                for (a, b) in &r.events.dark_intervals {
                    push("dark_start", Some(*a), None);
                    push("dark_end", Some(*b), None);
                }
                for v in &r.events.revivals {
                    push("revival", Some(v.t_peak), Some(v.amplitude));
                }
                push("final_death", r.events.final_death_time, None);
            }
            table.render()
        }
    })
}

fn fig2_spec() -> SweepSpec {
    let (g, r) = presets::fig2_axes();
    SweepSpec {
        g_a: g,
        g_b: None,
        r,
        a_mod: vec![presets::experimental_state().a_mod],
        delta_p0_a: vec![0.0],
        delta_p0_b: None,
        family: EwlFamily::OneExcitation,
        horizon: None,
        zero_tol: ZERO_TOL,
        refine_tol: 1e-9,
    }
}

fn fig2_table(fmt: Format, head: String) -> Result<String, CliError> {
    let rows = sweep(&fig2_spec())?;
    Ok(match fmt {
        Format::Json => to_json(&SweepOut {
            echo: serde_json::from_str(&head)?,
            rows,
        }),
        Format::Csv => {
            let mut table = CsvTable::new(["g", "r", "esd_numeric", "esd_analytic", "rel_diff"])
                .with_comment(head);
            for row in &rows {
                table.push(vec![
                    fmt_f64(row.g_a),
                    fmt_f64(row.r),
                    fmt_opt(row.esd_time_numeric),
                    fmt_opt(row.esd_time_analytic),
                    fmt_opt(row.esd_rel_diff),
                ]);
            }
            table.render()
        }
    })
}

#[derive(Serialize)]
struct SweepOut {
    echo: serde_json::Value,
    rows: Vec<SweepRow>,
}

fn sweep_cmd(
    cfg: &RunConfig,
    preset: Option<Preset>,
    fmt: Format,
    head: String,
) -> Result<String, CliError> {
    let spec = match (preset, &cfg.sweep) {
        (Some(Preset::Fig2), _) => fig2_spec(),
        (Some(p), _) => return Err(unsupported(Command::Sweep, p)),
        (None, Some(s)) => s.clone(),
        (None, None) => return Err(CliError::Config("sweep needs a `sweep` section".into())),
    };
    let rows = sweep(&spec)?;
    Ok(match fmt {
        Format::Json => to_json(&SweepOut {
            echo: serde_json::from_str(&head)?,
            rows,
        }),
        Format::Csv => {
            let mut table = CsvTable::new([
                "index",
                "g_a",
                "g_b",
                "r",
                "a_mod",
                "delta_p0_a",
                "delta_p0_b",
                "c0",
                "horizon",
                "esd_time_numeric",
                "esd_time_analytic",
                "esd_rel_diff",
                "revival_count",
                "final_death_time",
                "dark_interval_count",
            ])
            .with_comment(head);
            for r in &rows {
                table.push(vec![
                    r.index.to_string(),
                    fmt_f64(r.g_a),
                    fmt_f64(r.g_b),
                    fmt_f64(r.r),
                    fmt_f64(r.a_mod),
                    fmt_f64(r.delta_p0_a),
                    fmt_f64(r.delta_p0_b),
                    fmt_f64(r.c0),
                    fmt_f64(r.horizon),
                    fmt_opt(r.esd_time_numeric),
                    fmt_opt(r.esd_time_analytic),
                    fmt_opt(r.esd_rel_diff),
                    r.revival_count.to_string(),
                    fmt_opt(r.final_death_time),
                    r.dark_interval_count.to_string(),
                ]);
            }
            table.render()
        }
    })
}

#[derive(Serialize)]
struct ThresholdRow {
    r: f64,
    a_mod: f64,
    delta_p0: f64,
    result: ThresholdResult,
}

#[derive(Serialize)]
struct ThresholdOut {
    echo: serde_json::Value,
    results: Vec<ThresholdRow>,
}

fn threshold(
    cfg: &RunConfig,
    preset: Option<Preset>,
    fmt: Format,
    head: String,
) -> Result<String, CliError> {
    let spec = cfg.threshold.clone();
    let a_mod = spec
        .as_ref()
        .and_then(|s| s.a_mod)
        .unwrap_or(cfg.state.a_mod);
    let delta_p0 = spec
        .as_ref()
        .and_then(|s| s.delta_p0)
        .unwrap_or(cfg.qubit_a.delta_p0);
    let mut search = spec.as_ref().and_then(|s| s.search).unwrap_or_default();
    let r_grid = match preset {
        Some(Preset::Fig1b) => {
            if spec.as_ref().and_then(|s| s.search).is_none() {
                search.bracket = PRESET_BRACKET;
            }
            presets::threshold_r_grid()
        }
        Some(p) => return Err(unsupported(Command::Threshold, p)),
        None => match spec.as_ref().and_then(|s| s.r_grid.clone()) {
            Some(grid) => grid,
            None => vec![spec.as_ref().and_then(|s| s.r).unwrap_or(cfg.state.r)],
        },
    };
    let results = r_grid
        .iter()
        .map(|&r| {
            find_g_threshold(r, a_mod, delta_p0, &search).map(|result| ThresholdRow {
                r,
                a_mod,
                delta_p0,
                result,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(match fmt {
        Format::Json => to_json(&ThresholdOut {
            echo: serde_json::from_str(&head)?,
            results,
        }),
        Format::Csv => {
            let mut table =
                CsvTable::new(["r", "g_th", "g_lo", "g_hi", "tolerance"]).with_comment(head);
            for row in &results {
                let res = &row.result;
                table.push(vec![
                    fmt_f64(row.r),
                    fmt_f64(res.g_th),
                    fmt_f64(res.bracket.0),
                    fmt_f64(res.bracket.1),
                    fmt_f64(res.tolerance),
                ]);
            }
            table.render()
        }
    })
}

/// One row of the Monte Carlo comparison.
#[derive(Debug, Clone, Serialize)]
pub struct McRow {
    pub gamma_t: f64,
    pub abs_mean: f64,
    pub std_err: f64,
    pub abs_q: f64,
    /// `(|mean| − |q|)/std_err`; zero when both vanish, `None` when only the
    /// standard error does.
    pub z: Option<f64>,
    pub pass: bool,
}

#[derive(Serialize)]
struct McOut {
    echo: serde_json::Value,
    n_trajectories: usize,
    passed: bool,
    rows: Vec<McRow>,
}

fn mc_validate(cfg: &RunConfig, fmt: Format, head: String) -> Result<Report, CliError> {
    let mc = cfg.mc_config()?;
    let p = cfg.qubit_a.params()?;
    let est = ensemble_coherence(&p, &mc)?;
    let gamma_a = p.gamma;
    let mut rows = Vec::with_capacity(est.times.len());
    for k in 0..est.times.len() {
        let abs_mean = est.mean[k].norm();
        let se = est.std_err[k];
        let abs_q = coherence_q(est.times[k], &p)?.norm();
        let diff = abs_mean - abs_q;
        rows.push(McRow {
            gamma_t: est.times[k] * gamma_a,
            abs_mean,
            std_err: se,
            abs_q,
            z: if se > 0.0 {
                Some(diff / se)
            } else if diff == 0.0 {
                Some(0.0)
            } else {
                None
            },
            pass: diff.abs() <= MC_Z_LIMIT * se + MC_ABS_FLOOR,
        });
    }
    let passed = rows.iter().all(|r| r.pass);
    let worst = rows
        .iter()
        .filter_map(|r| r.z.map(f64::abs))
        .fold(0.0, f64::max);
    let failing = rows.iter().filter(|r| !r.pass).count();
    let summary = format!(
        "mc-validate: {} of {} times within {MC_Z_LIMIT} sigma + {MC_ABS_FLOOR}; max |z| = {:.2}",
        rows.len() - failing,
        rows.len(),
        worst
    );
    let body = match fmt {
        Format::Json => to_json(&McOut {
            echo: serde_json::from_str(&head)?,
            n_trajectories: est.n_used,
            passed,
            rows,
        }),
        Format::Csv => {
            let mut table = CsvTable::new(["gamma_t", "abs_mean", "std_err", "abs_q", "z", "pass"])
                .with_comment(head);
            for r in &rows {
                table.push(vec![
                    fmt_f64(r.gamma_t),
                    fmt_f64(r.abs_mean),
                    fmt_f64(r.std_err),
                    fmt_f64(r.abs_q),
                    fmt_opt(r.z),
                    r.pass.to_string(),
                ]);
            }
            table.render()
        }
    };
    Ok(Report {
        body,
        passed,
        summary: Some(summary),
    })
}
