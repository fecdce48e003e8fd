//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails. Run with `cargo test -p rtn-entangle --test acceptance`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::{Command, ExitCode};

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rtn_entangle::analysis::{
    default_horizon, esd_time_numeric, events_for, resolved_step, time_grid, EsdSearch,
    ThresholdSearch, ZERO_TOL,
};
use rtn_entangle::{
    coherence_q, concurrence_series, concurrence_wootters, concurrence_x, ensemble_coherence,
    esd_time_analytic, find_g_threshold, initial_concurrence, make_ewl, purity_ewl, r_star,
    Complex, EwlFamily, EwlState, McConfig, RtnParams, XState,
};

const A: f64 = FRAC_1_SQRT_2;
const R_EXP: f64 = 0.91;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Outcome;

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn qubit(g: f64, dp: f64) -> RtnParams {
    RtnParams::from_ratio(g, 1.0, dp).unwrap()
}

fn state(r: f64) -> EwlState {
    EwlState::new(EwlFamily::OneExcitation, r, A).unwrap()
}

fn criterion_1() -> Outcome {
    let c0 = initial_concurrence(R_EXP, A).unwrap();
    let purity = purity_ewl(R_EXP).unwrap();
    // Tr ρ² of the full matrix, independent of the closed form.
    let rho = make_ewl(EwlFamily::OneExcitation, R_EXP, A)
        .unwrap()
        .to_matrix();
    let direct = (rho * rho).trace().re;
    let rs = r_star(A).unwrap();
    let pass = (c0 - 0.865).abs() < 1e-12
        && (purity - direct).abs() < 1e-12
        && (purity - 0.8711).abs() < 5e-5
        && (rs.value - 1.0 / 3.0).abs() < 1e-12;
    outcome(
        pass,
        format!(
            "C(0) = {c0}, purity = {purity} (Tr rho^2 = {direct}), r* = {}",
            rs.value
        ),
    )
}

fn criterion_2() -> Outcome {
    let times = time_grid(10.0, 101).unwrap();
    let mut worst_excess = f64::MIN;
    let mut worst_z: f64 = 0.0;
    for g in [0.5, 1.0, 5.0] {
        for dp in [-1.0, 0.0, 1.0] {
            let p = qubit(g, dp);
            let cfg = McConfig::new(100_000, 2024, times.clone()).unwrap();
            let est = ensemble_coherence(&p, &cfg).unwrap();
            for (k, &t) in times.iter().enumerate() {
                let exact = coherence_q(t, &p).unwrap().norm();
                let diff = (est.mean[k].norm() - exact).abs();
                let se = est.std_err[k];
                worst_excess = worst_excess.max(diff - (4.0 * se + 1e-3));
                if se > 0.0 {
                    worst_z = worst_z.max(diff / se);
                }
            }
        }
    }
    outcome(
        worst_excess < 0.0,
        format!("9 cells x 101 times, N = 1e5: max |z| = {worst_z:.2}, worst margin = {worst_excess:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let times = time_grid(20.0, 2001).unwrap();
    let mut worst: f64 = 0.0;
    for dp in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        for &t in &times {
            // Critical-damping form e^{-u}(1 + (1 - i δp0) u), u = γt/2.
            let u = t / 2.0;
            let oracle =
                ((-u).exp() * (Complex::new(1.0, 0.0) + Complex::new(1.0, -dp) * u)).norm();
            for g in [1.0 - 1e-6, 1.0 + 1e-6, 1.0] {
                let q = coherence_q(t, &qubit(g, dp)).unwrap().norm();
                worst = worst.max((q - oracle).abs());
            }
        }
    }
    outcome(
        worst < 1e-4,
        format!("max deviation from the g = 1 form: {worst:.2e}"),
    )
}

fn random_xstate(rng: &mut ChaCha8Rng) -> XState {
    let w: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() + 1e-3);
    let total: f64 = w.iter().sum();
    let d = w.map(|x| x / total);
    let phase = |rng: &mut ChaCha8Rng| {
        Complex::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
    };
    let c03 = phase(rng) * (d[0] * d[3]).sqrt() * rng.random::<f64>();
    let c12 = phase(rng) * (d[1] * d[2]).sqrt() * rng.random::<f64>();
    XState {
        d00: d[0],
        d11: d[1],
        d22: d[2],
        d33: d[3],
        c03,
        c12,
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = random_xstate(&mut rng);
        let m: Matrix4<Complex> = s.to_matrix();
        worst = worst.max((concurrence_x(&s).unwrap() - concurrence_wootters(&m).unwrap()).abs());
    }
    let times = time_grid(30.0, 3001).unwrap();
    let mut family_gap: f64 = 0.0;
    for (ga, gb, dpa, dpb) in [
        (0.5, 0.5, 0.0, 0.0),
        (5.0, 5.0, 1.0, 1.0),
        (10.0, 5.0, 0.0, -0.3),
        (2.0, 0.0, 0.2, 0.0),
    ] {
        for r in [0.5, R_EXP, 1.0] {
            let one = EwlState::new(EwlFamily::OneExcitation, r, A).unwrap();
            let two = EwlState::new(EwlFamily::TwoExcitation, r, A).unwrap();
            let (pa, pb) = (qubit(ga, dpa), qubit(gb, dpb));
            let c1 = concurrence_series(&one, &pa, &pb, &times).unwrap();
            let c2 = concurrence_series(&two, &pa, &pb, &times).unwrap();
            for (x, y) in c1.values.iter().zip(&c2.values) {
                family_gap = family_gap.max((x - y).abs());
            }
        }
    }
    outcome(
        worst < 1e-9 && family_gap <= 1e-12,
        format!("max |C_X - C_Wootters| = {worst:.2e} over 1000 states; max family gap = {family_gap:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let s = state(R_EXP);
    let weak = events_for(&s, &qubit(0.5, 0.0), &qubit(0.5, 0.0), None, ZERO_TOL).unwrap();
    let strong = events_for(&s, &qubit(5.0, 0.0), &qubit(5.0, 0.0), Some(20.0), ZERO_TOL).unwrap();
    let amps: Vec<f64> = strong.revivals.iter().map(|r| r.amplitude).collect();
    let non_increasing = amps.windows(2).all(|w| w[1] <= w[0]);
    let pass = weak.revivals.is_empty()
        && weak.esd_time.is_some()
        && amps.len() >= 2
        && non_increasing
        && strong.dark_intervals.len() >= 2
        && strong.final_death_time.is_some();
    outcome(
        pass,
        format!(
            "g = 0.5: {} revivals, ESD at {:?}; g = 5: amplitudes {amps:.3?}, {} dark intervals, final death {:?}",
            weak.revivals.len(),
            weak.esd_time,
            strong.dark_intervals.len(),
            strong.final_death_time
        ),
    )
}

fn criterion_6() -> Outcome {
    let s = state(R_EXP);
    let times = time_grid(20.0, 4001).unwrap();
    let series = |dp: f64| {
        concurrence_series(&s, &qubit(5.0, dp), &qubit(5.0, dp), &times)
            .unwrap()
            .values
    };
    let (c0, cp, cm) = (series(0.0), series(1.0), series(-1.0));
    let ordered = cp.iter().zip(&c0).all(|(p, z)| *p >= z - 1e-9);
    let sign_gap = cp
        .iter()
        .zip(&cm)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let death = |dp: f64| {
        events_for(&s, &qubit(5.0, dp), &qubit(5.0, dp), Some(20.0), ZERO_TOL)
            .unwrap()
            .final_death_time
    };
    let (d0, d1) = (death(0.0), death(1.0));
    let later = matches!((d0, d1), (Some(a), Some(b)) if b > a);
    outcome(
        ordered && sign_gap <= 1e-12 && later,
        format!("C(+1) >= C(0): {ordered}; |C(+1) - C(-1)| <= {sign_gap:.1e}; final death {d0:?} -> {d1:?}"),
    )
}

fn numeric_esd(g: f64, r: f64) -> f64 {
    let s = state(r);
    let p = qubit(g, 0.0);
    let horizon = default_horizon(&s, &p, &p);
    let search = EsdSearch {
        horizon,
        grid_step: resolved_step(&p, &p, horizon),
        refine_tol: 1e-10,
    };
    esd_time_numeric(&s, &p, &p, &search)
        .unwrap()
        .expect("ESD within horizon")
}

fn criterion_7() -> Outcome {
    let mut worst = (0.0, 0.0, 0.0, 0.0);
    for g in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for r in [0.7, 0.8, R_EXP] {
            let n = numeric_esd(g, r);
            let a = esd_time_analytic(g, r, A, 1.0).unwrap();
            let rel = (a - n).abs() / n;
            if rel > worst.0 {
                worst = (rel, g, r, (a - n).abs() / a);
            }
        }
    }
    let ratio = numeric_esd(0.1, R_EXP) / numeric_esd(0.4, R_EXP);
    let gs: Vec<f64> = (10..=90).map(|k| k as f64 / 100.0).collect();
    let rs = [0.7, 0.8, R_EXP];
    let table: Vec<Vec<f64>> = rs
        .iter()
        .map(|&r| gs.iter().map(|&g| numeric_esd(g, r)).collect())
        .collect();
    let decreasing_in_g = table.iter().all(|row| row.windows(2).all(|w| w[1] < w[0]));
    let increasing_in_r =
        (0..gs.len()).all(|k| table[0][k] < table[1][k] && table[1][k] < table[2][k]);
    let pass =
        worst.0 < 0.05 && (10.0..=25.0).contains(&ratio) && decreasing_in_g && increasing_in_r;
    outcome(
        pass,
        format!(
            "max |analytic - numeric|/numeric = {:.4} at g = {}, r = {} (relative to analytic: {:.4}); ratio t(0.1)/t(0.4) = {ratio:.2}; \
             decreasing in g: {decreasing_in_g}; increasing in r: {increasing_in_r}",
            worst.0, worst.1, worst.2, worst.3
        ),
    )
}

fn criterion_8() -> Outcome {
    let search = ThresholdSearch::default();
    let rs = [0.8, 0.85, R_EXP, 0.95, 1.0];
    let g: Vec<f64> = rs
        .iter()
        .map(|&r| find_g_threshold(r, A, 0.0, &search).unwrap().g_th)
        .collect();
    let at_one = g[4];
    let at_exp = g[2];
    let non_increasing = g.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        (at_one - 1.0).abs() <= 0.02 && at_exp > 2.0 && at_exp < 5.0 && non_increasing,
        format!("g_th over r = {rs:?}: {g:.3?}"),
    )
}

fn criterion_9() -> Outcome {
    let s = state(R_EXP);
    let revivals = |ga: f64, gb: f64| {
        events_for(&s, &qubit(ga, 0.0), &qubit(gb, 0.0), None, ZERO_TOL)
            .unwrap()
            .revivals
    };
    let b0: Vec<usize> = [5.0, 0.5, 1.1]
        .iter()
        .map(|&g| revivals(g, 0.0).len())
        .collect();
    let mixed: Vec<f64> = revivals(10.0, 5.0).iter().map(|r| r.amplitude).collect();
    let growing = mixed.windows(2).any(|w| w[1] > w[0]);
    let equal = revivals(2.0, 2.0).len();
    outcome(
        b0[0] > 0 && b0[1] == 0 && b0[2] == 0 && growing && equal == 0,
        format!(
            "g_B = 0 revivals for g_A = 5, 0.5, 1.1: {b0:?}; (10, 5) amplitudes {mixed:.3?}; (2, 2) revivals: {equal}"
        ),
    )
}

fn cli(args: &[&str], stdin: &str, threads: &str) -> Vec<u8> {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_rtn-entangle"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads)
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::null())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.code().is_some_and(|c| c <= 1), "{args:?} failed");
    out.stdout
}

fn criterion_10() -> Outcome {
    let base = r#"{"qubit_a": {"v": 5}, "qubit_b": {"v": 2, "delta_p0": 0.5}, "grid": {"t_max": 10, "n_points": 201}}"#;
    let mc = r#"{"qubit_a": {"v": 0.5}, "grid": {"t_max": 10, "n_points": 51}, "mc": {"n_trajectories": 20000, "seed": 9}}"#;
    let sweep = r#"{"qubit_a": {"v": 1}, "sweep": {"g_a": [0.3, 5], "r": [0.8, 0.91], "a_mod": [0.7071067811865476], "delta_p0_a": [0, 1]}}"#;
    let thr = r#"{"qubit_a": {"v": 1}, "threshold": {"r_grid": [0.91, 1.0]}}"#;
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["coherence", "--config", "-"], base),
        (
            vec!["concurrence", "--config", "-", "--format", "json"],
            base,
        ),
        (vec!["concurrence", "--preset", "fig3b-inset"], ""),
        (vec!["events", "--config", "-", "--format", "json"], base),
        (vec!["events", "--preset", "fig2"], ""),
        (vec!["threshold", "--config", "-"], thr),
        (vec!["sweep", "--config", "-", "--format", "json"], sweep),
        (vec!["mc-validate", "--config", "-"], mc),
        (
            vec![
                "mc-validate",
                "--config",
                "-",
                "--format",
                "json",
                "--seed",
                "10",
            ],
            mc,
        ),
    ];
    let mut differing = Vec::new();
    for (args, input) in &cases {
        let runs = [
            cli(args, input, "1"),
            cli(args, input, "1"),
            cli(args, input, "4"),
        ];
        if runs[0].is_empty() || runs.iter().any(|r| r != &runs[0]) {
            differing.push(args.join(" "));
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} commands x 3 runs (1, 1, 4 threads); differing: {differing:?}",
            cases.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("initial-state numbers", criterion_1),
        ("Monte Carlo oracle agreement", criterion_2),
        ("continuity at g = 1", criterion_3),
        ("concurrence oracle equivalence", criterion_4),
        ("weak vs strong regime", criterion_5),
        ("impurity preparation ordering", criterion_6),
        ("ESD analytic vs numeric", criterion_7),
        ("revival threshold", criterion_8),
        ("different environments", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} [{tag}] {name}: {}", k + 1, o.detail);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
