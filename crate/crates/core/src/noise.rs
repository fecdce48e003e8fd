//! Closed-form coherence of a single qubit under pure-dephasing random
//! telegraph noise.
//!
//! For a qubit with splitting `Ω` coupled with strength `v` to a telegraph
//! process switching at rate `γ`, the normalised coherence is
//!
//! ```text
//! q(t) = e^{-i(Ω+v/2)t} [ A e^{-γ(1-α)t/2} + (1-A) e^{-γ(1+α)t/2} ]
//! A = (1 + α - i g δp0) / (2α),   α = sqrt(1 - g²),   g = v/γ
//! ```
//!
//! The bracket is evaluated in the equivalent form
//! `e^{-γt/2} [cosh(x) + (1 - i g δp0) sinh(x)/α]` with `x = γαt/2`, which has
//! no removable singularity at `g = 1` and stays finite at long times.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::Complex;

/// Below this |x|, `sinh(x)/x` and `sin(x)/x` use their Taylor series.
const SERIES_CUTOFF: f64 = 1e-4;

/// Noise environment of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtnParams {
    /// Qubit level splitting (angular frequency).
    pub omega: f64,
    /// Qubit–impurity coupling.
    pub v: f64,
    /// Switching rate of the impurity.
    pub gamma: f64,
    /// Initial population imbalance of the impurity, in `[-1, 1]`.
    pub delta_p0: f64,
}

impl RtnParams {
    pub fn new(omega: f64, v: f64, gamma: f64, delta_p0: f64) -> Result<Self> {
        let p = Self {
            omega,
            v,
            gamma,
            delta_p0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters for coupling ratio `g = v/γ`, with `Ω = 0`.
    pub fn from_ratio(g: f64, gamma: f64, delta_p0: f64) -> Result<Self> {
        Self::new(0.0, g * gamma, gamma, delta_p0)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.omega.is_finite(),
            "omega",
            self.omega,
            "must be finite",
        )?;
        ensure(
            self.v.is_finite() && self.v >= 0.0,
            "v",
            self.v,
            "must be finite and non-negative",
        )?;
        ensure(
            self.gamma.is_finite() && self.gamma > 0.0,
            "gamma",
            self.gamma,
            "must be finite and positive",
        )?;
        ensure(
            (-1.0..=1.0).contains(&self.delta_p0),
            "delta_p0",
            self.delta_p0,
            "must lie in [-1, 1]",
        )?;
        ensure(
            self.g().is_finite(),
            "g",
            self.g(),
            "v/gamma must be finite",
        )
    }

    /// Coupling ratio `g = v/γ`.
    pub fn g(&self) -> f64 {
        self.v / self.gamma
    }

    /// Period in `t` of the coherence oscillations, `4π/(γ|α|)`, when `g > 1`.
    pub fn oscillation_period(&self) -> Option<f64> {
        match Regime::of(self.g()) {
            Regime::Oscillatory(b) => Some(4.0 * PI / (self.gamma * b)),
            _ => None,
        }
    }

    /// Decay rate `γ(1-α)/2` of the slow term when `g < 1`.
    pub(crate) fn slow_rate(&self) -> Option<f64> {
        match Regime::of(self.g()) {
            Regime::Overdamped(a) => Some(self.gamma * one_minus_alpha(self.g(), a) / 2.0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Regime {
    /// `g < 1`, carrying `α = sqrt(1 - g²) > 0`.
    Overdamped(f64),
    /// `g = 1`.
    Critical,
    /// `g > 1`, carrying `|α| = sqrt(g² - 1)`.
    Oscillatory(f64),
}

impl Regime {
    fn of(g: f64) -> Self {
        // (1-g)(1+g) keeps full relative precision near g = 1
        let d = (1.0 - g) * (1.0 + g);
        if d > 0.0 {
            Regime::Overdamped(d.sqrt())
        } else if d < 0.0 {
            Regime::Oscillatory((-d).sqrt())
        } else {
            Regime::Critical
        }
    }
}

/// `1 - α` without cancellation for small g.
fn one_minus_alpha(g: f64, alpha: f64) -> f64 {
    g * g / (1.0 + alpha)
}

fn sinh_over_x(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    } else {
        x.sinh() / x
    }
}

fn sin_over_x(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// Terms of the two-exponential form of the coherence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherenceTerms {
    pub alpha: Complex,
    /// The coefficient `A` of the slow exponential.
    pub big_a: Complex,
    /// `γ(1-α)/2`
    pub rate_slow: Complex,
    /// `γ(1+α)/2`
    pub rate_fast: Complex,
}

/// `α = sqrt(1 - g²)`, real non-negative for `g ≤ 1` and `+i sqrt(g² - 1)` above.
pub fn alpha_of(g: f64) -> Result<Complex> {
    ensure(
        g.is_finite() && g >= 0.0,
        "g",
        g,
        "must be finite and non-negative",
    )?;
    Ok(match Regime::of(g) {
        Regime::Overdamped(a) => Complex::new(a, 0.0),
        Regime::Critical => Complex::new(0.0, 0.0),
        Regime::Oscillatory(b) => Complex::new(0.0, b),
    })
}

pub fn coherence_terms(p: &RtnParams) -> Result<CoherenceTerms> {
    p.validate()?;
    let g = p.g();
    let alpha = alpha_of(g)?;
    if alpha == Complex::new(0.0, 0.0) {
        return Err(Error::DegenerateBranch);
    }
    let one = Complex::new(1.0, 0.0);
    let big_a = (one + alpha - Complex::new(0.0, g * p.delta_p0)) / (2.0 * alpha);
    let rate_slow = match Regime::of(g) {
        Regime::Overdamped(a) => Complex::new(p.gamma * one_minus_alpha(g, a) / 2.0, 0.0),
        _ => p.gamma * (one - alpha) / 2.0,
    };
    Ok(CoherenceTerms {
        alpha,
        big_a,
        rate_slow,
        rate_fast: p.gamma * (one + alpha) / 2.0,
    })
}

fn check_time(t: f64) -> Result<()> {
    ensure(
        t.is_finite() && t >= 0.0,
        "t",
        t,
        "must be finite and non-negative",
    )
}

/// The bracket of `q(t)`, i.e. the coherence without its deterministic phase.
pub(crate) fn bracket(t: f64, p: &RtnParams) -> Complex {
    if p.v == 0.0 {
        return Complex::new(1.0, 0.0);
    }
    let g = p.g();
    let u = p.gamma * t / 2.0;
    let c = Complex::new(1.0, -g * p.delta_p0);
    match Regime::of(g) {
        Regime::Critical => (-u).exp() * (1.0 + c * u),
        Regime::Oscillatory(b) => {
            let y = b * u;
            (-u).exp() * (y.cos() + c * (u * sin_over_x(y)))
        }
        Regime::Overdamped(a) => {
            let x = a * u;
            if x < SERIES_CUTOFF {
                (-u).exp() * (x.cosh() + c * (u * sinh_over_x(x)))
            } else {
                // e^{-u} cosh(x) and e^{-u} sinh(x)/α written via the slow
                // exponential so neither factor overflows at long times
                let slow = (-u * one_minus_alpha(g, a)).exp();
                let fast_ratio = (-2.0 * x).exp();
                let cosh_part = slow * (1.0 + fast_ratio) / 2.0;
                let sinh_part = -slow * (-2.0 * x).exp_m1() / (2.0 * a);
                cosh_part + c * sinh_part
            }
        }
    }
}

/// `e^{γt/2}` times the bracket: the same zeros without the overall decay.
/// Only meaningful for moderate `γt` (the overdamped branch grows like
/// `e^{γαt/2}`).
pub(crate) fn undamped_bracket(t: f64, p: &RtnParams) -> Complex {
    if p.v == 0.0 {
        return Complex::new((p.gamma * t / 2.0).exp(), 0.0);
    }
    let g = p.g();
    let u = p.gamma * t / 2.0;
    let c = Complex::new(1.0, -g * p.delta_p0);
    match Regime::of(g) {
        Regime::Critical => 1.0 + c * u,
        Regime::Oscillatory(b) => {
            let y = b * u;
            y.cos() + c * (u * sin_over_x(y))
        }
        Regime::Overdamped(a) => {
            let x = a * u;
            x.cosh() + c * (u * sinh_over_x(x))
        }
    }
}

/// Single-qubit coherence `q(t) = ρ01(t)/ρ01(0)`.
pub fn coherence_q(t: f64, p: &RtnParams) -> Result<Complex> {
    check_time(t)?;
    p.validate()?;
    let phase = Complex::from_polar(1.0, -(p.omega + p.v / 2.0) * t);
    Ok(phase * bracket(t, p))
}

/// `|q(t)|`, computed from the bracket alone so it does not depend on `Ω`.
pub fn coherence_modulus(t: f64, p: &RtnParams) -> Result<f64> {
    check_time(t)?;
    p.validate()?;
    Ok(bracket(t, p).norm())
}

/// Power spectrum of the equilibrium fluctuations, `v²γ / (2(γ² + ω²))`.
pub fn power_spectrum(omega_freq: f64, v: f64, gamma: f64) -> Result<f64> {
    ensure(gamma > 0.0, "gamma", gamma, "must be positive")?;
    Ok(v * v * gamma / (2.0 * (gamma * gamma + omega_freq * omega_freq)))
}

/// Weak-coupling dephasing rate `v²/(4γ)`.
pub fn golden_rule_rate(v: f64, gamma: f64) -> Result<f64> {
    ensure(gamma > 0.0, "gamma", gamma, "must be positive")?;
    Ok(v * v / (4.0 * gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(g: f64, dp: f64) -> RtnParams {
        RtnParams::from_ratio(g, 1.0, dp).unwrap()
    }

    #[test]
    fn alpha_branches() {
        assert_eq!(alpha_of(0.0).unwrap(), Complex::new(1.0, 0.0));
        assert_eq!(alpha_of(1.0).unwrap(), Complex::new(0.0, 0.0));
        let a = alpha_of(2f64.sqrt()).unwrap();
        assert!(a.re.abs() < 1e-15);
        assert_relative_eq!(a.im, 1.0, epsilon = 1e-15);
        assert!(alpha_of(f64::NAN).is_err());
        assert!(alpha_of(f64::INFINITY).is_err());
        assert!(alpha_of(-0.5).is_err());
    }

    #[test]
    fn terms_at_half_coupling() {
        let t = coherence_terms(&params(0.5, 0.0)).unwrap();
        assert_relative_eq!(t.alpha.re, 0.866_025_403_784_438_6, epsilon = 1e-15);
        assert_relative_eq!(t.big_a.re, 1.077_350_269_189_625_8, epsilon = 1e-14);
        assert_eq!(t.big_a.im, 0.0);
        let sum = t.rate_slow + t.rate_fast;
        assert_relative_eq!(sum.re, 1.0, epsilon = 1e-15);
        assert!(sum.im.abs() < 1e-15);
    }

    #[test]
    fn terms_without_noise() {
        let t = coherence_terms(&params(0.0, 0.0)).unwrap();
        assert_eq!(t.alpha, Complex::new(1.0, 0.0));
        assert_eq!(t.big_a, Complex::new(1.0, 0.0));
        assert_eq!(t.rate_slow, Complex::new(0.0, 0.0));
    }

    #[test]
    fn terms_strong_coupling() {
        let t = coherence_terms(&params(5.0, 1.0)).unwrap();
        assert!(t.alpha.re == 0.0);
        assert_relative_eq!(t.alpha.im, 24f64.sqrt(), epsilon = 1e-14);
        // A = (1 + i√24 − 5i) / (2i√24)
        let expected =
            (Complex::new(1.0, 24f64.sqrt() - 5.0)) / Complex::new(0.0, 2.0 * 24f64.sqrt());
        assert_relative_eq!(t.big_a.re, expected.re, epsilon = 1e-15);
        assert_relative_eq!(t.big_a.im, expected.im, epsilon = 1e-15);
        let one = t.big_a + (Complex::new(1.0, 0.0) - t.big_a);
        assert_eq!(one, Complex::new(1.0, 0.0));
        let sum = t.rate_slow + t.rate_fast;
        assert_relative_eq!(sum.re, 1.0, epsilon = 1e-15);
        assert!(sum.im.abs() < 1e-14);
    }

    #[test]
    fn terms_reject_branch_point() {
        assert_eq!(
            coherence_terms(&params(1.0, 0.0)),
            Err(Error::DegenerateBranch)
        );
    }

    #[test]
    fn coherence_at_origin_is_one() {
        for g in [0.0, 0.3, 1.0, 1.0 + 1e-9, 5.0] {
            for dp in [-1.0, -0.4, 0.0, 1.0] {
                let mut p = params(g, dp);
                p.omega = 3.7;
                assert_eq!(coherence_q(0.0, &p).unwrap(), Complex::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn uncoupled_qubit_only_rotates() {
        let p = RtnParams::new(2.5, 0.0, 1.0, 0.7).unwrap();
        for t in [0.1, 1.0, 17.3, 400.0] {
            let q = coherence_q(t, &p).unwrap();
            let expected = Complex::from_polar(1.0, -2.5 * t);
            assert_eq!(q, expected);
            assert_eq!(coherence_modulus(t, &p).unwrap(), 1.0);
        }
    }

    #[test]
    fn weak_coupling_matches_golden_rule() {
        let p = params(0.1, 0.0);
        let m = coherence_modulus(10.0, &p).unwrap();
        let golden = (-golden_rule_rate(p.v, p.gamma).unwrap() * 10.0).exp();
        assert!((m - golden).abs() / golden < 0.05, "{m} vs {golden}");
        let slow = coherence_terms(&p).unwrap().rate_slow.re;
        assert!((slow - 0.0025).abs() / 0.0025 < 0.005);
    }

    #[test]
    fn spectrum_values() {
        assert_relative_eq!(power_spectrum(0.0, 2.0, 0.5).unwrap(), 4.0);
        assert_relative_eq!(power_spectrum(0.5, 2.0, 0.5).unwrap(), 2.0);
        assert_eq!(
            power_spectrum(1.3, 0.7, 2.0).unwrap(),
            power_spectrum(-1.3, 0.7, 2.0).unwrap()
        );
        assert!(power_spectrum(0.0, 1.0, 0.0).is_err());
        assert_eq!(golden_rule_rate(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(golden_rule_rate(1.0, 1.0).unwrap(), 0.25);
        assert!(golden_rule_rate(1.0, -1.0).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(RtnParams::new(0.0, -1.0, 1.0, 0.0).is_err());
        assert!(RtnParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(RtnParams::new(0.0, 1.0, 1.0, 1.5).is_err());
        assert!(RtnParams::new(f64::NAN, 1.0, 1.0, 0.0).is_err());
        assert!(coherence_q(-1e-3, &params(0.5, 0.0)).is_err());
        assert!(coherence_modulus(f64::NAN, &params(0.5, 0.0)).is_err());
    }

    #[test]
    fn long_times_stay_finite() {
        for g in [0.01, 0.1, 0.9, 1.0, 3.0] {
            let m = coherence_modulus(5_000.0, &params(g, 1.0)).unwrap();
            assert!(m.is_finite() && m >= 0.0);
        }
    }

    #[test]
    fn oscillation_period_only_above_one() {
        assert_eq!(params(0.5, 0.0).oscillation_period(), None);
        assert_eq!(params(1.0, 0.0).oscillation_period(), None);
        let period = params(5.0, 0.0).oscillation_period().unwrap();
        assert_relative_eq!(period, 4.0 * PI / 24f64.sqrt(), epsilon = 1e-14);
    }
}
