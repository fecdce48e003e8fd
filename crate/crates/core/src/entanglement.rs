//! Extended Werner-like (EWL) initial states, their evolution under local pure
//! dephasing and two-qubit concurrence.
//!
//! Basis ordering is `{|00⟩, |01⟩, |10⟩, |11⟩}`. An X state keeps only the
//! diagonal and the anti-diagonal pairs `ρ03` and `ρ12`; local pure dephasing
//! leaves the diagonal alone and multiplies each anti-diagonal element by a
//! product of single-qubit coherences, so the X form is preserved.

use nalgebra::{Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::noise::{bracket, coherence_modulus, RtnParams};
use crate::Complex;

/// Slack absorbed by the X-state invariants.
const X_TOL: f64 = 1e-12;
/// Slack on Hermiticity, trace and positivity for full density matrices.
const RHO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EwlFamily {
    /// Pure part `a|01⟩ + b|10⟩`.
    OneExcitation,
    /// Pure part `a|00⟩ + b|11⟩`.
    TwoExcitation,
}

/// `r |ψ⟩⟨ψ| + (1 − r)/4 · 𝟙`, with `|ψ⟩` Bell-like of amplitude `a`. The
/// phases of `a` and `b` are dropped; `b = sqrt(1 − a²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EwlState {
    pub family: EwlFamily,
    pub r: f64,
    pub a_mod: f64,
}

impl EwlState {
    pub fn new(family: EwlFamily, r: f64, a_mod: f64) -> Result<Self> {
        let s = Self { family, r, a_mod };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("r", self.r)?;
        check_unit("a_mod", self.a_mod)
    }

    pub fn b_mod(&self) -> f64 {
        (1.0 - self.a_mod * self.a_mod).max(0.0).sqrt()
    }

    /// `|ab|`
    pub fn ab(&self) -> f64 {
        self.a_mod * self.b_mod()
    }

    pub fn to_xstate(&self) -> Result<XState> {
        make_ewl(self.family, self.r, self.a_mod)
    }
}

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    ensure((0.0..=1.0).contains(&x), name, x, "must lie in [0, 1]")
}

/// Two-qubit density matrix in X form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XState {
    pub d00: f64,
    pub d11: f64,
    pub d22: f64,
    pub d33: f64,
    pub c03: Complex,
    pub c12: Complex,
}

impl XState {
    pub fn validate(&self) -> Result<()> {
        let diag = [self.d00, self.d11, self.d22, self.d33];
        if diag.iter().any(|d| !d.is_finite()) || !self.c03.is_finite() || !self.c12.is_finite() {
            return Err(Error::NonPhysical("non-finite X-state element".into()));
        }
        let trace: f64 = diag.iter().sum();
        if (trace - 1.0).abs() > X_TOL {
            return Err(Error::NonPhysical(format!("trace {trace} differs from 1")));
        }
        if diag.iter().any(|&d| d < -X_TOL) {
            return Err(Error::NonPhysical("negative population".into()));
        }
        if self.c03.norm_sqr() > self.d00 * self.d33 + X_TOL
            || self.c12.norm_sqr() > self.d11 * self.d22 + X_TOL
        {
            return Err(Error::NonPhysical(
                "anti-diagonal exceeds positivity bound".into(),
            ));
        }
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        self.d00 + self.d11 + self.d22 + self.d33
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        self.d00 * self.d00
            + self.d11 * self.d11
            + self.d22 * self.d22
            + self.d33 * self.d33
            + 2.0 * (self.c03.norm_sqr() + self.c12.norm_sqr())
    }

    /// Embeds the state as a full 4×4 matrix.
    pub fn to_matrix(&self) -> Matrix4<Complex> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = Complex::new(self.d00, 0.0);
        m[(1, 1)] = Complex::new(self.d11, 0.0);
        m[(2, 2)] = Complex::new(self.d22, 0.0);
        m[(3, 3)] = Complex::new(self.d33, 0.0);
        m[(0, 3)] = self.c03;
        m[(3, 0)] = self.c03.conj();
        m[(1, 2)] = self.c12;
        m[(2, 1)] = self.c12.conj();
        m
    }
}

pub fn make_ewl(family: EwlFamily, r: f64, a_mod: f64) -> Result<XState> {
    check_unit("r", r)?;
    check_unit("a_mod", a_mod)?;
    let a2 = a_mod * a_mod;
    let b2 = 1.0 - a2;
    let coherence = Complex::new(r * a_mod * b2.sqrt(), 0.0);
    let mixed = (1.0 - r) / 4.0;
    let zero = Complex::new(0.0, 0.0);
    Ok(match family {
        EwlFamily::OneExcitation => XState {
            d00: mixed,
            d11: r * a2 + mixed,
            d22: r * b2 + mixed,
            d33: mixed,
            c03: zero,
            c12: coherence,
        },
        EwlFamily::TwoExcitation => XState {
            d00: r * a2 + mixed,
            d11: mixed,
            d22: mixed,
            d33: r * b2 + mixed,
            c03: coherence,
            c12: zero,
        },
    })
}

/// `C(0) = 2 max{0, (|ab| + 1/4) r − 1/4}`, identical for both families.
pub fn initial_concurrence(r: f64, a_mod: f64) -> Result<f64> {
    check_unit("r", r)?;
    check_unit("a_mod", a_mod)?;
    let ab = a_mod * (1.0 - a_mod * a_mod).max(0.0).sqrt();
    Ok(2.0 * ((ab + 0.25) * r - 0.25).max(0.0))
}

/// Entanglement boundary `r* = 1/(1 + 4|ab|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RStar {
    pub value: f64,
    /// `a ∈ {0, 1}`: the pure part is a product state and no `r` entangles.
    pub product_family: bool,
}

pub fn r_star(a_mod: f64) -> Result<RStar> {
    check_unit("a_mod", a_mod)?;
    if a_mod == 0.0 || a_mod == 1.0 {
        return Ok(RStar {
            value: 1.0,
            product_family: true,
        });
    }
    let ab = a_mod * (1.0 - a_mod * a_mod).sqrt();
    Ok(RStar {
        value: 1.0 / (1.0 + 4.0 * ab),
        product_family: false,
    })
}

/// `Tr ρ² = (1 + 3r²)/4`
pub fn purity_ewl(r: f64) -> Result<f64> {
    check_unit("r", r)?;
    Ok((1.0 + 3.0 * r * r) / 4.0)
}

/// Applies local dephasing with coherences `q_a`, `q_b` taken at a common time.
pub fn evolve_xstate(initial: &XState, q_a: Complex, q_b: Complex) -> Result<XState> {
    for (name, q) in [("|q_a|", q_a), ("|q_b|", q_b)] {
        let m = q.norm();
        ensure(
            m <= 1.0 + 1e-9,
            name,
            m,
            "a coherence cannot exceed 1 in modulus",
        )?;
    }
    Ok(XState {
        c03: initial.c03 * q_a * q_b,
        c12: initial.c12 * q_a * q_b.conj(),
        ..*initial
    })
}

/// Concurrence of an X state, `2 max{0, |ρ12| − √(ρ00ρ33), |ρ03| − √(ρ11ρ22)}`.
pub fn concurrence_x(s: &XState) -> Result<f64> {
    s.validate()?;
    let k1 = s.c12.norm() - (s.d00 * s.d33).max(0.0).sqrt();
    let k2 = s.c03.norm() - (s.d11 * s.d22).max(0.0).sqrt();
    Ok(2.0 * k1.max(k2).max(0.0))
}

fn sigma_yy() -> Matrix4<Complex> {
    // σy ⊗ σy is real: anti-diagonal (-1, 1, 1, -1)
    let mut m = Matrix4::zeros();
    m[(0, 3)] = Complex::new(-1.0, 0.0);
    m[(1, 2)] = Complex::new(1.0, 0.0);
    m[(2, 1)] = Complex::new(1.0, 0.0);
    m[(3, 0)] = Complex::new(-1.0, 0.0);
    m
}

/// Wootters concurrence of a general two-qubit density matrix.
///
/// The values `λᵢ` are the singular values of `√ρ (σy⊗σy) √ρ*`, which equal the
/// square roots of the eigenvalues of `ρ (σy⊗σy) ρ* (σy⊗σy)`; singular values
/// avoid taking square roots of nearly vanishing eigenvalues.
pub fn concurrence_wootters(rho: &Matrix4<Complex>) -> Result<f64> {
    if rho.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonPhysical("non-finite entry".into()));
    }
    let herm_err = (rho - rho.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if herm_err > RHO_TOL {
        return Err(Error::NonPhysical(format!(
            "not Hermitian (deviation {herm_err:e})"
        )));
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > RHO_TOL || trace.im.abs() > RHO_TOL {
        return Err(Error::NonPhysical(format!("trace {trace} differs from 1")));
    }
    let herm = (rho + rho.adjoint()) * Complex::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    if let Some(min) = eig.eigenvalues.iter().copied().reduce(f64::min) {
        if min < -RHO_TOL {
            return Err(Error::NonPhysical(format!("negative eigenvalue {min:e}")));
        }
    }
    let sqrt_vals = eig
        .eigenvalues
        .map(|x| Complex::new(x.max(0.0).sqrt(), 0.0));
    let sqrt_rho =
        eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();
    let s = sqrt_rho * sigma_yy() * sqrt_rho.conjugate();
    let mut lambda: Vec<f64> = s.singular_values().iter().copied().collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0))
}

/// `K(t) = r|ab| |q_A(t)| |q_B(t)| − (1 − r)/4`; concurrence is `2 max{0, K}`.
pub fn k_function(t: f64, state: &EwlState, p_a: &RtnParams, p_b: &RtnParams) -> Result<f64> {
    state.validate()?;
    let qa = coherence_modulus(t, p_a)?;
    let qb = coherence_modulus(t, p_b)?;
    Ok(state.r * state.ab() * qa * qb - (1.0 - state.r) / 4.0)
}

/// `K` without validation, for hot loops over already-validated inputs.
pub(crate) fn k_unchecked(t: f64, state: &EwlState, p_a: &RtnParams, p_b: &RtnParams) -> f64 {
    state.r * state.ab() * bracket(t, p_a).norm() * bracket(t, p_b).norm() - (1.0 - state.r) / 4.0
}
