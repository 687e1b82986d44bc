//! Unitary dilations of regular canonical forms.
//!
//! A regular form (class C or D) is realized by a two-mode symplectic
//! interaction `M(tau)` between the signal and one thermal environment mode of
//! variance `omega = 2 nbar + 1`. Replacing the thermal mode by half of a
//! two-mode squeezed vacuum purifies the environment without touching the
//! reduced channel. The identity and the additive-noise class B2 admit no such
//! single-mode construction and are rejected here.

use nalgebra::DMatrix;

use crate::canonical::CanonicalForm;
use crate::error::{Error, Result};
use crate::gaussian::{
    conjugate, partial_trace, tensor, GaussianState, SymplecticMatrix,
};

/// Transmissions this close to the fixed points leave no two-mode interaction.
pub const TAU_SINGULAR_TOL: f64 = 1e-9;

/// Two-mode interaction with generalized transmission `tau`: a beam splitter
/// for `0 < tau < 1`, a two-mode squeezer for `tau > 1`, and their
/// conjugate-transmission counterpart for `tau < 0`.
///
/// Rows and columns are ordered `(q_b, p_b, q_c, p_c)` against
/// `(q_a, p_a, q_e, p_e)`. Undefined at `tau` in `{0, 1}`.
pub fn symplectic_interaction(tau: f64) -> Result<SymplecticMatrix> {
    if !tau.is_finite() {
        return Err(Error::InvalidParams {
            detail: format!("tau = {tau} must be finite"),
        });
    }
    if tau.abs() <= TAU_SINGULAR_TOL || (tau - 1.0).abs() <= TAU_SINGULAR_TOL {
        return Err(Error::SingularTransmission { tau });
    }
    let s = |x: f64| x.signum();
    let a = tau.abs().sqrt();
    let b = (1.0 - tau).abs().sqrt();
    let m = DMatrix::from_row_slice(
        4,
        4,
        &[
            a, 0.0, b, 0.0, //
            0.0, s(tau) * a, 0.0, s(1.0 - tau) * b, //
            s(tau - 1.0) * b, 0.0, s(tau) * a, 0.0, //
            0.0, -b, 0.0, a,
        ],
    );
    SymplecticMatrix::new(m)
}

fn require_regular(form: &CanonicalForm, what: &str) -> Result<(f64, f64)> {
    if !form.is_regular() {
        return Err(Error::UnsupportedClass {
            class: form.class().label().into(),
            detail: format!("{what} exists only for the regular classes C and D"),
        });
    }
    Ok((form.invariants().tau(), form.invariants().nbar()))
}

/// A regular form realized as: couple the input to a thermal environment mode
/// through `M(tau)`, keep the first output mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalRepresentation {
    interaction: SymplecticMatrix,
    environment: GaussianState,
    tau: f64,
    nbar: f64,
}

impl PhysicalRepresentation {
    pub fn interaction(&self) -> &SymplecticMatrix {
        &self.interaction
    }

    /// Thermal environment mode, covariance `(2 nbar + 1) I`.
    pub fn environment(&self) -> &GaussianState {
        &self.environment
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// Joint output of signal and environment after the interaction.
    pub fn joint_output(&self, input: &GaussianState) -> Result<GaussianState> {
        conjugate(&self.interaction, &tensor(input, &self.environment))
    }

    /// Reduced channel action: joint evolution followed by tracing out the
    /// environment output.
    pub fn apply(&self, input: &GaussianState) -> Result<GaussianState> {
        partial_trace(&self.joint_output(input)?, &[0])
    }
}

/// Single-environment-mode realization of a regular canonical form.
pub fn physical_representation(form: &CanonicalForm) -> Result<PhysicalRepresentation> {
    let (tau, nbar) = require_regular(form, "a single-mode physical representation")?;
    Ok(PhysicalRepresentation {
        interaction: symplectic_interaction(tau)?,
        environment: GaussianState::thermal(nbar)?,
        tau,
        nbar,
    })
}

/// The same realization with the thermal environment replaced by half of a
/// two-mode squeezed vacuum, making the global evolution pure.
#[derive(Debug, Clone, PartialEq)]
pub struct TmsvPurification {
    extended: SymplecticMatrix,
    environment: GaussianState,
    tau: f64,
    omega: f64,
}

impl TmsvPurification {
    /// `M(tau)` acting on (signal, environment), identity on the twin mode.
    pub fn extended_interaction(&self) -> &SymplecticMatrix {
        &self.extended
    }

    /// Two-mode squeezed vacuum across (environment, twin).
    pub fn environment(&self) -> &GaussianState {
        &self.environment
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Joint output over (signal out, environment out, twin).
    pub fn joint_output(&self, input: &GaussianState) -> Result<GaussianState> {
        conjugate(&self.extended, &tensor(input, &self.environment))
    }

    /// Reduced channel action through the purified environment.
    pub fn apply(&self, input: &GaussianState) -> Result<GaussianState> {
        partial_trace(&self.joint_output(input)?, &[0])
    }
}

/// Purify the environment of a regular form with a two-mode squeezed vacuum.
pub fn tmsv_purification(form: &CanonicalForm) -> Result<TmsvPurification> {
    let (tau, nbar) = require_regular(form, "a TMSV purification")?;
    let omega = 2.0 * nbar + 1.0;
    Ok(TmsvPurification {
        extended: symplectic_interaction(tau)?.direct_sum(&SymplecticMatrix::identity(1)),
        environment: GaussianState::tmsv(omega)?,
        tau,
        omega,
    })
}

/// Whether every eavesdropper on the purified environment ends up with a
/// degraded copy of the channel output: holds exactly for `tau <= 1/2`.
pub fn is_strongly_antidegradable(form: &CanonicalForm) -> Result<bool> {
    let (tau, _) = require_regular(form, "the antidegradability criterion")?;
    Ok(tau <= 0.5)
}

/// Whether the environment output can be produced from the channel output by
/// another valid channel: holds exactly for `tau >= 1/2`.
pub fn is_weakly_degradable(form: &CanonicalForm) -> Result<bool> {
    let (tau, _) = require_regular(form, "the degradability criterion")?;
    Ok(tau >= 0.5)
}
