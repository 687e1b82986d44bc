//! Covariance model of the optimal one-to-two Gaussian cloner and its
//! equivalence, in direct reconciliation at high modulation, with the
//! individual attacks of [`crate::qkd`].
//!
//! The cloner is represented purely by its action on second moments: clone
//! `k` receives an extra `chi_k` of noise per quadrature, with the two
//! noises locked to `chi_b * chi_c = 1` at the optimum. The normalization is
//! pinned by the fact that the Bob-side clone with `chi_b = nbar` acts
//! exactly like the additive classical-noise canonical channel.

use crate::error::{Error, Result};
use crate::gaussian::CovMatrix;
use crate::qkd::AttackParams;

/// Which output clone of the machine to look at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CloneMode {
    /// The clone forwarded to the legitimate receiver.
    B,
    /// The clone kept by the attacker.
    C,
}

impl std::fmt::Display for CloneMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CloneMode::B => "b",
            CloneMode::C => "c",
        })
    }
}

impl std::str::FromStr for CloneMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b" | "B" => Ok(CloneMode::B),
            "c" | "C" => Ok(CloneMode::C),
            other => Err(Error::InvalidParams {
                detail: format!("clone mode must be 'b' or 'c', got '{other}'"),
            }),
        }
    }
}

/// Cloning noises of an optimal machine, locked to `chi_b * chi_c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ClonerParams {
    chi_b: f64,
    chi_c: f64,
}

impl ClonerParams {
    /// Build from the Bob-side noise; the attacker-side noise is pinned to
    /// its reciprocal by optimality.
    pub fn new(chi_b: f64) -> Result<Self> {
        if !chi_b.is_finite() || chi_b <= 0.0 {
            return Err(Error::InvalidParams {
                detail: format!("chi_b = {chi_b} must be finite and > 0"),
            });
        }
        Ok(ClonerParams { chi_b, chi_c: 1.0 / chi_b })
    }

    pub fn chi_b(&self) -> f64 {
        self.chi_b
    }

    pub fn chi_c(&self) -> f64 {
        self.chi_c
    }

    fn chi(&self, which: CloneMode) -> f64 {
        match which {
            CloneMode::B => self.chi_b,
            CloneMode::C => self.chi_c,
        }
    }
}

/// Covariance of one output clone: the input plus `chi_k` per quadrature.
/// The mean is untouched by the machine.
pub fn clone_output_cov(p: &ClonerParams, which: CloneMode, v_in: &CovMatrix) -> Result<CovMatrix> {
    if v_in.modes() != 1 {
        return Err(Error::NotSingleMode { got_modes: v_in.modes() });
    }
    let chi = p.chi(which);
    let m = v_in.matrix() + nalgebra::DMatrix::identity(2, 2) * chi;
    CovMatrix::new(m)
}

/// Product of the clones' added-noise factors `(1 + chi_b)(1 + chi_c)`:
/// the figure of merit the optimal machine minimizes.
pub fn disturbance_product(p: &ClonerParams) -> f64 {
    (1.0 + p.chi_b) * (1.0 + p.chi_c)
}

/// The cloning machine whose additive description reproduces, in direct
/// reconciliation at high modulation, the informations of the given attack:
/// `chi_b` is the attack's input-referred noise and `chi_c` its reciprocal.
///
/// The equivalence covers `I_AB` and `I_AE` only; reverse reconciliation
/// distinguishes the two models.
pub fn ogc_equivalent_of(p: &AttackParams) -> ClonerParams {
    let chi = p.chi();
    // chi > 0 for every constructible attack, so this cannot fail.
    ClonerParams::new(chi).expect("attack noise is finite and positive")
}
