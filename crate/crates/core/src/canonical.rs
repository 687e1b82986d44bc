//! Classification of one-mode Gaussian channels by symplectic invariants.
//!
//! Every valid channel is unitarily equivalent to exactly one canonical form,
//! determined by the generalized transmission `tau = det T`, the rank index
//! `r = rank(T) * rank(N) / 2`, and a temperature `nbar >= 0`:
//!
//! | class     | tau        | r | T_c             | N_c                       |
//! |-----------|------------|---|-----------------|---------------------------|
//! | A1        | 0          | 0 | 0               | (2 nbar + 1) I            |
//! | A2        | 0          | 1 | (I + Z) / 2     | (2 nbar + 1) I            |
//! | B1        | 1          | 1 | I               | (I - Z) / 2               |
//! | B2        | 1          | 2 | I               | nbar I                    |
//! | B2 (id)   | 1          | 0 | I               | 0                         |
//! | C (att)   | 0 < tau < 1| 2 | sqrt(tau) I     | (1 - tau)(2 nbar + 1) I   |
//! | C (amp)   | tau > 1    | 2 | sqrt(tau) I     | (tau - 1)(2 nbar + 1) I   |
//! | D         | tau < 0    | 2 | sqrt(-tau) Z    | (1 - tau)(2 nbar + 1) I   |
//!
//! with `Z = diag(1, -1)`. Transmissions within `SNAP_TOL` of 0 or 1 snap to
//! the fixed point before the table lookup.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::gaussian::{numeric_rank2, GaussianChannel};

/// Transmissions this close to 0 or 1 are treated as exactly singular.
pub const SNAP_TOL: f64 = 1e-9;

/// `diag(1, -1)`.
pub fn z_matrix() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// The eight canonical classes of one-mode Gaussian channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CanonicalClass {
    A1,
    A2,
    B1,
    B2,
    B2Id,
    CAtt,
    CAmp,
    D,
}

impl CanonicalClass {
    /// Stable label used in reports and on the command line.
    pub fn label(self) -> &'static str {
        match self {
            CanonicalClass::A1 => "A1",
            CanonicalClass::A2 => "A2",
            CanonicalClass::B1 => "B1",
            CanonicalClass::B2 => "B2",
            CanonicalClass::B2Id => "B2(id)",
            CanonicalClass::CAtt => "C(att)",
            CanonicalClass::CAmp => "C(amp)",
            CanonicalClass::D => "D",
        }
    }
}

impl std::fmt::Display for CanonicalClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

fn snap(tau: f64) -> f64 {
    if tau.abs() <= SNAP_TOL {
        0.0
    } else if (tau - 1.0).abs() <= SNAP_TOL {
        1.0
    } else {
        tau
    }
}

fn class_from(tau: f64, rank_r: u8) -> Option<CanonicalClass> {
    let t = snap(tau);
    match (t, rank_r) {
        (0.0, 0) => Some(CanonicalClass::A1),
        (0.0, 1) => Some(CanonicalClass::A2),
        (1.0, 0) => Some(CanonicalClass::B2Id),
        (1.0, 1) => Some(CanonicalClass::B1),
        (1.0, 2) => Some(CanonicalClass::B2),
        (t, 2) if t > 0.0 && t < 1.0 => Some(CanonicalClass::CAtt),
        (t, 2) if t > 1.0 => Some(CanonicalClass::CAmp),
        (t, 2) if t < 0.0 => Some(CanonicalClass::D),
        _ => None,
    }
}

/// Complete invariant of a one-mode Gaussian channel under input/output
/// Gaussian unitaries.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ChannelInvariants {
    tau: f64,
    rank_r: u8,
    nbar: f64,
}

impl ChannelInvariants {
    /// Build an invariant triple, rejecting combinations outside the table.
    pub fn new(tau: f64, rank_r: u8, nbar: f64) -> Result<Self> {
        if !tau.is_finite() || !nbar.is_finite() || nbar < 0.0 {
            return Err(Error::InvalidInvariants {
                detail: format!("tau = {tau}, nbar = {nbar}: need finite tau and nbar >= 0"),
            });
        }
        let class = class_from(tau, rank_r).ok_or(Error::InvalidInvariants {
            detail: format!("(tau = {tau}, r = {rank_r}) matches no canonical class"),
        })?;
        if matches!(class, CanonicalClass::B1 | CanonicalClass::B2Id) && nbar != 0.0 {
            return Err(Error::InvalidInvariants {
                detail: format!("class {class} forces nbar = 0, got {nbar}"),
            });
        }
        Ok(ChannelInvariants {
            tau: snap(tau),
            rank_r,
            nbar,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn rank_r(&self) -> u8 {
        self.rank_r
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// Canonical class determined by `(tau, r)`.
    pub fn class(&self) -> CanonicalClass {
        class_from(self.tau, self.rank_r).expect("validated at construction")
    }

    /// A channel is regular when both ranks are full and the transmission is
    /// away from the fixed points 0 and 1.
    pub fn is_regular(&self) -> bool {
        self.rank_r == 2 && self.tau != 0.0 && self.tau != 1.0
    }
}

/// Extract the invariant triple `(tau, r, nbar)` of a valid channel.
pub fn invariants_of(ch: &GaussianChannel) -> Result<ChannelInvariants> {
    let tau = snap(ch.t().determinant());
    let rank_t = numeric_rank2(ch.t());
    let rank_n = numeric_rank2(ch.n());
    let product = (rank_t * rank_n) as u32;
    if product % 2 != 0 && product != 1 {
        unreachable!("2x2 ranks are at most 2");
    }
    let rank_r = match product {
        0 => 0u8,
        2 => 1,
        4 => 2,
        other => return Err(Error::Unclassifiable { tau, rank_product: other }),
    };
    let class = class_from(tau, rank_r).ok_or(Error::Unclassifiable {
        tau,
        rank_product: product,
    })?;
    let det_n = ch.n().determinant().max(0.0);
    let nbar = match class {
        CanonicalClass::A1 | CanonicalClass::A2 => (det_n.sqrt() - 1.0) / 2.0,
        CanonicalClass::B1 | CanonicalClass::B2Id => 0.0,
        CanonicalClass::B2 => det_n.sqrt(),
        CanonicalClass::CAtt | CanonicalClass::CAmp | CanonicalClass::D => {
            (det_n.sqrt() / (1.0 - tau).abs() - 1.0) / 2.0
        }
    };
    ChannelInvariants::new(tau, rank_r, nbar.max(0.0))
}

/// Canonical class of a valid channel.
pub fn classify(ch: &GaussianChannel) -> Result<CanonicalClass> {
    Ok(invariants_of(ch)?.class())
}

/// A canonical form: the representative `(T_c, N_c, 0)` of an equivalence
/// class, together with its invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    class: CanonicalClass,
    invariants: ChannelInvariants,
    tc: Matrix2<f64>,
    nc: Matrix2<f64>,
}

impl CanonicalForm {
    pub fn class(&self) -> CanonicalClass {
        self.class
    }

    pub fn invariants(&self) -> &ChannelInvariants {
        &self.invariants
    }

    pub fn tc(&self) -> &Matrix2<f64> {
        &self.tc
    }

    pub fn nc(&self) -> &Matrix2<f64> {
        &self.nc
    }

    pub fn is_regular(&self) -> bool {
        self.invariants.is_regular()
    }

    /// The canonical form as a displacement-free channel.
    pub fn to_channel(&self) -> GaussianChannel {
        GaussianChannel::new(self.tc, self.nc, Vector2::zeros())
            .expect("canonical forms satisfy channel validity")
    }
}

/// Representative matrices for an invariant triple, straight from the table.
pub fn canonical_form(inv: &ChannelInvariants) -> CanonicalForm {
    let id = Matrix2::identity();
    let z = z_matrix();
    let (tau, nbar) = (inv.tau(), inv.nbar());
    let omega = 2.0 * nbar + 1.0;
    let class = inv.class();
    let (tc, nc) = match class {
        CanonicalClass::A1 => (Matrix2::zeros(), id * omega),
        CanonicalClass::A2 => ((id + z) * 0.5, id * omega),
        CanonicalClass::B1 => (id, (id - z) * 0.5),
        CanonicalClass::B2 => (id, id * nbar),
        CanonicalClass::B2Id => (id, Matrix2::zeros()),
        CanonicalClass::CAtt => (id * tau.sqrt(), id * ((1.0 - tau) * omega)),
        CanonicalClass::CAmp => (id * tau.sqrt(), id * ((tau - 1.0) * omega)),
        CanonicalClass::D => (z * (-tau).sqrt(), id * ((1.0 - tau) * omega)),
    };
    CanonicalForm {
        class,
        invariants: *inv,
        tc,
        nc,
    }
}

/// Classification plus canonical form of a channel in one pass.
pub fn canonical_form_of(ch: &GaussianChannel) -> Result<CanonicalForm> {
    Ok(canonical_form(&invariants_of(ch)?))
}
