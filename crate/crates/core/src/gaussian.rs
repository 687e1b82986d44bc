//! Phase-space algebra for Gaussian states and one-mode Gaussian channels.
//!
//! Quadrature convention: `[q, p] = 2i`, so the vacuum covariance is the
//! identity, a thermal state with mean photon number `nbar` has covariance
//! `(2*nbar + 1) I`, and a coherent state of amplitude `alpha` has mean vector
//! `(2 Re alpha, 2 Im alpha)`. Vectors are ordered `(q1, p1, q2, p2, ...)`.
//!
//! All matrices are real and dense; states stay small (at most three modes in
//! this crate), so everything runs through double-precision dense solvers.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::error::{Error, Result};

/// Max allowed deviation from symmetry, entrywise.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Eigenvalue lower bound for positive-semidefinite checks.
pub const PSD_TOL: f64 = 1e-9;
/// Max allowed entry of `M Omega M^T - Omega` for symplectic matrices.
pub const SYMPLECTIC_TOL: f64 = 1e-9;
/// Measured-quadrature variance below this is treated as singular.
pub const CONDITIONING_FLOOR: f64 = 1e-12;
/// Slack on the complete-positivity determinant inequality.
pub const CHANNEL_CP_TOL: f64 = 1e-9;
/// Relative singular-value cutoff for numeric rank, floored at scale 1.
pub const RANK_REL_TOL: f64 = 1e-8;

/// Symplectic form for `modes` modes: block diagonal of `[[0, 1], [-1, 0]]`.
pub fn omega_matrix(modes: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        m[(2 * k, 2 * k + 1)] = 1.0;
        m[(2 * k + 1, 2 * k)] = -1.0;
    }
    m
}

/// Phase-space rotation of one mode by angle `theta`.
pub fn rotation2(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// Numeric rank of a 2x2 matrix: singular values below
/// `RANK_REL_TOL * max(sigma_max, 1)` count as zero.
pub fn numeric_rank2(m: &Matrix2<f64>) -> usize {
    let sv = m.svd(false, false).singular_values;
    let cutoff = RANK_REL_TOL * sv[0].max(1.0);
    sv.iter().filter(|&&s| s > cutoff).count()
}

fn all_finite(it: impl IntoIterator<Item = f64>) -> bool {
    it.into_iter().all(f64::is_finite)
}

/// One quadrature of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    Q,
    P,
}

impl Quadrature {
    /// Row offset of this quadrature within a mode's 2x2 block.
    pub fn offset(self) -> usize {
        match self {
            Quadrature::Q => 0,
            Quadrature::P => 1,
        }
    }
}

impl std::fmt::Display for Quadrature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Quadrature::Q => "q",
            Quadrature::P => "p",
        })
    }
}

impl std::str::FromStr for Quadrature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" | "Q" => Ok(Quadrature::Q),
            "p" | "P" => Ok(Quadrature::P),
            other => Err(Error::InvalidParams {
                detail: format!("unknown quadrature {other:?}, expected q or p"),
            }),
        }
    }
}

/// Covariance matrix of a Gaussian state.
///
/// Construction checks symmetry, positive semidefiniteness, and the
/// uncertainty bound (every symplectic eigenvalue at least 1).
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    m: DMatrix<f64>,
}

impl CovMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let dim = m.nrows();
        if dim == 0 || m.ncols() != dim || dim % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim.max(2),
                got: m.ncols(),
            });
        }
        if !all_finite(m.iter().copied()) {
            return Err(Error::InvalidParams {
                detail: "non-finite covariance entry".into(),
            });
        }
        let max_dev = (&m - m.transpose()).amax();
        if max_dev > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { max_dev });
        }
        let sym = (&m + m.transpose()) * 0.5;
        let eigs = sym.clone().symmetric_eigen().eigenvalues;
        let min_eig = eigs.min();
        if min_eig < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite { min_eig });
        }
        let cov = CovMatrix { m: sym };
        let min_nu = cov
            .symplectic_eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        // Uncertainty slack scales with the matrix norm: eigenvalue solvers are
        // backward stable in an absolute sense.
        let slack = PSD_TOL * cov.m.amax().max(1.0);
        if min_nu < 1.0 - slack {
            return Err(Error::Unphysical { min_nu });
        }
        Ok(cov)
    }

    /// Vacuum covariance (identity) for `modes` modes.
    pub fn vacuum(modes: usize) -> Self {
        CovMatrix {
            m: DMatrix::identity(2 * modes, 2 * modes),
        }
    }

    pub(crate) fn from_symmetrized(m: DMatrix<f64>) -> Self {
        let sym = (&m + m.transpose()) * 0.5;
        CovMatrix { m: sym }
    }

    pub fn modes(&self) -> usize {
        self.m.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn det(&self) -> f64 {
        self.m.determinant()
    }

    /// Symplectic spectrum, one value per mode, sorted descending.
    ///
    /// Computed as the paired singular values of `V^(1/2) Omega V^(1/2)`,
    /// which stays stable where a general eigensolve on `Omega V` would not.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let eig = self.m.clone().symmetric_eigen();
        let mut sqrt_v = eig.eigenvectors.clone();
        let scale = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
        for (j, col) in sqrt_v.column_iter_mut().enumerate() {
            let mut col = col;
            col *= scale[j];
        }
        let sqrt_v = &sqrt_v * eig.eigenvectors.transpose();
        let s = &sqrt_v * omega_matrix(self.modes()) * &sqrt_v;
        let sv = s.svd(false, false).singular_values;
        (0..self.modes()).map(|k| sv[2 * k]).collect()
    }
}

/// Gaussian state: covariance plus mean vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    cov: CovMatrix,
    mean: DVector<f64>,
}

impl GaussianState {
    pub fn new(cov: CovMatrix, mean: DVector<f64>) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(Error::DimensionMismatch {
                expected: cov.dim(),
                got: mean.len(),
            });
        }
        if !all_finite(mean.iter().copied()) {
            return Err(Error::InvalidParams {
                detail: "non-finite mean entry".into(),
            });
        }
        Ok(GaussianState { cov, mean })
    }

    pub fn vacuum(modes: usize) -> Self {
        GaussianState {
            cov: CovMatrix::vacuum(modes),
            mean: DVector::zeros(2 * modes),
        }
    }

    /// One-mode thermal state with mean photon number `nbar`.
    pub fn thermal(nbar: f64) -> Result<Self> {
        if !nbar.is_finite() || nbar < 0.0 {
            return Err(Error::InvalidParams {
                detail: format!("thermal occupation nbar = {nbar} must be finite and >= 0"),
            });
        }
        Ok(GaussianState {
            cov: CovMatrix::from_symmetrized(DMatrix::identity(2, 2) * (2.0 * nbar + 1.0)),
            mean: DVector::zeros(2),
        })
    }

    /// Coherent state of amplitude `alpha = re + i im`: vacuum noise displaced
    /// to mean `(2 re, 2 im)`.
    pub fn coherent(re: f64, im: f64) -> Result<Self> {
        GaussianState::new(
            CovMatrix::vacuum(1),
            DVector::from_vec(vec![2.0 * re, 2.0 * im]),
        )
    }

    /// Two-mode squeezed vacuum with quadrature variance `omega >= 1`.
    ///
    /// Diagonal blocks `omega I`, off-diagonal `sqrt(omega^2 - 1) Z`; the state
    /// is pure for every admissible `omega`.
    pub fn tmsv(omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega < 1.0 {
            return Err(Error::InvalidParams {
                detail: format!("tmsv variance omega = {omega} must be finite and >= 1"),
            });
        }
        let c = (omega * omega - 1.0).sqrt();
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                omega, 0.0, c, 0.0, //
                0.0, omega, 0.0, -c, //
                c, 0.0, omega, 0.0, //
                0.0, -c, 0.0, omega,
            ],
        );
        Ok(GaussianState {
            cov: CovMatrix::from_symmetrized(m),
            mean: DVector::zeros(4),
        })
    }

    pub fn modes(&self) -> usize {
        self.cov.modes()
    }

    pub fn cov(&self) -> &CovMatrix {
        &self.cov
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }
}

/// Linear phase-space map preserving the symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    m: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let dim = m.nrows();
        if dim == 0 || m.ncols() != dim || dim % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim.max(2),
                got: m.ncols(),
            });
        }
        if !all_finite(m.iter().copied()) {
            return Err(Error::InvalidParams {
                detail: "non-finite symplectic entry".into(),
            });
        }
        let omega = omega_matrix(dim / 2);
        let max_dev = (&m * &omega * m.transpose() - &omega).amax();
        if max_dev > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic { max_dev });
        }
        Ok(SymplecticMatrix { m })
    }

    pub fn identity(modes: usize) -> Self {
        SymplecticMatrix {
            m: DMatrix::identity(2 * modes, 2 * modes),
        }
    }

    /// Block-diagonal composition acting on disjoint mode sets.
    pub fn direct_sum(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        let (da, db) = (self.m.nrows(), other.m.nrows());
        let mut m = DMatrix::zeros(da + db, da + db);
        m.view_mut((0, 0), (da, da)).copy_from(&self.m);
        m.view_mut((da, da), (db, db)).copy_from(&other.m);
        SymplecticMatrix { m }
    }

    pub fn modes(&self) -> usize {
        self.m.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }
}

/// Validity breakdown for one-mode channel data, reported field by field so a
/// caller can show which requirement failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct ChannelValidity {
    pub n_symmetric: bool,
    pub n_positive: bool,
    pub complete_positivity: bool,
}

impl ChannelValidity {
    pub fn ok(&self) -> bool {
        self.n_symmetric && self.n_positive && self.complete_positivity
    }
}

/// One-mode Gaussian channel `V -> T V T^T + N`, `mean -> T mean + d`.
///
/// Validity requires `N` symmetric and positive semidefinite together with
/// `det N >= (det T - 1)^2`, which is complete positivity for one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    t: Matrix2<f64>,
    n: Matrix2<f64>,
    d: Vector2<f64>,
}

impl GaussianChannel {
    pub fn new(t: Matrix2<f64>, n: Matrix2<f64>, d: Vector2<f64>) -> Result<Self> {
        if !all_finite(t.iter().chain(n.iter()).chain(d.iter()).copied()) {
            return Err(Error::InvalidChannel {
                detail: "non-finite channel entry".into(),
            });
        }
        let validity = Self::check(&t, &n);
        if !validity.ok() {
            return Err(Error::InvalidChannel {
                detail: format!(
                    "N symmetric: {}, N positive semidefinite: {}, det N >= (det T - 1)^2: {}",
                    validity.n_symmetric, validity.n_positive, validity.complete_positivity
                ),
            });
        }
        let n = (n + n.transpose()) * 0.5;
        Ok(GaussianChannel { t, n, d })
    }

    /// Validity report for candidate channel matrices.
    pub fn check(t: &Matrix2<f64>, n: &Matrix2<f64>) -> ChannelValidity {
        let n_symmetric = (n - n.transpose()).amax() <= SYMMETRY_TOL;
        let sym = (n + n.transpose()) * 0.5;
        let min_eig = sym.symmetric_eigen().eigenvalues.min();
        let n_positive = min_eig >= -PSD_TOL;
        let gap = t.determinant() - 1.0;
        let complete_positivity = sym.determinant() >= gap * gap - CHANNEL_CP_TOL;
        ChannelValidity {
            n_symmetric,
            n_positive,
            complete_positivity,
        }
    }

    pub fn identity() -> Self {
        GaussianChannel {
            t: Matrix2::identity(),
            n: Matrix2::zeros(),
            d: Vector2::zeros(),
        }
    }

    pub fn t(&self) -> &Matrix2<f64> {
        &self.t
    }

    pub fn n(&self) -> &Matrix2<f64> {
        &self.n
    }

    pub fn d(&self) -> &Vector2<f64> {
        &self.d
    }
}

/// Send a one-mode state through a one-mode channel.
pub fn apply_channel(ch: &GaussianChannel, s: &GaussianState) -> Result<GaussianState> {
    if s.modes() != 1 {
        return Err(Error::NotSingleMode {
            got_modes: s.modes(),
        });
    }
    let v = Matrix2::new(
        s.cov.m[(0, 0)],
        s.cov.m[(0, 1)],
        s.cov.m[(1, 0)],
        s.cov.m[(1, 1)],
    );
    let out = ch.t * v * ch.t.transpose() + ch.n;
    let mean = ch.t * Vector2::new(s.mean[0], s.mean[1]) + ch.d;
    let cov = CovMatrix::new(DMatrix::from_row_slice(
        2,
        2,
        &[out[(0, 0)], out[(0, 1)], out[(1, 0)], out[(1, 1)]],
    ))?;
    GaussianState::new(cov, DVector::from_vec(vec![mean[0], mean[1]]))
}

/// Conjugate a state by a symplectic map: `V -> M V M^T`, `mean -> M mean`.
pub fn conjugate(m: &SymplecticMatrix, s: &GaussianState) -> Result<GaussianState> {
    if m.modes() != s.modes() {
        return Err(Error::DimensionMismatch {
            expected: m.modes(),
            got: s.modes(),
        });
    }
    let v = &m.m * &s.cov.m * m.m.transpose();
    let mean = &m.m * &s.mean;
    // Symplectic conjugation of a physical state is physical; symmetrize and go.
    GaussianState::new(CovMatrix::from_symmetrized(v), mean)
}

/// Product state of two Gaussian states (block-diagonal covariance).
pub fn tensor(a: &GaussianState, b: &GaussianState) -> GaussianState {
    let (da, db) = (a.cov.dim(), b.cov.dim());
    let mut m = DMatrix::zeros(da + db, da + db);
    m.view_mut((0, 0), (da, da)).copy_from(&a.cov.m);
    m.view_mut((da, da), (db, db)).copy_from(&b.cov.m);
    let mut mean = DVector::zeros(da + db);
    mean.rows_mut(0, da).copy_from(&a.mean);
    mean.rows_mut(da, db).copy_from(&b.mean);
    GaussianState {
        cov: CovMatrix { m },
        mean,
    }
}

/// Keep the listed modes, tracing the rest out.
///
/// `keep` must be strictly increasing and in range.
pub fn partial_trace(s: &GaussianState, keep: &[usize]) -> Result<GaussianState> {
    if keep.is_empty() {
        return Err(Error::BadModeIndex {
            detail: "empty keep set".into(),
        });
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadModeIndex {
            detail: format!("keep set {keep:?} is not strictly increasing"),
        });
    }
    if *keep.last().unwrap() >= s.modes() {
        return Err(Error::BadModeIndex {
            detail: format!(
                "mode {} out of range for {} modes",
                keep.last().unwrap(),
                s.modes()
            ),
        });
    }
    let rows: Vec<usize> = keep.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
    let d = rows.len();
    let mut m = DMatrix::zeros(d, d);
    for (i, &ri) in rows.iter().enumerate() {
        for (j, &rj) in rows.iter().enumerate() {
            m[(i, j)] = s.cov.m[(ri, rj)];
        }
    }
    let mean = DVector::from_iterator(d, rows.iter().map(|&r| s.mean[r]));
    Ok(GaussianState {
        cov: CovMatrix { m },
        mean,
    })
}

/// Result of conditioning on an ideal homodyne measurement: the covariance of
/// the kept modes does not depend on the outcome, only the mean does.
#[derive(Debug, Clone, PartialEq)]
pub struct HomodyneConditioning {
    cov: CovMatrix,
    kept_mean: DVector<f64>,
    gain: DVector<f64>,
    measured_mean: f64,
}

impl HomodyneConditioning {
    /// Outcome-independent conditional covariance.
    pub fn cov(&self) -> &CovMatrix {
        &self.cov
    }

    /// Linear response of the conditional mean to the measured outcome.
    pub fn gain(&self) -> &DVector<f64> {
        &self.gain
    }

    /// Conditional state given a measurement outcome.
    pub fn state_for(&self, outcome: f64) -> GaussianState {
        let mean = &self.kept_mean + &self.gain * (outcome - self.measured_mean);
        GaussianState {
            cov: self.cov.clone(),
            mean,
        }
    }
}

fn conditioning_core(
    v: &DMatrix<f64>,
    mean: &DVector<f64>,
    measured_mode: usize,
    quadrature: Quadrature,
) -> Result<HomodyneConditioning> {
    let modes = v.nrows() / 2;
    let meas_row = 2 * measured_mode + quadrature.offset();
    let b = v[(meas_row, meas_row)];
    if b < CONDITIONING_FLOOR {
        return Err(Error::SingularConditioning { variance: b });
    }
    let rows: Vec<usize> = (0..modes)
        .filter(|&k| k != measured_mode)
        .flat_map(|k| [2 * k, 2 * k + 1])
        .collect();
    let d = rows.len();
    let mut a = DMatrix::zeros(d, d);
    let mut c = DVector::zeros(d);
    for (i, &ri) in rows.iter().enumerate() {
        c[i] = v[(ri, meas_row)];
        for (j, &rj) in rows.iter().enumerate() {
            a[(i, j)] = v[(ri, rj)];
        }
    }
    let gain = &c / b;
    let cond = &a - &c * c.transpose() / b;
    let kept_mean = DVector::from_iterator(d, rows.iter().map(|&r| mean[r]));
    Ok(HomodyneConditioning {
        cov: CovMatrix::from_symmetrized(cond),
        kept_mean,
        gain,
        measured_mean: mean[meas_row],
    })
}

/// Condition a multi-mode state on an ideal homodyne measurement of one
/// quadrature of `measured_mode`; the measured mode is removed.
pub fn homodyne_conditioning(
    s: &GaussianState,
    measured_mode: usize,
    quadrature: Quadrature,
) -> Result<HomodyneConditioning> {
    if s.modes() < 2 {
        return Err(Error::InvalidParams {
            detail: "conditioning requires at least two modes".into(),
        });
    }
    if measured_mode >= s.modes() {
        return Err(Error::BadModeIndex {
            detail: format!(
                "measured mode {measured_mode} out of range for {} modes",
                s.modes()
            ),
        });
    }
    conditioning_core(&s.cov.m, &s.mean, measured_mode, quadrature)
}

/// Conditional state for a specific homodyne outcome.
pub fn condition_on_homodyne(
    s: &GaussianState,
    measured_mode: usize,
    quadrature: Quadrature,
    outcome: f64,
) -> Result<GaussianState> {
    Ok(homodyne_conditioning(s, measured_mode, quadrature)?.state_for(outcome))
}
