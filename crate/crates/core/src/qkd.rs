//! Security analysis of coherent-state quadrature-switching key distribution
//! against the optimal individual Gaussian attack on a regular channel.
//!
//! The attack is parameterized by the channel transmission `tau` and the
//! variance `omega >= 1` of the probe Eve entangles with the line; Alice
//! modulates with variance `mu`. Everything here is expressed through scalar
//! quadrature variances, with channel noise referred to the input as
//! `chi = |1 - tau| / |tau| * omega` and its excess part
//! `epsilon = |1 - tau| / |tau| * (omega - 1)` on top of the unavoidable
//! vacuum contribution. Informations are in bits (base-2 logs).

use crate::error::{Error, Result};

/// Attacks with `tau` this close to 0 or 1 are rejected: the interaction
/// degenerates at the fixed points.
pub const TAU_ATTACK_TOL: f64 = 1e-9;

fn log2(x: f64) -> f64 {
    x.log2()
}

/// Individual-attack parameters: transmission, probe variance, modulation.
///
/// `mu` may be `f64::INFINITY`, which selects the closed asymptotic
/// (high-modulation) expressions wherever rates are computed.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AttackParams {
    tau: f64,
    omega: f64,
    mu: f64,
}

impl AttackParams {
    pub fn new(tau: f64, omega: f64, mu: f64) -> Result<Self> {
        if !tau.is_finite() || tau.abs() <= TAU_ATTACK_TOL || (tau - 1.0).abs() <= TAU_ATTACK_TOL {
            return Err(Error::InvalidParams {
                detail: format!("tau = {tau} must be finite and away from 0 and 1"),
            });
        }
        if !omega.is_finite() || omega < 1.0 {
            return Err(Error::InvalidParams {
                detail: format!("omega = {omega} must be finite and >= 1"),
            });
        }
        if mu.is_nan() || mu < 0.0 {
            return Err(Error::InvalidParams {
                detail: format!("mu = {mu} must be >= 0 (infinity selects the asymptotic regime)"),
            });
        }
        Ok(AttackParams { tau, omega, mu })
    }

    /// Same attack evaluated in the high-modulation limit.
    pub fn asymptotic(tau: f64, omega: f64) -> Result<Self> {
        AttackParams::new(tau, omega, f64::INFINITY)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn is_asymptotic(&self) -> bool {
        self.mu.is_infinite()
    }

    /// Total input-referred channel noise for this attack.
    pub fn chi(&self) -> f64 {
        equivalent_noise(self.omega, self.tau)
    }

    /// Excess noise above the vacuum floor for this attack.
    pub fn epsilon(&self) -> f64 {
        excess_noise(self.omega, self.tau)
    }
}

/// Bob's quadrature variance and his variance conditioned on Alice's sign:
/// `(V_B, V_B|A)`.
pub fn bob_variances(p: &AttackParams) -> (f64, f64) {
    let t = p.tau.abs();
    let r = (1.0 - p.tau).abs();
    let conditional = t + r * p.omega;
    if p.mu.is_infinite() {
        (f64::INFINITY, conditional)
    } else {
        (t * (p.mu + 1.0) + r * p.omega, conditional)
    }
}

/// Eve's effective variances after folding in her probe-side information:
/// `(V_E, V_E|A, V_B|E)`.
pub fn eve_variances(p: &AttackParams) -> (f64, f64, f64) {
    let t = p.tau.abs();
    let r = (1.0 - p.tau).abs();
    let w_inv = 1.0 / p.omega;
    let v_e_given_a = r + t * w_inv;
    if p.mu.is_infinite() {
        (f64::INFINITY, v_e_given_a, 1.0 / (r * p.omega))
    } else {
        let v_e = r * (p.mu + 1.0) + t * w_inv;
        let v_b_given_e = 1.0 / (t / (p.mu + 1.0) + r * p.omega);
        (v_e, v_e_given_a, v_b_given_e)
    }
}

/// Input-referred channel noise `chi = |1 - tau| omega / |tau|`.
pub fn equivalent_noise(omega: f64, tau: f64) -> f64 {
    (1.0 - tau).abs() * omega / tau.abs()
}

/// Excess noise `epsilon = |1 - tau| (omega - 1) / |tau|`: what the attack
/// adds beyond the vacuum fluctuations an ideal line would imprint.
pub fn excess_noise(omega: f64, tau: f64) -> f64 {
    (1.0 - tau).abs() * (omega - 1.0) / tau.abs()
}

/// Noise referred back from an excess-noise figure:
/// `chi = |1 - tau| / |tau| + epsilon`.
pub fn chi_from_epsilon(epsilon: f64, tau: f64) -> f64 {
    (1.0 - tau).abs() / tau.abs() + epsilon
}

/// Probe variance realizing a given excess noise at fixed `tau`.
pub fn omega_from_epsilon(epsilon: f64, tau: f64) -> f64 {
    1.0 + epsilon * tau.abs() / (1.0 - tau).abs()
}

/// Pairwise mutual informations `(I_AB, I_AE, I_BE)` in bits.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MutualInformations {
    pub i_ab: f64,
    pub i_ae: f64,
    pub i_be: f64,
}

/// Exact finite-modulation informations from the variance ratios.
pub fn mutual_informations(p: &AttackParams) -> Result<MutualInformations> {
    if !p.mu.is_finite() || p.mu <= 0.0 {
        return Err(Error::InvalidParams {
            detail: format!("mutual informations need finite mu > 0, got {}", p.mu),
        });
    }
    let (v_b, v_b_given_a) = bob_variances(p);
    let (v_e, v_e_given_a, v_b_given_e) = eve_variances(p);
    for v in [v_b_given_a, v_e_given_a, v_b_given_e] {
        if v <= 0.0 {
            return Err(Error::InfiniteInformation { variance: v });
        }
    }
    Ok(MutualInformations {
        i_ab: 0.5 * log2(v_b / v_b_given_a),
        i_ae: 0.5 * log2(v_e / v_e_given_a),
        i_be: 0.5 * log2(v_b / v_b_given_e),
    })
}

/// High-modulation forms evaluated at the configured (finite) `mu`:
/// `I_AB -> log2(mu / (1 + chi)) / 2`, `I_AE -> log2(mu / (1 + 1/chi)) / 2`,
/// `I_BE -> log2(tau^2 chi mu) / 2`.
pub fn asymptotic_informations(p: &AttackParams) -> Result<MutualInformations> {
    if !p.mu.is_finite() || p.mu <= 0.0 {
        return Err(Error::InvalidParams {
            detail: format!("asymptotic forms are evaluated at finite mu > 0, got {}", p.mu),
        });
    }
    let chi = p.chi();
    Ok(MutualInformations {
        i_ab: 0.5 * log2(p.mu / (1.0 + chi)),
        i_ae: 0.5 * log2(p.mu / (1.0 + 1.0 / chi)),
        i_be: 0.5 * log2(p.tau * p.tau * chi * p.mu),
    })
}

/// Asymptotic key rates `(direct, reverse)` in bits per use, as functions of
/// the transmission and total noise alone. A noiseless line (`chi = 0`) sends
/// both rates to infinity.
pub fn asymptotic_key_rates(tau: f64, chi: f64) -> (f64, f64) {
    if chi <= 0.0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let direct = 0.5 * log2((1.0 + 1.0 / chi) / (1.0 + chi));
    let reverse = 0.5 * log2(1.0 / (tau * tau * chi * (1.0 + chi)));
    (direct, reverse)
}

/// Key rates `(R_dr, R_rr)` for the attack: information differences at finite
/// `mu`, closed asymptotic forms at `mu = infinity`.
pub fn key_rates(p: &AttackParams) -> Result<(f64, f64)> {
    if p.mu.is_infinite() {
        return Ok(asymptotic_key_rates(p.tau, p.chi()));
    }
    let mi = mutual_informations(p)?;
    Ok((mi.i_ab - mi.i_ae, mi.i_ab - mi.i_be))
}

/// Largest excess noise at which direct reconciliation still yields a
/// positive asymptotic rate; zero wherever the line is insecure already at
/// `epsilon = 0` (all `tau <= 1/2`).
pub fn dr_threshold(tau: f64) -> f64 {
    debug_assert!(tau != 0.0 && tau != 1.0);
    (1.0 - (1.0 - tau).abs() / tau.abs()).max(0.0)
}

/// Largest excess noise at which reverse reconciliation still yields a
/// positive asymptotic rate, clamped at zero.
pub fn rr_threshold(tau: f64) -> f64 {
    debug_assert!(tau != 0.0 && tau != 1.0);
    let t = tau.abs();
    (((4.0 + tau * tau).sqrt() - t - 2.0 * (1.0 - tau).abs()) / (2.0 * t)).max(0.0)
}

/// One grid point of a threshold sweep.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(untagged)]
pub enum SweepRow {
    /// Transmission at a fixed point of the classification: no thresholds.
    Excluded { tau: f64, excluded: bool },
    /// Both reconciliation thresholds at this transmission.
    Thresholds { tau: f64, eps_dr: f64, eps_rr: f64 },
}

impl SweepRow {
    pub fn tau(&self) -> f64 {
        match self {
            SweepRow::Excluded { tau, .. } | SweepRow::Thresholds { tau, .. } => *tau,
        }
    }

    pub fn thresholds(&self) -> Option<(f64, f64)> {
        match self {
            SweepRow::Excluded { .. } => None,
            SweepRow::Thresholds { eps_dr, eps_rr, .. } => Some((*eps_dr, *eps_rr)),
        }
    }
}

/// Evaluate both thresholds over a transmission grid. Grid points within
/// `TAU_ATTACK_TOL` of 0 or 1 are kept in the output but flagged excluded
/// rather than silently dropped.
pub fn threshold_sweep(tau_grid: &[f64]) -> Vec<SweepRow> {
    tau_grid
        .iter()
        .map(|&tau| {
            if !tau.is_finite()
                || tau.abs() <= TAU_ATTACK_TOL
                || (tau - 1.0).abs() <= TAU_ATTACK_TOL
            {
                SweepRow::Excluded { tau, excluded: true }
            } else {
                SweepRow::Thresholds {
                    tau,
                    eps_dr: dr_threshold(tau),
                    eps_rr: rr_threshold(tau),
                }
            }
        })
        .collect()
}

/// Full security report for one attack: variances, informations, rates, and
/// the derived noise figures. Diverging quantities are `None` in the
/// asymptotic regime.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RateReport {
    pub tau: f64,
    pub omega: f64,
    /// `None` encodes the high-modulation limit.
    pub mu: Option<f64>,
    /// Vacuum noise unit referred to the input; always 1 in this convention.
    pub delta: f64,
    pub chi: f64,
    pub epsilon: f64,
    pub v_b: Option<f64>,
    pub v_b_given_a: f64,
    pub v_e: Option<f64>,
    pub v_e_given_a: f64,
    pub v_b_given_e: f64,
    pub i_ab: Option<f64>,
    pub i_ae: Option<f64>,
    pub i_be: Option<f64>,
    pub r_dr: f64,
    pub r_rr: f64,
}

/// Assemble the full report for an attack.
pub fn rate_report(p: &AttackParams) -> Result<RateReport> {
    let (v_b, v_b_given_a) = bob_variances(p);
    let (v_e, v_e_given_a, v_b_given_e) = eve_variances(p);
    let (r_dr, r_rr) = key_rates(p)?;
    let finite = |x: f64| x.is_finite().then_some(x);
    let mi = if p.is_asymptotic() {
        None
    } else {
        Some(mutual_informations(p)?)
    };
    Ok(RateReport {
        tau: p.tau,
        omega: p.omega,
        mu: finite(p.mu),
        delta: 1.0,
        chi: p.chi(),
        epsilon: p.epsilon(),
        v_b: finite(v_b),
        v_b_given_a,
        v_e: finite(v_e),
        v_e_given_a,
        v_b_given_e,
        i_ab: mi.map(|m| m.i_ab),
        i_ae: mi.map(|m| m.i_ae),
        i_be: mi.map(|m| m.i_be),
        r_dr,
        r_rr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn attack(tau: f64, omega: f64, mu: f64) -> AttackParams {
        AttackParams::new(tau, omega, mu).unwrap()
    }

    /// Bisect the reverse-reconciliation rate to its zero in excess noise.
    /// Kept deliberately independent of the threshold formulas.
    fn rr_threshold_by_root_find(tau: f64) -> f64 {
        let rate = |eps: f64| asymptotic_key_rates(tau, chi_from_epsilon(eps, tau)).1;
        if rate(0.0) <= 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while rate(hi) > 0.0 {
            hi *= 2.0;
            assert!(hi < 1e6, "no sign change found");
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rate(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn bob_variance_examples() {
        assert_abs_diff_eq!(bob_variances(&attack(0.5, 1.0, 0.0)).0, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bob_variances(&attack(0.5, 3.0, 8.0)).0, 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bob_variances(&attack(2.0, 1.0, 0.0)).0, 3.0, epsilon = 1e-15);
        let (v, v_cond) = bob_variances(&attack(0.5, 3.0, 8.0));
        assert_abs_diff_eq!(v_cond, 2.0, epsilon = 1e-15);
        assert!(v > v_cond);
    }

    #[test]
    fn eve_variance_examples() {
        let (v_e, v_e_given_a, v_b_given_e) = eve_variances(&attack(0.5, 1.0, 0.0));
        assert_abs_diff_eq!(v_e, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v_e_given_a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v_b_given_e, 1.0, epsilon = 1e-15);

        let (v_e, _, _) = eve_variances(&attack(0.5, 3.0, 8.0));
        assert_abs_diff_eq!(v_e, 14.0 / 3.0, epsilon = 1e-12);

        let (_, _, v_b_given_e) = eve_variances(&attack(0.5, 3.0, 1e6));
        assert_abs_diff_eq!(v_b_given_e, 2.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn noise_figures() {
        assert_abs_diff_eq!(equivalent_noise(1.0, 0.5), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(equivalent_noise(3.0, 0.5), 3.0, epsilon = 1e-15);
        // Noise referred to the input vanishes as the line turns transparent.
        assert!(equivalent_noise(2.0, 1.0 - 1e-9) < 5e-9);
        assert_abs_diff_eq!(excess_noise(1.0, 0.5), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(excess_noise(1.0, -1.3), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(excess_noise(3.0, 0.5), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn noise_maps_are_mutually_inverse() {
        for tau in [-2.0, -0.4, 0.3, 0.5, 0.9, 1.2, 3.0] {
            for omega in [1.0, 1.5, 3.0, 10.0] {
                let eps = excess_noise(omega, tau);
                assert_abs_diff_eq!(
                    chi_from_epsilon(eps, tau),
                    equivalent_noise(omega, tau),
                    epsilon = 1e-12
                );
                assert_abs_diff_eq!(omega_from_epsilon(eps, tau), omega, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn shared_chi_pairs_agree_bitwise() {
        assert_eq!(equivalent_noise(3.0, 0.5), 3.0);
        assert_eq!(equivalent_noise(9.0, 0.75), 3.0);
    }

    #[test]
    fn informations_balance_on_a_symmetric_line() {
        // At tau = 1/2 with a vacuum probe, Bob and Eve see the same state.
        for mu in [0.5, 4.0, 100.0] {
            let mi = mutual_informations(&attack(0.5, 1.0, mu)).unwrap();
            assert_abs_diff_eq!(mi.i_ab, mi.i_ae, epsilon = 1e-12);
        }
    }

    #[test]
    fn informations_approach_their_asymptotes() {
        let p = attack(0.5, 3.0, 1e6);
        let mi = mutual_informations(&p).unwrap();
        assert_abs_diff_eq!(mi.i_ab, 0.5 * (1e6_f64 / 4.0).log2(), epsilon = 1e-5);
        assert_abs_diff_eq!(mi.i_be, 0.5 * (0.25 * 3.0 * 1e6_f64).log2(), epsilon = 1e-3);
        let asym = asymptotic_informations(&p).unwrap();
        assert_abs_diff_eq!(mi.i_ab, asym.i_ab, epsilon = 1e-5);
        assert_abs_diff_eq!(mi.i_ae, asym.i_ae, epsilon = 1e-5);
        assert_abs_diff_eq!(mi.i_be, asym.i_be, epsilon = 1e-3);
    }

    #[test]
    fn informations_require_positive_finite_mu() {
        assert!(mutual_informations(&attack(0.5, 1.0, 0.0)).is_err());
        assert!(mutual_informations(&AttackParams::asymptotic(0.5, 1.0).unwrap()).is_err());
    }

    #[test]
    fn direct_rate_vanishes_at_unit_noise() {
        // chi = 1 balances the two sides exactly.
        let (dr, _) = asymptotic_key_rates(0.5, 1.0);
        assert_eq!(dr, 0.0);
        let p = AttackParams::asymptotic(0.5, 1.0).unwrap();
        let (dr, rr) = key_rates(&p).unwrap();
        assert_eq!(dr, 0.0);
        // Reverse reconciliation still runs half a bit ahead there.
        assert_eq!(rr, 0.5);
    }

    #[test]
    fn reverse_rate_zero_at_its_noise_root() {
        // chi solving tau^2 chi (1 + chi) = 1 at tau = 0.5.
        let chi = (17.0_f64.sqrt() - 1.0) / 2.0;
        let p = attack(0.5, chi, f64::INFINITY);
        let (_, rr) = key_rates(&p).unwrap();
        assert_abs_diff_eq!(rr, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn noiseless_line_rates_diverge() {
        let (dr, rr) = asymptotic_key_rates(0.5, 0.0);
        assert!(dr.is_infinite() && dr > 0.0);
        assert!(rr.is_infinite() && rr > 0.0);
    }

    #[test]
    fn direct_threshold_values() {
        assert_eq!(dr_threshold(0.5), 0.0);
        assert_eq!(dr_threshold(0.3), 0.0);
        assert_eq!(dr_threshold(-1.0), 0.0);
        assert_abs_diff_eq!(dr_threshold(2.0), 0.5, epsilon = 1e-15);
        // chi_from_epsilon(eps, 0.75) = 1/3 + eps reaches 1 at eps = 2/3.
        assert_abs_diff_eq!(dr_threshold(0.75), 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn reverse_threshold_values() {
        let expect = 17.0_f64.sqrt() / 2.0 - 1.5;
        assert_abs_diff_eq!(rr_threshold(0.5), expect, epsilon = 1e-12);
        assert_abs_diff_eq!(rr_threshold(0.5), rr_threshold_by_root_find(0.5), epsilon = 1e-9);
        // Low-transmission limit: half a vacuum unit of tolerable excess noise.
        assert_abs_diff_eq!(rr_threshold(1e-6), 0.5, epsilon = 1e-5);
        assert_abs_diff_eq!(
            rr_threshold(1e-6),
            rr_threshold_by_root_find(1e-6),
            epsilon = 1e-9
        );
        // The reverse threshold closes exactly at tau = 3/2 and stays closed.
        assert_eq!(rr_threshold(1.5), 0.0);
        assert_eq!(rr_threshold(2.0), 0.0);
        assert_eq!(rr_threshold(-0.5), 0.0);
        assert!(rr_threshold(1.5 - 1e-6) > 0.0);
    }

    #[test]
    fn threshold_sweep_flags_fixed_points() {
        let rows = threshold_sweep(&[0.25, 0.5, 0.75, 1.0, 2.0, 0.0]);
        assert_eq!(rows.len(), 6);
        let (dr, _) = rows[0].thresholds().unwrap();
        assert_eq!(dr, 0.0);
        let (dr, _) = rows[1].thresholds().unwrap();
        assert_eq!(dr, 0.0);
        let (dr, _) = rows[2].thresholds().unwrap();
        assert_abs_diff_eq!(dr, 2.0 / 3.0, epsilon = 1e-15);
        assert!(rows[3].thresholds().is_none());
        assert!(rows[5].thresholds().is_none());
        let (dr, rr) = rows[4].thresholds().unwrap();
        assert_eq!((dr, rr), (0.5, 0.0));
    }

    #[test]
    fn attack_params_validation() {
        assert!(AttackParams::new(0.0, 1.0, 1.0).is_err());
        assert!(AttackParams::new(1.0, 1.0, 1.0).is_err());
        assert!(AttackParams::new(1.0 + 1e-12, 1.0, 1.0).is_err());
        assert!(AttackParams::new(0.5, 0.8, 1.0).is_err());
        assert!(AttackParams::new(0.5, 1.0, -1.0).is_err());
        assert!(AttackParams::new(0.5, 1.0, f64::INFINITY).is_ok());
    }

    #[test]
    fn rate_report_finite_and_asymptotic() {
        let rep = rate_report(&attack(0.5, 3.0, 8.0)).unwrap();
        assert_eq!(rep.mu, Some(8.0));
        assert_abs_diff_eq!(rep.v_b.unwrap(), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.chi, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rep.epsilon, 2.0, epsilon = 1e-15);
        assert_eq!(rep.delta, 1.0);
        let mi = mutual_informations(&attack(0.5, 3.0, 8.0)).unwrap();
        assert_eq!(rep.r_dr, mi.i_ab - mi.i_ae);

        let rep = rate_report(&AttackParams::asymptotic(0.5, 1.0).unwrap()).unwrap();
        assert_eq!(rep.mu, None);
        assert_eq!(rep.v_b, None);
        assert_eq!(rep.i_ab, None);
        assert_abs_diff_eq!(rep.v_b_given_a, 1.0, epsilon = 1e-15);
        assert_eq!((rep.r_dr, rep.r_rr), (0.0, 0.5));
    }

    #[test]
    fn additive_noise_description_matches_the_physical_model() {
        // V_B = |tau| (mu + 1 + chi) makes the information a pure function of
        // mu and chi; the additive description drops the |tau| prefactor.
        for (tau, omega, mu) in [(0.5, 3.0, 1e8), (2.0, 1.5, 1e8), (-1.0, 2.0, 1e8)] {
            let p = attack(tau, omega, mu);
            let chi = p.chi();
            let mi = mutual_informations(&p).unwrap();
            let additive_ab = 0.5 * ((mu + 1.0 + chi) / (1.0 + chi)).log2();
            assert_abs_diff_eq!(mi.i_ab, additive_ab, epsilon = 1e-6);
            let chi_inv = 1.0 / chi;
            let additive_ae = 0.5 * ((mu + 1.0 + chi_inv) / (1.0 + chi_inv)).log2();
            assert_abs_diff_eq!(mi.i_ae, additive_ae, epsilon = 1e-6);
        }
    }
}
