#![forbid(unsafe_code)]

pub use nalgebra;

pub mod canonical;
pub mod cloner;
pub mod dilation;
pub mod error;
pub mod gaussian;
pub mod mc;
pub mod qkd;

pub use canonical::{
    canonical_form, canonical_form_of, classify, invariants_of, CanonicalClass, CanonicalForm,
    ChannelInvariants,
};
pub use cloner::{clone_output_cov, disturbance_product, ogc_equivalent_of, CloneMode, ClonerParams};
pub use dilation::{
    is_strongly_antidegradable, is_weakly_degradable, physical_representation,
    symplectic_interaction, tmsv_purification, PhysicalRepresentation, TmsvPurification,
};
pub use error::{Error, Result};
pub use gaussian::{
    apply_channel, condition_on_homodyne, conjugate, homodyne_conditioning, partial_trace, tensor,
    CovMatrix, GaussianChannel, GaussianState, Quadrature, SymplecticMatrix,
};
pub use mc::{
    estimate_variance, simulate_protocol, validate_against_closed_form, EmpiricalRateReport,
    SimConfig, ValidationCheck, ValidationRecord, VarianceEstimate,
};
pub use qkd::{
    asymptotic_informations, asymptotic_key_rates, bob_variances, chi_from_epsilon, dr_threshold,
    equivalent_noise, eve_variances, excess_noise, key_rates, mutual_informations,
    omega_from_epsilon, rate_report, rr_threshold, threshold_sweep, AttackParams,
    MutualInformations, RateReport, SweepRow,
};
