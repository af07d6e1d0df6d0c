//! Intricacy functionals of finite systems of discrete random variables.
//!
//! The crate computes exact subset entropies and entropy profiles, the
//! intricacy of a system for any symmetric mixing measure (the neural
//! complexity among them), the ceilings `i^c_N(x)` and `i^c(x)` on
//! normalized intricacy at normalized entropy `x`, and the sparse random
//! construction whose systems approach those ceilings.
//!
//! Data-parallel loops (subset enumeration, seed sweeps, restarts) run on
//! rayon when the default `parallel` feature is on; see [`exec`].

pub mod coeffs;
pub mod construction;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod info;
pub mod intricacy;
pub mod law;
pub mod profile;
pub mod rng;

pub use coeffs::{
    coefficient_table, dn_law, validate_coefficients, CoefficientTable, DnLaw, Family, MixingMeasure,
    ValidationReport,
};
pub use construction::{
    expected_subset_entropy, flora_envelope, realized_profile, sample_sparse_system, ConstructionSpec,
};
pub use error::{Error, Result};
pub use exec::Exec;
pub use experiments::{
    convergence_sweep, maximizer_search, profile_convergence, simultaneity_check, threshold_census,
    CensusReport, ExperimentRecord,
};
pub use info::{
    conditional_entropy, entropy, entropy_profile_exact, entropy_profile_sampled, marginal,
    mutual_information, subset_entropy, Limits,
};
pub use intricacy::{
    deficit_report, g_functional, ic_limit, ic_n, ideal_profile, intricacy_defn, intricacy_from_profile,
    profile_norm, DeficitReport,
};
pub use law::{Configuration, SubsetMask, SystemLaw};
pub use profile::EntropyProfile;
