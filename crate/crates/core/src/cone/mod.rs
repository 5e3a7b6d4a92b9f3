//! Exact certification that every basis coordinate is nonnegative on the
//! symmetrized F-nef cone.

mod certificate;
mod dd;
pub mod simplex;
mod system;

pub use certificate::{
    certify_form, certify_nonnegative, f_nef_witness, validate_combination, verify_effectivity, verify_system,
    CheckError, ContainmentReport, Counterexample, FarkasCertificate, FormOutcome, Outcome, TargetOutcome,
};
pub use dd::{extreme_rays, DdResult};
pub use system::{build_system, HalfspaceSystem, SystemInequality};
